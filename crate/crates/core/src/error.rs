use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("prime {p} is not admissible: it must be an odd prime not dividing {forbidden}")]
    InadmissiblePrime { p: u64, forbidden: String },
    #[error("inexact division by {divisor}")]
    InexactDivision { divisor: u64 },
    #[error("invalid base ring: {0}")]
    InvalidBaseRing(String),
    #[error("denominator {den} has prime factors outside N0 = {n0}")]
    ForbiddenDenominator { den: String, n0: u64 },
    #[error("mixing p-adic scalars of different precision: {left} vs {right}")]
    PrecisionMismatch { left: String, right: String },
    #[error("{0} is not a unit")]
    NonUnit(String),
    #[error("coefficient ring or monomial basis mismatch: {0}")]
    RingMismatch(String),
    #[error("substitution image for variable {0} has a nonzero constant term")]
    NonzeroConstantTerm(usize),
    #[error("constant term of the matrix is not invertible")]
    SingularConstantTerm,
    #[error("invalid form: {0}")]
    InvalidForm(String),
    #[error("invalid lift parameters: {0}")]
    InvalidParams(String),
    #[error("Hensel step at precision {precision} is not uniquely solvable: {reason}")]
    NonUniqueStep { precision: u32, reason: String },
    #[error("coefficient {coefficient} of entry ({row},{col}) admits no reconstruction at precision {precision}")]
    AmbiguousReconstruction {
        row: usize,
        col: usize,
        coefficient: usize,
        precision: u32,
    },
    #[error("lift is not global along the identity: constant term {constant} is not the identity")]
    NotGlobalAlongIdentity { constant: String },
    #[error("reconstructed lift failed its certificate: {0}")]
    CertificateFailure(String),
    #[error("commutator coefficient {value} is not divisible by {p}")]
    CurvatureNotDivisible { p: u64, value: String },
    #[error("form mismatch: {0}")]
    FormMismatch(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("matrix is not (anti)symmetric as declared: {0}")]
    SymmetryViolation(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
