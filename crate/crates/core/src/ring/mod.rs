//! Exact base-ring arithmetic: rationals with restricted denominators,
//! cyclotomic integers, Fermat-quotient p-derivations, Legendre symbols,
//! residues modulo prime powers and rational reconstruction.

pub mod arith;
pub mod cyclo;
pub mod padic;
pub mod rational;
pub mod residue;

pub use arith::{is_prime, legendre, rational_reconstruct};
pub use cyclo::{BaseRingDesc, CycloScalar};
pub use padic::{PadicOp, PadicScalar};
pub use rational::Rational;
pub use residue::ResidueRing;
