//! Truncated multivariate power series in the entries of `T = x − 1`, over
//! a pluggable exact coefficient ring, with matrix algebra and substitution.

pub mod basis;
pub mod coeff;
pub mod exact;
pub mod matrix;
#[allow(clippy::module_inception)]
pub mod series;

pub use basis::{MonoIndex, MonomialBasis};
pub use coeff::{CoeffRing, CycloRing, Rationals};
pub use matrix::MatrixSeries;
pub use series::Series;
