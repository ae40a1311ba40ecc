//! Exact rationals and their canonical string form `±num/den`.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// Canonical string: sign only when negative, denominator omitted when 1.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let t = t.strip_prefix('+').unwrap_or(t);
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() || den < BigInt::zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}
