//! Numeric scalar abstraction for utilities and probabilities.
//!
//! Everything that compares or averages utilities is written against
//! [`Scalar`], so the same rules run over exact rationals (the default used by
//! the CLI and the test suites) or over `f64`/`f32` for quick experiments.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Num, One, Signed, Zero};

/// A totally-ordered-enough number type usable as a utility or probability.
pub trait Scalar:
    Num + Clone + PartialOrd + Debug + Display + Send + Sync + 'static
{
    /// Builds `numer / denom`. Panics if `denom == 0`.
    fn from_ratio(numer: i64, denom: i64) -> Self;

    /// Whether `total` counts as a unit mass.
    ///
    /// Exact types require equality; floating point types accept a small
    /// relative error.
    fn is_unit(total: &Self) -> bool {
        total.is_one()
    }

    /// Whether the scalar represents a strictly positive number.
    fn is_positive(&self) -> bool {
        *self > Self::zero()
    }
}

impl Scalar for BigRational {
    fn from_ratio(numer: i64, denom: i64) -> Self {
        Ratio::new(BigInt::from(numer), BigInt::from(denom))
    }
}

impl Scalar for Ratio<i64> {
    fn from_ratio(numer: i64, denom: i64) -> Self {
        Ratio::new(numer, denom)
    }
}

impl Scalar for Ratio<i128> {
    fn from_ratio(numer: i64, denom: i64) -> Self {
        Ratio::new(numer as i128, denom as i128)
    }
}

impl Scalar for f64 {
    fn from_ratio(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        numer as f64 / denom as f64
    }

    fn is_unit(total: &Self) -> bool {
        (total - 1.0).abs() <= 1e-9
    }
}

impl Scalar for f32 {
    fn from_ratio(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        numer as f32 / denom as f32
    }

    fn is_unit(total: &Self) -> bool {
        (total - 1.0).abs() <= 1e-5
    }
}

/// Formats an exact rational as `p/q` in lowest terms, or bare `p` for integers.
pub fn format_rational(value: &BigRational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Parses `<int>` or `<int>/<int>` into an exact rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    let (numer, denom) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let numer: BigInt = numer.parse().ok()?;
    let denom: BigInt = denom.parse().ok()?;
    if denom.is_zero() || denom.is_negative() {
        return None;
    }
    Some(Ratio::new(numer, denom))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_text_round_trip() {
        for text in ["0", "-1", "7/2", "-3/16", "25/2"] {
            let value = parse_rational(text).unwrap();
            assert_eq!(format_rational(&value), text);
        }
        assert_eq!(format_rational(&parse_rational("2/4").unwrap()), "1/2");
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("1/-2").is_none());
        assert!(parse_rational("x").is_none());
    }

    #[test]
    fn unit_checks() {
        assert!(<BigRational as Scalar>::is_unit(&BigRational::from_ratio(3, 3)));
        assert!(!<BigRational as Scalar>::is_unit(&BigRational::from_ratio(2, 3)));
        let third = f64::from_ratio(1, 3);
        assert!(f64::is_unit(&(third + third + third)));
        assert!(f32::is_unit(&(f32::from_ratio(1, 10) * 10.0)));
    }
}
