//! Numeric backends.
//!
//! Every operator in this crate is generic over [`Scalar`]. The default
//! backend is `f64`; [`Rational`] (arbitrary precision) is used where a
//! property only holds on a measure-zero set, such as the zero interior sum of
//! a nonbasic fixed point.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Exact arbitrary-precision rational number.
pub type Rational = BigRational;

pub trait Scalar:
    Clone + PartialOrd + Debug + Send + Sync + num_traits::Num + Signed + 'static
{
    /// Exact conversion of a finite binary float. `None` for NaN or infinities.
    fn from_f64(x: f64) -> Option<Self>;

    fn from_count(n: usize) -> Self;

    /// Nearest `f64` (exact for the float backend).
    fn to_f64(&self) -> f64;

    /// Absolute tolerance used when checking that an interior block of `n`
    /// components sums to zero, or that a component is zero. Zero for exact
    /// backends.
    fn interior_sum_tolerance(n: usize) -> Self;

    fn is_exact() -> bool;
}

impl Scalar for f64 {
    fn from_f64(x: f64) -> Option<Self> {
        x.is_finite().then_some(x)
    }

    fn from_count(n: usize) -> Self {
        n as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn interior_sum_tolerance(n: usize) -> Self {
        1e-12 * n.max(1) as f64
    }

    fn is_exact() -> bool {
        false
    }
}

impl Scalar for Rational {
    fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x)
    }

    fn from_count(n: usize) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn interior_sum_tolerance(_n: usize) -> Self {
        Self::zero()
    }

    fn is_exact() -> bool {
        true
    }
}

/// `num / den` as an exact rational.
pub fn ratio(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses a plain decimal literal (`-0.45`, `3`, `1e-3`) or a fraction
/// (`-9/20`) into the rational it denotes, without passing through binary
/// floating point.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }

    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }

    let all_digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(all_digits.parse::<BigInt>().ok()?);
    let scale = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    let power = num_traits::pow(ten, scale.unsigned_abs() as usize);
    if scale >= 0 {
        value *= power;
    } else {
        value /= power;
    }
    if negative {
        value = -value;
    }
    Some(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_literals_parse_exactly() {
        assert_eq!(parse_rational("0.1"), Some(ratio(1, 10)));
        assert_eq!(parse_rational("-0.45"), Some(ratio(-9, 20)));
        assert_eq!(parse_rational("3"), Some(ratio(3, 1)));
        assert_eq!(parse_rational("1e-3"), Some(ratio(1, 1000)));
        assert_eq!(parse_rational("2.5E1"), Some(ratio(25, 1)));
        assert_eq!(parse_rational(" -1/6 "), Some(ratio(-1, 6)));
        assert_eq!(parse_rational(".5"), Some(ratio(1, 2)));
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("-"), None);
    }

    #[test]
    fn float_conversion_is_exact() {
        let r = <Rational as Scalar>::from_f64(0.1).unwrap();
        assert_ne!(r, ratio(1, 10));
        assert_eq!(Scalar::to_f64(&r), 0.1);
        assert!(<Rational as Scalar>::from_f64(f64::NAN).is_none());
        assert!(<f64 as Scalar>::from_f64(f64::INFINITY).is_none());
    }
}
