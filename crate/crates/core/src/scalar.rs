//! The exact coordinate type and a few number-theoretic helpers.
//!
//! Every coordinate in the crate is a [`Scalar`]: an arbitrary precision
//! rational kept in lowest terms with a positive denominator (zero is `0/1`).
//! `BigRational` already maintains that normal form after every operation.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Scalar = BigRational;

pub fn int(v: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(v))
}

pub fn frac(n: i64, d: i64) -> Scalar {
    Scalar::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Scalar {
    Scalar::zero()
}

pub fn one() -> Scalar {
    Scalar::one()
}

/// Parses `"p/q"` or a plain integer string.
pub fn parse_scalar(text: &str) -> Option<Scalar> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Scalar::new(num, den))
}

/// Integer-or-fraction display, `-3/2` or `7`.
pub fn fmt_scalar(s: &Scalar) -> String {
    if s.is_integer() {
        s.numer().to_string()
    } else {
        format!("{}/{}", s.numer(), s.denom())
    }
}

/// Exact square root if `s` is the square of a rational.
pub fn rational_sqrt(s: &Scalar) -> Option<Scalar> {
    if s.is_negative() {
        return None;
    }
    let n = int_sqrt(s.numer())?;
    let d = int_sqrt(s.denom())?;
    Some(Scalar::new(n, d))
}

fn int_sqrt(v: &BigInt) -> Option<BigInt> {
    let r = v.sqrt();
    (&r * &r == *v).then_some(r)
}

pub fn to_f64(s: &Scalar) -> f64 {
    use num_traits::ToPrimitive;
    s.to_f64().unwrap_or(f64::NAN)
}

pub fn midpoint(a: &Scalar, b: &Scalar) -> Scalar {
    (a + b) / int(2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_scalar("1/3"), Some(frac(1, 3)));
        assert_eq!(parse_scalar("-4/6"), Some(frac(-2, 3)));
        assert_eq!(parse_scalar("12"), Some(int(12)));
        assert_eq!(parse_scalar("3/-9"), Some(frac(-1, 3)));
        assert_eq!(parse_scalar("1/0"), None);
        assert_eq!(parse_scalar("0.5"), None);
        assert_eq!(parse_scalar(""), None);
    }

    #[test]
    fn lowest_terms_and_zero() {
        let z = frac(0, 7);
        assert_eq!(z.numer(), &BigInt::from(0));
        assert_eq!(z.denom(), &BigInt::from(1));
        let s = frac(6, -4);
        assert_eq!(fmt_scalar(&s), "-3/2");
        assert!(s.denom().is_positive());
    }

    #[test]
    fn sqrt_detects_squares() {
        assert_eq!(rational_sqrt(&frac(9, 4)), Some(frac(3, 2)));
        assert_eq!(rational_sqrt(&int(2)), None);
        assert_eq!(rational_sqrt(&int(-4)), None);
        assert_eq!(rational_sqrt(&zero()), Some(zero()));
    }
}
