//! Arbitrary-precision rational scalars.
//!
//! `BigRational` already maintains the invariants the engine needs
//! (lowest terms, positive denominator, structural equality), so this
//! module only adds constructors and the ASCII `a/b` format used in
//! problem files and reports.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// Integer as a rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Exact fraction `a/b`; panics on `b == 0`.
pub fn ratio(a: i64, b: i64) -> Rational {
    Rational::new(BigInt::from(a), BigInt::from(b))
}

/// Parse `a` or `a/b` with optional leading sign.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| Error::invalid(format!("bad integer `{num}` in rational `{s}`")))?;
    let den: BigInt = match den {
        Some(d) => d
            .parse()
            .map_err(|_| Error::invalid(format!("bad denominator `{d}` in rational `{s}`")))?,
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(Error::invalid(format!("zero denominator in `{s}`")));
    }
    Ok(Rational::new(num, den))
}

/// Canonical ASCII form: `-1/3`, `5`, `0`.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Total order by absolute value, used for deterministic pivot selection.
pub fn abs_cmp(a: &Rational, b: &Rational) -> std::cmp::Ordering {
    a.abs().cmp(&b.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["0", "5", "-7", "1/3", "-8/27", "3/2"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(format_rational(&r), s);
        }
    }

    #[test]
    fn parse_normalizes() {
        assert_eq!(parse_rational("2/4").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("3/-6").unwrap(), ratio(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
