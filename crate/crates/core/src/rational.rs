//! Exact rational arithmetic helpers.
//!
//! Every grid value and every closed-form probability in this crate is a
//! rational number with big-integer numerator and denominator, so equality
//! tests are exact and never involve tolerances.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number.
pub type Rat = num_rational::BigRational;

/// Shorthand for a rational from machine integers.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Rational from a machine integer.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Rational from an unsigned machine integer.
pub fn rat_u(n: u64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Lossy conversion to double precision (for export and sampling paths).
pub fn to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Canonical `p/q` encoding with an explicit denominator, e.g. `0/1`, `-3/4`.
///
/// This is the wire format used by the JSON schemas; it is stable under
/// `parse_rational` round-trips.
pub fn format_rational(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `p/q`, a bare integer `p`, or a decimal with at most 12 fractional
/// digits. Longer decimals are rejected rather than silently rounded, so a
/// float approximation can never leak into an exact computation.
pub fn parse_rational(s: &str) -> Result<Rat> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::BadRational {
            input: s.to_string(),
            reason: "empty string".into(),
        });
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|e| Error::BadRational {
            input: s.to_string(),
            reason: format!("bad numerator: {e}"),
        })?;
        let d: BigInt = den.trim().parse().map_err(|e| Error::BadRational {
            input: s.to_string(),
            reason: format!("bad denominator: {e}"),
        })?;
        if d.is_zero() {
            return Err(Error::BadRational {
                input: s.to_string(),
                reason: "zero denominator".into(),
            });
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        const MAX_FRAC_DIGITS: usize = 12;
        if frac_part.len() > MAX_FRAC_DIGITS {
            return Err(Error::BadRational {
                input: s.to_string(),
                reason: format!(
                    "{} fractional digits exceed the exact-conversion limit of {MAX_FRAC_DIGITS}",
                    frac_part.len()
                ),
            });
        }
        if !frac_part.chars().all(|c| c.is_ascii_digit()) {
            return Err(Error::BadRational {
                input: s.to_string(),
                reason: "bad fractional part".into(),
            });
        }
        let negative = int_part.trim_start().starts_with('-');
        let int: BigInt = if int_part.is_empty() || int_part == "-" || int_part == "+" {
            BigInt::zero()
        } else {
            int_part.parse().map_err(|e| Error::BadRational {
                input: s.to_string(),
                reason: format!("bad integer part: {e}"),
            })?
        };
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let frac: BigInt = if frac_part.is_empty() {
            BigInt::zero()
        } else {
            frac_part.parse().map_err(|e| Error::BadRational {
                input: s.to_string(),
                reason: format!("bad fractional part: {e}"),
            })?
        };
        let magnitude = int.abs() * &scale + frac;
        let signed = if negative { -magnitude } else { magnitude };
        return Ok(Rat::new(signed, scale));
    }
    let n: BigInt = s.parse().map_err(|e| Error::BadRational {
        input: s.to_string(),
        reason: format!("not an integer or p/q: {e}"),
    })?;
    Ok(Rat::from_integer(n))
}

/// Exact rational equal to the given double. Every finite `f64` is a dyadic
/// rational, so this conversion is lossless.
pub fn from_f64_exact(x: f64) -> Result<Rat> {
    if !x.is_finite() {
        return Err(Error::BadRational {
            input: x.to_string(),
            reason: "not finite".into(),
        });
    }
    // Decompose into mantissa * 2^exp.
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
    let exponent = ((bits >> 52) & 0x7ff) as i64;
    let fraction = bits & 0xf_ffff_ffff_ffff;
    let (mantissa, exp) = if exponent == 0 {
        (fraction, -1074i64)
    } else {
        (fraction | (1 << 52), exponent - 1075)
    };
    let m = BigInt::from(sign) * BigInt::from(mantissa);
    let r = if exp >= 0 {
        Rat::from_integer(m * (BigInt::one() << exp as usize))
    } else {
        Rat::new(m, BigInt::one() << (-exp) as usize)
    };
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_fraction_and_integer() {
        assert_eq!(parse_rational("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rational(" -6/8 ").unwrap(), rat(-3, 4));
        assert_eq!(parse_rational("5").unwrap(), rat_int(5));
    }

    #[test]
    fn parse_decimal_exact() {
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("-0.125").unwrap(), rat(-1, 8));
        assert_eq!(
            parse_rational("1.000000000001").unwrap(),
            rat(1_000_000_000_001, 1_000_000_000_000)
        );
    }

    #[test]
    fn parse_decimal_too_long_rejected() {
        assert!(parse_rational("0.1234567890123").is_err());
    }

    #[test]
    fn parse_zero_denominator_rejected() {
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn format_round_trip() {
        for r in [rat(0, 1), rat(1, 3), rat(-7, 2), rat_int(4)] {
            assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
        }
    }

    #[test]
    fn f64_conversion_is_exact() {
        for x in [0.0, 0.5, 0.1, -3.25, 1.0 / 3.0] {
            let r = from_f64_exact(x).unwrap();
            assert_eq!(to_f64(&r), x);
        }
        assert_eq!(from_f64_exact(0.5).unwrap(), rat(1, 2));
    }
}
