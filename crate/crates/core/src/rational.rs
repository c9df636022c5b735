//! Exact rational parsing for probability and weight inputs.
//!
//! File formats carry rationals as strings ("3/4", "2", "0.25") so that
//! probability mass can be checked for exact conservation. Floating-point
//! JSON numbers are deliberately not accepted: converting them back to
//! exact rationals is ambiguous.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("not a rational number: {0:?} (use \"p/q\", an integer, or a finite decimal)")]
pub struct RationalParseError(pub String);

/// Parses "p/q", integer, or finite-decimal notation into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational, RationalParseError> {
    let s = text.trim();
    let err = || RationalParseError(text.to_string());
    if s.is_empty() {
        return Err(err());
    }
    if let Some((p, q)) = s.split_once('/') {
        let num: BigInt = p.trim().parse().map_err(|_| err())?;
        let den: BigInt = q.trim().parse().map_err(|_| err())?;
        if den.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let whole_ok = !whole.is_empty()
            && whole
                .strip_prefix(['+', '-'])
                .unwrap_or(whole)
                .bytes()
                .all(|b| b.is_ascii_digit());
        // Allow ".5" as shorthand for "0.5".
        let whole_part: BigInt = if whole.is_empty() || whole == "-" || whole == "+" {
            BigInt::zero()
        } else if whole_ok {
            whole.parse().map_err(|_| err())?
        } else {
            return Err(err());
        };
        let frac_num: BigInt = frac.parse().map_err(|_| err())?;
        let scale = BigInt::from(10u8).pow(frac.len() as u32);
        let magnitude = BigRational::new(frac_num, scale);
        let whole_rat = BigRational::from_integer(whole_part);
        return Ok(if s.starts_with('-') {
            whole_rat - magnitude
        } else {
            whole_rat + magnitude
        });
    }
    let int: BigInt = s.parse().map_err(|_| err())?;
    Ok(BigRational::from_integer(int))
}

/// Nearest floating-point value, for the numeric factorization path.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
