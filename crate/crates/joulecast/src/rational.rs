//! Helpers for the exact rational arithmetic used throughout the crate.
//!
//! Every energy quantity is kept as a [`BigRational`] from construction to
//! report emission; floating point appears only at the output boundary. CLI
//! inputs are parsed as decimal strings so that `0.1` means exactly `1/10`.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecimalParseError {
    #[error("empty numeric literal")]
    Empty,
    #[error("invalid numeric literal: {0:?}")]
    Invalid(String),
}

/// Exact rational from an integer.
pub fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Exact rational `a / b`.
pub fn ratio(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

/// Exact rational from an unsigned integer.
pub fn uint(v: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Exact rational from a u128 (used for bit totals like `n * B`).
pub fn uint128(v: u128) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Parses a decimal literal (`80`, `0.07`, `-1.5`, `1e6` is *not* accepted)
/// into the exact rational it denotes.
pub fn parse_decimal(text: &str) -> Result<BigRational, DecimalParseError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(DecimalParseError::Empty);
    }
    let (sign, digits) = match s.strip_prefix('-') {
        Some(rest) => (-1i64, rest),
        None => (1i64, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(DecimalParseError::Invalid(text.to_string()));
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(DecimalParseError::Invalid(text.to_string()));
    }
    let mut num = if int_part.is_empty() {
        BigInt::zero()
    } else {
        int_part
            .parse::<BigInt>()
            .map_err(|_| DecimalParseError::Invalid(text.to_string()))?
    };
    let mut den = BigInt::from(1);
    for c in frac_part.chars() {
        num = num * 10 + (c as u8 - b'0');
        den *= 10;
    }
    Ok(BigRational::new(num * sign, den))
}

/// Exact rational equal to the binary value of a finite `f64`.
pub fn from_f64(v: f64) -> Option<BigRational> {
    BigRational::from_float(v)
}

/// Lossy conversion for report emission.
pub fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Floor of the square root of a nonnegative rational.
pub fn floor_sqrt(q: &BigRational) -> BigInt {
    assert!(!q.is_negative(), "floor_sqrt of negative rational");
    let (num, den) = (q.numer(), q.denom());
    // Initial guess from integer sqrt of the truncated quotient, then adjust.
    let mut m = (num / den).sqrt();
    while (&m + 1) * (&m + 1) * den <= *num {
        m += 1;
    }
    while &m * &m * den > *num {
        m -= 1;
    }
    m
}

use num::Signed;
