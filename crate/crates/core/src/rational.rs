//! Exact rational arithmetic helpers.
//!
//! Every token amount and per-token value in the crate is a [`Rational`].
//! Threshold comparisons such as `gamma == 1 + epsilon` must be decided
//! exactly, so floating point only ever appears at the rendering boundary.

use std::fmt;

use num::bigint::{BigInt, Sign};
use num::{BigRational, Integer, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// Builds `num / den` from machine integers.
///
/// Panics if `den` is zero.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRationalError {
    input: String,
}

impl fmt::Display for ParseRationalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{}` is not a decimal or fraction", self.input)
    }
}

impl std::error::Error for ParseRationalError {}

/// Parses `"3/4"`, `"-0.125"`, `"12"` or `"1.5e-3"` into an exact rational.
pub fn parse_rational(input: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError {
        input: input.to_string(),
    };
    let s = input.trim();
    if s.is_empty() {
        return Err(err());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_decimal(num.trim()).ok_or_else(err)?;
        let den = parse_decimal(den.trim()).ok_or_else(err)?;
        if den.is_zero() {
            return Err(err());
        }
        return Ok(num / den);
    }
    parse_decimal(s).ok_or_else(err)
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let joined = format!("{whole}{frac}");
    let mut value = Rational::from_integer(joined.parse::<BigInt>().ok()?);
    let scale = exponent - frac.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num::pow(ten, scale as usize);
    } else {
        value /= num::pow(ten, scale.unsigned_abs() as usize);
    }
    Some(if negative { -value } else { value })
}

/// Renders `value` as a decimal string with exactly `precision` fractional
/// digits, rounding half away from zero.
pub fn to_decimal(value: &Rational, precision: u32) -> String {
    let scale = num::pow(BigInt::from(10), precision as usize);
    let scaled = value.abs() * Rational::from_integer(scale.clone());
    let (q, r) = scaled.numer().div_rem(scaled.denom());
    let twice = r * 2u32;
    let rounded = if &twice >= scaled.denom() { q + 1u32 } else { q };
    let (whole, frac) = rounded.div_rem(&scale);
    let sign = if value.is_negative() && !rounded_is_zero(&whole, &frac) {
        "-"
    } else {
        ""
    };
    if precision == 0 {
        return format!("{sign}{whole}");
    }
    let frac = frac.to_string();
    let pad = precision as usize - frac.len();
    format!("{sign}{whole}.{}{frac}", "0".repeat(pad))
}

fn rounded_is_zero(whole: &BigInt, frac: &BigInt) -> bool {
    whole.sign() == Sign::NoSign && frac.sign() == Sign::NoSign
}

/// Lossy conversion for plotting and diagnostics only.
pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}
