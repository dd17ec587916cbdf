//! Exact rational values and their decimal text form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exact value carrier. Always stored in lowest terms with a positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid number {text:?}: {reason}")]
pub struct NumberError {
    pub text: String,
    pub reason: &'static str,
}

fn bad(text: &str, reason: &'static str) -> NumberError {
    NumberError { text: text.to_string(), reason }
}

/// Parses `"74"`, `"-3"`, `"2.50"`, `"1,000"` or `"7/2"` into an exact rational.
pub fn parse_decimal(text: &str) -> Result<Rational, NumberError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(bad(text, "empty"));
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad(text, "bad numerator"))?;
        let den: BigInt = den.trim().parse().map_err(|_| bad(text, "bad denominator"))?;
        if den.is_zero() {
            return Err(bad(text, "zero denominator"));
        }
        return Ok(BigRational::new(num, den));
    }

    let (negative, body) = match s.as_bytes()[0] {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let body: String = body.chars().filter(|&c| c != ',').collect();
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body.as_str(), ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad(text, "no digits"));
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad(text, "non-digit character"));
    }
    let digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt =
        if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| bad(text, "bad digits"))? };
    if negative {
        numer = -numer;
    }
    let denom = num_traits::pow(BigInt::from(10u32), frac_part.len());
    Ok(BigRational::new(numer, denom))
}

/// True when the token text reads as a number (`parse_decimal` succeeds).
pub fn is_numeric(text: &str) -> bool {
    let t = text.trim();
    !t.is_empty() && t.bytes().any(|b| b.is_ascii_digit()) && parse_decimal(t).is_ok()
}

/// Renders a rational as a terminating decimal when possible, `p/q` otherwise.
///
/// `parse_decimal(&to_decimal_string(x)) == x` for every `x`.
pub fn to_decimal_string(value: &Rational) -> String {
    let den = value.denom().clone();
    if den.is_one() {
        return value.numer().to_string();
    }
    // Terminating iff the denominator has no prime factors besides 2 and 5.
    let two = BigInt::from(2u32);
    let five = BigInt::from(5u32);
    let mut rest = den.clone();
    let (mut twos, mut fives) = (0usize, 0usize);
    while rest.is_multiple_of(&two) {
        rest /= &two;
        twos += 1;
    }
    while rest.is_multiple_of(&five) {
        rest /= &five;
        fives += 1;
    }
    if !rest.is_one() {
        return format!("{}/{}", value.numer(), den);
    }
    let places = twos.max(fives);
    let scale = num_traits::pow(BigInt::from(10u32), places);
    let scaled = value.numer().abs() * (&scale / &den);
    let digits = scaled.to_string();
    let digits = format!("{digits:0>width$}", width = places + 1);
    let (int_part, frac_part) = digits.split_at(digits.len() - places);
    let sign = if value.is_negative() { "-" } else { "" };
    format!("{sign}{int_part}.{frac_part}")
}

/// Lossy conversion used only for reporting.
pub fn to_f64(value: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    value.to_f64().unwrap_or(f64::NAN)
}

pub fn from_int(v: i64) -> Rational {
    BigRational::from_integer(BigInt::from(v))
}
