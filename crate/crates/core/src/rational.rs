//! Exact rational helpers shared by the projection, flow and brute-force code.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// The exact binary value of a finite float.
pub fn from_f64(x: f64) -> Rational {
    BigRational::from_float(x).expect("finite float")
}

pub fn from_int(x: i64) -> Rational {
    Rational::from_integer(BigInt::from(x))
}

/// Rounds `x` to the nearest multiple of `1/den` (ties away from zero).
pub fn snap(x: f64, den: u64) -> Rational {
    let scaled = from_f64(x) * Rational::from_integer(BigInt::from(den));
    Rational::new(scaled.round().to_integer(), BigInt::from(den))
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Parses `a/b`, a plain decimal (`0.25`, `3`) or a decimal with exponent
/// (`1.5e-3`) into an exact rational.
pub fn parse(text: &str) -> Option<Rational> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    if let Some((num, den)) = text.split_once('/') {
        let num: BigInt = num.trim().parse().ok()?;
        let den: BigInt = den.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(Rational::new(num, den));
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int_part}{frac_part}0").parse().ok()?;
    let digits = digits / BigInt::from(10);
    let shift = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = Rational::from_integer(digits);
    if shift >= 0 {
        value *= Rational::from_integer(num_traits::pow(ten, shift as usize));
    } else {
        value /= Rational::from_integer(num_traits::pow(ten, (-shift) as usize));
    }
    Some(if negative { -value } else { value })
}

pub fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

pub fn to_i128(x: &BigInt) -> Option<i128> {
    x.to_i128()
}

/// Converts an integral rational to `i128`, reporting `what` on overflow.
pub fn integral_i128(x: &Rational, what: &str) -> Result<i128> {
    debug_assert!(x.is_integer());
    to_i128(x.numer()).ok_or_else(|| {
        Error::CapacityOverflow(format!(
            "{what} does not fit in 128 bits; reduce the denominator precision of the rewards"
        ))
    })
}

pub fn is_nonnegative(x: &Rational) -> bool {
    !x.is_negative()
}
