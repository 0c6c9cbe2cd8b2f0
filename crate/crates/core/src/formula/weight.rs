//! Exact decimal <-> rational conversion for literal weights.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};

const MAX_EXPONENT: i64 = 100_000;

/// Parses a non-negative weight: `12`, `0.25`, `.5`, `3e-4`, `1.5E+2` or
/// `num/den`. Returns `None` for anything else, including negatives.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let num: BigInt = parse_digits(num)?.into();
        let den: BigInt = parse_digits(den)?.into();
        if den.is_zero() {
            return None;
        }
        return Some(BigRational::new(num, den));
    }
    let text = text.strip_prefix('+').unwrap_or(text);
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => {
            let exp_text = &text[pos + 1..];
            let (neg, digits) = match exp_text.as_bytes().first() {
                Some(b'-') => (true, &exp_text[1..]),
                Some(b'+') => (false, &exp_text[1..]),
                _ => (false, exp_text),
            };
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.len() > 7 {
                return None;
            }
            let e: i64 = digits.parse().ok()?;
            (&text[..pos], if neg { -e } else { e })
        }
        None => (text, 0),
    };
    if exponent.abs() > MAX_EXPONENT {
        return None;
    }
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let all_digits = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
    if !all_digits(int_part) || !all_digits(frac_part) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let value: BigInt = digits.parse::<BigUint>().ok()?.into();
    let scale = exponent - frac_part.len() as i64;
    let ten = BigInt::from(10u32);
    Some(if scale >= 0 {
        BigRational::from_integer(value * Pow::pow(&ten, scale as u64))
    } else {
        BigRational::new(value, Pow::pow(&ten, (-scale) as u64))
    })
}

fn parse_digits(s: &str) -> Option<BigUint> {
    let s = s.trim();
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Formats a non-negative rational exactly: as a plain decimal when the
/// denominator divides a power of ten, otherwise as `num/den`.
pub fn format_rational(value: &BigRational) -> String {
    debug_assert!(!value.is_negative());
    let num = value.numer().abs();
    let den = value.denom().abs();
    if den.is_one() {
        return num.to_string();
    }
    let mut rest = den.clone();
    let (mut twos, mut fives) = (0u64, 0u64);
    let two = BigInt::from(2u32);
    let five = BigInt::from(5u32);
    while rest.is_even() {
        rest /= &two;
        twos += 1;
    }
    while (&rest % &five).is_zero() {
        rest /= &five;
        fives += 1;
    }
    if !rest.is_one() {
        return format!("{num}/{den}");
    }
    let k = twos.max(fives);
    let scaled = num * (Pow::pow(&BigInt::from(10u32), k) / &den);
    let mut digits = scaled.to_string();
    let k = k as usize;
    if digits.len() <= k {
        digits = format!("{}{}", "0".repeat(k + 1 - digits.len()), digits);
    }
    let (int_part, frac_part) = digits.split_at(digits.len() - k);
    let frac_part = frac_part.trim_end_matches('0');
    if frac_part.is_empty() {
        int_part.to_string()
    } else {
        format!("{int_part}.{frac_part}")
    }
}
