//! Non-negative binary floating point numbers with a caller-chosen mantissa
//! width, rounded to nearest (ties to even) after every operation.
//!
//! A value is `mantissa * 2^exponent` with an odd mantissa (or zero), so the
//! representation of a number is unique.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BigFloat {
    mantissa: BigUint,
    exponent: i64,
}

impl BigFloat {
    pub fn zero() -> BigFloat {
        BigFloat {
            mantissa: BigUint::zero(),
            exponent: 0,
        }
    }

    pub fn one() -> BigFloat {
        BigFloat {
            mantissa: BigUint::one(),
            exponent: 0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn mantissa(&self) -> &BigUint {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    /// Nearest representable value to `value` (which must be non-negative).
    pub fn from_rational(value: &BigRational, precision: u32) -> BigFloat {
        assert!(!value.is_negative(), "BigFloat holds non-negative values only");
        if value.is_zero() {
            return BigFloat::zero();
        }
        let num = value.numer().magnitude();
        let den = value.denom().magnitude();
        // Aim for at least precision + 2 quotient bits so the remainder only
        // acts as a sticky bit.
        let shift = precision as i64 + 2 + den.bits() as i64 - num.bits() as i64;
        let (q, r) = if shift >= 0 {
            (num << shift as usize).div_rem(den)
        } else {
            num.div_rem(&(den << (-shift) as usize))
        };
        round(q, -shift, precision, !r.is_zero())
    }

    pub fn from_u64(value: u64, precision: u32) -> BigFloat {
        round(BigUint::from(value), 0, precision, false)
    }

    /// Exact rational value.
    pub fn to_rational(&self) -> BigRational {
        let m = BigInt::from(self.mantissa.clone());
        if self.exponent >= 0 {
            BigRational::from_integer(m << self.exponent as usize)
        } else {
            BigRational::new(m, BigInt::one() << (-self.exponent) as usize)
        }
    }

    fn top(&self) -> i64 {
        self.exponent + self.mantissa.bits() as i64
    }

    pub fn add(&self, other: &BigFloat, precision: u32) -> BigFloat {
        if self.is_zero() {
            return round(other.mantissa.clone(), other.exponent, precision, false);
        }
        if other.is_zero() {
            return round(self.mantissa.clone(), self.exponent, precision, false);
        }
        let (big, small) = if self.top() >= other.top() {
            (self, other)
        } else {
            (other, self)
        };
        if big.top() - small.top() > precision as i64 + 2 && big.mantissa.bits() <= precision as u64 {
            // `small` is below half an ulp of `big`.
            return big.clone();
        }
        let base = big.exponent.min(small.exponent);
        let sum = (&big.mantissa << (big.exponent - base) as usize)
            + (&small.mantissa << (small.exponent - base) as usize);
        round(sum, base, precision, false)
    }

    pub fn mul(&self, other: &BigFloat, precision: u32) -> BigFloat {
        if self.is_zero() || other.is_zero() {
            return BigFloat::zero();
        }
        round(
            &self.mantissa * &other.mantissa,
            self.exponent + other.exponent,
            precision,
            false,
        )
    }

    /// Approximate `log10`; `-inf` for zero.
    pub fn log10(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let bits = self.mantissa.bits();
        let drop = bits.saturating_sub(64);
        let top = (&self.mantissa >> drop).to_f64().unwrap_or(f64::MAX);
        top.log10() + (self.exponent + drop as i64) as f64 * std::f64::consts::LOG10_2
    }

    /// Decimal rendering with `digits` significant digits (trailing zeros
    /// trimmed). Plain positional notation for moderate magnitudes,
    /// `d.ddde±k` otherwise.
    pub fn to_decimal(&self, digits: usize) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let digits = digits.max(1);
        let exact = self.to_rational();
        let mut k = self.log10().floor() as i64;
        let mut scaled = scale_round(&exact, digits as i64 - 1 - k);
        let limit = Pow::pow(&BigUint::from(10u32), digits as u64);
        if scaled >= limit {
            k += 1;
            scaled = scale_round(&exact, digits as i64 - 1 - k);
        } else if scaled < &limit / 10u32 {
            k -= 1;
            scaled = scale_round(&exact, digits as i64 - 1 - k);
        }
        if scaled >= limit {
            // rounding carried into a new digit, e.g. 9.99.. -> 10.0..
            k += 1;
            scaled /= 10u32;
        }
        let text = scaled.to_string();
        let significant = text.trim_end_matches('0');
        let significant = if significant.is_empty() { "0" } else { significant };
        if (-20..40).contains(&k) {
            positional(significant, k)
        } else {
            let (head, tail) = significant.split_at(1);
            if tail.is_empty() {
                format!("{head}e{k}")
            } else {
                format!("{head}.{tail}e{k}")
            }
        }
    }

    /// Approximate heap footprint in bytes.
    pub fn byte_size(&self) -> usize {
        std::mem::size_of::<BigFloat>() + (self.mantissa.bits() as usize).div_ceil(8)
    }
}

/// Number of significant decimal digits worth printing for a mantissa width.
pub fn decimal_digits_for(precision: u32) -> usize {
    ((precision as f64 * std::f64::consts::LOG10_2).floor() as usize).saturating_sub(2).max(1)
}

fn positional(significant: &str, k: i64) -> String {
    if k < 0 {
        format!("0.{}{}", "0".repeat((-k - 1) as usize), significant)
    } else {
        let int_len = k as usize + 1;
        if significant.len() <= int_len {
            format!("{}{}", significant, "0".repeat(int_len - significant.len()))
        } else {
            format!("{}.{}", &significant[..int_len], &significant[int_len..])
        }
    }
}

/// `round(value * 10^power)` to the nearest integer, ties to even.
fn scale_round(value: &BigRational, power: i64) -> BigUint {
    let ten = BigInt::from(10u32);
    let scaled = if power >= 0 {
        value * BigRational::from_integer(Pow::pow(&ten, power as u64))
    } else {
        value / BigRational::from_integer(Pow::pow(&ten, (-power) as u64))
    };
    let (q, r) = scaled.numer().div_rem(scaled.denom());
    let twice = r * 2u32;
    let q = match twice.cmp(scaled.denom()) {
        Ordering::Greater => q + 1u32,
        Ordering::Equal if q.is_odd() => q + 1u32,
        _ => q,
    };
    q.to_biguint().expect("non-negative")
}

fn round(mantissa: BigUint, exponent: i64, precision: u32, sticky: bool) -> BigFloat {
    if mantissa.is_zero() {
        return BigFloat::zero();
    }
    let bits = mantissa.bits();
    let (mut kept, mut exponent) = if bits > precision as u64 {
        let shift = bits - precision as u64;
        let kept = &mantissa >> shift;
        let rest = &mantissa - (&kept << shift);
        let half = BigUint::one() << (shift - 1);
        let up = match rest.cmp(&half) {
            Ordering::Greater => true,
            Ordering::Equal => sticky || kept.is_odd(),
            Ordering::Less => false,
        };
        let kept = if up { kept + 1u32 } else { kept };
        (kept, exponent + shift as i64)
    } else {
        (mantissa, exponent)
    };
    let tz = kept.trailing_zeros().unwrap_or(0);
    if tz > 0 {
        kept >>= tz;
        exponent += tz as i64;
    }
    BigFloat {
        mantissa: kept,
        exponent,
    }
}

impl fmt::Debug for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(20))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_rational;

    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    fn rel_err(a: &BigRational, b: &BigRational) -> f64 {
        ((a - b).abs() / b).to_f64().unwrap()
    }

    #[test]
    fn exact_small_values() {
        let a = BigFloat::from_rational(&q("0.5"), 53);
        assert_eq!(a.mantissa(), &BigUint::one());
        assert_eq!(a.exponent(), -1);
        assert_eq!(a.to_rational(), q("0.5"));
        let three = BigFloat::from_u64(3, 53);
        assert_eq!(three.add(&BigFloat::one(), 53).to_rational(), q("4"));
        assert_eq!(three.mul(&three, 53).to_rational(), q("9"));
    }

    #[test]
    fn rounding_error_is_bounded() {
        for s in ["0.3", "0.7", "1/3", "2/7", "12345.6789"] {
            let r = q(s);
            for prec in [24u32, 53, 256] {
                let f = BigFloat::from_rational(&r, prec);
                assert!(f.mantissa().bits() <= prec as u64);
                let err = rel_err(&f.to_rational(), &r);
                assert!(err <= 2f64.powi(-(prec as i32)), "{s} @ {prec}: {err}");
            }
        }
    }

    #[test]
    fn ties_round_to_even() {
        // 0b1011 at 3 bits: halfway between 0b101 and 0b110 -> even 0b110
        let f = round(BigUint::from(0b1011u32), 0, 3, false);
        assert_eq!(f.to_rational(), q("12"));
        // 0b1001 at 3 bits: halfway between 0b100 and 0b101 -> even 0b100
        let f = round(BigUint::from(0b1001u32), 0, 3, false);
        assert_eq!(f.to_rational(), q("8"));
        let f = round(BigUint::from(0b1001u32), 0, 3, true);
        assert_eq!(f.to_rational(), q("10"));
    }

    #[test]
    fn far_apart_addition_keeps_larger() {
        let big = BigFloat::from_u64(1, 64);
        let tiny = BigFloat::from_rational(&BigRational::new(1.into(), BigInt::one() << 500usize), 64);
        assert_eq!(big.add(&tiny, 64), big);
        let exact = big.add(&tiny, 1024);
        assert_eq!(exact.to_rational(), big.to_rational() + tiny.to_rational());
    }

    #[test]
    fn decimal_rendering() {
        let p = 256;
        let d = decimal_digits_for(p);
        assert_eq!(BigFloat::from_rational(&q("0.3"), p).to_decimal(d), "0.3");
        assert_eq!(BigFloat::from_rational(&q("0.6"), p).to_decimal(d), "0.6");
        assert_eq!(BigFloat::from_rational(&q("1234.5"), p).to_decimal(d), "1234.5");
        assert_eq!(BigFloat::from_rational(&q("0.00125"), p).to_decimal(d), "0.00125");
        assert_eq!(BigFloat::from_rational(&q("1e50"), p).to_decimal(d), "1e50");
        assert_eq!(BigFloat::from_rational(&q("2.5e-30"), p).to_decimal(d), "2.5e-30");
        assert_eq!(BigFloat::from_rational(&q("1/3"), 64).to_decimal(5), "0.33333");
        assert_eq!(BigFloat::from_rational(&q("0.99999"), 64).to_decimal(3), "1");
        assert_eq!(BigFloat::zero().to_decimal(5), "0");
    }

    #[test]
    fn log10_matches_f64() {
        let f = BigFloat::from_rational(&q("0.3"), 256);
        assert!((f.log10() - 0.3f64.log10()).abs() < 1e-12);
        assert_eq!(BigFloat::zero().log10(), f64::NEG_INFINITY);
    }
}
