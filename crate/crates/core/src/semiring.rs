//! The algebra the counter accumulates in.
//!
//! The search only ever adds the values of the two branches of a decision
//! and multiplies the values of independent components (and literal
//! weights), so any commutative semiring works. Two are provided: exact
//! big-integer counting and fixed-precision weighted counting.

use std::fmt::Debug;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::bigfloat::{decimal_digits_for, BigFloat};
use crate::formula::{CnfFormula, Lit};

pub trait Semiring {
    type Value: Clone + Debug;

    fn zero(&self) -> Self::Value;
    fn one(&self) -> Self::Value;
    fn add(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn is_zero(&self, a: &Self::Value) -> bool;

    fn mul_assign(&self, a: &mut Self::Value, b: &Self::Value) {
        *a = self.mul(a, b);
    }

    /// Value of a literal's weight in `formula`.
    fn literal_weight(&self, formula: &CnfFormula, lit: Lit) -> Self::Value;

    /// Whether every literal weight is the multiplicative identity, which
    /// lets the search skip weight products entirely.
    fn ignores_weights(&self) -> bool {
        false
    }

    /// Approximate heap footprint, used for cache accounting.
    fn byte_size(&self, value: &Self::Value) -> usize;
}

/// `#SAT`: non-negative integers, weights ignored.
#[derive(Clone, Copy, Debug, Default)]
pub struct Counting;

impl Semiring for Counting {
    type Value = BigUint;

    fn zero(&self) -> BigUint {
        BigUint::zero()
    }

    fn one(&self) -> BigUint {
        BigUint::one()
    }

    fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        a + b
    }

    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        a * b
    }

    fn mul_assign(&self, a: &mut BigUint, b: &BigUint) {
        if !b.is_one() {
            *a *= b;
        }
    }

    fn is_zero(&self, a: &BigUint) -> bool {
        a.is_zero()
    }

    fn literal_weight(&self, _formula: &CnfFormula, _lit: Lit) -> BigUint {
        BigUint::one()
    }

    fn ignores_weights(&self) -> bool {
        true
    }

    fn byte_size(&self, value: &BigUint) -> usize {
        std::mem::size_of::<BigUint>() + (value.bits() as usize).div_ceil(8)
    }
}

/// Weighted model counting over non-negative reals with a `precision`-bit
/// mantissa.
#[derive(Clone, Copy, Debug)]
pub struct Weighted {
    pub precision: u32,
}

impl Weighted {
    pub fn new(precision: u32) -> Weighted {
        assert!(precision >= 2, "precision must be at least 2 bits");
        Weighted { precision }
    }

    pub fn from_rational(&self, value: &BigRational) -> BigFloat {
        BigFloat::from_rational(value, self.precision)
    }

    pub fn decimal_digits(&self) -> usize {
        decimal_digits_for(self.precision)
    }
}

impl Default for Weighted {
    fn default() -> Self {
        Weighted::new(256)
    }
}

impl Semiring for Weighted {
    type Value = BigFloat;

    fn zero(&self) -> BigFloat {
        BigFloat::zero()
    }

    fn one(&self) -> BigFloat {
        BigFloat::one()
    }

    fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.precision)
    }

    fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.precision)
    }

    fn is_zero(&self, a: &BigFloat) -> bool {
        a.is_zero()
    }

    fn literal_weight(&self, formula: &CnfFormula, lit: Lit) -> BigFloat {
        self.from_rational(&formula.weight(lit))
    }

    fn byte_size(&self, value: &BigFloat) -> usize {
        value.byte_size()
    }
}

/// A finished count in whichever semiring produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CountValue {
    Exact(BigUint),
    Weighted(BigFloat),
}

impl CountValue {
    pub fn is_zero(&self) -> bool {
        match self {
            CountValue::Exact(v) => v.is_zero(),
            CountValue::Weighted(v) => v.is_zero(),
        }
    }

    pub fn log10(&self) -> f64 {
        match self {
            CountValue::Exact(v) => biguint_log10(v),
            CountValue::Weighted(v) => v.log10(),
        }
    }

    pub fn as_exact(&self) -> Option<&BigUint> {
        match self {
            CountValue::Exact(v) => Some(v),
            CountValue::Weighted(_) => None,
        }
    }

    pub fn as_weighted(&self) -> Option<&BigFloat> {
        match self {
            CountValue::Exact(_) => None,
            CountValue::Weighted(v) => Some(v),
        }
    }

    pub fn to_rational(&self) -> BigRational {
        match self {
            CountValue::Exact(v) => BigRational::from_integer(v.clone().into()),
            CountValue::Weighted(v) => v.to_rational(),
        }
    }
}

pub fn biguint_log10(v: &BigUint) -> f64 {
    if v.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = v.bits();
    let drop = bits.saturating_sub(64);
    let top = (v >> drop).to_f64().unwrap_or(f64::MAX);
    top.log10() + drop as f64 * std::f64::consts::LOG10_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_value(rng: &mut ChaCha8Rng, s: &Weighted) -> BigFloat {
        let num: u64 = rng.gen_range(0..1_000_000);
        let den: u64 = rng.gen_range(1..1_000_000);
        s.from_rational(&BigRational::new(num.into(), den.into()))
    }

    #[test]
    fn weighted_axioms_hold_numerically() {
        let s = Weighted::new(256);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let (a, b, c) = (random_value(&mut rng, &s), random_value(&mut rng, &s), random_value(&mut rng, &s));
            let close = |x: &BigFloat, y: &BigFloat| {
                let (x, y) = (x.to_rational(), y.to_rational());
                if y.is_zero() {
                    return x.is_zero();
                }
                ((x - &y) / &y).to_f64().unwrap().abs() < 1e-70
            };
            assert!(close(&s.add(&s.add(&a, &b), &c), &s.add(&a, &s.add(&b, &c))));
            assert!(close(&s.mul(&s.mul(&a, &b), &c), &s.mul(&a, &s.mul(&b, &c))));
            assert!(close(&s.mul(&a, &s.add(&b, &c)), &s.add(&s.mul(&a, &b), &s.mul(&a, &c))));
            assert!(s.is_zero(&s.mul(&a, &s.zero())));
            assert_eq!(s.mul(&a, &s.one()), a);
        }
    }

    #[test]
    fn counting_identities() {
        let s = Counting;
        let a = BigUint::from(12u32);
        assert_eq!(s.mul(&a, &s.one()), a);
        assert!(s.is_zero(&s.mul(&a, &s.zero())));
        assert_eq!(s.add(&a, &s.zero()), a);
    }

    #[test]
    fn log10_of_big_integers() {
        assert_eq!(biguint_log10(&BigUint::zero()), f64::NEG_INFINITY);
        assert!((biguint_log10(&BigUint::from(1000u32)) - 3.0).abs() < 1e-12);
        let big = num_traits::Pow::pow(BigUint::from(3u32), 5000u32);
        assert!((biguint_log10(&big) - 5000.0 * 3f64.log10()).abs() < 1e-9);
    }
}
