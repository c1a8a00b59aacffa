//! Arithmetic back-ends shared by the Smith form and the sparse solver.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt::Debug;

use crate::ring::inv_mod;

/// A Euclidean domain; fields have `div_rem` with zero remainder.
pub trait Domain: Clone + Send + Sync {
    type E: Clone + PartialEq + Debug + Send + Sync;
    fn zero(&self) -> Self::E;
    fn one(&self) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn neg(&self, a: &Self::E) -> Self::E;
    /// Pivot size; smaller is better. Zero only for zero.
    fn size(&self, a: &Self::E) -> u128;
    fn div_rem(&self, a: &Self::E, b: &Self::E) -> (Self::E, Self::E);
    fn unit_inverse(&self, a: &Self::E) -> Option<Self::E>;
    /// Unit `u` with `u·a` the canonical associate (positive integer, or 1).
    fn canonical_unit(&self, a: &Self::E) -> Self::E;
    fn from_frac(&self, num: i64, den: i64) -> Self::E;
    fn to_frac(&self, a: &Self::E) -> (BigInt, BigInt);
    fn is_field(&self) -> bool;
}

#[derive(Clone, Copy, Debug)]
pub struct ZZ;

fn ck(x: Option<i128>) -> i128 {
    x.expect("integer overflow in exact arithmetic")
}

impl Domain for ZZ {
    type E = i128;
    fn zero(&self) -> i128 {
        0
    }
    fn one(&self) -> i128 {
        1
    }
    fn is_zero(&self, a: &i128) -> bool {
        *a == 0
    }
    fn add(&self, a: &i128, b: &i128) -> i128 {
        ck(a.checked_add(*b))
    }
    fn sub(&self, a: &i128, b: &i128) -> i128 {
        ck(a.checked_sub(*b))
    }
    fn mul(&self, a: &i128, b: &i128) -> i128 {
        ck(a.checked_mul(*b))
    }
    fn neg(&self, a: &i128) -> i128 {
        -a
    }
    fn size(&self, a: &i128) -> u128 {
        a.unsigned_abs()
    }
    fn div_rem(&self, a: &i128, b: &i128) -> (i128, i128) {
        // nearest-integer quotient keeps entries small
        let q = a.div_euclid(*b);
        let r = a - q * b;
        if 2 * r.unsigned_abs() > b.unsigned_abs() {
            let q2 = if *b > 0 { q + 1 } else { q - 1 };
            (q2, a - q2 * b)
        } else {
            (q, r)
        }
    }
    fn unit_inverse(&self, a: &i128) -> Option<i128> {
        (a.abs() == 1).then_some(*a)
    }
    fn canonical_unit(&self, a: &i128) -> i128 {
        if *a < 0 {
            -1
        } else {
            1
        }
    }
    fn from_frac(&self, num: i64, den: i64) -> i128 {
        assert_eq!(den, 1, "fraction over Z");
        num as i128
    }
    fn to_frac(&self, a: &i128) -> (BigInt, BigInt) {
        (BigInt::from(*a), BigInt::one())
    }
    fn is_field(&self) -> bool {
        false
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Fp(pub i128);

impl Domain for Fp {
    type E = i128;
    fn zero(&self) -> i128 {
        0
    }
    fn one(&self) -> i128 {
        1
    }
    fn is_zero(&self, a: &i128) -> bool {
        *a == 0
    }
    fn add(&self, a: &i128, b: &i128) -> i128 {
        (a + b).rem_euclid(self.0)
    }
    fn sub(&self, a: &i128, b: &i128) -> i128 {
        (a - b).rem_euclid(self.0)
    }
    fn mul(&self, a: &i128, b: &i128) -> i128 {
        (a * b).rem_euclid(self.0)
    }
    fn neg(&self, a: &i128) -> i128 {
        (-a).rem_euclid(self.0)
    }
    fn size(&self, a: &i128) -> u128 {
        (*a != 0) as u128
    }
    fn div_rem(&self, a: &i128, b: &i128) -> (i128, i128) {
        (self.mul(a, &inv_mod(*b, self.0)), 0)
    }
    fn unit_inverse(&self, a: &i128) -> Option<i128> {
        (*a != 0).then(|| inv_mod(*a, self.0))
    }
    fn canonical_unit(&self, a: &i128) -> i128 {
        if *a == 0 {
            1
        } else {
            inv_mod(*a, self.0)
        }
    }
    fn from_frac(&self, num: i64, den: i64) -> i128 {
        self.mul(&(num as i128).rem_euclid(self.0), &inv_mod(den as i128, self.0))
    }
    fn to_frac(&self, a: &i128) -> (BigInt, BigInt) {
        (BigInt::from(*a), BigInt::one())
    }
    fn is_field(&self) -> bool {
        true
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QQ;

impl Domain for QQ {
    type E = BigRational;
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn size(&self, a: &BigRational) -> u128 {
        if a.is_zero() {
            0
        } else {
            // prefer simple pivots to limit coefficient growth
            let h = a.numer().abs().max(a.denom().clone());
            h.to_u128().unwrap_or(u128::MAX)
        }
    }
    fn div_rem(&self, a: &BigRational, b: &BigRational) -> (BigRational, BigRational) {
        (a / b, BigRational::zero())
    }
    fn unit_inverse(&self, a: &BigRational) -> Option<BigRational> {
        (!a.is_zero()).then(|| a.recip())
    }
    fn canonical_unit(&self, a: &BigRational) -> BigRational {
        if a.is_zero() {
            BigRational::one()
        } else {
            a.recip()
        }
    }
    fn from_frac(&self, num: i64, den: i64) -> BigRational {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn to_frac(&self, a: &BigRational) -> (BigInt, BigInt) {
        (a.numer().clone(), a.denom().clone())
    }
    fn is_field(&self) -> bool {
        true
    }
}

/// Dispatch a generic computation over the back-end matching `ring`.
#[macro_export]
macro_rules! with_domain {
    ($ring:expr, $d:ident => $body:expr) => {
        match $ring {
            $crate::ring::Ring::Integers => {
                let $d = $crate::linalg::domain::ZZ;
                $body
            }
            $crate::ring::Ring::Rationals => {
                let $d = $crate::linalg::domain::QQ;
                $body
            }
            $crate::ring::Ring::PrimeField(p) => {
                let $d = $crate::linalg::domain::Fp(p as i128);
                $body
            }
        }
    };
}

/// Common-denominator integer vector from domain elements.
pub fn to_int_vec<D: Domain>(d: &D, xs: &[D::E]) -> (Vec<i64>, i64) {
    let fr: Vec<(BigInt, BigInt)> = xs.iter().map(|x| d.to_frac(x)).collect();
    let mut den = BigInt::one();
    for (_, q) in &fr {
        den = den.lcm(q);
    }
    let nums = fr
        .iter()
        .map(|(a, q)| (a * (&den / q)).to_i64().expect("entry does not fit in i64"))
        .collect();
    (nums, den.to_i64().expect("denominator does not fit in i64"))
}
