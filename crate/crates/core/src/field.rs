//! Scalar traits shared by every generic layer of the kernel.
//!
//! [`Field`] is the minimal exact field interface used by [`crate::poly::Polynomial`].
//! [`ConstField`] adds what the difference-algebra layers need from a field of
//! constants: an embedding of the real algebraic numbers, complex conjugation,
//! magnitude bounds, and root extraction.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::numbers::{GaussianAlgebraic, RealAlgebraic};

/// An exact field of characteristic zero.
pub trait Field:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + 'static
{
    fn from_rational(q: &BigRational) -> Self;

    fn from_i64(v: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(v)))
    }

    /// Multiplicative inverse, `None` for zero.
    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Self::one() / self.clone())
        }
    }

    fn pow_i64(&self, e: i64) -> Self {
        if e < 0 {
            return self
                .inv()
                .expect("negative power of zero")
                .pow_i64(-e);
        }
        let mut base = self.clone();
        let mut acc = Self::one();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
}

impl Field for BigRational {
    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }
}

/// A subfield of the algebraic numbers containing ℝ_alg, usable as the
/// constants of the base difference field.
pub trait ConstField: Field + serde::Serialize {
    fn from_real(r: &RealAlgebraic) -> Self;

    /// The value as a real algebraic number, when it is real.
    fn to_real(&self) -> Option<RealAlgebraic>;

    fn to_gaussian(&self) -> GaussianAlgebraic;

    /// Complex conjugation (identity on real fields).
    fn conj(&self) -> Self;

    /// Rational bounds `lo <= |self| <= hi` whose gap shrinks to zero as
    /// `k` grows.
    fn modulus_enclosure(&self, k: u32) -> (BigRational, BigRational);

    /// Rational bounds `lo <= |self| <= hi`, with `lo > 0` unless `self == 0`.
    fn modulus_bounds(&self) -> (BigRational, BigRational) {
        if self.is_zero() {
            return (BigRational::zero(), BigRational::zero());
        }
        let mut k = 2;
        loop {
            let (lo, hi) = self.modulus_enclosure(k);
            if lo.is_positive() {
                return (lo, hi);
            }
            k += 2;
        }
    }

    /// Exact comparison of `|self|` and `|other|`.
    fn abs_cmp(&self, other: &Self) -> std::cmp::Ordering;

    /// An `n`-th root in this field, if one exists. For real fields this is
    /// the real root (non-negative for even `n`).
    fn nth_root(&self, n: u32) -> Option<Self>;

    /// A square root of `-1` in the field, when there is one.
    fn sqrt_minus_one() -> Option<Self>;

    /// The element of this field equal to `z`, if there is one.
    fn from_gaussian(z: &GaussianAlgebraic) -> Option<Self> {
        if z.is_real() {
            return Some(Self::from_real(&z.re));
        }
        let i = Self::sqrt_minus_one()?;
        Some(Self::from_real(&z.re) + i * Self::from_real(&z.im))
    }

    fn to_rational(&self) -> Option<BigRational> {
        self.to_real().and_then(|r| r.to_rational())
    }

    /// Short tag used in reports (`"R_alg"` / `"R_alg[i]"`).
    fn field_name() -> &'static str;
}

pub(crate) fn rational_abs_bounds(q: &BigRational) -> (BigRational, BigRational) {
    let a = q.abs();
    (a.clone(), a)
}

impl ConstField for RealAlgebraic {
    fn from_real(r: &RealAlgebraic) -> Self {
        r.clone()
    }

    fn to_real(&self) -> Option<RealAlgebraic> {
        Some(self.clone())
    }

    fn to_gaussian(&self) -> GaussianAlgebraic {
        GaussianAlgebraic::real(self.clone())
    }

    fn conj(&self) -> Self {
        self.clone()
    }

    fn modulus_enclosure(&self, k: u32) -> (BigRational, BigRational) {
        if let Some(q) = self.to_rational() {
            return rational_abs_bounds(&q);
        }
        let (lo, hi) = self.enclosure(k);
        if lo.is_positive() {
            (lo, hi)
        } else if hi.is_negative() {
            (-hi, -lo)
        } else {
            (BigRational::zero(), lo.abs().max(hi.abs()))
        }
    }

    fn abs_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.abs().cmp(&other.abs())
    }

    fn nth_root(&self, n: u32) -> Option<Self> {
        crate::numbers::nth_root_real(self, n)
    }

    fn sqrt_minus_one() -> Option<Self> {
        None
    }

    fn field_name() -> &'static str {
        "R_alg"
    }
}

impl ConstField for GaussianAlgebraic {
    fn from_real(r: &RealAlgebraic) -> Self {
        GaussianAlgebraic::real(r.clone())
    }

    fn to_real(&self) -> Option<RealAlgebraic> {
        self.is_real().then(|| self.re.clone())
    }

    fn to_gaussian(&self) -> GaussianAlgebraic {
        self.clone()
    }

    fn conj(&self) -> Self {
        GaussianAlgebraic::conj(self)
    }

    fn modulus_enclosure(&self, k: u32) -> (BigRational, BigRational) {
        if self.is_real() {
            return self.re.modulus_enclosure(k);
        }
        let (lo2, hi2) = self.norm_sq().modulus_enclosure(k);
        let (lo, _) = crate::numbers::rational_root_bounds(&lo2, 2, k);
        let (_, hi) = crate::numbers::rational_root_bounds(&hi2, 2, k);
        (lo, hi)
    }

    fn abs_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.norm_sq().cmp(&other.norm_sq())
    }

    fn nth_root(&self, n: u32) -> Option<Self> {
        self.principal_root(n)
    }

    fn sqrt_minus_one() -> Option<Self> {
        Some(GaussianAlgebraic::i())
    }

    fn field_name() -> &'static str {
        "R_alg[i]"
    }
}
