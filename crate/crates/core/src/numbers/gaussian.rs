use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use super::real::{nth_root, RealAlgebraic};
use super::NumberError;
use crate::field::Field;

/// `re + i*im` with real algebraic parts.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussianAlgebraic {
    pub re: RealAlgebraic,
    pub im: RealAlgebraic,
}

impl GaussianAlgebraic {
    pub fn new(re: RealAlgebraic, im: RealAlgebraic) -> Self {
        GaussianAlgebraic { re, im }
    }

    pub fn real(re: RealAlgebraic) -> Self {
        Self::new(re, RealAlgebraic::zero())
    }

    pub fn i() -> Self {
        Self::new(RealAlgebraic::zero(), RealAlgebraic::one())
    }

    pub fn from_integer(n: i64) -> Self {
        Self::real(RealAlgebraic::from_integer(n))
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -&self.im)
    }

    /// `re^2 + im^2`.
    pub fn norm_sq(&self) -> RealAlgebraic {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    pub fn try_inv(&self) -> Result<Self, NumberError> {
        if self.is_zero() {
            return Err(NumberError::DivisionByZero);
        }
        if self.is_real() {
            return Ok(Self::real(self.re.try_inv()?));
        }
        let n = self.norm_sq();
        Ok(Self::new(self.re.checked_div(&n)?, (-&self.im).checked_div(&n)?))
    }

    /// `exp(2 pi i k / m)`.
    pub fn root_of_unity(m: u32, k: i64) -> Self {
        assert!(m >= 1);
        let k = k.rem_euclid(m as i64) as u32;
        if k == 0 {
            return Self::one();
        }
        if 2 * k == m {
            return Self::from_integer(-1);
        }
        if 4 * k == m {
            return Self::i();
        }
        if 4 * k == 3 * m {
            return -Self::i();
        }
        // cos(2 pi j / m), j = 0..m/2, are the distinct roots of T_m - 1,
        // decreasing in j.
        let mut cheb = chebyshev(m);
        cheb[0] -= 1;
        let roots = RealAlgebraic::roots_of_z(&cheb);
        let j = k.min(m - k) as usize;
        let c = roots[roots.len() - 1 - j].clone();
        let one = RealAlgebraic::one();
        let s = nth_root(&(&one - &(&c * &c)), 2)
            .unwrap_or_else(|e| panic!("{e}"))
            .expect("|cos| <= 1");
        let s = if 2 * k < m { s } else { -s };
        Self::new(c, s)
    }

    /// A principal `n`-th root (smallest non-negative argument). Supported
    /// when `self` is real or purely imaginary; `None` otherwise.
    pub fn principal_root(&self, n: u32) -> Option<Self> {
        if self.is_zero() || n == 1 {
            return Some(self.clone());
        }
        let (modulus, turn_num, turn_den) = if self.is_real() {
            if self.re.signum() > 0 {
                (self.re.clone(), 0, 1)
            } else {
                (-&self.re, 1, 2)
            }
        } else if self.re.is_zero() {
            if self.im.signum() > 0 {
                (self.im.clone(), 1, 4)
            } else {
                (-&self.im, 3, 4)
            }
        } else {
            return None;
        };
        let r = nth_root(&modulus, n).ok()??;
        // arg = 2 pi * turn_num / turn_den; root arg = 2 pi * turn_num / (turn_den * n)
        let z = Self::root_of_unity(turn_den * n, turn_num as i64);
        Some(&z * &Self::real(r))
    }
}

fn chebyshev(m: u32) -> Vec<BigInt> {
    let mut t0 = vec![BigInt::one()];
    let mut t1 = vec![BigInt::zero(), BigInt::one()];
    if m == 0 {
        return t0;
    }
    for _ in 1..m {
        let mut t2 = vec![BigInt::zero(); t1.len() + 1];
        for (i, c) in t1.iter().enumerate() {
            t2[i + 1] += c * 2;
        }
        for (i, c) in t0.iter().enumerate() {
            t2[i] -= c;
        }
        t0 = t1;
        t1 = t2;
    }
    t1
}

impl fmt::Display for GaussianAlgebraic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let imag = |v: &RealAlgebraic| -> String {
            if v.is_one() {
                "i".to_string()
            } else {
                format!("{v}*i")
            }
        };
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        if self.re.is_zero() {
            if self.im == -RealAlgebraic::one() {
                return write!(f, "-i");
            }
            return write!(f, "{}", imag(&self.im));
        }
        if self.im.signum() < 0 {
            write!(f, "{} - {}", self.re, imag(&-&self.im))
        } else {
            write!(f, "{} + {}", self.re, imag(&self.im))
        }
    }
}

impl fmt::Debug for GaussianAlgebraic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for GaussianAlgebraic {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl Zero for GaussianAlgebraic {
    fn zero() -> Self {
        Self::real(RealAlgebraic::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianAlgebraic {
    fn one() -> Self {
        Self::real(RealAlgebraic::one())
    }
}

impl Neg for GaussianAlgebraic {
    type Output = Self;
    fn neg(self) -> Self {
        -&self
    }
}

impl Neg for &GaussianAlgebraic {
    type Output = GaussianAlgebraic;
    fn neg(self) -> GaussianAlgebraic {
        GaussianAlgebraic::new(-&self.re, -&self.im)
    }
}

impl Add<&GaussianAlgebraic> for &GaussianAlgebraic {
    type Output = GaussianAlgebraic;
    fn add(self, o: &GaussianAlgebraic) -> GaussianAlgebraic {
        GaussianAlgebraic::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl Sub<&GaussianAlgebraic> for &GaussianAlgebraic {
    type Output = GaussianAlgebraic;
    fn sub(self, o: &GaussianAlgebraic) -> GaussianAlgebraic {
        GaussianAlgebraic::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl Mul<&GaussianAlgebraic> for &GaussianAlgebraic {
    type Output = GaussianAlgebraic;
    fn mul(self, o: &GaussianAlgebraic) -> GaussianAlgebraic {
        if self.is_real() && o.is_real() {
            return GaussianAlgebraic::real(&self.re * &o.re);
        }
        let re = &(&self.re * &o.re) - &(&self.im * &o.im);
        let im = &(&self.re * &o.im) + &(&self.im * &o.re);
        GaussianAlgebraic::new(re, im)
    }
}

impl Div<&GaussianAlgebraic> for &GaussianAlgebraic {
    type Output = GaussianAlgebraic;
    fn div(self, o: &GaussianAlgebraic) -> GaussianAlgebraic {
        if self == o && !o.is_zero() {
            return GaussianAlgebraic::one();
        }
        self * &o.try_inv().unwrap_or_else(|e| panic!("{e}"))
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for GaussianAlgebraic {
            type Output = GaussianAlgebraic;
            fn $m(self, rhs: GaussianAlgebraic) -> GaussianAlgebraic {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&GaussianAlgebraic> for GaussianAlgebraic {
            type Output = GaussianAlgebraic;
            fn $m(self, rhs: &GaussianAlgebraic) -> GaussianAlgebraic {
                (&self).$m(rhs)
            }
        }
    )*};
}

owned_ops!(Add add, Sub sub, Mul mul, Div div);

impl Field for GaussianAlgebraic {
    fn from_rational(q: &BigRational) -> Self {
        Self::real(RealAlgebraic::from_rational(q.clone()))
    }

    fn inv(&self) -> Option<Self> {
        self.try_inv().ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_unity_have_the_right_order() {
        // order 11 needs degree-100 intermediates and is outside the default limit
        for m in (1..=12u32).filter(|&m| m != 11) {
            for k in 0..m as i64 {
                let z = GaussianAlgebraic::root_of_unity(m, k);
                assert_eq!(z.pow_i64(m as i64), GaussianAlgebraic::one(), "m={m} k={k}");
            }
        }
    }

    #[test]
    fn roots_behind_principal_roots() {
        // principal roots of negative or imaginary radicands of order <= 12
        for m in [14u32, 16, 18, 20, 24, 48] {
            let z = GaussianAlgebraic::root_of_unity(m, 1);
            assert_eq!(z.pow_i64(m as i64), GaussianAlgebraic::one(), "m={m}");
        }
    }

    #[test]
    fn primitive_cube_root() {
        let w = GaussianAlgebraic::root_of_unity(3, 1);
        assert_eq!(w.re, RealAlgebraic::from_ratio(-1, 2));
        assert_eq!(w.im.signum(), 1);
        let s = &w + &(&w * &w);
        assert_eq!(s, GaussianAlgebraic::from_integer(-1));
    }

    #[test]
    fn principal_roots() {
        let r = GaussianAlgebraic::from_integer(-4).principal_root(2).unwrap();
        assert_eq!(r, GaussianAlgebraic::new(RealAlgebraic::zero(), RealAlgebraic::from_integer(2)));
        let s = GaussianAlgebraic::i().principal_root(2).unwrap();
        assert_eq!(&s * &s, GaussianAlgebraic::i());
    }

    #[test]
    fn conjugate_product_is_real_nonnegative() {
        let z = GaussianAlgebraic::new(RealAlgebraic::from_integer(3), RealAlgebraic::from_integer(-4));
        let p = &z * &z.conj();
        assert!(p.is_real());
        assert_eq!(p.re, RealAlgebraic::from_integer(25));
        assert_eq!(z.to_string(), "3 - 4*i");
    }
}
