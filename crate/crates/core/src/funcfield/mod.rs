//! The base difference field `(C(x), phi)` with `phi` a shift or a
//! q-dilation, plus the multiplicative ratio solver.

mod parse;
mod ratio;
mod relations;

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::field::{ConstField, Field};
use crate::numbers::{GaussianAlgebraic, RealAlgebraic};
use crate::poly::Polynomial;

pub use parse::{parse_constant, parse_ratfunc, ParseError};
pub use ratio::{ratio_solve, telescope, RatioSolution};
pub use relations::{multiplicative_relations, relation_lattice, ConstantRelations, RelationLattice};

/// A reduced quotient of polynomials with monic denominator.
#[derive(Clone, PartialEq)]
pub struct RationalFunction<F> {
    num: Polynomial<F>,
    den: Polynomial<F>,
}

impl<F: Field> RationalFunction<F> {
    /// `num / den` in reduced form; panics on a zero denominator.
    pub fn new(num: Polynomial<F>, den: Polynomial<F>) -> Self {
        Self::try_new(num, den).expect("zero denominator")
    }

    pub fn try_new(num: Polynomial<F>, den: Polynomial<F>) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        if num.is_zero() {
            return Some(Self::zero());
        }
        let (num, den) = if den.deg() == 0 {
            (num, den)
        } else {
            let g = num.gcd(&den);
            if g.deg() == 0 {
                (num, den)
            } else {
                (num.exact_div(&g).unwrap(), den.exact_div(&g).unwrap())
            }
        };
        let lc = den.leading();
        if lc.is_one() {
            return Some(RationalFunction { num, den });
        }
        let inv = lc.inv().unwrap();
        Some(RationalFunction {
            num: num.scale(&inv),
            den: den.scale(&inv),
        })
    }

    pub fn from_poly(p: Polynomial<F>) -> Self {
        RationalFunction {
            num: p,
            den: Polynomial::one(),
        }
    }

    pub fn constant(c: F) -> Self {
        Self::from_poly(Polynomial::constant(c))
    }

    pub fn from_i64(v: i64) -> Self {
        Self::constant(F::from_i64(v))
    }

    pub fn x() -> Self {
        Self::from_poly(Polynomial::x())
    }

    pub fn numer(&self) -> &Polynomial<F> {
        &self.num
    }

    pub fn denom(&self) -> &Polynomial<F> {
        &self.den
    }

    pub fn is_constant(&self) -> bool {
        self.num.deg() == 0 && self.den.deg() == 0
    }

    pub fn constant_value(&self) -> Option<F> {
        self.is_constant().then(|| self.num.coeff(0))
    }

    pub fn try_inv(&self) -> Option<Self> {
        if self.num.is_zero() {
            None
        } else {
            Some(Self::new(self.den.clone(), self.num.clone()))
        }
    }

    pub fn pow(&self, e: i64) -> Self {
        if e < 0 {
            return self.try_inv().expect("negative power of zero").pow(-e);
        }
        RationalFunction {
            num: self.num.pow(e as u32),
            den: self.den.pow(e as u32),
        }
    }

    /// Value at `x = c`; `None` at a pole.
    pub fn eval(&self, c: &F) -> Option<F> {
        let d = self.den.eval(c);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(c) / d)
        }
    }

    /// `f(a*x + b)`.
    pub fn compose_affine(&self, a: &F, b: &F) -> Self {
        Self::new(self.num.compose_affine(a, b), self.den.compose_affine(a, b))
    }

    /// Leading coefficient of the numerator (the denominator is monic).
    pub fn leading_coefficient(&self) -> F {
        if self.num.is_zero() {
            F::zero()
        } else {
            self.num.leading()
        }
    }

    /// Order of vanishing at `x = 0` (negative for a pole).
    pub fn valuation_at_zero(&self) -> i64 {
        fn ord<F: Field>(p: &Polynomial<F>) -> i64 {
            p.coeffs().iter().position(|c| !c.is_zero()).unwrap_or(0) as i64
        }
        ord(&self.num) - ord(&self.den)
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> RationalFunction<G> {
        RationalFunction::new(self.num.map(&f), self.den.map(&f))
    }

    fn fmt_text(&self) -> String {
        let n = self.num.to_string();
        if self.den.is_one() {
            return n;
        }
        let wrap = |p: &Polynomial<F>, s: String| {
            let single = p.coeffs().iter().filter(|c| !c.is_zero()).count() == 1;
            if single && !s.contains(['+', ' ', '/']) {
                s
            } else {
                format!("({s})")
            }
        };
        let ns = wrap(&self.num, n);
        let ds = wrap(&self.den, self.den.to_string());
        format!("{ns}/{ds}")
    }
}

impl<F: Field> fmt::Display for RationalFunction<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_text())
    }
}

impl<F: Field> fmt::Debug for RationalFunction<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_text())
    }
}

impl<F: Field> Serialize for RationalFunction<F> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.fmt_text())
    }
}

impl<F: Field> Zero for RationalFunction<F> {
    fn zero() -> Self {
        Self::from_poly(Polynomial::zero())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl<F: Field> One for RationalFunction<F> {
    fn one() -> Self {
        Self::from_poly(Polynomial::one())
    }
    fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }
}

impl<F: Field> Add<&RationalFunction<F>> for &RationalFunction<F> {
    type Output = RationalFunction<F>;
    fn add(self, o: &RationalFunction<F>) -> RationalFunction<F> {
        if self.num.is_zero() {
            return o.clone();
        }
        if o.num.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            return RationalFunction::new(&self.num + &o.num, self.den.clone());
        }
        RationalFunction::new(
            &(&self.num * &o.den) + &(&o.num * &self.den),
            &self.den * &o.den,
        )
    }
}

impl<F: Field> Sub<&RationalFunction<F>> for &RationalFunction<F> {
    type Output = RationalFunction<F>;
    fn sub(self, o: &RationalFunction<F>) -> RationalFunction<F> {
        self + &(-o)
    }
}

impl<F: Field> Neg for &RationalFunction<F> {
    type Output = RationalFunction<F>;
    fn neg(self) -> RationalFunction<F> {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl<F: Field> Neg for RationalFunction<F> {
    type Output = RationalFunction<F>;
    fn neg(self) -> RationalFunction<F> {
        -&self
    }
}

impl<F: Field> Mul<&RationalFunction<F>> for &RationalFunction<F> {
    type Output = RationalFunction<F>;
    fn mul(self, o: &RationalFunction<F>) -> RationalFunction<F> {
        if self.num.is_zero() || o.num.is_zero() {
            return RationalFunction::zero();
        }
        if self.den.is_one() && o.den.is_one() {
            return RationalFunction::from_poly(&self.num * &o.num);
        }
        RationalFunction::new(&self.num * &o.num, &self.den * &o.den)
    }
}

impl<F: Field> Div<&RationalFunction<F>> for &RationalFunction<F> {
    type Output = RationalFunction<F>;
    fn div(self, o: &RationalFunction<F>) -> RationalFunction<F> {
        self * &o.try_inv().expect("division by zero rational function")
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl<F: Field> $tr for RationalFunction<F> {
            type Output = RationalFunction<F>;
            fn $m(self, rhs: RationalFunction<F>) -> RationalFunction<F> {
                (&self).$m(&rhs)
            }
        }
        impl<F: Field> $tr<&RationalFunction<F>> for RationalFunction<F> {
            type Output = RationalFunction<F>;
            fn $m(self, rhs: &RationalFunction<F>) -> RationalFunction<F> {
                (&self).$m(rhs)
            }
        }
    )*};
}

owned_ops!(Add add, Sub sub, Mul mul, Div div);

impl<F: Field> Field for RationalFunction<F> {
    fn from_rational(q: &BigRational) -> Self {
        Self::constant(F::from_rational(q))
    }

    fn inv(&self) -> Option<Self> {
        self.try_inv()
    }

    fn pow_i64(&self, e: i64) -> Self {
        self.pow(e)
    }
}

/// `prod_j a_j^{m_j}`.
pub fn monomial_value<F: Field>(a: &[RationalFunction<F>], m: &[i64]) -> RationalFunction<F> {
    let mut num = RationalFunction::one();
    let mut den = RationalFunction::one();
    for (aj, &mj) in a.iter().zip(m) {
        if mj > 0 {
            num = &num * &aj.pow(mj);
        } else if mj < 0 {
            den = &den * &aj.pow(-mj);
        }
    }
    &num / &den
}

/// The distinguished automorphism of `C(x)` over `C`.
#[derive(Clone, PartialEq)]
pub enum Automorphism<F> {
    /// `x -> x + beta`, `beta != 0`.
    Shift(F),
    /// `x -> q x`, `q` not `0`, `1` or `-1`.
    Dilation(F),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AutomorphismError {
    #[error("shift step must be nonzero")]
    ZeroShift,
    #[error("dilation factor must not have modulus 0 or 1")]
    TrivialDilation,
}

impl<F: ConstField> Automorphism<F> {
    pub fn shift(beta: F) -> Result<Self, AutomorphismError> {
        if beta.is_zero() {
            Err(AutomorphismError::ZeroShift)
        } else {
            Ok(Automorphism::Shift(beta))
        }
    }

    pub fn dilation(q: F) -> Result<Self, AutomorphismError> {
        if q.is_zero() || q.abs_cmp(&F::one()) == std::cmp::Ordering::Equal {
            Err(AutomorphismError::TrivialDilation)
        } else {
            Ok(Automorphism::Dilation(q))
        }
    }

    pub fn is_shift(&self) -> bool {
        matches!(self, Automorphism::Shift(_))
    }

    pub fn parameter(&self) -> &F {
        match self {
            Automorphism::Shift(b) | Automorphism::Dilation(b) => b,
        }
    }

    /// `phi^p(f)`.
    pub fn apply(&self, f: &RationalFunction<F>, p: i64) -> RationalFunction<F> {
        if p == 0 || f.is_constant() {
            return f.clone();
        }
        match self {
            Automorphism::Shift(b) => f.compose_affine(&F::one(), &(b.clone() * F::from_i64(p))),
            Automorphism::Dilation(q) => f.compose_affine(&q.pow_i64(p), &F::zero()),
        }
    }

    pub fn apply_poly(&self, f: &Polynomial<F>, p: i64) -> Polynomial<F> {
        if p == 0 {
            return f.clone();
        }
        match self {
            Automorphism::Shift(b) => f.compose_affine(&F::one(), &(b.clone() * F::from_i64(p))),
            Automorphism::Dilation(q) => f.compose_affine(&q.pow_i64(p), &F::zero()),
        }
    }

    pub fn map<G: ConstField>(&self, f: impl Fn(&F) -> G) -> Automorphism<G> {
        match self {
            Automorphism::Shift(b) => Automorphism::Shift(f(b)),
            Automorphism::Dilation(q) => Automorphism::Dilation(f(q)),
        }
    }
}

impl Automorphism<RealAlgebraic> {
    pub fn to_complex(&self) -> Automorphism<GaussianAlgebraic> {
        self.map(|c| GaussianAlgebraic::real(c.clone()))
    }
}

impl<F: Field> fmt::Display for Automorphism<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Automorphism::Shift(b) => write!(f, "shift({b})"),
            Automorphism::Dilation(q) => write!(f, "dilation({q})"),
        }
    }
}

impl<F: Field> fmt::Debug for Automorphism<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<F: Field> Serialize for Automorphism<F> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `phi^p(f)`, the free-function form of [`Automorphism::apply`].
pub fn apply_auto<F: ConstField>(
    phi: &Automorphism<F>,
    f: &RationalFunction<F>,
    p: i64,
) -> RationalFunction<F> {
    phi.apply(f, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::RatFunc;

    fn phi_shift() -> Automorphism<RealAlgebraic> {
        Automorphism::shift(RealAlgebraic::one()).unwrap()
    }

    #[test]
    fn apply_examples() {
        let x = RatFunc::x();
        assert_eq!(phi_shift().apply(&x, 1).to_string(), "x + 1");
        let d = Automorphism::dilation(RealAlgebraic::from_integer(2)).unwrap();
        assert_eq!(d.apply(&x.pow(2), 1).to_string(), "4*x^2");
        let inv = x.try_inv().unwrap();
        let back = phi_shift().apply(&inv, -1);
        assert_eq!(back.to_string(), "1/(x - 1)");
        assert_eq!(phi_shift().apply(&back, 1), inv);
    }

    #[test]
    fn reduction_is_canonical() {
        let x = RatFunc::x();
        let one = RatFunc::one();
        let f = &(&x * &x - &one) / &(&x - &one);
        assert_eq!(f, &x + &one);
        let g = &RatFunc::from_i64(2) / &(&RatFunc::from_i64(2) * &x);
        assert_eq!(g.to_string(), "1/x");
    }

    #[test]
    fn rejects_trivial_automorphisms() {
        assert!(Automorphism::shift(RealAlgebraic::zero()).is_err());
        assert!(Automorphism::dilation(RealAlgebraic::from_integer(-1)).is_err());
    }
}
