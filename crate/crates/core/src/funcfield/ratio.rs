//! Solving `phi(h)/h = a` in `C(x)^*` by gcd telescoping.

use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{Automorphism, RationalFunction};
use crate::field::ConstField;
use crate::poly::Polynomial;

#[derive(Clone, Debug, PartialEq)]
pub enum RatioSolution<F: crate::field::Field> {
    Solved(RationalFunction<F>),
    NoSolution,
    Unknown(String),
}

impl<F: crate::field::Field> RatioSolution<F> {
    pub fn solution(&self) -> Option<&RationalFunction<F>> {
        match self {
            RatioSolution::Solved(h) => Some(h),
            _ => None,
        }
    }
}

/// Cauchy bound: every root of monic `p` has modulus below the result.
pub(crate) fn root_modulus_upper<F: ConstField>(p: &Polynomial<F>) -> BigRational {
    let lc_lo = p.leading().modulus_bounds().0;
    let mut m = BigRational::zero();
    for c in &p.coeffs()[..p.deg()] {
        if !c.is_zero() {
            let hi = c.modulus_bounds().1 / &lc_lo;
            if hi > m {
                m = hi;
            }
        }
    }
    m + BigRational::one()
}

/// Lower bound on root moduli of `p` with `p(0) != 0`.
pub(crate) fn root_modulus_lower<F: ConstField>(p: &Polynomial<F>) -> BigRational {
    let mut rev: Vec<F> = p.coeffs().to_vec();
    rev.reverse();
    let r = Polynomial::new(rev);
    root_modulus_upper(&r).recip()
}

/// Rational `Q > 1` with `Q <= max(|q|, 1/|q|)`.
pub(crate) fn dilation_growth_lower<F: ConstField>(q: &F) -> BigRational {
    let bigger = q.abs_cmp(&F::one()) == Ordering::Greater;
    let mut k = 4;
    loop {
        let (lo, hi) = q.modulus_enclosure(k);
        let cand = if bigger { lo } else if hi.is_positive() { hi.recip() } else { BigRational::zero() };
        if cand > BigRational::one() {
            return cand;
        }
        k += 4;
    }
}

/// Largest shift index `j` for which two roots of the given polynomials can
/// differ by `phi^j`.
pub(crate) fn shift_range<F: ConstField>(phi: &Automorphism<F>, polys: &[&Polynomial<F>]) -> i64 {
    let polys: Vec<&&Polynomial<F>> = polys.iter().filter(|p| p.deg() > 0).collect();
    if polys.is_empty() {
        return 0;
    }
    match phi {
        Automorphism::Shift(beta) => {
            let r = polys
                .iter()
                .map(|p| root_modulus_upper(p))
                .max()
                .unwrap();
            let b = beta.modulus_bounds().0;
            let j = (r * BigRational::from_integer(2.into())) / b;
            ceil_i64(&j)
        }
        Automorphism::Dilation(q) => {
            let hi = polys.iter().map(|p| root_modulus_upper(p)).max().unwrap();
            let lo = polys.iter().map(|p| root_modulus_lower(p)).min().unwrap();
            let ratio = hi / lo;
            let g = dilation_growth_lower(q);
            let mut j = 0i64;
            let mut acc = BigRational::one();
            while acc <= ratio {
                acc *= &g;
                j += 1;
            }
            j
        }
    }
}

fn ceil_i64(r: &BigRational) -> i64 {
    let c = r.ceil().to_integer();
    i64::try_from(c).expect("shift range overflows i64")
}

/// `monic(phi^j(p))` for a polynomial.
pub(crate) fn sigma<F: ConstField>(phi: &Automorphism<F>, p: &Polynomial<F>, j: i64) -> Polynomial<F> {
    phi.apply_poly(p, j).monic()
}

/// Writes `a = kappa * phi(W)/W` with `W` monic (numerator and denominator)
/// and `kappa` constant, when the non-constant part of `a` telescopes.
pub fn telescope<F: ConstField>(
    phi: &Automorphism<F>,
    a: &RationalFunction<F>,
) -> Option<(RationalFunction<F>, F)> {
    assert!(!a.is_zero(), "telescope of zero");
    if !phi.is_shift() && a.valuation_at_zero() != 0 {
        return None;
    }
    let mut rest = a.clone();
    let mut acc = RationalFunction::one();
    loop {
        let n = rest.numer().monic();
        let d = rest.denom().clone();
        if n.deg() == 0 && d.deg() == 0 {
            return Some((acc, rest.leading_coefficient()));
        }
        if n.deg() != d.deg() {
            return None;
        }
        let range = shift_range(phi, &[&n, &d]);
        let mut step = None;
        'search: for mag in 1..=range {
            for j in [mag, -mag] {
                let g = n.gcd(&sigma(phi, &d, j));
                if g.deg() > 0 {
                    step = Some((g, j));
                    break 'search;
                }
            }
        }
        let (g, j) = step?;
        // g | N and sigma^{-j} g | D.
        let (w, invert) = if j > 0 {
            let mut w = Polynomial::one();
            for i in 1..=j {
                w = &w * &sigma(phi, &g, -i);
            }
            (w, false)
        } else {
            let mut w = Polynomial::one();
            for i in 0..-j {
                w = &w * &sigma(phi, &g, i);
            }
            (w, true)
        };
        let wf = RationalFunction::from_poly(w);
        let wf = if invert { wf.try_inv().unwrap() } else { wf };
        let ratio = &phi.apply(&wf, 1) / &wf;
        rest = &rest / &ratio;
        acc = &acc * &wf;
    }
}

/// Decides whether `phi(h)/h = a` has a solution `h` in `C(x)^*`.
pub fn ratio_solve<F: ConstField>(phi: &Automorphism<F>, a: &RationalFunction<F>) -> RatioSolution<F> {
    assert!(!a.is_zero(), "ratio_solve requires a nonzero right-hand side");
    let Some((w, kappa)) = telescope(phi, a) else {
        return RatioSolution::NoSolution;
    };
    match phi {
        Automorphism::Shift(_) => {
            if kappa.is_one() {
                RatioSolution::Solved(w)
            } else {
                RatioSolution::NoSolution
            }
        }
        Automorphism::Dilation(q) => match power_exponent(q, &kappa) {
            PowerExponent::Exponent(k) => {
                let xk = RationalFunction::x().pow(k);
                RatioSolution::Solved(&w * &xk)
            }
            PowerExponent::NotAPower => RatioSolution::NoSolution,
            PowerExponent::Inconclusive(msg) => RatioSolution::Unknown(msg),
        },
    }
}

pub(crate) enum PowerExponent {
    Exponent(i64),
    NotAPower,
    Inconclusive(String),
}

const MAX_EXPONENT_STEPS: i64 = 4096;

/// Finds `k` with `q^k = c`, walking `k` in the direction dictated by the
/// exact modulus comparison; unique since `|q| != 1`.
pub(crate) fn power_exponent<F: ConstField>(q: &F, c: &F) -> PowerExponent {
    let one = F::one();
    if c.is_one() {
        return PowerExponent::Exponent(0);
    }
    let q_big = q.abs_cmp(&one) == Ordering::Greater;
    let c_cmp = c.abs_cmp(&one);
    if c_cmp == Ordering::Equal {
        // |q^k| = 1 forces k = 0.
        return PowerExponent::NotAPower;
    }
    let step: i64 = if (c_cmp == Ordering::Greater) == q_big { 1 } else { -1 };
    let base = q.pow_i64(step);
    // |q^k| moves monotonically from 1 towards |c|; stop once past it.
    let past = if c_cmp == Ordering::Greater {
        Ordering::Greater
    } else {
        Ordering::Less
    };
    let mut cur = base.clone();
    let mut k = step;
    for _ in 0..MAX_EXPONENT_STEPS {
        match cur.abs_cmp(c) {
            Ordering::Equal => {
                return if &cur == c {
                    PowerExponent::Exponent(k)
                } else {
                    PowerExponent::NotAPower
                };
            }
            o if o == past => return PowerExponent::NotAPower,
            _ => {}
        }
        cur = cur * base.clone();
        k += step;
    }
    PowerExponent::Inconclusive(format!(
        "no exponent found within {MAX_EXPONENT_STEPS} powers of {q}"
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::RealAlgebraic;
    use crate::RatFunc;

    fn ra(n: i64) -> RealAlgebraic {
        RealAlgebraic::from_integer(n)
    }

    fn shift() -> Automorphism<RealAlgebraic> {
        Automorphism::shift(ra(1)).unwrap()
    }

    fn dil(q: i64) -> Automorphism<RealAlgebraic> {
        Automorphism::dilation(ra(q)).unwrap()
    }

    fn check(phi: &Automorphism<RealAlgebraic>, a: &RatFunc) -> Option<RatFunc> {
        match ratio_solve(phi, a) {
            RatioSolution::Solved(h) => {
                assert_eq!(&phi.apply(&h, 1) / &h, *a);
                Some(h)
            }
            RatioSolution::NoSolution => None,
            RatioSolution::Unknown(m) => panic!("unknown: {m}"),
        }
    }

    #[test]
    fn shift_telescoping() {
        let x = RatFunc::x();
        let a = &(&x + &RatFunc::one()) / &x;
        assert_eq!(check(&shift(), &a), Some(x));
    }

    #[test]
    fn shift_constant_has_no_solution() {
        assert_eq!(check(&shift(), &RatFunc::from_i64(2)), None);
        assert_eq!(check(&shift(), &RatFunc::from_i64(-1)), None);
    }

    #[test]
    fn dilation_constant() {
        assert_eq!(check(&dil(2), &RatFunc::from_i64(2)), Some(RatFunc::x()));
        assert_eq!(check(&dil(2), &RatFunc::from_i64(8)).unwrap(), RatFunc::x().pow(3));
        assert_eq!(check(&dil(2), &RatFunc::from_i64(3)), None);
        assert_eq!(check(&dil(2), &RatFunc::from_i64(-2)), None);
        assert!(check(&dil(-2), &RatFunc::from_i64(4)).is_some());
        assert_eq!(check(&dil(2), &RatFunc::constant(RealAlgebraic::from_ratio(1, 3))), None);
        assert_eq!(check(&dil(2), &RatFunc::constant(RealAlgebraic::from_ratio(1, 8))).unwrap(), RatFunc::x().pow(-3));
    }

    #[test]
    fn dilation_with_polynomial_part() {
        let x = RatFunc::x();
        let one = RatFunc::one();
        // h = x + 1: h(2x)/h(x) = (2x+1)/(x+1)
        let a = &(&(&RatFunc::from_i64(2) * &x) + &one) / &(&x + &one);
        let h = check(&dil(2), &a).unwrap();
        assert_eq!(&dil(2).apply(&h, 1) / &h, a);
    }

    #[test]
    fn longer_shift_chain() {
        let x = RatFunc::x();
        // h = 1/((x+1)(x+4)) has ratio (x+1)(x+4)/((x+2)(x+5))
        let h = (&(&x + &RatFunc::one()) * &(&x + &RatFunc::from_i64(4))).try_inv().unwrap();
        let a = &shift().apply(&h, 1) / &h;
        let got = check(&shift(), &a).unwrap();
        assert!((&got / &h).is_constant());
    }
}
