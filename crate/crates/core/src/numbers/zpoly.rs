//! Integer / rational univariate polynomial helpers: content, exact sign
//! evaluation, Descartes-based root counting and canonical root isolation.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Integer polynomial, ascending coefficients, no trailing zeros.
pub type ZPoly = Vec<BigInt>;
/// Rational polynomial, ascending coefficients, no trailing zeros.
pub type QPoly = Vec<BigRational>;

pub fn trim_z(mut p: ZPoly) -> ZPoly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

pub fn trim_q(mut p: QPoly) -> QPoly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

pub fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Primitive integer polynomial with positive leading coefficient that is a
/// rational multiple of `p`.
pub fn primitive_from_q(p: &[BigRational]) -> ZPoly {
    let p = trim_q(p.to_vec());
    if p.is_empty() {
        return Vec::new();
    }
    let mut den = BigInt::one();
    for c in &p {
        den = den.lcm(c.denom());
    }
    let z: ZPoly = p
        .iter()
        .map(|c| c.numer() * (&den / c.denom()))
        .collect();
    primitive(&z)
}

pub fn primitive(p: &[BigInt]) -> ZPoly {
    let p = trim_z(p.to_vec());
    if p.is_empty() {
        return p;
    }
    let mut g = BigInt::zero();
    for c in &p {
        g = g.gcd(c);
    }
    let sign = if p.last().unwrap().is_negative() { -BigInt::one() } else { BigInt::one() };
    p.iter().map(|c| c / &g * &sign).collect()
}

pub fn z_to_q(p: &[BigInt]) -> QPoly {
    p.iter().map(|c| BigRational::from_integer(c.clone())).collect()
}

pub fn degree(p: &[BigInt]) -> usize {
    p.len().saturating_sub(1)
}

/// Sign of `p(r)` computed exactly.
pub fn sign_at(p: &[BigInt], r: &BigRational) -> Ordering {
    // Homogenised Horner: sum a_i n^i d^(deg-i), d > 0.
    let n = r.numer();
    let d = r.denom();
    let mut acc = BigInt::zero();
    let mut dpow = BigInt::one();
    for c in p.iter().rev() {
        acc = acc * n + c * &dpow;
        dpow *= d;
    }
    acc.sign_cmp()
}

trait SignCmp {
    fn sign_cmp(&self) -> Ordering;
}

impl SignCmp for BigInt {
    fn sign_cmp(&self) -> Ordering {
        if self.is_zero() {
            Ordering::Equal
        } else if self.is_positive() {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }
}

pub fn eval_q(p: &[BigRational], x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

pub fn eval_z(p: &[BigInt], x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in p.iter().rev() {
        acc = acc * x + BigRational::from_integer(c.clone());
    }
    acc
}

fn q_mul(a: &[BigRational], b: &[BigRational]) -> QPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Number of sign variations of the coefficients of
/// `(1+x)^d p((lo + hi x)/(1+x))`, an upper bound (of the same parity) for the
/// number of roots of `p` in the open interval `(lo, hi)`.
pub fn descartes_bound(p: &[BigInt], lo: &BigRational, hi: &BigRational) -> usize {
    let d = degree(p);
    let num = vec![lo.clone(), hi.clone()];
    let den = vec![BigRational::one(), BigRational::one()];
    // Precompute powers.
    let mut num_pows: Vec<QPoly> = vec![vec![BigRational::one()]];
    let mut den_pows: Vec<QPoly> = vec![vec![BigRational::one()]];
    for i in 0..d {
        num_pows.push(q_mul(&num_pows[i], &num));
        den_pows.push(q_mul(&den_pows[i], &den));
    }
    let mut acc = vec![BigRational::zero(); d + 1];
    for (i, c) in p.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let term = q_mul(&num_pows[i], &den_pows[d - i]);
        let cq = BigRational::from_integer(c.clone());
        for (k, t) in term.into_iter().enumerate() {
            acc[k] += &cq * t;
        }
    }
    let mut var = 0;
    let mut last = Ordering::Equal;
    for c in acc {
        let s = if c.is_zero() {
            Ordering::Equal
        } else if c.is_positive() {
            Ordering::Greater
        } else {
            Ordering::Less
        };
        if s == Ordering::Equal {
            continue;
        }
        if last != Ordering::Equal && s != last {
            var += 1;
        }
        last = s;
    }
    var
}

/// Exact number of roots of a square-free `p` in the open interval `(lo, hi)`.
pub fn count_roots_open(p: &[BigInt], lo: &BigRational, hi: &BigRational) -> usize {
    if lo >= hi || p.len() <= 1 {
        return 0;
    }
    let v = descartes_bound(p, lo, hi);
    if v <= 1 {
        return v;
    }
    let mid = (lo + hi) / rat(2);
    let at_mid = usize::from(sign_at(p, &mid) == Ordering::Equal);
    count_roots_open(p, lo, &mid) + at_mid + count_roots_open(p, &mid, hi)
}

/// Exact number of roots of square-free `p` in the closed interval `[lo, hi]`.
pub fn count_roots_closed(p: &[BigInt], lo: &BigRational, hi: &BigRational) -> usize {
    if lo > hi {
        return 0;
    }
    if lo == hi {
        return usize::from(sign_at(p, lo) == Ordering::Equal);
    }
    let ends = usize::from(sign_at(p, lo) == Ordering::Equal)
        + usize::from(sign_at(p, hi) == Ordering::Equal);
    ends + count_roots_open(p, lo, hi)
}

/// Smallest power of two strictly exceeding every root modulus (Cauchy bound).
pub fn root_bound_pow2(p: &[BigInt]) -> BigInt {
    let lc = p.last().unwrap().abs();
    let mut m = BigRational::zero();
    for c in &p[..p.len() - 1] {
        let r = BigRational::new(c.abs(), lc.clone());
        if r > m {
            m = r;
        }
    }
    let bound = m + BigRational::one();
    let mut b = BigInt::one();
    while BigRational::from_integer(b.clone()) <= bound {
        b *= 2;
    }
    b
}

/// A located real root: either exactly rational or isolated in an open interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RootCell {
    Exact(BigRational),
    Open(BigRational, BigRational),
}

impl RootCell {
    pub fn lo(&self) -> &BigRational {
        match self {
            RootCell::Exact(r) => r,
            RootCell::Open(l, _) => l,
        }
    }
    pub fn hi(&self) -> &BigRational {
        match self {
            RootCell::Exact(r) => r,
            RootCell::Open(_, h) => h,
        }
    }
}

/// Canonical isolation of the real roots of a square-free integer polynomial.
///
/// Intervals come from dyadic bisection of `(-2^k, 2^k)` and are only accepted
/// once their width is at most one, so each open cell is of the form
/// `(m/2^j, (m+1)/2^j)` with `j >= 0`; for well separated roots this yields
/// unit cells `(n, n+1)`. The output is sorted and deterministic.
pub fn isolate_real_roots(p: &[BigInt]) -> Vec<RootCell> {
    let p = trim_z(p.to_vec());
    if p.len() <= 1 {
        return Vec::new();
    }
    let b = BigRational::from_integer(root_bound_pow2(&p));
    let mut out = Vec::new();
    if sign_at(&p, &BigRational::zero()) == Ordering::Equal {
        out.push(RootCell::Exact(BigRational::zero()));
    }
    let descartes = |lo: &BigRational, hi: &BigRational| descartes_bound(&p, lo, hi);
    let quadratic = quadratic_counter(&p);
    let count: &dyn Fn(&BigRational, &BigRational) -> usize = match &quadratic {
        Some(q) => q,
        None => &descartes,
    };
    isolate_rec(&p, count, -b.clone(), BigRational::zero(), &mut out);
    isolate_rec(&p, count, BigRational::zero(), b, &mut out);
    out.sort_by(|a, b| a.lo().cmp(b.lo()));
    out
}

/// Exact root counter for quadratics with two irrational roots.
fn quadratic_counter(p: &[BigInt]) -> Option<impl Fn(&BigRational, &BigRational) -> usize + '_> {
    let [c, b, a] = p else {
        return None;
    };
    let d: BigInt = b * b - a * c * 4;
    if !d.is_positive() || d.sqrt().pow(2) == d {
        return None;
    }
    let vertex = BigRational::new(-b.clone(), a * 2);
    let up = if a.is_positive() { Ordering::Greater } else { Ordering::Less };
    // 0 left of both roots, 1 between them, 2 right of both.
    let pos = move |t: &BigRational| -> usize {
        if sign_at(p, t) != up {
            1
        } else if *t < vertex {
            0
        } else {
            2
        }
    };
    Some(move |lo: &BigRational, hi: &BigRational| pos(hi) - pos(lo))
}

/// `count` bounds the roots in an open interval, exactly when it is 0 or 1.
fn isolate_rec(
    p: &[BigInt],
    count: &dyn Fn(&BigRational, &BigRational) -> usize,
    lo: BigRational,
    hi: BigRational,
    out: &mut Vec<RootCell>,
) {
    let v = count(&lo, &hi);
    if v == 0 {
        return;
    }
    if v == 1 && &hi - &lo <= BigRational::one() {
        out.push(RootCell::Open(lo, hi));
        return;
    }
    let mid = (&lo + &hi) / rat(2);
    if sign_at(p, &mid) == Ordering::Equal {
        out.push(RootCell::Exact(mid.clone()));
    }
    isolate_rec(p, count, lo, mid.clone(), out);
    isolate_rec(p, count, mid, hi, out);
}

/// Halves an isolating interval of a root of square-free `p`. Returns the
/// new cell, which is `Exact` if the midpoint is the root.
pub fn bisect_cell(p: &[BigInt], lo: &BigRational, hi: &BigRational) -> RootCell {
    let mid = (lo + hi) / rat(2);
    let sm = sign_at(p, &mid);
    if sm == Ordering::Equal {
        return RootCell::Exact(mid);
    }
    let sl = sign_at(p, lo);
    if sl != Ordering::Equal && sl != sm {
        RootCell::Open(lo.clone(), mid)
    } else if sl == Ordering::Equal {
        // lo itself is a root of p but not the isolated one; fall back to a count.
        if count_roots_open(p, lo, &mid) == 1 {
            RootCell::Open(lo.clone(), mid)
        } else {
            RootCell::Open(mid, hi.clone())
        }
    } else {
        RootCell::Open(mid, hi.clone())
    }
}

/// Derivative of an integer polynomial.
pub fn derivative_z(p: &[BigInt]) -> ZPoly {
    trim_z(
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigInt::from(i))
            .collect(),
    )
}

/// Floor of a rational.
pub fn floor_q(r: &BigRational) -> BigInt {
    r.numer().div_floor(r.denom())
}

/// Ceiling of a rational.
pub fn ceil_q(r: &BigRational) -> BigInt {
    -((-r.numer()).div_floor(r.denom()))
}
