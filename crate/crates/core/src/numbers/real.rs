use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, LazyLock, Mutex};

use num_bigint::BigInt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use super::factor::factor_z;
use super::zpoly::{
    bisect_cell, ceil_q, count_roots_closed, floor_q, isolate_real_roots, primitive,
    primitive_from_q, rat, trim_q, RootCell, ZPoly,
};
use super::{check_degree, NumberError};
use crate::field::Field;
use crate::poly::Polynomial;

static ISOLATION_CACHE: LazyLock<Mutex<HashMap<ZPoly, Arc<Vec<RootCell>>>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

fn isolate_cached(p: &ZPoly) -> Arc<Vec<RootCell>> {
    if let Some(hit) = ISOLATION_CACHE.lock().unwrap().get(p) {
        return hit.clone();
    }
    let cells = Arc::new(isolate_real_roots(p));
    ISOLATION_CACHE
        .lock()
        .unwrap()
        .insert(p.clone(), cells.clone());
    cells
}

struct AlgData {
    minpoly: ZPoly,
    index: usize,
    cell: (BigRational, BigRational),
    approx: Mutex<(BigRational, BigRational)>,
}

#[derive(Clone)]
enum Repr {
    Rat(BigRational),
    Alg(Arc<AlgData>),
}

/// A real algebraic number: either a rational, or a root of an irreducible
/// primitive integer polynomial of degree at least two, identified by its
/// index among the real roots in increasing order.
#[derive(Clone)]
pub struct RealAlgebraic(Repr);

/// Closed rational enclosure of a number.
type Enclosure = (BigRational, BigRational);

impl RealAlgebraic {
    pub fn from_rational(q: BigRational) -> Self {
        RealAlgebraic(Repr::Rat(q))
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(rat(n))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_rational(BigRational::new(n.into(), d.into()))
    }

    /// The `index`-th real root (increasing order) of an irreducible,
    /// primitive polynomial of degree at least two.
    fn from_irreducible(minpoly: ZPoly, index: usize, refined: Option<Enclosure>) -> Self {
        let cells = isolate_cached(&minpoly);
        let cell = match &cells[index] {
            RootCell::Open(l, h) => (l.clone(), h.clone()),
            RootCell::Exact(_) => unreachable!("irreducible polynomial with rational root"),
        };
        let approx = refined.unwrap_or_else(|| cell.clone());
        RealAlgebraic(Repr::Alg(Arc::new(AlgData {
            minpoly,
            index,
            cell,
            approx: Mutex::new(approx),
        })))
    }

    /// The unique real root of `poly` in the closed interval `[lo, hi]`.
    pub fn from_isolating(
        poly: &[BigInt],
        lo: &BigRational,
        hi: &BigRational,
    ) -> Result<Self, NumberError> {
        let p = primitive(poly);
        if p.is_empty() {
            return Err(NumberError::ZeroPolynomial);
        }
        let qp = Polynomial::new(p.iter().map(|c| BigRational::from_integer(c.clone())).collect());
        let sqf = primitive_from_q(qp.squarefree_part().coeffs());
        let count = if lo <= hi {
            count_roots_closed(&sqf, lo, hi)
        } else {
            0
        };
        if count != 1 {
            return Err(NumberError::NotIsolating {
                lo: lo.to_string(),
                hi: hi.to_string(),
                count,
            });
        }
        if lo == hi {
            return Ok(Self::from_rational(lo.clone()));
        }
        let mut cell = if super::zpoly::sign_at(&sqf, lo) == Ordering::Equal {
            RootCell::Exact(lo.clone())
        } else if super::zpoly::sign_at(&sqf, hi) == Ordering::Equal {
            RootCell::Exact(hi.clone())
        } else {
            RootCell::Open(lo.clone(), hi.clone())
        };
        let mut approx = move |k: u32| -> Enclosure {
            let eps = BigRational::new(BigInt::one(), BigInt::one() << k);
            loop {
                match &cell {
                    RootCell::Exact(r) => return (r.clone(), r.clone()),
                    RootCell::Open(l, h) => {
                        if h - l <= eps {
                            return (l.clone(), h.clone());
                        }
                        cell = bisect_cell(&sqf, l, h);
                    }
                }
            }
        };
        Ok(select_root(&p, false, &mut approx))
    }

    /// All real roots of a nonzero integer polynomial, increasing, without
    /// multiplicity.
    pub fn roots_of_z(poly: &[BigInt]) -> Vec<RealAlgebraic> {
        let mut out = Vec::new();
        for (f, _) in factor_z(poly) {
            out.extend(roots_of_irreducible(&f));
        }
        out.sort();
        out
    }

    pub fn is_rational(&self) -> bool {
        matches!(self.0, Repr::Rat(_))
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        match &self.0 {
            Repr::Rat(q) => Some(q.clone()),
            Repr::Alg(_) => None,
        }
    }

    /// Irreducible primitive integer polynomial with positive leading
    /// coefficient vanishing at `self`.
    pub fn minpoly(&self) -> ZPoly {
        match &self.0 {
            Repr::Rat(q) => vec![-q.numer().clone(), q.denom().clone()],
            Repr::Alg(a) => a.minpoly.clone(),
        }
    }

    pub fn degree(&self) -> usize {
        match &self.0 {
            Repr::Rat(_) => 1,
            Repr::Alg(a) => a.minpoly.len() - 1,
        }
    }

    /// Canonical isolating interval (a point for rationals).
    pub fn isolating_interval(&self) -> Enclosure {
        match &self.0 {
            Repr::Rat(q) => (q.clone(), q.clone()),
            Repr::Alg(a) => a.cell.clone(),
        }
    }

    /// Closed rational enclosure of width at most `2^-k`.
    pub fn enclosure(&self, k: u32) -> Enclosure {
        match &self.0 {
            Repr::Rat(q) => (q.clone(), q.clone()),
            Repr::Alg(a) => {
                let eps = BigRational::new(BigInt::one(), BigInt::one() << k);
                let mut guard = a.approx.lock().unwrap();
                while &guard.1 - &guard.0 > eps {
                    match bisect_cell(&a.minpoly, &guard.0, &guard.1) {
                        RootCell::Open(l, h) => *guard = (l, h),
                        RootCell::Exact(_) => unreachable!("irrational root hit exactly"),
                    }
                }
                guard.clone()
            }
        }
    }

    pub fn signum(&self) -> i32 {
        match self.cmp(&Self::zero()) {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, NumberError> {
        match (&self.0, &other.0) {
            (Repr::Rat(a), Repr::Rat(b)) => Ok(Self::from_rational(a + b)),
            (Repr::Rat(r), Repr::Alg(_)) => Ok(other.translate(r)),
            (Repr::Alg(_), Repr::Rat(r)) => Ok(self.translate(r)),
            (Repr::Alg(a), Repr::Alg(b)) => {
                if let Some(((p1, q1), (p2, q2), d)) = common_quadratic(a, b) {
                    return Ok(from_quadratic(p1 + p2, q1 + q2, &d));
                }
                check_degree((a.minpoly.len() - 1) * (b.minpoly.len() - 1))?;
                let q = sum_poly(&a.minpoly, &b.minpoly);
                let mut approx = |k: u32| {
                    let (al, ah) = self.enclosure(k + 1);
                    let (bl, bh) = other.enclosure(k + 1);
                    (al + bl, ah + bh)
                };
                Ok(select_root(&q, false, &mut approx))
            }
        }
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, NumberError> {
        match (&self.0, &other.0) {
            (Repr::Rat(a), Repr::Rat(b)) => Ok(Self::from_rational(a * b)),
            (Repr::Rat(r), Repr::Alg(_)) => Ok(other.scale(r)),
            (Repr::Alg(_), Repr::Rat(r)) => Ok(self.scale(r)),
            (Repr::Alg(a), Repr::Alg(b)) => {
                if let Some(((p1, q1), (p2, q2), d)) = common_quadratic(a, b) {
                    let dq = BigRational::from_integer(d.clone());
                    let p = &p1 * &p2 + &q1 * &q2 * dq;
                    let q = p1 * q2 + p2 * q1;
                    return Ok(from_quadratic(p, q, &d));
                }
                check_degree((a.minpoly.len() - 1) * (b.minpoly.len() - 1))?;
                let q = product_poly(&a.minpoly, &b.minpoly);
                let mut approx = |k: u32| {
                    // Enough precision that the product enclosure shrinks.
                    let extra = magnitude_bits(self) + magnitude_bits(other) + 2;
                    let (al, ah) = self.enclosure(k + extra);
                    let (bl, bh) = other.enclosure(k + extra);
                    interval_mul(&al, &ah, &bl, &bh)
                };
                Ok(select_root(&q, false, &mut approx))
            }
        }
    }

    pub fn try_inv(&self) -> Result<Self, NumberError> {
        match &self.0 {
            Repr::Rat(q) => {
                if q.is_zero() {
                    Err(NumberError::DivisionByZero)
                } else {
                    Ok(Self::from_rational(q.recip()))
                }
            }
            Repr::Alg(a) => {
                let mut rev = a.minpoly.clone();
                rev.reverse();
                let q = primitive(&rev);
                let mut approx = |k: u32| {
                    // Move away from zero first, then invert.
                    let mut j = k;
                    loop {
                        let (l, h) = self.enclosure(j);
                        if l.is_positive() || h.is_negative() {
                            let (a, b) = (h.recip(), l.recip());
                            if &b - &a <= BigRational::new(BigInt::one(), BigInt::one() << k) {
                                return (a, b);
                            }
                        }
                        j += 2;
                    }
                };
                Ok(select_root(&q, true, &mut approx))
            }
        }
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, NumberError> {
        self.try_mul(&other.try_inv()?)
    }

    fn translate(&self, r: &BigRational) -> Self {
        if r.is_zero() {
            return self.clone();
        }
        let p = qpoly(&self.minpoly()).compose_affine(&BigRational::one(), &-r);
        let q = primitive_from_q(p.coeffs());
        let mut approx = |k: u32| {
            let (l, h) = self.enclosure(k);
            (l + r, h + r)
        };
        select_root(&q, true, &mut approx)
    }

    fn scale(&self, r: &BigRational) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        if r.is_one() {
            return self.clone();
        }
        let p = qpoly(&self.minpoly()).compose_affine(&r.recip(), &BigRational::zero());
        let q = primitive_from_q(p.coeffs());
        let extra = bits_of(&r.abs()) + 1;
        let mut approx = |k: u32| {
            let (l, h) = self.enclosure(k + extra);
            let (a, b) = (l * r, h * r);
            if a <= b {
                (a, b)
            } else {
                (b, a)
            }
        };
        select_root(&q, true, &mut approx)
    }

    /// `self^e` by repeated squaring; errors on `0^e` with `e < 0`.
    pub fn try_pow(&self, e: i64) -> Result<Self, NumberError> {
        if e < 0 {
            return self.try_inv()?.try_pow(-e);
        }
        if let Repr::Rat(q) = &self.0 {
            return Ok(Self::from_rational(num_traits::pow(q.clone(), e as usize)));
        }
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.try_mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.try_mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Rational lower/upper bounds on `|self|`, with positive lower bound for
    /// nonzero values.
    pub fn abs_bounds(&self) -> Enclosure {
        match &self.0 {
            Repr::Rat(q) => (q.abs(), q.abs()),
            Repr::Alg(_) => {
                let mut k = 0;
                loop {
                    let (l, h) = self.enclosure(k);
                    if l.is_positive() {
                        return (l, h);
                    }
                    if h.is_negative() {
                        return (-h, -l);
                    }
                    k += 1;
                }
            }
        }
    }

    pub fn floor(&self) -> BigInt {
        match &self.0 {
            Repr::Rat(q) => floor_q(q),
            Repr::Alg(_) => {
                let mut k = 0;
                loop {
                    let (l, h) = self.enclosure(k);
                    let fl = floor_q(&l);
                    if floor_q(&h) == fl {
                        return fl;
                    }
                    k += 1;
                }
            }
        }
    }

    pub fn ceil(&self) -> BigInt {
        match &self.0 {
            Repr::Rat(q) => ceil_q(q),
            Repr::Alg(_) => self.floor() + 1,
        }
    }
}

/// `(p, q, D)` with `alpha = p + q sqrt(D)` for a quadratic irrational.
fn quadratic_parts(a: &AlgData) -> Option<(BigRational, BigRational, BigInt)> {
    let [c, b, lc] = a.minpoly.as_slice() else {
        return None;
    };
    let two_a = BigRational::from_integer(lc * 2);
    let d = b * b - lc * c * 4;
    let sign = if a.index == 1 { 1 } else { -1 };
    Some((BigRational::from_integer(-b) / &two_a, rat(sign) / two_a, d))
}

/// Both quadratic irrationals written over one `sqrt(D)`, if they share a
/// quadratic field.
#[allow(clippy::type_complexity)]
fn common_quadratic(
    a: &AlgData,
    b: &AlgData,
) -> Option<((BigRational, BigRational), (BigRational, BigRational), BigInt)> {
    let (p1, q1, d1) = quadratic_parts(a)?;
    let (p2, q2, d2) = quadratic_parts(b)?;
    if d1 == d2 {
        return Some(((p1, q1), (p2, q2), d1));
    }
    // sqrt(d2) = (s / d1) sqrt(d1) when d1 d2 = s^2.
    let prod = &d1 * &d2;
    let s = prod.sqrt();
    if &s * &s != prod {
        return None;
    }
    let q2 = q2 * BigRational::new(s, d1.clone());
    Some(((p1, q1), (p2, q2), d1))
}

/// `p + q sqrt(d)` for a positive non-square `d`.
fn from_quadratic(p: BigRational, q: BigRational, d: &BigInt) -> RealAlgebraic {
    if q.is_zero() {
        return RealAlgebraic::from_rational(p);
    }
    let c0 = &p * &p - &q * &q * BigRational::from_integer(d.clone());
    let minpoly = primitive_from_q(&[c0, -(&p * rat(2)), rat(1)]);
    let index = usize::from(q.is_positive());
    RealAlgebraic::from_irreducible(minpoly, index, None)
}

fn bits_of(r: &BigRational) -> u32 {
    (ceil_q(r).bits() as u32).max(1)
}

fn magnitude_bits(a: &RealAlgebraic) -> u32 {
    let (l, h) = a.isolating_interval();
    bits_of(&l.abs().max(h.abs()))
}

fn interval_mul(al: &BigRational, ah: &BigRational, bl: &BigRational, bh: &BigRational) -> Enclosure {
    let c = [al * bl, al * bh, ah * bl, ah * bh];
    let lo = c.iter().min().unwrap().clone();
    let hi = c.iter().max().unwrap().clone();
    (lo, hi)
}

fn qpoly(p: &[BigInt]) -> Polynomial<BigRational> {
    Polynomial::new(p.iter().map(|c| BigRational::from_integer(c.clone())).collect())
}

/// Real roots of an irreducible primitive polynomial, increasing.
fn roots_of_irreducible(f: &ZPoly) -> Vec<RealAlgebraic> {
    if f.len() == 2 {
        return vec![RealAlgebraic::from_rational(BigRational::new(
            -f[0].clone(),
            f[1].clone(),
        ))];
    }
    let n = isolate_cached(f).len();
    (0..n)
        .map(|i| RealAlgebraic::from_irreducible(f.clone(), i, None))
        .collect()
}

enum Candidate {
    Rat(BigRational),
    Alg {
        f: ZPoly,
        index: usize,
        lo: BigRational,
        hi: BigRational,
    },
}

/// Identifies the real root of `q` that is enclosed by `approx(k)` for every
/// `k`, where the enclosures shrink to a point as `k` grows.
fn select_root(
    q: &ZPoly,
    irreducible: bool,
    approx: &mut dyn FnMut(u32) -> Enclosure,
) -> RealAlgebraic {
    let factors: Vec<ZPoly> = if irreducible {
        vec![primitive(q)]
    } else {
        factor_z(q).into_iter().map(|(f, _)| f).collect()
    };
    let mut cands = Vec::new();
    for f in factors {
        if f.len() == 2 {
            cands.push(Candidate::Rat(BigRational::new(-f[0].clone(), f[1].clone())));
        } else {
            for (index, cell) in isolate_cached(&f).iter().enumerate() {
                cands.push(Candidate::Alg {
                    f: f.clone(),
                    index,
                    lo: cell.lo().clone(),
                    hi: cell.hi().clone(),
                });
            }
        }
    }
    let mut k = 0u32;
    loop {
        let (l, h) = approx(k);
        cands.retain(|c| match c {
            Candidate::Rat(r) => &l <= r && r <= &h,
            Candidate::Alg { lo, hi, .. } => lo < &h && hi > &l,
        });
        assert!(!cands.is_empty(), "root selection lost its target");
        if cands.len() == 1 {
            return match cands.pop().unwrap() {
                Candidate::Rat(r) => RealAlgebraic::from_rational(r),
                Candidate::Alg { f, index, lo, hi } => {
                    RealAlgebraic::from_irreducible(f, index, Some((lo, hi)))
                }
            };
        }
        for c in cands.iter_mut() {
            if let Candidate::Alg { f, lo, hi, .. } = c {
                match bisect_cell(f, lo, hi) {
                    RootCell::Open(a, b) => {
                        *lo = a;
                        *hi = b;
                    }
                    RootCell::Exact(_) => unreachable!(),
                }
            }
        }
        k += 1;
    }
}

/// Power sums `p_0..p_n` of the roots of `p`.
fn power_sums(p: &[BigInt], n: usize) -> Vec<BigRational> {
    let m = p.len() - 1;
    let lc = BigRational::from_integer(p[m].clone());
    // Monic coefficients a_0..a_{m-1}.
    let a: Vec<BigRational> = p[..m]
        .iter()
        .map(|c| BigRational::from_integer(c.clone()) / &lc)
        .collect();
    let mut s = vec![rat(m as i64)];
    for k in 1..=n {
        let mut acc = BigRational::zero();
        for i in 1..=k.min(m) {
            let coef = &a[m - i];
            if i == k {
                acc += coef * rat(k as i64);
            } else {
                acc += coef * &s[k - i];
            }
        }
        s.push(-acc);
    }
    s
}

/// Monic polynomial of degree `n` whose roots have power sums `s_1..s_n`.
fn from_power_sums(s: &[BigRational], n: usize) -> ZPoly {
    let mut e = vec![BigRational::one()];
    for k in 1..=n {
        let mut acc = BigRational::zero();
        for i in 1..=k {
            let term = &e[k - i] * &s[i];
            if i % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        e.push(acc / rat(k as i64));
    }
    let mut coeffs = vec![BigRational::zero(); n + 1];
    for (k, ek) in e.into_iter().enumerate() {
        coeffs[n - k] = if k % 2 == 0 { ek } else { -ek };
    }
    primitive_from_q(&trim_q(coeffs))
}

fn binomials(n: usize) -> Vec<Vec<BigRational>> {
    let mut rows = vec![vec![BigRational::one()]];
    for i in 1..=n {
        let prev = &rows[i - 1];
        let mut row = vec![BigRational::one(); i + 1];
        for j in 1..i {
            row[j] = &prev[j - 1] + &prev[j];
        }
        rows.push(row);
    }
    rows
}

/// Polynomial whose roots are all sums `alpha + beta` of roots of `p`, `q`.
fn sum_poly(p: &[BigInt], q: &[BigInt]) -> ZPoly {
    let n = (p.len() - 1) * (q.len() - 1);
    let ps = power_sums(p, n);
    let qs = power_sums(q, n);
    let binom = binomials(n);
    let s: Vec<BigRational> = (0..=n)
        .map(|k| {
            (0..=k)
                .map(|t| &binom[k][t] * &ps[t] * &qs[k - t])
                .fold(BigRational::zero(), |a, b| a + b)
        })
        .collect();
    from_power_sums(&s, n)
}

/// Polynomial whose roots are all products `alpha * beta`.
fn product_poly(p: &[BigInt], q: &[BigInt]) -> ZPoly {
    let n = (p.len() - 1) * (q.len() - 1);
    let ps = power_sums(p, n);
    let qs = power_sums(q, n);
    let s: Vec<BigRational> = (0..=n).map(|k| &ps[k] * &qs[k]).collect();
    from_power_sums(&s, n)
}

/// Floor of the real `n`-th root of a non-negative rational, scaled: returns
/// `(lo, hi)` with `lo^n <= x <= hi^n` and `hi - lo <= 2^-k`.
pub(crate) fn rational_root_bounds(x: &BigRational, n: u32, k: u32) -> Enclosure {
    debug_assert!(!x.is_negative());
    let scale = BigInt::one() << (k as usize * n as usize);
    let lo_num = floor_q(&(x * BigRational::from_integer(scale.clone())));
    let hi_num = ceil_q(&(x * BigRational::from_integer(scale)));
    let den = BigInt::one() << k;
    let lo = lo_num.nth_root(n);
    let mut hi = hi_num.nth_root(n);
    if num_traits::pow(hi.clone(), n as usize) < hi_num {
        hi += 1;
    }
    (
        BigRational::new(lo, den.clone()),
        BigRational::new(hi, den),
    )
}

/// Exact rational `n`-th root, if there is one.
pub(crate) fn exact_rational_root(x: &BigRational, n: u32) -> Option<BigRational> {
    let neg = x.is_negative();
    if neg && n % 2 == 0 {
        return None;
    }
    let a = x.abs();
    let num = a.numer().nth_root(n);
    let den = a.denom().nth_root(n);
    if num_traits::pow(num.clone(), n as usize) == *a.numer()
        && num_traits::pow(den.clone(), n as usize) == *a.denom()
    {
        let r = BigRational::new(num, den);
        Some(if neg { -r } else { r })
    } else {
        None
    }
}

/// Real `n`-th root (`n >= 1`); `None` for even roots of negatives.
pub(crate) fn nth_root(a: &RealAlgebraic, n: u32) -> Result<Option<RealAlgebraic>, NumberError> {
    assert!(n >= 1);
    let sign = a.signum();
    if n == 1 || sign == 0 {
        return Ok(Some(a.clone()));
    }
    if sign < 0 && n % 2 == 0 {
        return Ok(None);
    }
    if let Some(q) = a.to_rational() {
        if let Some(r) = exact_rational_root(&q, n) {
            return Ok(Some(RealAlgebraic::from_rational(r)));
        }
    }
    let p = a.minpoly();
    check_degree((p.len() - 1) * n as usize)?;
    let mut pn = vec![BigInt::zero(); (p.len() - 1) * n as usize + 1];
    for (i, c) in p.iter().enumerate() {
        pn[i * n as usize] = c.clone();
    }
    let mut approx = |k: u32| {
        let mut j = k;
        loop {
            let (l, h) = a.enclosure(j);
            if sign > 0 && l.is_positive() {
                let (rl, _) = rational_root_bounds(&l, n, k + 1);
                let (_, rh) = rational_root_bounds(&h, n, k + 1);
                return (rl, rh);
            }
            if sign < 0 && h.is_negative() {
                let (rl, _) = rational_root_bounds(&-h, n, k + 1);
                let (_, rh) = rational_root_bounds(&-l, n, k + 1);
                return (-rh, -rl);
            }
            j += 1;
        }
    };
    Ok(Some(select_root(&pn, false, &mut approx)))
}

impl PartialEq for RealAlgebraic {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Rat(a), Repr::Rat(b)) => a == b,
            (Repr::Alg(a), Repr::Alg(b)) => a.index == b.index && a.minpoly == b.minpoly,
            _ => false,
        }
    }
}

impl Eq for RealAlgebraic {}

impl Hash for RealAlgebraic {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Rat(q) => {
                0u8.hash(state);
                q.hash(state);
            }
            Repr::Alg(a) => {
                1u8.hash(state);
                a.minpoly.hash(state);
                a.index.hash(state);
            }
        }
    }
}

impl Ord for RealAlgebraic {
    fn cmp(&self, other: &Self) -> Ordering {
        if let (Repr::Rat(a), Repr::Rat(b)) = (&self.0, &other.0) {
            return a.cmp(b);
        }
        if self == other {
            return Ordering::Equal;
        }
        let mut k = 0;
        loop {
            let (al, ah) = self.enclosure(k);
            let (bl, bh) = other.enclosure(k);
            // At least one side is irrational, so touching endpoints are strict.
            if ah <= bl {
                return Ordering::Less;
            }
            if al >= bh {
                return Ordering::Greater;
            }
            k += 1;
        }
    }
}

impl PartialOrd for RealAlgebraic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn fmt_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for RealAlgebraic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Rat(q) => write!(f, "{}", fmt_rational(q)),
            Repr::Alg(a) => {
                let coeffs: Vec<String> = a.minpoly.iter().map(|c| c.to_string()).collect();
                write!(
                    f,
                    "algebraic([{}],{},{})",
                    coeffs.join(","),
                    fmt_rational(&a.cell.0),
                    fmt_rational(&a.cell.1)
                )
            }
        }
    }
}

impl fmt::Debug for RealAlgebraic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for RealAlgebraic {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl Zero for RealAlgebraic {
    fn zero() -> Self {
        Self::from_rational(BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        matches!(&self.0, Repr::Rat(q) if q.is_zero())
    }
}

impl One for RealAlgebraic {
    fn one() -> Self {
        Self::from_rational(BigRational::one())
    }
    fn is_one(&self) -> bool {
        matches!(&self.0, Repr::Rat(q) if q.is_one())
    }
}

impl Neg for RealAlgebraic {
    type Output = RealAlgebraic;
    fn neg(self) -> Self {
        -&self
    }
}

impl Neg for &RealAlgebraic {
    type Output = RealAlgebraic;
    fn neg(self) -> RealAlgebraic {
        match &self.0 {
            Repr::Rat(q) => RealAlgebraic::from_rational(-q),
            Repr::Alg(a) => {
                let neg: ZPoly = a
                    .minpoly
                    .iter()
                    .enumerate()
                    .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
                    .collect();
                let q = primitive(&neg);
                let count = isolate_cached(&q).len();
                let (l, h) = a.approx.lock().unwrap().clone();
                RealAlgebraic::from_irreducible(q, count - 1 - a.index, Some((-h, -l)))
            }
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $imp:ident) => {
        impl $tr<&RealAlgebraic> for &RealAlgebraic {
            type Output = RealAlgebraic;
            fn $m(self, rhs: &RealAlgebraic) -> RealAlgebraic {
                $imp(self, rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $tr for RealAlgebraic {
            type Output = RealAlgebraic;
            fn $m(self, rhs: RealAlgebraic) -> RealAlgebraic {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&RealAlgebraic> for RealAlgebraic {
            type Output = RealAlgebraic;
            fn $m(self, rhs: &RealAlgebraic) -> RealAlgebraic {
                (&self).$m(rhs)
            }
        }
    };
}

fn add_impl(a: &RealAlgebraic, b: &RealAlgebraic) -> Result<RealAlgebraic, NumberError> {
    a.try_add(b)
}
fn sub_impl(a: &RealAlgebraic, b: &RealAlgebraic) -> Result<RealAlgebraic, NumberError> {
    if a == b {
        return Ok(RealAlgebraic::zero());
    }
    a.try_add(&-b)
}
fn mul_impl(a: &RealAlgebraic, b: &RealAlgebraic) -> Result<RealAlgebraic, NumberError> {
    a.try_mul(b)
}
fn div_impl(a: &RealAlgebraic, b: &RealAlgebraic) -> Result<RealAlgebraic, NumberError> {
    if a == b && !b.is_zero() {
        return Ok(RealAlgebraic::one());
    }
    a.checked_div(b)
}

forward_binop!(Add, add, add_impl);
forward_binop!(Sub, sub, sub_impl);
forward_binop!(Mul, mul, mul_impl);
forward_binop!(Div, div, div_impl);

impl Field for RealAlgebraic {
    fn from_rational(q: &BigRational) -> Self {
        RealAlgebraic::from_rational(q.clone())
    }

    fn inv(&self) -> Option<Self> {
        self.try_inv().ok()
    }

    fn pow_i64(&self, e: i64) -> Self {
        self.try_pow(e).unwrap_or_else(|err| panic!("{err}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(v: &[i64]) -> ZPoly {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    fn sqrt(n: i64) -> RealAlgebraic {
        nth_root(&RealAlgebraic::from_integer(n), 2).unwrap().unwrap()
    }

    #[test]
    fn sqrt2_is_canonical() {
        let s = sqrt(2);
        assert_eq!(s.minpoly(), z(&[-2, 0, 1]));
        assert_eq!(s.to_string(), "algebraic([-2,0,1],1,2)");
        assert_eq!(s.signum(), 1);
    }

    #[test]
    fn square_of_sqrt2() {
        let s = sqrt(2);
        assert_eq!(&s * &s, RealAlgebraic::from_integer(2));
    }

    #[test]
    fn sqrt2_plus_sqrt3() {
        let r = sqrt(2) + sqrt(3);
        assert_eq!(r.minpoly(), z(&[1, 0, -10, 0, 1]));
        let (l, h) = r.enclosure(10);
        assert!(l > BigRational::new(31.into(), 10.into()));
        assert!(h < BigRational::new(32.into(), 10.into()));
    }

    #[test]
    fn negation_and_inverse() {
        let s = sqrt(2);
        let m = -&s;
        assert_eq!(m.signum(), -1);
        assert_eq!(&m + &s, RealAlgebraic::zero());
        let inv = s.try_inv().unwrap();
        assert_eq!(&inv * &s, RealAlgebraic::one());
        assert_eq!(inv.minpoly(), z(&[-1, 0, 2]));
    }

    #[test]
    fn division_by_zero_errors() {
        assert_eq!(
            sqrt(2).checked_div(&RealAlgebraic::zero()),
            Err(NumberError::DivisionByZero)
        );
    }

    #[test]
    fn odd_root_of_negative() {
        let r = nth_root(&RealAlgebraic::from_integer(-8), 3).unwrap().unwrap();
        assert_eq!(r, RealAlgebraic::from_integer(-2));
        let c = nth_root(&RealAlgebraic::from_integer(-2), 3).unwrap().unwrap();
        assert_eq!(c.minpoly(), z(&[2, 0, 0, 1]));
        assert_eq!(c.signum(), -1);
    }

    #[test]
    fn fourth_root_via_sqrt_of_sqrt() {
        let a = nth_root(&sqrt(2), 2).unwrap().unwrap();
        assert_eq!(a.minpoly(), z(&[-2, 0, 0, 0, 1]));
        assert_eq!(a.pow_i64(4), RealAlgebraic::from_integer(2));
    }

    #[test]
    fn isolating_constructor() {
        let a = RealAlgebraic::from_isolating(
            &z(&[-1, -1, 0, 1]),
            &rat(1),
            &rat(2),
        )
        .unwrap();
        assert_eq!(a.signum(), 1);
        assert!(RealAlgebraic::from_isolating(&z(&[-1, 0, 1]), &rat(-2), &rat(2)).is_err());
    }

    #[test]
    fn ordering_mixed() {
        let s = sqrt(2);
        assert!(s > RealAlgebraic::from_ratio(141, 100));
        assert!(s < RealAlgebraic::from_ratio(142, 100));
        assert!(sqrt(3) > s);
    }
}
