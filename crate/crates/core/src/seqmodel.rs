//! Sequence model: the base field and presented rings embedded into germs at
//! `+inf` of sequences `n -> value`, with `phi` acting as the index shift
//! `x_n -> x_{n+1}`.
//!
//! Indices start at `0`. Values are exact [`GaussianAlgebraic`] numbers.

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::sync::{Arc, Mutex};

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::diffring::{box_points, DiffRingPresentation, RingElement};
use crate::field::{ConstField, Field};
use crate::funcfield::{Automorphism, RationalFunction};
use crate::lattice::{pivots, Vector};
use crate::numbers::{GaussianAlgebraic, RealAlgebraic};
use crate::poly::Polynomial;
use crate::pv::PVExtension;

pub const DEFAULT_WINDOW: usize = 50;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SeqError {
    #[error("a dilation orbit needs a nonzero base point")]
    ZeroBasePoint,
    #[error("ring lives over {ring} but the embedding realizes {embedding}")]
    BaseMismatch { ring: String, embedding: String },
    #[error("expected {expected} initial values, got {got}")]
    InitialCount { expected: usize, got: usize },
    #[error("initial value {0} is zero")]
    ZeroInitial(usize),
    #[error("initial values violate T^{relation:?} = {expected} at n = {index}")]
    Torsion {
        relation: Vector,
        expected: String,
        index: usize,
    },
    #[error("no exact {degree}-th root of {radicand}")]
    Root { degree: i64, radicand: String },
    #[error("term {index} of the realized solution is not real")]
    NotReal { index: usize },
}

/// `x_n = x0 + n beta` (shift) or `x0 q^n` (dilation).
#[derive(Clone, Debug, Serialize)]
#[serde(bound = "")]
pub struct SeqEmbedding<F: ConstField> {
    pub phi: Automorphism<F>,
    pub x0: F,
    pub window: usize,
    /// Functions whose poles and zeros the orbit must avoid.
    pub registered: Vec<RationalFunction<F>>,
}

impl<F: ConstField> SeqEmbedding<F> {
    pub fn new(phi: Automorphism<F>, x0: F, window: usize) -> Result<Self, SeqError> {
        if !phi.is_shift() && x0.is_zero() {
            return Err(SeqError::ZeroBasePoint);
        }
        Ok(SeqEmbedding {
            phi,
            x0,
            window,
            registered: Vec::new(),
        })
    }

    /// `x0 = 1`, default window.
    pub fn standard(phi: Automorphism<F>) -> Self {
        Self::new(phi, F::one(), DEFAULT_WINDOW).expect("1 is a valid base point")
    }

    /// The first of `1, -1, 2, -2, ...` whose whole forward orbit avoids the
    /// poles and zeros of `fs`.
    pub fn avoiding(phi: Automorphism<F>, fs: &[RationalFunction<F>], window: usize) -> Self {
        Self::clean_base_points(phi, fs, window).next().unwrap()
    }

    /// All embeddings with base points in `1, -1, 2, -2, ...` whose forward
    /// orbits avoid the poles and zeros of `fs`, in that order.
    pub fn clean_base_points(
        phi: Automorphism<F>,
        fs: &[RationalFunction<F>],
        window: usize,
    ) -> impl Iterator<Item = Self> {
        let fs = fs.to_vec();
        (1i64..).flat_map(move |k| {
            let (phi, fs) = (phi.clone(), fs.clone());
            [k, -k].into_iter().filter_map(move |x0| {
                let mut emb = Self::new(phi.clone(), F::from_i64(x0), window).ok()?;
                emb.registered = fs.clone();
                (emb.defined_from() == 0).then_some(emb)
            })
        })
    }

    pub fn register(&mut self, f: RationalFunction<F>) {
        self.registered.push(f);
    }

    /// `x_n`.
    pub fn point(&self, n: usize) -> F {
        match &self.phi {
            Automorphism::Shift(b) => self.x0.clone() + b.clone() * F::from_i64(n as i64),
            Automorphism::Dilation(q) => self.x0.clone() * q.pow_i64(n as i64),
        }
    }

    /// First index from which the orbit avoids every pole and zero of the
    /// registered functions.
    pub fn defined_from(&self) -> usize {
        self.registered
            .iter()
            .map(|f| self.avoid_from(f.numer()).max(self.avoid_from(f.denom())))
            .max()
            .unwrap_or(0)
    }

    fn same_orbit(&self, other: &Self) -> bool {
        self.phi == other.phi && self.x0 == other.x0
    }

    /// All `n >= 0` with `p(x_n) = 0`, for `p != 0`.
    pub fn orbit_zeros(&self, p: &Polynomial<F>) -> Vec<usize> {
        if p.is_constant() {
            return Vec::new();
        }
        (0..=self.orbit_limit(p))
            .filter(|&n| p.eval(&self.point(n)).is_zero())
            .collect()
    }

    /// First index beyond every orbit zero of `p`.
    pub fn avoid_from(&self, p: &Polynomial<F>) -> usize {
        self.orbit_zeros(p).last().map_or(0, |n| n + 1)
    }

    /// An index past which `|x_n|` leaves the annulus holding the roots of `p`.
    fn orbit_limit(&self, p: &Polynomial<F>) -> usize {
        let big = cauchy_bound(p.coeffs());
        let (x_lo, x_hi) = self.x0.modulus_bounds();
        match &self.phi {
            Automorphism::Shift(b) => {
                let (b_lo, _) = b.modulus_bounds();
                let lim = (big + x_hi) / b_lo;
                usize::try_from(lim.floor().to_integer()).expect("orbit bound overflow")
            }
            Automorphism::Dilation(q) => {
                let mut n = 0;
                if q.abs_cmp(&F::one()) == Ordering::Greater {
                    let q_lo = strict_modulus(q, true);
                    let mut v = x_lo;
                    while v <= big {
                        v *= &q_lo;
                        n += 1;
                    }
                } else {
                    let first = p.coeffs().iter().position(|c| !c.is_zero()).unwrap();
                    let rev: Vec<F> = p.coeffs()[first..].iter().rev().cloned().collect();
                    let small = cauchy_bound(&rev).recip();
                    let q_hi = strict_modulus(q, false);
                    let mut v = x_hi;
                    while v >= small {
                        v *= &q_hi;
                        n += 1;
                    }
                }
                n
            }
        }
    }
}

/// `1 + max |c_i / c_d|`, a bound on the moduli of the roots.
fn cauchy_bound<F: ConstField>(coeffs: &[F]) -> BigRational {
    let (lead_lo, _) = coeffs.last().unwrap().modulus_bounds();
    let mut m = BigRational::zero();
    for c in &coeffs[..coeffs.len() - 1] {
        let (_, hi) = c.modulus_bounds();
        let r = hi / &lead_lo;
        if r > m {
            m = r;
        }
    }
    m + BigRational::one()
}

/// A rational strictly between `1` and `|q|`.
fn strict_modulus<F: ConstField>(q: &F, above_one: bool) -> BigRational {
    let one = BigRational::one();
    let mut k = 2;
    loop {
        let (lo, hi) = q.modulus_enclosure(k);
        if above_one && lo > one {
            return lo;
        }
        if !above_one && hi < one {
            return hi;
        }
        k += 2;
    }
}

/// Symbolic description of a germ, used for certificates and extension.
#[derive(Clone, Debug)]
enum Origin<F: ConstField> {
    Base {
        emb: Arc<SeqEmbedding<F>>,
        f: RationalFunction<F>,
    },
    Ring {
        sol: Arc<SolutionEmbedding<F>>,
        element: RingElement<F>,
    },
}

#[derive(Clone, Copy)]
enum Op {
    Add,
    Sub,
    Mul,
}

impl<F: ConstField> Origin<F> {
    fn lift(&self, sol: &Arc<SolutionEmbedding<F>>) -> Option<RingElement<F>> {
        match self {
            Origin::Base { emb, f } => emb
                .same_orbit(&sol.embedding)
                .then(|| sol.ring.scalar(f.clone())),
            Origin::Ring { sol: s, element } => sol.same(s).then(|| element.clone()),
        }
    }

    fn combine(&self, other: &Self, op: Op) -> Option<Self> {
        if let (Origin::Base { emb, f }, Origin::Base { emb: e2, f: g }) = (self, other) {
            if !emb.same_orbit(e2) {
                return None;
            }
            let f = match op {
                Op::Add => f + g,
                Op::Sub => f - g,
                Op::Mul => f * g,
            };
            return Some(Origin::Base { emb: emb.clone(), f });
        }
        let sol = match (self, other) {
            (Origin::Ring { sol, .. }, _) | (_, Origin::Ring { sol, .. }) => sol.clone(),
            _ => unreachable!(),
        };
        let (a, b) = (self.lift(&sol)?, other.lift(&sol)?);
        let r = &sol.ring;
        let element = match op {
            Op::Add => r.add(&a, &b),
            Op::Sub => r.sub(&a, &b),
            Op::Mul => r.mul(&a, &b),
        };
        Some(Origin::Ring { sol, element })
    }

    fn shifted(&self) -> Self {
        match self {
            Origin::Base { emb, f } => Origin::Base {
                emb: emb.clone(),
                f: emb.phi.apply(f, 1),
            },
            Origin::Ring { sol, element } => Origin::Ring {
                sol: sol.clone(),
                element: sol.ring.apply_phi(element, 1),
            },
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            Origin::Base { f, .. } => f.is_zero(),
            Origin::Ring { element, .. } => element.is_zero(),
        }
    }

    fn defined_from(&self) -> usize {
        match self {
            Origin::Base { emb, f } => emb.avoid_from(f.denom()),
            Origin::Ring { sol, element } => element
                .terms()
                .values()
                .map(|f| sol.embedding.avoid_from(f.denom()))
                .fold(sol.start, usize::max),
        }
    }

    fn eval(&self, n: usize) -> Option<GaussianAlgebraic> {
        match self {
            Origin::Base { emb, f } => f.eval(&emb.point(n)).map(|v| v.to_gaussian()),
            Origin::Ring { sol, element } => sol.eval(element, n),
        }
    }

    fn germ(self, len: usize) -> Germ<F> {
        let defined_from = self.defined_from();
        let values = (0..len)
            .map(|n| if n < defined_from { None } else { self.eval(n) })
            .collect();
        Germ {
            defined_from,
            values,
            origin: Some(self),
        }
    }
}

/// A sequence known on `0..len()`; only the terms from `defined_from` on
/// belong to the germ.
#[derive(Clone, Debug, Serialize)]
#[serde(bound = "")]
pub struct Germ<F: ConstField> {
    pub defined_from: usize,
    values: Vec<Option<GaussianAlgebraic>>,
    #[serde(skip)]
    origin: Option<Origin<F>>,
}

impl<F: ConstField> Germ<F> {
    /// A germ without symbolic origin, with `values[k]` the term of index
    /// `defined_from + k`.
    pub fn from_values(defined_from: usize, values: Vec<GaussianAlgebraic>) -> Self {
        let mut v = vec![None; defined_from];
        v.extend(values.into_iter().map(Some));
        Germ {
            defined_from,
            values: v,
            origin: None,
        }
    }

    /// Number of indices covered, counted from `0`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() <= self.defined_from
    }

    pub fn value(&self, n: usize) -> Option<&GaussianAlgebraic> {
        if n < self.defined_from {
            return None;
        }
        self.values.get(n)?.as_ref()
    }

    /// `(n, value)` for the computed terms of the germ.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &GaussianAlgebraic)> {
        (self.defined_from..self.len()).filter_map(|n| self.value(n).map(|v| (n, v)))
    }

    /// True when a symbolic expression backs the germ beyond the window.
    pub fn is_certified(&self) -> bool {
        self.origin.is_some()
    }

    pub fn is_real(&self) -> bool {
        self.terms().all(|(_, v)| v.is_real())
    }

    /// Computes terms up to index `len`. Only germs with a symbolic origin
    /// can grow.
    pub fn extend_to(&mut self, len: usize) -> bool {
        let Some(o) = &self.origin else {
            return len <= self.len();
        };
        for n in self.len()..len {
            self.values.push(o.eval(n));
        }
        true
    }

    /// The same germ with the term at `n` replaced. The origin then only
    /// describes the terms after `n`.
    pub fn with_value(&self, n: usize, v: GaussianAlgebraic) -> Self {
        let mut g = self.clone();
        if n >= g.values.len() {
            g.values.resize(n + 1, None);
        }
        g.values[n] = Some(v);
        if g.origin.is_some() {
            g.defined_from = g.defined_from.max(n + 1);
        } else {
            g.defined_from = g.defined_from.min(n);
        }
        g
    }

    /// `n -> g(n + 1)`, the image of `phi`.
    pub fn shifted(&self) -> Self {
        if let Some(o) = &self.origin {
            return o.shifted().germ(self.len());
        }
        Germ {
            defined_from: self.defined_from.saturating_sub(1),
            values: self.values.iter().skip(1).cloned().collect(),
            origin: None,
        }
    }

    fn pointwise(&self, other: &Self, op: Op) -> Self {
        let defined_from = self.defined_from.max(other.defined_from);
        let len = self.len().min(other.len());
        let values = (0..len)
            .map(|n| {
                if n < defined_from {
                    return None;
                }
                let (a, b) = (self.value(n)?, other.value(n)?);
                Some(match op {
                    Op::Add => a + b,
                    Op::Sub => a - b,
                    Op::Mul => a * b,
                })
            })
            .collect();
        let origin = match (&self.origin, &other.origin) {
            (Some(a), Some(b)) => a.combine(b, op),
            _ => None,
        };
        Germ {
            defined_from,
            values,
            origin,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.pointwise(other, Op::Add)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.pointwise(other, Op::Sub)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.pointwise(other, Op::Mul)
    }

    /// `n,value` lines for the computed terms.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,value\n");
        for (n, v) in self.terms() {
            let _ = writeln!(out, "{n},\"{v}\"");
        }
        out
    }
}

/// `n -> f(x_n)`.
pub fn embed_base<F: ConstField>(emb: &SeqEmbedding<F>, f: &RationalFunction<F>) -> Germ<F> {
    let origin = Origin::Base {
        emb: Arc::new(emb.clone()),
        f: f.clone(),
    };
    let from = origin.defined_from();
    origin.germ(from + emb.window)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum GermEquality {
    /// The window agrees and the symbolic difference reduces to zero.
    Certified,
    /// The window agrees; no certificate covers the tail.
    Probably,
    NotEqual { index: usize },
}

impl GermEquality {
    pub fn holds(&self) -> bool {
        !matches!(self, GermEquality::NotEqual { .. })
    }
}

/// First index beyond both `defined_from` where computed terms differ.
fn first_mismatch<F: ConstField>(g1: &Germ<F>, g2: &Germ<F>) -> Option<usize> {
    let from = g1.defined_from.max(g2.defined_from);
    let to = g1.len().min(g2.len());
    (from..to).find(|&n| g1.value(n) != g2.value(n))
}

pub fn germ_equal<F: ConstField>(g1: &Germ<F>, g2: &Germ<F>) -> GermEquality {
    if let Some(index) = first_mismatch(g1, g2) {
        return GermEquality::NotEqual { index };
    }
    let certified = match (&g1.origin, &g2.origin) {
        (Some(a), Some(b)) => a.combine(b, Op::Sub).is_some_and(|d| d.is_zero()),
        _ => false,
    };
    if certified {
        GermEquality::Certified
    } else {
        GermEquality::Probably
    }
}

/// `T_j -> u_j`, with `u(n+1) = a(x_n) u(n)` from `u(start) = initial`.
#[derive(Debug, Serialize)]
#[serde(bound = "")]
pub struct SolutionEmbedding<F: ConstField> {
    pub embedding: SeqEmbedding<F>,
    pub ring: DiffRingPresentation<F>,
    pub start: usize,
    pub initial: Vec<GaussianAlgebraic>,
    #[serde(skip)]
    cache: Mutex<Vec<Vec<GaussianAlgebraic>>>,
}

impl<F: ConstField> SolutionEmbedding<F> {
    fn same(&self, other: &Self) -> bool {
        std::ptr::eq(self, other)
            || (self.embedding.same_orbit(&other.embedding)
                && self.start == other.start
                && self.initial == other.initial
                && self.ring == other.ring)
    }

    pub fn n(&self) -> usize {
        self.ring.n()
    }

    /// `u(n)` for `n >= start`.
    pub fn u(&self, n: usize) -> Vec<GaussianAlgebraic> {
        assert!(n >= self.start, "index {n} precedes the start {}", self.start);
        let k = n - self.start;
        let mut cache = self.cache.lock().unwrap();
        while cache.len() <= k {
            let m = self.start + cache.len() - 1;
            let x = self.embedding.point(m);
            let next = cache
                .last()
                .unwrap()
                .iter()
                .zip(self.ring.action())
                .map(|(u, a)| &a.eval(&x).expect("orbit avoids poles").to_gaussian() * u)
                .collect();
            cache.push(next);
        }
        cache[k].clone()
    }

    fn eval(&self, e: &RingElement<F>, n: usize) -> Option<GaussianAlgebraic> {
        if n < self.start {
            return None;
        }
        let x = self.embedding.point(n);
        let u = self.u(n);
        let mut acc = GaussianAlgebraic::zero();
        for (m, f) in e.terms() {
            let c = f.eval(&x)?.to_gaussian();
            acc = &acc + &(&c * &monomial_at(&u, m));
        }
        Some(acc)
    }

    /// `U(n)` for `n` in `start..start + window`, as dense matrices.
    pub fn matrices(&self) -> Vec<Vec<Vec<GaussianAlgebraic>>> {
        let n = self.n();
        (self.start..self.start + self.embedding.window)
            .map(|k| {
                let u = self.u(k);
                (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| if i == j { u[i].clone() } else { GaussianAlgebraic::zero() })
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }

    /// Re-checks `U(n+1) = A(x_n) U(n)` and `det U(n) != 0` on the window.
    pub fn verify_recurrence(&self) -> bool {
        let end = self.start + self.embedding.window;
        (self.start..end).all(|k| {
            let (u, v) = (self.u(k), self.u(k + 1));
            let x = self.embedding.point(k);
            u.iter().all(|c| !c.is_zero())
                && u.iter().zip(&v).zip(self.ring.action()).all(|((c, d), a)| {
                    a.eval(&x).is_some_and(|a| &a.to_gaussian() * c == *d)
                })
        })
    }
}

fn monomial_at(u: &[GaussianAlgebraic], m: &[i64]) -> GaussianAlgebraic {
    u.iter()
        .zip(m)
        .fold(GaussianAlgebraic::one(), |acc, (c, &e)| &acc * &c.pow_i64(e))
}

/// Germ matrix of a solution, with the induced map on ring elements.
#[derive(Clone, Debug)]
pub struct SolutionGerm<F: ConstField> {
    sol: Arc<SolutionEmbedding<F>>,
}

impl<F: ConstField> SolutionGerm<F> {
    pub fn embedding(&self) -> &SolutionEmbedding<F> {
        &self.sol
    }

    /// The germ of a ring element.
    pub fn element(&self, e: &RingElement<F>) -> Germ<F> {
        let origin = Origin::Ring {
            sol: self.sol.clone(),
            element: e.clone(),
        };
        let from = origin.defined_from();
        origin.germ(from + self.sol.embedding.window)
    }

    /// The germ of `T_{j+1}`, the `j`-th diagonal entry of `U`.
    pub fn entry(&self, j: usize) -> Germ<F> {
        self.element(&self.sol.ring.generator(j))
    }

    pub fn matrices(&self) -> Vec<Vec<Vec<GaussianAlgebraic>>> {
        self.sol.matrices()
    }

    /// Checks on monomials `T^m`, `|m_i| <= radius`, and their pairwise
    /// products that the induced map respects products, the relations and
    /// `phi`, by comparing computed terms only.
    pub fn check_morphism(&self, radius: i64) -> MorphismReport {
        let ring = &self.sol.ring;
        let x = RationalFunction::x();
        let monos = box_points(ring.n(), radius);
        let raw = |m: &[i64]| -> Vec<Option<GaussianAlgebraic>> {
            let from = self.sol.start;
            (0..from + self.sol.embedding.window)
                .map(|n| (n >= from).then(|| monomial_at(&self.sol.u(n), m)))
                .collect()
        };
        let mut report = MorphismReport::default();
        let mut check = |what: String, g: &Germ<F>, h: &Germ<F>| {
            report.checked += 1;
            if first_mismatch(g, h).is_some() {
                report.failures.push(what);
            }
        };
        for m in &monos {
            let g = self.element(&ring.monomial(m));
            let direct = Germ {
                defined_from: self.sol.start,
                values: raw(m),
                origin: None,
            };
            check(format!("T^{m:?} against the product of entries"), &g, &direct);
            let phi_g = self.element(&ring.apply_phi(&ring.monomial(m), 1));
            check(format!("phi(T^{m:?}) against the shift"), &phi_g, &direct.shifted());
        }
        for (i, m1) in monos.iter().enumerate() {
            let e1 = ring.add(&ring.monomial(m1), &ring.scalar(x.clone()));
            for m2 in &monos[i..] {
                let e2 = ring.monomial(m2);
                let prod = self.element(&ring.mul(&e1, &e2));
                let sep = self.element(&e1).mul(&self.element(&e2));
                check(format!("(T^{m1:?} + x) T^{m2:?}"), &prod, &sep);
            }
        }
        report
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct MorphismReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl MorphismReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// First index from which every entry of `a` and every relation value is
/// defined and nonzero along the orbit.
fn solution_start<F: ConstField>(ring: &DiffRingPresentation<F>, emb: &SeqEmbedding<F>) -> usize {
    ring.action()
        .iter()
        .chain(ring.cocycle())
        .flat_map(|f| [emb.avoid_from(f.numer()), emb.avoid_from(f.denom())])
        .fold(emb.defined_from(), usize::max)
}

fn check_torsion<F: ConstField>(
    ring: &DiffRingPresentation<F>,
    x: &F,
    index: usize,
    c: &[GaussianAlgebraic],
) -> Result<(), SeqError> {
    for (b, h) in ring.lattice().iter().zip(ring.cocycle()) {
        let expected = h.eval(x).expect("start avoids poles").to_gaussian();
        if monomial_at(c, b) != expected {
            return Err(SeqError::Torsion {
                relation: b.clone(),
                expected: expected.to_string(),
                index,
            });
        }
    }
    Ok(())
}

/// Embeds a presented ring along `emb`, with `initial` the values of
/// `T_1, .., T_n` at the first index where the system is regular.
pub fn embed_ring<F: ConstField>(
    ring: &DiffRingPresentation<F>,
    emb: &SeqEmbedding<F>,
    initial: &[GaussianAlgebraic],
) -> Result<SolutionGerm<F>, SeqError> {
    if ring.phi() != &emb.phi {
        return Err(SeqError::BaseMismatch {
            ring: ring.phi().to_string(),
            embedding: emb.phi.to_string(),
        });
    }
    if initial.len() != ring.n() {
        return Err(SeqError::InitialCount {
            expected: ring.n(),
            got: initial.len(),
        });
    }
    if let Some(j) = initial.iter().position(|c| c.is_zero()) {
        return Err(SeqError::ZeroInitial(j));
    }
    let start = solution_start(ring, emb);
    check_torsion(ring, &emb.point(start), start, initial)?;
    let sol = SolutionEmbedding {
        embedding: emb.clone(),
        ring: ring.clone(),
        start,
        initial: initial.to_vec(),
        cache: Mutex::new(vec![initial.to_vec()]),
    };
    Ok(SolutionGerm { sol: Arc::new(sol) })
}

pub fn embed_solution<F: ConstField>(
    pv: &PVExtension<F>,
    emb: &SeqEmbedding<F>,
    initial: &[GaussianAlgebraic],
) -> Result<SolutionGerm<F>, SeqError> {
    embed_ring(&pv.ring, emb, initial)
}

/// An exact root `c^d = r`, real when `r` is real and one exists.
fn root_of(r: &GaussianAlgebraic, d: i64) -> Result<GaussianAlgebraic, SeqError> {
    let fail = || SeqError::Root {
        degree: d,
        radicand: r.to_string(),
    };
    let d32 = u32::try_from(d).map_err(|_| fail())?;
    if r.is_real() && (d % 2 == 1 || r.re.signum() > 0) {
        let root = crate::numbers::nth_root_real(&r.re, d32).ok_or_else(fail)?;
        return Ok(GaussianAlgebraic::real(root));
    }
    r.principal_root(d32).ok_or_else(fail)
}

/// Initial values satisfying the relations of `ring`: free coordinates are
/// `1`, pivot coordinates are roots taken along the HNF from the last row.
pub fn default_initial<F: ConstField>(
    ring: &DiffRingPresentation<F>,
    emb: &SeqEmbedding<F>,
) -> Result<Vec<GaussianAlgebraic>, SeqError> {
    let start = solution_start(ring, emb);
    let x = emb.point(start);
    let mut c = vec![GaussianAlgebraic::one(); ring.n()];
    let lattice = ring.lattice();
    let piv = pivots(lattice);
    for k in (0..lattice.len()).rev() {
        let (b, p) = (&lattice[k], piv[k]);
        let h = ring.cocycle()[k].eval(&x).expect("start avoids poles").to_gaussian();
        let mut rest = b.clone();
        rest[p] = 0;
        let r = &h / &monomial_at(&c, &rest);
        c[p] = root_of(&r, b[p])?;
    }
    Ok(c)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum RealInitial {
    Found(Vec<GaussianAlgebraic>),
    /// No scaling of the default values by `±1, ±i` is real and consistent.
    Exhausted { tried: usize },
}

/// Searches real initial values among the `4^n` scalings of
/// [`default_initial`] by `±1, ±i`.
pub fn real_initial<F: ConstField>(
    ring: &DiffRingPresentation<F>,
    emb: &SeqEmbedding<F>,
) -> Result<RealInitial, SeqError> {
    let base = default_initial(ring, emb)?;
    let start = solution_start(ring, emb);
    let x = emb.point(start);
    let units = [
        GaussianAlgebraic::one(),
        -GaussianAlgebraic::one(),
        GaussianAlgebraic::i(),
        -GaussianAlgebraic::i(),
    ];
    let n = ring.n();
    let total = 4usize.pow(n as u32);
    for code in 0..total {
        let mut k = code;
        let c: Vec<GaussianAlgebraic> = base
            .iter()
            .map(|b| {
                let s = &units[k % 4];
                k /= 4;
                b * s
            })
            .collect();
        if c.iter().all(|v| v.is_real()) && check_torsion(ring, &x, start, &c).is_ok() {
            return Ok(RealInitial::Found(c));
        }
    }
    Ok(RealInitial::Exhausted { tried: total })
}

/// The first of the first `attempts` clean base points (see
/// [`SeqEmbedding::clean_base_points`]) admitting real initial values, with
/// those values. The poles and zeros of the action and the relation values
/// are registered.
pub fn real_base_point<F: ConstField>(
    ring: &DiffRingPresentation<F>,
    window: usize,
    attempts: usize,
) -> Result<Option<(SeqEmbedding<F>, Vec<GaussianAlgebraic>)>, SeqError> {
    let mut data = ring.action().to_vec();
    data.extend(ring.cocycle().iter().cloned());
    for emb in SeqEmbedding::clean_base_points(ring.phi().clone(), &data, window).take(attempts) {
        if let RealInitial::Found(c) = real_initial(ring, &emb)? {
            return Ok(Some((emb, c)));
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Part {
    Re,
    Im,
}

/// `V = U B` with every computed term real.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RealRealization {
    /// Source of each column of `V(0)`: part of a column of `U(0)`.
    pub columns: Vec<(usize, Part)>,
    pub b: Vec<Vec<GaussianAlgebraic>>,
    pub terms: Vec<Vec<Vec<RealAlgebraic>>>,
}

/// Builds a real fundamental matrix from the computed terms of `U`: picks
/// `n` real-independent real or imaginary parts of the columns of `U(0)`,
/// sets `B = U(0)^{-1} C`, and checks that every `U(k) B` is real.
pub fn realize_real(
    terms: &[Vec<Vec<GaussianAlgebraic>>],
) -> Result<RealRealization, SeqError> {
    let u0 = &terms[0];
    let n = u0.len();
    let mut columns = Vec::new();
    let mut chosen: Vec<Vec<RealAlgebraic>> = Vec::new();
    'outer: for j in 0..n {
        for part in [Part::Re, Part::Im] {
            if chosen.len() == n {
                break 'outer;
            }
            let v: Vec<RealAlgebraic> = u0
                .iter()
                .map(|row| match part {
                    Part::Re => row[j].re.clone(),
                    Part::Im => row[j].im.clone(),
                })
                .collect();
            let mut trial = chosen.clone();
            trial.push(v.clone());
            if rank(&trial) == trial.len() {
                chosen = trial;
                columns.push((j, part));
            }
        }
    }
    assert_eq!(chosen.len(), n, "U(0) is singular");
    let c: Vec<Vec<GaussianAlgebraic>> = (0..n)
        .map(|i| (0..n).map(|j| GaussianAlgebraic::real(chosen[j][i].clone())).collect())
        .collect();
    let inv = inverse(u0).expect("U(0) is singular");
    let b = mat_mul(&inv, &c);
    let mut real_terms = Vec::with_capacity(terms.len());
    for (index, u) in terms.iter().enumerate() {
        let v = mat_mul(u, &b);
        if v.iter().flatten().any(|z| !z.is_real()) {
            return Err(SeqError::NotReal { index });
        }
        real_terms.push(
            v.into_iter()
                .map(|row| row.into_iter().map(|z| z.re).collect())
                .collect(),
        );
    }
    Ok(RealRealization {
        columns,
        b,
        terms: real_terms,
    })
}

fn rank<K: Field>(rows: &[Vec<K>]) -> usize {
    let mut a = rows.to_vec();
    let cols = a.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..a.len() {
            if !a[i][c].is_zero() {
                let f = a[i][c].clone() / a[r][c].clone();
                for k in c..cols {
                    let t = f.clone() * a[r][k].clone();
                    a[i][k] = a[i][k].clone() - t;
                }
            }
        }
        r += 1;
    }
    r
}

fn inverse<K: Field>(m: &[Vec<K>]) -> Option<Vec<Vec<K>>> {
    let n = m.len();
    let mut a: Vec<Vec<K>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { K::one() } else { K::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, p);
        let piv = a[c][c].inv()?;
        for k in 0..2 * n {
            a[c][k] = a[c][k].clone() * piv.clone();
        }
        for i in 0..n {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for k in 0..2 * n {
                    let t = f.clone() * a[c][k].clone();
                    a[i][k] = a[i][k].clone() - t;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

fn mat_mul<K: Field>(a: &[Vec<K>], b: &[Vec<K>]) -> Vec<Vec<K>> {
    a.iter()
        .map(|row| {
            (0..b.first().map_or(0, |r| r.len()))
                .map(|j| {
                    row.iter()
                        .zip(b)
                        .fold(K::zero(), |acc, (x, brow)| acc + x.clone() * brow[j].clone())
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcfield::parse_ratfunc;
    use crate::RatFunc;

    fn rf(s: &str) -> RatFunc {
        parse_ratfunc(s).unwrap()
    }

    fn g(n: i64) -> GaussianAlgebraic {
        GaussianAlgebraic::from_integer(n)
    }

    fn shift() -> Automorphism<RealAlgebraic> {
        Automorphism::shift(RealAlgebraic::one()).unwrap()
    }

    fn dil2() -> Automorphism<RealAlgebraic> {
        Automorphism::dilation(RealAlgebraic::from_integer(2)).unwrap()
    }

    fn head<F: ConstField>(g: &Germ<F>, k: usize) -> Vec<String> {
        g.terms().take(k).map(|(_, v)| v.to_string()).collect()
    }

    #[test]
    fn base_examples() {
        let e = SeqEmbedding::standard(shift());
        assert_eq!(head(&embed_base(&e, &rf("x")), 3), ["1", "2", "3"]);
        let d = SeqEmbedding::standard(dil2());
        assert_eq!(head(&embed_base(&d, &rf("x")), 4), ["1", "2", "4", "8"]);
        let p = embed_base(&e, &rf("1/(x-3)"));
        assert_eq!(p.defined_from, 3);
        assert_eq!(head(&p, 2), ["1", "1/2"]);
        assert_eq!(p.value(2), None);
    }

    #[test]
    fn orbit_zeros_for_dilations() {
        let d = SeqEmbedding::standard(dil2());
        let p = rf("(x-8)*(x+4)*(x-1/2)");
        assert_eq!(d.orbit_zeros(p.numer()), vec![3]);
        let q = Automorphism::dilation(RealAlgebraic::from_ratio(1, 3)).unwrap();
        let e = SeqEmbedding::standard(q);
        assert_eq!(e.orbit_zeros(rf("x^2-1/81").numer()), vec![2]);
    }

    #[test]
    fn avoiding_picks_clean_orbit() {
        let e = SeqEmbedding::avoiding(shift(), &[rf("1/(x-3)")], 10);
        assert_eq!(e.x0, RealAlgebraic::from_integer(4));
        assert_eq!(e.defined_from(), 0);
    }

    #[test]
    fn ex1_solutions() {
        let r1 = crate::diffring::tests::ex1_ring(1);
        let emb = SeqEmbedding::new(dil2(), RealAlgebraic::one(), 12).unwrap();
        let s1 = embed_ring(&r1, &emb, &[g(1)]).unwrap();
        let u = s1.entry(0);
        assert!(u.is_real());
        let sqrt2 = RealAlgebraic::from_integer(2).nth_root(2).unwrap();
        let mut oracle = RealAlgebraic::one();
        for (n, v) in u.terms() {
            assert_eq!(v, &GaussianAlgebraic::real(oracle.clone()), "n = {n}");
            oracle = oracle * sqrt2.clone();
        }
        assert_eq!(germ_equal(&u.mul(&u), &embed_base(&emb, &rf("x"))), GermEquality::Certified);
        assert!(s1.embedding().verify_recurrence());

        let r2 = crate::diffring::tests::ex1_ring(-1);
        let s2 = embed_ring(&r2, &emb, &[GaussianAlgebraic::i()]).unwrap();
        let v = s2.entry(0);
        assert!(v.terms().all(|(_, z)| z.re.is_zero() && !z.im.is_zero()));
        let minus_x = embed_base(&emb, &rf("-x"));
        assert_eq!(germ_equal(&v.mul(&v), &minus_x), GermEquality::Certified);
    }

    #[test]
    fn torsion_violation_is_reported() {
        let r2 = crate::diffring::tests::ex1_ring(-1);
        let emb = SeqEmbedding::standard(dil2());
        let err = embed_ring(&r2, &emb, &[g(1)]).unwrap_err();
        assert!(matches!(err, SeqError::Torsion { relation, .. } if relation == vec![2]));
    }

    #[test]
    fn identity_gives_constant_germ() {
        let r = DiffRingPresentation::new(shift(), vec![rf("1")], vec![]).unwrap();
        let emb = SeqEmbedding::new(shift(), RealAlgebraic::one(), 8).unwrap();
        let c = GaussianAlgebraic::new(RealAlgebraic::from_integer(3), RealAlgebraic::one());
        let s = embed_ring(&r, &emb, std::slice::from_ref(&c)).unwrap();
        assert!(s.entry(0).terms().all(|(_, v)| v == &c));
    }

    #[test]
    fn equality_verdicts() {
        let e = SeqEmbedding::new(shift(), RealAlgebraic::one(), 10).unwrap();
        let f = embed_base(&e, &rf("x^2+1"));
        assert_eq!(germ_equal(&f, &embed_base(&e, &rf("x^2+1"))), GermEquality::Certified);
        assert_eq!(germ_equal(&f, &f.with_value(0, g(7))), GermEquality::Certified);
        let plain = Germ::from_values(0, f.terms().map(|(_, v)| v.clone()).collect());
        assert_eq!(germ_equal(&f, &plain), GermEquality::Probably);
        assert_eq!(
            germ_equal(&f, &embed_base(&e, &rf("x^2"))),
            GermEquality::NotEqual { index: 0 }
        );
    }

    #[test]
    fn shift_matches_phi() {
        let e = SeqEmbedding::new(dil2(), RealAlgebraic::from_integer(3), 10).unwrap();
        let f = rf("(x+1)/(x-5)");
        let lhs = embed_base(&e, &e.phi.apply(&f, 1));
        assert_eq!(germ_equal(&lhs, &embed_base(&e, &f).shifted()), GermEquality::Certified);
    }

    #[test]
    fn morphism_on_ex1() {
        let r1 = crate::diffring::tests::ex1_ring(1);
        let emb = SeqEmbedding::new(dil2(), RealAlgebraic::one(), 6).unwrap();
        let s = embed_ring(&r1, &emb, &[g(1)]).unwrap();
        let rep = s.check_morphism(2);
        assert!(rep.passed(), "{:?}", rep.failures);
        assert!(rep.checked > 10);
    }

    #[test]
    fn realize_examples() {
        let emb = SeqEmbedding::new(dil2(), RealAlgebraic::one(), 5).unwrap();
        let r2 = crate::diffring::tests::ex1_ring(-1);
        let s2 = embed_ring(&r2, &emb, &[GaussianAlgebraic::i()]).unwrap();
        let rr = realize_real(&s2.matrices()).unwrap();
        assert_eq!(rr.b, vec![vec![-GaussianAlgebraic::i()]]);

        let r1 = crate::diffring::tests::ex1_ring(1);
        let s1 = embed_ring(&r1, &emb, &[g(1)]).unwrap();
        assert_eq!(realize_real(&s1.matrices()).unwrap().b, vec![vec![g(1)]]);

        let both = r1.tensor(&r2).unwrap();
        let s = embed_ring(&both, &emb, &[g(1), GaussianAlgebraic::i()]).unwrap();
        let rr = realize_real(&s.matrices()).unwrap();
        assert_eq!(rr.b, vec![vec![g(1), g(0)], vec![g(0), -GaussianAlgebraic::i()]]);
        assert_eq!(rr.columns, vec![(0, Part::Re), (1, Part::Im)]);
    }

    #[test]
    fn real_initial_search() {
        let r1 = crate::diffring::tests::ex1_ring(1);
        let emb = SeqEmbedding::standard(dil2());
        assert_eq!(real_initial(&r1, &emb).unwrap(), RealInitial::Found(vec![g(1)]));
        let r2 = crate::diffring::tests::ex1_ring(-1);
        assert_eq!(real_initial(&r2, &emb).unwrap(), RealInitial::Exhausted { tried: 4 });
        let sq = DiffRingPresentation::new(shift(), vec![rf("-1")], vec![(vec![2], rf("-1"))])
            .unwrap();
        let e = SeqEmbedding::standard(shift());
        assert_eq!(real_initial(&sq, &e).unwrap(), RealInitial::Exhausted { tried: 4 });
        let (emb, c) = real_base_point(&r2, 5, 4).unwrap().unwrap();
        assert_eq!(emb.x0, RealAlgebraic::from_integer(-1));
        assert_eq!(c, vec![g(1)]);
        assert!(embed_ring(&r2, &emb, &c).unwrap().entry(0).is_real());
        let cube = DiffRingPresentation::new(shift(), vec![rf("1")], vec![(vec![3], rf("-8"))])
            .unwrap();
        assert_eq!(real_initial(&cube, &e).unwrap(), RealInitial::Found(vec![g(-2)]));
    }
}
