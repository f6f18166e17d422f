//! Difference rings presented as twisted Laurent group algebras
//! `k[T^{±1}]/(T^m - h_m : m in L)` over `(k, phi)`, with `phi(T_j) = a_j T_j`.

mod constants;
mod idempotents;

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::field::ConstField;
use crate::funcfield::{monomial_value, Automorphism, RationalFunction};
use crate::lattice::{coords_in, direct_sum, hnf_with_transform, pivots, Matrix, Vector};
use crate::numbers::{GaussianAlgebraic, RealAlgebraic};

pub use constants::{
    constants, falsify_simplicity, ConstantsBasis, ExtraConstant, HarnessBounds, HarnessReport,
    StableIdeal,
};
pub use idempotents::{
    adjoin_i, find_idempotents, has_sqrt_minus_one, is_real_ring, AdjoinedI, Cut,
    IdempotentDecomposition, IdempotentError, Realness, SqrtMinusOne, TORSION_BOUND,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DiffRingError {
    #[error("action has {action} entries but the lattice lives in Z^{n}")]
    Dimension { n: usize, action: usize },
    #[error("diagonal entry {0} is zero")]
    ZeroEntry(usize),
    #[error("relation {m:?}: phi(h)/h differs from the action")]
    NotStable { m: Vector },
    #[error("relation generators are inconsistent along {m:?}")]
    Inconsistent { m: Vector },
    #[error("rings over different base difference fields")]
    BaseMismatch,
}

/// `k[T^{±1}]/(T^m - h_m : m in L)`.
#[derive(Clone, PartialEq)]
pub struct DiffRingPresentation<F: ConstField> {
    phi: Automorphism<F>,
    action: Vec<RationalFunction<F>>,
    lattice: Matrix,
    cocycle: Vec<RationalFunction<F>>,
}

pub type RealRing = DiffRingPresentation<RealAlgebraic>;
pub type ComplexRing = DiffRingPresentation<GaussianAlgebraic>;

/// A reduced element: coefficients on the coset representatives of `Z^n/L`
/// cut out by the HNF of `L`.
#[derive(Clone, PartialEq)]
pub struct RingElement<F: ConstField> {
    terms: BTreeMap<Vector, RationalFunction<F>>,
}

impl<F: ConstField> RingElement<F> {
    pub fn terms(&self) -> &BTreeMap<Vector, RationalFunction<F>> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn support_size(&self) -> usize {
        self.terms.len()
    }

    /// The coefficient when `self` lies in `k`.
    pub fn as_scalar(&self) -> Option<RationalFunction<F>> {
        match self.terms.len() {
            0 => Some(RationalFunction::zero()),
            1 => self
                .terms
                .iter()
                .next()
                .filter(|(m, _)| m.iter().all(|&e| e == 0))
                .map(|(_, c)| c.clone()),
            _ => None,
        }
    }

    pub fn map<G: ConstField>(&self, f: impl Fn(&F) -> G) -> RingElement<G> {
        RingElement {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.map(&f))).collect(),
        }
    }

    /// Textual form with generators `T1..Tn`.
    pub fn fmt_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut parts: Vec<String> = Vec::new();
        for (m, c) in &self.terms {
            let mono = monomial_text(m);
            let coeff = c.to_string();
            let term = match (mono.is_empty(), coeff.as_str()) {
                (true, _) => coeff,
                (false, "1") => mono,
                (false, "-1") => format!("-{mono}"),
                (false, _) if c.numer().coeffs().len() > 1 && c.denom().deg() == 0 => {
                    format!("({coeff})*{mono}")
                }
                (false, _) => format!("{coeff}*{mono}"),
            };
            parts.push(term);
        }
        let mut out = parts[0].clone();
        for p in &parts[1..] {
            match p.strip_prefix('-') {
                Some(rest) => {
                    out.push_str(" - ");
                    out.push_str(rest);
                }
                None => {
                    out.push_str(" + ");
                    out.push_str(p);
                }
            }
        }
        out
    }
}

/// `T1^2*T3^-1` style rendering; empty for the unit monomial.
pub fn monomial_text(m: &[i64]) -> String {
    let mut parts = Vec::new();
    for (j, &e) in m.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(format!("T{}", j + 1)),
            _ => parts.push(format!("T{}^{}", j + 1, e)),
        }
    }
    parts.join("*")
}

impl<F: ConstField> fmt::Display for RingElement<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_text())
    }
}

impl<F: ConstField> fmt::Debug for RingElement<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_text())
    }
}

impl<F: ConstField> Serialize for RingElement<F> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.fmt_text())
    }
}

impl<F: ConstField> DiffRingPresentation<F> {
    /// The ring `k` itself (`n = 0`).
    pub fn base(phi: Automorphism<F>) -> Self {
        DiffRingPresentation {
            phi,
            action: Vec::new(),
            lattice: Vec::new(),
            cocycle: Vec::new(),
        }
    }

    /// Builds the presentation from relation generators `T^m = h`. The
    /// cocycle is transported to the HNF basis and checked for consistency
    /// and phi-stability.
    pub fn new(
        phi: Automorphism<F>,
        action: Vec<RationalFunction<F>>,
        relations: Vec<(Vector, RationalFunction<F>)>,
    ) -> Result<Self, DiffRingError> {
        let n = action.len();
        if let Some(j) = action.iter().position(|a| a.is_zero()) {
            return Err(DiffRingError::ZeroEntry(j));
        }
        for (m, _) in &relations {
            if m.len() != n {
                return Err(DiffRingError::Dimension { n: m.len(), action: n });
            }
        }
        if let Some((m, _)) = relations.iter().find(|(_, h)| h.is_zero()) {
            return Err(DiffRingError::Inconsistent { m: m.clone() });
        }
        let rows: Matrix = relations.iter().map(|(m, _)| m.clone()).collect();
        let (h, u) = hnf_with_transform(&rows, n);
        let hs: Vec<RationalFunction<F>> = relations.into_iter().map(|(_, h)| h).collect();
        let combine = |coeffs: &[i64]| monomial_value(&hs, coeffs);
        let cocycle: Vec<RationalFunction<F>> = u[..h.len()].iter().map(|c| combine(c)).collect();
        for c in &u[h.len()..] {
            if !combine(c).is_one() {
                let m = c.clone();
                return Err(DiffRingError::Inconsistent { m });
            }
        }
        let ring = DiffRingPresentation {
            phi,
            action,
            lattice: h,
            cocycle,
        };
        ring.verify_stability()?;
        Ok(ring)
    }

    /// Re-checks `phi(h_b) = a^b h_b` on every basis row.
    pub fn verify_stability(&self) -> Result<(), DiffRingError> {
        for (b, h) in self.lattice.iter().zip(&self.cocycle) {
            let lhs = self.phi.apply(h, 1);
            let rhs = &monomial_value(&self.action, b) * h;
            if lhs != rhs {
                return Err(DiffRingError::NotStable { m: b.clone() });
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.action.len()
    }

    pub fn phi(&self) -> &Automorphism<F> {
        &self.phi
    }

    pub fn action(&self) -> &[RationalFunction<F>] {
        &self.action
    }

    /// HNF basis of `L`.
    pub fn lattice(&self) -> &Matrix {
        &self.lattice
    }

    /// `h_b` for each HNF basis row `b`.
    pub fn cocycle(&self) -> &[RationalFunction<F>] {
        &self.cocycle
    }

    /// `h_m` for `m in L`.
    pub fn cocycle_at(&self, m: &[i64]) -> Option<RationalFunction<F>> {
        if self.lattice.is_empty() {
            return m.iter().all(|&e| e == 0).then(RationalFunction::one);
        }
        let c = coords_in(&self.lattice, m)?;
        Some(monomial_value(&self.cocycle, &c))
    }

    /// `a^m`.
    pub fn action_power(&self, m: &[i64]) -> RationalFunction<F> {
        monomial_value(&self.action, m)
    }

    /// Reduces `T^m` to `c * T^r` with `r` the canonical representative.
    pub fn reduce_exponent(&self, m: &[i64]) -> (Vector, RationalFunction<F>) {
        let mut r = m.to_vec();
        let mut c = RationalFunction::one();
        if self.lattice.is_empty() {
            return (r, c);
        }
        for ((row, p), h) in self.lattice.iter().zip(pivots(&self.lattice)).zip(&self.cocycle) {
            let q = Integer::div_floor(&r[p], &row[p]);
            if q != 0 {
                for (x, y) in r.iter_mut().zip(row) {
                    *x -= q * y;
                }
                c = &c * &h.pow(q);
            }
        }
        (r, c)
    }

    pub fn normal_form(
        &self,
        terms: impl IntoIterator<Item = (Vector, RationalFunction<F>)>,
    ) -> RingElement<F> {
        let mut out: BTreeMap<Vector, RationalFunction<F>> = BTreeMap::new();
        for (m, c) in terms {
            if c.is_zero() {
                continue;
            }
            let (r, f) = self.reduce_exponent(&m);
            let v = &c * &f;
            match out.get_mut(&r) {
                Some(acc) => *acc = &*acc + &v,
                None => {
                    out.insert(r, v);
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        RingElement { terms: out }
    }

    pub fn zero(&self) -> RingElement<F> {
        RingElement {
            terms: BTreeMap::new(),
        }
    }

    pub fn one(&self) -> RingElement<F> {
        self.scalar(RationalFunction::one())
    }

    pub fn scalar(&self, c: RationalFunction<F>) -> RingElement<F> {
        self.normal_form([(vec![0; self.n()], c)])
    }

    pub fn constant(&self, c: F) -> RingElement<F> {
        self.scalar(RationalFunction::constant(c))
    }

    pub fn monomial(&self, m: &[i64]) -> RingElement<F> {
        self.normal_form([(m.to_vec(), RationalFunction::one())])
    }

    /// The generator `T_{j+1}`.
    pub fn generator(&self, j: usize) -> RingElement<F> {
        let mut m = vec![0; self.n()];
        m[j] = 1;
        self.monomial(&m)
    }

    pub fn add(&self, x: &RingElement<F>, y: &RingElement<F>) -> RingElement<F> {
        let mut terms = x.terms.clone();
        for (m, c) in &y.terms {
            match terms.get_mut(m) {
                Some(acc) => *acc = &*acc + c,
                None => {
                    terms.insert(m.clone(), c.clone());
                }
            }
        }
        terms.retain(|_, c| !c.is_zero());
        RingElement { terms }
    }

    pub fn neg(&self, x: &RingElement<F>) -> RingElement<F> {
        RingElement {
            terms: x.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, x: &RingElement<F>, y: &RingElement<F>) -> RingElement<F> {
        self.add(x, &self.neg(y))
    }

    pub fn scale(&self, x: &RingElement<F>, c: &RationalFunction<F>) -> RingElement<F> {
        if c.is_zero() {
            return self.zero();
        }
        RingElement {
            terms: x.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn mul(&self, x: &RingElement<F>, y: &RingElement<F>) -> RingElement<F> {
        let mut prods = Vec::with_capacity(x.terms.len() * y.terms.len());
        for (m1, c1) in &x.terms {
            for (m2, c2) in &y.terms {
                let m: Vector = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                prods.push((m, c1 * c2));
            }
        }
        self.normal_form(prods)
    }

    pub fn pow(&self, x: &RingElement<F>, e: u32) -> RingElement<F> {
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.mul(&acc, x);
        }
        acc
    }

    /// `phi^p(x)`: `phi(c T^m) = phi(c) a^m T^m`.
    pub fn apply_phi(&self, x: &RingElement<F>, p: i64) -> RingElement<F> {
        let terms = x.terms.iter().map(|(m, c)| {
            let am = self.action_power(m);
            let mut factor = RationalFunction::one();
            if p > 0 {
                for i in 0..p {
                    factor = &factor * &self.phi.apply(&am, i);
                }
            } else {
                for i in p..0 {
                    factor = &factor / &self.phi.apply(&am, i);
                }
            }
            (m.clone(), &self.phi.apply(c, p) * &factor)
        });
        RingElement {
            terms: terms.collect(),
        }
    }

    /// Writes `x = c * T^m` with `c` in `{1, -1}` and a small exponent in
    /// the coset of the support, when such a monomial exists. Prefers the
    /// smallest `|m|_1`, then a positive leading exponent.
    pub fn monomial_representative(&self, x: &RingElement<F>, radius: i64) -> Option<(i64, Vector)> {
        if x.terms.len() != 1 {
            return None;
        }
        let (r, c) = x.terms.iter().next().unwrap();
        let n = self.n();
        let mut best: Option<(i64, Vector, i64)> = None;
        for m in box_points(n, radius) {
            let (rm, f) = self.reduce_exponent(&m);
            if &rm != r {
                continue;
            }
            let sign = if f == *c {
                1
            } else if f == -c {
                -1
            } else {
                continue;
            };
            let norm: i64 = m.iter().map(|e| e.abs()).sum();
            let lead_pos = m.iter().find(|&&e| e != 0).is_none_or(|&e| e > 0);
            let better = match &best {
                None => true,
                Some((bn, bm, _)) => {
                    let blead = bm.iter().find(|&&e| e != 0).is_none_or(|&e| e > 0);
                    (norm, !lead_pos) < (*bn, !blead)
                }
            };
            if better {
                best = Some((norm, m, sign));
            }
        }
        best.map(|(_, m, s)| (s, m))
    }

    /// `R1 ⊗_k R2` on `Z^{n1+n2}`.
    pub fn tensor(&self, other: &Self) -> Result<Self, DiffRingError> {
        if self.phi != other.phi {
            return Err(DiffRingError::BaseMismatch);
        }
        let (n1, n2) = (self.n(), other.n());
        let mut action = self.action.clone();
        action.extend(other.action.iter().cloned());
        let mut rels = Vec::new();
        for (b, h) in self.lattice.iter().zip(&self.cocycle) {
            let mut m = b.clone();
            m.extend(std::iter::repeat_n(0, n2));
            rels.push((m, h.clone()));
        }
        for (b, h) in other.lattice.iter().zip(&other.cocycle) {
            let mut m = vec![0; n1];
            m.extend(b.iter().copied());
            rels.push((m, h.clone()));
        }
        let ring = Self::new(self.phi.clone(), action, rels)?;
        debug_assert_eq!(
            ring.lattice,
            direct_sum(&self.lattice, n1, &other.lattice, n2)
        );
        Ok(ring)
    }

    /// Maps the constants (e.g. into `C[i]`).
    pub fn map<G: ConstField>(&self, f: impl Fn(&F) -> G) -> DiffRingPresentation<G> {
        DiffRingPresentation {
            phi: self.phi.map(&f),
            action: self.action.iter().map(|a| a.map(&f)).collect(),
            lattice: self.lattice.clone(),
            cocycle: self.cocycle.iter().map(|h| h.map(&f)).collect(),
        }
    }

    /// Scalar extension to `k[i]` (no convention applied).
    pub fn complexify(&self) -> ComplexRing {
        self.map(|c| c.to_gaussian())
    }

    /// The relations as `T^m = h` text lines.
    pub fn relations_text(&self) -> Vec<String> {
        self.lattice
            .iter()
            .zip(&self.cocycle)
            .map(|(b, h)| format!("{} = {}", monomial_text(b), h))
            .collect()
    }
}

/// Integer points of `[-r, r]^n` in lexicographic order.
pub(crate) fn box_points(n: usize, r: i64) -> Vec<Vector> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for p in &out {
            for e in -r..=r {
                let mut q = p.clone();
                q.push(e);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

impl<F: ConstField> fmt::Debug for DiffRingPresentation<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} a=[", self.phi)?;
        for (j, a) in self.action.iter().enumerate() {
            if j > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "] relations={:?}", self.relations_text())
    }
}

#[derive(Serialize)]
#[serde(bound = "")]
struct PresentationJson<'a, F: ConstField> {
    phi: &'a Automorphism<F>,
    action: &'a [RationalFunction<F>],
    lattice: &'a Matrix,
    cocycle: &'a [RationalFunction<F>],
}

impl<F: ConstField> Serialize for DiffRingPresentation<F> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PresentationJson {
            phi: &self.phi,
            action: &self.action,
            lattice: &self.lattice,
            cocycle: &self.cocycle,
        }
        .serialize(s)
    }
}
