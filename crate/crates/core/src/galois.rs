//! The difference Galois group of a presented PV ring, described by its
//! character lattice, and the Galois correspondence on monomial rings.
//!
//! `G = {t in (C[i]^*)^n : t^m = 1 for m in L}` acts by `T_j -> t_j T_j`.
//! A subgroup is given by a lattice `M ⊇ L`, the intermediate ring it fixes
//! by the monomials `T^m`, `m in M`.

use std::fmt;

use num_traits::One;
use serde::Serialize;

use crate::diffring::{monomial_text, RingElement};
use crate::field::{ConstField, Field};
use crate::lattice::{hnf, is_sublattice, saturation, superlattices_of_bounded_index, Matrix, Smith, Vector};
use crate::numbers::GaussianAlgebraic;
use crate::pv::PVExtension;

/// Default bound on `[Z^n : M]` for subgroup enumeration.
pub const SUBGROUP_INDEX_BOUND: i64 = 12;

/// Orders whose primitive roots of unity are used for sampling.
const SAMPLE_ORDERS: [i64; 11] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GaloisError {
    #[error("t^{m:?} != 1: element is not in the group")]
    NotMember { m: Vector },
    #[error("element has {got} coordinates, expected {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("lattice {0:?} does not contain the relation lattice")]
    NotContainingL(Matrix),
    #[error("action check failed on relation {0:?}")]
    ActionFailed(Vector),
}

fn describe(smith: &Smith) -> String {
    let mut parts: Vec<String> = smith
        .invariant_factors()
        .iter()
        .map(|d| format!("mu_{d}"))
        .collect();
    match smith.torus_rank() {
        0 => {}
        1 => parts.push("Gm".into()),
        f => parts.push(format!("Gm^{f}")),
    }
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join(" x ")
    }
}

/// A diagonalizable group `{t : t^m = 1, m in M}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Subgroup {
    #[serde(rename = "lattice_basis")]
    pub lattice: Matrix,
    pub invariant_factors: Vector,
    pub torus_rank: usize,
}

impl Subgroup {
    pub fn from_lattice(m: &[Vector], n: usize) -> Self {
        let lattice = hnf(m, n);
        let smith = Smith::of(&lattice, n);
        Subgroup {
            invariant_factors: smith.invariant_factors(),
            torus_rank: smith.torus_rank(),
            lattice,
        }
    }

    /// `mu_2 x Gm` style name.
    pub fn describe(&self, n: usize) -> String {
        describe(&Smith::of(&self.lattice, n))
    }

    /// Defining equations `t^m = 1`, one per basis row.
    pub fn equations_text(&self) -> Vec<String> {
        self.lattice
            .iter()
            .map(|m| {
                let t = monomial_text(m).replace('T', "t");
                format!("{} = 1", if t.is_empty() { "1".into() } else { t })
            })
            .collect()
    }

    /// Every equation is `t^m - 1`, with coefficients in `{1, -1}`.
    pub fn defined_over_c(&self) -> bool {
        self.equations_text().iter().all(|e| {
            e.chars()
                .all(|c| c.is_ascii_digit() || "t*^-= 1".contains(c))
        })
    }

    /// Exact membership test.
    pub fn check(&self, t: &[GaussianAlgebraic]) -> Result<(), GaloisError> {
        for m in &self.lattice {
            if m.len() != t.len() {
                return Err(GaloisError::Dimension {
                    expected: m.len(),
                    got: t.len(),
                });
            }
            if !power(t, m).is_one() {
                return Err(GaloisError::NotMember { m: m.clone() });
            }
        }
        Ok(())
    }

    /// Group order, `None` for a positive-dimensional group.
    pub fn order(&self) -> Option<i64> {
        (self.torus_rank == 0).then(|| self.invariant_factors.iter().product())
    }
}

/// `t^m`.
pub fn power(t: &[GaussianAlgebraic], m: &[i64]) -> GaussianAlgebraic {
    t.iter()
        .zip(m)
        .fold(GaussianAlgebraic::one(), |acc, (x, &e)| &acc * &x.pow_i64(e))
}

/// The Galois group of a PV extension, with its ambient dimension.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GaloisGroup {
    pub n: usize,
    #[serde(flatten)]
    pub group: Subgroup,
}

impl fmt::Display for GaloisGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.group.describe(self.n))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupElement {
    pub t: Vec<GaussianAlgebraic>,
}

pub fn compute_galois_group<F: ConstField>(pv: &PVExtension<F>) -> GaloisGroup {
    let n = pv.ring.n();
    GaloisGroup {
        n,
        group: Subgroup::from_lattice(pv.ring.lattice(), n),
    }
}

/// `T^m c -> t^m T^m c` on the complexified ring.
pub fn act<F: ConstField>(
    pv: &PVExtension<F>,
    g: &GroupElement,
    x: &RingElement<GaussianAlgebraic>,
) -> RingElement<GaussianAlgebraic> {
    let rc = pv.ring.map(|c| c.to_gaussian());
    rc.normal_form(x.terms().iter().map(|(m, c)| {
        let s = crate::funcfield::RationalFunction::constant(power(&g.t, m));
        (m.clone(), c * &s)
    }))
}

/// `U^{-1} g(U) = diag(t)`, after checking that `g` respects every
/// defining relation and commutes with `phi`.
pub fn rho_u<F: ConstField>(
    pv: &PVExtension<F>,
    g: &GroupElement,
) -> Result<Vec<GaussianAlgebraic>, GaloisError> {
    let group = compute_galois_group(pv);
    group.group.check(&g.t)?;
    let rc = pv.ring.map(|c| c.to_gaussian());
    let n = rc.n();
    for (b, h) in rc.lattice().iter().zip(rc.cocycle()) {
        // g(T^b) - h_b as a formal combination reduces to zero.
        let image = rc.normal_form([
            (b.clone(), crate::funcfield::RationalFunction::constant(power(&g.t, b))),
            (vec![0; n], -h),
        ]);
        if !image.is_zero() {
            return Err(GaloisError::ActionFailed(b.clone()));
        }
    }
    for j in 0..n {
        let tj = rc.generator(j);
        let lhs = rc.apply_phi(&act(pv, g, &tj), 1);
        let rhs = act(pv, g, &rc.apply_phi(&tj, 1));
        if lhs != rhs {
            return Err(GaloisError::ActionFailed(tj.terms().keys().next().cloned().unwrap_or_default()));
        }
    }
    Ok(g.t.clone())
}

/// Generators and a few products: a primitive root of unity on each
/// torsion Smith direction, `2` and `1 + i` on each free one.
pub fn sample_elements(group: &GaloisGroup) -> Vec<GroupElement> {
    let n = group.n;
    let smith = Smith::of(&group.group.lattice, n);
    let build = |v: &[GaussianAlgebraic]| -> GroupElement {
        let t = (0..n)
            .map(|j| {
                (0..n).fold(GaussianAlgebraic::one(), |acc, i| {
                    &acc * &v[i].pow_i64(smith.to_coords[j][i])
                })
            })
            .collect();
        GroupElement { t }
    };
    let one = vec![GaussianAlgebraic::one(); n];
    let mut out = vec![build(&one)];
    let free_values = [
        GaussianAlgebraic::from_integer(2),
        GaussianAlgebraic::new(crate::RealAlgebraic::from_integer(1), crate::RealAlgebraic::from_integer(1)),
    ];
    for i in 0..n {
        let d = smith.factors[i];
        let values: Vec<GaussianAlgebraic> = match d {
            0 => free_values.to_vec(),
            1 => Vec::new(),
            d if SAMPLE_ORDERS.contains(&d) => vec![GaussianAlgebraic::root_of_unity(d as u32, 1)],
            _ => Vec::new(),
        };
        for v in values {
            let mut vs = one.clone();
            vs[i] = v;
            out.push(build(&vs));
        }
    }
    out
}

/// An intermediate ring: fractions of the `k`-span of `T^m`, `m in M`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntermediateRing {
    #[serde(rename = "exponent_lattice")]
    pub lattice: Matrix,
    pub name: String,
}

impl IntermediateRing {
    fn new(m: &[Vector], pv_lattice: &[Vector], n: usize) -> Self {
        let lattice = hnf(m, n);
        let name = if lattice == hnf(&crate::lattice::identity(n), n) {
            "K".to_string()
        } else if lattice == hnf(pv_lattice, n) {
            "k".to_string()
        } else {
            let gens: Vec<String> = lattice
                .iter()
                .filter(|r| !crate::lattice::contains(pv_lattice, r))
                .map(|r| monomial_text(r))
                .collect();
            format!("k({})", gens.join(", "))
        };
        IntermediateRing { lattice, name }
    }
}

fn ensure_contains_l<F: ConstField>(pv: &PVExtension<F>, m: &[Vector]) -> Result<(), GaloisError> {
    if is_sublattice(pv.ring.lattice(), m) {
        Ok(())
    } else {
        Err(GaloisError::NotContainingL(m.to_vec()))
    }
}

/// `K^H`: the monomials fixed by the generators of `H` (a primitive
/// `d_i`-th root of unity on each torsion Smith direction of `H`'s lattice,
/// a generic scalar on each free one).
pub fn fixed_ring<F: ConstField>(pv: &PVExtension<F>, h: &Subgroup) -> Result<IntermediateRing, GaloisError> {
    ensure_contains_l(pv, &h.lattice)?;
    let n = pv.ring.n();
    let smith = Smith::of(&h.lattice, n);
    // T^m with Smith coordinates c is fixed iff d_i | c_i for every i,
    // where a free direction (d_i = 0) forces c_i = 0.
    let fixed: Matrix = (0..n)
        .filter(|&i| smith.factors[i] != 0)
        .map(|i| smith.basis[i].iter().map(|x| x * smith.factors[i]).collect())
        .collect();
    Ok(IntermediateRing::new(&fixed, pv.ring.lattice(), n))
}

/// `G(K/F)`: the elements fixing every monomial generator of `F`.
pub fn group_of<F: ConstField>(pv: &PVExtension<F>, ring: &IntermediateRing) -> Result<Subgroup, GaloisError> {
    ensure_contains_l(pv, &ring.lattice)?;
    let n = pv.ring.n();
    let mut rows = pv.ring.lattice().clone();
    rows.extend(ring.lattice.iter().cloned());
    Ok(Subgroup::from_lattice(&rows, n))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorrespondenceRow {
    pub subgroup: Subgroup,
    pub subgroup_name: String,
    /// `K^H`.
    pub fixed_ring: IntermediateRing,
    /// `G(K/K^H)`.
    pub group_of_fixed: Subgroup,
    /// `K^{G(K/K^H)}`.
    pub ring_of_group: IntermediateRing,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorrespondenceReport {
    pub index_bound: i64,
    pub rows: Vec<CorrespondenceRow>,
    pub violations: usize,
    pub scope: String,
}

/// Subgroups given by `L`, `sat(L)` and the full-rank `M ⊇ L` of index at
/// most `bound`.
pub fn enumerate_subgroups<F: ConstField>(pv: &PVExtension<F>, bound: i64) -> Vec<Subgroup> {
    let n = pv.ring.n();
    let l = pv.ring.lattice();
    let mut lattices: Vec<Matrix> = vec![hnf(l, n), saturation(l, n)];
    lattices.extend(superlattices_of_bounded_index(l, n, bound));
    let mut out: Vec<Subgroup> = Vec::new();
    for m in lattices {
        let s = Subgroup::from_lattice(&m, n);
        if !out.contains(&s) {
            out.push(s);
        }
    }
    out
}

/// Checks `alpha(beta(H)) = H` and `beta(alpha(F)) = F` on the enumeration.
pub fn verify_correspondence<F: ConstField>(pv: &PVExtension<F>, bound: i64) -> CorrespondenceReport {
    let n = pv.ring.n();
    let mut rows = Vec::new();
    for h in enumerate_subgroups(pv, bound) {
        let f = fixed_ring(pv, &h).expect("enumerated subgroups lie in G");
        let h2 = group_of(pv, &f).expect("fixed rings contain k");
        let f2 = fixed_ring(pv, &h2).expect("groups of rings lie in G");
        let ok = h2 == h && f2 == f;
        rows.push(CorrespondenceRow {
            subgroup_name: h.describe(n),
            subgroup: h,
            fixed_ring: f,
            group_of_fixed: h2,
            ring_of_group: f2,
            ok,
        });
    }
    let violations = rows.iter().filter(|r| !r.ok).count();
    CorrespondenceReport {
        index_bound: bound,
        rows,
        violations,
        scope: "intermediate rings generated by monomials over k".into(),
    }
}

/// Lattice cutting out the real points of `H_M`: `mu_d(R)` is `{1}` for
/// odd `d` and `{±1}` for even `d`, and `Gm(R) = R^*`.
pub fn real_fixer_lattice(m: &[Vector], n: usize) -> Matrix {
    let smith = Smith::of(m, n);
    let rows: Matrix = (0..n)
        .filter(|&i| smith.factors[i] != 0)
        .map(|i| {
            let d = smith.factors[i];
            let k = if d % 2 == 0 { 2 } else { 1 };
            smith.basis[i].iter().map(|x| x * k).collect()
        })
        .collect();
    hnf(&rows, n)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RealCollision {
    pub first: IntermediateRing,
    pub second: IntermediateRing,
    /// Common real-point fixer.
    pub real_fixer: Subgroup,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RealPointsReport {
    /// `G(R)` as `{t in (R^*)^n : t^m = 1}`.
    pub group: Subgroup,
    pub name: String,
    /// Pairs of distinct intermediate rings with the same real-point fixer.
    pub collisions: Vec<RealCollision>,
    pub correspondence_fails: bool,
}

/// The points of `G` with real coordinates, and the rings they cannot tell
/// apart among the enumerated subgroups.
pub fn real_points_subgroup<F: ConstField>(pv: &PVExtension<F>, bound: i64) -> RealPointsReport {
    let n = pv.ring.n();
    let group = Subgroup::from_lattice(&real_fixer_lattice(pv.ring.lattice(), n), n);
    let g_smith = Smith::of(pv.ring.lattice(), n);
    let mut parts: Vec<String> = g_smith
        .invariant_factors()
        .iter()
        .filter(|d| *d % 2 == 0)
        .map(|_| "mu_2".to_string())
        .collect();
    match g_smith.torus_rank() {
        0 => {}
        1 => parts.push("R^*".into()),
        f => parts.push(format!("(R^*)^{f}")),
    }
    let name = if parts.is_empty() { "1".into() } else { parts.join(" x ") };
    let mut fixers: Vec<(IntermediateRing, Matrix)> = Vec::new();
    for h in enumerate_subgroups(pv, bound) {
        let f = fixed_ring(pv, &h).expect("enumerated subgroups lie in G");
        fixers.push((f, real_fixer_lattice(&h.lattice, n)));
    }
    let mut collisions = Vec::new();
    for i in 0..fixers.len() {
        for j in i + 1..fixers.len() {
            if fixers[i].1 == fixers[j].1 && fixers[i].0 != fixers[j].0 {
                collisions.push(RealCollision {
                    first: fixers[i].0.clone(),
                    second: fixers[j].0.clone(),
                    real_fixer: Subgroup::from_lattice(&fixers[i].1, n),
                });
            }
        }
    }
    RealPointsReport {
        correspondence_fails: !collisions.is_empty(),
        group,
        name,
        collisions,
    }
}
