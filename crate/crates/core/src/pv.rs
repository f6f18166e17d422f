//! Picard-Vessiot candidates for diagonal systems `phi(Y) = A Y`, their
//! simplicity and realness flags, and isomorphism tests via `R1 (x) R2`.

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::diffring::{
    constants, falsify_simplicity, has_sqrt_minus_one, is_real_ring, DiffRingError,
    DiffRingPresentation, HarnessBounds, HarnessReport, Realness, RingElement, SqrtMinusOne,
};
use crate::field::ConstField;
use crate::funcfield::{relation_lattice, Automorphism, RationalFunction, RelationLattice};
use crate::lattice::{Smith, Vector};

/// Support bound used for the weak (constants) flag.
pub const CONSTANTS_BOUND: i64 = 6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PvError {
    #[error("matrix is not monomial: {0}")]
    NotMonomial(String),
    #[error("diagonal entry {0} is zero")]
    ZeroEntry(usize),
    #[error("expected {expected} twists, got {got}")]
    TwistCount { expected: usize, got: usize },
    #[error("twist {0} is zero")]
    ZeroTwist(usize),
    #[error(transparent)]
    Ring(#[from] DiffRingError),
    #[error("ring does not belong to the system")]
    SystemMismatch,
    #[error("no candidate is real although every candidate was decided")]
    NoRealCandidate,
    #[error("real simple candidate {0} has extra constants")]
    ExtraConstants(usize),
}

/// `phi(Y) = diag(a) Y` over `(k, phi)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct DiffSystem<F: ConstField> {
    pub phi: Automorphism<F>,
    pub a: Vec<RationalFunction<F>>,
}

pub type RealSystem = DiffSystem<crate::RealAlgebraic>;

/// A monomial system rewritten as a diagonal one for `phi^power`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct MonomialReduction<F: ConstField> {
    pub power: u32,
    pub system: DiffSystem<F>,
}

impl<F: ConstField> DiffSystem<F> {
    pub fn new(phi: Automorphism<F>, a: Vec<RationalFunction<F>>) -> Result<Self, PvError> {
        if let Some(j) = a.iter().position(|x| x.is_zero()) {
            return Err(PvError::ZeroEntry(j));
        }
        Ok(DiffSystem { phi, a })
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    /// Accepts a permutation times a diagonal matrix. With `p` the order of
    /// the permutation, `phi^p(Y) = phi^{p-1}(A) .. phi(A) A Y` is diagonal.
    pub fn from_monomial(
        phi: Automorphism<F>,
        matrix: &[Vec<RationalFunction<F>>],
    ) -> Result<MonomialReduction<F>, PvError> {
        let n = matrix.len();
        let mut perm = Vec::with_capacity(n);
        let mut diag = Vec::with_capacity(n);
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(PvError::NotMonomial(format!("row {i} has {} entries", row.len())));
            }
            let nz: Vec<usize> = (0..n).filter(|&j| !row[j].is_zero()).collect();
            if nz.len() != 1 {
                return Err(PvError::NotMonomial(format!(
                    "row {i} has {} nonzero entries",
                    nz.len()
                )));
            }
            perm.push(nz[0]);
            diag.push(row[nz[0]].clone());
        }
        let mut cols = perm.clone();
        cols.sort_unstable();
        cols.dedup();
        if cols.len() != n {
            return Err(PvError::NotMonomial("two rows share a column".into()));
        }
        // A^(p) as (perm, diag): row i has diag[i] in column perm[i].
        let mut acc_perm = perm.clone();
        let mut acc_diag = diag.clone();
        let mut power = 1u32;
        while acc_perm.iter().enumerate().any(|(i, &j)| i != j) {
            // phi^power(A) * A^(power)
            let mut next_perm = vec![0; n];
            let mut next_diag = Vec::with_capacity(n);
            for i in 0..n {
                let mid = perm[i];
                next_perm[i] = acc_perm[mid];
                next_diag.push(&phi.apply(&diag[i], power as i64) * &acc_diag[mid]);
            }
            acc_perm = next_perm;
            acc_diag = next_diag;
            power += 1;
        }
        let phi_p = match &phi {
            Automorphism::Shift(b) => Automorphism::Shift(b.clone() * F::from_i64(power as i64)),
            Automorphism::Dilation(q) => Automorphism::Dilation(q.pow_i64(power as i64)),
        };
        Ok(MonomialReduction {
            power,
            system: DiffSystem::new(phi_p, acc_diag)?,
        })
    }
}

/// Flags of a candidate; `None` where the check was inconclusive.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PvFlags {
    pub simple: Option<bool>,
    pub real: Option<bool>,
    /// Constants equal `C` up to the support bound.
    pub weak: Option<bool>,
}

/// A twist `c` applied on the relation `T^{d f} = c * h`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct Twist<F: ConstField> {
    pub vector: Vector,
    pub factor: F,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct PVExtension<F: ConstField> {
    pub system: DiffSystem<F>,
    pub ring: DiffRingPresentation<F>,
    pub twists: Vec<Twist<F>>,
    pub flags: PvFlags,
    pub realness: Option<Realness<F>>,
    /// Set when the relation lattice could not be certified.
    pub conditional: Option<String>,
}

impl<F: ConstField> PVExtension<F> {
    /// The ring `k[T^{±1}]/(T^m - c(m) h_m : m in L)` with `L` the relation
    /// lattice of the system and `c` the character of `L` given by
    /// `twists` on the Smith vectors `d_i f_i`.
    pub fn with_twists(system: &DiffSystem<F>, twists: &[F]) -> Result<Self, PvError> {
        let rl = relation_lattice(&system.phi, &system.a);
        Self::from_relations(system, &rl, twists)
    }

    fn from_relations(
        system: &DiffSystem<F>,
        rl: &RelationLattice<F>,
        twists: &[F],
    ) -> Result<Self, PvError> {
        let n = system.n();
        let smith = Smith::of(&rl.basis, n);
        let rank = rl.basis.len();
        if twists.len() != rank {
            return Err(PvError::TwistCount {
                expected: rank,
                got: twists.len(),
            });
        }
        if let Some(i) = twists.iter().position(|c| c.is_zero()) {
            return Err(PvError::ZeroTwist(i));
        }
        let mut relations = Vec::with_capacity(rank);
        for (b, w) in rl.basis.iter().zip(&rl.witnesses) {
            let coords = smith.coords(b);
            let mut c = F::one();
            for (i, t) in twists.iter().enumerate() {
                let d = smith.factors[i];
                debug_assert_eq!(coords[i] % d, 0);
                c = c * t.pow_i64(coords[i] / d);
            }
            relations.push((b.clone(), w * &RationalFunction::constant(c)));
        }
        let ring = DiffRingPresentation::new(system.phi.clone(), system.a.clone(), relations)?;
        let twists = twists
            .iter()
            .enumerate()
            .map(|(i, t)| Twist {
                vector: smith.basis[i].iter().map(|x| x * smith.factors[i]).collect(),
                factor: t.clone(),
            })
            .collect();
        let conditional = if rl.complete {
            None
        } else {
            Some(rl.note.clone().unwrap_or_else(|| "relation lattice not certified".into()))
        };
        Ok(PVExtension {
            system: system.clone(),
            ring,
            twists,
            flags: PvFlags::default(),
            realness: None,
            conditional,
        })
    }

    /// Wraps an arbitrary presentation with the system's action.
    pub fn from_ring(system: &DiffSystem<F>, ring: DiffRingPresentation<F>) -> Result<Self, PvError> {
        if ring.phi() != &system.phi || ring.action() != system.a.as_slice() {
            return Err(PvError::SystemMismatch);
        }
        Ok(PVExtension {
            system: system.clone(),
            ring,
            twists: Vec::new(),
            flags: PvFlags::default(),
            realness: None,
            conditional: None,
        })
    }

    /// `phi(U) = A U` for `U = diag(T_1..T_n)`.
    pub fn verify_fundamental_matrix(&self) -> bool {
        (0..self.system.n()).all(|j| {
            let t = self.ring.generator(j);
            self.ring.apply_phi(&t, 1) == self.ring.scale(&t, &self.system.a[j])
        })
    }

    /// `det(U)^{-1} = T^{-(1,..,1)}`.
    pub fn det_inverse(&self) -> RingElement<F> {
        self.ring.monomial(&vec![-1; self.system.n()])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct SimplicityCertificate<F: ConstField> {
    /// The lattice equals the relation lattice of the action.
    pub maximal_lattice: bool,
    pub lattice_certified: bool,
    pub harness: HarnessReport<F>,
    pub simple: Option<bool>,
}

/// Structural check plus the falsification harness.
pub fn is_simple<F: ConstField>(pv: &PVExtension<F>, bounds: HarnessBounds) -> SimplicityCertificate<F> {
    let rl = relation_lattice(&pv.system.phi, &pv.system.a);
    let maximal_lattice = pv.ring.lattice() == &rl.basis;
    let harness = falsify_simplicity(&pv.ring, bounds);
    let simple = if !harness.stable_ideals.is_empty() {
        Some(false)
    } else if maximal_lattice && rl.complete && harness.undecided.is_empty() {
        Some(true)
    } else {
        None
    };
    SimplicityCertificate {
        maximal_lattice,
        lattice_certified: rl.complete,
        harness,
        simple,
    }
}

/// Sets the real and weak flags. Fails if a real simple candidate has
/// constants beyond `C`.
pub fn classify_real<F: ConstField>(mut pv: PVExtension<F>) -> Result<PVExtension<F>, PvError> {
    let realness = is_real_ring(&pv.ring);
    pv.flags.real = match realness {
        Realness::Real(_) => Some(true),
        Realness::NotReal(_) => Some(false),
        Realness::Unknown(_) => None,
    };
    pv.realness = Some(realness);
    let c = constants(&pv.ring, CONSTANTS_BOUND);
    pv.flags.weak = if c.basis.len() > 1 {
        Some(false)
    } else if c.undecided.is_empty() {
        Some(true)
    } else {
        None
    };
    if pv.flags.simple == Some(true) && pv.flags.real == Some(true) && pv.flags.weak == Some(false) {
        return Err(PvError::ExtraConstants(0));
    }
    Ok(pv)
}

fn classify<F: ConstField>(mut pv: PVExtension<F>, bounds: HarnessBounds) -> Result<PVExtension<F>, PvError> {
    pv.flags.simple = is_simple(&pv, bounds).simple;
    classify_real(pv)
}

/// One candidate per sign character on the even Smith vectors of the
/// relation lattice, classified.
pub fn build_pv_candidates<F: ConstField>(system: &DiffSystem<F>) -> Result<Vec<PVExtension<F>>, PvError> {
    build_pv_candidates_with(system, HarnessBounds::default())
}

pub fn build_pv_candidates_with<F: ConstField>(
    system: &DiffSystem<F>,
    bounds: HarnessBounds,
) -> Result<Vec<PVExtension<F>>, PvError> {
    let rl = relation_lattice(&system.phi, &system.a);
    let smith = Smith::of(&rl.basis, system.n());
    let rank = rl.basis.len();
    // Over C every character of L extends to Z^n; over R only the signs
    // on even Smith factors are not absorbed by rescaling T.
    let even: Vec<usize> = if F::sqrt_minus_one().is_some() {
        Vec::new()
    } else {
        (0..rank).filter(|&i| smith.factors[i] % 2 == 0).collect()
    };
    let mut twist_sets = Vec::new();
    for mask in 0u32..(1 << even.len()) {
        let mut t = vec![F::one(); rank];
        for (bit, &i) in even.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                t[i] = -F::one();
            }
        }
        twist_sets.push(t);
    }
    let candidates: Vec<PVExtension<F>> = twist_sets
        .par_iter()
        .enumerate()
        .map(|(idx, t)| {
            let pv = PVExtension::from_relations(system, &rl, t)?;
            assert!(pv.verify_fundamental_matrix());
            classify(pv, bounds).map_err(|e| match e {
                PvError::ExtraConstants(_) => PvError::ExtraConstants(idx),
                e => e,
            })
        })
        .collect::<Result<_, _>>()?;
    if F::sqrt_minus_one().is_none()
        && candidates.iter().all(|c| c.flags.real == Some(false))
    {
        return Err(PvError::NoRealCandidate);
    }
    Ok(candidates)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "")]
pub enum IsoVerdict<F: ConstField> {
    /// `scaling = u` gives `R1 -> R2`, `T^(1)_j -> u_j T^(2)_j`, when found.
    Isomorphic { scaling: Option<Vec<F>> },
    /// `witness^2 = -1` in `R1 (x) R2`.
    NotIsomorphic {
        witness: RingElement<F>,
        monomial: Option<Vector>,
    },
    Unknown(String),
}

/// `u` with `u^m h2_m = h1_m` for all `m` in `L`, if a real one exists.
fn explicit_scaling<F: ConstField>(r1: &DiffRingPresentation<F>, r2: &DiffRingPresentation<F>) -> Option<Vec<F>> {
    if r1.lattice() != r2.lattice() {
        return None;
    }
    let n = r1.n();
    let smith = Smith::of(r1.lattice(), n);
    let mut v = vec![F::one(); n];
    for (i, slot) in v.iter_mut().enumerate() {
        let d = smith.factors[i];
        if d == 0 {
            continue;
        }
        let m: Vector = smith.basis[i].iter().map(|x| x * d).collect();
        let ratio = &r1.cocycle_at(&m)? / &r2.cocycle_at(&m)?;
        *slot = ratio.constant_value()?.nth_root(d as u32)?;
    }
    // u_j = u^{e_j} = prod_i v_i^{to_coords[j][i]}
    let u: Vec<F> = (0..n)
        .map(|j| {
            (0..n).fold(F::one(), |acc, i| acc * v[i].pow_i64(smith.to_coords[j][i]))
        })
        .collect();
    let ok = r1.lattice().iter().zip(r1.cocycle()).zip(r2.cocycle()).all(|((b, h1), h2)| {
        let ub = b.iter().zip(&u).fold(F::one(), |acc, (e, x)| acc * x.pow_i64(*e));
        &RationalFunction::constant(ub) * h2 == *h1
    });
    ok.then_some(u)
}

/// Decides `R1 ~ R2` through `sqrt(-1)` in `R1 (x)_k R2`.
pub fn tensor_isomorphic<F: ConstField>(p1: &PVExtension<F>, p2: &PVExtension<F>) -> Result<IsoVerdict<F>, PvError> {
    if p1.system != p2.system {
        return Err(PvError::SystemMismatch);
    }
    let t = p1.ring.tensor(&p2.ring)?;
    Ok(match has_sqrt_minus_one(&t) {
        SqrtMinusOne::Yes { witness, monomial } => IsoVerdict::NotIsomorphic { witness, monomial },
        SqrtMinusOne::No(_) => IsoVerdict::Isomorphic {
            scaling: explicit_scaling(&p1.ring, &p2.ring),
        },
        SqrtMinusOne::Unknown(msg) => IsoVerdict::Unknown(msg),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct PvClasses<F: ConstField> {
    pub candidates: Vec<PVExtension<F>>,
    /// Indices of real candidates, grouped by isomorphism.
    pub classes: Vec<Vec<usize>>,
    /// Pairs the tensor test could not decide.
    pub unresolved: Vec<(usize, usize)>,
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut r = i;
    while parent[r] != r {
        r = parent[r];
    }
    parent[i] = r;
    r
}

/// Real candidates modulo isomorphism.
pub fn real_pv_classes<F: ConstField>(system: &DiffSystem<F>) -> Result<PvClasses<F>, PvError> {
    real_pv_classes_with(system, HarnessBounds::default())
}

pub fn real_pv_classes_with<F: ConstField>(
    system: &DiffSystem<F>,
    bounds: HarnessBounds,
) -> Result<PvClasses<F>, PvError> {
    let candidates = build_pv_candidates_with(system, bounds)?;
    let real: Vec<usize> = (0..candidates.len())
        .filter(|&i| candidates[i].flags.real == Some(true))
        .collect();
    let pairs: Vec<(usize, usize)> = real
        .iter()
        .enumerate()
        .flat_map(|(k, &i)| real[k + 1..].iter().map(move |&j| (i, j)))
        .collect();
    let verdicts: Vec<IsoVerdict<F>> = pairs
        .par_iter()
        .map(|&(i, j)| tensor_isomorphic(&candidates[i], &candidates[j]))
        .collect::<Result<_, _>>()?;
    let mut parent: Vec<usize> = (0..candidates.len()).collect();
    let mut unresolved = Vec::new();
    for (&(i, j), v) in pairs.iter().zip(&verdicts) {
        match v {
            IsoVerdict::Isomorphic { .. } => {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
            IsoVerdict::NotIsomorphic { .. } => {}
            IsoVerdict::Unknown(_) => unresolved.push((i, j)),
        }
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &i in &real {
        let root = find(&mut parent, i);
        match classes.iter_mut().find(|c| find(&mut parent, c[0]) == root) {
            Some(c) => c.push(i),
            None => classes.push(vec![i]),
        }
    }
    Ok(PvClasses {
        candidates,
        classes,
        unresolved,
    })
}
