//! Constants of a presented ring and the simplicity falsification harness.

use std::collections::BTreeSet;

use serde::Serialize;

use super::{box_points, DiffRingPresentation, RingElement};
use crate::field::ConstField;
use crate::funcfield::{ratio_solve, relation_lattice, RatioSolution, RationalFunction};
use crate::lattice::{contains, Smith, Vector};

/// A constant `c T^r` on a nonzero class `r` of `Z^n/L`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct ExtraConstant<F: ConstField> {
    pub exponent: Vector,
    pub element: RingElement<F>,
}

/// Basis of the constants found on the classes of `[-bound, bound]^n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct ConstantsBasis<F: ConstField> {
    pub basis: Vec<RingElement<F>>,
    /// Classes where the ratio solver could not decide.
    pub undecided: Vec<Vector>,
}

impl<F: ConstField> ConstantsBasis<F> {
    /// True when the basis is `{1}` and nothing was left undecided.
    pub fn is_trivial(&self) -> bool {
        self.basis.len() == 1 && self.undecided.is_empty()
    }
}

/// Canonical class representatives met by `[-bound, bound]^n`, smallest
/// box point first (by `|m|_1`, then positive leading exponent).
fn representatives<F: ConstField>(ring: &DiffRingPresentation<F>, bound: i64) -> Vec<Vector> {
    let mut pts = box_points(ring.n(), bound);
    pts.sort_by_key(|m| {
        let norm: i64 = m.iter().map(|e| e.abs()).sum();
        let lead_neg = m.iter().find(|&&e| e != 0).is_some_and(|&e| e < 0);
        (norm, lead_neg, m.clone())
    });
    let mut seen = BTreeSet::new();
    pts.into_iter()
        .map(|m| ring.reduce_exponent(&m).0)
        .filter(|r| seen.insert(r.clone()))
        .collect()
}

/// The constant on class `r`, if any: `c T^r` with `phi(c)/c = a^{-r}`.
fn constant_on<F: ConstField>(
    ring: &DiffRingPresentation<F>,
    r: &[i64],
) -> Result<Option<RingElement<F>>, String> {
    let target = ring
        .action_power(r)
        .try_inv()
        .expect("action entries are nonzero");
    match ratio_solve(ring.phi(), &target) {
        RatioSolution::Solved(c) => {
            let e = ring.normal_form([(r.to_vec(), c)]);
            assert_eq!(ring.apply_phi(&e, 1), e, "constant check failed on {r:?}");
            Ok(Some(e))
        }
        RatioSolution::NoSolution => Ok(None),
        RatioSolution::Unknown(msg) => Err(msg),
    }
}

/// A basis of `{f : phi(f) = f}` among elements supported on the classes of
/// `[-bound, bound]^n`. Constants act termwise, so the basis is made of
/// single monomials.
pub fn constants<F: ConstField>(ring: &DiffRingPresentation<F>, bound: i64) -> ConstantsBasis<F> {
    let mut basis = vec![ring.one()];
    let mut undecided = Vec::new();
    let zero = vec![0; ring.n()];
    for r in representatives(ring, bound) {
        if r == zero {
            continue;
        }
        match constant_on(ring, &r) {
            Ok(Some(e)) => basis.push(e),
            Ok(None) => {}
            Err(_) => undecided.push(r),
        }
    }
    ConstantsBasis { basis, undecided }
}

/// Bounds of the simplicity harness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HarnessBounds {
    /// Largest support of a candidate generator.
    pub support: usize,
    /// Largest absolute exponent of a monomial in the support.
    pub degree: i64,
}

impl Default for HarnessBounds {
    fn default() -> Self {
        HarnessBounds { support: 4, degree: 8 }
    }
}

/// A phi-stable proper ideal found by the harness.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct StableIdeal<F: ConstField> {
    pub constant: ExtraConstant<F>,
    /// Generator `g` with `phi(g) = g`, not a unit.
    pub generator: RingElement<F>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct HarnessReport<F: ConstField> {
    pub bounds: HarnessBounds,
    pub classes_checked: usize,
    pub stable_ideals: Vec<StableIdeal<F>>,
    pub undecided: Vec<Vector>,
}

impl<F: ConstField> HarnessReport<F> {
    pub fn passed(&self) -> bool {
        self.stable_ideals.is_empty() && self.undecided.is_empty()
    }
}

/// A non-unit `g` with `phi(g) = g` built from the constant `u = c T^r`.
fn stable_generator<F: ConstField>(
    ring: &DiffRingPresentation<F>,
    u: &RingElement<F>,
    r: &[i64],
) -> RingElement<F> {
    let smith = Smith::of(ring.lattice(), ring.n());
    let coords = smith.coords(r);
    let mut order = 1i64;
    for (c, d) in coords.iter().zip(&smith.factors) {
        if *d == 0 {
            if *c != 0 {
                // infinite order: u - 1
                return ring.sub(u, &ring.one());
            }
        } else {
            let g = num_integer::Integer::gcd(c, d);
            order = num_integer::Integer::lcm(&order, &(d / g));
        }
    }
    let power = ring.pow(u, order as u32);
    let gamma = power
        .as_scalar()
        .and_then(|s| s.constant_value())
        .expect("a power of a constant monomial lies in C");
    let zeta = gamma
        .to_gaussian()
        .principal_root(order as u32)
        .expect("radicand is real");
    if let Some(z) = F::from_gaussian(&zeta) {
        return ring.sub(u, &ring.constant(z));
    }
    // conjugate pair: u^2 - 2 Re(zeta) u + |zeta|^2
    let two_re = F::from_real(&(&zeta.re + &zeta.re));
    let norm = F::from_real(&zeta.norm_sq());
    let u2 = ring.mul(u, u);
    let lin = ring.scale(u, &RationalFunction::constant(two_re));
    ring.add(&ring.sub(&u2, &lin), &ring.constant(norm))
}

/// Searches for phi-stable proper nonzero ideals. If `I` is such an ideal
/// and `f` an element of `I` of minimal support, normalised to have
/// coefficient 1 on `T^0`, then `phi(f) - f` lies in `I` with smaller
/// support, hence `phi(f) = f` and every term of `f` is a constant. So an
/// ideal with a generator of support at most `bounds.support` and exponents
/// in `[-degree, degree]` exists iff some nonzero class there carries a
/// constant monomial; the harness checks every such class.
pub fn falsify_simplicity<F: ConstField>(
    ring: &DiffRingPresentation<F>,
    bounds: HarnessBounds,
) -> HarnessReport<F> {
    let mut report = HarnessReport {
        bounds,
        classes_checked: 0,
        stable_ideals: Vec::new(),
        undecided: Vec::new(),
    };
    if bounds.support < 2 {
        return report;
    }
    // Exponents outside the telescoping lattice cannot carry constants.
    let tel = relation_lattice(ring.phi(), ring.action()).telescoping;
    let zero = vec![0; ring.n()];
    for r in representatives(ring, bounds.degree) {
        if r == zero {
            continue;
        }
        report.classes_checked += 1;
        if !contains(&tel, &r) {
            continue;
        }
        match constant_on(ring, &r) {
            Ok(Some(u)) => {
                let generator = stable_generator(ring, &u, &r);
                assert_eq!(ring.apply_phi(&generator, 1), generator);
                report.stable_ideals.push(StableIdeal {
                    constant: ExtraConstant {
                        exponent: r.clone(),
                        element: u,
                    },
                    generator,
                });
            }
            Ok(None) => {}
            Err(_) => report.undecided.push(r),
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcfield::{parse_ratfunc, Automorphism};
    use crate::numbers::RealAlgebraic;
    use crate::RatFunc;

    fn rf(s: &str) -> RatFunc {
        parse_ratfunc(s).unwrap()
    }

    fn shift() -> Automorphism<RealAlgebraic> {
        Automorphism::shift(RealAlgebraic::from_integer(1)).unwrap()
    }

    #[test]
    fn ex1_constants_are_trivial() {
        let r = crate::diffring::tests::ex1_ring(1);
        assert!(constants(&r, 6).is_trivial());
        assert!(falsify_simplicity(&r, HarnessBounds::default()).passed());
    }

    #[test]
    fn base_field_constants() {
        let r = DiffRingPresentation::base(shift());
        let c = constants(&r, 3);
        assert_eq!(c.basis, vec![r.one()]);
    }

    #[test]
    fn non_maximal_lattice_has_extra_constant() {
        let r = DiffRingPresentation::new(shift(), vec![rf("-1")], vec![]).unwrap();
        let c = constants(&r, 2);
        assert!(c.basis.contains(&r.monomial(&[2])));
        let h = falsify_simplicity(&r, HarnessBounds::default());
        assert!(!h.passed());
        let g = &h.stable_ideals[0].generator;
        assert_eq!(g, &r.sub(&r.monomial(&[2]), &r.one()));
    }

    #[test]
    fn torsion_constant_gives_factor() {
        // L = 4Z with T^4 = 1 for a = -1 is not maximal: T^2 is constant.
        let r = DiffRingPresentation::new(shift(), vec![rf("-1")], vec![(vec![4], rf("1"))]).unwrap();
        let h = falsify_simplicity(&r, HarnessBounds::default());
        assert_eq!(h.stable_ideals.len(), 1);
        let g = &h.stable_ideals[0].generator;
        assert_eq!(g, &r.sub(&r.monomial(&[2]), &r.one()));
    }
}
