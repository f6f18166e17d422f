//! Idempotent decomposition, realness and `sqrt(-1)` for presented rings.
//!
//! Everything is read off the finite torsion subalgebra `k^h[sat(L)/L]`.
//! Its split part `S` (classes whose binomial `T^{o tau} = h` has
//! `h in C* k*^o`) is a product of copies of `k`, one per point
//! `zeta` with `zeta_i^{e_i} = kappa_i`; over each point the remaining
//! classes give a Kummer field. The components of the ring are the points
//! (over `C`) or the conjugation orbits of points (over `R`).

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use super::{ComplexRing, DiffRingPresentation, RingElement};
use crate::field::ConstField;
use crate::funcfield::RationalFunction;
use crate::lattice::{hnf, saturation, smith_relative, Vector};
use crate::numbers::{real_roots_distinct, GaussianAlgebraic, RealAlgebraic};
use crate::poly::Polynomial;

/// Largest torsion subgroup `sat(L)/L` handled.
pub const TORSION_BOUND: i64 = 12;

/// Orders `m` for which `exp(2 pi i / m)` stays within the number kernel.
const ROOT_ORDERS: [u32; 17] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 14, 16, 18, 20, 24, 48];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IdempotentError {
    #[error("torsion subalgebra outside the supported class: {0}")]
    Unsupported(String),
    #[error("phi has {orbits} orbits on the {components} components; the ring is not simple")]
    NotTransitive { orbits: usize, components: usize },
}

/// `R = (+)_{j<t} phi^j(e) R` with each summand a domain.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct IdempotentDecomposition<F: ConstField> {
    pub e: RingElement<F>,
    pub t: usize,
    /// `phi^0(e), .., phi^{t-1}(e)`.
    pub components: Vec<RingElement<F>>,
}

/// A sample cut of `k = R(x)`: a rational point or one of the ends.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cut {
    PlusInfinity,
    MinusInfinity,
    Point(BigRational),
}

impl fmt::Display for Cut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cut::PlusInfinity => f.write_str("x -> +inf"),
            Cut::MinusInfinity => f.write_str("x -> -inf"),
            Cut::Point(c) => write!(f, "x = {c}"),
        }
    }
}

impl Serialize for Cut {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "")]
pub enum Realness<F: ConstField> {
    /// One cut per component at which every even radicand is positive.
    Real(Vec<Cut>),
    /// Nonzero elements whose squares sum to zero.
    NotReal(Vec<RingElement<F>>),
    Unknown(String),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "")]
pub enum SqrtMinusOne<F: ConstField> {
    /// `witness^2 = -1`; `monomial` is `m` when the witness is `T^m`.
    Yes {
        witness: RingElement<F>,
        monomial: Option<Vector>,
    },
    /// Every component is formally real, certified by these cuts.
    No(Vec<Cut>),
    Unknown(String),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "")]
pub enum AdjoinedI<F: ConstField> {
    /// `R` already contains a square root of `-1`, so `R[i] = R`.
    Unchanged {
        ring: DiffRingPresentation<F>,
        witness: RingElement<F>,
    },
    Extended(ComplexRing),
    Undecided(String),
}

/// A generator `s` of the split subgroup with `(T^s / g)^order = kappa`.
struct SplitGen<F: ConstField> {
    s: Vector,
    order: u32,
    g: RationalFunction<F>,
    kappa: F,
}

struct Component<F: ConstField> {
    /// Indices into `Torsion::points`; two for a conjugate pair.
    points: Vec<usize>,
    e: RingElement<F>,
}

struct Torsion<F: ConstField> {
    gens: Vec<SplitGen<F>>,
    points: Vec<Vec<GaussianAlgebraic>>,
    /// Generators `g'` of `sat(L)/S` and their orders.
    nonsplit: Vec<(Vector, i64)>,
    components: Vec<Component<F>>,
}

fn unsupported<T>(msg: impl Into<String>) -> Result<T, IdempotentError> {
    Err(IdempotentError::Unsupported(msg.into()))
}

fn order_mod(coords: &[i64], factors: &[i64]) -> i64 {
    coords
        .iter()
        .zip(factors)
        .fold(1, |acc, (c, d)| acc.lcm(&(d / c.gcd(d))))
}

/// `h = kappa * g^o` with `g` monic over monic, when possible.
fn split_binomial<F: ConstField>(h: &RationalFunction<F>, o: u32) -> Option<(RationalFunction<F>, F)> {
    let kappa = h.leading_coefficient();
    let num = h.numer().monic();
    let gn = num.monic_nth_root(o)?;
    let gd = h.denom().monic_nth_root(o)?;
    Some((RationalFunction::new(gn, gd), kappa))
}

fn lower<F: ConstField>(x: &RingElement<GaussianAlgebraic>) -> Option<RingElement<F>> {
    let mut terms = std::collections::BTreeMap::new();
    for (m, c) in x.terms() {
        let lift = |p: &Polynomial<GaussianAlgebraic>| -> Option<Polynomial<F>> {
            let cs: Option<Vec<F>> = p.coeffs().iter().map(F::from_gaussian).collect();
            Some(Polynomial::new(cs?))
        };
        let num = lift(c.numer())?;
        let den = lift(c.denom())?;
        terms.insert(m.clone(), RationalFunction::new(num, den));
    }
    Some(RingElement { terms })
}

fn point_tuples(orders: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for &e in orders {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..e).map(move |j| {
                    let mut q = p.clone();
                    q.push(j);
                    q
                })
            })
            .collect();
    }
    out
}

impl<F: ConstField> Torsion<F> {
    fn of(ring: &DiffRingPresentation<F>) -> Result<Self, IdempotentError> {
        let n = ring.n();
        let l = ring.lattice().clone();
        let sat = saturation(&l, n);
        let (tbasis, tfactors) = if l.is_empty() {
            (Vec::new(), Vec::new())
        } else {
            smith_relative(&sat, &l, n)
        };
        let size: i64 = tfactors.iter().product();
        if size > TORSION_BOUND {
            return unsupported(format!("torsion of order {size} exceeds {TORSION_BOUND}"));
        }
        // Split classes of sat(L)/L.
        let mut split_reps = Vec::new();
        for c in box_counts(&tfactors) {
            let o = order_mod(&c, &tfactors);
            if o == 1 {
                continue;
            }
            let tau: Vector = (0..n)
                .map(|k| c.iter().zip(&tbasis).map(|(x, g)| x * g[k]).sum())
                .collect();
            let otau: Vector = tau.iter().map(|x| x * o).collect();
            let h = ring.cocycle_at(&otau).expect("o * tau lies in L");
            if split_binomial(&h, o as u32).is_some() {
                split_reps.push(tau);
            }
        }
        let mut ms = l.clone();
        ms.extend(split_reps);
        let ms = hnf(&ms, n);
        let mut gens = Vec::new();
        if !l.is_empty() {
            let (sbasis, sfactors) = smith_relative(&ms, &l, n);
            for (s, e) in sbasis.into_iter().zip(sfactors) {
                if e <= 1 {
                    continue;
                }
                let es: Vector = s.iter().map(|x| x * e).collect();
                let h = ring.cocycle_at(&es).expect("e * s lies in L");
                let Some((g, kappa)) = split_binomial(&h, e as u32) else {
                    return unsupported(format!("split generator {s:?} does not split"));
                };
                gens.push(SplitGen {
                    s,
                    order: e as u32,
                    g,
                    kappa,
                });
            }
        }
        let mut nonsplit = Vec::new();
        if !l.is_empty() {
            let (nbasis, nfactors) = smith_relative(&sat, &ms, n);
            for (g, d) in nbasis.into_iter().zip(nfactors) {
                if d > 1 {
                    nonsplit.push((g, d));
                }
            }
        }

        // Points zeta with zeta_i^{e_i} = kappa_i.
        let mut roots = Vec::new();
        for g in &gens {
            let kappa = g.kappa.to_gaussian();
            let turn = if kappa.is_real() {
                if kappa.re.signum() > 0 { 1 } else { 2 }
            } else if kappa.re.is_zero() {
                4
            } else {
                return unsupported(format!("radicand {kappa} is neither real nor imaginary"));
            };
            if !ROOT_ORDERS.contains(&g.order) || !ROOT_ORDERS.contains(&(turn * g.order)) {
                return unsupported(format!("roots of unity of order {}", turn * g.order));
            }
            let root = kappa.principal_root(g.order).expect("radicand is real or imaginary");
            roots.push(root);
        }
        let orders: Vec<u32> = gens.iter().map(|g| g.order).collect();
        let points: Vec<Vec<GaussianAlgebraic>> = point_tuples(&orders)
            .into_iter()
            .map(|js| {
                js.iter()
                    .zip(&gens)
                    .zip(&roots)
                    .map(|((&j, g), r)| r * &GaussianAlgebraic::root_of_unity(g.order, j as i64))
                    .collect()
            })
            .collect();

        let cr = ring.map(|c| c.to_gaussian());
        let ws: Vec<RingElement<GaussianAlgebraic>> = gens
            .iter()
            .map(|g| {
                let ginv = g.g.map(|c| c.to_gaussian()).try_inv().expect("nonzero");
                cr.scale(&cr.monomial(&g.s), &ginv)
            })
            .collect();
        let idem: Vec<RingElement<GaussianAlgebraic>> = points
            .iter()
            .map(|zeta| {
                let mut acc = cr.one();
                for ((w, z), g) in ws.iter().zip(zeta).zip(&gens) {
                    let zinv = z.try_inv().expect("nonzero root");
                    let u = cr.scale(w, &RationalFunction::constant(zinv));
                    let mut sum = cr.zero();
                    let mut p = cr.one();
                    for _ in 0..g.order {
                        sum = cr.add(&sum, &p);
                        p = cr.mul(&p, &u);
                    }
                    let inv = GaussianAlgebraic::from_integer(g.order as i64).try_inv().unwrap();
                    acc = cr.mul(&acc, &cr.scale(&sum, &RationalFunction::constant(inv)));
                }
                acc
            })
            .collect();

        // Group points into components over F.
        let mut components: Vec<Component<F>> = Vec::new();
        let mut taken = vec![false; points.len()];
        for p in 0..points.len() {
            if taken[p] {
                continue;
            }
            taken[p] = true;
            let mut members = vec![p];
            if F::sqrt_minus_one().is_none() {
                let conj: Vec<GaussianAlgebraic> = points[p].iter().map(|z| z.conj()).collect();
                let q = points.iter().position(|z| *z == conj).expect("conjugate point");
                if !taken[q] {
                    taken[q] = true;
                    members.push(q);
                }
            }
            let mut e = cr.zero();
            for &m in &members {
                e = cr.add(&e, &idem[m]);
            }
            let Some(e) = lower::<F>(&e) else {
                return unsupported("component idempotent is not defined over the constants");
            };
            components.push(Component { points: members, e });
        }
        Ok(Torsion {
            gens,
            points,
            nonsplit,
            components,
        })
    }

    /// `w_i = T^{s_i} / g_i` in the ring.
    fn w(&self, ring: &DiffRingPresentation<F>, i: usize) -> RingElement<F> {
        let g = &self.gens[i];
        ring.scale(&ring.monomial(&g.s), &g.g.try_inv().expect("nonzero"))
    }

    /// For a conjugate-pair component, `f` with `f^2 + e^2 = 0`.
    fn imaginary_unit(&self, ring: &DiffRingPresentation<F>, c: &Component<F>) -> Option<RingElement<F>> {
        let zeta = &self.points[c.points[0]];
        let i = zeta.iter().position(|z| !z.is_real())?;
        let re = RationalFunction::constant(F::from_real(&zeta[i].re));
        let im_inv = F::from_real(&zeta[i].im).inv()?;
        let shifted = ring.sub(&self.w(ring, i), &ring.scalar(re));
        let f = ring.scale(&ring.mul(&c.e, &shifted), &RationalFunction::constant(im_inv));
        let check = ring.add(&ring.mul(&f, &f), &ring.mul(&c.e, &c.e));
        check.is_zero().then_some(f)
    }

    /// Radicands `H_j` with `e T^{d_j g'_j} = H_j e` on a real component.
    fn radicands(
        &self,
        ring: &DiffRingPresentation<F>,
        c: &Component<F>,
    ) -> Option<Vec<(RationalFunction<F>, i64)>> {
        let zero = vec![0; ring.n()];
        let e0 = c.e.terms().get(&zero)?.clone();
        let mut out = Vec::new();
        for (g, d) in &self.nonsplit {
            let m: Vector = g.iter().map(|x| x * d).collect();
            let p = ring.mul(&c.e, &ring.monomial(&m));
            let h = match p.terms().get(&zero) {
                Some(v) => v / &e0,
                None => return None,
            };
            if p != ring.scale(&c.e, &h) {
                return None;
            }
            out.push((h, *d));
        }
        Some(out)
    }
}

/// Coordinate tuples `0 <= c_i < d_i`.
fn box_counts(factors: &[i64]) -> Vec<Vector> {
    let mut out = vec![Vec::new()];
    for &d in factors {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..d.max(1)).map(move |j| {
                    let mut q = p.clone();
                    q.push(j);
                    q
                })
            })
            .collect();
    }
    out
}

fn sign_at_cut<F: ConstField>(h: &RationalFunction<F>, cut: &Cut) -> Option<i32> {
    match cut {
        Cut::PlusInfinity => h.leading_coefficient().to_real().map(|r| r.signum()),
        Cut::MinusInfinity => {
            let s = h.leading_coefficient().to_real()?.signum();
            let parity = (h.numer().deg() + h.denom().deg()) % 2;
            Some(if parity == 0 { s } else { -s })
        }
        Cut::Point(c) => h
            .eval(&F::from_rational(c))
            .and_then(|v| v.to_real())
            .map(|r| r.signum()),
    }
}

fn real_poly<F: ConstField>(p: &Polynomial<F>) -> Option<Polynomial<RealAlgebraic>> {
    let cs: Option<Vec<RealAlgebraic>> = p.coeffs().iter().map(|c| c.to_real()).collect();
    Some(Polynomial::new(cs?))
}

/// A rational number strictly between `a < b`.
fn rational_between(a: &RealAlgebraic, b: &RealAlgebraic) -> BigRational {
    let mut k = 4;
    loop {
        let (_, ahi) = a.enclosure(k);
        let (blo, _) = b.enclosure(k);
        if ahi < blo {
            return (ahi + blo) / BigRational::from_integer(BigInt::from(2));
        }
        k *= 2;
    }
}

/// A cut where every even-order radicand is positive.
fn find_cut<F: ConstField>(radicands: &[(RationalFunction<F>, i64)]) -> Option<Cut> {
    let even: Vec<&RationalFunction<F>> = radicands
        .iter()
        .filter(|(_, d)| d % 2 == 0)
        .map(|(h, _)| h)
        .collect();
    let mut cuts = vec![Cut::PlusInfinity, Cut::MinusInfinity];
    let mut roots = Vec::new();
    for h in &even {
        for p in [h.numer(), h.denom()] {
            roots.extend(real_roots_distinct(&real_poly(p)?).ok()?);
        }
    }
    roots.sort();
    roots.dedup();
    for pair in roots.windows(2) {
        cuts.push(Cut::Point(rational_between(&pair[0], &pair[1])));
    }
    cuts.into_iter()
        .find(|cut| even.iter().all(|h| sign_at_cut(h, cut) == Some(1)))
}

/// The decomposition `R = (+) phi^j(e) R` with minimal `t`.
pub fn find_idempotents<F: ConstField>(
    ring: &DiffRingPresentation<F>,
) -> Result<IdempotentDecomposition<F>, IdempotentError> {
    let tor = Torsion::of(ring)?;
    let comps: Vec<&RingElement<F>> = tor.components.iter().map(|c| &c.e).collect();
    let base = comps[0].clone();
    let mut orbit = vec![base.clone()];
    loop {
        let next = ring.apply_phi(orbit.last().unwrap(), 1);
        if next == base {
            break;
        }
        if !comps.contains(&&next) {
            return unsupported("phi does not permute the components");
        }
        orbit.push(next);
    }
    if orbit.len() != comps.len() {
        let mut seen = vec![false; comps.len()];
        let mut orbits = 0;
        for k in 0..comps.len() {
            if seen[k] {
                continue;
            }
            orbits += 1;
            let mut x = comps[k].clone();
            while let Some(j) = comps.iter().position(|c| **c == x).filter(|&j| !seen[j]) {
                seen[j] = true;
                x = ring.apply_phi(&x, 1);
            }
        }
        return Err(IdempotentError::NotTransitive {
            orbits,
            components: comps.len(),
        });
    }
    let mut total = ring.zero();
    for (j, a) in orbit.iter().enumerate() {
        assert_eq!(ring.mul(a, a), *a, "component {j} is not idempotent");
        for b in &orbit[j + 1..] {
            assert!(ring.mul(a, b).is_zero(), "components are not orthogonal");
        }
        total = ring.add(&total, a);
    }
    assert_eq!(total, ring.one(), "components do not sum to 1");
    Ok(IdempotentDecomposition {
        e: base,
        t: orbit.len(),
        components: orbit,
    })
}

/// Decides whether every component field is formally real.
pub fn is_real_ring<F: ConstField>(ring: &DiffRingPresentation<F>) -> Realness<F> {
    if let Some(i) = F::sqrt_minus_one() {
        return Realness::NotReal(vec![ring.constant(i), ring.one()]);
    }
    let tor = match Torsion::of(ring) {
        Ok(t) => t,
        Err(e) => return Realness::Unknown(e.to_string()),
    };
    let mut cuts = Vec::new();
    for c in &tor.components {
        if c.points.len() == 2 {
            return match tor.imaginary_unit(ring, c) {
                Some(f) => Realness::NotReal(vec![f, c.e.clone()]),
                None => Realness::Unknown("imaginary unit check failed".into()),
            };
        }
        let Some(rads) = tor.radicands(ring, c) else {
            return Realness::Unknown("radicands are not scalar on a component".into());
        };
        match find_cut(&rads) {
            Some(cut) => cuts.push(cut),
            None => return Realness::Unknown("no sample cut makes every even radicand positive".into()),
        }
    }
    Realness::Real(cuts)
}

/// Searches for `f` with `f^2 = -1`.
pub fn has_sqrt_minus_one<F: ConstField>(ring: &DiffRingPresentation<F>) -> SqrtMinusOne<F> {
    if let Some(i) = F::sqrt_minus_one() {
        return SqrtMinusOne::Yes {
            witness: ring.constant(i),
            monomial: None,
        };
    }
    if let Some(f) = monomial_sqrt_minus_one(ring) {
        return normalized_witness(ring, f);
    }
    let tor = match Torsion::of(ring) {
        Ok(t) => t,
        Err(e) => return SqrtMinusOne::Unknown(e.to_string()),
    };
    if tor.components.iter().all(|c| c.points.len() == 2) {
        let mut f = ring.zero();
        for c in &tor.components {
            match tor.imaginary_unit(ring, c) {
                Some(fc) => f = ring.add(&f, &fc),
                None => return SqrtMinusOne::Unknown("imaginary unit check failed".into()),
            }
        }
        return normalized_witness(ring, f);
    }
    match is_real_ring(ring) {
        Realness::Real(cuts) => SqrtMinusOne::No(cuts),
        Realness::NotReal(_) => SqrtMinusOne::Unknown("a component is neither real nor contains i".into()),
        Realness::Unknown(msg) => SqrtMinusOne::Unknown(msg),
    }
}

fn normalized_witness<F: ConstField>(ring: &DiffRingPresentation<F>, mut f: RingElement<F>) -> SqrtMinusOne<F> {
    assert!(ring.add(&ring.mul(&f, &f), &ring.one()).is_zero());
    let mut monomial = None;
    if let Some((sign, m)) = ring.monomial_representative(&f, 2) {
        if sign < 0 {
            f = ring.neg(&f);
        }
        monomial = Some(m);
    }
    SqrtMinusOne::Yes {
        witness: f,
        monomial,
    }
}

/// `T^m / g` with `T^{2m} = -g^2`, for `2m` running over `L` modulo `2L`.
fn monomial_sqrt_minus_one<F: ConstField>(ring: &DiffRingPresentation<F>) -> Option<RingElement<F>> {
    let basis = ring.lattice();
    let r = basis.len();
    if r == 0 || r > 12 {
        return None;
    }
    let n = ring.n();
    for mask in 1u32..(1 << r) {
        let mut v = vec![0i64; n];
        for (i, row) in basis.iter().enumerate() {
            if mask & (1 << i) != 0 {
                for (x, y) in v.iter_mut().zip(row) {
                    *x += y;
                }
            }
        }
        if v.iter().any(|e| e % 2 != 0) {
            continue;
        }
        let (rest, f) = ring.reduce_exponent(&v);
        debug_assert!(rest.iter().all(|&e| e == 0));
        let Some(g) = square_root_in_k(&-f) else {
            continue;
        };
        let m: Vector = v.iter().map(|e| e / 2).collect();
        return Some(ring.scale(&ring.monomial(&m), &g.try_inv()?));
    }
    None
}

fn square_root_in_k<F: ConstField>(f: &RationalFunction<F>) -> Option<RationalFunction<F>> {
    let lc = f.numer().leading();
    let c = lc.nth_root(2)?;
    let num = f.numer().monic().monic_nth_root(2)?;
    let den = f.denom().monic_nth_root(2)?;
    Some(RationalFunction::new(num.scale(&c), den))
}

/// `R[i]`, with the convention `R[i] = R` when `R` already contains `i`.
pub fn adjoin_i<F: ConstField>(ring: &DiffRingPresentation<F>) -> AdjoinedI<F> {
    match has_sqrt_minus_one(ring) {
        SqrtMinusOne::Yes { witness, .. } => AdjoinedI::Unchanged {
            ring: ring.clone(),
            witness,
        },
        SqrtMinusOne::No(_) => AdjoinedI::Extended(ring.complexify()),
        SqrtMinusOne::Unknown(msg) => AdjoinedI::Undecided(msg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffring::tests::ex1_ring;
    use crate::funcfield::{parse_ratfunc, Automorphism};
    use crate::RatFunc;

    fn rf(s: &str) -> RatFunc {
        parse_ratfunc(s).unwrap()
    }

    fn shift() -> Automorphism<RealAlgebraic> {
        Automorphism::shift(RealAlgebraic::from_integer(1)).unwrap()
    }

    fn minus_one_ring(h: &str) -> DiffRingPresentation<RealAlgebraic> {
        DiffRingPresentation::new(shift(), vec![rf("-1")], vec![(vec![2], rf(h))]).unwrap()
    }

    #[test]
    fn ex1_is_a_domain() {
        let r = ex1_ring(1);
        let d = find_idempotents(&r).unwrap();
        assert_eq!(d.t, 1);
        assert_eq!(d.e, r.one());
    }

    #[test]
    fn sign_ring_splits_in_two() {
        let r = minus_one_ring("1");
        let d = find_idempotents(&r).unwrap();
        assert_eq!(d.t, 2);
        let half = rf("1/2");
        let e = r.scale(&r.add(&r.one(), &r.generator(0)), &half);
        assert_eq!(d.e, e);
        assert_eq!(d.components[1], r.sub(&r.one(), &e));
    }

    #[test]
    fn base_field_decomposition() {
        let r = DiffRingPresentation::base(shift());
        let d = find_idempotents(&r).unwrap();
        assert_eq!((d.t, d.e.clone()), (1, r.one()));
    }

    #[test]
    fn realness_of_ex1_rings() {
        assert_eq!(is_real_ring(&ex1_ring(1)), Realness::Real(vec![Cut::PlusInfinity]));
        assert_eq!(is_real_ring(&ex1_ring(-1)), Realness::Real(vec![Cut::MinusInfinity]));
        assert!(matches!(has_sqrt_minus_one(&ex1_ring(1)), SqrtMinusOne::No(_)));
    }

    #[test]
    fn t_squared_minus_one_is_not_real() {
        let r = minus_one_ring("-1");
        let Realness::NotReal(sq) = is_real_ring(&r) else {
            panic!("expected NotReal");
        };
        assert_eq!(sq, vec![r.generator(0), r.one()]);
        match has_sqrt_minus_one(&r) {
            SqrtMinusOne::Yes { witness, monomial } => {
                assert_eq!(witness, r.generator(0));
                assert_eq!(monomial, Some(vec![1]));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(adjoin_i(&r), AdjoinedI::Unchanged { .. }));
    }

    #[test]
    fn ex1_tensor_contains_i() {
        let t = ex1_ring(1).tensor(&ex1_ring(-1)).unwrap();
        match has_sqrt_minus_one(&t) {
            SqrtMinusOne::Yes { witness, monomial } => {
                assert_eq!(monomial, Some(vec![1, -1]));
                assert_eq!(witness, t.monomial(&[1, -1]));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(is_real_ring(&t), Realness::NotReal(_)));
    }

    #[test]
    fn product_of_sign_rings_has_four_components() {
        let r = minus_one_ring("1");
        let t = r.tensor(&r).unwrap();
        let tor = Torsion::of(&t).unwrap();
        assert_eq!(tor.components.len(), 4);
        assert!(matches!(find_idempotents(&t), Err(IdempotentError::NotTransitive { orbits: 2, .. })));
    }

    #[test]
    fn adjoin_i_is_idempotent() {
        let AdjoinedI::Extended(c) = adjoin_i(&ex1_ring(1)) else {
            panic!("expected a genuine extension");
        };
        assert!(matches!(adjoin_i(&c), AdjoinedI::Unchanged { .. }));
    }

    #[test]
    fn real_points_with_nonsplit_radicand() {
        // T1^2 = 1 splits into two real points; T2^2 = x stays a radical.
        let phi = Automorphism::dilation(RealAlgebraic::from_integer(2)).unwrap();
        let r = DiffRingPresentation::new(
            phi,
            vec![rf("-1"), rf("algebraic([-2,0,1],1,2)")],
            vec![(vec![2, 0], rf("1")), (vec![0, 2], rf("x"))],
        )
        .unwrap();
        assert_eq!(find_idempotents(&r).unwrap().t, 2);
        assert_eq!(is_real_ring(&r), Realness::Real(vec![Cut::PlusInfinity; 2]));
    }
}
