//! The lattice `L = {m : prod a_j^{m_j} = phi(h)/h for some h}`.
//!
//! Non-constant parts are handled by an orbit-coherent coprime basis of the
//! numerators and denominators; what is left is a multiplicative relation
//! problem among constants, solved by polar decomposition.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::ratio::{shift_range, sigma};
use super::{monomial_value, ratio_solve, telescope, Automorphism, RatioSolution, RationalFunction};
use crate::field::ConstField;
use crate::lattice::{hnf, kernel, Matrix, Vector};
use crate::numbers::{GaussianAlgebraic, RealAlgebraic};
use crate::poly::Polynomial;

/// Relations `c` with `prod gamma_i^{c_i} = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstantRelations {
    /// HNF basis. When `complete` is false this is a certified sublattice.
    pub lattice: Matrix,
    pub complete: bool,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RelationLattice<F: crate::field::Field> {
    /// HNF basis of `L`.
    pub basis: Matrix,
    /// `h` with `phi(h)/h = prod a^r` for each basis row `r`.
    pub witnesses: Vec<RationalFunction<F>>,
    /// Exponents whose product is a constant times `phi(W)/W`.
    pub telescoping: Matrix,
    pub complete: bool,
    pub note: Option<String>,
}

enum Polar {
    /// `gamma = s * exp(2 pi i p/m)` with `s > 0`, `s^e = rho`.
    Radical { rho: BigRational, e: u32, m: u32, p: u32 },
    /// No power of `gamma` is rational.
    NonRadical,
    Unidentified(String),
}

// Orders whose roots of unity stay within the default degree limit.
const UNITY_ORDERS: [u32; 12] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 14];

fn approx(r: &RealAlgebraic) -> f64 {
    let (lo, hi) = r.enclosure(48);
    ((lo + hi) / BigRational::from_integer(2.into()))
        .to_f64()
        .unwrap_or(f64::NAN)
}

fn polar<F: ConstField>(g: &F) -> Polar {
    let z = g.to_gaussian();
    let s = if z.is_real() {
        z.re.abs()
    } else {
        match crate::numbers::nth_root_real(&z.norm_sq(), 2) {
            Some(s) => s,
            None => return Polar::Unidentified(format!("modulus of {z} not available")),
        }
    };
    let mp = s.minpoly();
    let e = mp.len() - 1;
    if mp[1..e].iter().any(|c| !c.is_zero()) {
        return Polar::NonRadical;
    }
    let rho = BigRational::new(-mp[0].clone(), mp[e].clone());
    let e = e as u32;
    if z.is_real() {
        let (m, p) = if z.re.signum() > 0 { (1, 0) } else { (2, 1) };
        return Polar::Radical { rho, e, m, p };
    }
    let turn = approx(&z.im).atan2(approx(&z.re)) / std::f64::consts::TAU;
    let turn = turn.rem_euclid(1.0);
    for m in UNITY_ORDERS {
        let p = (turn * m as f64).round();
        if (turn * m as f64 - p).abs() > 1e-9 {
            continue;
        }
        let p = (p as u32) % m;
        let w = GaussianAlgebraic::root_of_unity(m, p as i64);
        if &w.re * &s == z.re && &w.im * &s == z.im {
            return Polar::Radical { rho, e, m, p };
        }
        break;
    }
    Polar::Unidentified(format!("argument of {z} is not a recognised root of unity"))
}

/// Pairwise coprime integers `> 1` generating the same multiplicative
/// monoid saturation as the inputs.
fn coprime_base(inputs: &[BigInt]) -> Vec<BigInt> {
    let mut base: Vec<BigInt> = Vec::new();
    let push = |base: &mut Vec<BigInt>, v: BigInt| {
        if v > BigInt::one() && !base.contains(&v) {
            base.push(v);
        }
    };
    for v in inputs {
        push(&mut base, v.abs());
    }
    'scan: loop {
        for i in 0..base.len() {
            for j in i + 1..base.len() {
                let g = base[i].gcd(&base[j]);
                if g > BigInt::one() {
                    let b = base.remove(j);
                    let a = base.remove(i);
                    push(&mut base, &a / &g);
                    push(&mut base, &b / &g);
                    push(&mut base, g);
                    continue 'scan;
                }
            }
        }
        break;
    }
    base.sort();
    base
}

fn valuation(mut v: BigInt, p: &BigInt) -> i64 {
    let mut k = 0;
    while !v.is_zero() && (&v % p).is_zero() {
        v /= p;
        k += 1;
    }
    k
}

fn lcm_u32(a: u32, b: u32) -> u32 {
    a.lcm(&b)
}

/// The lattice of `c in Z^k` with `prod gamma_i^{c_i} = 1`.
pub fn multiplicative_relations<F: ConstField>(gammas: &[F]) -> ConstantRelations {
    let k = gammas.len();
    let polars: Vec<Polar> = gammas.iter().map(polar).collect();
    let radical: Vec<usize> = (0..k)
        .filter(|&i| matches!(polars[i], Polar::Radical { .. }))
        .collect();
    let non_radical = polars.iter().filter(|p| matches!(p, Polar::NonRadical)).count();
    let unidentified: Vec<&String> = polars
        .iter()
        .filter_map(|p| match p {
            Polar::Unidentified(s) => Some(s),
            _ => None,
        })
        .collect();

    let mut e_all = 1u32;
    let mut m_all = 1u32;
    let mut rhos = Vec::new();
    for &i in &radical {
        if let Polar::Radical { rho, e, m, p } = &polars[i] {
            e_all = lcm_u32(e_all, *e);
            m_all = lcm_u32(m_all, *m);
            rhos.push((rho.clone(), *e, *m, *p));
        }
    }
    let mut ints = Vec::new();
    for (rho, ..) in &rhos {
        ints.push(rho.numer().clone());
        ints.push(rho.denom().clone());
    }
    let base = coprime_base(&ints);
    let r = radical.len();
    // Unknowns: c_i for radical i, then one slack for the root-of-unity residue.
    let mut rows: Matrix = Vec::new();
    for b in &base {
        let row: Vector = rhos
            .iter()
            .map(|(rho, e, ..)| {
                let v = valuation(rho.numer().clone(), b) - valuation(rho.denom().clone(), b);
                v * i64::from(e_all / e)
            })
            .chain(std::iter::once(0))
            .collect();
        rows.push(row);
    }
    let mut unity: Vector = rhos
        .iter()
        .map(|(_, _, m, p)| i64::from(*p) * i64::from(m_all / m))
        .collect();
    unity.push(i64::from(m_all));
    rows.push(unity);
    let ker = kernel(&rows, r + 1);
    let projected: Matrix = ker.iter().map(|v| v[..r].to_vec()).collect();
    let small = hnf(&projected, r);
    let embedded: Matrix = small
        .iter()
        .map(|v| {
            let mut full = vec![0; k];
            for (&i, &c) in radical.iter().zip(v) {
                full[i] = c;
            }
            full
        })
        .collect();
    let lattice = hnf(&embedded, k);

    let (complete, note) = if let Some(msg) = unidentified.first() {
        (false, Some((*msg).clone()))
    } else if non_radical > 1 {
        (false, Some("several constants have no rational power".to_string()))
    } else {
        (true, None)
    };
    ConstantRelations {
        lattice,
        complete,
        note,
    }
}

fn strip_x<F: ConstField>(p: &Polynomial<F>) -> Polynomial<F> {
    let v = p.coeffs().iter().take_while(|c| c.is_zero()).count();
    Polynomial::new(p.coeffs()[v..].to_vec())
}

fn push_piece<F: ConstField>(pieces: &mut Vec<Polynomial<F>>, p: Polynomial<F>) {
    if p.deg() > 0 {
        let p = p.monic();
        if !pieces.contains(&p) {
            pieces.push(p);
        }
    }
}

/// Monic pieces such that for all pieces `u`, `v` and all `j`, either
/// `gcd(u, phi^j v) = 1` or `u = monic(phi^j v)`.
fn orbit_coprime_basis<F: ConstField>(
    phi: &Automorphism<F>,
    polys: Vec<Polynomial<F>>,
) -> Vec<Polynomial<F>> {
    let mut pieces = Vec::new();
    for p in polys {
        push_piece(&mut pieces, p);
    }
    'scan: loop {
        let refs: Vec<&Polynomial<F>> = pieces.iter().collect();
        let range = shift_range(phi, &refs);
        for i in 0..pieces.len() {
            for k in i..pieces.len() {
                for j in -range..=range {
                    if i == k && j == 0 {
                        continue;
                    }
                    let x = &pieces[i];
                    let y = sigma(phi, &pieces[k], j);
                    if *x == y {
                        continue;
                    }
                    let g = x.gcd(&y);
                    if g.deg() == 0 {
                        continue;
                    }
                    let (target, part) = if g != *x { (i, g) } else { (k, sigma(phi, &g, -j)) };
                    let whole = pieces.remove(target);
                    let rest = whole.exact_div(&part).expect("gcd divides");
                    push_piece(&mut pieces, part);
                    push_piece(&mut pieces, rest);
                    continue 'scan;
                }
            }
        }
        return pieces;
    }
}

fn multiplicity<F: ConstField>(p: &Polynomial<F>, piece: &Polynomial<F>) -> (i64, Polynomial<F>) {
    let mut rest = p.clone();
    let mut k = 0;
    while let Some(q) = rest.exact_div(piece) {
        rest = q;
        k += 1;
    }
    (k, rest)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, i: usize) -> usize {
        if self.0[i] != i {
            let r = self.find(self.0[i]);
            self.0[i] = r;
        }
        self.0[i]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn mat_mul(a: &[Vector], b: &[Vector], n: usize) -> Matrix {
    a.iter()
        .map(|row| {
            let mut out = vec![0i64; n];
            for (c, brow) in row.iter().zip(b) {
                for (o, v) in out.iter_mut().zip(brow) {
                    *o += c * v;
                }
            }
            out
        })
        .collect()
}

/// Computes `L` for the diagonal action `Y_j -> a_j Y_j` over `phi`.
pub fn relation_lattice<F: ConstField>(
    phi: &Automorphism<F>,
    a: &[RationalFunction<F>],
) -> RelationLattice<F> {
    assert!(a.iter().all(|f| !f.is_zero()), "diagonal entries must be nonzero");
    let n = a.len();
    let dilation = !phi.is_shift();
    let strip = |p: &Polynomial<F>| if dilation { strip_x(p) } else { p.clone() };

    let mut polys = Vec::new();
    for f in a {
        polys.push(strip(f.numer()));
        polys.push(strip(f.denom()));
    }
    let pieces = orbit_coprime_basis(phi, polys);

    // exps[piece][j]
    let mut exps = vec![vec![0i64; n]; pieces.len()];
    for (j, f) in a.iter().enumerate() {
        let mut num = strip(f.numer());
        let mut den = strip(f.denom());
        for (t, piece) in pieces.iter().enumerate() {
            let (kn, rn) = multiplicity(&num, piece);
            let (kd, rd) = multiplicity(&den, piece);
            exps[t][j] = kn - kd;
            num = rn;
            den = rd;
        }
        debug_assert!(num.deg() == 0 && den.deg() == 0);
    }

    let mut uf = UnionFind((0..pieces.len()).collect());
    let refs: Vec<&Polynomial<F>> = pieces.iter().collect();
    let range = shift_range(phi, &refs);
    for i in 0..pieces.len() {
        for k in i + 1..pieces.len() {
            if pieces[i].deg() == pieces[k].deg()
                && (-range..=range).any(|j| sigma(phi, &pieces[k], j) == pieces[i])
            {
                uf.union(i, k);
            }
        }
    }
    let mut rows: Matrix = Vec::new();
    for t in 0..pieces.len() {
        if uf.find(t) != t {
            continue;
        }
        let mut row = vec![0i64; n];
        for (u, e) in exps.iter().enumerate() {
            if uf.find(u) == t {
                for (r, v) in row.iter_mut().zip(e) {
                    *r += v;
                }
            }
        }
        rows.push(row);
    }
    if dilation {
        rows.push(a.iter().map(|f| f.valuation_at_zero()).collect());
    }
    let telescoping = kernel(&rows, n);

    let mut gammas: Vec<F> = telescoping
        .iter()
        .map(|b| {
            telescope(phi, &monomial_value(a, b))
                .expect("exponent in the telescoping lattice")
                .1
        })
        .collect();
    if dilation {
        gammas.push(phi.parameter().clone());
    }
    let r = telescoping.len();
    let rel = multiplicative_relations(&gammas);
    let coeffs: Matrix = rel.lattice.iter().map(|v| v[..r].to_vec()).collect();
    let coeffs = hnf(&coeffs, r);
    let basis = hnf(&mat_mul(&coeffs, &telescoping, n), n);

    let mut complete = rel.complete;
    let mut note = rel.note;
    let mut witnesses = Vec::new();
    for row in &basis {
        let target = monomial_value(a, row);
        match ratio_solve(phi, &target) {
            RatioSolution::Solved(h) => {
                assert_eq!(&phi.apply(&h, 1) / &h, target, "witness check failed");
                witnesses.push(h);
            }
            RatioSolution::Unknown(msg) => {
                complete = false;
                note.get_or_insert(msg);
                witnesses.push(RationalFunction::one());
            }
            RatioSolution::NoSolution => unreachable!("relation row {row:?} has no witness"),
        }
    }
    RelationLattice {
        basis,
        witnesses,
        telescoping,
        complete,
        note,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcfield::parse_ratfunc;
    use crate::RatFunc;

    fn ra(n: i64) -> RealAlgebraic {
        RealAlgebraic::from_integer(n)
    }

    fn rf(s: &str) -> RatFunc {
        parse_ratfunc(s).unwrap()
    }

    #[test]
    fn constant_relations_over_the_rationals() {
        let rel = multiplicative_relations(&[ra(2), ra(4), ra(-1), ra(3)]);
        assert!(rel.complete);
        assert_eq!(rel.lattice, hnf(&[vec![2, -1, 0, 0], vec![0, 0, 2, 0]], 4));
    }

    #[test]
    fn constant_relations_with_roots() {
        let s2 = crate::numbers::nth_root_real(&ra(2), 2).unwrap();
        let rel = multiplicative_relations(&[s2.clone(), ra(2), -s2]);
        assert!(rel.complete);
        assert_eq!(rel.lattice, hnf(&[vec![2, -1, 0], vec![0, 1, -2]], 3));
        let i = GaussianAlgebraic::i();
        let rel = multiplicative_relations(&[i, GaussianAlgebraic::from_integer(-1)]);
        assert_eq!(rel.lattice, hnf(&[vec![4, 0], vec![2, 1], vec![0, 2]], 2));
    }

    #[test]
    fn non_radical_constant() {
        let g = &ra(1) + &crate::numbers::nth_root_real(&ra(2), 2).unwrap();
        let rel = multiplicative_relations(&[g.clone(), ra(2)]);
        assert!(rel.complete);
        assert!(rel.lattice.is_empty());
        let rel = multiplicative_relations(&[g.clone(), g.try_inv().unwrap()]);
        assert!(!rel.complete);
    }

    #[test]
    fn shift_lattice_example() {
        let phi = Automorphism::shift(ra(1)).unwrap();
        let a = [rf("-1"), rf("x"), rf("1/(x - 3)")];
        let l = relation_lattice(&phi, &a);
        assert!(l.complete);
        assert_eq!(l.basis, hnf(&[vec![2, 0, 0], vec![0, 1, 1]], 3));
        for (row, h) in l.basis.iter().zip(&l.witnesses) {
            assert_eq!(&phi.apply(h, 1) / h, monomial_value(&a, row));
        }
    }

    #[test]
    fn dilation_lattice() {
        let phi = Automorphism::dilation(ra(2)).unwrap();
        let a = [rf("4"), rf("x"), rf("(2*x + 1)/(x + 1)"), rf("3")];
        let l = relation_lattice(&phi, &a);
        assert!(l.complete);
        assert_eq!(l.basis, hnf(&[vec![1, 0, 0, 0], vec![0, 0, 1, 0]], 4));
    }
}
