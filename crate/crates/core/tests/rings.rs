use std::sync::OnceLock;

use proptest::prelude::*;

use realpv_core::diffring::{has_sqrt_minus_one, is_real_ring, Realness, RingElement, SqrtMinusOne};
use realpv_core::funcfield::{parse_ratfunc, Automorphism};
use realpv_core::galois::{act, compute_galois_group, rho_u, sample_elements, GaloisError, GroupElement};
use realpv_core::pv::{build_pv_candidates, tensor_isomorphic, DiffSystem, IsoVerdict, PVExtension};
use realpv_core::seqmodel::{embed_ring, germ_equal, real_base_point};
use realpv_core::{ConstField, GaussianAlgebraic, RatFunc, RealAlgebraic};

type Pv = PVExtension<RealAlgebraic>;

fn rf(s: &str) -> RatFunc {
    parse_ratfunc(s).unwrap()
}

fn system(phi: &str, entries: &[&str]) -> DiffSystem<RealAlgebraic> {
    let phi = match phi.split_once(' ') {
        Some(("shift", b)) => Automorphism::shift(rf(b).constant_value().unwrap()).unwrap(),
        Some(("dilation", q)) => Automorphism::dilation(rf(q).constant_value().unwrap()).unwrap(),
        _ => panic!("{phi}"),
    };
    DiffSystem::new(phi, entries.iter().map(|e| rf(e)).collect()).unwrap()
}

/// ex1, a sign under a shift, and two mixed two-dimensional systems.
fn families() -> &'static Vec<Vec<Pv>> {
    static CELL: OnceLock<Vec<Vec<Pv>>> = OnceLock::new();
    CELL.get_or_init(|| {
        [
            system("dilation 2", &["algebraic([-2,0,1],1,2)"]),
            system("shift 1", &["-1"]),
            system("dilation 2", &["4", "-1"]),
            system("shift 1", &["-1", "2"]),
        ]
        .iter()
        .map(|s| build_pv_candidates(s).unwrap())
        .collect()
    })
}

fn all_candidates() -> Vec<&'static Pv> {
    families().iter().flatten().collect()
}

type Terms = Vec<(Vec<i64>, usize)>;

const COEFFS: [&str; 6] = ["1", "-2", "x", "x + 1", "1/x", "3/(x - 2)"];

/// Terms `(exponent, coefficient index)` for a ring with `n` generators.
fn terms_strategy(n: usize) -> impl Strategy<Value = Terms> {
    prop::collection::vec((prop::collection::vec(-3i64..4, n), 0..COEFFS.len()), 1..4)
}

fn element(pv: &Pv, terms: &[(Vec<i64>, usize)]) -> RingElement<RealAlgebraic> {
    pv.ring
        .normal_form(terms.iter().map(|(m, c)| (m.clone(), rf(COEFFS[*c]))))
}

fn pick(k: usize) -> &'static Pv {
    let all = all_candidates();
    all[k % all.len()]
}

fn pair_strategy() -> impl Strategy<Value = (usize, Terms, Terms)> {
    (0usize..64).prop_flat_map(|k| {
        let n = pick(k).ring.n();
        (Just(k), terms_strategy(n), terms_strategy(n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn ring_laws((k, a, b) in pair_strategy(), c in 0..COEFFS.len()) {
        let pv = pick(k);
        let r = &pv.ring;
        let (x, y) = (element(pv, &a), element(pv, &b));
        let z = r.scalar(rf(COEFFS[c]));
        prop_assert_eq!(r.mul(&x, &y), r.mul(&y, &x));
        prop_assert_eq!(r.mul(&r.mul(&x, &y), &z), r.mul(&x, &r.mul(&y, &z)));
        prop_assert_eq!(
            r.mul(&x, &r.add(&y, &z)),
            r.add(&r.mul(&x, &y), &r.mul(&x, &z))
        );
        prop_assert_eq!(r.mul(&x, &r.one()), x.clone());
        prop_assert!(r.sub(&x, &x).is_zero());
    }

    #[test]
    fn phi_is_a_ring_automorphism((k, a, b) in pair_strategy()) {
        let pv = pick(k);
        let r = &pv.ring;
        let (x, y) = (element(pv, &a), element(pv, &b));
        prop_assert_eq!(r.apply_phi(&r.mul(&x, &y), 1), r.mul(&r.apply_phi(&x, 1), &r.apply_phi(&y, 1)));
        prop_assert_eq!(r.apply_phi(&r.add(&x, &y), 1), r.add(&r.apply_phi(&x, 1), &r.apply_phi(&y, 1)));
        prop_assert_eq!(r.apply_phi(&r.apply_phi(&x, 1), -1), x);
    }

    #[test]
    fn group_acts_by_automorphisms((k, a, b) in pair_strategy()) {
        let pv = pick(k);
        let rc = pv.ring.complexify();
        let to_c = |e: &RingElement<RealAlgebraic>| e.map(|c| c.to_gaussian());
        let (x, y) = (to_c(&element(pv, &a)), to_c(&element(pv, &b)));
        for g in sample_elements(&compute_galois_group(pv)) {
            prop_assert_eq!(
                act(pv, &g, &rc.mul(&x, &y)),
                rc.mul(&act(pv, &g, &x), &act(pv, &g, &y))
            );
            prop_assert_eq!(
                act(pv, &g, &rc.apply_phi(&x, 1)),
                rc.apply_phi(&act(pv, &g, &x), 1)
            );
        }
    }
}

#[test]
fn germs_respect_products_and_phi() {
    let pv = &families()[0][0];
    let r = &pv.ring;
    let (emb, initial) = real_base_point(r, 12, 8).unwrap().unwrap();
    let sol = embed_ring(r, &emb, &initial).unwrap();
    let samples = [
        element(pv, &[(vec![1], 2), (vec![-1], 0)]),
        element(pv, &[(vec![3], 4)]),
        element(pv, &[(vec![0], 3), (vec![2], 5)]),
    ];
    for x in &samples {
        assert!(germ_equal(&sol.element(&r.apply_phi(x, 1)), &sol.element(x).shifted()).holds());
        for y in &samples {
            let lhs = sol.element(&r.mul(x, y));
            let rhs = sol.element(x).mul(&sol.element(y));
            assert!(germ_equal(&lhs, &rhs).holds(), "{} * {}", x.fmt_text(), y.fmt_text());
        }
    }
}

#[test]
fn sampled_elements_satisfy_the_relations() {
    for pv in all_candidates() {
        for g in sample_elements(&compute_galois_group(pv)) {
            assert_eq!(rho_u(pv, &g).unwrap(), g.t);
        }
    }
}

#[test]
fn non_members_are_rejected() {
    let pv = &families()[0][0];
    let g = GroupElement {
        t: vec![GaussianAlgebraic::from_integer(2)],
    };
    assert!(matches!(rho_u(pv, &g), Err(GaloisError::NotMember { .. })));
}

#[test]
fn orbit_stabilizer_on_ex1() {
    let pv = &families()[0][0];
    let group = compute_galois_group(pv);
    let elements = sample_elements(&group);
    let t = pv.ring.complexify().generator(0);
    let mut orbit: Vec<RingElement<GaussianAlgebraic>> = Vec::new();
    let mut stabilizer = 0;
    for g in &elements {
        let image = act(pv, g, &t);
        if image == t {
            stabilizer += 1;
        }
        if !orbit.contains(&image) {
            orbit.push(image);
        }
    }
    assert_eq!(group.group.order(), Some(2));
    assert_eq!(elements.len(), 2);
    assert_eq!(orbit.len() * stabilizer, 2);
}

#[test]
fn real_rings_have_no_square_root_of_minus_one() {
    for pv in all_candidates() {
        let real = matches!(is_real_ring(&pv.ring), Realness::Real(_));
        let root = matches!(has_sqrt_minus_one(&pv.ring), SqrtMinusOne::Yes { .. });
        assert!(!(real && root), "{:?}", pv.ring.relations_text());
        assert_eq!(real, pv.flags.real == Some(true));
    }
}

fn isomorphic(a: &Pv, b: &Pv) -> bool {
    match tensor_isomorphic(a, b).unwrap() {
        IsoVerdict::Isomorphic { .. } => true,
        IsoVerdict::NotIsomorphic { .. } => false,
        IsoVerdict::Unknown(msg) => panic!("{msg}"),
    }
}

#[test]
fn tensor_test_is_an_equivalence() {
    for family in families() {
        let real: Vec<&Pv> = family.iter().filter(|p| p.flags.real == Some(true)).collect();
        let n = real.len();
        let rel: Vec<Vec<bool>> = (0..n)
            .map(|i| (0..n).map(|j| isomorphic(real[i], real[j])).collect())
            .collect();
        for i in 0..n {
            assert!(rel[i][i]);
            for j in 0..n {
                assert_eq!(rel[i][j], rel[j][i]);
                for k in 0..n {
                    if rel[i][j] && rel[j][k] {
                        assert!(rel[i][k]);
                    }
                }
            }
        }
    }
}
