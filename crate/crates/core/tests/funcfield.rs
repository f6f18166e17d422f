use proptest::prelude::*;

use realpv_core::funcfield::{parse_ratfunc, ratio_solve, relation_lattice, Automorphism, RatioSolution};
use realpv_core::{RatFunc, RealAlgebraic};

fn rf(s: &str) -> RatFunc {
    parse_ratfunc(s).unwrap()
}

fn linear_product() -> impl Strategy<Value = RatFunc> {
    (
        1i64..6,
        prop::collection::vec((-4i64..5, -2i64..3), 0..3),
    )
        .prop_map(|(c, factors)| {
            let x = RatFunc::x();
            factors.iter().fold(RatFunc::from_i64(c), |acc, &(j, e)| {
                &acc * &(&x + &RatFunc::from_i64(j)).pow(e)
            })
        })
}

fn automorphism() -> impl Strategy<Value = Automorphism<RealAlgebraic>> {
    prop_oneof![
        (1i64..4).prop_map(|b| Automorphism::shift(RealAlgebraic::from_integer(b)).unwrap()),
        (2i64..4).prop_map(|q| Automorphism::dilation(RealAlgebraic::from_integer(q)).unwrap()),
        Just(Automorphism::dilation(RealAlgebraic::from_ratio(1, 2)).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn display_parse_round_trip(f in linear_product(), g in linear_product()) {
        let h = &f / &g;
        prop_assert_eq!(rf(&h.to_string()), h);
    }

    #[test]
    fn ratios_of_products_are_solved(phi in automorphism(), h in linear_product()) {
        let a = &phi.apply(&h, 1) / &h;
        match ratio_solve(&phi, &a) {
            RatioSolution::Solved(g) => {
                prop_assert_eq!(&phi.apply(&g, 1) / &g, a);
                prop_assert!((&g / &h).is_constant());
            }
            other => prop_assert!(false, "{:?}", other),
        }
    }

    #[test]
    fn phi_is_multiplicative(phi in automorphism(), f in linear_product(), g in linear_product()) {
        prop_assert_eq!(phi.apply(&(&f * &g), 1), &phi.apply(&f, 1) * &phi.apply(&g, 1));
        prop_assert_eq!(phi.apply(&phi.apply(&f, 2), -2), f);
    }
}

#[test]
fn gamma_like_entries_have_no_solution() {
    let shift = Automorphism::shift(RealAlgebraic::from_integer(1)).unwrap();
    assert!(matches!(ratio_solve(&shift, &rf("x")), RatioSolution::NoSolution));
    assert!(matches!(ratio_solve(&shift, &rf("2")), RatioSolution::NoSolution));
    let dilation = Automorphism::dilation(RealAlgebraic::from_integer(2)).unwrap();
    assert!(matches!(ratio_solve(&dilation, &rf("3")), RatioSolution::NoSolution));
    let RatioSolution::Solved(g) = ratio_solve(&dilation, &rf("8")) else {
        panic!("x^3 solves phi(h)/h = 8");
    };
    assert!((&g / &rf("x^3")).is_constant());
}

#[test]
fn shifted_entries_share_an_orbit() {
    let shift = Automorphism::shift(RealAlgebraic::from_integer(1)).unwrap();
    // x and x + 1/2 are unrelated, x and x + 3 are related
    let unrelated = relation_lattice(&shift, &[rf("x"), rf("x + 1/2")]);
    assert!(unrelated.basis.is_empty());
    let related = relation_lattice(&shift, &[rf("x"), rf("x + 3")]);
    assert_eq!(related.basis, vec![vec![1, -1]]);
    let h = &related.witnesses[0];
    assert_eq!(&shift.apply(h, 1) / h, rf("x/(x + 3)"));
}
