use proptest::prelude::*;

use realpv_core::lattice::{
    contains, det_abs, hnf, index, is_sublattice, kernel, saturation, superlattices_of_bounded_index,
    Matrix, Smith,
};

fn det3(m: &[Vec<i64>]) -> i64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Rank over Q by fraction-free elimination.
fn rank(rows: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let cols = a.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, p);
        for i in 0..a.len() {
            if i != r && a[i][c] != 0 {
                let (f, g) = (a[i][c], a[r][c]);
                for k in 0..cols {
                    a[i][k] = a[i][k] * g - a[r][k] * f;
                }
            }
        }
        r += 1;
    }
    r
}

fn rows_strategy() -> impl Strategy<Value = Matrix> {
    prop::collection::vec(prop::collection::vec(-6i64..7, 3), 0..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn hnf_spans_the_same_lattice(rows in rows_strategy()) {
        let h = hnf(&rows, 3);
        prop_assert_eq!(h.len(), rank(&rows));
        prop_assert!(is_sublattice(&rows, &h));
        let again = hnf(&h, 3);
        prop_assert_eq!(&again, &h);
        // the generators reach every HNF row
        prop_assert!(is_sublattice(&h, &hnf(&rows, 3)));
    }

    #[test]
    fn smith_matches_determinant(rows in prop::collection::vec(prop::collection::vec(-6i64..7, 3), 3)) {
        let smith = Smith::of(&rows, 3);
        let d = det3(&rows).abs();
        if d == 0 {
            prop_assert_eq!(smith.torus_rank(), 3 - rank(&rows));
        } else {
            prop_assert_eq!(smith.torus_rank(), 0);
            prop_assert_eq!(smith.torsion_order(), d);
            prop_assert_eq!(det_abs(&hnf(&rows, 3)), d);
            prop_assert_eq!(index(&rows, 3), Some(d));
        }
        let nonzero: Vec<i64> = smith.factors.iter().copied().filter(|&x| x != 0).collect();
        for w in nonzero.windows(2) {
            prop_assert_eq!(w[1] % w[0], 0);
        }
    }

    #[test]
    fn smith_basis_generates_the_lattice(rows in rows_strategy()) {
        let smith = Smith::of(&rows, 3);
        let scaled: Matrix = (0..3)
            .filter(|&i| smith.factors[i] != 0)
            .map(|i| smith.basis[i].iter().map(|x| x * smith.factors[i]).collect())
            .collect();
        prop_assert_eq!(hnf(&scaled, 3), hnf(&rows, 3));
        for (i, f) in smith.basis.iter().enumerate() {
            let mut unit = vec![0; 3];
            unit[i] = 1;
            prop_assert_eq!(smith.coords(f), unit);
        }
    }

    #[test]
    fn kernel_and_saturation(rows in rows_strategy()) {
        for v in kernel(&rows, 3) {
            for r in &rows {
                prop_assert_eq!(r.iter().zip(&v).map(|(a, b)| a * b).sum::<i64>(), 0);
            }
        }
        let sat = saturation(&rows, 3);
        prop_assert!(is_sublattice(&rows, &sat));
        prop_assert_eq!(sat.len(), rank(&rows));
        prop_assert_eq!(Smith::of(&sat, 3).torsion_order(), 1);
    }

    #[test]
    fn superlattices_contain_l(rows in prop::collection::vec(prop::collection::vec(-4i64..5, 2), 2)) {
        prop_assume!(rows[0][0] * rows[1][1] != rows[0][1] * rows[1][0]);
        for m in superlattices_of_bounded_index(&rows, 2, 6) {
            prop_assert!(is_sublattice(&rows, &m));
            let idx = index(&m, 2).unwrap();
            prop_assert!((1..=6).contains(&idx));
        }
    }
}

#[test]
fn superlattices_of_z_times_six() {
    let l = vec![vec![6]];
    let mut found: Vec<i64> = superlattices_of_bounded_index(&l, 1, 6)
        .iter()
        .map(|m| m[0][0])
        .collect();
    found.sort();
    assert_eq!(found, vec![1, 2, 3, 6]);
    assert!(contains(&hnf(&[vec![2]], 1), &[6]));
}
