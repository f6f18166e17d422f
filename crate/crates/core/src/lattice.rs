//! Integer lattices in `Z^n`: Hermite and Smith normal forms, kernels,
//! saturation and enumeration of finite-index superlattices.
//!
//! Lattices are given by generating row vectors. Entries are `i64`; the
//! inputs here are exponent vectors of desk-scale size.

use num_integer::Integer;

pub type Vector = Vec<i64>;
pub type Matrix = Vec<Vec<i64>>;

fn row_sub(a: &mut [i64], b: &[i64], q: i64) {
    for (x, y) in a.iter_mut().zip(b) {
        *x -= q * y;
    }
}

/// Row-style Hermite normal form with the unimodular transform:
/// returns `(h, u)` where `u * rows` has `h` as its first `h.len()` rows and
/// zeros below. Pivots move strictly right, are positive, and entries above
/// a pivot lie in `[0, pivot)`.
pub fn hnf_with_transform(rows: &[Vector], n: usize) -> (Matrix, Matrix) {
    let m = rows.len();
    let mut a: Matrix = rows.to_vec();
    let mut u: Matrix = (0..m)
        .map(|i| (0..m).map(|j| i64::from(i == j)).collect())
        .collect();
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        loop {
            let piv = (r..m)
                .filter(|&i| a[i][c] != 0)
                .min_by_key(|&i| a[i][c].abs());
            let Some(p) = piv else { break };
            a.swap(r, p);
            u.swap(r, p);
            let mut done = true;
            for i in r + 1..m {
                if a[i][c] != 0 {
                    let q = Integer::div_floor(&a[i][c], &a[r][c]);
                    let (ar, ai) = (a[r].clone(), &mut a[i]);
                    row_sub(ai, &ar, q);
                    let ur = u[r].clone();
                    row_sub(&mut u[i], &ur, q);
                    if a[i][c] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if r < m && a[r][c] != 0 {
            if a[r][c] < 0 {
                a[r].iter_mut().for_each(|x| *x = -*x);
                u[r].iter_mut().for_each(|x| *x = -*x);
            }
            for i in 0..r {
                let q = Integer::div_floor(&a[i][c], &a[r][c]);
                if q != 0 {
                    let ar = a[r].clone();
                    row_sub(&mut a[i], &ar, q);
                    let ur = u[r].clone();
                    row_sub(&mut u[i], &ur, q);
                }
            }
            r += 1;
        }
    }
    a.truncate(r);
    (a, u)
}

/// Hermite normal form basis of the lattice spanned by `rows` in `Z^n`.
pub fn hnf(rows: &[Vector], n: usize) -> Matrix {
    hnf_with_transform(rows, n).0
}

/// Pivot column of each HNF row.
pub fn pivots(h: &[Vector]) -> Vec<usize> {
    h.iter()
        .map(|r| r.iter().position(|&x| x != 0).expect("zero row in HNF"))
        .collect()
}

/// Coordinates of `v` in an HNF basis, if `v` lies in the lattice.
pub fn coords_in(h: &[Vector], v: &[i64]) -> Option<Vector> {
    let mut w = v.to_vec();
    let mut out = Vec::with_capacity(h.len());
    for (row, p) in h.iter().zip(pivots(h)) {
        if w[p] % row[p] != 0 {
            return None;
        }
        let c = w[p] / row[p];
        row_sub(&mut w, row, c);
        out.push(c);
    }
    w.iter().all(|&x| x == 0).then_some(out)
}

pub fn contains(h: &[Vector], v: &[i64]) -> bool {
    coords_in(h, v).is_some()
}

/// True when every row of `inner` lies in the lattice with HNF `outer`.
pub fn is_sublattice(inner: &[Vector], outer: &[Vector]) -> bool {
    inner.iter().all(|v| contains(outer, v))
}

/// Integer kernel `{v in Z^n : E v = 0}` of the constraint rows `e`, in HNF.
pub fn kernel(e: &[Vector], n: usize) -> Matrix {
    if e.is_empty() {
        return identity(n);
    }
    let t: Matrix = (0..n).map(|j| e.iter().map(|row| row[j]).collect()).collect();
    let (h, u) = hnf_with_transform(&t, e.len());
    let rank = h.len();
    hnf(&u[rank..], n)
}

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

/// `Q L ∩ Z^n`.
pub fn saturation(l: &[Vector], n: usize) -> Matrix {
    let perp = kernel(l, n);
    kernel(&perp, n)
}

pub fn sum(a: &[Vector], b: &[Vector], n: usize) -> Matrix {
    let mut rows = a.to_vec();
    rows.extend(b.iter().cloned());
    hnf(&rows, n)
}

pub fn direct_sum(a: &[Vector], n1: usize, b: &[Vector], n2: usize) -> Matrix {
    let mut rows = Vec::new();
    for r in a {
        let mut v = r.clone();
        v.extend(std::iter::repeat_n(0, n2));
        rows.push(v);
    }
    for r in b {
        let mut v = vec![0; n1];
        v.extend(r.iter().copied());
        rows.push(v);
    }
    hnf(&rows, n1 + n2)
}

/// Smith data of a lattice `L ⊆ Z^n`: a basis `f_1..f_n` of `Z^n` and
/// factors `d_i` (zero for free directions) with `L = span{d_i f_i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Smith {
    pub basis: Matrix,
    pub factors: Vector,
    /// `coords = v * to_coords` expresses `v` in the basis `f`.
    pub to_coords: Matrix,
}

impl Smith {
    pub fn of(l: &[Vector], n: usize) -> Smith {
        let (d, _u, v, vinv) = smith_with_transforms(l, n);
        let mut factors = vec![0i64; n];
        for (i, x) in d.into_iter().enumerate() {
            factors[i] = x;
        }
        Smith {
            basis: vinv,
            factors,
            to_coords: v,
        }
    }

    /// Invariant factors greater than one.
    pub fn invariant_factors(&self) -> Vector {
        self.factors.iter().copied().filter(|&d| d > 1).collect()
    }

    pub fn torus_rank(&self) -> usize {
        self.factors.iter().filter(|&&d| d == 0).count()
    }

    pub fn torsion_order(&self) -> i64 {
        self.factors.iter().filter(|&&d| d > 0).product()
    }

    pub fn coords(&self, v: &[i64]) -> Vector {
        let n = v.len();
        (0..n)
            .map(|j| (0..n).map(|i| v[i] * self.to_coords[i][j]).sum())
            .collect()
    }
}

/// Smith form `U B V = diag(d)`, returning `(d, U, V, V^-1)`, with the
/// nonzero `d_i` positive and dividing each other in order.
pub fn smith_with_transforms(b: &[Vector], n: usize) -> (Vector, Matrix, Matrix, Matrix) {
    let m = b.len();
    let mut a: Matrix = b.to_vec();
    let mut u = identity(m);
    let mut v = identity(n);
    let mut vinv = identity(n);
    let mut diag = Vec::new();
    let mut t = 0;
    while t < m.min(n) {
        // Smallest nonzero entry of the trailing block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if a[i][j] != 0 && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        a.swap(t, bi);
        u.swap(t, bi);
        swap_cols(&mut a, t, bj);
        swap_cols(&mut v, t, bj);
        vinv.swap(t, bj);
        loop {
            let mut clean = true;
            for i in t + 1..m {
                if a[i][t] != 0 {
                    let q = Integer::div_floor(&a[i][t], &a[t][t]);
                    let at = a[t].clone();
                    row_sub(&mut a[i], &at, q);
                    let ut = u[t].clone();
                    row_sub(&mut u[i], &ut, q);
                    if a[i][t] != 0 {
                        clean = false;
                    }
                }
            }
            for j in t + 1..n {
                if a[t][j] != 0 {
                    let q = Integer::div_floor(&a[t][j], &a[t][t]);
                    col_sub(&mut a, j, t, q);
                    col_sub(&mut v, j, t, q);
                    // V^-1 <- E^-1 V^-1: row t += q row j
                    let vj = vinv[j].clone();
                    row_sub(&mut vinv[t], &vj, -q);
                    if a[t][j] != 0 {
                        clean = false;
                    }
                }
            }
            if clean {
                // Divisibility condition on the trailing block.
                let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| a[i][j] % a[t][t] != 0));
                match bad {
                    None => break,
                    Some(i) => {
                        let ai = a[i].clone();
                        row_sub(&mut a[t], &ai, -1);
                        let ui = u[i].clone();
                        row_sub(&mut u[t], &ui, -1);
                    }
                }
            }
            // Bring the smallest nonzero entry of row/col t to the pivot.
            let mut best = (t, t);
            for i in t..m {
                if a[i][t] != 0 && a[i][t].abs() < a[best.0][best.1].abs() {
                    best = (i, t);
                }
            }
            for j in t..n {
                if a[t][j] != 0 && a[t][j].abs() < a[best.0][best.1].abs() {
                    best = (t, j);
                }
            }
            if a[t][t] == 0 || best != (t, t) {
                if best.0 != t {
                    a.swap(t, best.0);
                    u.swap(t, best.0);
                }
                if best.1 != t {
                    swap_cols(&mut a, t, best.1);
                    swap_cols(&mut v, t, best.1);
                    vinv.swap(t, best.1);
                }
            }
        }
        if a[t][t] < 0 {
            a[t].iter_mut().for_each(|x| *x = -*x);
            u[t].iter_mut().for_each(|x| *x = -*x);
        }
        diag.push(a[t][t]);
        t += 1;
    }
    (diag, u, v, vinv)
}

fn swap_cols(a: &mut Matrix, i: usize, j: usize) {
    if i == j {
        return;
    }
    for row in a.iter_mut() {
        row.swap(i, j);
    }
}

/// Column `j -= q * column t`.
fn col_sub(a: &mut Matrix, j: usize, t: usize, q: i64) {
    for row in a.iter_mut() {
        row[j] -= q * row[t];
    }
}

/// A basis `g_1..g_k` of the lattice `outer` adapted to `inner ⊆ outer`,
/// with `inner = span{d_i g_i}` (`d_i = 0` for directions of `outer` not
/// met by `inner`).
pub fn smith_relative(outer: &[Vector], inner: &[Vector], n: usize) -> (Matrix, Vector) {
    let outer = hnf(outer, n);
    let k = outer.len();
    let coords: Matrix = inner
        .iter()
        .map(|v| coords_in(&outer, v).expect("inner lattice not contained in outer"))
        .collect();
    let (d, _u, _v, vinv) = smith_with_transforms(&coords, k);
    let basis: Matrix = vinv
        .iter()
        .map(|row| {
            (0..n)
                .map(|c| row.iter().zip(&outer).map(|(x, o)| x * o[c]).sum())
                .collect()
        })
        .collect();
    let mut factors = vec![0i64; k];
    for (i, x) in d.into_iter().enumerate() {
        factors[i] = x;
    }
    (basis, factors)
}

/// Absolute determinant of a square integer matrix (Bareiss).
pub fn det_abs(m: &[Vector]) -> i64 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let h = hnf(m, n);
    if h.len() < n {
        return 0;
    }
    (0..n).map(|i| h[i][i]).product()
}

/// Index `[Z^n : M]` for a full-rank lattice `M`, `None` if not full rank.
pub fn index(m: &[Vector], n: usize) -> Option<i64> {
    let h = hnf(m, n);
    (h.len() == n).then(|| (0..n).map(|i| h[i][i]).product())
}

/// All full-rank lattices `M` with `L ⊆ M ⊆ Z^n` and `[Z^n : M] <= bound`,
/// as HNF bases, ordered by index then lexicographically.
pub fn superlattices_of_bounded_index(l: &[Vector], n: usize, bound: i64) -> Vec<Matrix> {
    let mut out = Vec::new();
    let mut current: Matrix = vec![vec![0; n]; n];
    enumerate_hnf(0, n, bound, &mut current, &mut |m| {
        if is_sublattice(l, m) {
            out.push(m.to_vec());
        }
    });
    out.sort_by_key(|m| (index(m, n).unwrap(), m.clone()));
    out
}

fn enumerate_hnf(row: usize, n: usize, budget: i64, cur: &mut Matrix, f: &mut dyn FnMut(&[Vector])) {
    if row == n {
        f(cur);
        return;
    }
    for d in 1..=budget {
        if budget / d == 0 {
            break;
        }
        cur[row] = vec![0; n];
        cur[row][row] = d;
        // Entries above this pivot in earlier rows lie in [0, d).
        let mut choices = vec![0i64; row];
        loop {
            for (i, &c) in choices.iter().enumerate() {
                cur[i][row] = c;
            }
            enumerate_hnf(row + 1, n, budget / d, cur, f);
            // advance odometer
            let mut k = 0;
            while k < row {
                choices[k] += 1;
                if choices[k] < d {
                    break;
                }
                choices[k] = 0;
                k += 1;
            }
            if k == row {
                break;
            }
        }
        for i in 0..row {
            cur[i][row] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hnf_of_simple_lattice() {
        let h = hnf(&[vec![4, 6], vec![2, 2]], 2);
        assert_eq!(h, vec![vec![2, 0], vec![0, 2]]);
    }

    #[test]
    fn kernel_of_row() {
        let k = kernel(&[vec![1, 1, 1]], 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert_eq!(v.iter().sum::<i64>(), 0);
        }
    }

    #[test]
    fn smith_basis_spans_lattice() {
        let l = vec![vec![2, 4], vec![6, 8]];
        let s = Smith::of(&l, 2);
        assert_eq!(s.factors, vec![2, 4]);
        let h = hnf(&l, 2);
        let gens: Matrix = s
            .basis
            .iter()
            .zip(&s.factors)
            .map(|(f, d)| f.iter().map(|x| x * d).collect())
            .collect();
        assert_eq!(hnf(&gens, 2), h);
        assert_eq!(det_abs(&s.basis), 1);
        for (i, f) in s.basis.iter().enumerate() {
            let c = s.coords(f);
            assert_eq!(c, (0..2).map(|j| i64::from(i == j)).collect::<Vec<_>>());
        }
    }

    #[test]
    fn superlattices_of_two_z() {
        let ms = superlattices_of_bounded_index(&[vec![2]], 1, 12);
        assert_eq!(ms, vec![vec![vec![1]], vec![vec![2]]]);
    }

    #[test]
    fn saturation_of_scaled() {
        assert_eq!(saturation(&[vec![2, 4]], 2), vec![vec![1, 2]]);
    }

    #[test]
    fn relative_smith() {
        let (g, d) = smith_relative(&[vec![1, 0], vec![0, 1]], &[vec![2, 0]], 2);
        assert_eq!(d, vec![2, 0]);
        assert_eq!(hnf(&[g[0].iter().map(|x| x * 2).collect()], 2), vec![vec![2, 0]]);
    }
}
