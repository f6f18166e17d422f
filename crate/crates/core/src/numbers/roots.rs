//! Root finding for polynomials with real algebraic coefficients.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::real::{self, RealAlgebraic};
use super::zpoly::{primitive_from_q, trim_q};
use super::{check_degree, NumberError};
use crate::poly::Polynomial;

/// Sign of a real algebraic number as `-1`, `0` or `1`.
pub fn ralg_sign(a: &RealAlgebraic) -> i32 {
    a.signum()
}

/// The real `n`-th root of `a`; for even `n` only when `a >= 0`, in which
/// case the non-negative root is returned.
pub fn nth_root_real(a: &RealAlgebraic, n: u32) -> Option<RealAlgebraic> {
    real::nth_root(a, n).unwrap_or_else(|e| panic!("{e}"))
}

/// All real roots of `p`, increasing, each repeated by its multiplicity.
pub fn real_roots(p: &Polynomial<RealAlgebraic>) -> Result<Vec<RealAlgebraic>, NumberError> {
    let mut out = Vec::new();
    for (mult, factor) in p_squarefree(p)? {
        for r in real_roots_distinct(&factor)? {
            for _ in 0..mult {
                out.push(r.clone());
            }
        }
    }
    out.sort();
    Ok(out)
}

fn p_squarefree(
    p: &Polynomial<RealAlgebraic>,
) -> Result<Vec<(u32, Polynomial<RealAlgebraic>)>, NumberError> {
    if p.is_zero() {
        return Err(NumberError::ZeroPolynomial);
    }
    Ok(p.squarefree_decomposition())
}

/// Distinct real roots of a nonzero polynomial, increasing.
pub fn real_roots_distinct(
    p: &Polynomial<RealAlgebraic>,
) -> Result<Vec<RealAlgebraic>, NumberError> {
    if p.is_zero() {
        return Err(NumberError::ZeroPolynomial);
    }
    if p.deg() == 0 {
        return Ok(Vec::new());
    }
    let rational: Option<Vec<BigRational>> = p.coeffs().iter().map(|c| c.to_rational()).collect();
    let candidates = match rational {
        Some(q) => RealAlgebraic::roots_of_z(&primitive_from_q(&q)),
        None => RealAlgebraic::roots_of_z(&primitive_from_q(&norm_polynomial(p)?)),
    };
    let mut roots: Vec<RealAlgebraic> = candidates
        .into_iter()
        .filter(|r| p.eval(r).is_zero())
        .collect();
    roots.dedup();
    Ok(roots)
}

/// A nonzero rational polynomial divisible by `p`: the product of all
/// conjugates of `p` obtained by letting each algebraic coefficient range
/// independently over the roots of its minimal polynomial.
///
/// Computed as `det(sum_i x^i M_i)` where `M_i` is multiplication by the
/// `i`-th coefficient on the tensor product of the coefficient fields, by
/// evaluation at integer points and interpolation.
fn norm_polynomial(p: &Polynomial<RealAlgebraic>) -> Result<Vec<BigRational>, NumberError> {
    // Distinct irrational coefficients and their minimal polynomials.
    let mut gens: Vec<RealAlgebraic> = Vec::new();
    for c in p.coeffs() {
        if !c.is_rational() && !gens.contains(c) {
            gens.push(c.clone());
        }
    }
    let dims: Vec<usize> = gens.iter().map(|g| g.degree()).collect();
    let dim: usize = dims.iter().product();
    check_degree(dim * p.deg())?;
    let companions: Vec<Vec<Vec<BigRational>>> = gens.iter().map(|g| companion(&g.minpoly())).collect();
    // Multiplication matrix of each coefficient on the tensor product.
    let coeff_mats: Vec<Vec<Vec<BigRational>>> = p
        .coeffs()
        .iter()
        .map(|c| match c.to_rational() {
            Some(q) => scalar_matrix(dim, &q),
            None => {
                let j = gens.iter().position(|g| g == c).unwrap();
                kron_factor(&dims, j, &companions[j])
            }
        })
        .collect();
    let deg = dim * p.deg();
    let xs: Vec<BigRational> = (0..=deg as i64).map(|v| BigRational::from_integer(BigInt::from(v))).collect();
    let ys: Vec<BigRational> = xs
        .iter()
        .map(|x| {
            let mut m = scalar_matrix(dim, &BigRational::zero());
            let mut xp = BigRational::one();
            for cm in &coeff_mats {
                for (r, row) in cm.iter().enumerate() {
                    for (c, v) in row.iter().enumerate() {
                        if !v.is_zero() {
                            m[r][c] += v * &xp;
                        }
                    }
                }
                xp *= x;
            }
            determinant(m)
        })
        .collect();
    Ok(trim_q(interpolate(&xs, &ys)))
}

fn scalar_matrix(n: usize, q: &BigRational) -> Vec<Vec<BigRational>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { q.clone() } else { BigRational::zero() })
                .collect()
        })
        .collect()
}

/// Companion matrix of `y -> alpha * y` on `Q[y]/(m)` in the monomial basis.
fn companion(m: &[BigInt]) -> Vec<Vec<BigRational>> {
    let d = m.len() - 1;
    let lc = BigRational::from_integer(m[d].clone());
    let mut out = vec![vec![BigRational::zero(); d]; d];
    for i in 0..d {
        // column i is the image of y^i
        if i + 1 < d {
            out[i + 1][i] = BigRational::one();
        } else {
            for r in 0..d {
                out[r][i] = -BigRational::from_integer(m[r].clone()) / &lc;
            }
        }
    }
    out
}

/// `I ⊗ ... ⊗ C ⊗ ... ⊗ I` with `C` in slot `j`.
fn kron_factor(dims: &[usize], j: usize, c: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let mut acc = vec![vec![BigRational::one()]];
    for (slot, &d) in dims.iter().enumerate() {
        let f = if slot == j {
            c.to_vec()
        } else {
            scalar_matrix(d, &BigRational::one())
        };
        acc = kron(&acc, &f);
    }
    acc
}

fn kron(a: &[Vec<BigRational>], b: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let (n, m) = (a.len(), b.len());
    let mut out = vec![vec![BigRational::zero(); n * m]; n * m];
    for i in 0..n {
        for j in 0..n {
            if a[i][j].is_zero() {
                continue;
            }
            for k in 0..m {
                for l in 0..m {
                    out[i * m + k][j * m + l] = &a[i][j] * &b[k][l];
                }
            }
        }
    }
    out
}

pub(crate) fn determinant(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &p;
            for c in col..n {
                let v = &f * &m[col][c];
                m[r][c] -= v;
            }
        }
    }
    det
}

/// Newton interpolation; returns ascending coefficients.
fn interpolate(xs: &[BigRational], ys: &[BigRational]) -> Vec<BigRational> {
    let n = xs.len();
    let mut coef = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            coef[i] = (&coef[i] - &coef[i - 1]) / (&xs[i] - &xs[i - j]);
        }
    }
    let mut poly = vec![BigRational::zero(); n];
    for i in (0..n).rev() {
        // poly = poly * (x - xs[i]) + coef[i]
        let mut next = vec![BigRational::zero(); n];
        for k in 0..n - 1 {
            next[k + 1] += &poly[k];
            next[k] -= &poly[k] * &xs[i];
        }
        next[0] += &coef[i];
        poly = next;
    }
    poly
}
