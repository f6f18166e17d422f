//! Factorization of integer polynomials (Berlekamp mod p, Hensel lifting,
//! Zassenhaus recombination).

use std::collections::HashMap;
use std::sync::{LazyLock, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::zpoly::{primitive, primitive_from_q, trim_z, ZPoly};
use crate::poly::Polynomial;

type Fp = Vec<u64>;

fn fp_trim(mut a: Fp) -> Fp {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn fp_from_z(a: &[BigInt], p: u64) -> Fp {
    let pb = BigInt::from(p);
    fp_trim(
        a.iter()
            .map(|c| c.mod_floor(&pb).to_u64().unwrap())
            .collect(),
    )
}

fn fp_inv(a: u64, p: u64) -> u64 {
    fp_pow(a, p - 2, p)
}

fn fp_pow(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    r
}

fn fp_mul(a: &[u64], b: &[u64], p: u64) -> Fp {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    fp_trim(out)
}

fn fp_sub(a: &[u64], b: &[u64], p: u64) -> Fp {
    let n = a.len().max(b.len());
    fp_trim(
        (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect(),
    )
}

fn fp_add(a: &[u64], b: &[u64], p: u64) -> Fp {
    let n = a.len().max(b.len());
    fp_trim(
        (0..n)
            .map(|i| (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % p)
            .collect(),
    )
}

fn fp_divrem(a: &[u64], b: &[u64], p: u64) -> (Fp, Fp) {
    let b = fp_trim(b.to_vec());
    assert!(!b.is_empty());
    let mut r = fp_trim(a.to_vec());
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let inv = fp_inv(*b.last().unwrap(), p);
    let db = b.len() - 1;
    let mut q = vec![0u64; r.len() - db];
    for i in (0..q.len()).rev() {
        let c = r[i + db] * inv % p;
        if c == 0 {
            continue;
        }
        q[i] = c;
        for (j, &bc) in b.iter().enumerate() {
            r[i + j] = (r[i + j] + p - c * bc % p) % p;
        }
    }
    r.truncate(db);
    (fp_trim(q), fp_trim(r))
}

fn fp_monic(a: &[u64], p: u64) -> Fp {
    match a.last() {
        None => Vec::new(),
        Some(&l) => {
            let inv = fp_inv(l, p);
            a.iter().map(|&c| c * inv % p).collect()
        }
    }
}

fn fp_gcd(a: &[u64], b: &[u64], p: u64) -> Fp {
    let mut x = fp_trim(a.to_vec());
    let mut y = fp_trim(b.to_vec());
    while !y.is_empty() {
        let r = fp_divrem(&x, &y, p).1;
        x = y;
        y = r;
    }
    fp_monic(&x, p)
}

/// Returns `(s, t)` with `s*a + t*b = 1 (mod p)`; requires coprime inputs.
fn fp_bezout(a: &[u64], b: &[u64], p: u64) -> (Fp, Fp) {
    let (mut r0, mut r1) = (fp_trim(a.to_vec()), fp_trim(b.to_vec()));
    let (mut s0, mut s1): (Fp, Fp) = (vec![1], Vec::new());
    let (mut t0, mut t1): (Fp, Fp) = (Vec::new(), vec![1]);
    while !r1.is_empty() {
        let (q, r) = fp_divrem(&r0, &r1, p);
        let s2 = fp_sub(&s0, &fp_mul(&q, &s1, p), p);
        let t2 = fp_sub(&t0, &fp_mul(&q, &t1, p), p);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s2;
        t0 = t1;
        t1 = t2;
    }
    assert_eq!(r0.len(), 1, "bezout on non-coprime polynomials");
    let inv = fp_inv(r0[0], p);
    (
        s0.iter().map(|&c| c * inv % p).collect(),
        t0.iter().map(|&c| c * inv % p).collect(),
    )
}

fn fp_derivative(a: &[u64], p: u64) -> Fp {
    fp_trim(
        a.iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| (i as u64 % p) * c % p)
            .collect(),
    )
}

/// Null space basis of the transpose of `m` (n x n) over F_p: vectors `v`
/// with `v * m = 0`.
fn left_null_space(m: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let n = m.len();
    // Transpose so we solve (m^T) v = 0 with row reduction.
    let mut a: Vec<Vec<u64>> = (0..n).map(|i| (0..n).map(|j| m[j][i]).collect()).collect();
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(pr) = (row..n).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(row, pr);
        let inv = fp_inv(a[row][col], p);
        for c in 0..n {
            a[row][c] = a[row][c] * inv % p;
        }
        for r in 0..n {
            if r != row && a[r][col] != 0 {
                let f = a[r][col];
                for c in 0..n {
                    a[r][c] = (a[r][c] + p - f * a[row][c] % p) % p;
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivot_cols.contains(c)).collect();
    let mut basis = Vec::new();
    for &fc in &free {
        let mut v = vec![0u64; n];
        v[fc] = 1;
        for (r, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = (p - a[r][fc]) % p;
        }
        basis.push(v);
    }
    basis
}

/// Berlekamp factorization of a monic square-free polynomial over F_p.
fn berlekamp(f: &[u64], p: u64) -> Vec<Fp> {
    let n = f.len() - 1;
    if n <= 1 {
        return vec![f.to_vec()];
    }
    // Rows: x^(i p) mod f.
    let xp = {
        let mut base: Fp = vec![0, 1];
        let mut acc: Fp = vec![1];
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = fp_divrem(&fp_mul(&acc, &base, p), f, p).1;
            }
            base = fp_divrem(&fp_mul(&base, &base, p), f, p).1;
            e >>= 1;
        }
        acc
    };
    let mut q = Vec::with_capacity(n);
    let mut cur: Fp = vec![1];
    for i in 0..n {
        let mut row = vec![0u64; n];
        for (j, &c) in cur.iter().enumerate() {
            row[j] = c;
        }
        row[i] = (row[i] + p - 1) % p;
        q.push(row);
        cur = fp_divrem(&fp_mul(&cur, &xp, p), f, p).1;
    }
    let basis = left_null_space(&q, p);
    let k = basis.len();
    let mut factors = vec![f.to_vec()];
    if k == 1 {
        return factors;
    }
    for v in basis.iter() {
        let v = fp_trim(v.clone());
        if v.len() <= 1 {
            continue;
        }
        let mut next = Vec::new();
        for u in factors {
            if u.len() <= 2 {
                next.push(u);
                continue;
            }
            let mut parts = vec![u];
            for s in 0..p {
                let mut new_parts = Vec::new();
                for w in parts {
                    if w.len() <= 2 {
                        new_parts.push(w);
                        continue;
                    }
                    let vs = fp_sub(&v, &[s], p);
                    let g = fp_gcd(&w, &vs, p);
                    if g.len() > 1 && g.len() < w.len() {
                        let h = fp_divrem(&w, &g, p).0;
                        new_parts.push(g);
                        new_parts.push(fp_monic(&h, p));
                    } else {
                        new_parts.push(w);
                    }
                }
                parts = new_parts;
            }
            next.extend(parts);
        }
        factors = next;
        if factors.len() == k {
            break;
        }
    }
    factors
}

fn small_primes() -> impl Iterator<Item = u64> {
    (3u64..).filter(|&n| (2..).take_while(|d| d * d <= n).all(|d| n % d != 0))
}

// ---- arithmetic modulo m = p^k with BigInt coefficients -------------------

fn zm_reduce(a: &[BigInt], m: &BigInt) -> ZPoly {
    trim_z(a.iter().map(|c| c.mod_floor(m)).collect())
}

fn zm_mul(a: &[BigInt], b: &[BigInt], m: &BigInt) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    zm_reduce(&out, m)
}

fn zm_sub(a: &[BigInt], b: &[BigInt], m: &BigInt) -> ZPoly {
    let n = a.len().max(b.len());
    let z = BigInt::zero();
    zm_reduce(
        &(0..n)
            .map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z))
            .collect::<Vec<_>>(),
        m,
    )
}

fn fp_to_z(a: &[u64]) -> ZPoly {
    a.iter().map(|&c| BigInt::from(c)).collect()
}

/// Lifts `f = g0 * h0 (mod p)` to `f = g * h (mod p^k)` with `g` monic.
fn hensel_pair(f: &[BigInt], g0: &[u64], h0: &[u64], p: u64, k: u32) -> (ZPoly, ZPoly) {
    let pb = BigInt::from(p);
    let modulus = pb.pow(k);
    let (s, t) = fp_bezout(g0, h0, p);
    let mut g = fp_to_z(g0);
    let mut h = fp_to_z(h0);
    // Pin the leading coefficient of h to lc(f) mod p^k.
    let lc = f.last().unwrap().mod_floor(&modulus);
    *h.last_mut().unwrap() = lc;
    let mut pj = pb.clone();
    for _ in 1..k {
        let next = &pj * &pb;
        let e = zm_sub(&zm_reduce(f, &next), &zm_mul(&g, &h, &next), &next);
        let e_div: Fp = fp_trim(
            e.iter()
                .map(|c| {
                    debug_assert!((c % &pj).is_zero());
                    (c / &pj).mod_floor(&pb).to_u64().unwrap()
                })
                .collect(),
        );
        if !e_div.is_empty() {
            let te = fp_mul(&t, &e_div, p);
            let (q, dg) = fp_divrem(&te, g0, p);
            let dh = fp_add(&fp_mul(&s, &e_div, p), &fp_mul(&q, h0, p), p);
            g = zm_reduce(
                &add_scaled(&g, &fp_to_z(&dg), &pj),
                &next,
            );
            h = zm_reduce(
                &add_scaled(&h, &fp_to_z(&dh), &pj),
                &next,
            );
        }
        pj = next;
    }
    (g, h)
}

fn add_scaled(a: &[BigInt], b: &[BigInt], s: &BigInt) -> ZPoly {
    let n = a.len().max(b.len());
    let z = BigInt::zero();
    (0..n)
        .map(|i| a.get(i).unwrap_or(&z) + b.get(i).unwrap_or(&z) * s)
        .collect()
}

/// Multi-factor Hensel lifting by peeling one factor at a time.
fn hensel_multi(f: &[BigInt], factors: &[Fp], p: u64, k: u32) -> Vec<ZPoly> {
    let modulus = BigInt::from(p).pow(k);
    if factors.len() == 1 {
        // Monic representative of f mod p^k.
        let lc = f.last().unwrap().mod_floor(&modulus);
        let inv = lc.modinv(&modulus).expect("lc invertible mod p^k");
        return vec![zm_reduce(
            &f.iter().map(|c| c * &inv).collect::<Vec<_>>(),
            &modulus,
        )];
    }
    let lc_p = f.last().unwrap().mod_floor(&BigInt::from(p)).to_u64().unwrap();
    let mut rest: Fp = vec![lc_p];
    for fac in &factors[1..] {
        rest = fp_mul(&rest, fac, p);
    }
    let (g, h) = hensel_pair(f, &factors[0], &rest, p, k);
    let mut out = vec![g];
    out.extend(hensel_multi(&h, &factors[1..], p, k));
    out
}

fn symmetric(a: &[BigInt], m: &BigInt) -> ZPoly {
    let half = m / 2;
    trim_z(
        a.iter()
            .map(|c| {
                let r = c.mod_floor(m);
                if r > half {
                    r - m
                } else {
                    r
                }
            })
            .collect(),
    )
}

/// Exact division over Z; `None` unless `d` divides `f` with integral quotient.
fn z_exact_div(f: &[BigInt], d: &[BigInt]) -> Option<ZPoly> {
    let lc = d.last()?;
    let mut r = f.to_vec();
    if r.len() < d.len() {
        return None;
    }
    let dd = d.len() - 1;
    let mut q = vec![BigInt::zero(); r.len() - dd];
    for i in (0..q.len()).rev() {
        let (c, rem) = r[i + dd].div_rem(lc);
        if !rem.is_zero() {
            return None;
        }
        for (j, dc) in d.iter().enumerate() {
            r[i + j] -= &c * dc;
        }
        q[i] = c;
    }
    r.iter().all(|c| c.is_zero()).then(|| trim_z(q))
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Irreducible factors of a primitive square-free integer polynomial.
fn factor_squarefree(f: &[BigInt]) -> Vec<ZPoly> {
    let f = primitive(f);
    let n = f.len() - 1;
    if n <= 1 {
        return vec![f];
    }
    let lc = f.last().unwrap().clone();
    // Pick a good prime with few modular factors.
    let mut best: Option<(u64, Vec<Fp>)> = None;
    let mut tried = 0;
    for p in small_primes() {
        if (&lc % BigInt::from(p)).is_zero() {
            continue;
        }
        let fp = fp_from_z(&f, p);
        if fp.len() != f.len() {
            continue;
        }
        let d = fp_derivative(&fp, p);
        if fp_gcd(&fp, &d, p).len() != 1 {
            continue;
        }
        let facs = berlekamp(&fp_monic(&fp, p), p);
        if facs.len() == 1 {
            return vec![f];
        }
        if best.as_ref().is_none_or(|(_, b)| facs.len() < b.len()) {
            best = Some((p, facs));
        }
        tried += 1;
        if tried >= 5 {
            break;
        }
    }
    let (p, modular) = best.unwrap();
    // Mignotte-style bound on coefficients of lc * (monic factor).
    let maxc = f.iter().map(|c| c.abs()).max().unwrap();
    let bound = lc.abs() * BigInt::from(2u32).pow(n as u32) * BigInt::from(n + 1) * maxc;
    let target = bound * 2 + 1;
    let pb = BigInt::from(p);
    let mut k = 1u32;
    while pb.pow(k) <= target {
        k += 1;
    }
    let modulus = pb.pow(k);
    let mut lifted = hensel_multi(&f, &modular, p, k);
    let mut f_cur = f.clone();
    let mut found = Vec::new();
    let mut s = 1;
    while 2 * s <= lifted.len() {
        let mut hit = None;
        for combo in combinations(lifted.len(), s) {
            let lc_cur = f_cur.last().unwrap().clone();
            let mut g: ZPoly = vec![lc_cur.mod_floor(&modulus)];
            for &i in &combo {
                g = zm_mul(&g, &lifted[i], &modulus);
            }
            let g = primitive(&symmetric(&g, &modulus));
            if let Some(q) = z_exact_div(&f_cur, &g) {
                hit = Some((combo, g, q));
                break;
            }
        }
        match hit {
            Some((combo, g, q)) => {
                found.push(g);
                f_cur = q;
                lifted = lifted
                    .into_iter()
                    .enumerate()
                    .filter(|(i, _)| !combo.contains(i))
                    .map(|(_, x)| x)
                    .collect();
            }
            None => s += 1,
        }
    }
    if f_cur.len() > 1 {
        found.push(primitive(&f_cur));
    }
    found
}

static FACTOR_CACHE: LazyLock<Mutex<HashMap<ZPoly, Vec<(ZPoly, u32)>>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

/// Irreducible factorization over Q of a nonzero rational polynomial, up to
/// a constant: returns primitive irreducible integer factors with
/// multiplicities, sorted by (degree, coefficients).
pub fn factor_q(f: &[BigRational]) -> Vec<(ZPoly, u32)> {
    let z = primitive_from_q(f);
    factor_z(&z)
}

pub fn factor_z(f: &[BigInt]) -> Vec<(ZPoly, u32)> {
    let z = primitive(f);
    if z.len() <= 1 {
        return Vec::new();
    }
    if let Some(hit) = FACTOR_CACHE.lock().unwrap().get(&z) {
        return hit.clone();
    }
    let qp: Polynomial<BigRational> = Polynomial::new(
        z.iter().map(|c| BigRational::from_integer(c.clone())).collect(),
    );
    let mut out = Vec::new();
    for (mult, part) in qp.squarefree_decomposition() {
        let zp = primitive_from_q(part.coeffs());
        for fac in factor_squarefree(&zp) {
            out.push((fac, mult));
        }
    }
    out.sort_by(|a, b| (a.0.len(), &a.0).cmp(&(b.0.len(), &b.0)));
    FACTOR_CACHE.lock().unwrap().insert(z, out.clone());
    out
}

/// True when `f` (nonzero, degree >= 1) is irreducible over Q.
pub fn is_irreducible(f: &[BigInt]) -> bool {
    let facs = factor_z(f);
    facs.len() == 1 && facs[0].1 == 1
}

#[allow(dead_code)]
fn is_one(a: &[BigInt]) -> bool {
    a.len() == 1 && a[0].is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(v: &[i64]) -> ZPoly {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    fn mul(a: &[BigInt], b: &[BigInt]) -> ZPoly {
        let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }

    #[test]
    fn irreducible_quartic() {
        // x^4 - 10 x^2 + 1, the minimal polynomial of sqrt2 + sqrt3
        let f = z(&[1, 0, -10, 0, 1]);
        assert!(is_irreducible(&f));
    }

    #[test]
    fn splits_product() {
        let a = z(&[-2, 0, 1]);
        let b = z(&[1, 1, 1]);
        let c = z(&[-3, 2]);
        let f = mul(&mul(&a, &b), &c);
        let facs = factor_z(&f);
        let mut got: Vec<ZPoly> = facs.iter().map(|(p, _)| p.clone()).collect();
        got.sort();
        let mut want = vec![a, b, c];
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn repeated_factors() {
        let a = z(&[-1, 1]);
        let f = mul(&mul(&a, &a), &z(&[5, 0, 1]));
        let facs = factor_z(&f);
        assert_eq!(facs, vec![(z(&[-1, 1]), 2), (z(&[5, 0, 1]), 1)]);
    }

    #[test]
    fn swinnerton_dyer_like_splitting_mod_every_prime() {
        // x^4 + 1 is irreducible over Q but splits modulo every prime.
        assert!(is_irreducible(&z(&[1, 0, 0, 0, 1])));
        // (x^4+1)(x^2-3)
        let f = mul(&z(&[1, 0, 0, 0, 1]), &z(&[-3, 0, 1]));
        assert_eq!(factor_z(&f).len(), 2);
    }

    #[test]
    fn cyclotomic_twelve() {
        // x^12 - 1 = product of cyclotomic polynomials Phi_d, d | 12
        let mut f = vec![BigInt::zero(); 13];
        f[0] = BigInt::from(-1);
        f[12] = BigInt::from(1);
        let facs = factor_z(&f);
        assert_eq!(facs.len(), 6);
        let degs: Vec<usize> = facs.iter().map(|(p, _)| p.len() - 1).collect();
        assert_eq!(degs, vec![1, 1, 2, 2, 2, 4]);
    }
}
