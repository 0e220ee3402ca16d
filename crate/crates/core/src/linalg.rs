//! Dense exact linear algebra over Q, plus a few helpers over F_p.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type QVec = Vec<BigRational>;
pub type QMat = Vec<QVec>;

pub fn zeros(r: usize, c: usize) -> QMat {
    vec![vec![BigRational::zero(); c]; r]
}

pub fn identity(n: usize) -> QMat {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = BigRational::one();
    }
    m
}

pub fn mat_mul(a: &QMat, b: &QMat) -> QMat {
    let n = a.len();
    let k = b.len();
    let m = if k == 0 { 0 } else { b[0].len() };
    let mut out = zeros(n, m);
    for i in 0..n {
        for t in 0..k {
            if a[i][t].is_zero() {
                continue;
            }
            for j in 0..m {
                if !b[t][j].is_zero() {
                    out[i][j] += &a[i][t] * &b[t][j];
                }
            }
        }
    }
    out
}

/// Row vector times matrix.
pub fn vec_mat(v: &[BigRational], m: &QMat) -> QVec {
    let cols = if m.is_empty() { 0 } else { m[0].len() };
    let mut out = vec![BigRational::zero(); cols];
    for (i, vi) in v.iter().enumerate() {
        if vi.is_zero() {
            continue;
        }
        for j in 0..cols {
            if !m[i][j].is_zero() {
                out[j] += vi * &m[i][j];
            }
        }
    }
    out
}

pub fn transpose(m: &QMat) -> QMat {
    if m.is_empty() {
        return vec![];
    }
    let (r, c) = (m.len(), m[0].len());
    (0..c).map(|j| (0..r).map(|i| m[i][j].clone()).collect()).collect()
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(m: &mut QMat) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return vec![];
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, piv);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &QMat) -> usize {
    let mut a = m.clone();
    rref(&mut a).len()
}

/// Basis (in RREF) of the row space.
pub fn row_space(m: &QMat) -> QMat {
    let mut a = m.clone();
    let p = rref(&mut a);
    a.truncate(p.len());
    a
}

/// Basis of {x : M x = 0} (right kernel).
pub fn kernel(m: &QMat) -> QMat {
    if m.is_empty() {
        return vec![];
    }
    let cols = m[0].len();
    let mut a = m.clone();
    let piv = rref(&mut a);
    let free: Vec<usize> = (0..cols).filter(|c| !piv.contains(c)).collect();
    let mut out = Vec::new();
    for &f in &free {
        let mut v = vec![BigRational::zero(); cols];
        v[f] = BigRational::one();
        for (r, &pc) in piv.iter().enumerate() {
            v[pc] = -a[r][f].clone();
        }
        out.push(v);
    }
    out
}

/// Basis of {x : x M = 0} (left kernel); rows of the result.
pub fn left_kernel(m: &QMat) -> QMat {
    kernel(&transpose(m))
}

pub fn inverse(m: &QMat) -> Option<QMat> {
    let n = m.len();
    let mut a: QMat = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    let piv = rref(&mut a);
    if piv.len() < n || piv[n - 1] != n - 1 {
        return None;
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn det(m: &QMat) -> BigRational {
    let n = m.len();
    let mut a = m.clone();
    let mut d = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return BigRational::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= &a[c][c];
        let inv = a[c][c].recip();
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] * &inv;
            for j in c..n {
                let t = &f * &a[c][j];
                a[i][j] -= t;
            }
        }
    }
    d
}

/// Coordinates of `v` in the span of the rows of `basis`, if it lies there.
pub fn solve_in_span(basis: &QMat, v: &[BigRational]) -> Option<QVec> {
    let k = basis.len();
    // solve c * basis = v : transpose system basis^T c^T = v^T
    let n = v.len();
    let mut aug: QMat = (0..n)
        .map(|j| {
            let mut r: QVec = (0..k).map(|i| basis[i][j].clone()).collect();
            r.push(v[j].clone());
            r
        })
        .collect();
    let piv = rref(&mut aug);
    if piv.contains(&k) {
        return None;
    }
    let mut c = vec![BigRational::zero(); k];
    for (r, &pc) in piv.iter().enumerate() {
        c[pc] = aug[r][k].clone();
    }
    Some(c)
}

/// Scale a nonzero rational vector to a primitive integer vector whose first
/// nonzero entry is positive. Returns the scaled vector and the factor used.
pub fn primitive(v: &[BigRational]) -> (QVec, BigRational) {
    let mut l = BigInt::one();
    for x in v {
        l = l.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| (x * BigRational::from_integer(l.clone())).to_integer()).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return (v.to_vec(), BigRational::one());
    }
    let first_neg = ints.iter().find(|x| !x.is_zero()).map(|x| x.is_negative()).unwrap_or(false);
    if first_neg {
        g = -g;
    }
    let f = BigRational::new(l, g);
    (v.iter().map(|x| x * &f).collect(), f)
}

pub fn to_q(v: &[i64]) -> QVec {
    v.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect()
}

/// Left kernel mod p of a small integer matrix; rows are basis vectors in [0,p).
pub fn left_kernel_mod_p(m: &[Vec<i64>], p: i64) -> Vec<Vec<i64>> {
    // transpose then perform right-kernel elimination mod p
    let rows = m.len();
    if rows == 0 {
        return vec![];
    }
    let cols = m[0].len();
    let mut a: Vec<Vec<i64>> = (0..cols).map(|j| (0..rows).map(|i| m[i][j].rem_euclid(p)).collect()).collect();
    let n = rows;
    let mut piv = Vec::new();
    let mut r = 0;
    for c in 0..n {
        if r == a.len() {
            break;
        }
        let Some(pr) = (r..a.len()).find(|&i| a[i][c] != 0) else { continue };
        a.swap(r, pr);
        let inv = crate::arith::mod_inv(a[r][c], p).unwrap();
        for x in a[r].iter_mut() {
            *x = (*x * inv).rem_euclid(p);
        }
        for i in 0..a.len() {
            if i != r && a[i][c] != 0 {
                let f = a[i][c];
                for j in 0..n {
                    a[i][j] = (a[i][j] - f * a[r][j]).rem_euclid(p);
                }
            }
        }
        piv.push(c);
        r += 1;
    }
    let mut out = Vec::new();
    for f in (0..n).filter(|c| !piv.contains(c)) {
        let mut v = vec![0i64; n];
        v[f] = 1;
        for (ri, &pc) in piv.iter().enumerate() {
            v[pc] = (-a[ri][f]).rem_euclid(p);
        }
        out.push(v);
    }
    out
}
