//! Positive definite integral ternary quadratic forms
//! Q = a1 x^2 + a2 y^2 + a3 z^2 + a23 yz + a13 xz + a12 xy.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factor, legendre};
use crate::enumerate::Enumerator;
use crate::error::{Error, Result};
use crate::qalg::{normx_form, Order};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TernaryForm {
    pub a1: i64,
    pub a2: i64,
    pub a3: i64,
    pub a23: i64,
    pub a13: i64,
    pub a12: i64,
}

impl fmt::Display for TernaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {}, {}, {})", self.a1, self.a2, self.a3, self.a23, self.a13, self.a12)
    }
}

type Gram = [[i64; 3]; 3];

fn det3(g: &Gram) -> i128 {
    let g: [[i128; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| g[i][j] as i128));
    g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
        + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0])
}

fn bil(g: &Gram, x: &[i64; 3], y: &[i64; 3]) -> i64 {
    let mut t = 0i64;
    for i in 0..3 {
        for j in 0..3 {
            t += g[i][j] * x[i] * y[j];
        }
    }
    t
}

fn det_vecs(a: &[i64; 3], b: &[i64; 3], c: &[i64; 3]) -> i64 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0])
}

fn cross(a: &[i64; 3], b: &[i64; 3]) -> [i64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

impl TernaryForm {
    pub fn new(c: [i64; 6]) -> TernaryForm {
        TernaryForm { a1: c[0], a2: c[1], a3: c[2], a23: c[3], a13: c[4], a12: c[5] }
    }

    pub fn coeffs(&self) -> [i64; 6] {
        [self.a1, self.a2, self.a3, self.a23, self.a13, self.a12]
    }

    /// Matrix of 2Q.
    pub fn gram(&self) -> Gram {
        [[2 * self.a1, self.a12, self.a13], [self.a12, 2 * self.a2, self.a23], [self.a13, self.a23, 2 * self.a3]]
    }

    pub fn from_gram(g: &Gram) -> TernaryForm {
        TernaryForm { a1: g[0][0] / 2, a2: g[1][1] / 2, a3: g[2][2] / 2, a23: g[1][2], a13: g[0][2], a12: g[0][1] }
    }

    pub fn value(&self, x: &[i64; 3]) -> i64 {
        bil(&self.gram(), x, x) / 2
    }

    /// det of the matrix of 2Q (4 times the usual discriminant up to sign).
    pub fn det2(&self) -> i128 {
        det3(&self.gram())
    }

    pub fn is_positive_definite(&self) -> bool {
        let g = self.gram();
        g[0][0] > 0 && (g[0][0] as i128 * g[1][1] as i128 - (g[0][1] as i128).pow(2)) > 0 && det3(&g) > 0
    }

    pub fn content(&self) -> i64 {
        self.coeffs().iter().fold(0i64, |g, &c| g.gcd(&c))
    }

    pub fn is_primitive(&self) -> bool {
        self.content() == 1
    }

    /// Substitution x -> U x, where the columns of U are the new basis vectors.
    pub fn transform(&self, u: &[[i64; 3]; 3]) -> TernaryForm {
        let g = self.gram();
        let cols: [[i64; 3]; 3] = std::array::from_fn(|k| [u[0][k], u[1][k], u[2][k]]);
        let ng: Gram = std::array::from_fn(|i| std::array::from_fn(|j| bil(&g, &cols[i], &cols[j])));
        TernaryForm::from_gram(&ng)
    }

    fn enumerator(&self) -> Enumerator {
        let g = self.gram();
        let rows: Vec<Vec<i64>> = g.iter().map(|r| r.to_vec()).collect();
        Enumerator::new(&rows).expect("positive definite ternary form")
    }

    /// Canonical representative of the GL_3(Z) class.
    ///
    /// The first three coefficients are the successive minima. Among all bases
    /// realising them the lexicographically least (a23, a13, a12) is taken.
    pub fn reduce(&self) -> TernaryForm {
        let pre = self.size_reduce();
        let g = pre.gram();
        let bound = pre.a1.max(pre.a2).max(pre.a3) as u64;
        let mut vecs: Vec<([i64; 3], i64)> = Vec::new();
        pre.enumerator().for_each(bound, |x, v| vecs.push(([x[0], x[1], x[2]], v as i64)));
        vecs.sort();
        vecs.sort_by_key(|e| e.1);
        // successive minima by rank growth
        let mut lam = [0i64; 3];
        let mut first: Option<[i64; 3]> = None;
        let mut plane: Option<[i64; 3]> = None;
        let mut found = 0;
        for (x, v) in &vecs {
            match found {
                0 => {
                    first = Some(*x);
                    lam[0] = *v;
                    found = 1;
                }
                1 => {
                    let c = cross(first.as_ref().unwrap(), x);
                    if c != [0, 0, 0] {
                        plane = Some(c);
                        lam[1] = *v;
                        found = 2;
                    }
                }
                2 => {
                    let n = plane.unwrap();
                    if n[0] * x[0] + n[1] * x[1] + n[2] * x[2] != 0 {
                        lam[2] = *v;
                        found = 3;
                        break;
                    }
                }
                _ => unreachable!(),
            }
        }
        assert_eq!(found, 3, "short vectors span the lattice");
        let level = |k: usize| -> Vec<[i64; 3]> { vecs.iter().filter(|e| e.1 == lam[k]).map(|e| e.0).collect() };
        let (s1, s2, s3) = (level(0), level(1), level(2));
        let mut best: Option<(i64, i64, i64)> = None;
        for v1 in &s1 {
            for v2 in &s2 {
                if v2 == v1 {
                    continue;
                }
                let c = cross(v1, v2);
                if c == [0, 0, 0] {
                    continue;
                }
                let b12 = bil(&g, v1, v2);
                for v3 in &s3 {
                    let d = det_vecs(v1, v2, v3);
                    if d != 1 && d != -1 {
                        continue;
                    }
                    let b13 = bil(&g, v1, v3);
                    let b23 = bil(&g, v2, v3);
                    for (s2, s3) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                        let key = (s2 * s3 * b23, s3 * b13, s2 * b12);
                        if best.map_or(true, |b| key < b) {
                            best = Some(key);
                        }
                    }
                }
            }
        }
        let (a23, a13, a12) = best.expect("a reduced basis exists in rank 3");
        TernaryForm { a1: lam[0], a2: lam[1], a3: lam[2], a23, a13, a12 }
    }

    /// Pairwise size reduction until no basis vector gets shorter.
    fn size_reduce(&self) -> TernaryForm {
        let mut f = *self;
        loop {
            let mut changed = false;
            for i in 0..3 {
                for j in 0..3 {
                    if i == j {
                        continue;
                    }
                    let g = f.gram();
                    let (gij, gjj) = (g[i][j], g[j][j]);
                    // minimise Q(b_i - t b_j)
                    let t = ((2 * gij + gjj).div_euclid(2 * gjj)) as i64;
                    if t != 0 {
                        let mut step = [[1i64, 0, 0], [0, 1, 0], [0, 0, 1]];
                        step[j][i] = -t;
                        let nf = f.transform(&step);
                        if nf.gram()[i][i] < g[i][i] {
                            f = nf;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        f
    }

    pub fn equivalent(&self, other: &TernaryForm) -> bool {
        self.det2() == other.det2() && self.reduce() == other.reduce()
    }

    /// Representation numbers r(d) = #{x : Q(x) = d} for 0 <= d <= bound.
    pub fn representation_counts(&self, bound: u64) -> Vec<u64> {
        self.enumerator().counts(bound)
    }

    /// Theta coefficients 1/2 r(d).
    pub fn theta(&self, bound: u64) -> ThetaCoeffs {
        let r = self.representation_counts(bound);
        ThetaCoeffs { coeffs: r.iter().map(|&c| BigRational::new(BigInt::from(c), BigInt::from(2))).collect() }
    }

    /// Local genus symbols at every prime dividing 2 det.
    pub fn genus_symbol(&self) -> GenusSymbol {
        let g = self.gram();
        let det = det3(&g);
        let mut local = Vec::new();
        let mut primes: Vec<u64> = factor(det.unsigned_abs() as u64).into_iter().map(|(q, _)| q).collect();
        if !primes.contains(&2) {
            primes.insert(0, 2);
        }
        for q in primes {
            let blocks = jordan_blocks(&g, q);
            let sym = if q == 2 { two_adic_symbol(&blocks) } else { odd_symbol(&blocks, q) };
            local.push((q, sym));
        }
        GenusSymbol { det, local }
    }

    pub fn same_genus(&self, other: &TernaryForm) -> bool {
        self.genus_symbol() == other.genus_symbol()
    }
}

#[cfg(test)]
fn mat3_mul(a: &[[i64; 3]; 3], b: &[[i64; 3]; 3]) -> [[i64; 3]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..3).map(|k| a[i][k] * b[k][j]).sum()))
}

/// Canonical local data: det of 2Q and, per prime, a list of integer tuples.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenusSymbol {
    pub det: i128,
    pub local: Vec<(u64, Vec<[i64; 5]>)>,
}

/// One Jordan block over Z_(q): scale exponent, unimodular part (1x1 or 2x2).
#[derive(Clone, Debug)]
struct Block {
    scale: u32,
    unit: Vec<Vec<BigRational>>,
}

fn val(x: &BigRational, q: u64) -> i64 {
    if x.is_zero() {
        return i64::MAX;
    }
    let qb = BigInt::from(q);
    let mut v = 0i64;
    let mut n = x.numer().clone();
    while (&n % &qb).is_zero() {
        n /= &qb;
        v += 1;
    }
    let mut d = x.denom().clone();
    while (&d % &qb).is_zero() {
        d /= &qb;
        v -= 1;
    }
    v
}

/// Jordan splitting over Z_(q) by pivoting on entries of least valuation.
fn jordan_blocks(g: &Gram, q: u64) -> Vec<Block> {
    let mut m: Vec<Vec<BigRational>> =
        g.iter().map(|r| r.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect()).collect();
    let mut blocks = Vec::new();
    let qr = BigRational::from_integer(BigInt::from(q));
    while !m.is_empty() {
        let n = m.len();
        let mut vmin = i64::MAX;
        for r in m.iter() {
            for x in r.iter() {
                vmin = vmin.min(val(x, q));
            }
        }
        let diag = (0..n).find(|&i| val(&m[i][i], q) == vmin);
        let pivot: Vec<usize> = match diag {
            Some(i) => vec![i],
            None => {
                let (i, j) = (0..n)
                    .flat_map(|i| (0..n).map(move |j| (i, j)))
                    .find(|&(i, j)| i != j && val(&m[i][j], q) == vmin)
                    .unwrap();
                if q != 2 {
                    // e_i + e_j has diagonal entry of least valuation
                    for c in 0..n {
                        let t = m[j][c].clone();
                        m[i][c] += t;
                    }
                    for r in 0..n {
                        let t = m[r][j].clone();
                        m[r][i] += t;
                    }
                    vec![i]
                } else {
                    vec![i, j]
                }
            }
        };
        let rest: Vec<usize> = (0..n).filter(|k| !pivot.contains(k)).collect();
        let a: Vec<Vec<BigRational>> = pivot.iter().map(|&r| pivot.iter().map(|&c| m[r][c].clone()).collect()).collect();
        let ainv = crate::linalg::inverse(&a).expect("pivot block is invertible");
        // complement: C - B^T A^{-1} B
        let mut next: Vec<Vec<BigRational>> = rest.iter().map(|&r| rest.iter().map(|&c| m[r][c].clone()).collect()).collect();
        for (ri, &r) in rest.iter().enumerate() {
            for (ci, &c) in rest.iter().enumerate() {
                let mut s = BigRational::zero();
                for (x, &pr) in pivot.iter().enumerate() {
                    for (y, &pc) in pivot.iter().enumerate() {
                        s += &m[r][pr] * &ainv[x][y] * &m[pc][c];
                    }
                }
                next[ri][ci] -= s;
            }
        }
        let scale = vmin as u32;
        let qs = qr.pow(vmin as i32);
        let unit = a.iter().map(|r| r.iter().map(|x| x / &qs).collect()).collect();
        blocks.push(Block { scale, unit });
        m = next;
    }
    blocks
}

fn unit_mod(x: &BigRational, m: u64) -> i64 {
    let mb = BigInt::from(m);
    let n = x.numer().mod_floor(&mb).to_i64().unwrap();
    let d = x.denom().mod_floor(&mb).to_i64().unwrap();
    let di = crate::arith::mod_inv(d, m as i64).expect("unit denominator");
    (n * di).rem_euclid(m as i64)
}

/// (scale, dim, Legendre symbol of the unit determinant) per scale.
fn odd_symbol(blocks: &[Block], q: u64) -> Vec<[i64; 5]> {
    let mut by_scale: std::collections::BTreeMap<u32, (i64, BigRational)> = Default::default();
    for b in blocks {
        let d = crate::linalg::det(&b.unit);
        let e = by_scale.entry(b.scale).or_insert((0, BigRational::one()));
        e.0 += b.unit.len() as i64;
        e.1 = &e.1 * d;
    }
    by_scale
        .into_iter()
        .map(|(s, (n, d))| [s as i64, n, legendre(unit_mod(&d, q), q) as i64, 0, 0])
        .collect()
}

/// 2-adic constituents [scale, rank, sign, type, oddity] in canonical form
/// (oddity fusion over compartments and sign walking along trains).
fn two_adic_symbol(blocks: &[Block]) -> Vec<[i64; 5]> {
    let mut by_scale: std::collections::BTreeMap<u32, (i64, i64, i64, i64)> = Default::default();
    for b in blocks {
        let e = by_scale.entry(b.scale).or_insert((0, 1, 0, 0));
        e.0 += b.unit.len() as i64;
        let d = unit_mod(&crate::linalg::det(&b.unit), 8);
        e.1 = (e.1 * d).rem_euclid(8);
        if b.unit.len() == 1 {
            e.2 = 1;
            e.3 = (e.3 + unit_mod(&b.unit[0][0], 8)) % 8;
        }
    }
    let mut sym: Vec<[i64; 5]> = by_scale
        .into_iter()
        .map(|(s, (n, d, t, o))| [s as i64, n, if d == 1 || d == 7 { 1 } else { -1 }, t, o])
        .collect();
    canonical_two_adic(&mut sym);
    sym
}

fn compartments(sym: &[[i64; 5]]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < sym.len() {
        if sym[i][3] == 1 {
            let mut v = sym[i][0];
            let mut c = Vec::new();
            while i < sym.len() && sym[i][3] == 1 && sym[i][0] == v {
                c.push(i);
                i += 1;
                v += 1;
            }
            out.push(c);
        } else {
            i += 1;
        }
    }
    out
}

fn trains(sym: &[[i64; 5]]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0];
    for i in 0..sym.len().saturating_sub(1) {
        let (prev, next) = (sym[i], sym[i + 1]);
        let gap = next[0] - prev[0];
        let breaks = gap > 2 || (gap == 2 && prev[3] * next[3] == 0) || (prev[3] == 0 && next[3] == 0);
        if breaks {
            out.push(cur);
            cur = vec![i + 1];
        } else {
            cur.push(i + 1);
        }
    }
    out.push(cur);
    out
}

fn canonical_two_adic(sym: &mut [[i64; 5]]) {
    if sym.is_empty() {
        return;
    }
    let comps = compartments(sym);
    for c in &comps {
        let odd: i64 = c.iter().map(|&i| sym[i][4]).sum::<i64>().rem_euclid(8);
        for &i in c {
            sym[i][4] = 0;
        }
        sym[c[0]][4] = odd;
    }
    for t in trains(sym) {
        for k in (1..t.len()).rev() {
            let i = t[k];
            if sym[i][2] == -1 {
                sym[i][2] = 1;
                sym[i - 1][2] = -sym[i - 1][2];
                for c in &comps {
                    if c.contains(&(i - 1)) || c.contains(&i) {
                        sym[c[0]][4] = (sym[c[0]][4] + 4) % 8;
                    }
                }
            }
        }
    }
}

/// Coefficients of a theta series (or a rational combination of them), indexed by d >= 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaCoeffs {
    #[serde(with = "crate::arith::rat_str::vec")]
    pub coeffs: Vec<BigRational>,
}

impl ThetaCoeffs {
    pub fn zero(bound: u64) -> ThetaCoeffs {
        ThetaCoeffs { coeffs: vec![BigRational::zero(); bound as usize + 1] }
    }

    pub fn bound(&self) -> u64 {
        self.coeffs.len() as u64 - 1
    }

    pub fn get(&self, d: u64) -> &BigRational {
        &self.coeffs[d as usize]
    }

    pub fn add_scaled(&mut self, other: &ThetaCoeffs, s: &BigRational) {
        for (x, y) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *x += y * s;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// First d >= 1 with nonzero coefficient.
    pub fn first_nonzero(&self) -> Option<u64> {
        (1..self.coeffs.len()).find(|&d| !self.coeffs[d].is_zero()).map(|d| d as u64)
    }

    /// Integer coefficients for d >= 1, if they are all integral.
    pub fn integers(&self) -> Option<Vec<i64>> {
        self.coeffs.iter().skip(1).map(|c| if c.is_integer() { c.numer().to_i64() } else { None }).collect()
    }
}

/// The primitive form -normx / omega on O/Z, reduced.
pub fn ternary_of_order(o: &Order) -> Result<TernaryForm> {
    let f = o.pure_basis();
    let raw = normx_form(&o.alg, &f);
    let w = BigInt::from(o.omega_x);
    let mut c = [0i64; 6];
    for k in 0..6 {
        let (q, r) = raw[k].div_rem(&w);
        if !r.is_zero() {
            return Err(Error::Internal("normx form not divisible by omega".into()));
        }
        c[k] = q.to_i64().ok_or(Error::Internal("ternary coefficient overflow".into()))?;
    }
    let t = TernaryForm::new(c);
    if !t.is_positive_definite() {
        return Err(Error::Internal(format!("ternary form {t} is not positive definite")));
    }
    Ok(t.reduce())
}


/// Sum the rows of `thetas` weighted by `v`.
pub fn combine(thetas: &[ThetaCoeffs], v: &[BigRational]) -> ThetaCoeffs {
    let bound = thetas.first().map_or(0, |t| t.bound());
    let mut out = ThetaCoeffs::zero(bound);
    for (t, c) in thetas.iter().zip(v) {
        if !c.is_zero() {
            out.add_scaled(t, c);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unimodular(seed: &[i64]) -> [[i64; 3]; 3] {
        // product of elementary matrices, always det 1
        let mut u = [[1i64, 0, 0], [0, 1, 0], [0, 0, 1]];
        for (k, &s) in seed.iter().enumerate() {
            let (i, j) = [(0, 1), (1, 2), (2, 0), (1, 0), (2, 1), (0, 2)][k % 6];
            let mut e = [[1i64, 0, 0], [0, 1, 0], [0, 0, 1]];
            e[i][j] = s;
            u = mat3_mul(&u, &e);
        }
        u
    }

    #[test]
    fn theta_small() {
        let q = TernaryForm::new([1, 28, 56, -28, 0, 0]);
        let t = q.theta(10);
        assert_eq!(t.get(0), &BigRational::new(1.into(), 2.into()));
        assert_eq!(t.get(1), &BigRational::one());
        let s = TernaryForm::new([1, 1, 1, 0, 0, 0]).representation_counts(3);
        assert_eq!(s, vec![1, 6, 12, 8]);
    }

    #[test]
    fn reduce_sorted() {
        let q = TernaryForm::new([8, 9, 25, 2, 4, 8]).reduce();
        assert!(q.a1 <= q.a2 && q.a2 <= q.a3);
        assert_eq!(q.reduce(), q);
    }

    #[test]
    fn distinct_classes_seven() {
        let q1 = TernaryForm::new([1, 28, 56, -28, 0, 0]);
        let q2 = TernaryForm::new([4, 8, 49, 0, 0, -4]);
        let m1 = TernaryForm::new([12, 12, 13, -8, -8, -4]);
        let m2 = TernaryForm::new([5, 17, 17, 6, 2, 2]);
        assert!(!q1.equivalent(&q2));
        assert!(!m1.equivalent(&m2));
        assert!(q1.same_genus(&q2));
        assert!(m1.same_genus(&m2));
        assert!(!q1.same_genus(&m1));
        assert!(q1.same_genus(&q1));
    }

    #[test]
    fn two_adic_known_equivalences() {
        // x^2 + 2y^2 and 3x^2 + 6y^2 are Z_2-equivalent; x^2 + y^2 and 3x^2 + 3y^2 are not.
        let sym = |d: &[i64]| {
            let blocks: Vec<Block> = d
                .iter()
                .map(|&x| {
                    let v = x.trailing_zeros();
                    Block { scale: v, unit: vec![vec![BigRational::from_integer(BigInt::from(x >> v))]] }
                })
                .collect();
            two_adic_symbol(&blocks)
        };
        assert_eq!(sym(&[1, 2]), sym(&[3, 6]));
        assert_ne!(sym(&[1, 1]), sym(&[3, 3]));
        assert_eq!(sym(&[1, 4]), sym(&[5, 20]));
        assert_ne!(sym(&[1, 1, 1]), sym(&[3, 3, 3]));
        assert_eq!(sym(&[1, 1, 1]), sym(&[1, 5, 5]));
        assert_ne!(sym(&[1, 1, 1]), sym(&[3, 3, 7]));
    }

    proptest! {
        #[test]
        fn reduce_is_class_invariant(seed in proptest::collection::vec(-2i64..=2, 6)) {
            let q = TernaryForm::new([5, 17, 17, 6, 2, 2]);
            let u = unimodular(&seed);
            let t = q.transform(&u);
            prop_assert_eq!(t.reduce(), q.reduce());
            prop_assert!(t.same_genus(&q));
        }

        #[test]
        fn theta_is_class_invariant(seed in proptest::collection::vec(-2i64..=2, 6)) {
            let q = TernaryForm::new([4, 8, 49, 0, 0, -4]);
            let t = q.transform(&unimodular(&seed));
            prop_assert_eq!(t.representation_counts(60), q.representation_counts(60));
        }
    }
}
