//! Fincke-Pohst enumeration of short vectors of a positive definite integral form.
//!
//! The form is given by an even symmetric Gram matrix `G` (the matrix of 2Q),
//! so Q(x) = x^T G x / 2 is integer valued. Vectors are produced up to sign:
//! exactly one of x, -x is visited and the zero vector is skipped.

use crate::error::{Error, Result};
use crate::par;

const MAXDIM: usize = 8;

#[derive(Clone, Debug)]
pub struct Enumerator {
    n: usize,
    gram: Vec<Vec<i64>>,
    // Cholesky-type coefficients: Q(x) = sum_i q[i][i] (x_i + sum_{j>i} q[i][j] x_j)^2
    q: Vec<Vec<f64>>,
}

impl Enumerator {
    pub fn new(gram: &[Vec<i64>]) -> Result<Self> {
        let n = gram.len();
        if n == 0 || n > MAXDIM {
            return Err(Error::Invalid(format!("enumeration dimension {n}")));
        }
        for i in 0..n {
            if gram[i].len() != n || gram[i][i] % 2 != 0 {
                return Err(Error::Invalid("gram matrix must be even and square".into()));
            }
            for j in 0..n {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::Invalid("gram matrix must be symmetric".into()));
                }
            }
        }
        let mut q: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| gram[i][j] as f64 / 2.0).collect()).collect();
        for i in 0..n {
            if q[i][i] <= 0.0 {
                return Err(Error::Invalid("form is not positive definite".into()));
            }
            for j in i + 1..n {
                q[j][i] = q[i][j];
                q[i][j] /= q[i][i];
            }
            for k in i + 1..n {
                for l in k..n {
                    q[k][l] -= q[k][i] * q[i][l];
                }
            }
        }
        Ok(Enumerator { n, gram: gram.to_vec(), q })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    /// Exact Q(x).
    pub fn value(&self, x: &[i64]) -> i64 {
        let mut t: i128 = 0;
        for i in 0..self.n {
            for j in 0..self.n {
                t += self.gram[i][j] as i128 * x[i] as i128 * x[j] as i128;
            }
        }
        (t / 2) as i64
    }

    fn range(&self, i: usize, x: &[i64; MAXDIM], rem: f64) -> (f64, f64) {
        let mut c = 0.0;
        for j in i + 1..self.n {
            c -= self.q[i][j] * x[j] as f64;
        }
        let r = (rem.max(0.0) / self.q[i][i]).sqrt() + 1e-7;
        (c, r)
    }

    fn rec<F: FnMut(&[i64], u64)>(&self, i: usize, x: &mut [i64; MAXDIM], rem: f64, zero_above: bool, bound: u64, f: &mut F) {
        let (c, r) = self.range(i, x, rem);
        let mut lo = (c - r).ceil() as i64;
        let hi = (c + r).floor() as i64;
        if zero_above && lo < 0 {
            lo = 0;
        }
        if i == 0 {
            // exact evaluation along the innermost row
            let n = self.n;
            let mut base: i128 = 0;
            let mut lin: i128 = 0;
            for a in 1..n {
                lin += self.gram[0][a] as i128 * x[a] as i128;
                for b in 1..n {
                    base += self.gram[a][b] as i128 * x[a] as i128 * x[b] as i128;
                }
            }
            let g00 = self.gram[0][0] as i128;
            for x0 in lo..=hi {
                if zero_above && x0 == 0 {
                    continue;
                }
                let xx = x0 as i128;
                let t = base + 2 * xx * lin + g00 * xx * xx;
                let v = (t / 2) as u64;
                if v <= bound {
                    x[0] = x0;
                    f(&x[..n], v);
                }
            }
            x[0] = 0;
            return;
        }
        for xi in lo..=hi {
            let d = xi as f64 - c;
            let nrem = rem - self.q[i][i] * d * d;
            if nrem < -1e-6 {
                continue;
            }
            x[i] = xi;
            self.rec(i - 1, x, nrem, zero_above && xi == 0, bound, f);
        }
        x[i] = 0;
    }

    fn slack(bound: u64) -> f64 {
        bound as f64 * (1.0 + 1e-12) + 1e-6
    }

    /// Visit every nonzero x (one per ± pair) with Q(x) <= bound.
    pub fn for_each<F: FnMut(&[i64], u64)>(&self, bound: u64, mut f: F) {
        let mut x = [0i64; MAXDIM];
        self.rec(self.n - 1, &mut x, Self::slack(bound), true, bound, &mut f);
    }

    fn top_values(&self, bound: u64) -> Vec<i64> {
        let t = self.n - 1;
        let r = (Self::slack(bound) / self.q[t][t]).sqrt() + 1e-7;
        (0..=r.floor() as i64).collect()
    }

    fn for_each_top<F: FnMut(&[i64], u64)>(&self, top: i64, bound: u64, f: &mut F) {
        let t = self.n - 1;
        let mut x = [0i64; MAXDIM];
        let d = top as f64;
        let rem = Self::slack(bound) - self.q[t][t] * d * d;
        if rem < -1e-6 {
            return;
        }
        if t == 0 {
            if top != 0 {
                let v = (self.gram[0][0] as i128 * (top as i128).pow(2) / 2) as u64;
                if v <= bound {
                    x[0] = top;
                    f(&x[..1], v);
                }
            }
            return;
        }
        x[t] = top;
        self.rec(t - 1, &mut x, rem, top == 0, bound, f);
    }

    /// Representation numbers r(m) = #{x : Q(x) = m} for 0 <= m <= bound (r(0) = 1).
    pub fn counts(&self, bound: u64) -> Vec<u64> {
        let tops = self.top_values(bound);
        let len = bound as usize + 1;
        let mut out = par::map_reduce(
            &tops,
            |&t| {
                let mut h = vec![0u64; len];
                self.for_each_top(t, bound, &mut |_, v| h[v as usize] += 2);
                h
            },
            || vec![0u64; len],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
        out[0] = 1;
        out
    }

    /// All vectors (one per ± pair) with Q(x) <= bound, with their values.
    pub fn collect(&self, bound: u64) -> Vec<(Vec<i64>, u64)> {
        let mut out = Vec::new();
        self.for_each(bound, |x, v| out.push((x.to_vec(), v)));
        out
    }

    /// Nonzero vectors (one per ± pair) with Q(x) exactly `value`.
    pub fn with_value(&self, value: u64) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        self.for_each(value, |x, v| {
            if v == value {
                out.push(x.to_vec())
            }
        });
        out
    }

    pub fn minimum(&self) -> u64 {
        let b = self.gram.iter().enumerate().map(|(i, r)| (r[i] / 2) as u64).min().unwrap();
        let mut best = b;
        self.for_each(b, |_, v| best = best.min(v));
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(g: &[Vec<i64>], bound: u64, box_r: i64) -> Vec<u64> {
        let n = g.len();
        let mut out = vec![0u64; bound as usize + 1];
        let total = (2 * box_r + 1).pow(n as u32);
        for idx in 0..total {
            let mut x = vec![0i64; n];
            let mut t = idx;
            for s in x.iter_mut() {
                *s = t % (2 * box_r + 1) - box_r;
                t /= 2 * box_r + 1;
            }
            let mut v = 0i64;
            for i in 0..n {
                for j in 0..n {
                    v += g[i][j] * x[i] * x[j];
                }
            }
            let v = (v / 2) as u64;
            if v <= bound {
                out[v as usize] += 1;
            }
        }
        out
    }

    #[test]
    fn sum_of_four_squares() {
        let g: Vec<Vec<i64>> = (0..4).map(|i| (0..4).map(|j| if i == j { 2 } else { 0 }).collect()).collect();
        let e = Enumerator::new(&g).unwrap();
        let c = e.counts(20);
        // Jacobi: r4(n) = 8 * sum of divisors not divisible by 4
        for n in 1..=20u64 {
            let s: u64 = (1..=n).filter(|d| n % d == 0 && d % 4 != 0).sum();
            assert_eq!(c[n as usize], 8 * s, "n={n}");
        }
    }

    proptest! {
        #[test]
        fn counts_match_box_search(a in 1i64..4, b in 1i64..4, c in 1i64..4, x in -1i64..=1, y in -1i64..=1, z in -1i64..=1) {
            // diagonal-dominant ternary Gram so that a small box contains every short vector
            let g = vec![
                vec![2 * (a + 2), x, y],
                vec![x, 2 * (b + 2), z],
                vec![y, z, 2 * (c + 2)],
            ];
            let e = Enumerator::new(&g).unwrap();
            let bound = 12;
            // min eigen >= 6 - 2 = 4 on the 2Q scale, so |x_i| <= sqrt(2*12/4) < 3
            prop_assert_eq!(e.counts(bound), brute(&g, bound, 3));
        }
    }
}
