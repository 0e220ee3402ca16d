//! Brandt matrices and the Hecke module M(O) on ideal classes.
//!
//! Vectors are rows indexed by classes. With r_ij(m) the number of x in
//! conj(a_i) a_j of normalised norm m, `B_m(i,j) = r_ij(m) / |O_r(a_j)^x|`,
//! so every row of B_q sums to q+1 and t_m acts as `v -> v B_m`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, kronecker, prime_discriminant, rat};
use crate::enumerate::Enumerator;
use crate::error::{Error, Result};
use crate::ideals::{int_gram, ClassSet};
use crate::linalg::{self, QMat, QVec};
use crate::par;

/// Representation counts of the normalised norm on conj(a_i) a_j for m <= bound.
pub fn pair_counts(cs: &ClassSet, i: usize, j: usize, bound: u64) -> Vec<u64> {
    let (a, b) = (&cs.reps[i], &cs.reps[j]);
    let alg = a.alg();
    let l = a.lattice.conj().product(&alg, &b.lattice);
    let scale = (&a.norm * &b.norm).recip();
    let g = int_gram(&alg, &l, &scale).expect("normalised norm form is integral");
    Enumerator::new(&g).expect("definite").counts(bound)
}

/// r_ij(m) for every i and one fixed column j.
pub fn column_counts(cs: &ClassSet, j: usize, bound: u64) -> Vec<Vec<u64>> {
    (0..cs.len()).map(|i| pair_counts(cs, i, j, bound)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BrandtSeries {
    pub units: Vec<u64>,
    pub bound: u64,
    /// counts[i][j][m] = r_ij(m), 0 <= m <= bound
    pub counts: Vec<Vec<Vec<u64>>>,
}

impl BrandtSeries {
    pub fn new(cs: &ClassSet, bound: u64) -> Result<BrandtSeries> {
        let h = cs.len();
        let pairs: Vec<(usize, usize)> = (0..h).flat_map(|i| (i..h).map(move |j| (i, j))).collect();
        let got = par::map(&pairs, |&(i, j)| pair_counts(cs, i, j, bound));
        let mut counts = vec![vec![Vec::new(); h]; h];
        for (&(i, j), c) in pairs.iter().zip(got) {
            counts[j][i] = c.clone();
            counts[i][j] = c;
        }
        let bs = BrandtSeries { units: cs.unit_orders.clone(), bound, counts };
        for m in 1..=bound {
            bs.matrix_int(m)?;
        }
        Ok(bs)
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    /// B_m as integers; errors when a count is not divisible by the unit count.
    pub fn matrix_int(&self, m: u64) -> Result<Vec<Vec<i64>>> {
        if m > self.bound {
            return Err(Error::TableTooShort { needed: m as usize, have: self.bound as usize });
        }
        let h = self.len();
        let mut out = vec![vec![0i64; h]; h];
        for i in 0..h {
            for j in 0..h {
                let r = self.counts[i][j][m as usize];
                let u = self.units[j];
                if r % u != 0 {
                    return Err(Error::Internal(format!("r_{i}{j}({m}) = {r} not divisible by {u}")));
                }
                out[i][j] = (r / u) as i64;
            }
        }
        Ok(out)
    }

    pub fn matrix(&self, m: u64) -> Result<QMat> {
        Ok(self.matrix_int(m)?.iter().map(|r| linalg::to_q(r)).collect())
    }
}

/// t_m v = v B_m.
pub fn hecke_apply(bs: &BrandtSeries, m: u64, v: &[BigRational]) -> Result<QVec> {
    Ok(linalg::vec_mat(v, &bs.matrix(m)?))
}

/// ψ(v) = v Psi, with Psi[i][j] the number of subideals of a_i in class j.
pub fn psi_apply(psi: &[Vec<i64>], v: &[BigRational]) -> QVec {
    let m: QMat = psi.iter().map(|r| linalg::to_q(r)).collect();
    linalg::vec_mat(v, &m)
}

/// φ(v)_j = chi_j v_j.
pub fn phi_apply(chi: &[i32], v: &[BigRational]) -> QVec {
    v.iter().zip(chi).map(|(x, &s)| if s < 0 { -x.clone() } else { x.clone() }).collect()
}

/// First `count` primes not dividing 2 disc.
pub fn probe_primes(disc: u64, count: usize) -> Vec<u64> {
    (3..).filter(|&q| is_prime(q) && disc % q != 0).take(count).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FormKind {
    /// newform of level p (through ψ from the maximal order)
    LevelP,
    /// quadratic twist by the character of conductor p of a level-p form
    TwistOfLevelP,
    /// newform of level p^2 that is not such a twist
    Genuine,
    Eisenstein,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Eigencomponent {
    pub label: String,
    pub kind: FormKind,
    #[serde(with = "crate::arith::rat_str::mat")]
    pub basis: Vec<QVec>,
    /// (q, λ_q) for the probe primes
    pub eigenvalues: Vec<(u64, i64)>,
}

impl Eigencomponent {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn eigenvalue(&self, q: u64) -> Option<i64> {
        self.eigenvalues.iter().find(|e| e.0 == q).map(|e| e.1)
    }

    /// Whether every basis vector is a rational eigenvector of `bs` for all m <= bound
    /// coprime to `disc`, with a common eigenvalue.
    pub fn check_eigen(&self, bs: &BrandtSeries, disc: u64) -> Result<()> {
        for m in 1..=bs.bound {
            if num_integer::gcd(m, disc) != 1 {
                continue;
            }
            let b = bs.matrix(m)?;
            let mut lam: Option<BigRational> = None;
            for v in &self.basis {
                let w = linalg::vec_mat(v, &b);
                let k = v.iter().position(|x| !x.is_zero()).unwrap();
                let l = &w[k] / &v[k];
                if w.iter().zip(v).any(|(a, c)| a != &(c * &l)) || lam.as_ref().map_or(false, |x| x != &l) {
                    return Err(Error::Internal(format!("component {} is not an eigenspace for t_{m}", self.label)));
                }
                lam = Some(l);
            }
        }
        Ok(())
    }
}

/// Subspace of `space` (rows) on which v B = λ v.
fn eigen_subspace(space: &QMat, b: &QMat, lam: i64) -> QMat {
    let h = b.len();
    let mut shifted = b.clone();
    for (i, row) in shifted.iter_mut().enumerate().take(h) {
        row[i] -= rat(lam);
    }
    let img: QMat = space.iter().map(|s| linalg::vec_mat(s, &shifted)).collect();
    let coeffs = linalg::left_kernel(&img);
    let sub: QMat = coeffs
        .iter()
        .map(|c| {
            let mut v = vec![BigRational::zero(); h];
            for (ci, s) in c.iter().zip(space) {
                for (x, y) in v.iter_mut().zip(s) {
                    *x += ci * y;
                }
            }
            v
        })
        .collect();
    linalg::row_space(&sub)
}

/// Simultaneous rational eigenspaces of B_q for the probe primes. Eigenvalue
/// systems without a full rational eigenspace are not returned.
pub fn isotypical(bs: &BrandtSeries, probes: &[u64]) -> Result<Vec<Eigencomponent>> {
    let h = bs.len();
    let mut spaces: Vec<(Vec<(u64, i64)>, QMat)> = vec![(vec![], linalg::identity(h))];
    for &q in probes {
        let b = bs.matrix(q)?;
        let r = (2.0 * (q as f64).sqrt()).floor() as i64;
        let mut cands: Vec<i64> = (-r..=r).collect();
        cands.push(q as i64 + 1);
        cands.push(-(q as i64) - 1);
        let mut next = Vec::new();
        for (ev, sp) in spaces {
            for &l in &cands {
                let s = eigen_subspace(&sp, &b, l);
                if !s.is_empty() {
                    let mut e = ev.clone();
                    e.push((q, l));
                    next.push((e, s));
                }
            }
        }
        spaces = next;
    }
    let mut out: Vec<Eigencomponent> = spaces
        .into_iter()
        .map(|(ev, sp)| {
            let eis = ev.iter().all(|&(q, l)| l.unsigned_abs() == q + 1);
            Eigencomponent {
                label: String::new(),
                kind: if eis { FormKind::Eisenstein } else { FormKind::Genuine },
                basis: sp.iter().map(|v| linalg::primitive(v).0).collect(),
                eigenvalues: ev,
            }
        })
        .collect();
    out.sort_by(|a, b| a.eigenvalues.cmp(&b.eigenvalues));
    Ok(out)
}

/// Hecke eigenvalues a_q of the named newforms at small primes q (0 at the level prime),
/// used only to attach labels.
const LABELS: &[(&str, u64, [i64; 8])] = &[
    // q = 2, 3, 5, 7, 11, 13, 17, 19
    ("11A", 11, [-2, -1, 1, -2, 0, 4, -2, 0]),
    ("17A", 17, [-1, 0, -2, 4, 0, -2, 0, -4]),
    ("19A", 19, [0, -2, 3, -1, 3, -4, -3, 0]),
    ("49A", 7, [1, 0, 0, 0, 4, 0, 0, 0]),
    ("121A", 11, [-1, 2, 1, 2, 0, -1, 5, -6]),
    ("121B", 11, [0, -1, -3, 0, 0, 0, 0, 0]),
    ("121C", 11, [1, 2, 1, -2, 0, 1, -5, 6]),
    ("121D", 11, [2, -1, 1, 2, 0, -4, 2, 0]),
    ("289A", 17, [-1, 0, 2, -4, 0, -2, 0, -4]),
    ("361A", 19, [0, 0, -1, 3, -5, 0, -7, 0]),
    ("361B", 19, [0, 2, 3, -1, 3, 4, -3, 0]),
];
const LABEL_PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Label of the weight-2 newform with these eigenvalues at level prime p, if tabulated.
pub fn label_for(p: u64, eigenvalues: &[(u64, i64)]) -> Option<&'static str> {
    LABELS
        .iter()
        .find(|(_, lp, aq)| {
            *lp == p
                && eigenvalues.iter().all(|&(q, l)| match LABEL_PRIMES.iter().position(|&x| x == q) {
                    Some(k) => aq[k] == l,
                    None => true,
                })
        })
        .map(|t| t.0)
}

/// `c` carries the eigenvalues of the cusp component `m` twisted by (p*/.).
pub fn is_twist(c: &Eigencomponent, m: &Eigencomponent, p: u64) -> bool {
    let ps = prime_discriminant(p);
    m.kind != FormKind::Eisenstein
        && m.eigenvalues.len() == c.eigenvalues.len()
        && m.eigenvalues.iter().zip(&c.eigenvalues).all(|(a, b)| a.0 == b.0 && a.1 * kronecker(ps, a.0 as i64) as i64 == b.1)
}

/// Classify the components of M(Õ) against those of M(O): same eigenvalues means
/// level p, eigenvalues twisted by (q/p) means a twist of level p, else level p^2.
pub fn classify(tilde: &mut [Eigencomponent], maximal: &[Eigencomponent], p: u64) {
    for c in tilde.iter_mut() {
        if c.kind == FormKind::Eisenstein {
            let plain = c.eigenvalues.iter().all(|&(q, l)| l == q as i64 + 1);
            c.label = if plain { "Eis" } else { "Eis-twist" }.into();
            continue;
        }
        let same = maximal.iter().any(|m| m.kind != FormKind::Eisenstein && m.eigenvalues == c.eigenvalues);
        let twisted = maximal.iter().any(|m| is_twist(c, m, p));
        c.kind = if same {
            FormKind::LevelP
        } else if twisted {
            FormKind::TwistOfLevelP
        } else {
            FormKind::Genuine
        };
        let level = if c.kind == FormKind::LevelP { p } else { p * p };
        c.label = label_for(p, &c.eigenvalues).map(str::to_string).unwrap_or_else(|| format!("{level}?"));
    }
}

/// Label the components of the maximal order module.
pub fn label_maximal(comps: &mut [Eigencomponent], p: u64) {
    for c in comps.iter_mut() {
        if c.kind == FormKind::Eisenstein {
            c.label = "Eis".into();
            continue;
        }
        c.kind = FormKind::LevelP;
        c.label = label_for(p, &c.eigenvalues).map(str::to_string).unwrap_or_else(|| format!("{p}?"));
    }
}

/// Eisenstein row vector with entries 1/u_i, as a primitive integer vector.
pub fn eisenstein(bs: &BrandtSeries) -> QVec {
    let v: QVec = bs.units.iter().map(|&u| BigRational::new(BigInt::one(), BigInt::from(u))).collect();
    linalg::primitive(&v).0
}
