use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::algebra::{QAlgebra, Quat};
use crate::error::{Error, Result};
use crate::linalg::{self, QMat};

/// Full-rank Z-lattice in H, stored as an upper-triangular Hermite normal form
/// `hnf` (rows are generators) over a positive common denominator `den`.
/// The pair is canonical: equal lattices have equal fields.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuatLattice {
    pub hnf: [[BigInt; 4]; 4],
    pub den: BigInt,
}

// Serialized as the row-major basis matrix of "num/den" strings.
impl Serialize for QuatLattice {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.basis().serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuatLattice {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Quat>::deserialize(d)?;
        QuatLattice::from_generators(&rows).map_err(serde::de::Error::custom)
    }
}

fn hnf_rows(mut rows: Vec<[BigInt; 4]>) -> Option<[[BigInt; 4]; 4]> {
    let mut out: Vec<[BigInt; 4]> = Vec::with_capacity(4);
    for c in 0..4 {
        // gather the rows with a nonzero entry in column c into one pivot row
        let mut pivot: Option<[BigInt; 4]> = None;
        let mut rest = Vec::with_capacity(rows.len());
        for r in rows.into_iter() {
            if r[c].is_zero() {
                rest.push(r);
                continue;
            }
            match pivot.take() {
                None => pivot = Some(r),
                Some(pv) => {
                    let g = pv[c].extended_gcd(&r[c]);
                    let (u, v) = (g.x, g.y);
                    let (s, t) = (&pv[c] / &g.gcd, &r[c] / &g.gcd);
                    let new_p: [BigInt; 4] = std::array::from_fn(|k| &u * &pv[k] + &v * &r[k]);
                    let other: [BigInt; 4] = std::array::from_fn(|k| &s * &r[k] - &t * &pv[k]);
                    pivot = Some(new_p);
                    if other.iter().any(|x| !x.is_zero()) {
                        rest.push(other);
                    }
                }
            }
        }
        let mut pv = pivot?;
        if pv[c].is_negative() {
            for x in pv.iter_mut() {
                *x = -x.clone();
            }
        }
        out.push(pv);
        rows = rest;
    }
    let mut h: [[BigInt; 4]; 4] = [out[0].clone(), out[1].clone(), out[2].clone(), out[3].clone()];
    for c in 1..4 {
        for r in 0..c {
            let q = h[r][c].div_floor(&h[c][c]);
            if !q.is_zero() {
                for k in 0..4 {
                    let t = &q * &h[c][k];
                    h[r][k] -= t;
                }
            }
        }
    }
    Some(h)
}

impl QuatLattice {
    /// Lattice spanned by the given elements; errors unless they have rank 4.
    pub fn from_generators(gens: &[Quat]) -> Result<Self> {
        let mut den = BigInt::one();
        for g in gens {
            for c in &g.0 {
                den = den.lcm(c.denom());
            }
        }
        let dq = BigRational::from_integer(den.clone());
        let mut rows: Vec<[BigInt; 4]> = gens
            .iter()
            .map(|g| std::array::from_fn(|k| (&g.0[k] * &dq).to_integer()))
            .filter(|r: &[BigInt; 4]| r.iter().any(|x| !x.is_zero()))
            .collect();
        rows.dedup();
        let h = hnf_rows(rows).ok_or(Error::RankDeficient)?;
        Ok(Self::normalise(h, den))
    }

    fn normalise(h: [[BigInt; 4]; 4], den: BigInt) -> Self {
        let mut g = den.clone();
        for r in &h {
            for x in r {
                g = g.gcd(x);
            }
        }
        if g.is_one() {
            return QuatLattice { hnf: h, den };
        }
        let h = h.map(|r| r.map(|x| x / &g));
        QuatLattice { hnf: h, den: den / g }
    }

    pub fn basis(&self) -> [Quat; 4] {
        std::array::from_fn(|r| Quat(std::array::from_fn(|k| BigRational::new(self.hnf[r][k].clone(), self.den.clone()))))
    }

    pub fn basis_matrix(&self) -> QMat {
        self.basis().iter().map(|q| q.0.to_vec()).collect()
    }

    /// Integer coordinates of `x` in the HNF basis, if `x` lies in the lattice.
    pub fn coords(&self, x: &Quat) -> Option<[BigInt; 4]> {
        let dq = BigRational::from_integer(self.den.clone());
        let mut v: Vec<BigInt> = Vec::with_capacity(4);
        for c in &x.0 {
            let s = c * &dq;
            if !s.is_integer() {
                return None;
            }
            v.push(s.to_integer());
        }
        let mut out: [BigInt; 4] = std::array::from_fn(|_| BigInt::zero());
        for c in 0..4 {
            let (q, r) = v[c].div_rem(&self.hnf[c][c]);
            if !r.is_zero() {
                return None;
            }
            for k in c..4 {
                let t = &q * &self.hnf[c][k];
                v[k] -= t;
            }
            out[c] = q;
        }
        Some(out)
    }

    pub fn contains(&self, x: &Quat) -> bool {
        self.coords(x).is_some()
    }

    /// L1 ⊆ L2
    pub fn is_sublattice_of(&self, other: &QuatLattice) -> bool {
        self.basis().iter().all(|b| other.contains(b))
    }

    pub fn sum(&self, other: &QuatLattice) -> QuatLattice {
        let mut g: Vec<Quat> = self.basis().to_vec();
        g.extend(other.basis());
        Self::from_generators(&g).expect("sum of full lattices is full")
    }

    pub fn product(&self, alg: &QAlgebra, other: &QuatLattice) -> QuatLattice {
        let a = self.basis();
        let b = other.basis();
        let mut g = Vec::with_capacity(16);
        for x in &a {
            for y in &b {
                g.push(alg.mul(x, y));
            }
        }
        Self::from_generators(&g).expect("product of full lattices is full")
    }

    pub fn left_mul(&self, alg: &QAlgebra, x: &Quat) -> QuatLattice {
        let g: Vec<Quat> = self.basis().iter().map(|b| alg.mul(x, b)).collect();
        Self::from_generators(&g).expect("nonzero multiple")
    }

    pub fn right_mul(&self, alg: &QAlgebra, x: &Quat) -> QuatLattice {
        let g: Vec<Quat> = self.basis().iter().map(|b| alg.mul(b, x)).collect();
        Self::from_generators(&g).expect("nonzero multiple")
    }

    pub fn scale(&self, s: &BigRational) -> QuatLattice {
        let g: Vec<Quat> = self.basis().iter().map(|b| b.scale(s)).collect();
        Self::from_generators(&g).expect("nonzero scale")
    }

    pub fn conj(&self) -> QuatLattice {
        let g: Vec<Quat> = self.basis().iter().map(|b| b.conj()).collect();
        Self::from_generators(&g).expect("conjugation is invertible")
    }

    /// Dual lattice for the coordinate dot product.
    fn dual(&self) -> QuatLattice {
        let inv = linalg::inverse(&self.basis_matrix()).expect("full rank");
        let t = linalg::transpose(&inv);
        let g: Vec<Quat> = t.into_iter().map(|r| Quat([r[0].clone(), r[1].clone(), r[2].clone(), r[3].clone()])).collect();
        Self::from_generators(&g).expect("dual is full")
    }

    pub fn intersection(&self, other: &QuatLattice) -> QuatLattice {
        self.dual().sum(&other.dual()).dual()
    }

    /// Covolume with respect to Z^4 in the 1,i,j,k coordinates.
    pub fn covolume(&self) -> BigRational {
        let mut d = BigInt::one();
        for k in 0..4 {
            d *= &self.hnf[k][k];
        }
        BigRational::new(d, self.den.pow(4))
    }

    /// Generalised index [other : self] = covol(self) / covol(other).
    pub fn index_in(&self, other: &QuatLattice) -> BigRational {
        self.covolume() / other.covolume()
    }

    /// Gram matrix of Tr(x conj y) on the HNF basis.
    pub fn trace_gram(&self, alg: &QAlgebra) -> QMat {
        let b = self.basis();
        (0..4).map(|r| (0..4).map(|c| alg.pair(&b[r], &b[c])).collect()).collect()
    }

    /// Reduced norm n(L): the positive generator of the Z-module spanned by n(x), x in L.
    pub fn norm(&self, alg: &QAlgebra) -> BigRational {
        let g = self.trace_gram(alg);
        let mut vals = Vec::new();
        for r in 0..4 {
            vals.push(&g[r][r] / BigRational::from_integer(2.into()));
            for c in r + 1..4 {
                vals.push(g[r][c].clone());
            }
        }
        crate::arith::gcd_rational(vals.iter())
    }

    /// {x : x L ⊆ L}
    pub fn left_order(&self, alg: &QAlgebra) -> QuatLattice {
        let b = self.basis();
        let mut acc: Option<QuatLattice> = None;
        for e in &b {
            let l = self.right_mul(alg, &alg.inverse(e));
            acc = Some(match acc {
                None => l,
                Some(a) => a.intersection(&l),
            });
        }
        acc.unwrap()
    }

    /// {x : L x ⊆ L}
    pub fn right_order(&self, alg: &QAlgebra) -> QuatLattice {
        let b = self.basis();
        let mut acc: Option<QuatLattice> = None;
        for e in &b {
            let l = self.left_mul(alg, &alg.inverse(e));
            acc = Some(match acc {
                None => l,
                Some(a) => a.intersection(&l),
            });
        }
        acc.unwrap()
    }

    /// Integer matrix M with x * e_k = sum_l M[k][l] e_l (left action of x), if x L ⊆ L.
    pub fn left_action(&self, alg: &QAlgebra, x: &Quat) -> Option<[[BigInt; 4]; 4]> {
        let b = self.basis();
        let mut m: [[BigInt; 4]; 4] = Default::default();
        for k in 0..4 {
            m[k] = self.coords(&alg.mul(x, &b[k]))?;
        }
        Some(m)
    }

    pub fn right_action(&self, alg: &QAlgebra, x: &Quat) -> Option<[[BigInt; 4]; 4]> {
        let b = self.basis();
        let mut m: [[BigInt; 4]; 4] = Default::default();
        for k in 0..4 {
            m[k] = self.coords(&alg.mul(&b[k], x))?;
        }
        Some(m)
    }

    /// Combination sum_k c_k e_k of the basis.
    pub fn element(&self, c: &[BigInt; 4]) -> Quat {
        let b = self.basis();
        let mut out = Quat::zero();
        for k in 0..4 {
            if !c[k].is_zero() {
                out = out.add(&b[k].scale(&BigRational::from_integer(c[k].clone())));
            }
        }
        out
    }

    pub fn element_i64(&self, c: &[i64]) -> Quat {
        let cb: [BigInt; 4] = std::array::from_fn(|k| BigInt::from(c[k]));
        self.element(&cb)
    }
}
