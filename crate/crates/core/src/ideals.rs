//! Left ideals, ideal classes, unit groups, the suborders of level p^2 and p^3,
//! subideal maps and the sign character on classes of the level-p^2 order.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, legendre, rat};
use crate::enumerate::Enumerator;
use crate::error::{Error, Result};
use crate::linalg::QVec;
use crate::par;
use crate::qalg::{QAlgebra, Quat, QuatLattice, Order};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeftIdeal {
    pub left_order: Order,
    pub lattice: QuatLattice,
    #[serde(with = "crate::arith::rat_str")]
    pub norm: BigRational,
}

/// Integer Gram matrix of Tr(x conj y) * scale on the lattice basis.
pub fn int_gram(alg: &QAlgebra, l: &QuatLattice, scale: &BigRational) -> Result<Vec<Vec<i64>>> {
    let g = l.trace_gram(alg);
    let mut out = vec![vec![0i64; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            let v = &g[r][c] * scale;
            if !v.is_integer() {
                return Err(Error::Internal("trace form not integral after scaling".into()));
            }
            out[r][c] = v.to_integer().to_i64().ok_or(Error::Internal("gram overflow".into()))?;
        }
    }
    Ok(out)
}

impl LeftIdeal {
    pub fn new(left_order: Order, lattice: QuatLattice) -> Result<LeftIdeal> {
        let alg = left_order.alg;
        for g in left_order.basis() {
            if lattice.left_action(&alg, &g).is_none() {
                return Err(Error::Invalid("lattice is not stable under the left order".into()));
            }
        }
        let norm = lattice.norm(&alg);
        Ok(LeftIdeal { left_order, lattice, norm })
    }

    /// The order itself as a left ideal.
    pub fn unit(order: &Order) -> LeftIdeal {
        LeftIdeal { left_order: order.clone(), lattice: order.lattice.clone(), norm: BigRational::one() }
    }

    pub fn alg(&self) -> QAlgebra {
        self.left_order.alg
    }

    pub fn right_order(&self) -> Order {
        let alg = self.alg();
        Order::new(alg, self.lattice.right_order(&alg)).expect("right order of a lattice is an order")
    }

    /// a * x
    pub fn mul_right(&self, x: &Quat) -> LeftIdeal {
        let alg = self.alg();
        let l = self.lattice.right_mul(&alg, x);
        let norm = &self.norm * alg.norm(x);
        LeftIdeal { left_order: self.left_order.clone(), lattice: l, norm }
    }

    /// Locally principal test: left order exactly `O` and [O : a] = n(a)^2.
    pub fn is_locally_principal(&self) -> bool {
        let alg = self.alg();
        self.lattice.left_order(&alg) == self.left_order.lattice
            && self.lattice.index_in(&self.left_order.lattice) == &self.norm * &self.norm
    }

    /// Enumerator for the normalised norm n(x)/n(a) on the ideal.
    pub fn norm_enumerator(&self) -> Enumerator {
        let g = int_gram(&self.alg(), &self.lattice, &self.norm.recip()).expect("ideal norm form is integral");
        Enumerator::new(&g).expect("definite")
    }
}

/// x with a = b x, if a and b are in the same left class.
pub fn equivalent(a: &LeftIdeal, b: &LeftIdeal) -> Option<Quat> {
    let alg = a.alg();
    if a.left_order.lattice != b.left_order.lattice {
        return None;
    }
    let l = b.lattice.conj().product(&alg, &a.lattice);
    let scale = (&a.norm * &b.norm).recip();
    let g = int_gram(&alg, &l, &scale).ok()?;
    let e = Enumerator::new(&g).ok()?;
    let nb = b.norm.recip();
    for y in e.with_value(1) {
        let x = l.element_i64(&y).scale(&nb);
        if b.lattice.right_mul(&alg, &x) == a.lattice {
            return Some(x);
        }
    }
    None
}

/// |O^x|, the number of norm-one elements.
pub fn unit_count(o: &Order) -> u64 {
    let g = int_gram(&o.alg, &o.lattice, &rat(1)).expect("orders are integral");
    Enumerator::new(&g).expect("definite").counts(1)[1]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassSet {
    pub order: Order,
    pub reps: Vec<LeftIdeal>,
    pub right_orders: Vec<Order>,
    /// |O_r(a_i)^x|
    pub unit_orders: Vec<u64>,
}

impl ClassSet {
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    /// Sum of 1/|O_r(a_i)^x|.
    pub fn mass(&self) -> BigRational {
        self.unit_orders.iter().map(|&u| BigRational::new(BigInt::one(), BigInt::from(u))).sum()
    }

    /// Half the unit counts: the height pairing weights.
    pub fn weights(&self) -> Vec<BigRational> {
        self.unit_orders.iter().map(|&u| BigRational::new(BigInt::from(u), BigInt::from(2))).collect()
    }

    /// Index of the class containing `a`.
    pub fn class_of(&self, a: &LeftIdeal) -> Option<usize> {
        self.reps.iter().position(|r| equivalent(a, r).is_some())
    }

    /// The Eisenstein vector sum [a_i]/|O_r(a_i)^x| scaled to a primitive integer vector.
    pub fn eisenstein(&self) -> QVec {
        let v: QVec = self.unit_orders.iter().map(|&u| BigRational::new(BigInt::one(), BigInt::from(u))).collect();
        crate::linalg::primitive(&v).0
    }
}

/// Height pairing sum v_i w_i |O_r(a_i)^x| / 2.
pub fn height(cs: &ClassSet, v: &[BigRational], w: &[BigRational]) -> BigRational {
    assert_eq!(v.len(), cs.len());
    assert_eq!(w.len(), cs.len());
    cs.weights().iter().zip(v.iter().zip(w)).map(|(u, (a, b))| u * a * b).sum()
}

/// Eichler mass of a maximal order of discriminant p, pinned as sum 1/|O^x| = (p-1)/24.
pub fn maximal_mass(p: u64) -> BigRational {
    BigRational::new(BigInt::from(p - 1), BigInt::from(24))
}

/// Mass of the index-p suborder: (p+1) times the maximal mass.
pub fn tilde_mass(p: u64) -> BigRational {
    BigRational::new(BigInt::from(p * p - 1), BigInt::from(24))
}

/// Projective points of F_q^n, first nonzero coordinate 1, lexicographic from the last coordinate.
pub fn projective_points(q: i64, n: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for lead in (0..n).rev() {
        let free = n - 1 - lead;
        for idx in 0..q.pow(free as u32) {
            let mut v = vec![0i64; n];
            v[lead] = 1;
            let mut t = idx;
            for s in v.iter_mut().skip(lead + 1) {
                *s = t % q;
                t /= q;
            }
            out.push(v);
        }
    }
    out
}

fn mod_matrix(m: &[[BigInt; 4]; 4], q: i64) -> [[i64; 4]; 4] {
    let qb = BigInt::from(q);
    std::array::from_fn(|r| std::array::from_fn(|c| {
        let x = &m[r][c] % &qb;
        let x = x.to_i64().unwrap();
        x.rem_euclid(q)
    }))
}

/// Functional lambda (column) is a common eigenvector of every M (rows act on coordinate rows).
fn is_eigen(ms: &[[[i64; 4]; 4]], lam: &[i64], q: i64) -> bool {
    ms.iter().all(|m| {
        let w: Vec<i64> = (0..4).map(|r| (0..4).map(|c| m[r][c] * lam[c]).sum::<i64>().rem_euclid(q)).collect();
        // w must be a multiple of lam
        let t = (0..4).find(|&k| lam[k] != 0).unwrap();
        let mu = w[t];
        (0..4).all(|k| (w[k] - mu * lam[k]).rem_euclid(q) == 0)
    })
}

/// Sublattice {x in L : lambda . coords(x) = 0 mod q}.
fn hyperplane_lattice(l: &QuatLattice, lam: &[i64], q: i64) -> QuatLattice {
    let t = (0..4).find(|&k| lam[k] != 0).unwrap();
    let inv = crate::arith::mod_inv(lam[t], q).unwrap();
    let lamn: Vec<i64> = lam.iter().map(|x| (x * inv).rem_euclid(q)).collect();
    let b = l.basis();
    let mut gens = Vec::new();
    for k in 0..4 {
        if k == t {
            gens.push(b[t].scale(&rat(q)));
        } else {
            gens.push(b[k].sub(&b[t].scale(&rat(lamn[k]))));
        }
    }
    QuatLattice::from_generators(&gens).expect("index-q sublattice is full")
}

/// Index-p sublattices b of a with p a ⊂ b that are left-stable under `sub`,
/// have n(b) = n(a) and are locally principal for `sub`. Order follows the
/// enumeration of F_p-functionals.
pub fn subideals(a: &LeftIdeal, sub: &Order, p: u64) -> Vec<LeftIdeal> {
    let alg = a.alg();
    let q = p as i64;
    let ms: Vec<[[i64; 4]; 4]> = sub
        .basis()
        .iter()
        .map(|g| mod_matrix(&a.lattice.left_action(&alg, g).expect("sub ⊂ left order of a"), q))
        .collect();
    let cands: Vec<Vec<i64>> = projective_points(q, 4).into_iter().filter(|lam| is_eigen(&ms, lam, q)).collect();
    let found = par::map(&cands, |lam| {
        let l = hyperplane_lattice(&a.lattice, lam, q);
        let b = LeftIdeal { left_order: sub.clone(), norm: l.norm(&alg), lattice: l };
        if b.norm == a.norm && b.is_locally_principal() {
            Some(b)
        } else {
            None
        }
    });
    found.into_iter().flatten().collect()
}

/// Integral left ideals of norm q n(a) inside a (the q-neighbours), for a prime q.
pub fn neighbours(a: &LeftIdeal, q: u64) -> Vec<LeftIdeal> {
    let alg = a.alg();
    let qi = q as i64;
    let ms: Vec<[[i64; 4]; 4]> = a
        .left_order
        .basis()
        .iter()
        .map(|g| mod_matrix(&a.lattice.left_action(&alg, g).unwrap(), qi))
        .collect();
    // 2-dimensional row spaces W with W M ⊆ W, as spans of pairs of projective points
    let pts = projective_points(qi, 4);
    let mut planes: Vec<[Vec<i64>; 2]> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (i, u) in pts.iter().enumerate() {
        for v in pts.iter().skip(i + 1) {
            let key = rref_plane(u, v, qi);
            if seen.insert(key.clone()) {
                planes.push(key);
            }
        }
    }
    let stable: Vec<[Vec<i64>; 2]> = planes
        .into_iter()
        .filter(|w| {
            ms.iter().all(|m| {
                w.iter().all(|row| {
                    let img: Vec<i64> = (0..4).map(|c| (0..4).map(|r| row[r] * m[r][c]).sum::<i64>().rem_euclid(qi)).collect();
                    in_plane(w, &img, qi)
                })
            })
        })
        .collect();
    let target = &a.norm * rat(q as i64);
    let b = a.lattice.basis();
    let out = par::map(&stable, |w| {
        let mut gens: Vec<Quat> = b.iter().map(|e| e.scale(&rat(qi))).collect();
        for row in w {
            gens.push(a.lattice.element_i64(row));
        }
        let l = QuatLattice::from_generators(&gens).unwrap();
        let n = l.norm(&alg);
        if n == target {
            Some(LeftIdeal { left_order: a.left_order.clone(), lattice: l, norm: n })
        } else {
            None
        }
    });
    out.into_iter().flatten().collect()
}

fn rref_plane(u: &[i64], v: &[i64], q: i64) -> [Vec<i64>; 2] {
    let mut m = vec![u.to_vec(), v.to_vec()];
    let mut r = 0;
    for c in 0..4 {
        if r == 2 {
            break;
        }
        let Some(pr) = (r..2).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, pr);
        let inv = crate::arith::mod_inv(m[r][c], q).unwrap();
        for x in m[r].iter_mut() {
            *x = (*x * inv).rem_euclid(q);
        }
        for i in 0..2 {
            if i != r && m[i][c] != 0 {
                let f = m[i][c];
                for j in 0..4 {
                    m[i][j] = (m[i][j] - f * m[r][j]).rem_euclid(q);
                }
            }
        }
        r += 1;
    }
    [m[0].clone(), m[1].clone()]
}

fn in_plane(w: &[Vec<i64>; 2], x: &[i64], q: i64) -> bool {
    // x in span(w) iff rank of {w0, w1, x} is 2; with w in RREF subtract pivots
    let mut y = x.to_vec();
    for row in w {
        let pc = (0..4).find(|&c| row[c] != 0).unwrap();
        let f = y[pc];
        for j in 0..4 {
            y[j] = (y[j] - f * row[j]).rem_euclid(q);
        }
    }
    y.iter().all(|&t| t == 0)
}

fn canonical_key(l: &LeftIdeal) -> (BigRational, Vec<BigInt>) {
    let mut k = vec![l.lattice.den.clone()];
    for r in &l.lattice.hnf {
        k.extend(r.iter().cloned());
    }
    (l.norm.clone(), k)
}

/// Left ideal classes of a maximal order of discriminant p, by neighbour search
/// until the mass (p-1)/24 is reached. Representatives are the smallest (norm,
/// canonical basis) ideal met in each class, sorted the same way.
pub fn class_set(o: &Order, p: u64) -> Result<ClassSet> {
    if o.disc != p {
        return Err(Error::Unsupported("class_set expects a maximal order; use tilde_class_set for the index-p suborder".into()));
    }
    let target = maximal_mass(p);
    let unit = LeftIdeal::unit(o);
    let ro = unit.right_order();
    let mut reps = vec![unit];
    let mut rords = vec![ro.clone()];
    let mut units = vec![unit_count(&ro)];
    let mut mass: BigRational = BigRational::new(BigInt::one(), BigInt::from(units[0]));
    let qs: Vec<u64> = (2..100).filter(|&q| is_prime(q) && q != p).collect();
    for &q in &qs {
        let mut frontier: Vec<usize> = (0..reps.len()).collect();
        while mass < target && !frontier.is_empty() {
            let mut next = Vec::new();
            for idx in frontier {
                let nb = neighbours(&reps[idx].clone(), q);
                for b in nb {
                    match reps.iter().position(|r| equivalent(&b, r).is_some()) {
                        Some(k) => {
                            if canonical_key(&b) < canonical_key(&reps[k]) {
                                reps[k] = b;
                            }
                        }
                        None => {
                            let r = b.right_order();
                            let u = unit_count(&r);
                            mass += BigRational::new(BigInt::one(), BigInt::from(u));
                            reps.push(b);
                            rords.push(r);
                            units.push(u);
                            next.push(reps.len() - 1);
                        }
                    }
                }
                if mass >= target {
                    break;
                }
            }
            frontier = next;
        }
        if mass >= target {
            break;
        }
    }
    if mass != target {
        return Err(Error::MassMismatch(format!("p={p}: reached {mass}, expected {target}")));
    }
    // representatives may have been replaced; recompute right orders and sort
    let mut items: Vec<(LeftIdeal, Order, u64)> = reps
        .into_iter()
        .map(|a| {
            let r = a.right_order();
            let u = unit_count(&r);
            (a, r, u)
        })
        .collect();
    items.sort_by(|x, y| canonical_key(&x.0).cmp(&canonical_key(&y.0)));
    Ok(ClassSet {
        order: o.clone(),
        reps: items.iter().map(|t| t.0.clone()).collect(),
        right_orders: items.iter().map(|t| t.1.clone()).collect(),
        unit_orders: items.iter().map(|t| t.2).collect(),
    })
}

/// Õ = {x in O : p | normx(x)}, the index-p suborder of a maximal order.
pub fn suborder_tilde(o: &Order, p: u64) -> Result<Order> {
    let alg = o.alg;
    let f = o.pure_basis();
    let q = p as i64;
    let normx_mod = |c: &[i64]| -> i64 {
        let mut x = Quat::zero();
        for k in 0..3 {
            x = x.add(&f[k].scale(&rat(c[k])));
        }
        let v = alg.normx(&x).to_integer() % BigInt::from(q);
        v.to_i64().unwrap().rem_euclid(q)
    };
    let zeros: Vec<Vec<i64>> = projective_points(q, 3).into_iter().filter(|c| normx_mod(c) == 0).collect();
    if zeros.len() != (p + 1) as usize {
        return Err(Error::Internal(format!("normx zero set mod {p} has {} lines, expected {}", zeros.len(), p + 1)));
    }
    let mut gens: Vec<Quat> = vec![Quat::one()];
    gens.extend(o.basis().iter().map(|b| b.scale(&rat(q))));
    for z in &zeros {
        let mut x = Quat::zero();
        for k in 0..3 {
            x = x.add(&f[k].scale(&rat(z[k])));
        }
        gens.push(x);
    }
    let t = Order::from_generators(alg, &gens)?;
    if t.lattice.index_in(&o.lattice) != rat(q) {
        return Err(Error::Internal("normx kernel is not of index p".into()));
    }
    Ok(t)
}

/// Sign of a suborder Z + pO + Zx of Õ: the Legendre symbol of -normx(x)/p mod p.
pub fn order_sign(o_sub: &Order, p: u64) -> Result<i32> {
    let alg = o_sub.alg;
    let pb = BigInt::from(p);
    for x in o_sub.pure_basis() {
        let nx = -alg.normx(&x).to_integer();
        if (&nx % &pb).is_zero() {
            let r = &nx / &pb;
            let s = crate::arith::legendre_big(&r, p);
            if s != 0 {
                return Ok(s);
            }
        }
    }
    Err(Error::Internal("suborder sign undefined".into()))
}

/// The p+1 orders strictly between Z + pO and Õ, with their signs. The maximal
/// order O is needed for Z + pO.
pub fn suborders_sigma(o: &Order, tilde: &Order, p: u64) -> Result<Vec<(Order, i32)>> {
    let alg = o.alg;
    let q = p as i64;
    let base: Vec<Quat> = std::iter::once(Quat::one()).chain(o.basis().iter().map(|b| b.scale(&rat(q)))).collect();
    let base_l = QuatLattice::from_generators(&base)?;
    // a basis u, w of Õ/(Z + pO) from Õ's pure basis
    let mut plane: Vec<Quat> = Vec::new();
    for x in tilde.pure_basis() {
        if base_l.contains(&x) {
            continue;
        }
        if plane.len() == 1 {
            let mut g = base.clone();
            g.push(plane[0].clone());
            if QuatLattice::from_generators(&g)?.contains(&x) {
                continue;
            }
        }
        plane.push(x);
    }
    if plane.len() != 2 {
        return Err(Error::Internal("Õ/(Z+pO) is not 2-dimensional".into()));
    }
    let mut lines: Vec<(i64, i64)> = vec![(1, 0), (0, 1)];
    lines.extend((1..q).map(|t| (t, 1)));
    let mut out = Vec::new();
    for (s, t) in lines {
        let x = plane[0].scale(&rat(s)).add(&plane[1].scale(&rat(t)));
        let mut g = base.clone();
        g.push(x);
        let ord = Order::from_generators(alg, &g)?;
        let sg = order_sign(&ord, p)?;
        out.push((ord, sg));
    }
    Ok(out)
}

/// chi(b) = ((n(x)/n(b)) / p) for any x in b with p not dividing n(x)/n(b).
pub fn chi_sign(b: &LeftIdeal, p: u64) -> Result<i32> {
    let e = b.norm_enumerator();
    let mut bound = 4u64;
    while bound <= 1 << 20 {
        let mut best: Option<u64> = None;
        e.for_each(bound, |_, v| {
            if v % p != 0 && best.map_or(true, |b| v < b) {
                best = Some(v);
            }
        });
        if let Some(v) = best {
            return Ok(legendre(v as i64, p));
        }
        bound *= 4;
    }
    Err(Error::Internal("no vector prime to p found for chi".into()))
}

/// Classes of Õ together with the subideal map from O-classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TildeClassSet {
    pub classes: ClassSet,
    /// parent[j] = index of the O-class containing O b_j
    pub parent: Vec<usize>,
    /// psi[i][j] = number of Õ-subideals of a_i in class j
    pub psi: Vec<Vec<i64>>,
    pub chi: Vec<i32>,
}

pub fn tilde_class_set(cls: &ClassSet, tilde: &Order, p: u64) -> Result<TildeClassSet> {
    let per_parent: Vec<Vec<LeftIdeal>> = par::map(&cls.reps, |a| subideals(a, tilde, p));
    let mut reps: Vec<LeftIdeal> = Vec::new();
    let mut parent = Vec::new();
    let mut psi_rows: Vec<Vec<(usize, i64)>> = Vec::new();
    for (i, subs) in per_parent.iter().enumerate() {
        if subs.len() != (p + 1) as usize {
            return Err(Error::Internal(format!("O-class {i} has {} Õ-subideals, expected {}", subs.len(), p + 1)));
        }
        let start = reps.len();
        let mut row: Vec<(usize, i64)> = Vec::new();
        for b in subs {
            let found = (start..reps.len()).find(|&k| equivalent(b, &reps[k]).is_some());
            let k = match found {
                Some(k) => k,
                None => {
                    reps.push(b.clone());
                    parent.push(i);
                    reps.len() - 1
                }
            };
            match row.iter_mut().find(|e| e.0 == k) {
                Some(e) => e.1 += 1,
                None => row.push((k, 1)),
            }
        }
        psi_rows.push(row);
    }
    let h = reps.len();
    let ros: Vec<Order> = par::map(&reps, |b| b.right_order());
    let units: Vec<u64> = par::map(&ros, unit_count);
    let chi = reps.iter().map(|b| chi_sign(b, p)).collect::<Result<Vec<_>>>()?;
    let psi = psi_rows
        .into_iter()
        .map(|row| {
            let mut v = vec![0i64; h];
            for (k, m) in row {
                v[k] = m;
            }
            v
        })
        .collect();
    let classes = ClassSet { order: tilde.clone(), reps, right_orders: ros, unit_orders: units };
    let target = tilde_mass(p);
    if classes.mass() != target {
        return Err(Error::MassMismatch(format!("Õ classes for p={p}: {} vs {}", classes.mass(), target)));
    }
    Ok(TildeClassSet { classes, parent, psi, chi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qalg::maximal_order;

    #[test]
    fn projective_count() {
        assert_eq!(projective_points(3, 4).len(), 40);
        assert_eq!(projective_points(7, 3).len(), 57);
    }

    #[test]
    fn p7_basics() {
        let (alg, o) = maximal_order(7).unwrap();
        assert_eq!(unit_count(&o), 4);
        let cs = class_set(&o, 7).unwrap();
        assert_eq!(cs.len(), 1);
        let t = suborder_tilde(&o, 7).unwrap();
        let expected = Order::from_generators(
            alg,
            &[Quat::one(), Quat::from_ints([0, 7, 0, 0]), Quat::from_frac([1, 0, 1, 0], 2), Quat::from_frac([0, 7, 0, 1], 2)],
        )
        .unwrap();
        assert_eq!(t.lattice, expected.lattice);
        assert_eq!(unit_count(&t), 2);
    }
}
