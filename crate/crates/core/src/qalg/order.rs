use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::algebra::{QAlgebra, Quat};
use super::lattice::QuatLattice;
use crate::arith::{is_prime, legendre};
use crate::error::{Error, Result};
use crate::linalg;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Order {
    pub alg: QAlgebra,
    pub lattice: QuatLattice,
    pub disc: u64,
    pub omega_x: u64,
}

fn is_integral(alg: &QAlgebra, x: &Quat) -> bool {
    x.trace().is_integer() && alg.norm(x).is_integer()
}

/// Whether the lattice is an order: contains 1 and is closed under products.
pub fn is_order(alg: &QAlgebra, l: &QuatLattice) -> bool {
    if !l.contains(&Quat::one()) {
        return false;
    }
    let b = l.basis();
    b.iter().all(|x| b.iter().all(|y| l.contains(&alg.mul(x, y))))
}

/// Basis f_1, f_2, f_3 completing 1 to a basis of the lattice (which must contain 1 primitively).
pub fn complement_of_one(l: &QuatLattice) -> Option<[Quat; 3]> {
    let rev = |q: &Quat| Quat([q.0[3].clone(), q.0[2].clone(), q.0[1].clone(), q.0[0].clone()]);
    let r: Vec<Quat> = l.basis().iter().map(rev).collect();
    let h = QuatLattice::from_generators(&r).ok()?;
    let b = h.basis();
    if rev(&b[3]) != Quat::one() {
        return None;
    }
    Some([rev(&b[0]), rev(&b[1]), rev(&b[2])])
}

/// Coefficients (a1,a2,a3,a23,a13,a12) of -normx on the complement basis, before division by omega.
pub fn normx_form(alg: &QAlgebra, f: &[Quat; 3]) -> [BigInt; 6] {
    let d = |x: &Quat| (-alg.normx(x)).to_integer();
    let c = |x: &Quat, y: &Quat| (-alg.normx_polar(x, y)).to_integer();
    [d(&f[0]), d(&f[1]), d(&f[2]), c(&f[1], &f[2]), c(&f[0], &f[2]), c(&f[0], &f[1])]
}

impl Order {
    pub fn new(alg: QAlgebra, lattice: QuatLattice) -> Result<Order> {
        if !is_order(&alg, &lattice) {
            return Err(Error::NotAnOrder);
        }
        let gram = lattice.trace_gram(&alg);
        let d = linalg::det(&gram).abs();
        if !d.is_integer() {
            return Err(Error::Internal("non-integral order discriminant".into()));
        }
        let di = d.to_integer();
        let s = di.sqrt();
        if &s * &s != di {
            return Err(Error::Internal(format!("order determinant {di} is not a square")));
        }
        let f = complement_of_one(&lattice).ok_or_else(|| Error::Internal("1 not primitive in order".into()))?;
        let coeffs = normx_form(&alg, &f);
        let mut g = BigInt::zero();
        for c in &coeffs {
            g = g.gcd(c);
        }
        Ok(Order {
            alg,
            lattice,
            disc: s.to_u64().ok_or(Error::Internal("disc overflow".into()))?,
            omega_x: g.to_u64().ok_or(Error::Internal("omega overflow".into()))?,
        })
    }

    pub fn from_generators(alg: QAlgebra, gens: &[Quat]) -> Result<Order> {
        let l = QuatLattice::from_generators(gens)?;
        Order::new(alg, l)
    }

    pub fn basis(&self) -> [Quat; 4] {
        self.lattice.basis()
    }

    /// Basis of O/Z lifted to O.
    pub fn pure_basis(&self) -> [Quat; 3] {
        complement_of_one(&self.lattice).expect("orders contain 1 primitively")
    }

    pub fn contains(&self, x: &Quat) -> bool {
        self.lattice.contains(x)
    }
}

fn canonical_key(l: &QuatLattice) -> Vec<BigInt> {
    let mut k = vec![l.den.clone()];
    for r in &l.hnf {
        k.extend(r.iter().cloned());
    }
    k
}

/// Ring generated by an order and one more integral element, if it stays integral.
fn adjoin(alg: &QAlgebra, o: &QuatLattice, y: &Quat) -> Option<QuatLattice> {
    let mut g = o.basis().to_vec();
    g.push(y.clone());
    let mut l = QuatLattice::from_generators(&g).ok()?;
    for _ in 0..8 {
        if !l.basis().iter().all(|x| is_integral(alg, x)) {
            return None;
        }
        let n = l.product(alg, &l);
        if n == l {
            let gram = l.trace_gram(alg);
            if gram.iter().flatten().all(|x| x.is_integer()) {
                return Some(l);
            }
            return None;
        }
        l = n;
    }
    None
}

/// Enlarge an order step by step (adjoining x/l for primes l dividing disc/p)
/// until its discriminant equals `target`.
pub fn enlarge_to_disc(alg: QAlgebra, start: Order, target: u64) -> Result<Order> {
    let mut cur = start;
    while cur.disc != target {
        if cur.disc % target != 0 {
            return Err(Error::MaximalOrder { p: target, last_disc: cur.disc });
        }
        let rest = cur.disc / target;
        let mut best: Option<Order> = None;
        for (l, _) in crate::arith::factor(rest) {
            let b = cur.basis();
            let li = l as i64;
            let total = li.pow(4);
            for idx in 1..total {
                let mut c = [0i64; 4];
                let mut t = idx;
                for slot in c.iter_mut() {
                    *slot = t % li;
                    t /= li;
                }
                let mut x = Quat::zero();
                for k in 0..4 {
                    x = x.add(&b[k].scale(&crate::arith::rat(c[k])));
                }
                let y = x.scale(&BigRational::new(BigInt::one(), BigInt::from(l)));
                if !is_integral(&alg, &y) || cur.contains(&y) {
                    continue;
                }
                let Some(nl) = adjoin(&alg, &cur.lattice, &y) else { continue };
                let Ok(no) = Order::new(alg, nl) else { continue };
                if no.disc >= cur.disc || no.disc % target != 0 {
                    continue;
                }
                let better = match &best {
                    None => true,
                    Some(bo) => {
                        (no.disc, canonical_key(&no.lattice)) < (bo.disc, canonical_key(&bo.lattice))
                    }
                };
                if better {
                    best = Some(no);
                }
            }
        }
        match best {
            Some(b) => cur = b,
            None => return Err(Error::MaximalOrder { p: target, last_disc: cur.disc }),
        }
    }
    Ok(cur)
}

/// An algebra ramified exactly at {p, oo} together with a maximal order.
pub fn maximal_order(p: u64) -> Result<(QAlgebra, Order)> {
    if p == 2 || !is_prime(p) {
        return Err(Error::Unsupported(format!("maximal_order needs an odd prime, got {p}")));
    }
    let pi = p as i64;
    if p % 4 == 3 {
        let alg = QAlgebra::new(-1, -pi);
        let o = Order::from_generators(
            alg,
            &[Quat::one(), alg.i(), Quat::from_frac([1, 0, 1, 0], 2), Quat::from_frac([0, 1, 0, 1], 2)],
        )?;
        return Ok((alg, o));
    }
    if p % 8 == 5 {
        let alg = QAlgebra::new(-2, -pi);
        let o = Order::from_generators(alg, &[Quat::one(), alg.i(), alg.j(), alg.k()])?;
        return Ok((alg, enlarge_to_disc(alg, o, p)?));
    }
    // p = 1 mod 8: H(-p, -q) with q = 3 mod 4 and (p/q) = -1
    let q = (3..)
        .step_by(4)
        .find(|&q: &u64| is_prime(q) && legendre(pi, q) == -1)
        .expect("such q exists");
    let alg = QAlgebra::new(-pi, -(q as i64));
    let o = Order::from_generators(
        alg,
        &[Quat::one(), alg.i(), Quat::from_frac([1, 0, 1, 0], 2), Quat::from_frac([0, 1, 0, 1], 2)],
    )?;
    Ok((alg, enlarge_to_disc(alg, o, p)?))
}
