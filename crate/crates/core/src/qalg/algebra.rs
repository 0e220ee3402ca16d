use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factor, rat};

/// Definite quaternion algebra H(a,b): i^2 = a, j^2 = b, ij = -ji = k.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QAlgebra {
    pub a: i64,
    pub b: i64,
}

/// Coordinates with respect to 1, i, j, k.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Quat(#[serde(with = "quat_str")] pub [BigRational; 4]);

mod quat_str {
    use num_rational::BigRational;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(c: &[BigRational; 4], s: S) -> Result<S::Ok, S::Error> {
        crate::arith::rat_str::vec::serialize(c, s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[BigRational; 4], D::Error> {
        let v = crate::arith::rat_str::vec::deserialize(d)?;
        v.try_into().map_err(|_| serde::de::Error::custom("a quaternion has four coordinates"))
    }
}

impl Quat {
    pub fn zero() -> Self {
        Quat(std::array::from_fn(|_| BigRational::zero()))
    }

    pub fn one() -> Self {
        Self::scalar(BigRational::one())
    }

    pub fn scalar(t: BigRational) -> Self {
        let mut q = Self::zero();
        q.0[0] = t;
        q
    }

    pub fn from_ints(c: [i64; 4]) -> Self {
        Quat(c.map(rat))
    }

    /// (c0 + c1 i + c2 j + c3 k) / den
    pub fn from_frac(c: [i64; 4], den: i64) -> Self {
        Quat(c.map(|x| BigRational::new(BigInt::from(x), BigInt::from(den))))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| x.is_zero())
    }

    pub fn add(&self, o: &Quat) -> Quat {
        Quat(std::array::from_fn(|t| &self.0[t] + &o.0[t]))
    }

    pub fn sub(&self, o: &Quat) -> Quat {
        Quat(std::array::from_fn(|t| &self.0[t] - &o.0[t]))
    }

    pub fn neg(&self) -> Quat {
        Quat(std::array::from_fn(|t| -&self.0[t]))
    }

    pub fn scale(&self, s: &BigRational) -> Quat {
        Quat(std::array::from_fn(|t| &self.0[t] * s))
    }

    pub fn conj(&self) -> Quat {
        Quat([self.0[0].clone(), -&self.0[1], -&self.0[2], -&self.0[3]])
    }

    pub fn trace(&self) -> BigRational {
        &self.0[0] * rat(2)
    }
}

impl fmt::Display for Quat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["", "i", "j", "k"];
        let mut first = true;
        for (c, n) in self.0.iter().zip(names) {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            if n.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{n}")?;
            } else {
                write!(f, "{a}{n}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl QAlgebra {
    pub fn new(a: i64, b: i64) -> Self {
        assert!(a < 0 && b < 0, "definite algebra needs a, b < 0");
        QAlgebra { a, b }
    }

    pub fn mul(&self, x: &Quat, y: &Quat) -> Quat {
        let a = rat(self.a);
        let b = rat(self.b);
        let ab = rat(self.a * self.b);
        let [x0, x1, x2, x3] = &x.0;
        let [y0, y1, y2, y3] = &y.0;
        Quat([
            x0 * y0 + &a * (x1 * y1) + &b * (x2 * y2) - &ab * (x3 * y3),
            x0 * y1 + x1 * y0 - &b * (x2 * y3) + &b * (x3 * y2),
            x0 * y2 + x2 * y0 + &a * (x1 * y3) - &a * (x3 * y1),
            x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1,
        ])
    }

    pub fn norm(&self, x: &Quat) -> BigRational {
        let [x0, x1, x2, x3] = &x.0;
        x0 * x0 - rat(self.a) * (x1 * x1) - rat(self.b) * (x2 * x2) + rat(self.a * self.b) * (x3 * x3)
    }

    /// Tr(x conj(y)), the bilinear form with Tr(x conj(x)) = 2 n(x).
    pub fn pair(&self, x: &Quat, y: &Quat) -> BigRational {
        let [x0, x1, x2, x3] = &x.0;
        let [y0, y1, y2, y3] = &y.0;
        rat(2) * (x0 * y0 - rat(self.a) * (x1 * y1) - rat(self.b) * (x2 * y2) + rat(self.a * self.b) * (x3 * y3))
    }

    /// normx(x) = (x - conj x)^2 = Tr(x)^2 - 4 n(x).
    pub fn normx(&self, x: &Quat) -> BigRational {
        let [_, x1, x2, x3] = &x.0;
        rat(4) * (rat(self.a) * (x1 * x1) + rat(self.b) * (x2 * x2) - rat(self.a * self.b) * (x3 * x3))
    }

    /// Polar form of normx: normx(x+y) - normx(x) - normx(y).
    pub fn normx_polar(&self, x: &Quat, y: &Quat) -> BigRational {
        let [_, x1, x2, x3] = &x.0;
        let [_, y1, y2, y3] = &y.0;
        rat(8) * (rat(self.a) * (x1 * y1) + rat(self.b) * (x2 * y2) - rat(self.a * self.b) * (x3 * y3))
    }

    pub fn inverse(&self, x: &Quat) -> Quat {
        let n = self.norm(x);
        x.conj().scale(&n.recip())
    }

    pub fn i(&self) -> Quat {
        Quat::from_ints([0, 1, 0, 0])
    }

    pub fn j(&self) -> Quat {
        Quat::from_ints([0, 0, 1, 0])
    }

    pub fn k(&self) -> Quat {
        Quat::from_ints([0, 0, 0, 1])
    }

    /// Finite primes at which the algebra ramifies.
    pub fn ramified_primes(&self) -> Vec<u64> {
        let mut cand: Vec<u64> = vec![2];
        for (q, _) in factor(self.a.unsigned_abs()).into_iter().chain(factor(self.b.unsigned_abs())) {
            if !cand.contains(&q) {
                cand.push(q);
            }
        }
        cand.sort();
        cand.into_iter().filter(|&q| hilbert_symbol(self.a, self.b, q) == -1).collect()
    }
}

/// Hilbert symbol (a,b)_q for a prime q.
pub fn hilbert_symbol(a: i64, b: i64, q: u64) -> i32 {
    let split = |mut x: i64| {
        let mut v = 0u32;
        while x % q as i64 == 0 {
            x /= q as i64;
            v += 1;
        }
        (v, x)
    };
    let (al, u) = split(a);
    let (be, w) = split(b);
    if q == 2 {
        let eps = |x: i64| ((x.rem_euclid(8) - 1) / 2) % 2;
        let omg = |x: i64| {
            let r = x.rem_euclid(8);
            if r == 3 || r == 5 {
                1
            } else {
                0
            }
        };
        let e = eps(u) * eps(w) + al as i64 * omg(w) + be as i64 * omg(u);
        if e % 2 == 0 {
            1
        } else {
            -1
        }
    } else {
        let eps = ((q - 1) / 2) as i64;
        let mut s = if (al as i64 * be as i64 * eps) % 2 == 0 { 1 } else { -1 };
        if be % 2 == 1 {
            s *= crate::arith::legendre(u, q);
        }
        if al % 2 == 1 {
            s *= crate::arith::legendre(w, q);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relations() {
        let h = QAlgebra::new(-1, -7);
        assert_eq!(h.mul(&h.i(), &h.j()), h.k());
        assert_eq!(h.mul(&h.j(), &h.i()), h.k().neg());
        assert_eq!(h.mul(&h.i(), &h.i()), Quat::from_ints([-1, 0, 0, 0]));
        assert_eq!(h.mul(&h.k(), &h.k()), Quat::from_ints([-7, 0, 0, 0]));
        assert_eq!(h.norm(&Quat::from_ints([1, 1, 0, 0])), rat(2));
        assert_eq!(h.normx(&Quat::from_frac([1, 0, 1, 0], 2)), rat(-7));
    }

    #[test]
    fn ramification() {
        assert_eq!(QAlgebra::new(-1, -7).ramified_primes(), vec![7]);
        assert_eq!(QAlgebra::new(-17, -3).ramified_primes(), vec![17]);
        assert_eq!(QAlgebra::new(-2, -5).ramified_primes(), vec![5]);
        assert_eq!(QAlgebra::new(-1, -1).ramified_primes(), vec![2]);
    }
}
