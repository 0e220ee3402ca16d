//! Small-integer number theory: primes, Kronecker symbols, fundamental discriminants.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&q| is_prime(q)).collect()
}

/// Prime factorisation as (prime, exponent) pairs, increasing primes.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as u128 * b as u128) % m as u128) as u64;
        }
        b = ((b as u128 * b as u128) % m as u128) as u64;
        e >>= 1;
    }
    r
}

pub fn mod_inv(a: i64, m: i64) -> Option<i64> {
    let g = a.extended_gcd(&m);
    if g.gcd != 1 && g.gcd != -1 {
        return None;
    }
    Some((g.x * g.gcd).rem_euclid(m))
}

/// Jacobi symbol (a/n) for odd positive n.
pub fn jacobi(a: i64, n: i64) -> i32 {
    assert!(n > 0 && n % 2 == 1, "jacobi needs odd positive modulus");
    let mut a = a.rem_euclid(n);
    let mut n = n;
    let mut s = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                s = -s;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            s = -s;
        }
        a %= n;
    }
    if n == 1 {
        s
    } else {
        0
    }
}

/// Legendre symbol for an odd prime.
pub fn legendre(a: i64, p: u64) -> i32 {
    jacobi(a, p as i64)
}

pub fn legendre_big(a: &BigInt, p: u64) -> i32 {
    let r = a.mod_floor(&BigInt::from(p)).to_i64().unwrap();
    legendre(r, p)
}

/// Kronecker symbol (d/n), the character attached to the discriminant `d`.
pub fn kronecker(d: i64, n: i64) -> i32 {
    if n == 0 {
        return if d == 1 || d == -1 { 1 } else { 0 };
    }
    let mut s = 1;
    let mut n = n;
    if n < 0 {
        n = -n;
        if d < 0 {
            s = -s;
        }
    }
    let mut v = 0;
    while n % 2 == 0 {
        n /= 2;
        v += 1;
    }
    if v > 0 {
        if d % 2 == 0 {
            return 0;
        }
        let r = d.rem_euclid(8);
        if (r == 3 || r == 5) && v % 2 == 1 {
            s = -s;
        }
    }
    if n == 1 {
        return s;
    }
    s * jacobi(d, n)
}

pub fn is_squarefree(n: u64) -> bool {
    factor(n).iter().all(|&(_, e)| e == 1)
}

/// Whether `d` is a fundamental discriminant (1 counts, as the trivial one).
pub fn is_fundamental(d: i64) -> bool {
    if d == 1 {
        return true;
    }
    if d == 0 {
        return false;
    }
    let r = d.rem_euclid(4);
    if r == 1 {
        return is_squarefree(d.unsigned_abs());
    }
    if r != 0 {
        return false;
    }
    let m = d / 4;
    let rm = m.rem_euclid(4);
    (rm == 2 || rm == 3) && is_squarefree(m.unsigned_abs())
}

/// p* = (-1)^((p-1)/2) p, the prime discriminant at an odd prime.
pub fn prime_discriminant(p: u64) -> i64 {
    if p % 4 == 1 {
        p as i64
    } else {
        -(p as i64)
    }
}

pub fn gcd_big(a: &BigInt, b: &BigInt) -> BigInt {
    a.gcd(b)
}

/// gcd of a list of rationals: the positive generator of the Z-module they span.
pub fn gcd_rational<'a, I: IntoIterator<Item = &'a BigRational>>(items: I) -> BigRational {
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for q in items {
        if q.is_zero() {
            continue;
        }
        // gcd(a/b, c/d) = gcd(a d, c b) / (b d), then reduce
        let n2 = (&num * q.denom()).gcd(&(q.numer() * &den));
        den *= q.denom();
        num = n2;
        let g = num.gcd(&den);
        if !g.is_zero() {
            num /= &g;
            den /= &g;
        }
    }
    BigRational::new(num.abs(), den)
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn to_i64(q: &BigRational) -> Option<i64> {
    if q.is_integer() {
        q.numer().to_i64()
    } else {
        None
    }
}

pub fn p_valuation(n: &BigInt, p: u64) -> u32 {
    if n.is_zero() {
        return u32::MAX;
    }
    let pb = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    while (&n % &pb).is_zero() {
        n /= &pb;
        v += 1;
    }
    v
}

/// Serde adapters writing rationals as "num/den" strings ("n" when integral).
pub mod rat_str {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn to_string(q: &BigRational) -> String {
        if q.is_integer() {
            q.numer().to_string()
        } else {
            format!("{}/{}", q.numer(), q.denom())
        }
    }

    pub fn parse(s: &str) -> Option<BigRational> {
        let (n, d) = s.split_once('/').unwrap_or((s, "1"));
        let (n, d): (num_bigint::BigInt, num_bigint::BigInt) = (n.trim().parse().ok()?, d.trim().parse().ok()?);
        if d == num_bigint::BigInt::from(0) {
            return None;
        }
        Some(BigRational::new(n, d))
    }

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&to_string(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).ok_or_else(|| serde::de::Error::custom(format!("bad rational {s:?}")))
    }

    pub mod vec {
        use num_rational::BigRational;
        use serde::ser::SerializeSeq;
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for q in v {
                seq.serialize_element(&super::to_string(q))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
            let v = Vec::<String>::deserialize(d)?;
            v.iter()
                .map(|s| super::parse(s).ok_or_else(|| serde::de::Error::custom(format!("bad rational {s:?}"))))
                .collect()
        }
    }

    /// Matrices as lists of rows.
    pub mod mat {
        use num_rational::BigRational;
        use serde::ser::SerializeSeq;
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(m: &[Vec<BigRational>], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(m.len()))?;
            for row in m {
                seq.serialize_element(&row.iter().map(super::to_string).collect::<Vec<_>>())?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigRational>>, D::Error> {
            let m = Vec::<Vec<String>>::deserialize(d)?;
            m.iter()
                .map(|row| {
                    row.iter()
                        .map(|s| super::parse(s).ok_or_else(|| serde::de::Error::custom(format!("bad rational {s:?}"))))
                        .collect()
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kron_oracle(d: i64, n: i64) -> i32 {
        // multiplicativity in n from the prime values
        let mut s = 1;
        let mut m = n;
        if m < 0 {
            m = -m;
            if d < 0 {
                s = -s;
            }
        }
        for (q, e) in factor(m as u64) {
            let v = if q == 2 {
                if d % 2 == 0 {
                    0
                } else if d.rem_euclid(8) == 1 || d.rem_euclid(8) == 7 {
                    1
                } else {
                    -1
                }
            } else {
                let r = d.rem_euclid(q as i64);
                if r == 0 {
                    0
                } else if (1..q as i64).any(|x| (x * x) % q as i64 == r) {
                    1
                } else {
                    -1
                }
            };
            s *= (v as i32).pow(e);
        }
        s
    }

    #[test]
    fn kronecker_matches_prime_definition() {
        for d in [-7i64, -8, -4, -3, 5, 8, 12, -11, -56, 13, -15] {
            for n in 1..200 {
                assert_eq!(kronecker(d, n), kron_oracle(d, n), "d={d} n={n}");
            }
        }
    }

    #[test]
    fn fundamental_small() {
        let fund: Vec<i64> = (-30..=30).filter(|&d| is_fundamental(d)).collect();
        assert_eq!(
            fund,
            vec![-24, -23, -20, -19, -15, -11, -8, -7, -4, -3, 1, 5, 8, 12, 13, 17, 21, 24, 28, 29]
        );
    }

    #[test]
    fn rational_gcd() {
        let v = [frac(3, 2), frac(9, 4), rat(6)];
        assert_eq!(gcd_rational(v.iter()), frac(3, 4));
    }
}
