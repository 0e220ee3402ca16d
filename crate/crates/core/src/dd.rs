//! Double-double reals: an unevaluated sum hi + lo of two f64 with |lo| <= ulp(hi)/2,
//! good for about 31 significant decimal digits.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DD {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DD {
    pub const ZERO: DD = DD { hi: 0.0, lo: 0.0 };
    pub const ONE: DD = DD { hi: 1.0, lo: 0.0 };
    pub const PI: DD = DD { hi: std::f64::consts::PI, lo: 1.2246467991473532e-16 };
    pub const LN2: DD = DD { hi: std::f64::consts::LN_2, lo: 2.3190468138462996e-17 };

    pub fn new(hi: f64, lo: f64) -> DD {
        let (h, l) = two_sum(hi, lo);
        DD { hi: h, lo: l }
    }

    pub fn from_i64(n: i64) -> DD {
        let hi = n as f64;
        DD::new(hi, (n - hi as i64) as f64)
    }

    pub fn from_ratio(n: i64, d: i64) -> DD {
        DD::from_i64(n) / DD::from_i64(d)
    }

    /// Parse a decimal string such as "-0.9666558528084057733665384189".
    pub fn parse(s: &str) -> Option<DD> {
        let s = s.trim();
        let (neg, body) = match s.strip_prefix('-') {
            Some(r) => (true, r),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let (int, frac) = body.split_once('.').unwrap_or((body, ""));
        if int.is_empty() && frac.is_empty() {
            return None;
        }
        let ten = DD::from_i64(10);
        let mut v = DD::ZERO;
        for ch in int.chars().chain(frac.chars()) {
            let d = ch.to_digit(10)? as i64;
            v = v * ten + DD::from_i64(d);
        }
        for _ in 0..frac.len() {
            v = v / ten;
        }
        Some(if neg { -v } else { v })
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> DD {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn is_zero(self) -> bool {
        self.hi == 0.0
    }

    pub fn mul_f64(self, b: f64) -> DD {
        let (p, e) = two_prod(self.hi, b);
        let (h, l) = quick_two_sum(p, e + self.lo * b);
        DD { hi: h, lo: l }
    }

    pub fn sqr(self) -> DD {
        self * self
    }

    pub fn sqrt(self) -> DD {
        if self.hi <= 0.0 {
            return DD::ZERO;
        }
        // one Newton step from the f64 root
        let x = self.hi.sqrt();
        let (p, e) = two_prod(x, x);
        let r = (self - DD::new(p, e)).hi / (2.0 * x);
        DD::new(x, r)
    }

    pub fn powi(self, mut n: u32) -> DD {
        let mut b = self;
        let mut r = DD::ONE;
        while n > 0 {
            if n & 1 == 1 {
                r = r * b;
            }
            b = b * b;
            n >>= 1;
        }
        r
    }

    pub fn ldexp(self, k: i32) -> DD {
        let f = 2f64.powi(k);
        DD { hi: self.hi * f, lo: self.lo * f }
    }

    pub fn exp(self) -> DD {
        if self.hi > 709.0 {
            return DD { hi: f64::INFINITY, lo: 0.0 };
        }
        if self.hi < -745.0 {
            return DD::ZERO;
        }
        // x = k ln2 + r with |r| <= ln2/2, then exp(r) = exp(r / 2^10)^(2^10)
        let k = (self.hi / std::f64::consts::LN_2).round();
        let r = (self - DD::LN2.mul_f64(k)).ldexp(-10);
        let mut term = r;
        let mut sum = r;
        let mut n = 1.0;
        loop {
            n += 1.0;
            term = term * r / DD::from_i64(n as i64);
            sum += term;
            if term.hi.abs() < 1e-34 {
                break;
            }
        }
        // exp(r) - 1 squared up: (1+s)^2 - 1 = s(2+s), kept small to avoid cancellation
        for _ in 0..10 {
            sum = sum * (sum + DD::from_i64(2));
        }
        (sum + DD::ONE).ldexp(k as i32)
    }

    /// Decimal string with `digits` digits after the point.
    pub fn to_fixed(self, digits: usize) -> String {
        let mut v = self;
        let neg = v.hi < 0.0;
        if neg {
            v = -v;
        }
        // round at the last requested digit
        let half = DD::ONE / DD::from_i64(10).powi(digits as u32) * DD::new(0.5, 0.0);
        v += half;
        let int = v.hi.floor();
        let mut int_part = int as u128;
        let mut rest = v - DD::new(int, 0.0);
        if rest.hi < 0.0 {
            int_part -= 1;
            rest += DD::ONE;
        }
        let mut s = String::new();
        if neg {
            s.push('-');
        }
        s.push_str(&int_part.to_string());
        if digits > 0 {
            s.push('.');
            for _ in 0..digits {
                rest = rest * DD::from_i64(10);
                let d = rest.hi.floor().clamp(0.0, 9.0);
                s.push(char::from(b'0' + d as u8));
                rest -= DD::new(d, 0.0);
            }
        }
        s
    }
}

impl From<f64> for DD {
    fn from(x: f64) -> DD {
        DD { hi: x, lo: 0.0 }
    }
}

impl Neg for DD {
    type Output = DD;
    fn neg(self) -> DD {
        DD { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for DD {
    type Output = DD;
    fn add(self, b: DD) -> DD {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (h, l) = quick_two_sum(s, e + f);
        DD { hi: h, lo: l }
    }
}

impl Sub for DD {
    type Output = DD;
    fn sub(self, b: DD) -> DD {
        self + (-b)
    }
}

impl Mul for DD {
    type Output = DD;
    fn mul(self, b: DD) -> DD {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (h, l) = quick_two_sum(p, e);
        DD { hi: h, lo: l }
    }
}

impl Div for DD {
    type Output = DD;
    fn div(self, b: DD) -> DD {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (h, l) = quick_two_sum(q1, q2);
        DD { hi: h, lo: l } + DD::from(q3)
    }
}

impl AddAssign for DD {
    fn add_assign(&mut self, b: DD) {
        *self = *self + b;
    }
}

impl SubAssign for DD {
    fn sub_assign(&mut self, b: DD) {
        *self = *self - b;
    }
}

impl MulAssign for DD {
    fn mul_assign(&mut self, b: DD) {
        *self = *self * b;
    }
}

impl PartialOrd for DD {
    fn partial_cmp(&self, o: &DD) -> Option<Ordering> {
        match self.hi.partial_cmp(&o.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&o.lo),
            c => c,
        }
    }
}

/// Serialized as a decimal string with 30 digits after the point.
impl serde::Serialize for DD {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_fixed(30))
    }
}

impl<'de> serde::Deserialize<'de> for DD {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<DD, D::Error> {
        let s = String::deserialize(d)?;
        DD::parse(&s).ok_or_else(|| serde::de::Error::custom(format!("bad decimal {s:?}")))
    }
}

impl fmt::Display for DD {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(28);
        write!(f, "{}", self.to_fixed(digits))
    }
}
