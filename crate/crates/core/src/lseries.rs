//! Hecke coefficient tables read off Brandt eigenvectors, and central values of
//! twisted L-series by the smoothed sum 2 sum a_n chi(n)/n exp(-2 pi n / sqrt N).

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::arith::{factor, is_fundamental, is_prime, kronecker, prime_discriminant};
use crate::brandt;
use crate::dd::DD;
use crate::error::{Error, Result};
use crate::ideals::ClassSet;
use crate::par;

/// What is known about a_p at the level prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ApMode {
    /// p^2 | N
    Zero,
    /// p || N, value still to be fixed by the functional equation
    Unknown,
    /// p || N, value ±1
    Detected(i64),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffTable {
    pub label: String,
    /// conductor of the newform, p or p^2
    pub level: u64,
    pub p: u64,
    /// a[n] for 0 <= n <= M, a[0] = 0; entries at multiples of p use ap = 0 until detected
    pub a: Vec<i64>,
    pub ap: ApMode,
}

/// Hecke eigenvalues λ_m, m <= bound, of the integral eigenvector v: read from
/// one Brandt column at a coordinate j with v_j != 0. Multiples of `p` are left 0.
pub fn brandt_eigenvalues(cs: &ClassSet, v: &[BigRational], p: u64, bound: u64) -> Result<Vec<i64>> {
    let vi: Vec<i128> = v
        .iter()
        .map(|x| {
            if x.is_integer() {
                x.numer().to_i128().ok_or_else(|| Error::Internal("eigenvector entry overflow".into()))
            } else {
                Err(Error::Invalid("eigenvector must be integral".into()))
            }
        })
        .collect::<Result<_>>()?;
    // the coordinate carrying the least work: smallest unit count among nonzero ones
    let j = (0..vi.len())
        .filter(|&j| vi[j] != 0)
        .min_by_key(|&j| std::cmp::Reverse(cs.unit_orders[j]))
        .ok_or_else(|| Error::Invalid("zero eigenvector".into()))?;
    let rows: Vec<usize> = (0..vi.len()).filter(|&i| vi[i] != 0).collect();
    let cols = par::map(&rows, |&i| brandt::pair_counts(cs, i, j, bound));
    let den = vi[j] * cs.unit_orders[j] as i128;
    let mut out = vec![0i64; bound as usize + 1];
    for m in 1..=bound as usize {
        if m as u64 % p == 0 {
            continue;
        }
        let num: i128 = rows.iter().zip(&cols).map(|(&i, c)| vi[i] * c[m] as i128).sum();
        if num % den != 0 {
            return Err(Error::Internal(format!("λ_{m} is not integral: {num}/{den}")));
        }
        out[m] = (num / den) as i64;
    }
    Ok(out)
}

impl CoeffTable {
    /// Build a_n, n <= m_max, from prime eigenvalues by the Hecke recursion.
    /// `lambda[q]` must be available for every prime q <= m_max other than p.
    pub fn from_eigenvalues(label: &str, level: u64, p: u64, lambda: &[i64], m_max: usize) -> Result<CoeffTable> {
        if lambda.len() <= m_max {
            return Err(Error::TableTooShort { needed: m_max + 1, have: lambda.len() });
        }
        let ap = if level % (p * p) == 0 { ApMode::Zero } else { ApMode::Unknown };
        let mut ct = CoeffTable { label: label.to_string(), level, p, a: vec![0; m_max + 1], ap };
        ct.fill(|q| lambda[q as usize]);
        Ok(ct)
    }

    fn ap_value(&self) -> i64 {
        match self.ap {
            ApMode::Detected(v) => v,
            _ => 0,
        }
    }

    fn fill<F: Fn(u64) -> i64>(&mut self, lam: F) {
        let m = self.a.len() - 1;
        let p = self.p;
        let ap = self.ap_value();
        // prime power values first
        let mut pp = vec![0i64; m + 1];
        pp[1] = 1;
        for q in 2..=m as u64 {
            if !is_prime(q) {
                continue;
            }
            let aq = if q == p { ap } else { lam(q) };
            let (mut prev2, mut prev1) = (1i64, aq);
            let mut qk = q;
            pp[q as usize] = aq;
            while qk * q <= m as u64 {
                let next = if q == p { prev1 * ap } else { aq * prev1 - q as i64 * prev2 };
                qk *= q;
                pp[qk as usize] = next;
                prev2 = prev1;
                prev1 = next;
            }
        }
        self.a[0] = 0;
        if m >= 1 {
            self.a[1] = 1;
        }
        for n in 2..=m {
            let mut v = 1i64;
            for (q, e) in factor(n as u64) {
                v *= pp[q.pow(e) as usize];
                if v == 0 {
                    break;
                }
            }
            self.a[n] = v;
        }
    }

    pub fn set_ap(&mut self, ap: i64) {
        self.ap = ApMode::Detected(ap);
        let old: Vec<i64> = self.a.clone();
        // rebuild from the stored prime values
        self.fill(|q| old[q as usize]);
    }

    pub fn len(&self) -> usize {
        self.a.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.a.len() <= 1
    }

    /// The newform f ⊗ (p*/.) of level p^2, for f of level p.
    pub fn twist_by_level_prime(&self, label: &str) -> CoeffTable {
        let ps = prime_discriminant(self.p);
        let a = self.a.iter().enumerate().map(|(n, &x)| x * kronecker(ps, n as i64) as i64).collect();
        CoeffTable { label: label.to_string(), level: self.p * self.p, p: self.p, a, ap: ApMode::Zero }
    }

    pub fn truncate(&self, m: usize) -> CoeffTable {
        let mut c = self.clone();
        c.a.truncate(m + 1);
        c
    }
}

/// Default conductor of f ⊗ (D/.) for a newform of level N = p or p^2: the
/// prime-to-p part of D enters squared, and p ends at exponent 2 unless p
/// divides neither D nor N/p.
pub fn twist_conductor(level: u64, p: u64, d: i64) -> u64 {
    let mut rest = d.unsigned_abs();
    let p_divides = rest % p == 0;
    while rest % p == 0 {
        rest /= p;
    }
    if p_divides || level % (p * p) == 0 {
        rest * rest * p * p
    } else {
        rest * rest * p
    }
}

/// Number of terms with exp(-2 pi M t / sqrt N) below `target`.
pub fn required_terms(conductor: u64, t: f64, target: f64) -> usize {
    ((conductor as f64).sqrt() * t * (1.0 / target).ln() / (2.0 * std::f64::consts::PI)).ceil() as usize + 1
}

pub const SIGN_TARGET: f64 = 1e-9;
pub const VALUE_TARGET: f64 = 1e-13;
const SIGN_T: [f64; 2] = [1.1, 1.3];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistSpec {
    pub d: i64,
    pub conductor: u64,
    pub sign: i32,
}

fn twisted_coeff(ct: &CoeffTable, d: i64, ap: i64, n: usize) -> i64 {
    let a = if ct.ap == ApMode::Zero || n as u64 % ct.p != 0 {
        ct.a[n]
    } else {
        // a_n = a_p^k a_m for n = p^k m
        let mut m = n as u64;
        let mut k = 0;
        while m % ct.p == 0 {
            m /= ct.p;
            k += 1;
        }
        ap.pow(k) * ct.a[m as usize]
    };
    if d == 1 {
        a
    } else {
        a * kronecker(d, n as i64) as i64
    }
}

/// sum_{n <= M} a_n chi(n)/n x^n with x = exp(-2 pi s / sqrt N).
fn smoothed(ct: &CoeffTable, d: i64, ap: i64, conductor: u64, s: DD, m: usize) -> DD {
    let x = (-(DD::PI * DD::from_i64(2) * s) / DD::from_i64(conductor as i64).sqrt()).exp();
    let mut w = DD::ONE;
    let mut sum = DD::ZERO;
    for n in 1..=m {
        w *= x;
        let c = twisted_coeff(ct, d, ap, n);
        if c != 0 {
            sum += w.mul_f64(c as f64) / DD::from_i64(n as i64);
        }
    }
    sum
}

fn completed(ct: &CoeffTable, d: i64, ap: i64, conductor: u64, eps: i32, t: f64, target: f64) -> Result<DD> {
    let m = required_terms(conductor, t.max(1.0 / t), target);
    if m > ct.len() {
        return Err(Error::TableTooShort { needed: m, have: ct.len() });
    }
    let a = smoothed(ct, d, ap, conductor, DD::from(t), m);
    let b = smoothed(ct, d, ap, conductor, DD::ONE / DD::from(t), m);
    Ok(if eps > 0 { a + b } else { a - b })
}

/// Functional-equation sign of f ⊗ (d/.) at the given conductor, and for p || N
/// with p not dividing d also a_p, chosen jointly as the only consistent combination.
pub fn sign_detect(ct: &CoeffTable, d: i64, conductor: u64, target: f64) -> Result<(i32, i64)> {
    let ap_choices: Vec<i64> = match ct.ap {
        ApMode::Unknown if d % ct.p as i64 != 0 => vec![1, -1],
        ApMode::Detected(v) => vec![v],
        _ => vec![0],
    };
    let mut good = Vec::new();
    let mut worst = 0.0f64;
    for &ap in &ap_choices {
        for eps in [1, -1] {
            let s0 = completed(ct, d, ap, conductor, eps, SIGN_T[0], target)?;
            let s1 = completed(ct, d, ap, conductor, eps, SIGN_T[1], target)?;
            let diff = (s0 - s1).abs().to_f64();
            let scale = 1.0 + s0.abs().to_f64();
            worst = worst.max(diff);
            if diff < 10.0 * target * scale * (ct.len() as f64).ln() {
                good.push((eps, ap));
            }
        }
    }
    match good.as_slice() {
        [one] => Ok(*one),
        [] => Err(Error::SignUndetermined(format!(" for {} twisted by {d} at conductor {conductor}", ct.label))),
        _ => Err(Error::SignUndetermined(format!(
            " for {} twisted by {d}: {} consistent choices (largest mismatch {worst:e})",
            ct.label,
            good.len()
        ))),
    }
}

/// Sign and conductor of the twist by the fundamental discriminant d, trying
/// the default conductor first and then the other p-exponents.
pub fn twist_spec(ct: &CoeffTable, d: i64) -> Result<TwistSpec> {
    if !is_fundamental(d) {
        return Err(Error::Invalid(format!("{d} is not a fundamental discriminant")));
    }
    let default = twist_conductor(ct.level, ct.p, d);
    let mut p_part = default;
    while p_part % ct.p == 0 {
        p_part /= ct.p;
    }
    let mut tries = vec![default];
    for e in 0..=2u32 {
        let c = p_part * ct.p.pow(e);
        if c != default {
            tries.push(c);
        }
    }
    let mut last = None;
    for conductor in tries {
        match sign_detect(ct, d, conductor, SIGN_TARGET) {
            Ok((sign, _)) => return Ok(TwistSpec { d, conductor, sign }),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap())
}

/// Working target when a_p is resolved: the terms it affects carry weight
/// about exp(-2 pi sqrt p / t), so the consistency test must see far below that.
pub const AP_TARGET: f64 = 1e-26;

/// Fix a_p for a level-p table from the untwisted functional equation.
pub fn resolve_ap(ct: &mut CoeffTable) -> Result<i32> {
    let (eps, ap) = sign_detect(ct, 1, ct.level, AP_TARGET)?;
    if ct.ap == ApMode::Unknown {
        ct.set_ap(ap);
    }
    Ok(eps)
}

/// L(f, d, 1) for a known twist spec; exactly 0 when the sign is -1.
pub fn central_value(ct: &CoeffTable, ts: &TwistSpec, target: f64) -> Result<DD> {
    if ct.ap == ApMode::Unknown && ts.d % ct.p as i64 != 0 {
        return Err(Error::Invalid(format!("{}: a_p not yet determined", ct.label)));
    }
    if ts.sign < 0 {
        return Ok(DD::ZERO);
    }
    let m = required_terms(ts.conductor, 1.0, target);
    if m > ct.len() {
        return Err(Error::TableTooShort { needed: m, have: ct.len() });
    }
    Ok(smoothed(ct, ts.d, ct.ap_value(), ts.conductor, DD::ONE, m).mul_f64(2.0))
}

/// Twist spec and central value in one call.
pub fn lvalue(ct: &CoeffTable, d: i64) -> Result<(TwistSpec, DD)> {
    let ts = twist_spec(ct, d)?;
    let v = central_value(ct, &ts, VALUE_TARGET)?;
    Ok((ts, v))
}

/// Table length needed for value and sign at this conductor.
pub fn terms_for(conductor: u64) -> usize {
    required_terms(conductor, 1.0, VALUE_TARGET).max(required_terms(conductor, SIGN_T[1], SIGN_TARGET))
}
