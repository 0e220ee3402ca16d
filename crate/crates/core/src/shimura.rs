//! Theta maps from Brandt modules to weight-3/2 forms, their kernels, the
//! distinguished vectors of each eigencomponent and the lift coefficients c(d).

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{gcd_rational, legendre};
use crate::error::{Error, Result};
use crate::ideals::{height, subideals, ClassSet, TildeClassSet};
use crate::linalg::{self, QMat, QVec};
use crate::par;
use crate::qalg::Order;
use crate::ternary::{ternary_of_order, TernaryForm, ThetaCoeffs};

/// Level 4 disc/ω and character modulus ω of the theta series attached to an order.
pub fn level_character(o: &Order) -> (u64, u64) {
    (4 * o.disc / o.omega_x, o.omega_x)
}

/// The ternary forms reached from each class of a class set: either the right
/// orders themselves (maximal level) or the right orders of the O^σ-subideals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormFamily {
    /// 0 for the maximal order family, otherwise ±1
    pub sigma: i32,
    /// distinct reduced forms in order of first appearance
    pub forms: Vec<TernaryForm>,
    /// class index -> index into `forms`
    pub class_form: Vec<usize>,
    pub level: u64,
    pub character: u64,
}

impl FormFamily {
    fn from_forms(sigma: i32, per_class: Vec<TernaryForm>, level: u64, character: u64) -> FormFamily {
        let mut forms: Vec<TernaryForm> = Vec::new();
        let mut class_form = Vec::new();
        for f in per_class {
            let k = match forms.iter().position(|g| *g == f) {
                Some(k) => k,
                None => {
                    forms.push(f);
                    forms.len() - 1
                }
            };
            class_form.push(k);
        }
        FormFamily { sigma, forms, class_form, level, character }
    }

    /// Combination of forms hit by v: n_k = sum of v_j over classes j with form k.
    pub fn combination(&self, v: &[BigRational]) -> QVec {
        let mut n = vec![BigRational::zero(); self.forms.len()];
        for (x, &k) in v.iter().zip(&self.class_form) {
            n[k] += x;
        }
        n
    }

    pub fn thetas(&self, bound: u64) -> Vec<ThetaCoeffs> {
        par::map(&self.forms, |f| f.theta(bound))
    }

    /// Θ(v) to the given bound.
    pub fn theta(&self, v: &[BigRational], bound: u64) -> ThetaCoeffs {
        crate::ternary::combine(&self.thetas(bound), &self.combination(v))
    }

    /// Vectors of the class module whose theta series vanish up to `bound`.
    pub fn kernel_at(&self, bound: u64) -> QMat {
        let t = self.thetas(bound);
        let h = self.class_form.len();
        let rows: QMat = (0..h).map(|j| t[self.class_form[j]].coeffs.clone()).collect();
        linalg::left_kernel(&rows)
    }
}

/// Forms of the right orders of the class representatives of a maximal order.
pub fn maximal_family(cs: &ClassSet) -> Result<FormFamily> {
    let forms = par::map(&cs.right_orders, ternary_of_order).into_iter().collect::<Result<Vec<_>>>()?;
    let (level, character) = level_character(&cs.order);
    Ok(FormFamily::from_forms(0, forms, level, character))
}

/// Forms of the right orders of the O^σ-subideals of each Õ-class. Every
/// subideal of one class must give the same form.
pub fn sigma_family(ts: &TildeClassSet, o_sigma: &Order, sigma: i32, p: u64) -> Result<FormFamily> {
    let per = par::map(&ts.classes.reps, |b| -> Result<TernaryForm> {
        let subs = subideals(b, o_sigma, p);
        let first = subs.first().ok_or_else(|| Error::Internal("Õ-class without O^σ-subideals".into()))?;
        let f = ternary_of_order(&first.right_order())?;
        for s in &subs[1..] {
            if ternary_of_order(&s.right_order())? != f {
                return Err(Error::Internal("O^σ-subideals of one class have inequivalent right orders".into()));
            }
        }
        Ok(f)
    });
    let forms = per.into_iter().collect::<Result<Vec<_>>>()?;
    let (level, character) = level_character(o_sigma);
    Ok(FormFamily::from_forms(sigma, forms, level, character))
}

/// First suborder of each sign from the list of p+1 orders between Z + pO and Õ.
pub fn pick_sigma_orders(list: &[(Order, i32)]) -> Result<(Order, Order)> {
    let plus = list.iter().find(|(_, s)| *s == 1).ok_or_else(|| Error::Internal("no suborder of sign +".into()))?;
    let minus = list.iter().find(|(_, s)| *s == -1).ok_or_else(|| Error::Internal("no suborder of sign -".into()))?;
    Ok((plus.0.clone(), minus.0.clone()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaKernel {
    pub bound: u64,
    #[serde(with = "crate::arith::rat_str::mat")]
    pub basis: QMat,
}

pub const KERNEL_START: u64 = 50;
pub const KERNEL_CAP: u64 = 1600;

/// ker Θ on the class module, doubling the coefficient bound from 50 until the
/// dimension is unchanged over two doublings.
pub fn kernel_theta(fam: &FormFamily) -> Result<ThetaKernel> {
    let mut b = KERNEL_START;
    let mut dims: Vec<usize> = Vec::new();
    loop {
        let k = fam.kernel_at(b);
        dims.push(k.len());
        let n = dims.len();
        if n >= 3 && dims[n - 1] == dims[n - 2] && dims[n - 2] == dims[n - 3] {
            return Ok(ThetaKernel { bound: b, basis: k });
        }
        if b >= KERNEL_CAP {
            return Err(Error::Internal(format!("theta kernel not stable by bound {KERNEL_CAP}: dims {dims:?}")));
        }
        b *= 2;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftData {
    pub label: String,
    /// 0 at the maximal order level
    pub sigma: i32,
    #[serde(with = "crate::arith::rat_str::vec")]
    pub vector: QVec,
    /// coefficients n_k of Θ(e) = sum n_k θ(forms[k])
    #[serde(with = "crate::arith::rat_str::vec")]
    pub form_combo: QVec,
    /// c(d) for 0 <= d <= bound
    pub coeffs: Vec<i64>,
    #[serde(with = "crate::arith::rat_str")]
    pub height: BigRational,
    pub level: u64,
    pub character: u64,
    /// Θ vanishes on the whole component
    pub zero: bool,
}

impl LiftData {
    pub fn c(&self, d: u64) -> i64 {
        self.coeffs[d as usize]
    }

    pub fn bound(&self) -> u64 {
        self.coeffs.len() as u64 - 1
    }
}

/// How the free constant of a lifted vector is fixed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scaling {
    /// primitive integer coordinates on the classes
    Coordinates,
    /// coprime integer theta coefficients
    Coefficients,
    /// the vector as given, up to sign
    Exact,
}

/// Scale v per `mode`, then flip so the first nonzero theta coefficient is positive.
fn normalize(fam: &FormFamily, v: &[BigRational], bound: u64, mode: Scaling) -> Result<(QVec, ThetaCoeffs)> {
    let t = fam.theta(v, bound);
    let g = match mode {
        Scaling::Coordinates => gcd_rational(v.iter()),
        Scaling::Coefficients => gcd_rational(t.coeffs.iter()),
        Scaling::Exact => BigRational::one(),
    };
    let first = match t.first_nonzero() {
        Some(d) if !g.is_zero() => d,
        _ => return Err(Error::Internal("normalizing a vector in the theta kernel".into())),
    };
    let s = if t.get(first).is_negative() { -g.recip() } else { g.recip() };
    let v: QVec = v.iter().map(|x| x * &s).collect();
    let t = fam.theta(&v, bound);
    Ok((v, t))
}

/// c(d) for 0 <= d <= bound of a cuspidal lift.
fn cusp_coeffs(t: &ThetaCoeffs) -> Result<Vec<i64>> {
    if !t.get(0).is_zero() {
        return Err(Error::Internal("lift has a constant term".into()));
    }
    let rest = t.integers().ok_or_else(|| Error::Internal("lift has non-integral coefficients".into()))?;
    Ok(std::iter::once(0).chain(rest).collect())
}

/// The distinguished vector of the component spanned by `basis`: orthogonal
/// under the height pairing to the part of ker Θ inside the component.
pub fn lift(
    cs: &ClassSet,
    fam: &FormFamily,
    kernel: &ThetaKernel,
    basis: &QMat,
    label: &str,
    bound: u64,
    mode: Scaling,
) -> Result<LiftData> {
    let r = basis.len();
    if r == 0 {
        return Err(Error::Invalid("empty component".into()));
    }
    // component vectors c.basis that lie in the kernel span
    let mut stacked = basis.clone();
    stacked.extend(kernel.basis.iter().cloned());
    let rel = linalg::left_kernel(&stacked);
    let inside: QMat = linalg::row_space(
        &rel.iter()
            .map(|c| {
                let mut v = vec![BigRational::zero(); cs.len()];
                for (ci, b) in c.iter().zip(basis) {
                    for (x, y) in v.iter_mut().zip(b) {
                        *x += ci * y;
                    }
                }
                v
            })
            .collect::<QMat>(),
    );
    let image_dim = r - inside.len();
    let zero_lift = |v: QVec| LiftData {
        label: label.to_string(),
        sigma: fam.sigma,
        form_combo: fam.combination(&v),
        height: height(cs, &v, &v),
        vector: v,
        coeffs: vec![0; bound as usize + 1],
        level: fam.level,
        character: fam.character,
        zero: true,
    };
    if image_dim == 0 {
        return Ok(zero_lift(linalg::primitive(&basis[0]).0));
    }
    if image_dim > 1 {
        return Err(Error::Internal(format!("{label}: theta image of dimension {image_dim}")));
    }
    // c with height(c.basis, w) = 0 for all w inside the kernel
    let g: QMat = basis.iter().map(|b| inside.iter().map(|w| height(cs, b, w)).collect()).collect();
    let c = if inside.is_empty() {
        vec![BigRational::one()]
    } else {
        let k = linalg::left_kernel(&g);
        if k.len() != 1 {
            return Err(Error::Internal(format!("{label}: orthogonal complement of dimension {}", k.len())));
        }
        k[0].clone()
    };
    let mut e = vec![BigRational::zero(); cs.len()];
    for (ci, b) in c.iter().zip(basis) {
        for (x, y) in e.iter_mut().zip(b) {
            *x += ci * y;
        }
    }
    let (e, t) = normalize(fam, &e, bound, mode)?;
    let coeffs = cusp_coeffs(&t)?;
    Ok(LiftData {
        label: label.to_string(),
        sigma: fam.sigma,
        form_combo: fam.combination(&e),
        height: height(cs, &e, &e),
        vector: e,
        coeffs,
        level: fam.level,
        character: fam.character,
        zero: false,
    })
}

/// Lift of a one-dimensional component of the maximal order module.
pub fn gross_lift(cs: &ClassSet, fam: &FormFamily, v: &[BigRational], label: &str, bound: u64) -> Result<LiftData> {
    let t = fam.theta(v, bound);
    if t.is_zero() {
        let v = linalg::primitive(v).0;
        return Ok(LiftData {
            label: label.to_string(),
            sigma: 0,
            form_combo: fam.combination(&v),
            height: height(cs, &v, &v),
            vector: v,
            coeffs: vec![0; bound as usize + 1],
            level: fam.level,
            character: fam.character,
            zero: true,
        });
    }
    let (e, t) = normalize(fam, v, bound, Scaling::Coefficients)?;
    Ok(LiftData {
        label: label.to_string(),
        sigma: 0,
        form_combo: fam.combination(&e),
        height: height(cs, &e, &e),
        vector: e,
        coeffs: cusp_coeffs(&t)?,
        level: fam.level,
        character: fam.character,
        zero: false,
    })
}

/// True when c(d) = 0 for every d with p | d or (d/p) = -σ.
pub fn support_ok(l: &LiftData, p: u64) -> bool {
    (1..=l.bound()).all(|d| {
        let s = legendre(d as i64, p);
        let allowed = s != 0 && (l.sigma == 0 || s == l.sigma);
        allowed || l.c(d) == 0
    })
}

/// Integral form combination, when it is one.
pub fn combo_integers(l: &LiftData) -> Option<Vec<i64>> {
    l.form_combo.iter().map(|x| if x.is_integer() { x.numer().to_i64() } else { None }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use num_bigint::BigInt;
    use crate::brandt::BrandtSeries;
    use crate::ideals::{class_set, suborder_tilde, suborders_sigma, tilde_class_set};
    use crate::qalg::maximal_order;

    #[test]
    fn theta_of_unit_class() {
        let (_, o) = maximal_order(11).unwrap();
        let cs = class_set(&o, 11).unwrap();
        let fam = maximal_family(&cs).unwrap();
        assert_eq!(level_character(&cs.order), (4 * 11, 1));
        let mut v = vec![BigRational::zero(); cs.len()];
        assert!(fam.theta(&v, 20).is_zero());
        v[0] = rat(1);
        assert_eq!(*fam.theta(&v, 20).get(0), BigRational::new(BigInt::from(1), BigInt::from(2)));
    }

    #[test]
    fn seven_levels_and_kernel() {
        let (_, o) = maximal_order(7).unwrap();
        let cs = class_set(&o, 7).unwrap();
        let tilde = suborder_tilde(&o, 7).unwrap();
        assert_eq!(level_character(&tilde).0, 28);
        let ts = tilde_class_set(&cs, &tilde, 7).unwrap();
        let (op, om) = pick_sigma_orders(&suborders_sigma(&o, &tilde, 7).unwrap()).unwrap();
        for (ord, s) in [(op, 1), (om, -1)] {
            assert_eq!(level_character(&ord), (196, 7));
            let fam = sigma_family(&ts, &ord, s, 7).unwrap();
            let k = kernel_theta(&fam).unwrap();
            assert!(k.basis.len() < ts.classes.len());
            // Hecke stability of the kernel
            let bs = BrandtSeries::new(&ts.classes, 10).unwrap();
            for m in [3u64, 5, 9] {
                let b = bs.matrix(m).unwrap();
                for v in &k.basis {
                    let w = linalg::vec_mat(v, &b);
                    assert!(linalg::solve_in_span(&k.basis, &w).is_some(), "m={m}");
                }
            }
        }
    }
}
