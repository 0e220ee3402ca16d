//! One level p end to end: orders, class sets, form families, eigencomponents and lifts.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::brandt::{self, BrandtSeries, Eigencomponent, FormKind};
use crate::error::{Error, Result};
use crate::ideals::{self, ClassSet, TildeClassSet};
use crate::linalg::QVec;
use crate::qalg::{self, Order};
use crate::shimura::{self, FormFamily, LiftData, Scaling, ThetaKernel};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevelData {
    pub p: u64,
    pub order: Order,
    pub classes: ClassSet,
    pub tilde: Order,
    pub tilde_classes: TildeClassSet,
    /// the p+1 orders between Z + pO and Õ with their signs
    pub sigma_orders: Vec<(Order, i32)>,
    pub order_plus: Order,
    pub order_minus: Order,
}

pub fn build_level(p: u64) -> Result<LevelData> {
    let (_, order) = qalg::maximal_order(p)?;
    let classes = ideals::class_set(&order, p)?;
    let tilde = ideals::suborder_tilde(&order, p)?;
    let tilde_classes = ideals::tilde_class_set(&classes, &tilde, p)?;
    let sigma_orders = ideals::suborders_sigma(&order, &tilde, p)?;
    let (order_plus, order_minus) = shimura::pick_sigma_orders(&sigma_orders)?;
    Ok(LevelData { p, order, classes, tilde, tilde_classes, sigma_orders, order_plus, order_minus })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Families {
    pub maximal: FormFamily,
    pub plus: FormFamily,
    pub minus: FormFamily,
}

impl Families {
    pub fn sigma(&self, s: i32) -> &FormFamily {
        if s > 0 {
            &self.plus
        } else {
            &self.minus
        }
    }
}

pub fn families(ld: &LevelData) -> Result<Families> {
    Ok(Families {
        maximal: shimura::maximal_family(&ld.classes)?,
        plus: shimura::sigma_family(&ld.tilde_classes, &ld.order_plus, 1, ld.p)?,
        minus: shimura::sigma_family(&ld.tilde_classes, &ld.order_minus, -1, ld.p)?,
    })
}

/// Labelled rational eigencomponents of M(O) and M(Õ).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Components {
    pub maximal: Vec<Eigencomponent>,
    pub tilde: Vec<Eigencomponent>,
}

pub const PROBE_COUNT: usize = 5;

pub fn components(ld: &LevelData, check_bound: u64) -> Result<Components> {
    let probes = brandt::probe_primes(ld.p, PROBE_COUNT);
    let bound = check_bound.max(*probes.last().unwrap());
    let bo = BrandtSeries::new(&ld.classes, bound)?;
    let bt = BrandtSeries::new(&ld.tilde_classes.classes, bound)?;
    let mut maximal = brandt::isotypical(&bo, &probes)?;
    brandt::label_maximal(&mut maximal, ld.p);
    let mut tilde = brandt::isotypical(&bt, &probes)?;
    brandt::classify(&mut tilde, &maximal, ld.p);
    for c in maximal.iter() {
        c.check_eigen(&bo, ld.p)?;
    }
    for c in tilde.iter() {
        c.check_eigen(&bt, ld.p)?;
    }
    Ok(Components { maximal, tilde })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FormLifts {
    pub label: String,
    pub kind: FormKind,
    pub dim: usize,
    pub plus: LiftData,
    pub minus: LiftData,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevelLifts {
    pub kernel_plus: ThetaKernel,
    pub kernel_minus: ThetaKernel,
    /// lifts of the cusp components of M(Õ)
    pub tilde: Vec<FormLifts>,
    /// Gross lifts of the cusp components of M(O)
    pub gross: Vec<LiftData>,
}

impl LevelLifts {
    pub fn get(&self, label: &str) -> Option<&FormLifts> {
        self.tilde.iter().find(|f| f.label == label)
    }

    pub fn gross(&self, label: &str) -> Option<&LiftData> {
        self.gross.iter().find(|f| f.label == label)
    }
}

/// The Õ vector of the level-p form with Gross vector `gross` on M(O), or of
/// its twist by (p*/.): ψ of half the Gross vector, then φ for the twist.
pub fn from_maximal(ld: &LevelData, gross: &[BigRational], twist: bool) -> QVec {
    let ts = &ld.tilde_classes;
    let half = BigRational::new(1.into(), 2.into());
    let v: QVec = brandt::psi_apply(&ts.psi, gross).into_iter().map(|x| x * &half).collect();
    if twist {
        brandt::phi_apply(&ts.chi, &v)
    } else {
        v
    }
}

pub fn lifts(ld: &LevelData, fam: &Families, comps: &Components, bound: u64) -> Result<LevelLifts> {
    let kernel_plus = shimura::kernel_theta(&fam.plus)?;
    let kernel_minus = shimura::kernel_theta(&fam.minus)?;
    let mut gross = Vec::new();
    for c in comps.maximal.iter().filter(|c| c.kind != FormKind::Eisenstein) {
        if c.dim() != 1 {
            return Err(Error::Internal(format!("{}: level-p component of dimension {}", c.label, c.dim())));
        }
        gross.push(shimura::gross_lift(&ld.classes, &fam.maximal, &c.basis[0], &c.label, bound)?);
    }
    let cs = &ld.tilde_classes.classes;
    let mut tilde = Vec::new();
    for c in comps.tilde.iter().filter(|c| c.kind != FormKind::Eisenstein) {
        let (basis, mode) = match c.kind {
            FormKind::Genuine => (c.basis.clone(), Scaling::Coefficients),
            _ => {
                let twist = c.kind == FormKind::TwistOfLevelP;
                let base = comps
                    .maximal
                    .iter()
                    .zip(&gross)
                    .find(|(m, _)| if twist { brandt::is_twist(c, m, ld.p) } else { m.eigenvalues == c.eigenvalues })
                    .ok_or_else(|| Error::Internal(format!("{}: no matching level-{} form", c.label, ld.p)))?;
                (vec![from_maximal(ld, &base.1.vector, twist)], Scaling::Exact)
            }
        };
        let plus = shimura::lift(cs, &fam.plus, &kernel_plus, &basis, &c.label, bound, mode)?;
        let minus = shimura::lift(cs, &fam.minus, &kernel_minus, &basis, &c.label, bound, mode)?;
        tilde.push(FormLifts { label: c.label.clone(), kind: c.kind, dim: c.dim(), plus, minus });
    }
    Ok(LevelLifts { kernel_plus, kernel_minus, tilde, gross })
}
