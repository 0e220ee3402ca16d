//! Central values against lift coefficients: the level-p formula with its star
//! factor, the ratio tables at level p^2, the real-twist route through φψ and
//! the CM self-twist identity.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::arith::{is_fundamental, kronecker, legendre, prime_discriminant};
use crate::brandt::{self, Eigencomponent, FormKind};
use crate::dd::DD;
use crate::error::{Error, Result};
use crate::lseries::{self, CoeffTable};
use crate::linalg;
use crate::par;
use crate::pipeline::{self, Components, Families, FormLifts, LevelData, LevelLifts};
use crate::shimura::{self, LiftData, Scaling};

/// A table row counts as vanishing below this.
pub const ZERO_L: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportMode {
    /// level p, L(f,-d) against the maximal-order lift
    Gross,
    /// level p^2, L(f,-pd) against the Õ lifts
    Conjecture,
    /// Õ lifts built from φψ of a level-p eigenvector, L(f,d) for real d
    RealTwist,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyRow {
    /// +1, -1, or 0 at the maximal order
    pub sigma: i32,
    pub d: u64,
    /// discriminant of the twist actually evaluated
    pub disc: i64,
    pub c: i64,
    pub l: DD,
    /// 1, or 2 on the level-p rows with p | d
    pub star: u32,
    /// normalized L sqrt(d)/c^2, None when c = 0
    pub ratio: Option<DD>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub label: String,
    pub mode: ReportMode,
    /// form whose L-series appears in the table column
    pub table_form: String,
    pub rows: Vec<VerifyRow>,
    /// common ratio, in the table normalization
    pub k: Option<DD>,
    #[serde(with = "crate::arith::rat_str")]
    pub alpha: BigRational,
    /// L sqrt(pd) h_σ/(α c^2) at level p^2, L sqrt(d) h/c^2 at level p
    pub constant: Option<DD>,
    pub max_relative_spread: f64,
    /// h+/h-; the minus rows carry k times this
    #[serde(with = "crate::arith::rat_str")]
    pub case_factor_minus: BigRational,
    /// d where c = 0 and L != 0 or the reverse
    pub zero_mismatches: Vec<u64>,
    /// why the formula could not be tested, if it could not
    pub degenerate: Option<String>,
}

impl VerifyReport {
    pub fn row(&self, sigma: i32, d: u64) -> Option<&VerifyRow> {
        self.rows.iter().find(|r| r.d == d && (sigma == 0 || r.sigma == sigma))
    }
}

/// α_f = 1/2 {1, p/(p-1), p+1} for genuine, twisted and level-p forms.
pub fn alpha(kind: FormKind, p: u64) -> BigRational {
    let p = p as i64;
    let (n, d) = match kind {
        FormKind::Genuine => (1, 2),
        FormKind::TwistOfLevelP => (p, 2 * (p - 1)),
        FormKind::LevelP => (p + 1, 2),
        FormKind::Eisenstein => (0, 1),
    };
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn to_dd(q: &BigRational) -> DD {
    DD::from_i64(q.numer().to_i64().unwrap_or(i64::MAX)) / DD::from_i64(q.denom().to_i64().unwrap_or(1))
}

fn spread(rows: &[VerifyRow]) -> (Option<DD>, f64) {
    let r: Vec<DD> = rows.iter().filter_map(|r| r.ratio).collect();
    let Some(&first) = r.first() else {
        return (None, 0.0);
    };
    let lo = r.iter().copied().fold(first, |a, b| if b < a { b } else { a });
    let hi = r.iter().copied().fold(first, |a, b| if b > a { b } else { a });
    (Some(first), ((hi - lo) / first).abs().to_f64())
}

fn zero_mismatches(rows: &[VerifyRow]) -> Vec<u64> {
    rows.iter().filter(|r| (r.c == 0) != (r.l.to_f64().abs() < ZERO_L)).map(|r| r.d).collect()
}

/// L(f,-d) sqrt(d) h/(star c^2) over fundamental -d, d <= dmax.
pub fn verify_gross(lift: &LiftData, ct: &CoeffTable, dmax: u64) -> Result<VerifyReport> {
    let p = ct.p;
    let ds: Vec<u64> = (1..=dmax.min(lift.bound())).filter(|&d| is_fundamental(-(d as i64))).collect();
    let h = to_dd(&lift.height);
    let rows = par::map(&ds, |&d| -> Result<VerifyRow> {
        let (_, l) = lseries::lvalue(ct, -(d as i64))?;
        let c = lift.c(d);
        let star = if d % p == 0 { 2 } else { 1 };
        let ratio = (c != 0).then(|| l * DD::from_i64(d as i64).sqrt() * h / DD::from_i64(star as i64 * c * c));
        Ok(VerifyRow { sigma: 0, d, disc: -(d as i64), c, l, star, ratio })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let (k, max_relative_spread) = spread(&rows);
    let (_, l1) = lseries::lvalue(ct, 1)?;
    let degenerate = (l1.to_f64().abs() < ZERO_L).then(|| format!("L({},1) = 0", ct.label));
    Ok(VerifyReport {
        label: lift.label.clone(),
        mode: ReportMode::Gross,
        table_form: ct.label.clone(),
        zero_mismatches: zero_mismatches(&rows),
        rows,
        k,
        alpha: BigRational::from_integer(1.into()),
        constant: k,
        max_relative_spread,
        case_factor_minus: BigRational::from_integer(1.into()),
        degenerate,
    })
}

/// Discriminant whose twist of the table form gives L(f,-pd): -pd itself for
/// forms read off their own table, d (-p/p*) when ct is the level-p form
/// whose twist f is.
pub fn table_disc(kind: FormKind, p: u64, d: u64) -> i64 {
    let d = d as i64;
    match kind {
        FormKind::TwistOfLevelP => d * (-(p as i64) / prime_discriminant(p)),
        _ => -(p as i64) * d,
    }
}

/// Rows (d, c^σ(d), L) for both σ, d <= dmax with p ∤ d, (d/p) = σ and -pd fundamental,
/// with ratios L sqrt(d) h_σ/(h_+ c^2), which should all equal k.
pub fn verify_conjecture(fl: &FormLifts, ct: &CoeffTable, p: u64, dmax: u64, mode: ReportMode) -> Result<VerifyReport> {
    let a = alpha(fl.kind, p);
    let (hp, hm) = (to_dd(&fl.plus.height), to_dd(&fl.minus.height));
    let mut jobs = Vec::new();
    for lift in [&fl.plus, &fl.minus] {
        if lift.zero {
            continue;
        }
        for d in 1..=dmax.min(lift.bound()) {
            if legendre(d as i64, p) == lift.sigma && is_fundamental(-(p as i64) * d as i64) {
                jobs.push((lift, d));
            }
        }
    }
    let rows = par::map(&jobs, |&(lift, d)| -> Result<VerifyRow> {
        let disc = table_disc(fl.kind, p, d);
        let (_, l) = lseries::lvalue(ct, disc)?;
        let c = lift.c(d);
        let h = if lift.sigma > 0 { hp } else { hm };
        let ratio = (c != 0).then(|| l * DD::from_i64(d as i64).sqrt() * h / (hp * DD::from_i64(c * c)));
        Ok(VerifyRow { sigma: lift.sigma, d, disc, c, l, star: 1, ratio })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let (k, max_relative_spread) = spread(&rows);
    let constant = k.map(|k| k * DD::from_i64(p as i64).sqrt() * hp / to_dd(&a));
    let case = if fl.plus.zero || fl.minus.zero { BigRational::one() } else { &fl.plus.height / &fl.minus.height };
    let degenerate = (fl.plus.zero && fl.minus.zero).then(|| "both lifts vanish".to_string());
    Ok(VerifyReport {
        label: fl.label.clone(),
        mode,
        table_form: ct.label.clone(),
        zero_mismatches: zero_mismatches(&rows),
        rows,
        k,
        alpha: a,
        constant,
        max_relative_spread,
        case_factor_minus: case,
        degenerate,
    })
}

/// Lifts of M(Õ)^{f*} for the twist f* of a level-p form, from φψ of its
/// eigenvector on M(O): no Brandt matrices for Õ are needed.
pub fn twisted_lifts(
    ld: &LevelData,
    fam: &Families,
    lifts: &LevelLifts,
    base: &Eigencomponent,
    label: &str,
    bound: u64,
) -> Result<FormLifts> {
    let g = lifts.gross(&base.label).ok_or_else(|| Error::Internal(format!("no Gross lift for {}", base.label)))?;
    let basis = vec![pipeline::from_maximal(ld, &g.vector, true)];
    let cs = &ld.tilde_classes.classes;
    let plus = shimura::lift(cs, &fam.plus, &lifts.kernel_plus, &basis, label, bound, Scaling::Exact)?;
    let minus = shimura::lift(cs, &fam.minus, &lifts.kernel_minus, &basis, label, bound, Scaling::Exact)?;
    Ok(FormLifts { label: label.to_string(), kind: FormKind::TwistOfLevelP, dim: 1, plus, minus })
}

/// The real-twist check for a level-p form f: lifts of f* through φψ, then
/// L(f, d(-p/p*)) against c_{f*}(d)^2 k/sqrt(d). Degenerate when L(f*,1) = 0.
pub fn real_twist_pipeline(
    ld: &LevelData,
    fam: &Families,
    lifts: &LevelLifts,
    base: &Eigencomponent,
    ct: &CoeffTable,
    label: &str,
    dmax: u64,
    bound: u64,
) -> Result<(FormLifts, VerifyReport)> {
    let fl = twisted_lifts(ld, fam, lifts, base, label, bound)?;
    let mut rep = verify_conjecture(&fl, ct, ld.p, dmax, ReportMode::RealTwist)?;
    // L(f*,1) = L(f,p*)
    let ps = prime_discriminant(ld.p);
    let (_, pre) = lseries::lvalue(ct, ps)?;
    if pre.to_f64().abs() < ZERO_L {
        rep.degenerate = Some(format!("L({},{ps},1) = 0", ct.label));
    }
    Ok((fl, rep))
}

/// max |L(f,-pd) - L(f,d)| over fundamental d <= dmax with p ∤ d and -pd fundamental.
pub fn cm_identity(ct: &CoeffTable, dmax: u64) -> Result<f64> {
    let p = ct.p as i64;
    let ds: Vec<i64> = (1..=dmax as i64).filter(|&d| d % p != 0 && is_fundamental(d) && is_fundamental(-p * d)).collect();
    let diffs = par::map(&ds, |&d| -> Result<f64> {
        let (_, a) = lseries::lvalue(ct, -p * d)?;
        let (_, b) = lseries::lvalue(ct, d)?;
        Ok((a - b).abs().to_f64())
    });
    diffs.into_iter().try_fold(0.0f64, |m, x| Ok(m.max(x?)))
}

/// f ⊗ (p*/.) has the same eigenvalues as f.
pub fn has_cm_by_level(comp: &Eigencomponent, p: u64) -> bool {
    let ps = prime_discriminant(p);
    comp.eigenvalues.iter().all(|&(q, l)| l == 0 || kronecker(ps, q as i64) == 1)
}

/// The component among `pool` whose eigenvalues are those of `comp` twisted by (p*/.).
pub fn twist_partner<'a>(comp: &Eigencomponent, pool: &'a [Eigencomponent], p: u64) -> Option<&'a Eigencomponent> {
    pool.iter().find(|m| brandt::is_twist(m, comp, p))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub dmax: u64,
    /// lift coefficients are computed to this bound; at least dmax
    pub theta_bound: u64,
    pub gross: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { dmax: 200, theta_bound: 200, gross: false }
    }
}

/// A component with Θ^+ = Θ^- = 0 and its central value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vanishing {
    pub label: String,
    /// discriminant twisted by to reach L(f,1) from the table of `table_form`
    pub table_form: String,
    pub disc: i64,
    pub sign: i32,
    pub l: DD,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevelRun {
    pub p: u64,
    pub options: VerifyOptions,
    pub components: Components,
    pub lifts: LevelLifts,
    /// φψ lifts of the twisted components, by label
    pub twisted: Vec<FormLifts>,
    pub tables: Vec<CoeffTable>,
    pub reports: Vec<VerifyReport>,
    pub gross: Vec<VerifyReport>,
    pub vanishing: Vec<Vanishing>,
    /// (label, max |L(f,-pd) - L(f,d)|) for forms equal to their own twist
    pub cm: Vec<(String, f64)>,
}

impl LevelRun {
    pub fn report(&self, label: &str) -> Option<&VerifyReport> {
        self.reports.iter().find(|r| r.label == label)
    }

    pub fn table(&self, label: &str) -> Option<&CoeffTable> {
        self.tables.iter().find(|t| t.label == label)
    }
}

/// Table length for every discriminant the level-p^2 rows reach.
pub fn table_length(p: u64, dmax: u64) -> usize {
    lseries::terms_for(p * p * dmax * dmax).max(64)
}

fn table_for(cs: &crate::ideals::ClassSet, comp: &Eigencomponent, level: u64, p: u64, m: usize) -> Result<CoeffTable> {
    let v = linalg::primitive(&comp.basis[0]).0;
    let lam = lseries::brandt_eigenvalues(cs, &v, p, m as u64)?;
    let mut ct = CoeffTable::from_eigenvalues(&comp.label, level, p, &lam, m)?;
    if level == p {
        lseries::resolve_ap(&mut ct)?;
    }
    Ok(ct)
}

/// Everything from the order to the reports at one level.
pub fn run_level(p: u64, opts: VerifyOptions) -> Result<LevelRun> {
    if opts.theta_bound < opts.dmax {
        return Err(Error::Invalid(format!("theta bound {} below dmax {}", opts.theta_bound, opts.dmax)));
    }
    let ld = pipeline::build_level(p)?;
    let fam = pipeline::families(&ld)?;
    let comps = pipeline::components(&ld, 24)?;
    let lifts = pipeline::lifts(&ld, &fam, &comps, opts.theta_bound)?;
    run_level_with(&ld, &fam, comps, lifts, opts)
}

/// [`run_level`] from an already built level.
pub fn run_level_with(ld: &LevelData, fam: &Families, comps: Components, lifts: LevelLifts, opts: VerifyOptions) -> Result<LevelRun> {
    let p = ld.p;
    let m = table_length(p, opts.dmax);
    let cusp = |c: &&Eigencomponent| c.kind != FormKind::Eisenstein;
    let mut tables = Vec::new();
    for c in comps.maximal.iter().filter(cusp) {
        tables.push(table_for(&ld.classes, c, p, p, m)?);
    }
    let mut reports = Vec::new();
    let mut twisted = Vec::new();
    let mut vanishing = Vec::new();
    let mut cm = Vec::new();
    for c in comps.tilde.iter().filter(cusp) {
        let fl = lifts.get(&c.label).ok_or_else(|| Error::Internal(format!("no lift for {}", c.label)))?;
        let both_zero = fl.plus.zero && fl.minus.zero;
        match c.kind {
            FormKind::LevelP => {
                let ct = tables.iter().find(|t| t.label == c.label).ok_or_else(|| Error::Internal(format!("no table for {}", c.label)))?;
                if both_zero {
                    let (ts, l) = lseries::lvalue(ct, 1)?;
                    vanishing.push(Vanishing { label: c.label.clone(), table_form: c.label.clone(), disc: 1, sign: ts.sign, l });
                } else {
                    reports.push(verify_conjecture(fl, ct, p, opts.dmax, ReportMode::Conjecture)?);
                }
            }
            FormKind::TwistOfLevelP => {
                let base = twist_partner(c, &comps.maximal, p)
                    .ok_or_else(|| Error::Internal(format!("{}: no level-{p} form twists to it", c.label)))?;
                let ct = tables.iter().find(|t| t.label == base.label).ok_or_else(|| Error::Internal(format!("no table for {}", base.label)))?;
                if both_zero {
                    let disc = prime_discriminant(p);
                    let (ts, l) = lseries::lvalue(ct, disc)?;
                    vanishing.push(Vanishing { label: c.label.clone(), table_form: base.label.clone(), disc, sign: ts.sign, l });
                }
                let (tl, rep) = real_twist_pipeline(ld, fam, &lifts, base, ct, &c.label, opts.dmax, opts.theta_bound)?;
                if tl.plus.coeffs != fl.plus.coeffs || tl.minus.coeffs != fl.minus.coeffs {
                    return Err(Error::Internal(format!("{}: φψ lift differs from the Õ component lift", c.label)));
                }
                if !both_zero {
                    reports.push(rep);
                }
                twisted.push(tl);
            }
            FormKind::Genuine => {
                if both_zero {
                    let ct = table_for(&ld.tilde_classes.classes, c, p * p, p, lseries::terms_for(p * p))?;
                    let (ts, l) = lseries::lvalue(&ct, 1)?;
                    vanishing.push(Vanishing { label: c.label.clone(), table_form: c.label.clone(), disc: 1, sign: ts.sign, l });
                    tables.push(ct);
                } else {
                    let ct = table_for(&ld.tilde_classes.classes, c, p * p, p, m)?;
                    reports.push(verify_conjecture(fl, &ct, p, opts.dmax, ReportMode::Conjecture)?);
                    if has_cm_by_level(c, p) {
                        cm.push((c.label.clone(), cm_identity(&ct, opts.dmax)?));
                    }
                    tables.push(ct);
                }
            }
            FormKind::Eisenstein => {}
        }
    }
    // name the form in each table column: f ⊗ (p*/.) for forms read off their own table
    for r in reports.iter_mut().filter(|r| r.mode == ReportMode::Conjecture) {
        if let Some(c) = comps.tilde.iter().find(|c| c.label == r.label) {
            if let Some(t) = twist_partner(c, &comps.tilde, p) {
                r.table_form = t.label.clone();
            }
        }
    }
    let mut gross = Vec::new();
    if opts.gross {
        for g in lifts.gross.iter() {
            let ct = tables.iter().find(|t| t.label == g.label).ok_or_else(|| Error::Internal(format!("no table for {}", g.label)))?;
            gross.push(verify_gross(g, ct, opts.dmax)?);
        }
    }
    Ok(LevelRun { p, options: opts, components: comps, lifts, twisted, tables, reports, gross, vanishing, cm })
}
