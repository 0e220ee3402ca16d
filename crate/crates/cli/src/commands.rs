use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use quatlift::arith::{is_prime, rat_str};
use quatlift::brandt::{BrandtSeries, FormKind};
use quatlift::dd::DD;
use quatlift::ideals::{self, ClassSet, TildeClassSet};
use quatlift::pipeline::{self, Families, LevelData};
use quatlift::qalg::{maximal_order, Order};
use quatlift::shimura::{self, LiftData};
use quatlift::ternary::TernaryForm;
use quatlift::verify::{self, LevelRun, ReportMode, VerifyOptions, VerifyReport};
use serde_json::{json, Value};

use crate::cache::Cache;

/// Spread of k over a table above this fails `verify`.
pub const SPREAD_TOL: f64 = 1e-4;
/// Relative distance to `--expect-k`.
pub const K_TOL: f64 = 1e-9;
/// |L(f,-pd) - L(f,d)| for self-twist forms.
pub const CM_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

pub struct Ctx {
    pub cache: Cache,
    pub format: Format,
    pub precision: usize,
}

impl Ctx {
    fn real(&self, x: DD) -> String {
        let s = x.to_fixed(self.precision);
        match s.strip_prefix('-') {
            Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
            _ => s,
        }
    }
}

pub fn check_prime(p: u64) -> Result<()> {
    if !is_prime(p) {
        bail!("{p} is not prime");
    }
    if p == 2 {
        bail!("p = 2 is not supported; an odd prime is needed");
    }
    Ok(())
}

/// Level data with the two class sets read from or written to the cache.
pub fn level(ctx: &Ctx, p: u64) -> Result<LevelData> {
    check_prime(p)?;
    let (_, order) = maximal_order(p)?;
    let classes: ClassSet = ctx.cache.get_or(p, "classes", 0, || Ok(ideals::class_set(&order, p)?))?;
    let classes = if classes.order == order { classes } else { ideals::class_set(&order, p)? };
    let tilde = ideals::suborder_tilde(&order, p)?;
    let tilde_classes: TildeClassSet = ctx.cache.get_or(p, "tilde-classes", 0, || Ok(ideals::tilde_class_set(&classes, &tilde, p)?))?;
    let tilde_classes =
        if tilde_classes.classes.order == tilde { tilde_classes } else { ideals::tilde_class_set(&classes, &tilde, p)? };
    let sigma_orders = ideals::suborders_sigma(&order, &tilde, p)?;
    let (order_plus, order_minus) = shimura::pick_sigma_orders(&sigma_orders)?;
    Ok(LevelData { p, order, classes, tilde, tilde_classes, sigma_orders, order_plus, order_minus })
}

fn order_json(o: &Order) -> Value {
    json!({ "basis": o.lattice, "disc": o.disc, "omega_x": o.omega_x })
}

fn order_pretty(out: &mut String, name: &str, o: &Order) {
    let basis: Vec<String> = o.basis().iter().map(|q| q.to_string()).collect();
    writeln!(out, "{name:<3} disc {:<6} omega_x {:<4} <{}>", o.disc, o.omega_x, basis.join(", ")).unwrap();
}

pub fn cmd_order(ctx: &Ctx, p: u64) -> Result<String> {
    let ld = level(ctx, p)?;
    let named = [("O", &ld.order), ("Õ", &ld.tilde), ("O+", &ld.order_plus), ("O-", &ld.order_minus)];
    let alg = ld.order.alg;
    let mut out = String::new();
    match ctx.format {
        Format::Json => {
            let reps: Vec<Value> = ld
                .classes
                .reps
                .iter()
                .zip(&ld.classes.unit_orders)
                .map(|(a, u)| json!({ "basis": a.lattice, "norm": rat_str::to_string(&a.norm), "units": u }))
                .collect();
            let v = json!({
                "p": p,
                "algebra": { "a": alg.a, "b": alg.b },
                "maximal": order_json(&ld.order),
                "tilde": order_json(&ld.tilde),
                "order_plus": order_json(&ld.order_plus),
                "order_minus": order_json(&ld.order_minus),
                "classes": reps,
                "tilde_classes": ld.tilde_classes.classes.len(),
            });
            out = serde_json::to_string_pretty(&v)? + "\n";
        }
        Format::Csv => {
            writeln!(out, "order,disc,omega_x,row,1,i,j,k").unwrap();
            for (name, o) in named {
                for (r, q) in o.basis().iter().enumerate() {
                    let c: Vec<String> = q.0.iter().map(rat_str::to_string).collect();
                    writeln!(out, "{name},{},{},{},{}", o.disc, o.omega_x, r + 1, c.join(",")).unwrap();
                }
            }
        }
        Format::Pretty => {
            writeln!(out, "p = {p}, algebra H({}, {})", alg.a, alg.b).unwrap();
            for (name, o) in named {
                order_pretty(&mut out, name, o);
            }
            writeln!(out, "classes of O: {}", ld.classes.len()).unwrap();
            for (i, (a, u)) in ld.classes.reps.iter().zip(&ld.classes.unit_orders).enumerate() {
                let basis: Vec<String> = a.lattice.basis().iter().map(|q| q.to_string()).collect();
                writeln!(out, "  a{} norm {} units {u} <{}>", i + 1, rat_str::to_string(&a.norm), basis.join(", ")).unwrap();
            }
            writeln!(out, "classes of Õ: {}", ld.tilde_classes.classes.len()).unwrap();
        }
    }
    Ok(out)
}

/// Expected forms in the reference layout: `{"plus": [[a1..a12]], "minus": [...]}`,
/// optionally nested under "forms".
fn read_expected(path: &Path) -> Result<(Vec<TernaryForm>, Vec<TernaryForm>)> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let v: Value = serde_json::from_str(&text)?;
    let v = v.get("forms").unwrap_or(&v);
    let parse = |key: &str| -> Result<Vec<TernaryForm>> {
        let rows = v[key].as_array().with_context(|| format!("expected list {key:?}"))?;
        rows.iter()
            .map(|r| {
                let c: Vec<i64> = r.as_array().context("form row")?.iter().filter_map(|x| x.as_i64()).collect();
                let c: [i64; 6] = c.try_into().map_err(|_| anyhow::anyhow!("a form has six coefficients"))?;
                Ok(TernaryForm::new(c))
            })
            .collect()
    };
    Ok((parse("plus")?, parse("minus")?))
}

/// 1-based index of the equivalent expected form, per form of ours.
fn cross_reference(ours: &[TernaryForm], theirs: &[TernaryForm]) -> Vec<Option<usize>> {
    ours.iter().map(|f| theirs.iter().position(|g| g.equivalent(f)).map(|k| k + 1)).collect()
}

pub fn cmd_tables(ctx: &Ctx, p: u64, expect: Option<&Path>) -> Result<String> {
    let ld = level(ctx, p)?;
    let fam = pipeline::families(&ld)?;
    let ts = &ld.tilde_classes;
    let expected = expect.map(read_expected).transpose()?;
    let xref = expected.as_ref().map(|(a, b)| (cross_reference(&fam.plus.forms, a), cross_reference(&fam.minus.forms, b)));
    let mut out = String::new();
    let n = ts.classes.len();
    match ctx.format {
        Format::Json => {
            let rows: Vec<Value> = (0..n)
                .map(|j| {
                    json!({
                        "class": j + 1,
                        "parent": ts.parent[j] + 1,
                        "chi": ts.chi[j],
                        "units": ts.classes.unit_orders[j],
                        "form_plus": fam.plus.class_form[j] + 1,
                        "form_minus": fam.minus.class_form[j] + 1,
                    })
                })
                .collect();
            let forms = |f: &[TernaryForm]| f.iter().map(|g| g.coeffs().to_vec()).collect::<Vec<_>>();
            let mut v = json!({
                "p": p,
                "classes": rows,
                "psi": ts.psi,
                "forms": { "plus": forms(&fam.plus.forms), "minus": forms(&fam.minus.forms) },
                "genus": { "plus": fam.plus.forms.first().map(|f| f.genus_symbol()), "minus": fam.minus.forms.first().map(|f| f.genus_symbol()) },
            });
            if let Some((a, b)) = &xref {
                v["expected_index"] = json!({ "plus": a, "minus": b });
            }
            out = serde_json::to_string_pretty(&v)? + "\n";
        }
        Format::Csv => {
            writeln!(out, "class,parent,chi,units,form_plus,form_minus").unwrap();
            for j in 0..n {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    j + 1,
                    ts.parent[j] + 1,
                    ts.chi[j],
                    ts.classes.unit_orders[j],
                    fam.plus.class_form[j] + 1,
                    fam.minus.class_form[j] + 1
                )
                .unwrap();
            }
            writeln!(out).unwrap();
            writeln!(out, "sigma,form,a1,a2,a3,a23,a13,a12,expected").unwrap();
            for (s, f, x) in [("+", &fam.plus, xref.as_ref().map(|x| &x.0)), ("-", &fam.minus, xref.as_ref().map(|x| &x.1))] {
                for (k, g) in f.forms.iter().enumerate() {
                    let c: Vec<String> = g.coeffs().iter().map(|x| x.to_string()).collect();
                    let e = x.and_then(|x| x[k]).map(|e| e.to_string()).unwrap_or_default();
                    writeln!(out, "{s},{},{},{e}", k + 1, c.join(",")).unwrap();
                }
            }
        }
        Format::Pretty => {
            writeln!(out, "p = {p}: {} classes of Õ, {} + {} forms", n, fam.plus.forms.len(), fam.minus.forms.len()).unwrap();
            writeln!(out, "class parent chi units Q+ Q-").unwrap();
            for j in 0..n {
                writeln!(
                    out,
                    "{:>5} {:>6} {:>3} {:>5} {:>2} {:>2}",
                    j + 1,
                    ts.parent[j] + 1,
                    if ts.chi[j] > 0 { "+" } else { "-" },
                    ts.classes.unit_orders[j],
                    fam.plus.class_form[j] + 1,
                    fam.minus.class_form[j] + 1
                )
                .unwrap();
            }
            for (s, f, x) in [("+", &fam.plus, xref.as_ref().map(|x| &x.0)), ("-", &fam.minus, xref.as_ref().map(|x| &x.1))] {
                for (k, g) in f.forms.iter().enumerate() {
                    let e = match x.map(|x| x[k]) {
                        Some(Some(e)) => format!("  ~ expected {e}"),
                        Some(None) => "  ~ no expected match".to_string(),
                        None => String::new(),
                    };
                    writeln!(out, "Q{}{s} = {g}{e}", k + 1).unwrap();
                }
            }
        }
    }
    if let Some((a, b)) = &xref {
        if a.iter().chain(b).any(|x| x.is_none()) {
            bail!("{out}some forms have no equivalent in the expected list");
        }
    }
    Ok(out)
}

pub fn cmd_brandt(ctx: &Ctx, p: u64, bound: u64, use_tilde: bool) -> Result<String> {
    let ld = level(ctx, p)?;
    let (kind, cs) = if use_tilde { ("brandt-tilde", &ld.tilde_classes.classes) } else { ("brandt-maximal", &ld.classes) };
    let bs: BrandtSeries = ctx.cache.get_or(p, kind, bound, || Ok(BrandtSeries::new(cs, bound)?))?;
    let ms: Vec<u64> = (1..=bound).filter(|m| m % p != 0).collect();
    let mats = ms.iter().map(|&m| bs.matrix_int(m)).collect::<quatlift::error::Result<Vec<_>>>()?;
    let comps = pipeline::components(&ld, 24)?;
    let comps = if use_tilde { &comps.tilde } else { &comps.maximal };
    let mut out = String::new();
    match ctx.format {
        Format::Json => {
            let m: serde_json::Map<String, Value> = ms.iter().zip(&mats).map(|(m, b)| (m.to_string(), json!(b))).collect();
            let c: Vec<Value> = comps
                .iter()
                .map(|c| json!({ "label": c.label, "kind": c.kind, "dim": c.dim(), "eigenvalues": c.eigenvalues }))
                .collect();
            let v = json!({ "p": p, "order": if use_tilde { "tilde" } else { "maximal" }, "units": bs.units, "bound": bound, "matrices": m, "components": c });
            out = serde_json::to_string_pretty(&v)? + "\n";
        }
        Format::Csv => {
            writeln!(out, "m,row,entries").unwrap();
            for (m, b) in ms.iter().zip(&mats) {
                for (i, r) in b.iter().enumerate() {
                    let e: Vec<String> = r.iter().map(|x| x.to_string()).collect();
                    writeln!(out, "{m},{},{}", i + 1, e.join(" ")).unwrap();
                }
            }
        }
        Format::Pretty => {
            writeln!(out, "p = {p}, {} classes, unit orders {:?}", bs.len(), bs.units).unwrap();
            for (m, b) in ms.iter().zip(&mats) {
                writeln!(out, "B_{m}").unwrap();
                for r in b {
                    let e: Vec<String> = r.iter().map(|x| format!("{x:>4}")).collect();
                    writeln!(out, "  {}", e.join("")).unwrap();
                }
            }
            for c in comps {
                let ev: Vec<String> = c.eigenvalues.iter().map(|(q, a)| format!("a{q}={a}")).collect();
                writeln!(out, "{:<10} {:<14} dim {} {}", c.label, format!("{:?}", c.kind), c.dim(), ev.join(" ")).unwrap();
            }
        }
    }
    Ok(out)
}

fn kind_name(k: FormKind) -> &'static str {
    match k {
        FormKind::LevelP => "level-p",
        FormKind::TwistOfLevelP => "twist",
        FormKind::Genuine => "genuine",
        FormKind::Eisenstein => "eisenstein",
    }
}

fn nonzero_coeffs(l: &LiftData) -> Vec<(u64, i64)> {
    (0..=l.bound()).map(|d| (d, l.c(d))).filter(|x| x.1 != 0).collect()
}

pub fn cmd_lift(ctx: &Ctx, p: u64, label: Option<&str>, bound: u64, gross: bool) -> Result<String> {
    let ld = level(ctx, p)?;
    let fam = pipeline::families(&ld)?;
    let comps = pipeline::components(&ld, 24)?;
    let lifts = pipeline::lifts(&ld, &fam, &comps, bound)?;
    let chosen: Vec<&pipeline::FormLifts> = lifts.tilde.iter().filter(|f| label.is_none_or(|l| f.label == l)).collect();
    let gross_lifts: Vec<&LiftData> =
        if gross { lifts.gross.iter().filter(|g| label.is_none_or(|l| g.label == l)).collect() } else { Vec::new() };
    if chosen.is_empty() && gross_lifts.is_empty() {
        bail!("no form labelled {} at p = {p}", label.unwrap_or("?"));
    }
    let mut out = String::new();
    match ctx.format {
        Format::Json => {
            let v = json!({ "p": p, "bound": bound, "lifts": chosen, "gross": gross_lifts });
            out = serde_json::to_string_pretty(&v)? + "\n";
        }
        Format::Csv => {
            writeln!(out, "label,sigma,d,c").unwrap();
            for f in &chosen {
                for l in [&f.plus, &f.minus] {
                    for (d, c) in nonzero_coeffs(l) {
                        writeln!(out, "{},{},{d},{c}", f.label, l.sigma).unwrap();
                    }
                }
            }
            for g in &gross_lifts {
                for (d, c) in nonzero_coeffs(g) {
                    writeln!(out, "{},0,{d},{c}", g.label).unwrap();
                }
            }
        }
        Format::Pretty => {
            let show = |out: &mut String, name: String, l: &LiftData| {
                let combo: Vec<String> = l.form_combo.iter().map(rat_str::to_string).collect();
                writeln!(out, "{name}: height {}, level {}, combo [{}]", rat_str::to_string(&l.height), l.level, combo.join(", ")).unwrap();
                if l.zero {
                    writeln!(out, "  zero").unwrap();
                } else {
                    let mut series = String::new();
                    for (i, (d, c)) in nonzero_coeffs(l).iter().take(24).enumerate() {
                        let sign = if *c < 0 { "-" } else if i > 0 { "+" } else { "" };
                        let sep = if i > 0 { " " } else { "" };
                        write!(series, "{sep}{sign}{}{} q^{d}", if i > 0 && !sign.is_empty() { " " } else { "" }, c.abs()).unwrap();
                    }
                    writeln!(out, "  {series} + ...").unwrap();
                }
            };
            for f in &chosen {
                writeln!(out, "{} ({}, dim {})", f.label, kind_name(f.kind), f.dim).unwrap();
                show(&mut out, "  Θ+".into(), &f.plus);
                show(&mut out, "  Θ-".into(), &f.minus);
            }
            for g in &gross_lifts {
                show(&mut out, format!("{} (maximal order)", g.label), g);
            }
        }
    }
    Ok(out)
}

pub fn run(ctx: &Ctx, p: u64, dmax: u64, bound: u64, gross: bool) -> Result<LevelRun> {
    if bound < dmax {
        bail!("--bound {bound} is below --dmax {dmax}");
    }
    let ld = level(ctx, p)?;
    let fam: Families = pipeline::families(&ld)?;
    let comps = pipeline::components(&ld, 24)?;
    let lifts = pipeline::lifts(&ld, &fam, &comps, bound)?;
    Ok(verify::run_level_with(&ld, &fam, comps, lifts, VerifyOptions { dmax, theta_bound: bound, gross })?)
}

fn select<'a>(run: &'a LevelRun, label: Option<&str>, gross: bool) -> Vec<&'a VerifyReport> {
    let extra: &[VerifyReport] = if gross { &run.gross } else { &[] };
    run.reports.iter().chain(extra).filter(|r| label.is_none_or(|l| r.label == l)).collect()
}

fn known_label(run: &LevelRun, label: &str) -> bool {
    run.reports.iter().chain(&run.gross).any(|r| r.label == label) || run.vanishing.iter().any(|v| v.label == label)
}

fn mode_name(m: ReportMode) -> &'static str {
    match m {
        ReportMode::Gross => "gross",
        ReportMode::Conjecture => "conjecture",
        ReportMode::RealTwist => "real-twist",
    }
}

pub fn cmd_lvalues(ctx: &Ctx, p: u64, label: Option<&str>, dmax: u64, bound: u64, gross: bool) -> Result<String> {
    let run = run(ctx, p, dmax, bound, gross)?;
    if let Some(l) = label {
        if !known_label(&run, l) {
            bail!("no form labelled {l} at p = {p}");
        }
    }
    let reps = select(&run, label, gross);
    let mut out = String::new();
    match ctx.format {
        Format::Json => {
            let v: Vec<Value> = reps
                .iter()
                .map(|r| {
                    let rows: Vec<Value> = r
                        .rows
                        .iter()
                        .map(|x| json!({ "sigma": x.sigma, "d": x.d, "disc": x.disc, "c": x.c, "L": ctx.real(x.l), "star": x.star }))
                        .collect();
                    json!({ "label": r.label, "mode": mode_name(r.mode), "table_form": r.table_form, "rows": rows })
                })
                .collect();
            out = serde_json::to_string_pretty(&json!({ "p": p, "dmax": dmax, "reports": v }))? + "\n";
        }
        Format::Csv => {
            // the two sign blocks side by side
            writeln!(out, "label,d+,c+,L+,d-,c-,L-").unwrap();
            for r in &reps {
                let side = |s: i32| r.rows.iter().filter(|x| x.sigma == s).collect::<Vec<_>>();
                let (plus, minus) = if r.mode == ReportMode::Gross { (side(0), Vec::new()) } else { (side(1), side(-1)) };
                let cell = |x: Option<&&verify::VerifyRow>| match x {
                    Some(x) => format!("{},{},{}", x.d, x.c, ctx.real(x.l)),
                    None => ",,".to_string(),
                };
                for i in 0..plus.len().max(minus.len()) {
                    writeln!(out, "{},{},{}", r.label, cell(plus.get(i)), cell(minus.get(i))).unwrap();
                }
            }
        }
        Format::Pretty => {
            for r in &reps {
                writeln!(out, "{} ({}, L-function of {})", r.label, mode_name(r.mode), r.table_form).unwrap();
                writeln!(out, "  sigma    d   disc     c  L").unwrap();
                for x in &r.rows {
                    writeln!(out, "  {:>5} {:>4} {:>6} {:>5}  {}", x.sigma, x.d, x.disc, x.c, ctx.real(x.l)).unwrap();
                }
            }
        }
    }
    Ok(out)
}

pub struct Verdict {
    pub output: String,
    pub failures: Vec<String>,
}

pub fn cmd_verify(ctx: &Ctx, p: u64, label: Option<&str>, dmax: u64, bound: u64, gross: bool, expect_k: Option<&str>) -> Result<Verdict> {
    let run = run(ctx, p, dmax, bound, gross)?;
    if let Some(l) = label {
        if !known_label(&run, l) {
            bail!("no form labelled {l} at p = {p}");
        }
    }
    let expect_k = expect_k.map(|s| DD::parse(s).with_context(|| format!("bad decimal {s:?}"))).transpose()?;
    let reps = select(&run, label, gross);
    let vanishing: Vec<_> = run.vanishing.iter().filter(|v| label.is_none_or(|l| v.label == l)).collect();
    let cm: Vec<_> = run.cm.iter().filter(|(l, _)| label.is_none_or(|x| x == l)).collect();
    let mut failures = Vec::new();
    for r in &reps {
        if r.max_relative_spread >= SPREAD_TOL {
            failures.push(format!("{}: k spread {:e} over the table", r.label, r.max_relative_spread));
        }
        for d in &r.zero_mismatches {
            failures.push(format!("{}: d = {d} has c = 0 against a nonzero L or the reverse", r.label));
        }
        if let Some(why) = &r.degenerate {
            failures.push(format!("{}: {why}", r.label));
        }
        if r.k.is_none() && !r.rows.is_empty() {
            failures.push(format!("{}: no row with c != 0", r.label));
        }
    }
    for v in &vanishing {
        if !v.l.is_zero() && v.l.abs().to_f64() >= verify::ZERO_L {
            failures.push(format!("{}: lifts vanish but L = {}", v.label, ctx.real(v.l)));
        }
    }
    for (l, e) in &cm {
        if *e >= CM_TOL {
            failures.push(format!("{l}: self-twist identity off by {e:e}"));
        }
    }
    if let Some(want) = expect_k {
        let main: Vec<&&VerifyReport> = reps.iter().filter(|r| r.mode != ReportMode::Gross).collect();
        match main.first().and_then(|r| r.k) {
            Some(k) if ((k - want) / want).abs().to_f64() < K_TOL => {}
            Some(k) => failures.push(format!("k = {} is not within {K_TOL:e} of {}", ctx.real(k), ctx.real(want))),
            None => failures.push("no constant to compare with --expect-k".into()),
        }
    }
    let mut out = String::new();
    match ctx.format {
        Format::Json => {
            let r: Vec<Value> = reps
                .iter()
                .map(|r| {
                    json!({
                        "label": r.label,
                        "mode": mode_name(r.mode),
                        "table_form": r.table_form,
                        "k": r.k.map(|k| ctx.real(k)),
                        "alpha": rat_str::to_string(&r.alpha),
                        "constant": r.constant.map(|k| ctx.real(k)),
                        "max_relative_spread": r.max_relative_spread,
                        "case_factor_minus": rat_str::to_string(&r.case_factor_minus),
                        "zero_mismatches": r.zero_mismatches,
                        "rows": r.rows.len(),
                    })
                })
                .collect();
            let van: Vec<Value> = vanishing
                .iter()
                .map(|v| json!({ "label": v.label, "table_form": v.table_form, "disc": v.disc, "sign": v.sign, "L": ctx.real(v.l) }))
                .collect();
            let v = json!({ "p": p, "dmax": dmax, "reports": r, "vanishing": van, "cm": cm, "failures": failures, "ok": failures.is_empty() });
            out = serde_json::to_string_pretty(&v)? + "\n";
        }
        Format::Csv => {
            writeln!(out, "label,mode,table_form,k,spread,case_factor_minus,rows").unwrap();
            for r in &reps {
                let k = r.k.map(|k| ctx.real(k)).unwrap_or_default();
                writeln!(
                    out,
                    "{},{},{},{k},{:e},{},{}",
                    r.label,
                    mode_name(r.mode),
                    r.table_form,
                    r.max_relative_spread,
                    rat_str::to_string(&r.case_factor_minus),
                    r.rows.len()
                )
                .unwrap();
            }
        }
        Format::Pretty => {
            for r in &reps {
                let k = r.k.map(|k| ctx.real(k)).unwrap_or_else(|| "-".into());
                writeln!(out, "{} ({}): k = {k}", r.label, mode_name(r.mode)).unwrap();
                writeln!(
                    out,
                    "  {} rows, spread {:.1e}, case factor {}",
                    r.rows.len(),
                    r.max_relative_spread,
                    rat_str::to_string(&r.case_factor_minus)
                )
                .unwrap();
            }
            for v in &vanishing {
                writeln!(out, "{}: Θ+ = Θ- = 0, L({}, {}) = {} with sign {}", v.label, v.table_form, v.disc, ctx.real(v.l), v.sign)
                    .unwrap();
            }
            for (l, e) in &cm {
                writeln!(out, "{l}: L(f,-pd) - L(f,d) within {e:.1e}").unwrap();
            }
            for f in &failures {
                writeln!(out, "FAIL {f}").unwrap();
            }
            writeln!(out, "{}", if failures.is_empty() { "ok" } else { "failed" }).unwrap();
        }
    }
    Ok(Verdict { output: out, failures })
}
