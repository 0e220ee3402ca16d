#![allow(dead_code)]

use quatlift::qalg::{Quat, QuatLattice};
use quatlift::ternary::TernaryForm;
use serde_json::Value;

pub fn fixture() -> Value {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/reference_tables.json");
    serde_json::from_str(&std::fs::read_to_string(path).expect("fixture present")).expect("fixture parses")
}

pub fn level(fx: &Value, p: u64) -> &Value {
    fx["levels"].as_array().unwrap().iter().find(|l| l["p"].as_u64() == Some(p)).expect("level in fixture")
}

pub fn quat(v: &Value) -> Quat {
    let n: Vec<i64> = v["num"].as_array().unwrap().iter().map(|x| x.as_i64().unwrap()).collect();
    Quat::from_frac([n[0], n[1], n[2], n[3]], v["den"].as_i64().unwrap())
}

pub fn lattice(v: &Value) -> QuatLattice {
    let g: Vec<Quat> = v.as_array().unwrap().iter().map(quat).collect();
    QuatLattice::from_generators(&g).unwrap()
}

pub fn form(v: &Value) -> TernaryForm {
    let c: Vec<i64> = v.as_array().unwrap().iter().map(|x| x.as_i64().unwrap()).collect();
    TernaryForm::new([c[0], c[1], c[2], c[3], c[4], c[5]])
}

pub fn forms(lv: &Value, sign: &str) -> Vec<TernaryForm> {
    lv["forms"][sign].as_array().unwrap().iter().map(form).collect()
}

pub fn lift<'a>(lv: &'a Value, label: &str) -> &'a Value {
    lv["lifts"].as_array().unwrap().iter().find(|l| l["label"] == label).expect("lift in fixture")
}
