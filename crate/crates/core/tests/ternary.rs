mod common;

use std::sync::OnceLock;

use num_traits::ToPrimitive;
use proptest::prelude::*;
use quatlift::arith::{frac, rat};
use quatlift::ideals::{class_set, suborder_tilde};
use quatlift::qalg::{maximal_order, Order, Quat};
use quatlift::ternary::{ternary_of_order, TernaryForm};

type M3 = [[i64; 3]; 3];

fn det(u: &M3) -> i64 {
    u[0][0] * (u[1][1] * u[2][2] - u[1][2] * u[2][1]) - u[0][1] * (u[1][0] * u[2][2] - u[1][2] * u[2][0])
        + u[0][2] * (u[1][0] * u[2][1] - u[1][1] * u[2][0])
}

/// Every matrix in GL_3(Z) with entries in [-r, r].
fn small_unimodular(r: i64) -> Vec<M3> {
    let w = 2 * r + 1;
    let mut out = Vec::new();
    for code in 0..w.pow(9) {
        let mut t = code;
        let mut u = [[0i64; 3]; 3];
        for row in u.iter_mut() {
            for e in row.iter_mut() {
                *e = t % w - r;
                t /= w;
            }
        }
        if det(&u).abs() == 1 {
            out.push(u);
        }
    }
    out
}

fn gl2() -> &'static [M3] {
    static CELL: OnceLock<Vec<M3>> = OnceLock::new();
    CELL.get_or_init(|| small_unimodular(2))
}

fn all_fixture_forms() -> Vec<TernaryForm> {
    let fx = common::fixture();
    let mut out = Vec::new();
    for lv in fx["levels"].as_array().unwrap() {
        for s in ["plus", "minus"] {
            out.extend(common::forms(lv, s));
        }
    }
    out
}

fn box_counts(f: &TernaryForm, bound: u64) -> Vec<u64> {
    // the smallest eigenvalue of the matrix of Q bounds |x|^2 <= bound / lambda
    let g = f.gram();
    let m: Vec<Vec<f64>> = g.iter().map(|r| r.iter().map(|&x| x as f64 / 2.0).collect()).collect();
    let lam = smallest_eigenvalue(&m);
    let r = ((bound as f64 / lam).sqrt()).ceil() as i64 + 1;
    let mut counts = vec![0u64; bound as usize + 1];
    for x in -r..=r {
        for y in -r..=r {
            for z in -r..=r {
                let v = f.value(&[x, y, z]);
                if v >= 0 && (v as u64) <= bound {
                    counts[v as usize] += 1;
                }
            }
        }
    }
    counts
}

fn smallest_eigenvalue(m: &[Vec<f64>]) -> f64 {
    // det(M - t) stays positive below the smallest eigenvalue
    let det3 = |t: f64| {
        let a: Vec<Vec<f64>> = (0..3).map(|i| (0..3).map(|j| m[i][j] - if i == j { t } else { 0.0 }).collect()).collect();
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    };
    let (mut lo, mut hi) = (0.0, m[0][0].min(m[1][1]).min(m[2][2]));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if det3(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo * 0.999
}

#[test]
fn theta_values_of_the_level_seven_forms() {
    let fx = common::fixture();
    let plus = common::forms(common::level(&fx, 7), "plus");
    let t1 = plus[0].theta(8);
    let t2 = plus[1].theta(8);
    assert_eq!(*t1.get(0), frac(1, 2));
    assert_eq!(*t1.get(1), rat(1));
    assert_eq!(t1.get(8) - t2.get(8), rat(-2));
}

#[test]
fn enumeration_matches_box_search() {
    for f in all_fixture_forms().iter().take(20) {
        assert_eq!(f.representation_counts(120), box_counts(f, 120), "{f}");
    }
    let diag = TernaryForm::new([1, 1, 1, 0, 0, 0]);
    // sums of three squares
    assert_eq!(&diag.representation_counts(9)[..], &[1, 6, 12, 8, 6, 24, 24, 0, 12, 30]);
}

#[test]
fn reduction_against_small_unimodular_search() {
    let mats = gl2();
    for f in all_fixture_forms() {
        let r = f.reduce();
        assert!(r.equivalent(&f));
        assert_eq!(r.reduce(), r, "reduce is idempotent on {f}");
        // successive minima over a box
        let mut vals: Vec<(i64, [i64; 3])> = Vec::new();
        for x in -3i64..=3 {
            for y in -3i64..=3 {
                for z in -3i64..=3 {
                    if (x, y, z) != (0, 0, 0) {
                        vals.push((r.value(&[x, y, z]), [x, y, z]));
                    }
                }
            }
        }
        let m1 = vals.iter().map(|v| v.0).min().unwrap();
        assert_eq!(r.a1, m1, "{f}");
        assert!(r.a1 <= r.a2 && r.a2 <= r.a3);
        // no small basis change with the same diagonal has a smaller off-diagonal tuple
        let key = |g: &TernaryForm| (g.a23, g.a13, g.a12);
        for u in mats {
            let g = r.transform(u);
            if (g.a1, g.a2, g.a3) == (r.a1, r.a2, r.a3) {
                assert!(key(&r) <= key(&g), "{f}: {r} vs {g}");
            }
            // any basis has sorted diagonal at least the successive minima
            let mut d = [g.a1, g.a2, g.a3];
            d.sort();
            assert!(d[0] >= r.a1 && d[1] >= r.a2 && d[2] >= r.a3, "{f}: {r} vs {g}");
        }
    }
}

#[test]
fn fixture_forms_are_pairwise_inequivalent_within_a_genus() {
    let fx = common::fixture();
    for p in [7u64, 11, 17, 19] {
        let lv = common::level(&fx, p);
        for s in ["plus", "minus"] {
            let fs = common::forms(lv, s);
            for (i, a) in fs.iter().enumerate() {
                assert!(a.is_primitive() && a.is_positive_definite());
                assert!(a.same_genus(&fs[0]), "p={p} {s} form {}", i + 1);
                for b in &fs[i + 1..] {
                    assert!(!a.equivalent(b));
                }
            }
        }
        let plus = common::forms(lv, "plus");
        let minus = common::forms(lv, "minus");
        assert!(!plus[0].same_genus(&minus[0]), "p={p}");
        assert_eq!(plus[0].det2(), minus[0].det2());
    }
}

#[test]
fn small_equivalences() {
    // x^2 + (y+z)^2 + z^2 is the sum of three squares
    let a = TernaryForm::new([1, 1, 1, 0, 0, 0]);
    let b = TernaryForm::new([1, 1, 2, 2, 0, 0]);
    assert!(a.equivalent(&b));
    assert!(a.same_genus(&b));
    // same determinant, but r(1) is 4 against 2
    let c = TernaryForm::new([1, 1, 3, 0, 0, 0]);
    let d = TernaryForm::new([1, 2, 2, 2, 0, 0]);
    assert_eq!(c.det2(), d.det2());
    assert_eq!((c.representation_counts(1)[1], d.representation_counts(1)[1]), (4, 2));
    assert!(!c.equivalent(&d));
}

fn conjugate(o: &Order, x: &Quat) -> Order {
    let alg = o.alg;
    let xi = alg.inverse(x);
    let g: Vec<Quat> = o.basis().iter().map(|b| alg.mul(&alg.mul(&xi, b), x)).collect();
    Order::from_generators(alg, &g).unwrap()
}

#[test]
fn ternary_of_order_is_a_conjugacy_invariant() {
    for p in [7u64, 11] {
        let (_, o) = maximal_order(p).unwrap();
        let cs = class_set(&o, p).unwrap();
        let t = suborder_tilde(&o, p).unwrap();
        for r in cs.right_orders.iter().chain(std::iter::once(&t)) {
            let q = ternary_of_order(r).unwrap();
            assert!(q.is_primitive());
            assert_eq!(q.reduce(), q);
            for x in [Quat::from_ints([1, 1, 0, 0]), Quat::from_ints([2, 0, 1, 1]), Quat::from_frac([1, 3, 1, 1], 2)] {
                assert_eq!(ternary_of_order(&conjugate(r, &x)).unwrap(), q);
            }
        }
        // every maximal order has the same ternary determinant
        let qs: Vec<TernaryForm> = cs.right_orders.iter().map(|r| ternary_of_order(r).unwrap()).collect();
        assert_eq!(qs.len(), cs.len());
        let d = qs[0].det2().to_i64().unwrap();
        assert!(qs.iter().all(|q| q.det2().to_i64() == Some(d)));
    }
}

fn unimodular() -> impl Strategy<Value = M3> {
    let n = gl2().len();
    (0..n).prop_map(|k| gl2()[k])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reduce_and_theta_are_class_invariants(k in 0usize..45, u in unimodular(), v in unimodular()) {
        let fs = all_fixture_forms();
        let f = fs[k % fs.len()];
        let g = f.transform(&u).transform(&v);
        prop_assert_eq!(g.det2(), f.det2());
        prop_assert_eq!(g.reduce(), f.reduce());
        prop_assert_eq!(g.representation_counts(40), f.representation_counts(40));
        prop_assert!(g.same_genus(&f));
    }
}
