use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use quatlift::arith::{frac, rat};
use quatlift::qalg::{is_order, maximal_order, Order, QAlgebra, Quat, QuatLattice};

fn q(c: [i64; 4], den: i64) -> Quat {
    Quat::from_frac(c, den)
}

fn std_basis() -> Vec<Quat> {
    vec![q([1, 0, 0, 0], 1), q([0, 1, 0, 0], 1), q([0, 0, 1, 0], 1), q([0, 0, 0, 1], 1)]
}

#[test]
fn defining_relations() {
    let h = QAlgebra::new(-1, -7);
    assert_eq!(h.mul(&h.i(), &h.j()), h.k());
    assert_eq!(h.norm(&q([1, 1, 0, 0], 1)), rat(2));
    assert_eq!(h.normx(&q([1, 0, 1, 0], 2)), rat(-7));
}

#[test]
fn lattice_examples() {
    let l = QuatLattice::from_generators(&std_basis()).unwrap();
    let two: Vec<Quat> = std_basis().iter().map(|x| x.scale(&rat(2))).collect();
    let l2 = QuatLattice::from_generators(&two).unwrap();
    assert_eq!(l2.index_in(&l), rat(16));
    let half = QuatLattice::from_generators(&[q([1, 0, 0, 0], 2), q([0, 1, 0, 0], 1), q([0, 0, 1, 0], 1), q([0, 0, 0, 1], 1)]).unwrap();
    assert_eq!(l.intersection(&half), l);

    let (alg, o) = maximal_order(7).unwrap();
    assert_eq!(o.lattice.product(&alg, &o.lattice), o.lattice);
}

#[test]
fn order_recognition() {
    let h = QAlgebra::new(-1, -7);
    let std = QuatLattice::from_generators(&std_basis()).unwrap();
    assert!(is_order(&h, &std));
    let bad = QuatLattice::from_generators(&[q([1, 0, 0, 0], 1), q([0, 1, 0, 0], 2), q([0, 0, 1, 0], 1), q([0, 0, 0, 1], 1)]).unwrap();
    assert!(!is_order(&h, &bad));
    let max = QuatLattice::from_generators(&[q([1, 0, 0, 0], 1), q([0, 1, 0, 0], 1), q([1, 0, 1, 0], 2), q([0, 1, 0, 1], 2)]).unwrap();
    assert!(is_order(&h, &max));
}

#[test]
fn discriminants_and_omega() {
    let h = QAlgebra::new(-1, -7);
    let std = Order::from_generators(h, &std_basis()).unwrap();
    assert_eq!(std.disc, 28);
    let (_, o) = maximal_order(7).unwrap();
    assert_eq!((o.disc, o.omega_x), (7, 1));
    let t = Order::from_generators(h, &[q([1, 0, 0, 0], 1), q([0, 7, 0, 0], 1), q([1, 0, 1, 0], 2), q([0, 7, 0, 1], 2)]).unwrap();
    assert_eq!((t.disc, t.omega_x), (49, 7));
    for (a, b) in [(-1, -3), (-2, -5), (-3, -7), (-17, -3), (-1, -19), (-6, -10)] {
        let alg = QAlgebra::new(a, b);
        let o = Order::from_generators(alg, &std_basis()).unwrap();
        assert_eq!(o.disc, 4 * (a * b).unsigned_abs(), "H({a},{b})");
    }
}

#[test]
fn maximal_orders_of_the_four_levels() {
    let cases: [(u64, (i64, i64), [Quat; 4]); 3] = [
        (7, (-1, -7), [q([1, 0, 0, 0], 1), q([0, 1, 0, 0], 1), q([1, 0, 1, 0], 2), q([0, 1, 0, 1], 2)]),
        (17, (-17, -3), [q([1, 0, 0, 0], 1), q([0, 1, 0, 0], 1), q([1, 0, 1, 0], 2), q([0, 3, 2, 1], 6)]),
        (19, (-1, -19), [q([1, 0, 0, 0], 1), q([0, 1, 0, 0], 1), q([1, 0, 1, 0], 2), q([0, 1, 0, 1], 2)]),
    ];
    for (p, (a, b), gens) in cases {
        let (alg, o) = maximal_order(p).unwrap();
        assert_eq!(alg, QAlgebra::new(a, b), "p={p}");
        assert_eq!(o.lattice, QuatLattice::from_generators(&gens).unwrap(), "p={p}");
        assert_eq!(o.disc, p);
    }
    for p in [3u64, 5, 11, 13, 23, 29, 31, 37, 41, 43, 47] {
        let (alg, o) = maximal_order(p).unwrap();
        assert_eq!(o.disc, p);
        assert_eq!(alg.ramified_primes(), vec![p]);
    }
    assert!(maximal_order(9).is_err());
    assert!(maximal_order(2).is_err());
}

fn quat() -> impl Strategy<Value = Quat> {
    (prop::array::uniform4(-20i64..=20), 1i64..=6).prop_map(|(c, d)| Quat::from_frac(c, d))
}

fn algebra() -> impl Strategy<Value = QAlgebra> {
    (1i64..=20, 1i64..=20).prop_map(|(a, b)| QAlgebra::new(-a, -b))
}

proptest! {
    #[test]
    fn norm_is_multiplicative(h in algebra(), x in quat(), y in quat()) {
        prop_assert_eq!(h.norm(&h.mul(&x, &y)), h.norm(&x) * h.norm(&y));
    }

    #[test]
    fn trace_additive_and_conjugation(h in algebra(), x in quat(), y in quat()) {
        prop_assert_eq!(x.add(&y).trace(), x.trace() + y.trace());
        prop_assert_eq!(x.conj().conj(), x.clone());
        prop_assert_eq!(h.mul(&x, &x.conj()), Quat::scalar(h.norm(&x)));
        prop_assert_eq!(h.mul(&x, &y).conj(), h.mul(&y.conj(), &x.conj()));
    }

    #[test]
    fn normx_identities(h in algebra(), x in quat(), tn in -9i64..=9, td in 1i64..=5) {
        let t = Quat::scalar(frac(tn, td));
        prop_assert_eq!(h.normx(&x.add(&t)), h.normx(&x));
        let tr = x.trace();
        prop_assert_eq!(h.normx(&x), &tr * &tr - rat(4) * h.norm(&x));
    }

    #[test]
    fn associativity(h in algebra(), x in quat(), y in quat(), z in quat()) {
        prop_assert_eq!(h.mul(&h.mul(&x, &y), &z), h.mul(&x, &h.mul(&y, &z)));
    }

    #[test]
    fn canonical_form_ignores_generator_order(
        gens in prop::collection::vec(prop::array::uniform4(-6i64..=6), 4..7),
        den in 1i64..=4,
        perm_seed in any::<u64>(),
        mix in prop::array::uniform3(-3i64..=3),
    ) {
        let g: Vec<Quat> = gens.iter().map(|c| Quat::from_frac(*c, den)).collect();
        let Ok(l) = QuatLattice::from_generators(&g) else { return Ok(()) };
        // idempotent on its own basis
        prop_assert_eq!(QuatLattice::from_generators(&l.basis()).unwrap(), l.clone());
        // reversed and rotated generator lists, and a unimodular mix of the first row into others
        let mut r = g.clone();
        r.rotate_left((perm_seed % g.len() as u64) as usize);
        r.reverse();
        let first = r[0].clone();
        for (k, m) in mix.iter().enumerate() {
            let t = r[k + 1].add(&first.scale(&BigRational::from_integer(BigInt::from(*m))));
            r[k + 1] = t;
        }
        prop_assert_eq!(QuatLattice::from_generators(&r).unwrap(), l);
    }
}
