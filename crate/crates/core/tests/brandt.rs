use num_rational::BigRational;
use quatlift::brandt::*;
use quatlift::ideals::*;
use quatlift::linalg::{self, QMat};
use quatlift::qalg::maximal_order;

fn setup(p: u64) -> (ClassSet, TildeClassSet) {
    let (_, o) = maximal_order(p).unwrap();
    let cs = class_set(&o, p).unwrap();
    let t = suborder_tilde(&o, p).unwrap();
    let ts = tilde_class_set(&cs, &t, p).unwrap();
    (cs, ts)
}

fn ints(m: &[Vec<i64>]) -> QMat {
    m.iter().map(|r| linalg::to_q(r)).collect()
}

#[test]
fn identity_and_row_sums() {
    for p in [7u64, 11] {
        let (cs, ts) = setup(p);
        for set in [&cs, &ts.classes] {
            let bs = BrandtSeries::new(set, 12).unwrap();
            assert_eq!(bs.matrix(1).unwrap(), linalg::identity(bs.len()));
            for q in [2u64, 3, 5] {
                for row in bs.matrix_int(q).unwrap() {
                    assert_eq!(row.iter().sum::<i64>(), q as i64 + 1, "p={p} q={q}");
                }
            }
        }
    }
}

#[test]
fn hecke_algebra_relations() {
    let (cs, ts) = setup(11);
    for set in [&cs, &ts.classes] {
        let bs = BrandtSeries::new(set, 12).unwrap();
        let b = |m| bs.matrix(m).unwrap();
        for m in 1..=10u64 {
            for n in 1..=10u64 {
                if m % 11 != 0 && n % 11 != 0 {
                    assert_eq!(linalg::mat_mul(&b(m), &b(n)), linalg::mat_mul(&b(n), &b(m)));
                }
            }
        }
        assert_eq!(linalg::mat_mul(&b(2), &b(3)), b(6));
        assert_eq!(linalg::mat_mul(&b(2), &b(5)), b(10));
        // B_4 = B_2^2 - 2 B_1
        let mut rhs = linalg::mat_mul(&b(2), &b(2));
        for (i, row) in rhs.iter_mut().enumerate() {
            row[i] -= BigRational::from_integer(2.into());
        }
        assert_eq!(rhs, b(4));
        // r_ij symmetric: B(i,j) u_j = B(j,i) u_i
        for m in 1..=12 {
            let bi = bs.matrix_int(m).unwrap();
            for i in 0..bs.len() {
                for j in 0..bs.len() {
                    assert_eq!(bi[i][j] * bs.units[j] as i64, bi[j][i] * bs.units[i] as i64);
                }
            }
        }
    }
}

#[test]
fn psi_intertwines_hecke() {
    for p in [7u64, 11] {
        let (cs, ts) = setup(p);
        let bo = BrandtSeries::new(&cs, 10).unwrap();
        let bt = BrandtSeries::new(&ts.classes, 10).unwrap();
        let psi = ints(&ts.psi);
        for m in 1..=10u64 {
            if m % p == 0 {
                continue;
            }
            let l = linalg::mat_mul(&bo.matrix(m).unwrap(), &psi);
            let r = linalg::mat_mul(&psi, &bt.matrix(m).unwrap());
            assert_eq!(l, r, "p={p} m={m}");
        }
        let e = eisenstein(&bt);
        let v = phi_apply(&ts.chi, &phi_apply(&ts.chi, &e));
        assert_eq!(v, e);
    }
}

#[test]
fn level_eleven_b2() {
    let (cs, _) = setup(11);
    let bs = BrandtSeries::new(&cs, 4).unwrap();
    let comps = isotypical(&bs, &[2, 3]).unwrap();
    let mut ev: Vec<i64> = comps.iter().map(|c| c.eigenvalue(2).unwrap()).collect();
    ev.sort();
    assert_eq!(ev, vec![-2, 3]);
}

// Count the 2-neighbours of each class representative by class, independent of
// the theta-series route through norm counts.
#[test]
fn b2_matches_neighbour_count() {
    for p in [11u64, 17, 19] {
        let (cs, _) = setup(p);
        let h = cs.len();
        let mut n = vec![vec![0i64; h]; h];
        for (i, a) in cs.reps.iter().enumerate() {
            let nb = neighbours(a, 2);
            assert_eq!(nb.len(), 3);
            for b in nb {
                n[i][cs.class_of(&b).unwrap()] += 1;
            }
        }
        let b2 = BrandtSeries::new(&cs, 2).unwrap().matrix_int(2).unwrap();
        let nt: Vec<Vec<i64>> = (0..h).map(|i| (0..h).map(|j| n[j][i]).collect()).collect();
        assert!(b2 == n || b2 == nt, "p={p} {b2:?} vs {n:?}");
    }
}

#[test]
fn labelled_components() {
    let dims = |p: u64| {
        let (cs, ts) = setup(p);
        let probes = probe_primes(p, 5);
        let bo = BrandtSeries::new(&cs, 24).unwrap();
        let bt = BrandtSeries::new(&ts.classes, 24).unwrap();
        let mut mo = isotypical(&bo, &probes).unwrap();
        label_maximal(&mut mo, p);
        let mut mt = isotypical(&bt, &probes).unwrap();
        classify(&mut mt, &mo, p);
        for c in &mt {
            c.check_eigen(&bt, p).unwrap();
        }
        let mut v: Vec<(String, usize)> =
            mt.into_iter().filter(|c| c.kind != FormKind::Eisenstein).map(|c| (c.label.clone(), c.dim())).collect();
        v.sort();
        v
    };
    let s = |v: &[(&str, usize)]| v.iter().map(|(a, b)| (a.to_string(), *b)).collect::<Vec<_>>();
    assert_eq!(dims(7), s(&[("49A", 2)]));
    assert_eq!(dims(11), s(&[("11A", 1), ("121A", 2), ("121B", 2), ("121C", 2), ("121D", 1)]));
    assert_eq!(dims(19), s(&[("19A", 1), ("361A", 2), ("361B", 1)]));
}

#[test]
fn components_are_height_orthogonal() {
    for p in [11u64, 19] {
        let (cs, ts) = setup(p);
        let probes = probe_primes(p, 5);
        for set in [&cs, &ts.classes] {
            let bs = BrandtSeries::new(set, 24).unwrap();
            let comps = isotypical(&bs, &probes).unwrap();
            assert!(comps.iter().map(|c| c.dim()).sum::<usize>() <= set.len());
            for (a, ca) in comps.iter().enumerate() {
                for cb in &comps[a + 1..] {
                    for v in &ca.basis {
                        for w in &cb.basis {
                            assert_eq!(height(set, v, w), BigRational::from_integer(0.into()));
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn eleven_a_eigenvector() {
    let (cs, _) = setup(11);
    let bs = BrandtSeries::new(&cs, 24).unwrap();
    let comps = isotypical(&bs, &probe_primes(11, 5)).unwrap();
    let e = comps.iter().find(|c| c.kind != FormKind::Eisenstein).unwrap();
    let v = &e.basis[0];
    let t2 = hecke_apply(&bs, 2, v).unwrap();
    let expect: Vec<BigRational> = v.iter().map(|x| x * BigRational::from_integer((-2).into())).collect();
    assert_eq!(t2, expect);
    // orthogonal to the Eisenstein vector
    assert_eq!(height(&cs, v, &eisenstein(&bs)), BigRational::from_integer(0.into()));
    assert_eq!(label_for(11, &e.eigenvalues), Some("11A"));
}

#[test]
fn seventeen_splits_into_old_twist_and_eisenstein() {
    let (cs, ts) = setup(17);
    let probes = probe_primes(17, 5);
    let bo = BrandtSeries::new(&cs, 24).unwrap();
    let bt = BrandtSeries::new(&ts.classes, 24).unwrap();
    let mut mo = isotypical(&bo, &probes).unwrap();
    label_maximal(&mut mo, 17);
    let mut mt = isotypical(&bt, &probes).unwrap();
    classify(&mut mt, &mo, 17);
    let find = |l: &str| mt.iter().find(|c| c.label == l).unwrap();
    assert_eq!((find("17A").kind, find("17A").dim()), (FormKind::LevelP, 1));
    assert_eq!((find("289A").kind, find("289A").dim()), (FormKind::TwistOfLevelP, 1));
    let eis: Vec<&Eigencomponent> = mt.iter().filter(|c| c.kind == FormKind::Eisenstein).collect();
    assert_eq!(eis.len(), 2);
    // the remaining space consists of forms with no rational eigenspace
    let rational: usize = mt.iter().map(|c| c.dim()).sum();
    assert!(rational < ts.classes.len());
    assert!(is_twist(find("289A"), mo.iter().find(|c| c.label == "17A").unwrap(), 17));
}

mod relations {
    use super::*;
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn series() -> &'static BrandtSeries {
        static CELL: OnceLock<BrandtSeries> = OnceLock::new();
        CELL.get_or_init(|| {
            let (_, ts) = setup(11);
            BrandtSeries::new(&ts.classes, 100).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        // t_m t_n = sum over d | (m, n) of d t_{mn/d^2}, for m, n prime to the level
        #[test]
        fn hecke_multiplicativity(m in 1u64..=10, n in 1u64..=10) {
            prop_assume!(m % 11 != 0 && n % 11 != 0);
            let bs = series();
            let lhs = linalg::mat_mul(&bs.matrix(m).unwrap(), &bs.matrix(n).unwrap());
            let h = bs.len();
            let mut rhs = vec![vec![BigRational::from_integer(0.into()); h]; h];
            let g = num_integer::gcd(m, n);
            for d in (1..=g).filter(|d| g % d == 0) {
                let b = bs.matrix(m * n / (d * d)).unwrap();
                for i in 0..h {
                    for j in 0..h {
                        rhs[i][j] += &b[i][j] * BigRational::from_integer((d as i64).into());
                    }
                }
            }
            prop_assert_eq!(lhs, rhs);
        }
    }
}
