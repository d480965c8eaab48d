use drwitt::derham::RingSpec;
use drwitt::exactcore::InvariantFactors;
use drwitt::kpredict::*;
use drwitt::Error;
use num_bigint::BigInt;
use proptest::prelude::*;

fn x() -> Vec<(&'static str, i64)> {
    vec![("x", 1)]
}

#[test]
fn quillen_rows_for_f_p() {
    for p in [2u64, 3, 5] {
        for r in 1..=3 {
            let t = quillen_table(p, 1, 0..=6, r);
            assert_eq!(t.row(0, Modulus::PPower(r)).unwrap().group, InvariantFactors::cyclic(p, r, 1));
            assert_eq!(t.row(0, Modulus::PAdic).unwrap().group, InvariantFactors::new(p, vec![], 1));
            for i in 1..=6 {
                assert!(t.row(i, Modulus::PPower(r)).unwrap().group.is_zero(), "K_{i}(F_{p})/{p}^{r}");
                assert!(t.row(i, Modulus::PAdic).unwrap().group.is_zero());
            }
        }
    }
    let t = quillen_table(3, 1, 0..=5, 1);
    let k3 = t.row(3, Modulus::PPower(1)).unwrap();
    assert_eq!(k3.integral.as_ref().unwrap().text(), "Z/8");
    assert_eq!(k3.provenance, Provenance::Quillen);
    assert_eq!(t.row(5, Modulus::PAdic).unwrap().integral.as_ref().unwrap().text(), "Z/26");
}

#[test]
fn quillen_rows_for_f_q_are_background() {
    let t = quillen_table(2, 2, 0..=3, 2);
    assert_eq!(t.ring, "F_4");
    assert!(t.rows.iter().all(|r| r.provenance == Provenance::Background));
    assert_eq!(t.row(3, Modulus::PAdic).unwrap().integral.as_ref().unwrap().text(), "Z/15");
    assert_eq!(prime_to_p_order(2, 2, 3), BigInt::from(15));
    assert_eq!(prime_to_p_order(3, 1, 1), BigInt::from(2));
}

#[test]
fn mixed_torsion_splits_by_valuation() {
    // Z/12 at p = 2: tensor Z/2^min(2,r), and Z/12[2^r] the same
    let g = IntegralGroup { free_rank: 1, orders: vec![BigInt::from(12)] };
    assert_eq!(g.tensor(2, 1), InvariantFactors::cyclic(2, 1, 2));
    assert_eq!(g.tensor(2, 3), InvariantFactors::new(2, vec![2, 3], 0));
    assert_eq!(g.torsion(2, 3), InvariantFactors::cyclic(2, 2, 1));
    assert_eq!(g.complete(2), InvariantFactors::new(2, vec![2], 1));
    assert_eq!(g.complete(5), InvariantFactors::new(5, vec![], 1));
}

#[test]
fn log_forms_agree_with_quillen_on_finite_fields() {
    for (p, f) in [(2u64, 1usize), (3, 1), (2, 2), (5, 1)] {
        let spec = RingSpec::finite_field(p, f);
        for r in 1..=2 {
            let k = k_predict(&spec, 0..=3, r).unwrap();
            let q = quillen_table(p, f, 0..=3, r);
            assert!(!k.sheaf_caveat);
            for i in 0..=3 {
                for m in [Modulus::PPower(r), Modulus::PAdic] {
                    assert_eq!(k.row(i, m).unwrap().group, q.row(i, m).unwrap().group, "F_{p}^{f} K_{i} {m:?}");
                }
            }
        }
    }
}

#[test]
fn triangle_closes_for_f_p() {
    for p in [2u64, 3] {
        for r in 1..=2 {
            for e in consistency_triangle(p, 0..=3, r).unwrap() {
                assert!(e.agrees(), "{e:?}");
            }
        }
    }
}

#[test]
fn laurent_rows_count_units() {
    let one = k_predict(&RingSpec::laurent(3, &x()), 0..=2, 2).unwrap();
    assert!(one.sheaf_caveat);
    assert_eq!(one.row(1, Modulus::PPower(2)).unwrap().group, InvariantFactors::cyclic(3, 2, 1));
    assert_eq!(one.row(1, Modulus::PAdic).unwrap().group, InvariantFactors::new(3, vec![], 1));
    assert!(one.row(2, Modulus::PPower(2)).unwrap().group.is_zero());

    let two = k_predict(&RingSpec::laurent(2, &[("x", 1), ("y", 1)]), 0..=3, 2).unwrap();
    assert_eq!(two.row(1, Modulus::PAdic).unwrap().group.free_rank, 2);
    assert_eq!(two.row(2, Modulus::PAdic).unwrap().group.free_rank, 1);
    assert!(two.row(3, Modulus::PAdic).unwrap().group.is_zero());
    assert!(two.rows.iter().all(|r| r.stable));
}

#[test]
fn polynomial_rings_carry_the_caveat() {
    let t = k_predict(&RingSpec::poly(2, &x()), 0..=2, 2).unwrap();
    assert!(t.sheaf_caveat);
    assert!(t.to_markdown().contains("not local"));
    assert_eq!(t.to_json()["sheaf_level_caveat"], true);
}

#[test]
fn quotients_are_refused() {
    let q = RingSpec::quotient(2, &[("x", 1), ("y", 1)], &["x*y"]).unwrap();
    assert!(matches!(k_predict(&q, 0..=1, 1), Err(Error::NotLocalType(_))));
}

#[test]
fn perfect_rings_vanish_above_degree_zero() {
    let rings = [
        RingSpec::finite_field(3, 2),
        RingSpec::perfection(RingSpec::poly(2, &x())).unwrap(),
        RingSpec::perfection(RingSpec::laurent(2, &x())).unwrap(),
        RingSpec::perfection(RingSpec::laurent(3, &x())).unwrap(),
    ];
    for s in &rings {
        assert!(hiller_check(s, 0..=3, 2).unwrap(), "{}", s.name());
        let t = hiller_table(s, 0..=2, 2).unwrap();
        assert!(t.rows.iter().filter(|r| r.degree >= 1).all(|r| r.provenance == Provenance::Hiller));
        assert!(!t.sheaf_caveat);
    }
    // the unperfected torus keeps dlog x
    assert!(matches!(
        hiller_check(&RingSpec::laurent(2, &x()), 0..=1, 1),
        Err(Error::UnsupportedKind(_))
    ));
}

#[test]
fn table_json_shape() {
    let t = quillen_table(2, 1, 0..=1, 3);
    let v = t.to_json();
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
    assert_eq!(v["rows"][0]["modulus"], "p^3");
    assert_eq!(v["rows"][1]["modulus"], "Z_p");
    assert_eq!(v["rows"][0]["provenance"], "quillen");
    assert_eq!(v["rows"][0]["text"], "Z/2^3");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // K_{2j-1}(F_q) is prime to p, so every positive row vanishes
    #[test]
    fn quillen_positive_rows_vanish(p in prop::sample::select(vec![2u64, 3, 5, 7]), f in 1usize..4, r in 1u32..5, i in 1usize..12) {
        let t = quillen_table(p, f, i..=i, r);
        prop_assert!(t.row(i, Modulus::PPower(r)).unwrap().group.is_zero());
        let order = prime_to_p_order(p, f, i);
        let integral = quillen_integral(&BigInt::from(p).pow(f as u32), i);
        let total: BigInt = integral.orders.iter().product();
        prop_assert_eq!(order, total);
    }

    #[test]
    fn mod_p_power_rows_truncate(p in prop::sample::select(vec![2u64, 3]), n in 1u64..500, free in 0usize..3, r in 1u32..4) {
        let g = IntegralGroup { free_rank: free, orders: vec![BigInt::from(n)] };
        let hi = g.tensor(p, r + 1);
        let lo = g.tensor(p, r);
        let cut = InvariantFactors::new(p, hi.torsion.iter().map(|&a| a.min(r)).collect(), 0);
        prop_assert_eq!(cut, lo);
    }
}
