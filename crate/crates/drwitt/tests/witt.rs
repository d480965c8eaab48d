use drwitt::exactcore::InvariantFactors;
use drwitt::witt::*;
use drwitt::Error;
use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bi(x: i64) -> BigInt {
    BigInt::from(x)
}

#[test]
fn low_depth_sum_polynomials() {
    for p in [2u64, 3, 5, 7] {
        let law = synthesize_law(p, 1).unwrap();
        assert_eq!(law.sum[0], IntPoly::x(0).add(&IntPoly::y(0)));
    }
    let s1 = &synthesize_law(2, 1).unwrap().sum[1];
    let expect = IntPoly::x(1).add(&IntPoly::y(1)).sub(&IntPoly::x(0).mul(&IntPoly::y(0)));
    assert_eq!(*s1, expect);
    let s1 = &synthesize_law(3, 1).unwrap().sum[1];
    let x0 = IntPoly::x(0);
    let y0 = IntPoly::y(0);
    let expect = IntPoly::x(1)
        .add(&IntPoly::y(1))
        .sub(&x0.mul(&x0).mul(&y0))
        .sub(&x0.mul(&y0).mul(&y0));
    assert_eq!(*s1, expect);
}

#[test]
fn depth_cap_and_length_mismatch() {
    assert!(matches!(synthesize_law(2, depth_cap() + 1), Err(Error::DepthCap { .. })));
    let k = MonomialAlgebra::finite_field(3, 1);
    let a = one(&k, 2);
    let b = one(&k, 3);
    assert!(matches!(witt_add(&k, 3, &a, &b), Err(Error::LengthMismatch { left: 2, right: 3 })));
}

#[test]
fn one_plus_one_in_w2_f2_is_v1() {
    let k = MonomialAlgebra::finite_field(2, 1);
    let s = witt_add(&k, 2, &one(&k, 2), &one(&k, 2)).unwrap();
    assert_eq!(s, WittVector::new(vec![k.zero(), k.one()]));
    assert_eq!(s, verschiebung(&k, &one(&k, 1)));
}

#[test]
fn teichmuller_is_multiplicative_in_f9() {
    let k = MonomialAlgebra::finite_field(3, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..30 {
        let a = k.scalar(k.field.element(rng.gen_range(0..9)));
        let b = k.scalar(k.field.element(rng.gen_range(0..9)));
        let lhs = witt_mul(&k, 3, &teichmuller(&k, &a, 3), &teichmuller(&k, &b, 3)).unwrap();
        assert_eq!(lhs, teichmuller(&k, &k.mul(&a, &b), 3));
    }
}

/// Teichmuller representative of `c` in `Z/p^r`.
fn teich_int(c: u64, p: u64, r: u32) -> u64 {
    let m = p.pow(r);
    let mut x = c % m;
    for _ in 0..r + 1 {
        let mut y = 1;
        for _ in 0..p {
            y = y * x % m;
        }
        x = y;
    }
    x
}

#[test]
fn w3_f3_addition_table_is_z27() {
    let (p, r) = (3u64, 3u32);
    let k = MonomialAlgebra::finite_field(p, 1);
    let elems: Vec<Vec<u64>> = (0..27).map(|i| vec![i % 3, (i / 3) % 3, i / 9]).collect();
    let to_w = |d: &Vec<u64>| WittVector::new(d.iter().map(|&c| k.from_int(&bi(c as i64))).collect());
    let to_z = |d: &Vec<u64>| -> u64 {
        d.iter().enumerate().map(|(s, &c)| p.pow(s as u32) * teich_int(c, p, r)).sum::<u64>() % 27
    };
    let images: std::collections::HashSet<u64> = elems.iter().map(to_z).collect();
    assert_eq!(images.len(), 27);
    for a in &elems {
        for b in &elems {
            let s = witt_add(&k, p, &to_w(a), &to_w(b)).unwrap();
            let digits: Vec<u64> = s
                .comps
                .iter()
                .map(|c| c.values().next().map_or(0, |e| e.0[0]))
                .collect();
            assert_eq!(to_z(&digits), (to_z(a) + to_z(b)) % 27);
        }
    }
}

#[test]
fn ghost_is_a_ring_homomorphism_over_z() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let p = [2u64, 3, 5][rng.gen_range(0..3)];
        let r = rng.gen_range(1..=if p == 5 { 3 } else { 4 });
        let a = WittVector::new((0..r).map(|_| bi(rng.gen_range(-9..10))).collect());
        let b = WittVector::new((0..r).map(|_| bi(rng.gen_range(-9..10))).collect());
        let ga = ghost(&Integers, p, &a).unwrap();
        let gb = ghost(&Integers, p, &b).unwrap();
        let gs = ghost(&Integers, p, &witt_add(&Integers, p, &a, &b).unwrap()).unwrap();
        let gm = ghost(&Integers, p, &witt_mul(&Integers, p, &a, &b).unwrap()).unwrap();
        for n in 0..r {
            assert_eq!(gs[n], &ga[n] + &gb[n]);
            assert_eq!(gm[n], &ga[n] * &gb[n]);
        }
    }
}

#[test]
fn ghost_examples_and_errors() {
    let p = 3;
    let t = teichmuller(&Integers, &bi(2), 3);
    assert_eq!(ghost(&Integers, p, &t).unwrap(), vec![bi(2), bi(8), bi(512)]);
    let x = WittVector::new(vec![bi(4), bi(-1)]);
    let gv = ghost(&Integers, p, &verschiebung(&Integers, &x)).unwrap();
    let gx = ghost(&Integers, p, &x).unwrap();
    assert!(gv[0].is_zero());
    assert_eq!(gv[1], &gx[0] * 3);
    assert_eq!(gv[2], &gx[1] * 3);
    let k = MonomialAlgebra::finite_field(3, 1);
    assert_eq!(ghost(&k, 3, &one(&k, 2)), Err(Error::TorsionCoefficients));
}

#[test]
fn frobenius_examples() {
    let k = MonomialAlgebra::finite_field(3, 1);
    let v1 = WittVector::new(vec![k.zero(), k.one()]);
    assert_eq!(frobenius(&k, 3, &v1).unwrap(), zero(&k, 1));
    assert!(matches!(frobenius(&k, 3, &one(&k, 1)), Err(Error::LengthUnderflow { .. })));
    for p in [2u64, 3, 5] {
        let a = MonomialAlgebra::polynomial(p, 1, &[("x", 1)], None);
        let x = teichmuller(&a, &a.var(0), 2);
        let xp = teichmuller(&a, &a.pow(&a.var(0), p), 1);
        assert_eq!(frobenius(&a, p, &x).unwrap(), xp);
    }
}

#[test]
fn frobenius_fast_path_matches_universal_law() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..50 {
        let p = [2u64, 3][rng.gen_range(0..2)];
        let a = MonomialAlgebra::polynomial(p, 1, &[("x", 1)], Some(12.into()));
        let r = rng.gen_range(2..=3);
        let v = WittVector::new((0..r).map(|_| a.random(&mut rng, 2, 2)).collect());
        assert_eq!(frobenius(&a, p, &v).unwrap(), frobenius_universal(&a, p, &v).unwrap());
    }
}

#[test]
fn verschiebung_is_additive_in_w3_f5() {
    let k = MonomialAlgebra::finite_field(5, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..50 {
        let a = WittVector::new((0..3).map(|_| k.random(&mut rng, 1, 0)).collect());
        let b = WittVector::new((0..3).map(|_| k.random(&mut rng, 1, 0)).collect());
        let lhs = verschiebung(&k, &witt_add(&k, 5, &a, &b).unwrap());
        let rhs = witt_add(&k, 5, &verschiebung(&k, &a), &verschiebung(&k, &b)).unwrap();
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn projection_formula_in_w2_f2x() {
    let a = MonomialAlgebra::polynomial(2, 1, &[("x", 1)], Some(6.into()));
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..50 {
        let x = WittVector::new((0..2).map(|_| a.random(&mut rng, 2, 2)).collect());
        let y = WittVector::new(vec![a.random(&mut rng, 2, 2)]);
        let lhs = witt_mul(&a, 2, &x, &verschiebung(&a, &y)).unwrap();
        let fx = frobenius(&a, 2, &x).unwrap();
        let rhs = verschiebung(&a, &witt_mul(&a, 2, &fx, &y).unwrap());
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn fv_and_vf_are_multiplication_by_p() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for p in [2u64, 3] {
        let a = MonomialAlgebra::polynomial(p, 1, &[("x", 1)], Some(9.into()));
        for _ in 0..15 {
            let r = 3;
            let v = WittVector::new((0..r).map(|_| a.random(&mut rng, 2, 1)).collect());
            let pv = witt_scale(&a, p, p, &v).unwrap();
            let fv = frobenius(&a, p, &verschiebung(&a, &v)).unwrap();
            let vf = verschiebung(&a, &frobenius(&a, p, &v).unwrap());
            assert_eq!(fv, pv);
            assert_eq!(vf, pv);
        }
        let k = MonomialAlgebra::finite_field(p, 1);
        assert_eq!(witt_scale(&k, p, p, &one(&k, 2)).unwrap(), verschiebung(&k, &one(&k, 1)));
    }
}

#[test]
fn restriction_identities() {
    let k = MonomialAlgebra::finite_field(2, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..50 {
        let c = k.random(&mut rng, 1, 0);
        assert_eq!(restriction(&teichmuller(&k, &c, 3)).unwrap(), teichmuller(&k, &c, 2));
        let x = WittVector::new((0..2).map(|_| k.random(&mut rng, 1, 0)).collect());
        assert_eq!(restriction(&verschiebung(&k, &x)).unwrap(), verschiebung(&k, &restriction(&x).unwrap()));
        let mut padded = x.comps.clone();
        padded.push(k.zero());
        assert_eq!(restriction(&WittVector::new(padded)).unwrap(), x);
    }
}

#[test]
fn additive_group_of_w_r_fp_is_cyclic() {
    for (p, rmax) in [(2u64, 4usize), (3, 3), (5, 2)] {
        for r in 1..=rmax {
            assert_eq!(additive_invariants_fq(p, 1, r).unwrap(), InvariantFactors::cyclic(p, r as u32, 1));
        }
    }
    assert_eq!(additive_invariants_fq(2, 2, 2).unwrap(), InvariantFactors::cyclic(2, 2, 2));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]
    #[test]
    fn ring_axioms_in_w3_f4(seed in 0u64..10_000) {
        let k = MonomialAlgebra::finite_field(2, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v = || WittVector::new((0..3).map(|_| k.random(&mut rng, 1, 0)).collect());
        let (a, b, c) = (v(), v(), v());
        let ab = witt_add(&k, 2, &a, &b).unwrap();
        prop_assert_eq!(ab.clone(), witt_add(&k, 2, &b, &a).unwrap());
        let lhs = witt_mul(&k, 2, &ab, &c).unwrap();
        let rhs = witt_add(&k, 2, &witt_mul(&k, 2, &a, &c).unwrap(), &witt_mul(&k, 2, &b, &c).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        let z = witt_add(&k, 2, &a, &witt_neg(&k, 2, &a).unwrap()).unwrap();
        prop_assert_eq!(z, zero(&k, 3));
        prop_assert_eq!(witt_mul(&k, 2, &a, &one(&k, 3)).unwrap(), a.clone());
    }

    #[test]
    fn teichmuller_ghost_is_diagonal(a in -50i64..50, p in prop::sample::select(vec![2u64, 3, 5])) {
        let g = ghost(&Integers, p, &teichmuller(&Integers, &bi(a), 3)).unwrap();
        prop_assert_eq!(g[1].clone(), num_traits::pow(bi(a), p as usize));
        prop_assert_eq!(g[2].clone(), num_traits::pow(bi(a), (p * p) as usize));
        prop_assert_eq!(g[0].clone(), bi(a));
    }
}
