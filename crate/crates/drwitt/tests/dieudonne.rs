use drwitt::derham::{kaehler, RingSpec};
use drwitt::dieudonne::*;
use drwitt::exactcore::{mat_mul, q_int, Fq, InvariantFactors, Lattice, QMat, Ring, Weight};
use drwitt::Error;
use num_bigint::BigInt;
use num_integer::Integer;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn w(n: i64) -> Weight {
    Weight::from_integer(n)
}

fn cyc(p: u64, a: u32, n: usize) -> InvariantFactors {
    InvariantFactors::cyclic(p, a, n)
}

fn strict(spec: &RingSpec, cap: i64, r: u32) -> StrictLevel {
    let lift = lift_with_frobenius(spec, w(cap)).unwrap();
    let sat = saturate(&lift, w(cap), r).unwrap();
    strict_truncate(&sat, r).unwrap()
}

#[test]
fn lift_of_the_line() {
    let m = lift_with_frobenius(&RingSpec::poly(3, &[("x", 1)]), w(4)).unwrap();
    let c = &m.components[&vec![w(2)]];
    assert_eq!(c.masks, vec![vec![0], vec![1]]);
    // d(x^2) = 2 x^2 dlog x
    assert_eq!(c.diffs[0], vec![vec![q_int(2)]]);
    let c0 = &m.components[&vec![w(0)]];
    assert_eq!(c0.dim(1), 0);
    // F(dx) = x^{p-1} dx: the coordinate of x dlog x goes to that of x^p dlog x
    assert_eq!(m.frobenius(&[w(1)], 1).unwrap(), vec![vec![q_int(1)]]);
    assert!(check_dieudonne_identities(&m).unwrap());
}

#[test]
fn quotients_have_no_lift() {
    let s = RingSpec::quotient(3, &[("x", 1)], &["x^2"]).unwrap();
    assert!(matches!(lift_with_frobenius(&s, w(3)), Err(Error::UnsupportedKind(_))));
}

#[test]
fn eta_p_small_cases() {
    let l = vec![Lattice::standard(5, 1)];
    assert_eq!(eta_p(&l, &[]), l);
    let l = vec![Lattice::standard(5, 1), Lattice::standard(5, 1)];
    let d: QMat = vec![vec![q_int(1)]];
    let e = eta_p(&l, &[d]);
    assert_eq!(e[0], Lattice::scaled_standard(5, 1, 1));
    assert_eq!(e[1], Lattice::scaled_standard(5, 1, 1));
}

/// Membership in `η_p` of the lift, by scanning all residues mod `p^2`.
#[test]
fn eta_p_matches_scan() {
    let p = 3u64;
    let pp = (p * p) as i64;
    for spec in [RingSpec::poly(p, &[("x", 1)]), RingSpec::poly(p, &[("x", 1), ("y", 1)])] {
        let m = lift_with_frobenius(&spec, w(if spec.nvars() == 1 { 9 } else { 4 })).unwrap();
        for c in m.components.values() {
            let e = eta_p(&c.lattices, &c.diffs);
            for n in 0..=c.top() {
                let dim = c.dim(n);
                for idx in 0..pp.pow(dim as u32) {
                    let v: Vec<i64> = (0..dim).map(|i| idx / pp.pow(i as u32) % pp).collect();
                    let q: Vec<_> = v.iter().map(|&x| q_int(x)).collect();
                    let pn = (p as i64).pow(n as u32);
                    let mut ok = v.iter().all(|x| x % pn == 0);
                    if n < c.top() {
                        let dv = drwitt::exactcore::q_vec_mul(&q, &c.diffs[n], c.dim(n + 1));
                        ok &= dv.iter().all(|x| {
                            x.is_integer() && x.to_integer().mod_floor(&BigInt::from(pn * p as i64)) == BigInt::from(0)
                        });
                    }
                    assert_eq!(e[n].contains_vec(&q), ok, "{:?} degree {n} vector {v:?}", c.key);
                }
            }
        }
    }
}

#[test]
fn finite_fields_are_their_witt_vectors() {
    for (p, f) in [(2, 1), (3, 1), (2, 2), (3, 2)] {
        let s = RingSpec::finite_field(p, f);
        for r in 1..=3 {
            let st = strict(&s, 0, r);
            assert_eq!(st.group(0, &[]), cyc(p, r, f));
            assert_eq!(st.top(), 0);
        }
    }
    let m = saturate(&lift_with_frobenius(&RingSpec::finite_field(5, 1), w(0)).unwrap(), w(0), 2).unwrap();
    assert!(saturation_criterion(&m).unwrap().iter().all(|e| e.holds));
    assert_eq!(m.verschiebung(&[], 0).unwrap(), vec![vec![q_int(5)]]);
}

#[test]
fn saturation_criterion_on_the_line() {
    let s = RingSpec::poly(2, &[("x", 1)]);
    let m = saturate(&lift_with_frobenius(&s, w(4)).unwrap(), w(4), 3).unwrap();
    let entries = saturation_criterion(&m).unwrap();
    assert!(entries.len() > 20);
    assert!(entries.iter().all(|e| e.holds), "{entries:?}");
    assert!(check_dieudonne_identities(&m).unwrap());
    // V^u x^{p^u k} has valuation u; dV^u is a unit multiple of the form.
    let c = &m.components[&vec![Weight::new(3, 4)]];
    assert_eq!(c.lattices[0], Lattice::scaled_standard(2, 1, 2));
    assert_eq!(c.lattices[1], Lattice::standard(2, 1));
}

#[test]
fn two_variables_saturate() {
    for p in [2, 3] {
        let s = RingSpec::poly(p, &[("x", 1), ("y", 1)]);
        let m = saturate(&lift_with_frobenius(&s, w(2)).unwrap(), w(2), 2).unwrap();
        assert!(saturation_criterion(&m).unwrap().iter().all(|e| e.holds));
        assert!(restriction_check(&m, 2).unwrap());
    }
}

/// Level one is the de Rham complex itself, weight by weight.
#[test]
fn level_one_is_kaehler() {
    for (s, cap) in [
        (RingSpec::poly(3, &[("x", 1)]), 9),
        (RingSpec::poly(2, &[("x", 1), ("y", 1)]), 4),
        (RingSpec::laurent(3, &[("x", 1)]), 6),
        (RingSpec::poly(2, &[("x", 1)]).with_field_degree(2), 4),
    ] {
        let st = strict(&s, cap, 1);
        let dr = kaehler(&s, s.nvars(), w(cap)).unwrap();
        for n in 0..=s.nvars() {
            let mut expect = std::collections::BTreeMap::new();
            for piece in &dr.pieces {
                *expect.entry(piece.weight).or_insert(0) += piece.dim(n);
            }
            let got = st.by_weight(n);
            for (wt, d) in expect {
                assert_eq!(got[&wt], cyc(s.p, 1, d * s.f), "{} degree {n} weight {wt}", s.name());
            }
        }
    }
}

/// Cohomology of `W_rΩ` of the line: `W_r` at weight 0, `Z/p^{min(v(k), r)}`
/// in both degrees at integral `k ≠ 0` (from `d x^k = k x^k dlog x`), and
/// nothing at fractional weights. The torus adds `dlog x` at weight 0.
#[test]
fn cohomology_of_line_and_torus() {
    let p = 3;
    for r in 1..=3 {
        let st = strict(&RingSpec::poly(p, &[("x", 1)]), 9, r);
        for k in st.components.keys() {
            let h0 = st.cohomology(0, k).unwrap();
            let h1 = st.cohomology(1, k).unwrap();
            if k[0] == w(0) {
                assert_eq!(h0, cyc(p, r, 1));
            } else if k[0].is_integer() {
                let mut v = 0;
                let mut n = k[0].to_integer();
                while n % 3 == 0 {
                    n /= 3;
                    v += 1;
                }
                assert_eq!(h0, cyc(p, v.min(r), 1), "{k:?}");
                assert_eq!(h1, cyc(p, v.min(r), 1), "{k:?}");
            } else {
                assert!(h0.is_zero() && h1.is_zero(), "{k:?}");
            }
        }
        assert_eq!(st.group(0, &[w(1)]), cyc(p, r, 1));
        let st = strict(&RingSpec::laurent(p, &[("x", 1)]), 3, r);
        assert_eq!(st.cohomology(1, &[w(0)]).unwrap(), cyc(p, r, 1));
        assert!(st.cohomology(1, &[w(-2)]).unwrap().is_zero());
    }
}

#[test]
fn fractional_weights_have_smaller_groups() {
    let p = 2;
    let st = strict(&RingSpec::poly(p, &[("x", 1)]), 4, 3);
    assert_eq!(st.group(0, &[Weight::new(1, 2)]), cyc(p, 2, 1));
    assert_eq!(st.group(0, &[Weight::new(3, 4)]), cyc(p, 1, 1));
    assert_eq!(st.group(1, &[Weight::new(3, 4)]), cyc(p, 1, 1));
    assert!(!st.components.contains_key(&vec![Weight::new(1, 8)]));
}

#[test]
fn perfections_match_witt_vectors() {
    for (p, f) in [(2, 2), (2, 3), (3, 2)] {
        for r in 1..=3 {
            let rep = perfection_witt_check(&RingSpec::finite_field(p, f), r, w(0)).unwrap();
            assert!(rep.passed(), "F_{}^{f} r={r}", p);
        }
    }
    for p in [2, 3] {
        let s = RingSpec::perfection(RingSpec::poly(p, &[("x", 1)])).unwrap();
        let rep = perfection_witt_check(&s, 2, w(1)).unwrap();
        assert!(rep.passed());
        assert!(rep.entries.iter().any(|e| e.weight == Weight::new(1, p as i64)));
        assert_eq!(rep.entries.len(), (p * p + 1) as usize);
    }
    assert!(perfection_witt_check(&RingSpec::poly(2, &[("x", 1)]), 1, w(1)).is_err());
}

#[test]
fn reduction_mod_p_r_agrees_with_strict_levels() {
    assert!(mod_p_compatibility(&RingSpec::finite_field(3, 1), 2, w(0)).unwrap().passed());
    assert!(mod_p_compatibility(&RingSpec::finite_field(2, 2), 3, w(0)).unwrap().passed());
    let rep = mod_p_compatibility(&RingSpec::poly(2, &[("x", 1)]), 2, w(4)).unwrap();
    assert!(rep.passed());
    assert!(rep.entries.iter().any(|e| e.weight == Weight::new(1, 8)));
    assert!(mod_p_compatibility(&RingSpec::laurent(3, &[("x", 1)]), 2, w(2)).unwrap().passed());
}

#[test]
fn precision_runs_out_with_tiny_budget() {
    // on the plane, degree 1 at (1/3, 1) spans two digits
    let s = RingSpec::poly(3, &[("x", 1), ("y", 1)]);
    let lift = lift_with_frobenius(&s, w(2)).unwrap();
    let e = saturate_with_budget(&lift, w(2), 2, 0);
    assert!(matches!(e, Err(Error::PrecisionExhausted(_))), "{e:?}");
    assert!(saturate_with_budget(&lift, w(2), 2, 1).is_ok());
}

fn sigma_apply(a: &[BigInt], s: &[Vec<BigInt>], ring: Ring) -> Vec<BigInt> {
    mat_mul(ring, &vec![a.to_vec()], &s.to_vec(), a.len(), a.len()).remove(0)
}

#[test]
fn frobenius_on_unramified_witt_vectors() {
    for (p, f, prec) in [(2u64, 2usize, 4u32), (2, 3, 3), (3, 2, 3), (3, 3, 2), (5, 2, 2)] {
        let ring = Ring::ModPrimePower { p, r: prec };
        let s = sigma_matrix(p, f, prec);
        let mut acc: Vec<Vec<BigInt>> = (0..f).map(|i| (0..f).map(|j| BigInt::from((i == j) as i32)).collect()).collect();
        for _ in 0..f {
            acc = mat_mul(ring, &acc, &s, f, f);
        }
        assert!(acc.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, x)| *x == BigInt::from((i == j) as i32))));
        // modulo p it is the Frobenius of F_q
        let k = Fq::new(p, f);
        for j in 0..f {
            let mut e = vec![0u64; f];
            e[j] = 1;
            let img = k.frobenius(&drwitt::exactcore::FqElem(e));
            let row: Vec<u64> = s[j].iter().map(|x| x.mod_floor(&BigInt::from(p)).try_into().unwrap()).collect();
            assert_eq!(row, img.0);
        }
        // and it fixes the Teichmüller basis up to the p-th power
        let tb = teichmuller_basis(p, f, prec);
        if f > 1 {
            let lhs = sigma_apply(&tb[1], &s, ring);
            let mut want = vec![BigInt::from(0); f];
            want[0] = BigInt::from(1);
            for _ in 0..p {
                want = poly_mul(&want, &tb[1], &k.modulus, ring);
            }
            assert_eq!(lhs, want);
        }
    }
}

fn poly_mul(a: &[BigInt], b: &[BigInt], g: &[u64], ring: Ring) -> Vec<BigInt> {
    let f = a.len();
    let mut prod = vec![BigInt::from(0); 2 * f];
    for i in 0..f {
        for j in 0..f {
            prod[i + j] += &a[i] * &b[j];
        }
    }
    for d in (f..2 * f).rev() {
        let lead = prod[d].clone();
        for i in 0..f {
            prod[d - f + i] -= &lead * BigInt::from(g[i]);
        }
    }
    prod.truncate(f);
    prod.iter().map(|x| ring.reduce(x)).collect()
}

#[test]
fn sigma_is_multiplicative() {
    let (p, f, prec) = (3u64, 2usize, 3u32);
    let ring = Ring::ModPrimePower { p, r: prec };
    let g = Fq::new(p, f).modulus;
    let s = sigma_matrix(p, f, prec);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..30 {
        let a: Vec<BigInt> = (0..f).map(|_| BigInt::from(rng.gen_range(0..27))).collect();
        let b: Vec<BigInt> = (0..f).map(|_| BigInt::from(rng.gen_range(0..27))).collect();
        let lhs = sigma_apply(&poly_mul(&a, &b, &g, ring), &s, ring);
        let rhs = poly_mul(&sigma_apply(&a, &s, ring), &sigma_apply(&b, &s, ring), &g, ring);
        assert_eq!(lhs, rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// At a random multidegree of the plane: the criterion holds, `V = p F^{-1}`
    /// lands inside, and raising the budget changes nothing.
    #[test]
    fn saturated_components_are_stable(p in prop::sample::select(vec![2u64, 3]), a in 0i64..9, b in 0i64..9, u in 0u32..3) {
        let den = (p as i64).pow(u);
        let k = vec![Weight::new(a, den), Weight::new(b, den)];
        let inv = [false, false];
        let c = saturated_component(p, &inv, 2, &k, 6).unwrap();
        let pk = scale_key(&k, p as i64);
        let t = saturated_component(p, &inv, 2, &pk, 6).unwrap();
        for n in 0..=2 {
            prop_assert!(c.lattices[n].contains(&t.lattices[n].scale(1)));
            prop_assert!(t.lattices[n].contains(&c.lattices[n]));
        }
        let hi = saturated_component(p, &inv, 2, &k, 7).unwrap();
        prop_assert_eq!(&hi.lattices, &c.lattices);
    }
}
