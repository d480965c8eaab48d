//! Brute-force oracle for filtered complexes: everything by listing elements.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashSet};

use drwitt::exactcore::{FinModPresentation, InvariantFactors, Mat, Ring};
use drwitt::filtspec::{FilteredComplex, PresentedComplex};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

type V = Vec<u64>;

fn all_vectors(g: usize, q: u64) -> Vec<V> {
    let mut out = vec![vec![]];
    for _ in 0..g {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..q).map(move |a| {
                    let mut w = v.clone();
                    w.push(a);
                    w
                })
            })
            .collect();
    }
    out
}

fn small(m: &Mat, q: u64) -> Vec<Vec<u64>> {
    m.iter()
        .map(|r| r.iter().map(|x| x.to_i64().unwrap().rem_euclid(q as i64) as u64).collect())
        .collect()
}

fn apply(v: &[u64], m: &[Vec<u64>], cols: usize, q: u64) -> V {
    let mut out = vec![0; cols];
    for (i, &a) in v.iter().enumerate() {
        if a == 0 {
            continue;
        }
        for j in 0..cols {
            out[j] = (out[j] + a * m[i][j]) % q;
        }
    }
    out
}

fn add(a: &[u64], b: &[u64], q: u64) -> V {
    a.iter().zip(b).map(|(x, y)| (x + y) % q).collect()
}

/// Subgroup generated by `gens` inside `(Z/q)^g`.
fn span(gens: &[V], g: usize, q: u64) -> HashSet<V> {
    let mut s: HashSet<V> = HashSet::from([vec![0; g]]);
    for v in gens {
        if s.contains(v) {
            continue;
        }
        let mut next = HashSet::new();
        let mut mult = vec![0; g];
        for _ in 0..q {
            for x in &s {
                next.insert(add(x, &mult, q));
            }
            mult = add(&mult, v, q);
        }
        s = next;
    }
    s
}

fn sum(a: &HashSet<V>, b: &[V], g: usize, q: u64) -> HashSet<V> {
    // a is already a group; adding b one generator at a time keeps this small
    let mut s = a.clone();
    for v in b {
        if s.contains(v) {
            continue;
        }
        let mut next = HashSet::new();
        let mut mult = vec![0; g];
        for _ in 0..q {
            for x in &s {
                next.insert(add(x, &mult, q));
            }
            mult = add(&mult, v, q);
        }
        s = next;
    }
    s
}

fn quotient_invariants(a: &HashSet<V>, den: &HashSet<V>, p: u64, r: u32) -> InvariantFactors {
    let q = p.pow(r);
    let counts: Vec<u64> = (0..=r)
        .map(|j| {
            let s = p.pow(j) % q;
            let n = a
                .iter()
                .filter(|x| den.contains(&x.iter().map(|c| c * s % q).collect::<V>()))
                .count() as u64;
            n / den.len() as u64
        })
        .collect();
    InvariantFactors::from_torsion_counts(p, &counts)
}

struct Level {
    gens: Vec<usize>,
    rels: Vec<Vec<V>>,
    diffs: Vec<Vec<Vec<u64>>>,
}

fn level(c: &PresentedComplex, q: u64) -> Level {
    Level {
        gens: c.modules.iter().map(|m| m.gens).collect(),
        rels: c.modules.iter().map(|m| small(&m.rels, q)).collect(),
        diffs: c.diffs.iter().map(|d| small(d, q)).collect(),
    }
}

/// `gr^p H^m(F^{≥lo})` for the filtration by images of `H(F^{≥p})`, keyed
/// by `(m, p)`.
pub fn homology_filtration_oracle(f: &FilteredComplex) -> BTreeMap<(i64, i64), InvariantFactors> {
    let (p, r) = match f.ring {
        Ring::ModPrimePower { p, r } => (p, r),
        Ring::Integers { .. } => panic!("oracle needs Z/p^R"),
    };
    let q = p.pow(r);
    let levels: Vec<Level> = f.levels.iter().map(|c| level(c, q)).collect();
    let trans: Vec<Vec<Vec<Vec<u64>>>> = f
        .transitions
        .iter()
        .map(|t| t.iter().map(|m| small(m, q)).collect())
        .collect();
    let base = &levels[0];
    let lo_c = f.lo_c();
    let ndeg = base.gens.len();
    let mut out = BTreeMap::new();
    for k in 0..ndeg {
        let g0 = base.gens[k];
        // boundaries plus relations
        let mut bd: Vec<V> = base.rels[k].clone();
        if k > 0 {
            bd.extend(base.diffs[k - 1].iter().cloned());
        }
        let b = span(&bd, g0, q);
        // image of the cycles of each level
        let mut images = vec![];
        for (j, lev) in levels.iter().enumerate() {
            let g = lev.gens[k];
            let next_rel = if k + 1 < ndeg {
                Some(span(&lev.rels[k + 1], lev.gens[k + 1], q))
            } else {
                None
            };
            let cycles: Vec<V> = all_vectors(g, q)
                .into_iter()
                .filter(|x| match &next_rel {
                    Some(rel) => rel.contains(&apply(x, &lev.diffs[k], lev.gens[k + 1], q)),
                    None => true,
                })
                .collect();
            let mut imgs: Vec<V> = cycles;
            for i in (0..j).rev() {
                let cols = levels[i].gens[k];
                imgs = imgs.iter().map(|x| apply(x, &trans[i][k], cols, q)).collect();
            }
            let mut s = HashSet::new();
            for x in imgs {
                s.insert(x);
            }
            let v: Vec<V> = s.into_iter().collect();
            images.push(sum(&b, &v, g0, q));
        }
        let (lo, hi) = f.window;
        for pp in lo..=hi {
            let j = (pp - lo) as usize;
            let den = if pp == hi { b.clone() } else { images[j + 1].clone() };
            out.insert((lo_c + k as i64, pp), quotient_invariants(&images[j], &den, p, r));
        }
    }
    out
}

fn rand_mat(rng: &mut ChaCha8Rng, rows: usize, cols: usize, q: u64) -> Mat {
    (0..rows)
        .map(|_| (0..cols).map(|_| BigInt::from(rng.gen_range(0..q))).collect())
        .collect()
}

/// A random free complex `C^0 -> C^1 -> C^2` of ranks at most `max_rank`.
pub fn random_complex(rng: &mut ChaCha8Rng, ring: Ring, lo: i64, max_rank: usize) -> PresentedComplex {
    let q = ring.modulus().unwrap().to_u64().unwrap();
    let dims: Vec<usize> = (0..3).map(|_| rng.gen_range(0..=max_rank)).collect();
    let d1 = rand_mat(rng, dims[1], dims[2], q);
    let d1s = small(&d1, q);
    let kernel: Vec<V> = all_vectors(dims[1], q)
        .into_iter()
        .filter(|x| apply(x, &d1s, dims[2], q).iter().all(|&c| c == 0))
        .collect();
    let d0: Mat = (0..dims[0])
        .map(|_| {
            let v = &kernel[rng.gen_range(0..kernel.len())];
            v.iter().map(|&c| BigInt::from(c)).collect()
        })
        .collect();
    let d0 = if dims[1] == 0 { vec![vec![]; dims[0]] } else { d0 };
    PresentedComplex::free(ring, lo, &dims, vec![d0, d1]).unwrap()
}

/// A filtration of a random complex by random subcomplexes, window of
/// `width + 1` levels starting at `lo`.
pub fn random_filtered(rng: &mut ChaCha8Rng, ring: Ring, lo: i64, width: usize, max_rank: usize) -> FilteredComplex {
    let q = ring.modulus().unwrap().to_u64().unwrap();
    let c = random_complex(rng, ring, 0, max_rank);
    let mut gens = vec![];
    for j in 0..=width {
        let per: Vec<Mat> = (0..3)
            .map(|k| {
                let g = c.modules[k].gens;
                if j == 0 {
                    return (0..g)
                        .map(|i| (0..g).map(|l| BigInt::from((i == l) as i32)).collect())
                        .collect();
                }
                let n = rng.gen_range(0..=2usize.min(g));
                rand_mat(rng, n, g, q)
            })
            .collect();
        gens.push(per);
    }
    FilteredComplex::from_subcomplexes(&c, lo, &gens).unwrap()
}

/// Adds a random junk complex to every level above the bottom, sent to zero
/// by the transitions, so they stop being injective.
pub fn with_kernel(rng: &mut ChaCha8Rng, f: &FilteredComplex) -> FilteredComplex {
    let ring = f.ring;
    let mut levels = vec![f.levels[0].clone()];
    let mut junk_dims = vec![vec![0; 3]];
    for j in 1..f.levels.len() {
        let k = random_complex(rng, ring, f.lo_c(), 1);
        junk_dims.push(k.modules.iter().map(|m| m.gens).collect());
        let a = &f.levels[j];
        let modules: Vec<FinModPresentation> = a.modules.iter().zip(&k.modules).map(|(x, y)| x.direct_sum(y)).collect();
        let diffs = a
            .diffs
            .iter()
            .zip(&k.diffs)
            .enumerate()
            .map(|(t, (da, dk))| {
                let (ra, ca) = (a.modules[t].gens, a.modules[t + 1].gens);
                let (rk, ck) = (k.modules[t].gens, k.modules[t + 1].gens);
                let mut out = vec![vec![BigInt::from(0); ca + ck]; ra + rk];
                for i in 0..ra {
                    for l in 0..ca {
                        out[i][l] = da[i][l].clone();
                    }
                }
                for i in 0..rk {
                    for l in 0..ck {
                        out[ra + i][ca + l] = dk[i][l].clone();
                    }
                }
                out
            })
            .collect();
        levels.push(PresentedComplex::new(ring, f.lo_c(), modules, diffs).unwrap());
    }
    let transitions = f
        .transitions
        .iter()
        .enumerate()
        .map(|(j, t)| {
            t.iter()
                .enumerate()
                .map(|(k, m)| {
                    // rows: level j+1 (orig ⊕ junk); cols: level j (orig ⊕ junk)
                    let cols_extra = junk_dims[j][k];
                    let mut out: Mat = m
                        .iter()
                        .map(|r| {
                            let mut x = r.clone();
                            x.extend(vec![BigInt::from(0); cols_extra]);
                            x
                        })
                        .collect();
                    let width = levels[j].modules[k].gens;
                    for _ in 0..junk_dims[j + 1][k] {
                        out.push(vec![BigInt::from(0); width]);
                    }
                    out
                })
                .collect()
        })
        .collect();
    FilteredComplex::new(ring, f.window, levels, transitions).unwrap()
}
