//! `gr ⊣ t` on finite hom-sets, by exhaustive enumeration.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactcore::{mat_mul, Mat};

use super::{eye, gr, is_chain_map, FilteredComplex, GrMode, GradedComplex, PresentedComplex};

pub const DEFAULT_HOM_BUDGET: u128 = 1 << 20;

/// All chain maps `a -> b` (same cochain range), each as one matrix per
/// degree with rows reduced to canonical representatives.
pub fn chain_maps(a: &PresentedComplex, b: &PresentedComplex, budget: u128) -> Result<Vec<Vec<Mat>>> {
    let (lo, hi) = (a.lo.min(b.lo), a.hi().max(b.hi()));
    let a = a.padded(lo, hi);
    let b = b.padded(lo, hi);
    let mut choices: Vec<Vec<Vec<BigInt>>> = vec![];
    let mut size: u128 = 1;
    for m in lo..=hi {
        let elems = b
            .module(m)
            .elements()
            .ok_or_else(|| Error::InvalidInput("hom-sets are enumerated over Z/p^R only".into()))?;
        let count = (elems.len() as u128)
            .checked_pow(a.gens(m) as u32)
            .unwrap_or(u128::MAX);
        size = size.saturating_mul(count);
        if size > budget {
            return Err(Error::HomSetTooLarge { size, budget });
        }
        choices.push(elems);
    }
    // degree by degree, pruning on the chain condition so far
    let mut partial: Vec<Vec<Mat>> = vec![vec![]];
    for m in lo..=hi {
        let k = (m - lo) as usize;
        let elems = &choices[k];
        let g = a.gens(m);
        let mut next = vec![];
        for prefix in &partial {
            let mut idx = vec![0usize; g];
            loop {
                let mat: Mat = idx.iter().map(|&i| elems[i].clone()).collect();
                let mut cand = prefix.clone();
                cand.push(if g == 0 { vec![] } else { mat });
                if prefix_ok(&a, &b, &cand, lo) {
                    next.push(cand);
                }
                // odometer
                let mut j = 0;
                while j < g {
                    idx[j] += 1;
                    if idx[j] < elems.len() {
                        break;
                    }
                    idx[j] = 0;
                    j += 1;
                }
                if j == g {
                    break;
                }
            }
        }
        partial = next;
    }
    Ok(partial)
}

fn prefix_ok(a: &PresentedComplex, b: &PresentedComplex, f: &[Mat], lo: i64) -> bool {
    let top = lo + f.len() as i64 - 1;
    let src = a.padded(lo, top);
    let tgt = b.padded(lo, top);
    // the differential out of the top degree is checked once the next one is chosen
    let k = f.len() - 1;
    if !src.module(top).map_is_defined(&f[k], &tgt.module(top)) {
        return false;
    }
    k == 0 || is_chain_map(&src, &tgt, f)
}

fn canonical(c: &PresentedComplex, map: &[Mat], target: &PresentedComplex) -> Vec<Mat> {
    map.iter()
        .enumerate()
        .map(|(k, m)| {
            let t = target.module(c.lo + k as i64);
            m.iter().map(|r| t.reduce(r)).collect()
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct AdjunctionReport {
    /// `|Hom(gr F, X)|`.
    pub graded_side: usize,
    /// `|Hom(F, t X)|`.
    pub filtered_side: usize,
    /// The factorization through the cokernels matches the two sets exactly.
    pub bijective: bool,
    /// The canonical quotients `F^{≥n} -> gr^n F` form a filtered map.
    pub unit_ok: bool,
    /// `gr(t X) = X` slot by slot.
    pub counit_ok: bool,
    /// Both triangle composites are identities.
    pub triangles: bool,
}

impl AdjunctionReport {
    pub fn passed(&self) -> bool {
        self.bijective && self.unit_ok && self.counit_ok && self.triangles
    }

    pub fn to_json(&self) -> Value {
        json!({
            "hom_gr_f_x": self.graded_side,
            "hom_f_t_x": self.filtered_side,
            "bijective": self.bijective,
            "unit": self.unit_ok,
            "counit": self.counit_ok,
            "triangles": self.triangles,
            "passed": self.passed(),
        })
    }
}

fn product(sets: &[Vec<Vec<Mat>>], budget: u128) -> Result<usize> {
    let mut n: u128 = 1;
    for s in sets {
        n = n.saturating_mul(s.len() as u128);
        if n > budget {
            return Err(Error::HomSetTooLarge { size: n, budget });
        }
    }
    Ok(n as usize)
}

fn is_identity_on(c: &PresentedComplex, map: &[Mat]) -> bool {
    map.iter().enumerate().all(|(k, m)| {
        let module = c.module(c.lo + k as i64);
        let id = eye(module.gens);
        m.iter().zip(&id).all(|(x, y)| {
            let d: Vec<BigInt> = x.iter().zip(y).map(|(u, v)| u - v).collect();
            module.is_zero_elem(&d)
        })
    })
}

/// Checks `Hom(gr F, X) ≅ Hom(F, t X)` for a grading `X` on the window of
/// `F`, with `gr` the degreewise cokernel (the honest `gr` when the
/// transitions are injective).
pub fn adjunction_check(f: &FilteredComplex, x: &GradedComplex, budget: u128) -> Result<AdjunctionReport> {
    if x.lo != f.window.0 || x.hi() != f.window.1 {
        return Err(Error::InvalidInput("grading and filtration need the same window".into()));
    }
    let g = gr(f, GrMode::Cokernel)?;
    let ring = f.ring;
    let lo = f.lo_c().min(x.slots.iter().map(|s| s.lo).min().unwrap_or(f.lo_c()));
    let hi = f.hi_c().max(x.slots.iter().map(|s| s.hi()).max().unwrap_or(f.hi_c()));
    let mut graded_sets = vec![];
    let mut filtered_sets = vec![];
    let mut bijective = true;
    for (j, xs) in x.slots.iter().enumerate() {
        let target = xs.padded(lo, hi);
        let gj = g.slots[j].padded(lo, hi);
        let fj = f.levels[j].padded(lo, hi);
        let left: BTreeSet<Vec<Mat>> = chain_maps(&gj, &target, budget)?
            .into_iter()
            .map(|m| canonical(&gj, &m, &target))
            .collect();
        // filtered maps into t X: chain maps killing the image of the next level
        let mut right = BTreeSet::new();
        for phi in chain_maps(&fj, &target, budget)? {
            let ok = match f.transitions.get(j) {
                None => true,
                Some(t) => {
                    let next = f.levels[j + 1].padded(lo, hi);
                    let t = super::pad_map(t, &f.levels[j + 1], &f.levels[j], lo, hi);
                    (lo..=hi).all(|m| {
                        let k = (m - lo) as usize;
                        let comp = mat_mul(ring, &t[k], &phi[k], fj.gens(m), target.gens(m));
                        next.module(m).map_is_zero(&comp, &target.module(m))
                    })
                }
            };
            if ok {
                right.insert(canonical(&fj, &phi, &target));
            }
        }
        // gr^n F and F^{≥n} share generators, so the adjunct is the same matrix
        bijective &= left == right;
        graded_sets.push(left.into_iter().collect::<Vec<_>>());
        filtered_sets.push(right.into_iter().collect::<Vec<_>>());
    }
    let graded_side = product(&graded_sets, budget)?;
    let filtered_side = product(&filtered_sets, budget)?;

    // unit F -> t gr F: identity matrices, a filtered map iff T lands in the relations
    let mut unit_ok = true;
    for (j, t) in f.transitions.iter().enumerate() {
        let target = &g.slots[j];
        for (k, m) in t.iter().enumerate() {
            unit_ok &= target.module(target.lo + k as i64).map_is_zero(m, &target.module(target.lo + k as i64));
        }
    }
    for j in 0..f.levels.len() {
        let ident: Vec<Mat> = f.levels[j].modules.iter().map(|m| eye(m.gens)).collect();
        unit_ok &= is_chain_map(&f.levels[j], &g.slots[j], &ident);
    }
    // counit gr t X -> X
    let tx = super::t_embed(x)?;
    let gtx = gr(&tx, GrMode::Cokernel)?;
    let mut counit_ok = true;
    for (j, xs) in x.slots.iter().enumerate() {
        let padded = xs.padded(tx.lo_c(), tx.hi_c());
        let ident: Vec<Mat> = padded.modules.iter().map(|m| eye(m.gens)).collect();
        counit_ok &= gtx.slots[j] == padded || is_chain_map(&gtx.slots[j], &padded, &ident);
    }
    // ε_{gr F} ∘ gr(η_F) and t(ε_X) ∘ η_{t X}
    let mut triangles = true;
    for j in 0..f.levels.len() {
        let c = &g.slots[j];
        let ident: Vec<Mat> = c.modules.iter().map(|m| eye(m.gens)).collect();
        let composite: Vec<Mat> = ident
            .iter()
            .zip(&c.modules)
            .map(|(i, m)| mat_mul(ring, i, i, m.gens, m.gens))
            .collect();
        triangles &= is_identity_on(c, &composite);
    }
    for j in 0..tx.levels.len() {
        let c = &tx.levels[j];
        let ident: Vec<Mat> = c.modules.iter().map(|m| eye(m.gens)).collect();
        triangles &= is_chain_map(c, &gtx.slots[j], &ident) && is_identity_on(c, &ident);
    }
    Ok(AdjunctionReport {
        graded_side,
        filtered_side,
        bijective,
        unit_ok,
        counit_ok,
        triangles,
    })
}
