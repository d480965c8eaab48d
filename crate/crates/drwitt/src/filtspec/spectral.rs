//! Pages of the spectral sequence of a finite filtration.
//!
//! Internally pages use the classical `E_s^{p,m}` (filtration `p`, total
//! degree `m`, `E_1 = H(gr)`), computed from
//! `Z_s^{p,m} = F^p ∩ d^{-1} F^{p+s}` and
//! `E_s^{p,m} = Z_s^{p,m} / (Z_{s-1}^{p+1,m} + d Z_{s-1}^{p-s+1,m-1})`.
//! They are reported as `E_r^{k,ℓ}` with `r = s + 1`, `ℓ = −p`,
//! `k = m − ℓ`, so that `E_2^{k,ℓ} = H^{k+ℓ}(gr^{−ℓ})` and `d_r` has
//! bidegree `(r, 1 − r)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactcore::{
    howell_form, kernel, mat_mul, solve_left, subquotient_invariants, FinModPresentation, InvariantFactors, Mat, Ring,
};

use super::{eye, presented_homology, FilteredComplex, PresentedComplex};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub module: FinModPresentation,
    /// Generators as elements of the ambient complex.
    pub reps: Mat,
}

impl Entry {
    pub fn invariants(&self) -> InvariantFactors {
        self.module.invariants()
    }
}

#[derive(Clone, Debug)]
pub struct SSPage {
    pub r: usize,
    pub entries: BTreeMap<(i64, i64), Entry>,
    /// `d_r` leaving `(k, ℓ)`, in generator coordinates.
    pub differentials: BTreeMap<(i64, i64), Mat>,
}

impl SSPage {
    pub fn target(&self, k: i64, l: i64) -> (i64, i64) {
        (k + self.r as i64, l + 1 - self.r as i64)
    }

    pub fn invariants(&self, k: i64, l: i64) -> InvariantFactors {
        match self.entries.get(&(k, l)) {
            Some(e) => e.invariants(),
            None => InvariantFactors::zero(self.p()),
        }
    }

    fn p(&self) -> u64 {
        self.entries.values().next().map_or(2, |e| e.module.ring.p())
    }

    /// Nonzero entries.
    pub fn support(&self) -> Vec<(i64, i64)> {
        self.entries
            .iter()
            .filter(|(_, e)| !e.module.is_zero())
            .map(|(k, _)| *k)
            .collect()
    }

    /// A page with the given groups and zero differentials.
    pub fn synthetic(r: usize, groups: &BTreeMap<(i64, i64), InvariantFactors>) -> Self {
        let mut entries = BTreeMap::new();
        for (&key, g) in groups {
            let top = g.torsion.iter().copied().max().unwrap_or(1);
            let ring = if g.free_rank > 0 {
                Ring::Integers { p: g.p }
            } else {
                Ring::ModPrimePower { p: g.p, r: top.max(1) }
            };
            let n = g.torsion.len() + g.free_rank;
            let rels: Mat = g
                .torsion
                .iter()
                .enumerate()
                .map(|(i, &a)| {
                    let mut row = vec![BigInt::from(0); n];
                    row[i] = BigInt::from(g.p).pow(a);
                    row
                })
                .collect();
            entries.insert(
                key,
                Entry {
                    module: FinModPresentation::new(ring, n, rels),
                    reps: eye(n),
                },
            );
        }
        SSPage {
            r,
            entries,
            differentials: BTreeMap::new(),
        }
    }

    pub fn differential_is_zero(&self) -> bool {
        self.differentials.iter().all(|(&(k, l), d)| {
            let t = self.target(k, l);
            match self.entries.get(&t) {
                Some(e) => e.module.map_is_zero(d, &e.module),
                None => true,
            }
        })
    }

    /// `d_r ∘ d_r = 0` on every entry.
    pub fn d_squared_zero(&self) -> bool {
        let ring = match self.entries.values().next() {
            Some(e) => e.module.ring,
            None => return true,
        };
        for (&(k, l), d) in &self.differentials {
            let t = self.target(k, l);
            let tt = self.target(t.0, t.1);
            let (Some(d2), Some(mid), Some(end)) =
                (self.differentials.get(&t), self.entries.get(&t), self.entries.get(&tt))
            else {
                continue;
            };
            let comp = mat_mul(ring, d, d2, mid.module.gens, end.module.gens);
            if !end.module.map_is_zero(&comp, &end.module) {
                return false;
            }
        }
        true
    }

    /// `H(E_r, d_r)` at every entry.
    pub fn homology(&self) -> BTreeMap<(i64, i64), InvariantFactors> {
        let r = self.r as i64;
        self.entries
            .iter()
            .map(|(&(k, l), e)| {
                let src = (k - r, l + r - 1);
                let inc = self.differentials.get(&src).filter(|_| self.entries.contains_key(&src));
                let t = self.target(k, l);
                let out = match (self.differentials.get(&(k, l)), self.entries.get(&t)) {
                    (Some(d), Some(te)) => Some((d, &te.module)),
                    _ => None,
                };
                ((k, l), presented_homology(&e.module, inc, out))
            })
            .collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "page": self.r,
            "entries": self.entries.iter()
                .filter(|(_, e)| !e.module.is_zero())
                .map(|(&(k, l), e)| json!({"k": k, "l": l, "group": e.invariants().to_json(), "text": e.invariants().to_string()}))
                .collect::<Vec<_>>(),
            "differentials_vanish": self.differential_is_zero(),
        })
    }
}

#[derive(Clone, Debug)]
pub struct SpectralSequence {
    pub ring: Ring,
    pub window: (i64, i64),
    pub pages: Vec<SSPage>,
    /// `H^m` of the underlying complex `F^{≥lo}`.
    pub abutment: BTreeMap<i64, InvariantFactors>,
    /// Whether the last page is `E_∞`.
    pub stabilized: bool,
    /// Whether an injective replacement was needed.
    pub replaced: bool,
}

impl SpectralSequence {
    pub fn e_infinity(&self) -> Option<&SSPage> {
        self.stabilized.then(|| self.pages.last()).flatten()
    }

    /// Every page satisfies `d∘d = 0` and the next page is its homology.
    pub fn consistent(&self) -> bool {
        self.pages.iter().all(|p| p.d_squared_zero())
            && self.pages.windows(2).all(|w| {
                let h = w[0].homology();
                h.iter().all(|(&(k, l), g)| *g == w[1].invariants(k, l))
            })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "window": [self.window.0, self.window.1],
            "pages": self.pages.iter().map(|p| p.to_json()).collect::<Vec<_>>(),
            "abutment": self.abutment.iter()
                .map(|(m, g)| json!({"degree": m, "group": g.to_json(), "text": g.to_string()}))
                .collect::<Vec<_>>(),
            "stabilized": self.stabilized,
            "injective_replacement": self.replaced,
            "consistent": self.consistent(),
        })
    }
}

/// The filtration as generator sets in the ambient complex `F^{≥lo}`.
struct Ambient {
    ring: Ring,
    c: PresentedComplex,
    lo: i64,
    hi: i64,
    /// `levels[j][m - lo_c]`: generators of `F^{lo+j}` in degree `m`.
    levels: Vec<Vec<Mat>>,
}

impl Ambient {
    fn new(f: &FilteredComplex) -> Self {
        let ring = f.ring;
        let c = f.levels[0].clone();
        let mut levels = vec![(c.lo..=c.hi()).map(|m| eye(c.gens(m))).collect::<Vec<_>>()];
        for (j, t) in f.transitions.iter().enumerate() {
            let prev = &levels[j];
            let next = (c.lo..=c.hi())
                .map(|m| {
                    let k = (m - c.lo) as usize;
                    mat_mul(ring, &t[k], &prev[k], f.levels[j].gens(m), c.gens(m))
                })
                .collect();
            levels.push(next);
        }
        Ambient {
            ring,
            lo: f.window.0,
            hi: f.window.1,
            c,
            levels,
        }
    }

    /// Generators of `F^p C^m`, relations included.
    fn filt(&self, p: i64, m: i64) -> Mat {
        let module = self.c.module(m);
        let mut rows = if m < self.c.lo || m > self.c.hi() || p > self.hi {
            vec![]
        } else {
            let j = (p.max(self.lo) - self.lo) as usize;
            self.levels[j][(m - self.c.lo) as usize].clone()
        };
        rows.extend(module.rels.iter().cloned());
        rows
    }

    /// `Z_s^{p,m}`, relations included; `s = None` means cycles.
    fn z(&self, s: Option<i64>, p: i64, m: i64) -> Mat {
        let g = self.c.gens(m);
        let h = self.c.gens(m + 1);
        let gp = self.filt(p, m);
        if gp.is_empty() || g == 0 {
            return vec![];
        }
        let rows = if h == 0 {
            gp.clone()
        } else {
            let img = mat_mul(self.ring, &gp, &self.c.diff(m), g, h);
            let target = match s {
                Some(s) => self.filt(p + s, m + 1),
                None => self.c.module(m + 1).rels,
            };
            let mut stacked = img;
            stacked.extend(target);
            let ker = kernel(self.ring, &stacked, stacked.len(), h);
            let coeffs: Mat = ker.into_iter().map(|r| r[..gp.len()].to_vec()).collect();
            mat_mul(self.ring, &coeffs, &gp, gp.len(), g)
        };
        howell_form(self.ring, &rows, g)
    }

    fn image(&self, rows: &Mat, m: i64) -> Mat {
        mat_mul(self.ring, rows, &self.c.diff(m), self.c.gens(m), self.c.gens(m + 1))
    }

    fn entry(&self, s: i64, p: i64, m: i64) -> Entry {
        let g = self.c.gens(m);
        let zs = self.z(Some(s), p, m);
        let mut den = self.z(Some(s - 1), p + 1, m);
        den.extend(self.image(&self.z(Some(s - 1), p - s + 1, m - 1), m - 1));
        den.extend(self.c.module(m).rels);
        let n = zs.len();
        let rel: Mat = if n == 0 {
            vec![]
        } else {
            let mut stacked = zs.clone();
            stacked.extend(den);
            kernel(self.ring, &stacked, stacked.len(), g)
                .into_iter()
                .map(|r| r[..n].to_vec())
                .collect()
        };
        Entry {
            module: FinModPresentation::new(self.ring, n, rel),
            reps: zs,
        }
    }

    /// `gr^p H^m = (Z ∩ F^p + B) / (Z ∩ F^{p+1} + B)`.
    fn homology_graded(&self, p: i64, m: i64) -> InvariantFactors {
        let g = self.c.gens(m);
        let mut b = self.image(&eye(self.c.gens(m - 1)), m - 1);
        b.extend(self.c.module(m).rels);
        let mut num = self.z(None, p, m);
        num.extend(b.iter().cloned());
        let mut den = self.z(None, p + 1, m);
        den.extend(b);
        subquotient_invariants(self.ring, &num, &den, g)
    }
}

/// Pages `E_2` through `E_{r_max}` (paper indexing), stopping once the
/// differentials leave the window.
pub fn spectral_sequence(f: &FilteredComplex, r_max: usize) -> Result<SpectralSequence> {
    let replaced = !f.is_injective();
    let model = if replaced { f.injective_model()?.0 } else { f.clone() };
    let amb = Ambient::new(&model);
    let (lo, hi) = model.window;
    let width = hi - lo;
    let last_s = (width + 1).min(r_max.max(2) as i64 - 1);
    let mut pages = vec![];
    for s in 1..=last_s {
        let mut entries = BTreeMap::new();
        let mut differentials = BTreeMap::new();
        for p in lo..=hi {
            for m in amb.c.lo..=amb.c.hi() {
                entries.insert((m + p, -p), amb.entry(s, p, m));
            }
        }
        for p in lo..=hi {
            for m in amb.c.lo..=amb.c.hi() {
                let src = &entries[&(m + p, -p)];
                let (tp, tm) = (p + s, m + 1);
                let Some(tgt) = entries.get(&(tm + tp, -tp)) else { continue };
                let h = amb.c.gens(tm);
                let imgs = mat_mul(amb.ring, &src.reps, &amb.c.diff(m), amb.c.gens(m), h);
                let mut basis = tgt.reps.clone();
                basis.extend(amb.c.module(tm).rels);
                let mut d = vec![];
                for v in &imgs {
                    let c = solve_left(amb.ring, &basis, v, h)
                        .ok_or_else(|| Error::InvalidInput("differential leaves Z_s".into()))?;
                    d.push(c[..tgt.reps.len()].to_vec());
                }
                differentials.insert((m + p, -p), d);
            }
        }
        pages.push(SSPage {
            r: s as usize + 1,
            entries,
            differentials,
        });
    }
    let abutment = (amb.c.lo..=amb.c.hi()).map(|m| (m, amb.c.homology(m))).collect();
    Ok(SpectralSequence {
        ring: f.ring,
        window: f.window,
        pages,
        abutment,
        stabilized: last_s == width + 1,
        replaced,
    })
}

/// `gr^p H^m` of the filtration induced on the homology of `F^{≥lo}`, keyed
/// by `(m, p)`; the independent side of the convergence statement.
pub fn homology_filtration(f: &FilteredComplex) -> Result<BTreeMap<(i64, i64), InvariantFactors>> {
    let model = if f.is_injective() { f.clone() } else { f.injective_model()?.0 };
    let amb = Ambient::new(&model);
    let mut out = BTreeMap::new();
    for m in amb.c.lo..=amb.c.hi() {
        for p in amb.lo..=amb.hi {
            out.insert((m, p), amb.homology_graded(p, m));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShortExact {
    pub degree: i64,
    /// Higher filtration: the subobject.
    pub left: InvariantFactors,
    pub middle: Option<InvariantFactors>,
    pub right: InvariantFactors,
}

impl ShortExact {
    /// `|middle| = |left| · |right|`, when the middle is known.
    pub fn orders_match(&self) -> Option<bool> {
        let m = self.middle.as_ref()?;
        if m.free_rank > 0 || self.left.free_rank > 0 || self.right.free_rank > 0 {
            return Some(m.free_rank == self.left.free_rank + self.right.free_rank);
        }
        Some(m.torsion_order() == self.left.torsion_order() * self.right.torsion_order())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "degree": self.degree,
            "left": self.left.to_string(),
            "middle": self.middle.as_ref().map(|m| m.to_string()),
            "right": self.right.to_string(),
            "orders_match": self.orders_match(),
        })
    }
}

/// The short exact sequences of a spectral sequence whose `E_2` lives in
/// two adjacent columns, or in two adjacent rows with vanishing
/// differentials.
pub fn two_column_extract(pages: &[SSPage], abutment: &BTreeMap<i64, InvariantFactors>) -> Result<Vec<ShortExact>> {
    let first = pages
        .first()
        .ok_or_else(|| Error::DegenerationFailed("no pages".into()))?;
    let support = first.support();
    let degrees: Vec<i64> = {
        let mut d: Vec<i64> = support.iter().map(|(k, l)| k + l).collect();
        d.extend(abutment.keys().copied());
        d.sort();
        d.dedup();
        d
    };
    let cols: Vec<i64> = support.iter().map(|s| s.0).collect();
    let rows: Vec<i64> = support.iter().map(|s| s.1).collect();
    let spread = |v: &[i64]| v.iter().max().zip(v.iter().min()).map_or(0, |(a, b)| a - b);
    let sequences = |pick: &dyn Fn(i64) -> ((i64, i64), (i64, i64))| -> Vec<ShortExact> {
        degrees
            .iter()
            .map(|&t| {
                let (sub, quo) = pick(t);
                let last = pages.last().unwrap();
                ShortExact {
                    degree: t,
                    left: last.invariants(sub.0, sub.1),
                    middle: abutment.get(&t).cloned(),
                    right: last.invariants(quo.0, quo.1),
                }
            })
            .collect()
    };
    if spread(&cols) <= 1 && spread(&rows) > 0 {
        let a = cols.iter().min().copied().unwrap_or(0);
        // d_r moves k by r ≥ 2, so nothing can hit
        return Ok(sequences(&|t| ((a + 1, t - a - 1), (a, t - a))));
    }
    if spread(&rows) <= 1 {
        if !pages.iter().all(|pg| pg.differential_is_zero()) {
            return Err(Error::DegenerationFailed("a differential between the two rows is nonzero".into()));
        }
        // a single row is read as the quotient, matching the column case
        let b = rows.iter().min().copied().unwrap_or(0) - (spread(&rows) == 0) as i64;
        return Ok(sequences(&|t| ((t - b, b), (t - b - 1, b + 1))));
    }
    Err(Error::DegenerationFailed(format!(
        "E_2 spans {} columns and {} rows",
        spread(&cols) + 1,
        spread(&rows) + 1
    )))
}
