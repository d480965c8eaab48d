//! Filtered and graded cochain complexes of finitely presented modules,
//! `gr ⊣ t`, and the spectral sequence of a finite filtration.
//!
//! A filtration is a window `lo..=hi` of complexes `F^{≥n}` with chain maps
//! `F^{≥n+1} -> F^{≥n}`; below the window it is constant, above it is zero.
//! All levels share one cochain range.

mod adjunction;
mod json;
mod spectral;

pub use adjunction::{adjunction_check, chain_maps, AdjunctionReport, DEFAULT_HOM_BUDGET};
pub use json::{filtered_from_json, filtered_to_json, FilteredJson};
pub use spectral::{
    homology_filtration, spectral_sequence, two_column_extract, Entry, ShortExact, SSPage, SpectralSequence,
};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactcore::{kernel, mat_mul, subquotient_invariants, FinModPresentation, InvariantFactors, Mat, Ring};

pub(crate) fn zeros(rows: usize, cols: usize) -> Mat {
    vec![vec![BigInt::zero(); cols]; rows]
}

pub(crate) fn eye(n: usize) -> Mat {
    (0..n)
        .map(|i| (0..n).map(|j| BigInt::from((i == j) as i32)).collect())
        .collect()
}

pub(crate) fn neg(ring: Ring, a: &Mat) -> Mat {
    a.iter().map(|r| r.iter().map(|x| ring.reduce(&-x)).collect()).collect()
}

/// Block matrix from a grid of blocks with the given row and column sizes;
/// `None` is a zero block.
pub(crate) fn blocks(rows: &[usize], cols: &[usize], grid: &[Vec<Option<&Mat>>]) -> Mat {
    let nr: usize = rows.iter().sum();
    let nc: usize = cols.iter().sum();
    let mut out = zeros(nr, nc);
    let mut r0 = 0;
    for (i, &h) in rows.iter().enumerate() {
        let mut c0 = 0;
        for (j, &w) in cols.iter().enumerate() {
            if let Some(b) = grid[i][j] {
                for a in 0..h {
                    for c in 0..w {
                        out[r0 + a][c0 + c] = b[a][c].clone();
                    }
                }
            }
            c0 += w;
        }
        r0 += h;
    }
    out
}

/// `ker(out) / im(inc)` at a presented module, where `inc` lands in `m` and
/// `out` goes to `next`.
pub(crate) fn presented_homology(
    m: &FinModPresentation,
    inc: Option<&Mat>,
    out: Option<(&Mat, &FinModPresentation)>,
) -> InvariantFactors {
    let ring = m.ring;
    let g = m.gens;
    if g == 0 {
        return InvariantFactors::zero(ring.p());
    }
    let cycles: Mat = match out {
        Some((d, next)) if next.gens > 0 => {
            let mut stacked = d.clone();
            stacked.extend(next.rels.iter().cloned());
            kernel(ring, &stacked, stacked.len(), next.gens)
                .into_iter()
                .map(|r| r[..g].to_vec())
                .collect()
        }
        _ => eye(g),
    };
    let mut bounds = m.rels.clone();
    if let Some(d) = inc {
        bounds.extend(d.iter().cloned());
    }
    let mut sub = cycles;
    sub.extend(m.rels.iter().cloned());
    subquotient_invariants(ring, &sub, &bounds, g)
}

/// Cochain complex of presented modules in degrees `lo..lo+len`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresentedComplex {
    pub ring: Ring,
    pub lo: i64,
    pub modules: Vec<FinModPresentation>,
    /// `diffs[k]`: from degree `lo+k` to `lo+k+1`; one fewer than modules.
    pub diffs: Vec<Mat>,
}

impl PresentedComplex {
    pub fn new(ring: Ring, lo: i64, modules: Vec<FinModPresentation>, diffs: Vec<Mat>) -> Result<Self> {
        if diffs.len() + 1 != modules.len().max(1) {
            return Err(Error::InvalidInput("need one differential between consecutive modules".into()));
        }
        let diffs: Vec<Mat> = diffs
            .into_iter()
            .map(|d| d.iter().map(|r| r.iter().map(|x| ring.reduce(x)).collect()).collect())
            .collect();
        for (k, d) in diffs.iter().enumerate() {
            let (a, b) = (&modules[k], &modules[k + 1]);
            if d.len() != a.gens || d.iter().any(|r| r.len() != b.gens) {
                return Err(Error::InvalidInput(format!("differential at degree {} has the wrong shape", lo + k as i64)));
            }
            if !a.map_is_defined(d, b) {
                return Err(Error::InvalidInput(format!(
                    "differential at degree {} does not respect relations",
                    lo + k as i64
                )));
            }
        }
        for k in 0..diffs.len().saturating_sub(1) {
            let dd = mat_mul(ring, &diffs[k], &diffs[k + 1], modules[k + 1].gens, modules[k + 2].gens);
            if !modules[k].map_is_zero(&dd, &modules[k + 2]) {
                return Err(Error::NonComplex { degree: lo + k as i64 });
            }
        }
        Ok(PresentedComplex { ring, lo, modules, diffs })
    }

    /// A complex of free modules.
    pub fn free(ring: Ring, lo: i64, dims: &[usize], diffs: Vec<Mat>) -> Result<Self> {
        let modules = dims.iter().map(|&d| FinModPresentation::free(ring, d)).collect();
        Self::new(ring, lo, modules, diffs)
    }

    pub fn zero(ring: Ring, lo: i64, len: usize) -> Self {
        PresentedComplex {
            ring,
            lo,
            modules: vec![FinModPresentation::zero(ring); len],
            diffs: vec![vec![]; len.saturating_sub(1)],
        }
    }

    pub fn len(&self) -> usize {
        self.modules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modules.is_empty()
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.len() as i64 - 1
    }

    pub fn module(&self, m: i64) -> FinModPresentation {
        let k = m - self.lo;
        if k < 0 || k as usize >= self.len() {
            FinModPresentation::zero(self.ring)
        } else {
            self.modules[k as usize].clone()
        }
    }

    pub fn gens(&self, m: i64) -> usize {
        self.module(m).gens
    }

    /// Differential leaving degree `m`, zero outside the range.
    pub fn diff(&self, m: i64) -> Mat {
        let k = m - self.lo;
        if k < 0 || k as usize >= self.diffs.len() {
            zeros(self.gens(m), self.gens(m + 1))
        } else {
            self.diffs[k as usize].clone()
        }
    }

    pub fn homology(&self, m: i64) -> InvariantFactors {
        let inc = self.diff(m - 1);
        let out = self.diff(m);
        presented_homology(&self.module(m), Some(&inc), Some((&out, &self.module(m + 1))))
    }

    /// Same complex on the range `lo..=hi`, which must contain the current one.
    pub fn padded(&self, lo: i64, hi: i64) -> Self {
        let modules: Vec<_> = (lo..=hi).map(|m| self.module(m)).collect();
        let diffs = (lo..hi).map(|m| self.diff(m)).collect();
        PresentedComplex {
            ring: self.ring,
            lo,
            modules,
            diffs,
        }
    }

    pub fn is_acyclic(&self) -> bool {
        (self.lo..=self.hi()).all(|m| self.homology(m).is_zero())
    }
}

/// Chain map `a -> b` given per degree on `a`'s range, padded by zeros.
pub(crate) fn pad_map(map: &[Mat], a: &PresentedComplex, b: &PresentedComplex, lo: i64, hi: i64) -> Vec<Mat> {
    (lo..=hi)
        .map(|m| {
            let k = m - a.lo;
            if k >= 0 && (k as usize) < map.len() && a.gens(m) > 0 {
                map[k as usize].clone()
            } else {
                zeros(a.gens(m), b.gens(m))
            }
        })
        .collect()
}

pub(crate) fn is_chain_map(a: &PresentedComplex, b: &PresentedComplex, f: &[Mat]) -> bool {
    let ring = a.ring;
    for m in a.lo..=a.hi() {
        let fm = &f[(m - a.lo) as usize];
        if !a.module(m).map_is_defined(fm, &b.module(m)) {
            return false;
        }
        if m < a.hi() {
            let fm1 = &f[(m + 1 - a.lo) as usize];
            let l = mat_mul(ring, &a.diff(m), fm1, a.gens(m + 1), b.gens(m + 1));
            let r = mat_mul(ring, fm, &b.diff(m), b.gens(m), b.gens(m + 1));
            let diff: Mat = l
                .iter()
                .zip(&r)
                .map(|(x, y)| x.iter().zip(y).map(|(u, v)| ring.reduce(&(u - v))).collect())
                .collect();
            if !a.module(m).map_is_zero(&diff, &b.module(m + 1)) {
                return false;
            }
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilteredComplex {
    pub ring: Ring,
    /// Filtration indices `lo..=hi`.
    pub window: (i64, i64),
    /// `levels[j]` is `F^{≥lo+j}`.
    pub levels: Vec<PresentedComplex>,
    /// `transitions[j][k]`: `F^{≥lo+j+1} -> F^{≥lo+j}` in cochain degree `lo_c + k`.
    pub transitions: Vec<Vec<Mat>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedComplex {
    pub ring: Ring,
    pub lo: i64,
    pub slots: Vec<PresentedComplex>,
}

impl GradedComplex {
    pub fn hi(&self) -> i64 {
        self.lo + self.slots.len() as i64 - 1
    }

    pub fn slot(&self, n: i64) -> Option<&PresentedComplex> {
        let k = n - self.lo;
        (k >= 0).then(|| self.slots.get(k as usize)).flatten()
    }

    /// Invariants of `H^m(X^n)` for every slot and degree.
    pub fn homology_table(&self) -> Vec<(i64, i64, InvariantFactors)> {
        let mut out = vec![];
        for (j, c) in self.slots.iter().enumerate() {
            for m in c.lo..=c.hi() {
                out.push((self.lo + j as i64, m, c.homology(m)));
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GrMode {
    /// Degreewise cokernel; fails on non-injective transitions.
    Strict,
    /// Degreewise cokernel, whatever the transitions.
    Cokernel,
    /// Mapping cone, one degree longer on the left.
    Cone,
}

impl FilteredComplex {
    pub fn new(ring: Ring, window: (i64, i64), levels: Vec<PresentedComplex>, transitions: Vec<Vec<Mat>>) -> Result<Self> {
        if window.1 < window.0 || levels.len() as i64 != window.1 - window.0 + 1 {
            return Err(Error::InvalidInput("one level per filtration index in the window".into()));
        }
        if transitions.len() + 1 != levels.len() {
            return Err(Error::InvalidInput("one transition between consecutive levels".into()));
        }
        let (lo, len) = (levels[0].lo, levels[0].len());
        if levels.iter().any(|l| l.lo != lo || l.len() != len || l.ring != ring) {
            return Err(Error::InvalidInput("levels must share ring and cochain range".into()));
        }
        for (j, t) in transitions.iter().enumerate() {
            if t.len() != len {
                return Err(Error::InvalidInput(format!("transition {j} needs one matrix per degree")));
            }
            let (a, b) = (&levels[j + 1], &levels[j]);
            for (k, m) in t.iter().enumerate() {
                let deg = lo + k as i64;
                if m.len() != a.gens(deg) || m.iter().any(|r| r.len() != b.gens(deg)) {
                    return Err(Error::InvalidInput(format!("transition {j} has the wrong shape in degree {deg}")));
                }
            }
            if !is_chain_map(a, b, t) {
                return Err(Error::InvalidInput(format!(
                    "transition into level {} is not a chain map",
                    window.0 + j as i64
                )));
            }
        }
        Ok(FilteredComplex {
            ring,
            window,
            levels,
            transitions,
        })
    }

    /// Builds the filtration of `c` by the subcomplexes generated by
    /// `gens[j]` (closed under `d` and under the later levels).
    pub fn from_subcomplexes(c: &PresentedComplex, lo: i64, gens: &[Vec<Mat>]) -> Result<Self> {
        let ring = c.ring;
        let nlev = gens.len();
        // spans in ambient coordinates, built from the top down
        let mut spans: Vec<Vec<Mat>> = vec![vec![]; nlev];
        for j in (0..nlev).rev() {
            let mut per: Vec<Mat> = vec![];
            for m in c.lo..=c.hi() {
                let k = (m - c.lo) as usize;
                let mut rows: Mat = gens[j].get(k).cloned().unwrap_or_default();
                if j + 1 < nlev {
                    rows.extend(spans[j + 1][k].iter().cloned());
                }
                if m > c.lo {
                    let prev: &Mat = &per[k - 1];
                    rows.extend(mat_mul(ring, prev, &c.diff(m - 1), c.gens(m - 1), c.gens(m)));
                }
                let g = c.gens(m);
                let rows = crate::exactcore::howell_form(ring, &rows, g);
                per.push(rows);
            }
            spans[j] = per;
        }
        let mut levels = vec![];
        for s in &spans {
            let mut modules = vec![];
            let mut diffs = vec![];
            for m in c.lo..=c.hi() {
                let k = (m - c.lo) as usize;
                modules.push(sub_presentation(ring, &s[k], &c.module(m)));
                if m < c.hi() {
                    let img = mat_mul(ring, &s[k], &c.diff(m), c.gens(m), c.gens(m + 1));
                    diffs.push(express(ring, &img, &s[k + 1], &c.module(m + 1))?);
                }
            }
            levels.push(PresentedComplex::new(ring, c.lo, modules, diffs)?);
        }
        let mut transitions = vec![];
        for j in 0..nlev.saturating_sub(1) {
            let mut t = vec![];
            for m in c.lo..=c.hi() {
                let k = (m - c.lo) as usize;
                t.push(express(ring, &spans[j + 1][k], &spans[j][k], &c.module(m))?);
            }
            transitions.push(t);
        }
        Self::new(ring, (lo, lo + nlev as i64 - 1), levels, transitions)
    }

    pub fn lo_c(&self) -> i64 {
        self.levels[0].lo
    }

    pub fn hi_c(&self) -> i64 {
        self.levels[0].hi()
    }

    pub fn level(&self, n: i64) -> PresentedComplex {
        let (lo, hi) = self.window;
        if n > hi {
            PresentedComplex::zero(self.ring, self.lo_c(), self.levels[0].len())
        } else {
            self.levels[(n.max(lo) - lo) as usize].clone()
        }
    }

    /// First transition failing injectivity, as `(target level, degree)`.
    pub fn first_non_injective(&self) -> Option<(i64, i64)> {
        let ring = self.ring;
        for (j, t) in self.transitions.iter().enumerate() {
            let (a, b) = (&self.levels[j + 1], &self.levels[j]);
            for m in a.lo..=a.hi() {
                let src = a.module(m);
                let tgt = b.module(m);
                if src.gens == 0 {
                    continue;
                }
                let tm = &t[(m - a.lo) as usize];
                let ker: Mat = if tgt.gens == 0 {
                    eye(src.gens)
                } else {
                    let mut stacked = tm.clone();
                    stacked.extend(tgt.rels.iter().cloned());
                    kernel(ring, &stacked, stacked.len(), tgt.gens)
                        .into_iter()
                        .map(|r| r[..src.gens].to_vec())
                        .collect()
                };
                if ker.iter().any(|x| !src.is_zero_elem(x)) {
                    return Some((self.window.0 + j as i64, m));
                }
            }
        }
        None
    }

    pub fn is_injective(&self) -> bool {
        self.first_non_injective().is_none()
    }

    /// `F^{≥hi+1} = 0` holds by construction.
    pub fn is_complete(&self) -> bool {
        self.level(self.window.1 + 1).modules.iter().all(|m| m.gens == 0)
    }

    /// Constant below the window, so the colimit is `F^{≥lo}`.
    pub fn is_exhaustive(&self) -> bool {
        self.level(self.window.0 - 1) == self.levels[0]
    }

    /// Quasi-isomorphic filtration with split-injective transitions, built
    /// from iterated mapping cylinders; each step lengthens the cochain range
    /// by one on the left.
    pub fn injective_model(&self) -> Result<(FilteredComplex, Vec<Vec<Mat>>)> {
        let ring = self.ring;
        let nlev = self.levels.len();
        let steps = nlev as i64 - 1;
        let lo = self.lo_c() - steps;
        let hi = self.hi_c();
        let pad = |c: &PresentedComplex| c.padded(lo, hi);
        let top = pad(&self.levels[nlev - 1]);
        // model levels, quasi-isos q_j : model_j -> F_j, and inclusions
        let mut model = vec![top.clone()];
        let mut q = vec![(lo..=hi).map(|m| eye(top.gens(m))).collect::<Vec<_>>()];
        let mut incl: Vec<Vec<Mat>> = vec![];
        for j in (0..nlev - 1).rev() {
            let a = model[0].clone();
            let b = pad(&self.levels[j]);
            let t = pad_map(&self.transitions[j], &self.levels[j + 1], &self.levels[j], lo, hi);
            let f: Vec<Mat> = (lo..=hi)
                .map(|m| {
                    let k = (m - lo) as usize;
                    mat_mul(ring, &q[0][k], &t[k], self.levels[j + 1].gens(m), b.gens(m))
                })
                .collect();
            let (cyl, inc, proj) = cylinder(&a, &b, &f)?;
            model.insert(0, cyl);
            q.insert(0, proj);
            incl.insert(0, inc);
        }
        let out = FilteredComplex::new(ring, self.window, model, incl)?;
        Ok((out, q))
    }
}

/// Presentation of the submodule of `ambient` spanned by `rows`.
fn sub_presentation(ring: Ring, rows: &Mat, ambient: &FinModPresentation) -> FinModPresentation {
    let s = rows.len();
    if s == 0 {
        return FinModPresentation::zero(ring);
    }
    let mut stacked = rows.clone();
    stacked.extend(ambient.rels.iter().cloned());
    let rel: Mat = kernel(ring, &stacked, stacked.len(), ambient.gens)
        .into_iter()
        .map(|r| r[..s].to_vec())
        .collect();
    FinModPresentation::new(ring, s, rel)
}

/// Coordinates of each row of `img` in terms of `basis`, modulo the
/// relations of `ambient`.
fn express(ring: Ring, img: &Mat, basis: &Mat, ambient: &FinModPresentation) -> Result<Mat> {
    let mut gens = basis.clone();
    gens.extend(ambient.rels.iter().cloned());
    img.iter()
        .map(|v| {
            crate::exactcore::solve_left(ring, &gens, v, ambient.gens)
                .map(|c| c[..basis.len()].to_vec())
                .ok_or_else(|| Error::InvalidInput("image leaves the subcomplex".into()))
        })
        .collect()
}

/// `Cyl(f)^m = A^m ⊕ B^m ⊕ A^{m+1}` with `d(a, b, a') = (da + a', db − f a', −d a')`,
/// the inclusion of `A`, and the quasi-isomorphism onto `B`. Both inputs
/// share a range whose lowest term is zero in `A`.
fn cylinder(a: &PresentedComplex, b: &PresentedComplex, f: &[Mat]) -> Result<(PresentedComplex, Vec<Mat>, Vec<Mat>)> {
    let ring = a.ring;
    let (lo, hi) = (a.lo, a.hi());
    if a.gens(lo) > 0 {
        return Err(Error::InvalidInput("cylinder needs room below the range".into()));
    }
    let mut modules = vec![];
    let mut diffs = vec![];
    let mut inc = vec![];
    let mut proj = vec![];
    for m in lo..=hi {
        let (am, bm, am1) = (a.module(m), b.module(m), a.module(m + 1));
        modules.push(am.direct_sum(&bm).direct_sum(&am1));
        let sizes = [am.gens, bm.gens, am1.gens];
        let id_a = eye(am.gens);
        inc.push(blocks(&[am.gens], &sizes, &[vec![Some(&id_a), None, None]]));
        let id_b = eye(bm.gens);
        let fm = f[(m - lo) as usize].clone();
        proj.push(blocks(&sizes, &[bm.gens], &[vec![Some(&fm)], vec![Some(&id_b)], vec![None]]));
        if m < hi {
            let (an, bn, an1) = (a.module(m + 1), b.module(m + 1), a.module(m + 2));
            let tsizes = [an.gens, bn.gens, an1.gens];
            let da = a.diff(m);
            let db = b.diff(m);
            let id1 = eye(am1.gens);
            let fm1 = neg(ring, &f[(m + 1 - lo) as usize]);
            let da1 = neg(ring, &a.diff(m + 1));
            diffs.push(blocks(
                &sizes,
                &tsizes,
                &[
                    vec![Some(&da), None, None],
                    vec![None, Some(&db), None],
                    vec![Some(&id1), Some(&fm1), Some(&da1)],
                ],
            ));
        }
    }
    Ok((PresentedComplex::new(ring, lo, modules, diffs)?, inc, proj))
}

/// `Cone(f)^m = B^m ⊕ A^{m+1}` with `d(b, a) = (db + f a, −d a)`, on the
/// range one longer to the left.
pub fn cone(a: &PresentedComplex, b: &PresentedComplex, f: &[Mat]) -> Result<PresentedComplex> {
    let ring = a.ring;
    let (lo, hi) = (a.lo.min(b.lo) - 1, a.hi().max(b.hi()));
    let fmap = |m: i64| -> Mat {
        let k = m - a.lo;
        if k >= 0 && (k as usize) < f.len() {
            f[k as usize].clone()
        } else {
            zeros(a.gens(m), b.gens(m))
        }
    };
    let mut modules = vec![];
    let mut diffs = vec![];
    for m in lo..=hi {
        let (bm, am1) = (b.module(m), a.module(m + 1));
        modules.push(bm.direct_sum(&am1));
        if m < hi {
            let (bn, an1) = (b.module(m + 1), a.module(m + 2));
            let db = b.diff(m);
            let fm = fmap(m + 1);
            let da = neg(ring, &a.diff(m + 1));
            diffs.push(blocks(
                &[bm.gens, am1.gens],
                &[bn.gens, an1.gens],
                &[vec![Some(&db), None], vec![Some(&fm), Some(&da)]],
            ));
        }
    }
    PresentedComplex::new(ring, lo, modules, diffs)
}

pub fn gr(f: &FilteredComplex, mode: GrMode) -> Result<GradedComplex> {
    if mode == GrMode::Strict {
        if let Some((level, degree)) = f.first_non_injective() {
            return Err(Error::NonInjectiveTransitions { level, degree });
        }
    }
    let n = f.levels.len();
    let mut slots = vec![];
    for j in 0..n {
        let c = &f.levels[j];
        if j + 1 == n {
            slots.push(match mode {
                GrMode::Cone => c.padded(c.lo - 1, c.hi()),
                _ => c.clone(),
            });
            continue;
        }
        let t = &f.transitions[j];
        slots.push(match mode {
            GrMode::Cone => cone(&f.levels[j + 1], c, t)?,
            _ => {
                let modules = c
                    .modules
                    .iter()
                    .zip(t)
                    .map(|(m, rows)| m.quotient(rows))
                    .collect();
                PresentedComplex::new(f.ring, c.lo, modules, c.diffs.clone())?
            }
        });
    }
    Ok(GradedComplex {
        ring: f.ring,
        lo: f.window.0,
        slots,
    })
}

/// `t(X)^{≥n} = X^n` with zero transitions.
pub fn t_embed(x: &GradedComplex) -> Result<FilteredComplex> {
    let lo = x.slots.iter().map(|c| c.lo).min().unwrap_or(0);
    let hi = x.slots.iter().map(|c| c.hi()).max().unwrap_or(0);
    let levels: Vec<_> = x.slots.iter().map(|c| c.padded(lo, hi)).collect();
    let transitions = (1..levels.len())
        .map(|j| {
            (lo..=hi)
                .map(|m| zeros(levels[j].gens(m), levels[j - 1].gens(m)))
                .collect()
        })
        .collect();
    FilteredComplex::new(x.ring, (x.lo, x.hi()), levels, transitions)
}

/// `c_n(Y)`: `Y` in filtration `n`, zero elsewhere on the window.
pub fn c_embed(y: &PresentedComplex, n: i64, window: (i64, i64)) -> Result<FilteredComplex> {
    if n < window.0 || n > window.1 {
        return Err(Error::InvalidInput("slot outside the window".into()));
    }
    let slots = (window.0..=window.1)
        .map(|j| {
            if j == n {
                y.clone()
            } else {
                PresentedComplex::zero(y.ring, y.lo, y.len())
            }
        })
        .collect();
    t_embed(&GradedComplex {
        ring: y.ring,
        lo: window.0,
        slots,
    })
}
