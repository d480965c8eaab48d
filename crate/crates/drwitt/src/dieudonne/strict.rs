//! Strict truncations `W_rΩ^n_k = M^n_k / (V^r M^n_{p^r k} + dV^r M^{n-1}_{p^r k})`.

use std::collections::BTreeMap;

use crate::derham::{Kind, RingSpec};
use crate::error::{Error, Result};
use crate::exactcore::{InvariantFactors, Lattice, QMat, SubquotientComplex, Weight};
use crate::witt::{additive_invariants_fq, witt_scale, CoeffRing, WittVector};

use super::{denominator_exponent, lift_with_frobenius, saturate_with_budget, scale_key, DieudonneComplex, Key};

#[derive(Clone, Debug)]
pub struct StrictComponent {
    pub key: Key,
    pub weight: Weight,
    pub outer: Vec<Lattice>,
    pub inner: Vec<Lattice>,
    pub diffs: Vec<QMat>,
    /// Per degree, over `Z_p` (not yet repeated for `F_q`).
    pub groups: Vec<InvariantFactors>,
}

impl StrictComponent {
    pub fn complex(&self, p: u64) -> Result<SubquotientComplex> {
        SubquotientComplex::new(p, 0, self.outer.clone(), self.inner.clone(), self.diffs.clone())
    }
}

#[derive(Clone, Debug)]
pub struct StrictLevel {
    pub level: u32,
    pub spec: RingSpec,
    pub weight_cap: Weight,
    pub components: BTreeMap<Key, StrictComponent>,
}

fn repeat(g: &InvariantFactors, f: usize) -> InvariantFactors {
    let mut acc = InvariantFactors::zero(g.p);
    for _ in 0..f {
        acc = acc.direct_sum(g);
    }
    acc
}

impl StrictLevel {
    pub fn p(&self) -> u64 {
        self.spec.p
    }

    pub fn top(&self) -> usize {
        super::top_degree(&self.spec)
    }

    /// `W_rΩ^n` at one multidegree; zero outside the computed window.
    pub fn group(&self, n: usize, k: &[Weight]) -> InvariantFactors {
        match self.components.get(k).and_then(|c| c.groups.get(n)) {
            Some(g) => repeat(g, self.spec.f),
            None => InvariantFactors::zero(self.p()),
        }
    }

    pub fn by_weight(&self, n: usize) -> BTreeMap<Weight, InvariantFactors> {
        let mut out: BTreeMap<Weight, InvariantFactors> = BTreeMap::new();
        for c in self.components.values() {
            let g = repeat(c.groups.get(n).unwrap_or(&InvariantFactors::zero(self.p())), self.spec.f);
            let e = out.entry(c.weight).or_insert_with(|| InvariantFactors::zero(self.p()));
            *e = e.direct_sum(&g);
        }
        out
    }

    pub fn total(&self, n: usize) -> InvariantFactors {
        self.by_weight(n)
            .values()
            .fold(InvariantFactors::zero(self.p()), |a, g| a.direct_sum(g))
    }

    pub fn cohomology(&self, n: usize, k: &[Weight]) -> Result<InvariantFactors> {
        match self.components.get(k) {
            Some(c) => Ok(repeat(&c.complex(self.p())?.homology(n as i64)?, self.spec.f)),
            None => Ok(InvariantFactors::zero(self.p())),
        }
    }
}

/// `V^r M + dV^r M` inside `M_k`, degree by degree.
fn inner_lattices(m: &DieudonneComplex, k: &[Weight], r: u32) -> Result<Vec<Lattice>> {
    let c = m.component(k)?;
    let t = m.component(&scale_key(k, (m.p() as i64).pow(r)))?;
    let mut out = vec![];
    for n in 0..=c.top() {
        let base = t.lattices[n].scale(r as i64);
        let l = if n > 0 {
            base.sum_with(&t.lattices[n - 1].scale(r as i64).image(&c.diffs[n - 1], c.dim(n)))
        } else {
            base
        };
        if !c.lattices[n].contains(&l) {
            return Err(Error::InvalidInput(format!(
                "V^{r} and dV^{r} escape the component at {k:?} in degree {n}; input is not saturated"
            )));
        }
        out.push(l);
    }
    Ok(out)
}

fn visible(m: &DieudonneComplex, k: &[Weight], r: u32) -> bool {
    m.spec.is_perfection() || denominator_exponent(m.p(), k) < r
}

pub fn strict_truncate(m: &DieudonneComplex, r: u32) -> Result<StrictLevel> {
    if !m.saturated {
        return Err(Error::InvalidInput("strict truncation needs a saturated complex".into()));
    }
    if r == 0 {
        return Err(Error::InvalidInput("level must be positive".into()));
    }
    let mut components = BTreeMap::new();
    for (k, c) in &m.components {
        if !visible(m, k, r) {
            continue;
        }
        let inner = inner_lattices(m, k, r)?;
        let groups = c
            .lattices
            .iter()
            .zip(&inner)
            .map(|(o, i)| o.quotient_invariants(i))
            .collect::<Result<Vec<_>>>()?;
        components.insert(
            k.clone(),
            StrictComponent {
                key: k.clone(),
                weight: m.weight(k),
                outer: c.lattices.clone(),
                inner,
                diffs: c.diffs.clone(),
                groups,
            },
        );
    }
    Ok(StrictLevel {
        level: r,
        spec: m.spec.clone(),
        weight_cap: m.weight_cap,
        components,
    })
}

/// `R: W_{r+1}Ω -> W_rΩ` is surjective with kernel containing the images
/// of `V^r` and `dV^r`: the level-`(r+1)` relations sit inside the level-`r`
/// ones on every visible component.
pub fn restriction_check(m: &DieudonneComplex, r: u32) -> Result<bool> {
    for k in m.components.keys() {
        if !visible(m, k, r) {
            continue;
        }
        let a = inner_lattices(m, k, r + 1)?;
        let b = inner_lattices(m, k, r)?;
        if a.iter().zip(&b).any(|(x, y)| !y.contains(x)) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug)]
pub struct ModPEntry {
    pub key: Key,
    pub weight: Weight,
    pub degree: usize,
    /// Cohomology of the saturated model mod `p^r`.
    pub reduced: InvariantFactors,
    pub strict: InvariantFactors,
}

#[derive(Clone, Debug)]
pub struct ModPReport {
    pub level: u32,
    pub entries: Vec<ModPEntry>,
}

impl ModPReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.reduced == e.strict)
    }
}

/// Compares `H(M_k / p^r M_k)` with `H(W_rΩ_k)` for every multidegree in
/// the cap, including denominators `p^r` and `p^{r+1}` where the right side
/// is zero.
pub fn mod_p_compatibility(spec: &RingSpec, r: u32, weight_cap: Weight) -> Result<ModPReport> {
    let lift = lift_with_frobenius(spec, weight_cap)?;
    let sat = saturate_with_budget(&lift, weight_cap, r + 2, super::precision_budget(r + 2, lift.top()))?;
    let strict = strict_truncate(&sat, r)?;
    let mut entries = vec![];
    for (k, c) in &sat.components {
        let inner: Vec<Lattice> = c.lattices.iter().map(|l| l.scale(r as i64)).collect();
        let reduced = SubquotientComplex::new(spec.p, 0, c.lattices.clone(), inner, c.diffs.clone())?;
        for n in 0..=c.top() {
            entries.push(ModPEntry {
                key: k.clone(),
                weight: sat.weight(k),
                degree: n,
                reduced: repeat(&reduced.homology(n as i64)?, spec.f),
                strict: strict.cohomology(n, k)?,
            });
        }
    }
    Ok(ModPReport { level: r, entries })
}

#[derive(Clone, Debug)]
pub struct PerfdEntry {
    pub key: Key,
    pub weight: Weight,
    pub strict: InvariantFactors,
    pub witt: InvariantFactors,
    /// Whether every strict group in positive degree vanishes.
    pub higher_vanish: bool,
}

#[derive(Clone, Debug)]
pub struct PerfdReport {
    pub level: u32,
    pub entries: Vec<PerfdEntry>,
}

impl PerfdReport {
    pub fn passed(&self) -> bool {
        !self.entries.is_empty() && self.entries.iter().all(|e| e.strict == e.witt && e.higher_vanish)
    }
}

/// Weight-`k` part of `W_r(S)` for a perfection, by enumerating every
/// vector `(c_0 x^k, c_1 x^{pk}, ...)` and counting `p^j`-torsion.
fn witt_weight_group(spec: &RingSpec, k: &[Weight], r: u32) -> Result<InvariantFactors> {
    let p = spec.p;
    let alg = spec.algebra(None, denominator_exponent(p, k))?;
    let q = alg.field.order();
    let total = q.pow(r);
    let mut current = vec![];
    for mut idx in 0..total {
        let mut comps = vec![];
        for i in 0..r {
            let c = alg.field.element(idx % q);
            idx /= q;
            comps.push(alg.monomial(c, &scale_key(k, (p as i64).pow(i)))?);
        }
        current.push(WittVector::new(comps));
    }
    let mut counts = vec![];
    for _ in 0..=r {
        counts.push(current.iter().filter(|v| v.comps.iter().all(|c| c == &alg.zero())).count() as u64);
        current = current
            .iter()
            .map(|v| witt_scale(&alg, p, p, v))
            .collect::<Result<_>>()?;
    }
    Ok(InvariantFactors::from_torsion_counts(p, &counts))
}

/// Strict level `r` of `F_q` or a perfection against `W_r(S)` from the Witt
/// module, weight by weight, with positive degrees required to vanish.
pub fn perfection_witt_check(spec: &RingSpec, r: u32, weight_cap: Weight) -> Result<PerfdReport> {
    let is_field = matches!(spec.kind, Kind::FiniteField);
    if !is_field && !spec.is_perfection() {
        return Err(Error::UnsupportedKind(format!("{} is not perfect", spec.name())));
    }
    let lift = lift_with_frobenius(spec, weight_cap)?;
    let sat = super::saturate(&lift, weight_cap, r)?;
    let strict = strict_truncate(&sat, r)?;
    let mut entries = vec![];
    for (k, c) in &strict.components {
        let witt = if is_field {
            additive_invariants_fq(spec.p, spec.f, r as usize)?
        } else {
            witt_weight_group(spec, k, r)?
        };
        let higher_vanish = (1..c.groups.len()).all(|n| c.groups[n].is_zero());
        entries.push(PerfdEntry {
            key: k.clone(),
            weight: c.weight,
            strict: strict.group(0, k),
            witt,
            higher_vanish,
        });
    }
    Ok(PerfdReport { level: r, entries })
}
