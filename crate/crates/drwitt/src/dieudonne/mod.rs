//! Dieudonné complexes: the Frobenius-lifted de Rham complex of the curated
//! rings, its saturation along `α_F`, strict truncations `W_rΩ` and the
//! comparison checks around them.
//!
//! Over `F_q` every lattice is the base change of a `Z_p`-lattice to `Z_q`,
//! so groups are computed over `Z_p` and repeated `f` times.

mod component;
mod sigma;
mod strict;

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU32, Ordering};
use std::sync::Arc;

pub use component::{
    basis_masks, d_matrix, denominator_exponent, eta_p, lift_component, q_weight, saturated_component, scale_key,
    Component, Key, SETTLE_CONFIRMATIONS,
};
pub use sigma::{sigma_matrix, teichmuller_basis};
pub use strict::{
    mod_p_compatibility, perfection_witt_check, restriction_check, strict_truncate, ModPEntry, ModPReport,
    PerfdEntry, PerfdReport, StrictComponent, StrictLevel,
};

use crate::derham::{multidegrees, Kind, RingSpec, PERFECTION_DEPTH};
use crate::error::{Error, Result};
use crate::exactcore::{q_identity, InvariantFactors, QMat, Weight};

static GUARD: AtomicU32 = AtomicU32::new(DEFAULT_GUARD);

pub const DEFAULT_GUARD: u32 = 2;

/// Extra p-adic digits carried above `r + i_max`.
pub fn precision_guard() -> u32 {
    GUARD.load(Ordering::Relaxed)
}

pub fn set_precision_guard(g: u32) {
    GUARD.store(g, Ordering::Relaxed);
}

/// Internal exponent budget for level `r` with forms up to degree `i_max`.
pub fn precision_budget(r: u32, i_max: usize) -> u32 {
    r + i_max as u32 + precision_guard()
}

#[derive(Clone, Debug)]
pub struct DieudonneComplex {
    pub spec: RingSpec,
    pub weight_cap: Weight,
    pub budget: u32,
    pub saturated: bool,
    pub strict: bool,
    pub components: BTreeMap<Key, Arc<Component>>,
}

fn check_kind(spec: &RingSpec) -> Result<()> {
    match spec.base_kind() {
        Kind::Quotient => Err(Error::UnsupportedKind(format!(
            "{} has no Frobenius lift in the curated family",
            spec.name()
        ))),
        _ => Ok(()),
    }
}

/// Highest form degree of the lift: perfections have no forms in positive
/// degree.
pub fn top_degree(spec: &RingSpec) -> usize {
    if spec.is_perfection() {
        0
    } else {
        spec.nvars()
    }
}

fn keys_within(spec: &RingSpec, cap: Weight, u: u32) -> Vec<Key> {
    multidegrees(&spec.weights(), &spec.inverted, cap, (spec.p as i64).pow(u))
}

impl DieudonneComplex {
    pub fn p(&self) -> u64 {
        self.spec.p
    }

    pub fn top(&self) -> usize {
        top_degree(&self.spec)
    }

    pub fn weight(&self, k: &[Weight]) -> Weight {
        self.spec.weight_of(k)
    }

    /// Component at `k`, computed on demand (also beyond the weight cap).
    pub fn component(&self, k: &[Weight]) -> Result<Arc<Component>> {
        if let Some(c) = self.components.get(k) {
            return Ok(c.clone());
        }
        if self.saturated && !self.spec.is_perfection() {
            saturated_component(self.p(), &self.spec.inverted, self.top(), k, self.budget)
        } else {
            Ok(Arc::new(lift_component(self.p(), &self.spec.inverted, self.top(), k)))
        }
    }

    /// `F` from `k` to `p k`: the identity in colimit coordinates.
    pub fn frobenius(&self, k: &[Weight], n: usize) -> Result<QMat> {
        Ok(q_identity(self.component(k)?.dim(n)))
    }

    /// `V` from `p k` to `k`: `p` times the identity. Only meaningful once
    /// saturated.
    pub fn verschiebung(&self, k: &[Weight], n: usize) -> Result<QMat> {
        Ok(component::scalar_matrix(self.p(), self.component(k)?.dim(n), 1))
    }

    /// Direct sum over multidegrees of equal weight, repeated `f` times.
    pub fn group_sum<'a>(&self, groups: impl Iterator<Item = &'a InvariantFactors>) -> InvariantFactors {
        let mut acc = InvariantFactors::zero(self.p());
        for g in groups {
            for _ in 0..self.spec.f {
                acc = acc.direct_sum(g);
            }
        }
        acc
    }
}

/// The lift `Z_p`-span of monomials (`W(F_q)` for a finite field, `W(S)`
/// for a perfection) with `F = φ/p^n` in degree `n`.
pub fn lift_with_frobenius(spec: &RingSpec, weight_cap: Weight) -> Result<DieudonneComplex> {
    check_kind(spec)?;
    let depth = if spec.is_perfection() { PERFECTION_DEPTH } else { 0 };
    let top = top_degree(spec);
    let components = keys_within(spec, weight_cap, depth)
        .into_iter()
        .map(|k| {
            let c = lift_component(spec.p, &spec.inverted, top, &k);
            (k, Arc::new(c))
        })
        .collect();
    Ok(DieudonneComplex {
        spec: spec.clone(),
        weight_cap,
        budget: precision_budget(1, top),
        saturated: spec.is_perfection(),
        strict: false,
        components,
    })
}

/// Saturation with the default budget for level `r`.
pub fn saturate(m: &DieudonneComplex, weight_cap: Weight, r: u32) -> Result<DieudonneComplex> {
    saturate_with_budget(m, weight_cap, r, precision_budget(r, m.top()))
}

/// Components at every multidegree visible at level `r`: denominators up to
/// `p^{r-1}`, or `p^r` for perfections (whose fractional weights survive at
/// every level).
pub fn saturate_with_budget(m: &DieudonneComplex, weight_cap: Weight, r: u32, budget: u32) -> Result<DieudonneComplex> {
    if r == 0 {
        return Err(Error::InvalidInput("level must be positive".into()));
    }
    let spec = &m.spec;
    let u = if spec.is_perfection() { r } else { r - 1 };
    let top = m.top();
    let mut components = BTreeMap::new();
    for k in keys_within(spec, weight_cap, u) {
        let c = if spec.is_perfection() {
            Arc::new(lift_component(spec.p, &spec.inverted, top, &k))
        } else {
            saturated_component(spec.p, &spec.inverted, top, &k, budget)?
        };
        components.insert(k, c);
    }
    Ok(DieudonneComplex {
        spec: spec.clone(),
        weight_cap,
        budget,
        saturated: true,
        strict: true,
        components,
    })
}

/// Outcome of the saturation criterion at one multidegree and degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriterionEntry {
    pub key: Key,
    pub degree: usize,
    pub holds: bool,
}

/// `F(M^n_k) = {y ∈ M^n_{pk} : dy ∈ p M^{n+1}_{pk}}` for every computed
/// component; `p`-torsion-freeness is automatic for lattices.
pub fn saturation_criterion(m: &DieudonneComplex) -> Result<Vec<CriterionEntry>> {
    let mut out = vec![];
    for (k, c) in &m.components {
        let pk = scale_key(k, m.p() as i64);
        let t = m.component(&pk)?;
        for n in 0..=c.top() {
            let rhs = match t.diffs.get(n) {
                Some(d) => t.lattices[n].preimage_within(d, &t.lattices[n + 1].scale(1)),
                None => t.lattices[n].clone(),
            };
            out.push(CriterionEntry {
                key: k.clone(),
                degree: n,
                holds: rhs == c.lattices[n],
            });
        }
    }
    Ok(out)
}

/// `d F = p F d` and `d d = 0` on every computed component, as matrix
/// identities in colimit coordinates.
pub fn check_dieudonne_identities(m: &DieudonneComplex) -> Result<bool> {
    for (k, c) in &m.components {
        let pk = scale_key(k, m.p() as i64);
        let t = m.component(&pk)?;
        for n in 0..c.diffs.len() {
            let lhs = &t.diffs[n];
            let rhs = crate::exactcore::q_scale(&c.diffs[n], &crate::exactcore::q_int(m.p() as i64));
            if lhs != &rhs {
                return Ok(false);
            }
            if n + 1 < c.diffs.len() {
                let dd = crate::exactcore::q_mul(&c.diffs[n], &c.diffs[n + 1], c.dim(n + 1), c.dim(n + 2));
                if !component::q_is_zero_mat(&dd) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
