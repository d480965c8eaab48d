use serde_json::{json, Value};

use crate::derham::{kaehler, PieceKey, RingSpec};
use crate::dieudonne::{denominator_exponent, scale_key, Key};
use crate::error::Result;
use crate::exactcore::{InvariantFactors, Lattice, QVec, SubquotientComplex, Weight};

use super::{log_lattice, nygaard, span_invariants, syntomic::syntomic_of, Certificate, LogLattice};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LogVerdict {
    Equal,
    /// The log part is a proper subgroup of colength `p^index`.
    Contains { index: u32 },
    /// Some symbol is not fixed by `φ/p^i`.
    Escapes,
}

#[derive(Clone, Debug)]
pub struct FundamentalReport {
    pub ring: String,
    pub twist: usize,
    pub level: u32,
    pub certificates: Vec<Certificate>,
    pub off_degree_zero: bool,
    pub h_i: InvariantFactors,
    pub log: LogLattice,
    pub verdict: LogVerdict,
    /// `H^{i+1}` at weight 0.
    pub weight_zero_next: InvariantFactors,
    pub ring_level_coker: InvariantFactors,
}

impl FundamentalReport {
    pub fn passed(&self) -> bool {
        self.certificates.iter().all(|c| c.holds) && self.off_degree_zero && self.verdict != LogVerdict::Escapes
    }

    pub fn to_json(&self) -> Value {
        json!({
            "ring": self.ring,
            "twist": self.twist,
            "level": self.level,
            "certified": self.certificates.iter().all(|c| c.holds),
            "off_degree_zero": self.off_degree_zero,
            "h_i": self.h_i.to_json(),
            "log_part": self.log.invariants.to_json(),
            "log_symbols": self.log.symbols.len(),
            "verdict": match &self.verdict {
                LogVerdict::Equal => "equal".to_string(),
                LogVerdict::Contains { index } => format!("contains, index p^{index}"),
                LogVerdict::Escapes => "escapes".to_string(),
            },
            "weight_zero_h_next": self.weight_zero_next.to_json(),
            "ring_level_coker": self.ring_level_coker.to_json(),
            "passed": self.passed(),
        })
    }
}

fn repeat(g: &InvariantFactors, f: usize) -> InvariantFactors {
    (0..f).fold(InvariantFactors::zero(g.p), |a, _| a.direct_sum(g))
}

/// Computes `Z/p^r(i)` and compares `H^i` with the span of `dlog` symbols.
pub fn verify_fundamental_seq(spec: &RingSpec, i: usize, r: u32, cap: Weight) -> Result<FundamentalReport> {
    let model = nygaard(spec, i, r, cap)?;
    let syn = syntomic_of(&model, cap)?;
    let log = log_lattice(spec, i, r)?;
    let p = spec.p;
    let f = spec.f;
    let d = log.masks.len();
    // embed as 1 ⊗ v in W(F_q) ⊗ WΩ^i_0
    let embedded: Vec<QVec> = log
        .generators
        .iter()
        .map(|v| {
            let mut w = v.clone();
            w.resize(f * d, num_rational::BigRational::from_integer(0.into()));
            w
        })
        .collect();
    let h_i = syn.h(i);
    let verdict = if f * d == 0 {
        LogVerdict::Equal
    } else {
        let ker = span_invariants(p, r, &syn.kernel_generators, f * d)?;
        let mut both = syn.kernel_generators.clone();
        both.extend(embedded.iter().cloned());
        let joint = span_invariants(p, r, &both, f * d)?;
        let logs = span_invariants(p, r, &embedded, f * d)?;
        if joint != ker {
            LogVerdict::Escapes
        } else if logs == h_i {
            LogVerdict::Equal
        } else {
            LogVerdict::Contains {
                index: h_i.length() - logs.length(),
            }
        }
    };
    Ok(FundamentalReport {
        ring: spec.name(),
        twist: i,
        level: r,
        off_degree_zero: syn.off_degree_zero(),
        certificates: syn.certificates.clone(),
        h_i,
        log,
        verdict,
        weight_zero_next: syn.weight_zero.get(i + 1).cloned().unwrap_or_else(|| InvariantFactors::zero(p)),
        ring_level_coker: syn.ring_level_coker.clone(),
    })
}

#[derive(Clone, Debug)]
pub struct GradedEntry {
    /// Weight of the de Rham side, `p k`.
    pub key: Key,
    pub degree: usize,
    pub graded: InvariantFactors,
    pub derham: InvariantFactors,
}

#[derive(Clone, Debug)]
pub struct GradedReport {
    pub twist: usize,
    pub entries: Vec<GradedEntry>,
    /// Components at denominator `p^2` or more, where `gr^i` must be acyclic.
    pub acyclic_checked: usize,
    pub acyclic: bool,
}

impl GradedReport {
    pub fn passed(&self) -> bool {
        self.acyclic && self.entries.iter().all(|e| e.graded == e.derham)
    }
}

/// Weight of `|k|`, the quantity the windows are cut by.
fn size(spec: &RingSpec, k: &[Weight]) -> Weight {
    let abs: Vec<Weight> = k.iter().map(|w| if *w < Weight::from_integer(0) { -*w } else { *w }).collect();
    spec.weight_of(&abs)
}

/// `H^n(gr^i_N WΩ)_k` against `τ^{≤i}` of de Rham cohomology at weight
/// `p k`, over the weights `p k` inside the cap.
pub fn nygaard_graded_check(spec: &RingSpec, i: usize, cap: Weight) -> Result<GradedReport> {
    let model = nygaard(spec, i, 1, cap)?;
    let sat = &model.sat;
    let p = spec.p;
    let top = sat.top();
    let dr = kaehler(spec, top, cap)?;
    let field = spec.field();
    let mut entries = vec![];
    let mut acyclic_checked = 0;
    let mut acyclic = true;
    for k in sat.components.keys() {
        let pk = scale_key(k, p as i64);
        if size(spec, &pk) > cap {
            continue;
        }
        let c = sat.component(k)?;
        let mut outer = vec![];
        let mut inner = vec![];
        for n in 0..=top {
            outer.push(model.filtration_at(i, k, n)?);
            inner.push(model.filtration_at(i + 1, k, n)?);
        }
        let gr = SubquotientComplex::new(p, 0, outer, inner, c.diffs.clone())?;
        let u = denominator_exponent(p, k);
        if u >= 2 {
            acyclic_checked += 1;
            for n in 0..=top {
                acyclic &= gr.homology(n as i64)?.is_zero();
            }
            continue;
        }
        let piece = dr.piece(&PieceKey::Multi(pk.clone()));
        if piece.is_none() && spec.is_perfection() {
            continue;
        }
        for n in 0..=top {
            let derham = match piece {
                Some(pc) if n <= i => InvariantFactors::cyclic(p, 1, pc.cohomology_dim(&field, n) * spec.f),
                _ => InvariantFactors::zero(p),
            };
            entries.push(GradedEntry {
                key: pk.clone(),
                degree: n,
                graded: repeat(&gr.homology(n as i64)?, spec.f),
                derham,
            });
        }
    }
    Ok(GradedReport {
        twist: i,
        entries,
        acyclic_checked,
        acyclic,
    })
}

/// `N^{≥j}` decreases in `j`, and below degree `i_cap` the deepest step sits
/// inside `p^{i_cap-1-n} WΩ^n`, so the filtration is complete once `i_cap`
/// exceeds `n + r`.
pub fn nygaard_completeness_check(spec: &RingSpec, i_cap: usize, cap: Weight) -> Result<bool> {
    let model = nygaard(spec, i_cap, 1, cap)?;
    let sat = &model.sat;
    for k in sat.components.keys() {
        let c = sat.component(k)?;
        for n in 0..=c.top() {
            for j in 0..i_cap {
                let hi: Lattice = model.filtration_at(j + 1, k, n)?;
                if !model.filtration_at(j, k, n)?.contains(&hi) {
                    return Ok(false);
                }
            }
            if n < i_cap {
                let deepest = model.filtration_at(i_cap, k, n)?;
                if !c.lattices[n].scale((i_cap - 1 - n) as i64).contains(&deepest) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
