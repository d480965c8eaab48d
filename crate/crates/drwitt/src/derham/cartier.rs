//! Inverse Cartier maps and the Cartier-smoothness check.

use std::collections::BTreeMap;

use num_integer::Integer;
use serde_json::{json, Value};

use super::complex::{build_complex, DeRhamComplex, PieceKey, PERFECTION_DEPTH};
use super::forms;
use super::spec::{Kind, RingSpec};
use crate::error::{Error, Result};
use crate::exactcore::{vec_mat, FMat, InvariantFactors, Weight};

pub fn kaehler(spec: &RingSpec, i_max: usize, weight_cap: Weight) -> Result<DeRhamComplex> {
    build_complex(spec, i_max, weight_cap, 0)
}

/// `H^i` per weight; each piece is an `F_q`-vector space, i.e. `(Z/p)^{f·dim}`.
pub fn derham_cohomology(spec: &RingSpec, i: usize, weight_cap: Weight) -> Result<BTreeMap<Weight, InvariantFactors>> {
    let c = kaehler(spec, i, weight_cap)?;
    Ok(cohomology_by_weight(&c, i))
}

pub fn cohomology_by_weight(c: &DeRhamComplex, i: usize) -> BTreeMap<Weight, InvariantFactors> {
    let mut out: BTreeMap<Weight, usize> = BTreeMap::new();
    for piece in &c.pieces {
        *out.entry(piece.weight).or_default() += piece.cohomology_dim(&c.field, i);
    }
    out.into_iter()
        .map(|(w, d)| (w, InvariantFactors::cyclic(c.spec.p, 1, d * c.spec.f)))
        .collect()
}

/// One block `Ω^i_{S^{(1)}}[source] → Ω^i_S[target]` of the inverse Cartier
/// map, on representatives.
#[derive(Clone, Debug)]
pub struct CartierBlock {
    pub degree: usize,
    pub source: PieceKey,
    pub source_weight: Weight,
    pub target: PieceKey,
    pub target_weight: Weight,
    /// Rows: source basis; columns: target `Ω^i` basis.
    pub matrix: FMat,
    /// Image rows composed with `d` vanish.
    pub closed: bool,
    pub source_dim: usize,
    pub target_h_dim: usize,
    /// Rank of the image modulo boundaries.
    pub image_rank: usize,
}

impl CartierBlock {
    pub fn injective(&self) -> bool {
        self.image_rank == self.source_dim
    }

    pub fn surjective(&self) -> bool {
        self.image_rank == self.target_h_dim
    }

    pub fn bijective(&self) -> bool {
        self.closed && self.injective() && self.surjective()
    }
}

/// Blocks in degree `i` for every source piece whose twist is computed.
pub fn cartier_blocks(c: &DeRhamComplex, i: usize) -> Result<Vec<CartierBlock>> {
    let k = &c.field;
    let active = c.active();
    let mut out = vec![];
    for src in &c.pieces {
        let tkey = c.twist(&src.key);
        let Some(tgt) = c.piece(&tkey) else { continue };
        let mut matrix = vec![];
        for b in 0..src.dim(i) {
            let rep = src.rep(i, b).clone();
            let img = forms::cartier_inverse(k, &forms::monomial(k, rep.0, rep.1), active);
            let row = tgt.coords(k, i, &img).ok_or_else(|| {
                Error::InvalidInput(format!("inverse Cartier left the target piece {tkey}"))
            })?;
            matrix.push(row);
        }
        let closed = i >= tgt.diffs.len()
            || matrix
                .iter()
                .all(|r| vec_mat(k, r, &tgt.diffs[i], tgt.dim(i + 1)).iter().all(|x| k.is_zero(x)));
        let bnd = tgt.boundaries(k, i);
        let mut span = bnd.clone();
        for r in &matrix {
            span.insert(k, r.clone());
        }
        out.push(CartierBlock {
            degree: i,
            source: src.key.clone(),
            source_weight: src.weight,
            target: tkey,
            target_weight: tgt.weight,
            closed,
            source_dim: src.dim(i),
            target_h_dim: tgt.cohomology_dim(k, i),
            image_rank: span.rank() - bnd.rank(),
            matrix,
        });
    }
    Ok(out)
}

pub fn inverse_cartier(spec: &RingSpec, i: usize, weight_cap: Weight) -> Result<Vec<CartierBlock>> {
    let c = kaehler(spec, i, weight_cap)?;
    cartier_blocks(&c, i)
}

/// Whether a target piece is the twist of some piece inside the computed
/// range; `None` when the preimage would fall outside it.
fn is_twist_image(c: &DeRhamComplex, key: &PieceKey) -> Option<bool> {
    let p = c.spec.p as i64;
    match key {
        PieceKey::Graded(w) => Some(w.to_integer().is_multiple_of(&p)),
        PieceKey::Multi(a) => {
            let pw = Weight::from_integer(p);
            let pre: Vec<Weight> = a
                .iter()
                .enumerate()
                .map(|(j, x)| if j >= c.frozen { x / pw } else { *x })
                .collect();
            let depth = if c.spec.is_perfection() { PERFECTION_DEPTH } else { 0 };
            let limit = p.pow(depth);
            let fits = pre.iter().all(|x| limit % x.denom() == 0);
            if c.spec.is_perfection() && !fits {
                return None;
            }
            Some(fits)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IsoEntry {
    pub degree: usize,
    pub source: Option<String>,
    pub source_weight: Option<Weight>,
    pub target: String,
    pub target_weight: Weight,
    pub iso: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub degree: usize,
    pub weight: Weight,
    pub piece: String,
    pub reason: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    ConsistentUpToCaps,
    Fails,
}

#[derive(Clone, Debug)]
pub struct CartierReport {
    pub ring: String,
    pub i_max: usize,
    pub weight_cap: Weight,
    pub iso_per_weight: Vec<IsoEntry>,
    pub witnesses: Vec<Witness>,
    pub verdict: Verdict,
    pub flatness: String,
}

impl CartierReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::ConsistentUpToCaps
    }

    pub fn verdict_text(&self) -> String {
        match self.verdict {
            Verdict::ConsistentUpToCaps => "consistent-with-Cartier-smooth up to caps".into(),
            Verdict::Fails => {
                let w = &self.witnesses[0];
                format!("fails: degree {} weight {} ({})", w.degree, w.weight, w.reason)
            }
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "ring": self.ring,
            "i_max": self.i_max,
            "weight_cap": self.weight_cap.to_string(),
            "verdict": self.verdict_text(),
            "passed": self.passed(),
            "flatness": self.flatness,
            "iso_per_weight": self.iso_per_weight.iter().map(|e| json!({
                "degree": e.degree,
                "source": e.source,
                "source_weight": e.source_weight.map(|w| w.to_string()),
                "target": e.target,
                "target_weight": e.target_weight.to_string(),
                "iso": e.iso,
            })).collect::<Vec<_>>(),
            "witnesses": self.witnesses.iter().map(|w| json!({
                "degree": w.degree,
                "weight": w.weight.to_string(),
                "piece": w.piece,
                "reason": w.reason,
            })).collect::<Vec<_>>(),
        })
    }
}

fn flatness_note(spec: &RingSpec) -> String {
    match spec.base_kind() {
        Kind::Quotient => "not checked: only the Cartier-map clause is reported".into(),
        _ => "known for this kind (smooth or perfect)".into(),
    }
}

pub(crate) fn check_complex(c: &DeRhamComplex) -> Result<CartierReport> {
    let k = &c.field;
    let mut entries = vec![];
    let mut witnesses = vec![];
    for i in 0..=c.i_max {
        for b in cartier_blocks(c, i)? {
            let iso = b.bijective();
            if !iso {
                let reason = if !b.closed {
                    "image not closed"
                } else if !b.injective() {
                    "not injective"
                } else {
                    "not surjective"
                };
                witnesses.push(Witness {
                    degree: i,
                    weight: b.source_weight,
                    piece: b.source.to_string(),
                    reason: reason.into(),
                });
            }
            entries.push(IsoEntry {
                degree: i,
                source: Some(b.source.to_string()),
                source_weight: Some(b.source_weight),
                target: b.target.to_string(),
                target_weight: b.target_weight,
                iso,
            });
        }
        // Targets outside the image of the twist must carry no cohomology.
        for t in &c.pieces {
            if is_twist_image(c, &t.key) != Some(false) {
                continue;
            }
            let h = t.cohomology_dim(k, i);
            if h > 0 {
                witnesses.push(Witness {
                    degree: i,
                    weight: t.weight,
                    piece: t.key.to_string(),
                    reason: format!("H^{i} of dimension {h} outside the image"),
                });
            }
            entries.push(IsoEntry {
                degree: i,
                source: None,
                source_weight: None,
                target: t.key.to_string(),
                target_weight: t.weight,
                iso: h == 0,
            });
        }
    }
    witnesses.sort_by(|a, b| (a.degree, a.weight).cmp(&(b.degree, b.weight)));
    let verdict = if witnesses.is_empty() {
        Verdict::ConsistentUpToCaps
    } else {
        Verdict::Fails
    };
    Ok(CartierReport {
        ring: c.spec.name(),
        i_max: c.i_max,
        weight_cap: c.weight_cap,
        iso_per_weight: entries,
        witnesses,
        verdict,
        flatness: flatness_note(&c.spec),
    })
}

pub fn cartier_smooth_check(spec: &RingSpec, i_max: usize, weight_cap: Weight) -> Result<CartierReport> {
    check_complex(&kaehler(spec, i_max, weight_cap)?)
}

fn is_prefix_base(a: &RingSpec, b: &RingSpec) -> Result<()> {
    let ok_kinds = matches!(
        (a.kind.clone(), b.kind.clone()),
        (Kind::FiniteField, Kind::Poly | Kind::Laurent) | (Kind::Poly | Kind::Laurent, Kind::Poly | Kind::Laurent)
    );
    if !ok_kinds || a.p != b.p || a.f != b.f {
        return Err(Error::UnsupportedBaseChange(format!(
            "{} is not a monomial extension of {}",
            b.name(),
            a.name()
        )));
    }
    if b.vars.len() < a.vars.len() || b.vars[..a.vars.len()] != a.vars[..] {
        return Err(Error::UnsupportedBaseChange("base variables must be a prefix of the algebra's".into()));
    }
    for j in 0..a.nvars() {
        let inv_a = a.kind == Kind::Laurent && a.inverted[j];
        let inv_b = b.kind == Kind::Laurent && b.inverted[j];
        if inv_a != inv_b {
            return Err(Error::UnsupportedBaseChange(format!(
                "variable {} is inverted on one side only",
                a.vars[j].0
            )));
        }
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct RelativeReport {
    pub base: String,
    pub algebra: String,
    pub blocks: Vec<CartierBlock>,
    pub report: CartierReport,
}

/// Cartier check for `B` over `A`, where `B` adjoins variables to `A`.
pub fn relative_cartier_check(a: &RingSpec, b: &RingSpec, i_max: usize, weight_cap: Weight) -> Result<RelativeReport> {
    is_prefix_base(a, b)?;
    let c = build_complex(b, i_max, weight_cap, a.nvars())?;
    let mut blocks = vec![];
    for i in 0..=i_max {
        blocks.extend(cartier_blocks(&c, i)?);
    }
    let mut report = check_complex(&c)?;
    report.ring = format!("{} over {}", b.name(), a.name());
    Ok(RelativeReport {
        base: a.name(),
        algebra: b.name(),
        blocks,
        report,
    })
}

#[derive(Clone, Debug)]
pub struct BaseChangeReport {
    pub before: RelativeReport,
    pub after: RelativeReport,
    /// Per block compared: the base-changed map equals the map computed
    /// for the base-changed algebra.
    pub squares_commute: bool,
    pub compared_blocks: usize,
    pub flatness: String,
}

impl BaseChangeReport {
    pub fn passed(&self) -> bool {
        self.squares_commute && self.before.report.passed() && self.after.report.passed()
    }
}

/// Base change along `A → A'`: a field extension `F_p ⊂ F_q`, or inverting
/// some of `A`'s variables.
pub fn base_change_check(
    a: &RingSpec,
    a2: &RingSpec,
    b: &RingSpec,
    i_max: usize,
    weight_cap: Weight,
) -> Result<BaseChangeReport> {
    let b2 = match (&a.kind, &a2.kind) {
        (Kind::FiniteField, Kind::FiniteField) if a.p == a2.p && a.f == 1 => b.clone().with_field_degree(a2.f),
        (Kind::Poly | Kind::Laurent, Kind::Laurent) if a.p == a2.p && a.f == a2.f && a.vars == a2.vars => {
            let mut b2 = b.clone();
            if b2.kind == Kind::Poly {
                b2.kind = Kind::Laurent;
                b2.inverted = vec![false; b.nvars()];
            }
            for j in 0..a.nvars() {
                b2.inverted[j] = a2.inverted[j];
            }
            b2
        }
        _ => {
            return Err(Error::UnsupportedBaseChange(format!("{} -> {}", a.name(), a2.name())));
        }
    };
    let before = relative_cartier_check(a, b, i_max, weight_cap)?;
    let after = relative_cartier_check(a2, &b2, i_max, weight_cap)?;
    let k2 = b2.field();
    let embed = |m: &FMat| -> FMat {
        // entries of the smaller field are prime-field constants here
        m.iter()
            .map(|r| r.iter().map(|x| k2.from_int(x.0[0] as i64)).collect())
            .collect()
    };
    let after_map: BTreeMap<(usize, PieceKey), &CartierBlock> =
        after.blocks.iter().map(|bl| ((bl.degree, bl.source.clone()), bl)).collect();
    let mut compared = 0;
    let mut commute = true;
    for bl in &before.blocks {
        let Some(other) = after_map.get(&(bl.degree, bl.source.clone())) else {
            continue;
        };
        compared += 1;
        if other.target != bl.target || embed(&bl.matrix) != other.matrix || other.bijective() != bl.bijective() {
            commute = false;
        }
    }
    Ok(BaseChangeReport {
        before,
        after,
        squares_commute: commute && compared > 0,
        compared_blocks: compared,
        flatness: "not checked: flatness of A -> A' is assumed for the curated base changes".into(),
    })
}
