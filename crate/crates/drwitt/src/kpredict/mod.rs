//! Predicted K-groups: Quillen's table for finite fields and the
//! logarithmic de Rham–Witt description for the curated rings.
//!
//! Nothing here computes K-theory; every row says where it comes from.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::derham::{Kind, RingSpec};
use crate::error::{Error, Result};
use crate::exactcore::{InvariantFactors, Weight};
use crate::synlog::{log_lattice, syntomic};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Modulus {
    /// `K_i(S)/p^r`.
    PPower(u32),
    /// `K_i(S; Z_p)`.
    PAdic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Quillen,
    LogForms,
    Hiller,
    /// Quillen's computation for `F_q`, `q = p^f`, `f > 1`.
    Background,
}

impl Provenance {
    pub fn tag(self) -> &'static str {
        match self {
            Provenance::Quillen => "quillen",
            Provenance::LogForms => "log-forms",
            Provenance::Hiller => "hiller",
            Provenance::Background => "background",
        }
    }
}

/// An integral abelian group `Z^free ⊕ ⊕ Z/n_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegralGroup {
    pub free_rank: usize,
    pub orders: Vec<BigInt>,
}

impl IntegralGroup {
    pub fn zero() -> Self {
        IntegralGroup {
            free_rank: 0,
            orders: vec![],
        }
    }

    pub fn text(&self) -> String {
        let mut parts: Vec<String> = self.orders.iter().map(|n| format!("Z/{n}")).collect();
        if self.free_rank == 1 {
            parts.push("Z".into());
        } else if self.free_rank > 1 {
            parts.push(format!("Z^{}", self.free_rank));
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    fn valuations(&self, p: u64) -> Vec<u32> {
        let p = BigInt::from(p);
        self.orders
            .iter()
            .map(|n| {
                let mut n = n.clone();
                let mut v = 0;
                while !n.is_zero() && (&n % &p).is_zero() {
                    n /= &p;
                    v += 1;
                }
                v
            })
            .collect()
    }

    /// `G ⊗ Z/p^r`.
    pub fn tensor(&self, p: u64, r: u32) -> InvariantFactors {
        let mut t: Vec<u32> = self.valuations(p).into_iter().map(|v| v.min(r)).collect();
        t.extend(std::iter::repeat(r).take(self.free_rank));
        InvariantFactors::new(p, t, 0)
    }

    /// `G[p^r]`.
    pub fn torsion(&self, p: u64, r: u32) -> InvariantFactors {
        InvariantFactors::new(p, self.valuations(p).into_iter().map(|v| v.min(r)).collect(), 0)
    }

    /// `G ⊗ Z_p`.
    pub fn complete(&self, p: u64) -> InvariantFactors {
        InvariantFactors::new(p, self.valuations(p), self.free_rank)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KRow {
    pub degree: usize,
    pub modulus: Modulus,
    pub group: InvariantFactors,
    pub provenance: Provenance,
    /// The integral group, for Quillen rows.
    pub integral: Option<IntegralGroup>,
    /// Unchanged when the level is raised by one.
    pub stable: bool,
}

#[derive(Clone, Debug)]
pub struct KTable {
    pub ring: String,
    pub p: u64,
    pub rows: Vec<KRow>,
    /// Each `K_i` is p-torsion free.
    pub p_torsion_free: bool,
    /// Set when the ring is not local and the rows describe the sheaf-level
    /// groups rather than the ring itself.
    pub sheaf_caveat: bool,
}

impl KTable {
    pub fn row(&self, degree: usize, modulus: Modulus) -> Option<&KRow> {
        self.rows.iter().find(|r| r.degree == degree && r.modulus == modulus)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "ring": self.ring,
            "p": self.p,
            "p_torsion_free": self.p_torsion_free,
            "sheaf_level_caveat": self.sheaf_caveat,
            "rows": self.rows.iter().map(|r| json!({
                "degree": r.degree,
                "modulus": match r.modulus {
                    Modulus::PPower(e) => format!("p^{e}"),
                    Modulus::PAdic => "Z_p".to_string(),
                },
                "group": r.group.to_json(),
                "text": r.group.to_string(),
                "integral": r.integral.as_ref().map(|g| g.text()),
                "provenance": r.provenance.tag(),
                "stable": r.stable,
            })).collect::<Vec<_>>(),
        })
    }

    pub fn to_markdown(&self) -> String {
        let mut s = format!("K-groups of {} (p = {})\n\n", self.ring, self.p);
        s += "| i | modulus | group | integral | provenance | stable |\n";
        s += "|---|---------|-------|----------|------------|--------|\n";
        for r in &self.rows {
            let modulus = match r.modulus {
                Modulus::PPower(e) => format!("p^{e}"),
                Modulus::PAdic => "Z_p".into(),
            };
            s += &format!(
                "| {} | {} | {} | {} | {} | {} |\n",
                r.degree,
                modulus,
                r.group,
                r.integral.as_ref().map_or("".into(), |g| g.text()),
                r.provenance.tag(),
                if r.stable { "yes" } else { "no" }
            );
        }
        if self.sheaf_caveat {
            s += "\nThe ring is not local: rows describe the sheaf-level log forms.\n";
        }
        s
    }
}

/// `K_i(F_q)`: `Z` in degree 0, `Z/(q^j - 1)` in degree `2j - 1`, zero in
/// other positive even degrees.
pub fn quillen_integral(q: &BigInt, i: usize) -> IntegralGroup {
    if i == 0 {
        IntegralGroup {
            free_rank: 1,
            orders: vec![],
        }
    } else if i % 2 == 1 {
        let j = (i as u32 + 1) / 2;
        IntegralGroup {
            free_rank: 0,
            orders: vec![q.pow(j) - BigInt::one()],
        }
    } else {
        IntegralGroup::zero()
    }
}

/// Quillen's table for `F_{p^f}` in degrees `range`, with the mod `p^r`
/// and p-adic rows derived from the integral groups.
pub fn quillen_table(p: u64, f: usize, range: std::ops::RangeInclusive<usize>, r: u32) -> KTable {
    let q = BigInt::from(p).pow(f as u32);
    let provenance = if f == 1 { Provenance::Quillen } else { Provenance::Background };
    let mut rows = vec![];
    for i in range {
        let g = quillen_integral(&q, i);
        // K_i/p^r sits between K_i ⊗ Z/p^r and K_{i-1}[p^r]
        let tor = if i > 0 { quillen_integral(&q, i - 1).torsion(p, r) } else { InvariantFactors::zero(p) };
        rows.push(KRow {
            degree: i,
            modulus: Modulus::PPower(r),
            group: g.tensor(p, r).direct_sum(&tor),
            provenance,
            integral: Some(g.clone()),
            stable: true,
        });
        rows.push(KRow {
            degree: i,
            modulus: Modulus::PAdic,
            group: g.complete(p),
            provenance,
            integral: Some(g),
            stable: true,
        });
    }
    let ring = if f == 1 { format!("F_{p}") } else { format!("F_{q}") };
    KTable {
        ring,
        p,
        rows,
        p_torsion_free: true,
        sheaf_caveat: false,
    }
}

fn truncate(g: &InvariantFactors, r: u32) -> InvariantFactors {
    InvariantFactors::new(g.p, g.torsion.iter().map(|&a| a.min(r)).collect(), g.free_rank)
}

/// Local rings of the curated family: finite fields and perfections.
pub fn is_local_type(spec: &RingSpec) -> bool {
    matches!(spec.base_kind(), Kind::FiniteField) || spec.is_perfection()
}

/// Rows `K_i(S)/p^r ≅ W_rΩ^i_log` and `K_i(S; Z_p) ≅ WΩ^i_log` from the log
/// lattices. Non-local polynomial and Laurent rings get the sheaf caveat;
/// quotients are refused.
pub fn k_predict(spec: &RingSpec, range: std::ops::RangeInclusive<usize>, r: u32) -> Result<KTable> {
    if matches!(spec.base_kind(), Kind::Quotient) {
        return Err(Error::NotLocalType(format!("{} has no log-form prediction here", spec.name())));
    }
    let p = spec.p;
    let mut rows = vec![];
    for i in range {
        let at = log_lattice(spec, i, r)?.invariants;
        let above = log_lattice(spec, i, r + 1)?.invariants;
        let stable = truncate(&above, r) == at;
        // a free Z_p-module exactly when every factor at level r is full
        let full = at.torsion.iter().filter(|&&a| a == r).count();
        let full_above = above.torsion.iter().filter(|&&a| a == r + 1).count();
        rows.push(KRow {
            degree: i,
            modulus: Modulus::PPower(r),
            group: at.clone(),
            provenance: Provenance::LogForms,
            integral: None,
            stable,
        });
        rows.push(KRow {
            degree: i,
            modulus: Modulus::PAdic,
            group: InvariantFactors::new(p, vec![], full),
            provenance: Provenance::LogForms,
            integral: None,
            stable: stable && full == at.torsion.len() && full_above == full,
        });
    }
    Ok(KTable {
        ring: spec.name(),
        p,
        rows,
        p_torsion_free: true,
        sheaf_caveat: !is_local_type(spec),
    })
}

/// `K_i(S)/p = 0` for `i ≥ 1` on a perfect ring, read off the log pipeline.
pub fn hiller_check(spec: &RingSpec, range: std::ops::RangeInclusive<usize>, r: u32) -> Result<bool> {
    if !(spec.is_perfection() || matches!(spec.kind, Kind::FiniteField)) {
        return Err(Error::UnsupportedKind(format!("{} is not perfect", spec.name())));
    }
    for i in range.filter(|&i| i >= 1) {
        for level in 1..=r {
            if !log_lattice(spec, i, level)?.invariants.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The predictions for a perfect ring with the Hiller tag on the vanishing rows.
pub fn hiller_table(spec: &RingSpec, range: std::ops::RangeInclusive<usize>, r: u32) -> Result<KTable> {
    let mut t = k_predict(spec, range, r)?;
    for row in &mut t.rows {
        if row.degree >= 1 && row.group.is_zero() {
            row.provenance = Provenance::Hiller;
        }
    }
    Ok(t)
}

#[derive(Clone, Debug)]
pub struct TriangleEntry {
    pub degree: usize,
    pub quillen: InvariantFactors,
    pub predicted: InvariantFactors,
    pub syntomic: InvariantFactors,
}

impl TriangleEntry {
    pub fn agrees(&self) -> bool {
        self.quillen == self.predicted && self.predicted == self.syntomic
    }
}

/// Quillen mod `p^r`, the log-form prediction and `H^i(Z/p^r(i))` for `F_p`.
pub fn consistency_triangle(p: u64, range: std::ops::RangeInclusive<usize>, r: u32) -> Result<Vec<TriangleEntry>> {
    let fp = RingSpec::finite_field(p, 1);
    let q = quillen_table(p, 1, range.clone(), r);
    let k = k_predict(&fp, range.clone(), r)?;
    let mut out = vec![];
    for i in range {
        let z = syntomic(&fp, i, r, Weight::from_integer(0))?;
        out.push(TriangleEntry {
            degree: i,
            quillen: q.row(i, Modulus::PPower(r)).unwrap().group.clone(),
            predicted: k.row(i, Modulus::PPower(r)).unwrap().group.clone(),
            syntomic: z.h(i),
        });
    }
    Ok(out)
}

/// Order of the prime-to-p part of `K_{2j-1}(F_q)`.
pub fn prime_to_p_order(p: u64, f: usize, i: usize) -> BigInt {
    let g = quillen_integral(&BigInt::from(p).pow(f as u32), i);
    let pb = BigInt::from(p);
    g.orders
        .iter()
        .map(|n| {
            let mut n = n.clone();
            while !n.is_zero() && n.mod_floor(&pb).is_zero() {
                n /= &pb;
            }
            n
        })
        .fold(BigInt::one(), |a, b| a * b)
}
