//! JSON form of a filtered complex.
//!
//! ```text
//! {"p": 2, "R": 3, "window": [0, 1],
//!  "levels": [{"n": 0, "complex": {"lo": 0, "modules": [{"gens": 1, "rels": []}], "diffs": []},
//!              "map_to_prev": []}, ...]}
//! ```
//! `R` absent means integers. `map_to_prev` of level `n` is the transition
//! into level `n - 1`, one matrix per cochain degree; it is empty for the
//! lowest level.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactcore::{FinModPresentation, Mat, Ring};

use super::{FilteredComplex, PresentedComplex};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ModuleJson {
    pub gens: usize,
    #[serde(default)]
    pub rels: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ComplexJson {
    pub lo: i64,
    pub modules: Vec<ModuleJson>,
    #[serde(default)]
    pub diffs: Vec<Vec<Vec<i64>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct LevelJson {
    pub n: i64,
    pub complex: ComplexJson,
    #[serde(default)]
    pub map_to_prev: Vec<Vec<Vec<i64>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FilteredJson {
    pub p: u64,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub r: Option<u32>,
    pub window: [i64; 2],
    pub levels: Vec<LevelJson>,
}

fn to_mat(m: &[Vec<i64>]) -> Mat {
    m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

fn from_mat(m: &Mat) -> Result<Vec<Vec<i64>>> {
    m.iter()
        .map(|r| {
            r.iter()
                .map(|x| x.to_i64().ok_or_else(|| Error::InvalidInput("entry does not fit in i64".into())))
                .collect()
        })
        .collect()
}

fn complex(ring: Ring, c: &ComplexJson) -> Result<PresentedComplex> {
    let modules = c
        .modules
        .iter()
        .map(|m| {
            if m.rels.iter().any(|r| r.len() != m.gens) {
                return Err(Error::InvalidInput("relation of the wrong length".into()));
            }
            Ok(FinModPresentation::new(ring, m.gens, to_mat(&m.rels)))
        })
        .collect::<Result<Vec<_>>>()?;
    // a zero-row matrix carries no column count, so restore shapes from the modules
    let diffs = c
        .diffs
        .iter()
        .enumerate()
        .map(|(k, d)| {
            let rows = modules.get(k).map_or(0, |m| m.gens);
            if d.is_empty() && rows > 0 {
                let cols = modules.get(k + 1).map_or(0, |m| m.gens);
                return vec![vec![BigInt::from(0); cols]; rows];
            }
            to_mat(d)
        })
        .collect();
    PresentedComplex::new(ring, c.lo, modules, diffs)
}

impl FilteredJson {
    pub fn ring(&self) -> Ring {
        match self.r {
            Some(r) => Ring::ModPrimePower { p: self.p, r },
            None => Ring::Integers { p: self.p },
        }
    }

    pub fn build(&self) -> Result<FilteredComplex> {
        let ring = self.ring();
        let [lo, hi] = self.window;
        let mut levels: Vec<&LevelJson> = self.levels.iter().collect();
        levels.sort_by_key(|l| l.n);
        if levels.iter().map(|l| l.n).ne(lo..=hi) {
            return Err(Error::InvalidInput("levels must cover the window exactly once".into()));
        }
        let complexes = levels
            .iter()
            .map(|l| complex(ring, &l.complex))
            .collect::<Result<Vec<_>>>()?;
        let mut transitions = vec![];
        for j in 1..levels.len() {
            let (a, b) = (&complexes[j], &complexes[j - 1]);
            let maps = &levels[j].map_to_prev;
            if maps.len() != a.len() {
                return Err(Error::InvalidInput(format!("level {} needs one map_to_prev per degree", levels[j].n)));
            }
            let t = maps
                .iter()
                .enumerate()
                .map(|(k, m)| {
                    let deg = a.lo + k as i64;
                    if m.is_empty() {
                        vec![vec![BigInt::from(0); b.gens(deg)]; a.gens(deg)]
                    } else {
                        to_mat(m)
                    }
                })
                .collect();
            transitions.push(t);
        }
        FilteredComplex::new(ring, (lo, hi), complexes, transitions)
    }
}

pub fn filtered_from_json(text: &str) -> Result<FilteredComplex> {
    let parsed: FilteredJson = serde_json::from_str(text).map_err(|e| Error::ParseError {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    parsed.build()
}

pub fn filtered_to_json(f: &FilteredComplex) -> Result<FilteredJson> {
    let r = match f.ring {
        Ring::ModPrimePower { r, .. } => Some(r),
        Ring::Integers { .. } => None,
    };
    let levels = f
        .levels
        .iter()
        .enumerate()
        .map(|(j, c)| {
            Ok(LevelJson {
                n: f.window.0 + j as i64,
                complex: ComplexJson {
                    lo: c.lo,
                    modules: c
                        .modules
                        .iter()
                        .map(|m| {
                            Ok(ModuleJson {
                                gens: m.gens,
                                rels: from_mat(&m.rels)?,
                            })
                        })
                        .collect::<Result<_>>()?,
                    diffs: c.diffs.iter().map(from_mat).collect::<Result<_>>()?,
                },
                map_to_prev: if j == 0 {
                    vec![]
                } else {
                    f.transitions[j - 1].iter().map(from_mat).collect::<Result<_>>()?
                },
            })
        })
        .collect::<Result<_>>()?;
    Ok(FilteredJson {
        p: f.ring.p(),
        r,
        window: [f.window.0, f.window.1],
        levels,
    })
}
