//! `Z/p^r(i)`: the fiber of `φ/p^i − can : N^{≥i} → WΩ` modulo `p^r`.
//!
//! In degrees `n ≠ i` the map is invertible (certified below), so the fiber
//! is computed from degree `i` alone: `H^i = ker` and `H^{i+1} = coker` of
//! `F − can` on `WΩ^i / p^r`. Weight 0 is a self-loop and is also run
//! through the full fiber complex as a cross-check; every other weight sits
//! in a chain `k, pk, p²k, ...` whose kernel vanishes and whose cokernel is
//! the ring-level Artin–Schreier–Witt term, which grows with the window.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::dieudonne::{denominator_exponent, scale_key, sigma_matrix, Key};
use crate::error::Result;
use crate::exactcore::{
    cokernel_invariants, homology, kernel, q_identity, q_inverse, q_mul, Complex, InvariantFactors, QMat, QVec,
    Ring, Weight,
};

use super::{int_rows, kron, q_scaled, reduce_mat, span_invariants, zero_key, NygaardModel};

pub const DEFAULT_SYMBOL_BUDGET: usize = 20_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertKind {
    /// `p^{n-i} F` carries `WΩ^n_k` into `p WΩ^n_{pk}`.
    Contracting,
    /// `(p^{i-1-n} V)^steps` lands in `p^r WΩ^n_k`.
    VContracting { steps: u32 },
}

#[derive(Clone, Debug)]
pub struct Certificate {
    pub degree: usize,
    pub kind: CertKind,
    pub holds: bool,
    /// Components examined.
    pub checked: usize,
}

#[derive(Clone, Debug)]
pub struct ChainCoker {
    /// Lowest member of the chain inside the window.
    pub class: Key,
    pub members: usize,
    pub kernel: InvariantFactors,
    pub cokernel: InvariantFactors,
}

#[derive(Clone, Debug)]
pub struct SyntomicComplex {
    pub ring: String,
    pub p: u64,
    pub twist: usize,
    pub level: u32,
    pub weight_cap: Weight,
    pub budget: u32,
    /// `H^j` for `j = 0..=top+1`, without the window-dependent chain part
    /// of `H^{i+1}`.
    pub cohomology: Vec<InvariantFactors>,
    /// The weight-0 fiber alone, from the full fiber complex.
    pub weight_zero: Vec<InvariantFactors>,
    /// Ring-level `coker(φ/p^i − 1)` from the nonzero weights in the window.
    pub ring_level_coker: InvariantFactors,
    pub chains: Vec<ChainCoker>,
    pub certificates: Vec<Certificate>,
    /// Generators of `H^i` at weight 0, in `W(F_q) ⊗ WΩ^i_0` coordinates.
    pub kernel_generators: Vec<QVec>,
}

impl SyntomicComplex {
    pub fn certified(&self) -> bool {
        self.certificates.iter().all(|c| c.holds)
    }

    pub fn h(&self, j: usize) -> InvariantFactors {
        self.cohomology
            .get(j)
            .cloned()
            .unwrap_or_else(|| InvariantFactors::zero(self.p))
    }

    /// Whether `H^j = 0` for every `j ∉ {i, i+1}`.
    pub fn off_degree_zero(&self) -> bool {
        self.cohomology
            .iter()
            .enumerate()
            .all(|(j, h)| j == self.twist || j == self.twist + 1 || h.is_zero())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "ring": self.ring,
            "twist": self.twist,
            "modulus": format!("{}^{}", self.p, self.level),
            "weight_cap": self.weight_cap.to_string(),
            "precision": self.budget,
            "cohomology": self.cohomology.iter().enumerate()
                .map(|(j, h)| json!({"degree": j, "group": h.to_json(), "text": h.to_string()}))
                .collect::<Vec<_>>(),
            "ring_level_coker": {
                "label": format!("ring-level coker(φ/p^{} − 1)", self.twist),
                "group": self.ring_level_coker.to_json(),
                "chains": self.chains.len(),
            },
            "certificates": self.certificates.iter().map(|c| json!({
                "degree": c.degree,
                "kind": match c.kind { CertKind::Contracting => "contracting".to_string(),
                    CertKind::VContracting { steps } => format!("V-contracting after {steps} steps") },
                "holds": c.holds,
                "checked": c.checked,
            })).collect::<Vec<_>>(),
        })
    }
}

/// `σ ⊗ 1` on `W(F_q) ⊗ WΩ^n_0`, with `σ` known modulo `p^prec`.
fn frobenius_weight_zero(p: u64, f: usize, dim: usize, prec: u32) -> QMat {
    let s = int_rows(&sigma_matrix(p, f, prec));
    kron(&s, &q_identity(dim))
}

fn coords_in(l: &crate::exactcore::Lattice, rows: &QMat) -> QMat {
    rows.iter().map(|v| l.coordinates(v)).collect()
}

/// The full fiber complex at weight 0 over `Z/p^r`, its cohomology, and
/// generators of `H^i` (kernel of the degree-`i` map) in ambient
/// coordinates.
pub fn weight_zero_fiber(model: &NygaardModel) -> Result<(Vec<InvariantFactors>, Vec<QVec>)> {
    let sat = &model.sat;
    let (p, f, r, i) = (sat.p(), sat.spec.f, model.level, model.twist);
    let zero = zero_key(sat.spec.nvars());
    let c = sat.component(&zero)?;
    let top = c.top();
    let ring = Ring::ModPrimePower { p, r };
    let prec = r + i as u32 + sat.budget;
    let idf = q_identity(f);
    let mut nb: Vec<QMat> = vec![];
    let mut wl: Vec<crate::exactcore::Lattice> = vec![];
    for n in 0..=top {
        let nl = model.filtration(&zero, n)?;
        nb.push(kron(&idf, nl.basis()));
        let full: Vec<QVec> = kron(&idf, c.lattices[n].basis());
        wl.push(crate::exactcore::Lattice::from_generators(p, full.len(), &full)?);
    }
    let dim = |n: usize| f * c.dim(n);
    // f^n = p^{n-i} (σ ⊗ 1) − 1 in ambient coordinates, then in the bases
    let mut fmaps: Vec<QMat> = vec![];
    for n in 0..=top {
        let d = dim(n);
        let mut amb = q_scaled(&frobenius_weight_zero(p, f, c.dim(n), prec), n as i64 - i as i64, p);
        for (a, row) in amb.iter_mut().enumerate() {
            row[a] -= BigRational::from_integer(1.into());
        }
        let img = q_mul(&nb[n], &amb, d, d);
        fmaps.push(coords_in(&wl[n], &img));
    }
    let mut dn: Vec<QMat> = vec![];
    let mut dw: Vec<QMat> = vec![];
    for n in 0..top {
        let amb = kron(&idf, &c.diffs[n]);
        let nl = crate::exactcore::Lattice::from_generators(p, dim(n + 1), &nb[n + 1])?;
        dn.push(coords_in(&nl, &q_mul(&nb[n], &amb, dim(n), dim(n + 1))));
        dw.push(coords_in(&wl[n + 1], &q_mul(wl[n].basis(), &amb, dim(n), dim(n + 1))));
    }
    // Fib^n = N^n ⊕ W^{n-1}, d(a, b) = (da, f(a) − db)
    let fdim = |n: usize| (if n <= top { dim(n) } else { 0 }) + (if n >= 1 { dim(n - 1) } else { 0 });
    let mut dims = vec![];
    let mut diffs = vec![];
    for n in 0..=top + 1 {
        dims.push(fdim(n));
    }
    for n in 0..=top {
        let (rows, cols) = (fdim(n), fdim(n + 1));
        let mut m: QMat = vec![vec![BigRational::zero(); cols]; rows];
        let na = dim(n);
        let na1 = if n < top { dim(n + 1) } else { 0 };
        for a in 0..na {
            if n < top {
                for b in 0..na1 {
                    m[a][b] = dn[n][a][b].clone();
                }
            }
            for b in 0..dim(n) {
                m[a][na1 + b] = fmaps[n][a][b].clone();
            }
        }
        if n >= 1 {
            for a in 0..dim(n - 1) {
                for b in 0..dim(n) {
                    m[na + a][na1 + b] = -dw[n - 1][a][b].clone();
                }
            }
        }
        diffs.push(reduce_mat(&m, p, r)?);
    }
    let cx = Complex::new(ring, 0, dims, diffs)?;
    let groups = (0..=top + 1)
        .map(|j| homology(&cx, j as i64))
        .collect::<Result<Vec<_>>>()?;
    let kernel_generators = if i <= top && dim(i) > 0 {
        let fm = reduce_mat(&fmaps[i], p, r)?;
        let ker = kernel(ring, &fm, dim(i), dim(i));
        q_mul(&int_rows(&ker), &nb[i], ker.len(), dim(i))
    } else {
        vec![]
    };
    Ok((groups, kernel_generators))
}

/// `v_p` of the smallest nonzero coordinate: `k = p^v · class`.
fn chain_position(p: u64, k: &[Weight]) -> i64 {
    k.iter()
        .filter(|w| !w.is_zero())
        .map(|w| {
            let mut v = 0i64;
            let (mut a, mut b) = (*w.numer(), *w.denom());
            while a % p as i64 == 0 {
                a /= p as i64;
                v += 1;
            }
            while b % p as i64 == 0 {
                b /= p as i64;
                v -= 1;
            }
            v
        })
        .min()
        .unwrap_or(0)
}

fn chain_class(p: u64, k: &[Weight]) -> Key {
    let v = chain_position(p, k);
    let s = Weight::new(1, 1) / pow_weight(p, v);
    k.iter().map(|w| *w * s).collect()
}

fn pow_weight(p: u64, v: i64) -> Weight {
    if v >= 0 {
        Weight::from_integer((p as i64).pow(v as u32))
    } else {
        Weight::new(1, (p as i64).pow((-v) as u32))
    }
}

/// Kernel and cokernel of `F − can` on one chain of the window, in degree
/// `i`: sources at the members, targets at the members and one step above.
fn chain_maps(model: &NygaardModel, members: &[Key]) -> Result<Option<ChainCoker>> {
    let sat = &model.sat;
    let (p, r, i) = (sat.p(), model.level, model.twist);
    let comps = members
        .iter()
        .map(|k| sat.component(k))
        .collect::<Result<Vec<_>>>()?;
    if i > comps[0].top() || comps[0].dim(i) == 0 {
        return Ok(None);
    }
    let d = comps[0].dim(i);
    let t = members.len();
    let above = sat.component(&scale_key(&members[t - 1], p as i64))?;
    let mut lats: Vec<_> = comps.iter().map(|c| c.lattices[i].clone()).collect();
    lats.push(above.lattices[i].clone());
    let mut m: QMat = vec![vec![BigRational::zero(); (t + 1) * d]; t * d];
    for j in 0..t {
        let b = lats[j].basis();
        let inv_here = q_inverse(lats[j].basis(), d).unwrap();
        let inv_up = q_inverse(lats[j + 1].basis(), d).unwrap();
        let stay = q_mul(b, &inv_here, d, d);
        let up = q_mul(b, &inv_up, d, d);
        for a in 0..d {
            for c in 0..d {
                m[j * d + a][j * d + c] = -stay[a][c].clone();
                m[j * d + a][(j + 1) * d + c] = up[a][c].clone();
            }
        }
    }
    let ring = Ring::ModPrimePower { p, r };
    let mm = reduce_mat(&m, p, r)?;
    let ker = kernel(ring, &mm, t * d, (t + 1) * d);
    let kernel_inv = span_invariants(p, r, &int_rows(&ker), t * d)?;
    let mut coker = cokernel_invariants(ring, &mm, (t + 1) * d);
    let mut rep = InvariantFactors::zero(p);
    for _ in 0..sat.spec.f {
        rep = rep.direct_sum(&coker);
    }
    coker = rep;
    let mut kr = InvariantFactors::zero(p);
    for _ in 0..sat.spec.f {
        kr = kr.direct_sum(&kernel_inv);
    }
    Ok(Some(ChainCoker {
        class: members[0].clone(),
        members: t,
        kernel: kr,
        cokernel: coker,
    }))
}

fn certificates(model: &NygaardModel) -> Result<Vec<Certificate>> {
    let sat = &model.sat;
    let (p, r, i) = (sat.p(), model.level, model.twist);
    let top = sat.top();
    let mut out = vec![];
    for n in 0..=top {
        if n == i {
            continue;
        }
        let mut holds = true;
        let mut checked = 0;
        let mut steps = 0;
        for k in sat.components.keys() {
            let c = sat.component(k)?;
            if c.dim(n) == 0 {
                continue;
            }
            checked += 1;
            if n > i {
                let up = sat.component(&scale_key(k, p as i64))?;
                holds &= up.lattices[n].scale(1).contains(&c.lattices[n].scale((n - i) as i64));
            } else {
                let limit = denominator_exponent(p, k) + r + 2;
                let target = c.lattices[n].scale(r as i64);
                let mut found = None;
                for m in 1..=limit {
                    let src = sat.component(&scale_key(k, (p as i64).pow(m)))?;
                    if target.contains(&src.lattices[n].scale(m as i64 * (i - n) as i64)) {
                        found = Some(m);
                        break;
                    }
                }
                match found {
                    Some(m) => steps = steps.max(m),
                    None => holds = false,
                }
            }
        }
        out.push(Certificate {
            degree: n,
            kind: if n > i { CertKind::Contracting } else { CertKind::VContracting { steps } },
            holds,
            checked,
        });
    }
    Ok(out)
}

pub fn syntomic(spec: &crate::derham::RingSpec, i: usize, r: u32, cap: Weight) -> Result<SyntomicComplex> {
    let model = super::nygaard(spec, i, r, cap)?;
    syntomic_of(&model, cap)
}

pub(crate) fn syntomic_of(model: &NygaardModel, cap: Weight) -> Result<SyntomicComplex> {
    let sat = &model.sat;
    let p = sat.p();
    let (weight_zero, kernel_generators) = weight_zero_fiber(model)?;
    let mut classes: BTreeMap<Key, Vec<(i64, Key)>> = BTreeMap::new();
    for k in sat.components.keys() {
        if k.iter().all(|w| w.is_zero()) {
            continue;
        }
        classes
            .entry(chain_class(p, k))
            .or_default()
            .push((chain_position(p, k), k.clone()));
    }
    let mut chains = vec![];
    for (_, mut members) in classes {
        members.sort();
        let keys: Vec<Key> = members.into_iter().map(|m| m.1).collect();
        if let Some(c) = chain_maps(model, &keys)? {
            chains.push(c);
        }
    }
    let mut cohomology = weight_zero.clone();
    let i = model.twist;
    let mut ring_level = InvariantFactors::zero(p);
    for c in &chains {
        if i < cohomology.len() {
            cohomology[i] = cohomology[i].direct_sum(&c.kernel);
        }
        ring_level = ring_level.direct_sum(&c.cokernel);
    }
    Ok(SyntomicComplex {
        ring: sat.spec.name(),
        p,
        twist: i,
        level: model.level,
        weight_cap: cap,
        budget: sat.budget,
        cohomology,
        weight_zero,
        ring_level_coker: ring_level,
        chains,
        certificates: certificates(model)?,
        kernel_generators,
    })
}
