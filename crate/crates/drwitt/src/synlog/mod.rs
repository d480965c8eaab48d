//! Nygaard filtration, divided Frobenius, logarithmic forms and the
//! syntomic complexes `Z/p^r(i)` of the curated rings.
//!
//! Everything lives in the colimit coordinates of [`crate::dieudonne`]:
//! `F` is the identity from weight `k` to `p k`, `V` is `p` times the
//! identity back, and on `W(F_q)` both are twisted by `σ^{±1}`.

mod checks;
mod log;
mod syntomic;

pub use checks::{
    nygaard_completeness_check, nygaard_graded_check, verify_fundamental_seq, FundamentalReport, GradedEntry,
    GradedReport, LogVerdict,
};
pub use log::{dlog_vector, log_lattice, log_lattice_with_budget, log_mod_compat, LogLattice, UnitSymbol};
pub use syntomic::{
    syntomic, weight_zero_fiber, CertKind, Certificate, ChainCoker, SyntomicComplex, DEFAULT_SYMBOL_BUDGET,
};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::derham::RingSpec;
use crate::dieudonne::{lift_with_frobenius, precision_budget, saturate_with_budget, scale_key, DieudonneComplex, Key};
use crate::error::{Error, Result};
use crate::exactcore::{pow_big, q_ppow, q_scale, Lattice, Mat, QMat, QVec, Weight};

/// `N^{≥i}` of the saturated complex over a weight window.
#[derive(Clone, Debug)]
pub struct NygaardModel {
    pub twist: usize,
    pub level: u32,
    pub sat: DieudonneComplex,
}

/// Saturated complex on the window used by the syntomic pipeline:
/// denominators up to `p^{r+1}`, budget `r + max(i, top) + 2 + extra`.
pub(crate) fn window(spec: &RingSpec, i: usize, r: u32, cap: Weight, extra: u32) -> Result<DieudonneComplex> {
    let lift = lift_with_frobenius(spec, cap)?;
    let budget = precision_budget(r, i.max(lift.top())) + extra;
    saturate_with_budget(&lift, cap, r + 2, budget)
}

pub fn nygaard(spec: &RingSpec, i: usize, r: u32, cap: Weight) -> Result<NygaardModel> {
    Ok(NygaardModel {
        twist: i,
        level: r,
        sat: window(spec, i, r, cap, 0)?,
    })
}

impl NygaardModel {
    pub fn p(&self) -> u64 {
        self.sat.p()
    }

    /// `N^{≥j,n}_k`: all of `WΩ^n_k` for `n ≥ j`, and the image of
    /// `p^{j-1-n} V` on `WΩ^n_{pk}`, i.e. `p^{j-n} M^n_{pk}`, below.
    pub fn filtration_at(&self, j: usize, k: &[Weight], n: usize) -> Result<Lattice> {
        if n >= j {
            return Ok(self.sat.component(k)?.lattices[n].clone());
        }
        let t = self.sat.component(&scale_key(k, self.p() as i64))?;
        Ok(t.lattices[n].scale((j - n) as i64))
    }

    pub fn filtration(&self, k: &[Weight], n: usize) -> Result<Lattice> {
        self.filtration_at(self.twist, k, n)
    }

    /// The parametrization `p^{i-1-n} V : WΩ^n_{pk} -> N^{≥i,n}_k` for `n < i`.
    pub fn parametrization(&self, k: &[Weight], n: usize) -> Result<QMat> {
        let dim = self.sat.component(k)?.dim(n);
        Ok(scalar(dim, q_ppow(self.p(), self.twist as i64 - n as i64)))
    }

    /// `φ/p^i = p^{n-i} F` from weight `k` to weight `p k`.
    pub fn divided_frobenius(&self, k: &[Weight], n: usize) -> Result<QMat> {
        let dim = self.sat.component(k)?.dim(n);
        Ok(scalar(dim, q_ppow(self.p(), n as i64 - self.twist as i64)))
    }

    /// Coordinates of the `N^{≥i,n}_k` basis in the basis of `WΩ^n_k`; an
    /// integral matrix.
    pub fn inclusion(&self, k: &[Weight], n: usize) -> Result<QMat> {
        let outer = &self.sat.component(k)?.lattices[n];
        let inner = self.filtration(k, n)?;
        Ok(inner.basis().iter().map(|v| outer.coordinates(v)).collect())
    }

    /// `φ/p^i` on the basis of `N^{≥i,n}_k`, written in the basis of
    /// `WΩ^n_{pk}`; every entry must be integral.
    pub fn divided_frobenius_on_basis(&self, k: &[Weight], n: usize) -> Result<QMat> {
        let src = self.filtration(k, n)?;
        let pk = scale_key(k, self.p() as i64);
        let tgt = self.sat.component(&pk)?.lattices[n].clone();
        let phi = self.divided_frobenius(k, n)?;
        let img = src.image(&phi, src.dim());
        let out: QMat = img.iter().map(|v| tgt.coordinates(v)).collect();
        for row in &out {
            if !crate::exactcore::q_is_integral(row, self.p()) {
                return Err(Error::InexactDivision {
                    exponent: self.twist as u32,
                    context: format!("φ/p^{} at {k:?} degree {n}", self.twist),
                });
            }
        }
        Ok(out)
    }
}

pub(crate) fn scalar(dim: usize, s: BigRational) -> QMat {
    let mut m = crate::exactcore::q_zero(dim, dim);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = s.clone();
    }
    m
}

/// A `p`-integral rational reduced mod `p^r`.
pub(crate) fn reduce_mod(x: &BigRational, p: u64, r: u32) -> Result<BigInt> {
    let m = pow_big(p, r);
    let den = x.denom().mod_floor(&m);
    let g = den.extended_gcd(&m);
    if !g.gcd.is_one() {
        return Err(Error::InexactDivision {
            exponent: r,
            context: format!("{x} is not p-integral"),
        });
    }
    Ok((x.numer() * g.x).mod_floor(&m))
}

pub(crate) fn reduce_mat(a: &QMat, p: u64, r: u32) -> Result<Mat> {
    a.iter()
        .map(|row| row.iter().map(|x| reduce_mod(x, p, r)).collect())
        .collect()
}

/// Invariants of the subgroup of `(Z/p^r)^dim` spanned by `rows`.
pub(crate) fn span_invariants(p: u64, r: u32, rows: &[QVec], dim: usize) -> Result<crate::exactcore::InvariantFactors> {
    if dim == 0 {
        return Ok(crate::exactcore::InvariantFactors::zero(p));
    }
    let floor = Lattice::scaled_standard(p, dim, r as i64);
    floor.sum_with(rows).quotient_invariants(&floor)
}

pub(crate) fn int_rows(m: &Mat) -> QMat {
    m.iter()
        .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect()
}

/// Kronecker product `a ⊗ b` with the `a` index outermost.
pub(crate) fn kron(a: &QMat, b: &QMat) -> QMat {
    let (fa, fb) = (a.len(), b.len());
    let ca = a.first().map_or(0, |r| r.len());
    let cb = b.first().map_or(0, |r| r.len());
    let mut out = crate::exactcore::q_zero(fa * fb, ca * cb);
    for s in 0..fa {
        for t in 0..ca {
            if a[s][t].is_zero() {
                continue;
            }
            for i in 0..fb {
                for j in 0..cb {
                    out[s * fb + i][t * cb + j] = &a[s][t] * &b[i][j];
                }
            }
        }
    }
    out
}

pub(crate) fn zero_key(n: usize) -> Key {
    vec![Weight::zero(); n]
}

pub(crate) fn q_scaled(a: &QMat, e: i64, p: u64) -> QMat {
    q_scale(a, &q_ppow(p, e))
}
