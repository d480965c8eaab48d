use num_bigint::BigInt;
use num_traits::Zero;

use super::lattice::{q_mul, QMat};
use super::matrix::{cokernel_invariants, kernel, mat_mul, Mat};
use super::{InvariantFactors, Lattice, Ring};
use crate::error::{Error, Result};

/// Finite cochain complex of free modules `R^{dims[k]}` in degrees
/// `lo..lo+dims.len()`, with `diffs[k]` of shape `dims[k] x dims[k+1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex {
    pub ring: Ring,
    pub lo: i64,
    pub dims: Vec<usize>,
    pub diffs: Vec<Mat>,
}

impl Complex {
    pub fn new(ring: Ring, lo: i64, dims: Vec<usize>, diffs: Vec<Mat>) -> Result<Self> {
        if diffs.len() + 1 != dims.len().max(1) {
            return Err(Error::InvalidInput("need one differential between consecutive terms".into()));
        }
        for (k, d) in diffs.iter().enumerate() {
            if d.len() != dims[k] || d.iter().any(|r| r.len() != dims[k + 1]) {
                return Err(Error::InvalidInput(format!("differential {k} has the wrong shape")));
            }
        }
        let diffs: Vec<Mat> = diffs
            .into_iter()
            .map(|d| d.into_iter().map(|r| r.iter().map(|x| ring.reduce(x)).collect()).collect())
            .collect();
        for k in 0..diffs.len().saturating_sub(1) {
            let comp = mat_mul(ring, &diffs[k], &diffs[k + 1], dims[k + 1], dims[k + 2]);
            if comp.iter().flatten().any(|x| !x.is_zero()) {
                return Err(Error::NonComplex { degree: lo + k as i64 });
            }
        }
        Ok(Complex { ring, lo, dims, diffs })
    }

    pub fn dim(&self, n: i64) -> usize {
        let k = n - self.lo;
        if k < 0 || k as usize >= self.dims.len() {
            0
        } else {
            self.dims[k as usize]
        }
    }

    /// Differential leaving degree `n`, or `None` if it is the zero map
    /// between zero modules at the ends.
    pub fn diff(&self, n: i64) -> Option<&Mat> {
        let k = n - self.lo;
        if k < 0 {
            return None;
        }
        self.diffs.get(k as usize)
    }
}

/// Invariant factors of `H^n` of a complex.
pub fn homology(c: &Complex, n: i64) -> Result<InvariantFactors> {
    let ring = c.ring;
    let b = c.dim(n);
    if b == 0 {
        return Ok(InvariantFactors::zero(ring.p()));
    }
    let ker: Mat = match c.diff(n) {
        Some(d) if c.dim(n + 1) > 0 => kernel(ring, d, b, c.dim(n + 1)),
        _ => identity(b),
    };
    let k = ker.len();
    let mut stacked = ker.clone();
    if let Some(d) = c.diff(n - 1) {
        stacked.extend(d.iter().cloned());
    }
    let rel: Mat = kernel(ring, &stacked, stacked.len(), b)
        .into_iter()
        .map(|r| r[..k].to_vec())
        .collect();
    Ok(cokernel_invariants(ring, &rel, k))
}

fn identity(n: usize) -> Mat {
    (0..n)
        .map(|i| (0..n).map(|j| BigInt::from((i == j) as i32)).collect())
        .collect()
}

/// Complex of finite p-groups `outer[k] / inner[k]` with lattice maps
/// `diffs[k]` carrying both `outer` and `inner` into the next degree.
#[derive(Clone, Debug)]
pub struct SubquotientComplex {
    pub p: u64,
    pub lo: i64,
    pub outer: Vec<Lattice>,
    pub inner: Vec<Lattice>,
    pub diffs: Vec<QMat>,
}

impl SubquotientComplex {
    pub fn new(p: u64, lo: i64, outer: Vec<Lattice>, inner: Vec<Lattice>, diffs: Vec<QMat>) -> Result<Self> {
        let len = outer.len();
        if inner.len() != len || diffs.len() + 1 != len.max(1) {
            return Err(Error::InvalidInput("subquotient complex shape mismatch".into()));
        }
        for k in 0..len {
            if !outer[k].contains(&inner[k]) {
                return Err(Error::InvalidInput(format!("inner lattice escapes outer in degree {k}")));
            }
        }
        for k in 0..diffs.len() {
            let next = outer[k + 1].dim();
            for (src, tgt) in [(&outer[k], &outer[k + 1]), (&inner[k], &inner[k + 1])] {
                for v in src.image(&diffs[k], next) {
                    if !tgt.contains_vec(&v) {
                        return Err(Error::InvalidInput(format!(
                            "differential {k} does not preserve the lattices"
                        )));
                    }
                }
            }
        }
        for k in 0..diffs.len().saturating_sub(1) {
            let comp = q_mul(&diffs[k], &diffs[k + 1], outer[k + 1].dim(), outer[k + 2].dim());
            if comp.iter().flatten().any(|x| !x.is_zero()) {
                return Err(Error::NonComplex { degree: lo + k as i64 });
            }
        }
        Ok(SubquotientComplex { p, lo, outer, inner, diffs })
    }

    pub fn len(&self) -> usize {
        self.outer.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outer.is_empty()
    }

    /// Invariants of `H^n`.
    pub fn homology(&self, n: i64) -> Result<InvariantFactors> {
        let k = n - self.lo;
        if k < 0 || k as usize >= self.outer.len() {
            return Ok(InvariantFactors::zero(self.p));
        }
        let k = k as usize;
        let cycles = match self.diffs.get(k) {
            Some(d) => self.outer[k].preimage_within(d, &self.inner[k + 1]),
            None => self.outer[k].clone(),
        };
        let boundaries = if k > 0 {
            let dim = self.outer[k].dim();
            self.inner[k].sum_with(&self.outer[k - 1].image(&self.diffs[k - 1], dim))
        } else {
            self.inner[k].clone()
        };
        cycles.quotient_invariants(&boundaries)
    }

    /// Invariants of the image of `classes` (cycles of degree `n`) in `H^n`.
    pub fn image_of_cycles(&self, n: i64, classes: &[super::QVec]) -> Result<InvariantFactors> {
        let k = (n - self.lo) as usize;
        let dim = self.outer[k].dim();
        let boundaries = if k > 0 {
            self.inner[k].sum_with(&self.outer[k - 1].image(&self.diffs[k - 1], dim))
        } else {
            self.inner[k].clone()
        };
        boundaries.sum_with(classes).quotient_invariants(&boundaries)
    }
}
