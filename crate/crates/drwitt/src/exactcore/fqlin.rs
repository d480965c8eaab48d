//! Row-reduction over `F_q`.

use super::{Fq, FqElem};

pub type FMat = Vec<Vec<FqElem>>;

/// Reduced row echelon form of a row span.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub ncols: usize,
    pub rows: FMat,
    pub pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(k: &Fq, ncols: usize, gens: &[Vec<FqElem>]) -> Self {
        let mut e = Echelon {
            ncols,
            rows: vec![],
            pivots: vec![],
        };
        for g in gens {
            e.insert(k, g.clone());
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Remainder of `v` after clearing all pivot columns.
    pub fn reduce(&self, k: &Fq, v: &[FqElem]) -> Vec<FqElem> {
        let mut w = v.to_vec();
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            if !k.is_zero(&w[c]) {
                let f = w[c].clone();
                for j in 0..self.ncols {
                    if !k.is_zero(&row[j]) {
                        w[j] = k.sub(&w[j], &k.mul(&f, &row[j]));
                    }
                }
            }
        }
        w
    }

    pub fn contains(&self, k: &Fq, v: &[FqElem]) -> bool {
        self.reduce(k, v).iter().all(|x| k.is_zero(x))
    }

    /// Adds a generator; returns whether the rank grew.
    pub fn insert(&mut self, k: &Fq, v: Vec<FqElem>) -> bool {
        let mut w = self.reduce(k, &v);
        let Some(c) = w.iter().position(|x| !k.is_zero(x)) else {
            return false;
        };
        let inv = k.inv(&w[c]).unwrap();
        for x in w.iter_mut() {
            *x = k.mul(x, &inv);
        }
        for row in self.rows.iter_mut() {
            if !k.is_zero(&row[c]) {
                let f = row[c].clone();
                for j in 0..self.ncols {
                    row[j] = k.sub(&row[j], &k.mul(&f, &w[j]));
                }
            }
        }
        let pos = self.pivots.partition_point(|&q| q < c);
        self.pivots.insert(pos, c);
        self.rows.insert(pos, w);
        true
    }

    /// Columns without a pivot: a basis of the quotient `F_q^n / span`.
    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.ncols).filter(|c| !self.pivots.contains(c)).collect()
    }
}

/// Basis of `{x : x A = 0}` for an `m x n` matrix `A`.
pub fn left_kernel(k: &Fq, a: &FMat, m: usize, n: usize) -> FMat {
    let aug: FMat = (0..m)
        .map(|i| {
            let mut row = a[i].clone();
            row.extend((0..m).map(|j| if i == j { k.one() } else { k.zero() }));
            row
        })
        .collect();
    let e = Echelon::new(k, n + m, &aug);
    e.rows
        .into_iter()
        .filter(|r| r[..n].iter().all(|x| k.is_zero(x)))
        .map(|r| r[n..].to_vec())
        .collect()
}

pub fn vec_mat(k: &Fq, v: &[FqElem], a: &FMat, n: usize) -> Vec<FqElem> {
    let mut out = vec![k.zero(); n];
    for (x, row) in v.iter().zip(a) {
        if k.is_zero(x) {
            continue;
        }
        for j in 0..n {
            out[j] = k.add(&out[j], &k.mul(x, &row[j]));
        }
    }
    out
}
