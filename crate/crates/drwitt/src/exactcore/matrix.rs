//! Dense matrices over `Z` and `Z/p^R`, row-vector convention: a map
//! `R^m -> R^n` is an `m x n` matrix acting by `x |-> x A`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{valuation, InvariantFactors, Ring};

pub type Mat = Vec<Vec<BigInt>>;

pub fn mat_mul(ring: Ring, a: &Mat, b: &Mat, inner: usize, cols: usize) -> Mat {
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut s = BigInt::zero();
                    for k in 0..inner {
                        if !row[k].is_zero() && !b[k][j].is_zero() {
                            s += &row[k] * &b[k][j];
                        }
                    }
                    ring.reduce(&s)
                })
                .collect()
        })
        .collect()
}

/// Unit `u` with `u * a` the canonical associate of `a`.
fn normalizing_unit(ring: Ring, a: &BigInt) -> BigInt {
    match ring.modulus() {
        None => {
            if a.is_negative() {
                -BigInt::one()
            } else {
                BigInt::one()
            }
        }
        Some(n) => {
            let p = BigInt::from(ring.p());
            let mut w = a.clone();
            while (&w % &p).is_zero() {
                w /= &p;
            }
            let eg = w.extended_gcd(&n);
            eg.x.mod_floor(&n)
        }
    }
}

fn reduce_row(ring: Ring, row: &mut [BigInt]) {
    if ring.modulus().is_some() {
        for x in row.iter_mut() {
            *x = ring.reduce(x);
        }
    }
}

/// Howell form over `Z/p^R`, Hermite form over `Z`. Zero rows are dropped.
pub fn howell_form(ring: Ring, a: &Mat, ncols: usize) -> Mat {
    let mut rows: Vec<Vec<BigInt>> = a
        .iter()
        .map(|r| r.iter().map(|x| ring.reduce(x)).collect())
        .collect();
    let modulus = ring.modulus();
    let mut piv = 0;
    for c in 0..ncols {
        let Some(k) = (piv..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(piv, k);
        for i in piv + 1..rows.len() {
            if rows[i][c].is_zero() {
                continue;
            }
            let a = rows[piv][c].clone();
            let b = rows[i][c].clone();
            let eg = a.extended_gcd(&b);
            let (s, t) = (eg.x, eg.y);
            let u = -(&b / &eg.gcd);
            let v = &a / &eg.gcd;
            for j in c..ncols {
                let x = &rows[piv][j];
                let y = &rows[i][j];
                let nx = ring.reduce(&(&s * x + &t * y));
                let ny = ring.reduce(&(&u * x + &v * y));
                rows[piv][j] = nx;
                rows[i][j] = ny;
            }
        }
        let unit = normalizing_unit(ring, &rows[piv][c]);
        if !unit.is_one() {
            for j in c..ncols {
                rows[piv][j] = &rows[piv][j] * &unit;
            }
            reduce_row(ring, &mut rows[piv]);
        }
        let pivot = rows[piv][c].clone();
        for i in 0..piv {
            let q = rows[i][c].div_floor(&pivot);
            if !q.is_zero() {
                for j in c..ncols {
                    let d = &q * &rows[piv][j];
                    rows[i][j] -= d;
                }
                reduce_row(ring, &mut rows[i]);
            }
        }
        if let Some(n) = &modulus {
            let ann = n / pivot.gcd(n);
            if !ann.is_one() {
                let extra: Vec<BigInt> = rows[piv].iter().map(|x| ring.reduce(&(x * &ann))).collect();
                if extra.iter().any(|x| !x.is_zero()) {
                    rows.push(extra);
                }
            }
        }
        piv += 1;
    }
    rows.truncate(piv);
    rows
}

/// Generators of `{x : x A = 0}` for an `m x n` matrix `A`.
pub fn kernel(ring: Ring, a: &Mat, m: usize, n: usize) -> Mat {
    let aug: Mat = (0..m)
        .map(|i| {
            let mut row = a[i].clone();
            row.extend((0..m).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
            row
        })
        .collect();
    howell_form(ring, &aug, n + m)
        .into_iter()
        .filter(|row| row[..n].iter().all(|x| x.is_zero()))
        .map(|row| row[n..].to_vec())
        .collect()
}

/// Membership of `v` in the row span of `a` (both over `ring`).
pub fn row_span_contains(ring: Ring, a: &Mat, v: &[BigInt], ncols: usize) -> bool {
    let h = howell_form(ring, a, ncols);
    let mut w: Vec<BigInt> = v.iter().map(|x| ring.reduce(x)).collect();
    for row in &h {
        let Some(c) = row.iter().position(|x| !x.is_zero()) else {
            continue;
        };
        if w[c].is_zero() {
            continue;
        }
        let (q, r) = w[c].div_mod_floor(&row[c]);
        if !r.is_zero() {
            return false;
        }
        for j in c..ncols {
            w[j] = ring.reduce(&(&w[j] - &q * &row[j]));
        }
    }
    w.iter().all(|x| x.is_zero())
}

/// p-local elementary divisors of `a`: valuations of the diagonal of a
/// Smith form over `Z_(p)` (or `Z/p^R`), one per nonzero pivot.
pub fn local_valuations(ring: Ring, a: &Mat, nrows: usize, ncols: usize) -> Vec<u32> {
    let p = ring.p();
    let mut m: Mat = a.iter().map(|r| r.iter().map(|x| ring.reduce(x)).collect()).collect();
    let mut out = vec![];
    let mut k = 0;
    while k < nrows.min(ncols) {
        let mut best: Option<(u32, usize, usize)> = None;
        for i in k..nrows {
            for j in k..ncols {
                if let Some(v) = valuation(&m[i][j], p) {
                    if best.map_or(true, |b| v < b.0) {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let Some((v, bi, bj)) = best else { break };
        m.swap(k, bi);
        for row in m.iter_mut() {
            row.swap(k, bj);
        }
        let pv = m[k][k].clone();
        let pp = super::pow_big(p, v);
        let w = &pv / &pp;
        for i in k + 1..nrows {
            if m[i][k].is_zero() {
                continue;
            }
            let f = &m[i][k] / &pp;
            for j in k..ncols {
                let t = &w * &m[i][j] - &f * &m[k][j];
                m[i][j] = ring.reduce(&t);
            }
        }
        for j in k + 1..ncols {
            m[k][j] = BigInt::zero();
        }
        out.push(v);
        k += 1;
    }
    out
}

/// Invariants of `R^gens / rowspan(rel)`.
pub fn cokernel_invariants(ring: Ring, rel: &Mat, gens: usize) -> InvariantFactors {
    let vals = local_valuations(ring, rel, rel.len(), gens);
    let rest = gens - vals.len();
    match ring {
        Ring::Integers { p } => InvariantFactors::new(p, vals, rest),
        Ring::ModPrimePower { p, r } => {
            let mut t = vals;
            t.extend(std::iter::repeat(r).take(rest));
            InvariantFactors::new(p, t, 0)
        }
    }
}
