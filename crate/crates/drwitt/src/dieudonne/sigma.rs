//! Frobenius on `W(F_q) / p^R = (Z/p^R)[t]/(G)`, with `G` the coefficientwise
//! lift of the modulus of `F_q`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::exactcore::{mat_mul, pow_big, Fq, Mat, Ring};

fn reduce(v: &mut [BigInt], m: &BigInt) {
    for x in v.iter_mut() {
        *x = x.mod_floor(m);
    }
}

/// Product of two residues mod `(G, p^R)`, low degree first.
fn mul_mod(a: &[BigInt], b: &[BigInt], g: &[u64], m: &BigInt) -> Vec<BigInt> {
    let f = g.len() - 1;
    let mut prod = vec![BigInt::zero(); 2 * f];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            prod[i + j] += x * y;
        }
    }
    for d in (f..prod.len()).rev() {
        let lead = std::mem::take(&mut prod[d]);
        if lead.is_zero() {
            continue;
        }
        for (i, &c) in g.iter().enumerate().take(f) {
            prod[d - f + i] -= &lead * BigInt::from(c);
        }
    }
    prod.truncate(f);
    reduce(&mut prod, m);
    prod
}

fn pow_mod(a: &[BigInt], mut e: BigInt, g: &[u64], m: &BigInt) -> Vec<BigInt> {
    let f = g.len() - 1;
    let mut acc = vec![BigInt::zero(); f];
    acc[0] = BigInt::one();
    let mut b = a.to_vec();
    let two = BigInt::from(2);
    while !e.is_zero() {
        if e.is_odd() {
            acc = mul_mod(&acc, &b, g, m);
        }
        e /= &two;
        if !e.is_zero() {
            b = mul_mod(&b, &b, g, m);
        }
    }
    acc
}

/// Rows: coordinates of `τ^j`, `j < f`, where `τ = t^{q^R}` is the
/// Teichmüller lift of `t` modulo `p^R`.
pub fn teichmuller_basis(p: u64, f: usize, prec: u32) -> Mat {
    let g = Fq::new(p, f).modulus;
    let m = pow_big(p, prec);
    let mut t = vec![BigInt::zero(); f];
    if f == 1 {
        t[0] = BigInt::from((p - g[0]) % p);
    } else {
        t[1] = BigInt::one();
    }
    let tau = pow_mod(&t, num_traits::pow(BigInt::from(p).pow(f as u32), prec as usize), &g, &m);
    (0..f)
        .map(|j| pow_mod(&tau, BigInt::from(j), &g, &m))
        .collect()
}

/// Matrix of `σ` on `Z_q / p^R` in the basis `t^j` (row convention):
/// `σ(τ^j) = τ^{pj}` read back through the Teichmüller basis.
pub fn sigma_matrix(p: u64, f: usize, prec: u32) -> Mat {
    let g = Fq::new(p, f).modulus;
    let m = pow_big(p, prec);
    let ring = Ring::ModPrimePower { p, r: prec };
    let pm = teichmuller_basis(p, f, prec);
    let tau = if f > 1 { pm[1].clone() } else { pm[0].clone() };
    let q: Mat = (0..f)
        .map(|j| pow_mod(&tau, BigInt::from(p as usize * j), &g, &m))
        .collect();
    // pm is the identity mod p, so its inverse is a finite Neumann series.
    let n: Mat = (0..f)
        .map(|i| {
            (0..f)
                .map(|j| {
                    let id = if i == j { BigInt::one() } else { BigInt::zero() };
                    (&id - &pm[i][j]).mod_floor(&m)
                })
                .collect()
        })
        .collect();
    let mut inv: Mat = (0..f)
        .map(|i| (0..f).map(|j| BigInt::from((i == j) as i32)).collect())
        .collect();
    let mut term = inv.clone();
    for _ in 0..prec {
        term = mat_mul(ring, &term, &n, f, f);
        for i in 0..f {
            for j in 0..f {
                inv[i][j] = (&inv[i][j] + &term[i][j]).mod_floor(&m);
            }
        }
    }
    mat_mul(ring, &inv, &q, f, f)
}
