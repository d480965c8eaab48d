//! p-typical Witt vectors of finite length with laws synthesized from the
//! ghost equations.

mod law;
mod ring;

pub use law::{depth_cap, ghost_poly, law_mod_p, set_depth_cap, synthesize_law, IntPoly, UniversalWittLaw};
pub use ring::{CoeffRing, Integers, MonoElem, MonomialAlgebra};

use std::sync::atomic::{AtomicBool, Ordering};

use crate::error::{Error, Result};
use crate::exactcore::InvariantFactors;

#[derive(Clone, Debug, PartialEq)]
pub struct WittVector<E> {
    pub comps: Vec<E>,
}

impl<E: Clone> WittVector<E> {
    pub fn new(comps: Vec<E>) -> Self {
        WittVector { comps }
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }
}

static FROBENIUS_ORACLE: AtomicBool = AtomicBool::new(false);

/// When enabled, every characteristic-p Frobenius is recomputed through the
/// universal Frobenius polynomials and the two answers are compared.
pub fn set_frobenius_oracle(on: bool) {
    FROBENIUS_ORACLE.store(on, Ordering::Relaxed);
}

fn law_for<R: CoeffRing>(ring: &R, p: u64, len: usize) -> Result<std::sync::Arc<UniversalWittLaw>> {
    let n = len.saturating_sub(1);
    if ring.characteristic().is_some() {
        law_mod_p(p, n)
    } else {
        synthesize_law(p, n)
    }
}

fn eval<R: CoeffRing>(ring: &R, f: &IntPoly, xs: &[R::Elem], ys: &[R::Elem]) -> R::Elem {
    f.eval(
        xs,
        ys,
        ring.zero(),
        ring.one(),
        |c| ring.from_int(c),
        |a, b| ring.add(a, b),
        |a, b| ring.mul(a, b),
    )
}

fn check_lengths<E>(a: &WittVector<E>, b: &WittVector<E>) -> Result<()> {
    if a.comps.len() != b.comps.len() {
        return Err(Error::LengthMismatch {
            left: a.comps.len(),
            right: b.comps.len(),
        });
    }
    Ok(())
}

fn apply<R: CoeffRing>(
    ring: &R,
    p: u64,
    a: &WittVector<R::Elem>,
    b: &WittVector<R::Elem>,
    pick: impl Fn(&UniversalWittLaw) -> &Vec<IntPoly>,
) -> Result<WittVector<R::Elem>> {
    check_lengths(a, b)?;
    if a.comps.is_empty() {
        return Ok(a.clone());
    }
    let law = law_for(ring, p, a.len())?;
    Ok(WittVector::new(
        pick(&law)
            .iter()
            .map(|f| eval(ring, f, &a.comps, &b.comps))
            .collect(),
    ))
}

pub fn witt_add<R: CoeffRing>(ring: &R, p: u64, a: &WittVector<R::Elem>, b: &WittVector<R::Elem>) -> Result<WittVector<R::Elem>> {
    apply(ring, p, a, b, |l| &l.sum)
}

pub fn witt_mul<R: CoeffRing>(ring: &R, p: u64, a: &WittVector<R::Elem>, b: &WittVector<R::Elem>) -> Result<WittVector<R::Elem>> {
    apply(ring, p, a, b, |l| &l.product)
}

pub fn witt_neg<R: CoeffRing>(ring: &R, p: u64, a: &WittVector<R::Elem>) -> Result<WittVector<R::Elem>> {
    apply(ring, p, a, a, |l| &l.negation)
}

pub fn witt_sub<R: CoeffRing>(ring: &R, p: u64, a: &WittVector<R::Elem>, b: &WittVector<R::Elem>) -> Result<WittVector<R::Elem>> {
    witt_add(ring, p, a, &witt_neg(ring, p, b)?)
}

pub fn zero<R: CoeffRing>(ring: &R, len: usize) -> WittVector<R::Elem> {
    WittVector::new(vec![ring.zero(); len])
}

pub fn one<R: CoeffRing>(ring: &R, len: usize) -> WittVector<R::Elem> {
    teichmuller(ring, &ring.one(), len)
}

/// `[a] = (a, 0, ..., 0)`.
pub fn teichmuller<R: CoeffRing>(ring: &R, a: &R::Elem, len: usize) -> WittVector<R::Elem> {
    let mut c = vec![ring.zero(); len];
    if len > 0 {
        c[0] = a.clone();
    }
    WittVector::new(c)
}

/// Integer multiple `n * a` by double-and-add.
pub fn witt_scale<R: CoeffRing>(ring: &R, p: u64, n: u64, a: &WittVector<R::Elem>) -> Result<WittVector<R::Elem>> {
    let mut acc = zero(ring, a.len());
    let mut base = a.clone();
    let mut n = n;
    while n > 0 {
        if n & 1 == 1 {
            acc = witt_add(ring, p, &acc, &base)?;
        }
        n >>= 1;
        if n > 0 {
            base = witt_add(ring, p, &base, &base)?;
        }
    }
    Ok(acc)
}

/// Ghost components `w_n = sum p^i a_i^{p^{n-i}}`.
pub fn ghost<R: CoeffRing>(ring: &R, p: u64, a: &WittVector<R::Elem>) -> Result<Vec<R::Elem>> {
    if ring.characteristic().is_some() {
        return Err(Error::TorsionCoefficients);
    }
    Ok((0..a.len())
        .map(|n| {
            let mut acc = ring.zero();
            for i in 0..=n {
                let t = ring.pow(&a.comps[i], p.pow((n - i) as u32));
                let c = ring.from_int(&crate::exactcore::pow_big(p, i as u32));
                acc = ring.add(&acc, &ring.mul(&c, &t));
            }
            acc
        })
        .collect())
}

/// Frobenius `W_r -> W_{r-1}`.
pub fn frobenius<R: CoeffRing>(ring: &R, p: u64, a: &WittVector<R::Elem>) -> Result<WittVector<R::Elem>> {
    let r = a.len();
    if r < 2 {
        return Err(Error::LengthUnderflow { needed: 2, got: r });
    }
    match ring.characteristic() {
        Some(_) => {
            let fast = WittVector::new(a.comps[..r - 1].iter().map(|x| ring.pow(x, p)).collect());
            if FROBENIUS_ORACLE.load(Ordering::Relaxed) {
                let slow = frobenius_universal(ring, p, a)?;
                assert_eq!(fast, slow, "characteristic-p Frobenius disagrees with the universal law");
            }
            Ok(fast)
        }
        None => frobenius_universal(ring, p, a),
    }
}

/// Frobenius through the universal polynomials `F_m`.
pub fn frobenius_universal<R: CoeffRing>(ring: &R, p: u64, a: &WittVector<R::Elem>) -> Result<WittVector<R::Elem>> {
    let r = a.len();
    if r < 2 {
        return Err(Error::LengthUnderflow { needed: 2, got: r });
    }
    let law = law_for(ring, p, r)?;
    Ok(WittVector::new(
        law.frobenius
            .iter()
            .take(r - 1)
            .map(|f| eval(ring, f, &a.comps, &a.comps))
            .collect(),
    ))
}

/// Verschiebung `W_r -> W_{r+1}`, `(a_0, ...) |-> (0, a_0, ...)`.
pub fn verschiebung<R: CoeffRing>(ring: &R, a: &WittVector<R::Elem>) -> WittVector<R::Elem> {
    let mut c = vec![ring.zero()];
    c.extend(a.comps.iter().cloned());
    WittVector::new(c)
}

/// Restriction `W_r -> W_{r-1}`.
pub fn restriction<E: Clone>(a: &WittVector<E>) -> Result<WittVector<E>> {
    let r = a.len();
    if r < 2 {
        return Err(Error::LengthUnderflow { needed: 2, got: r });
    }
    Ok(WittVector::new(a.comps[..r - 1].to_vec()))
}

/// Invariant factors of the additive group of `W_r(F_q)`, from the sizes
/// of its `p^j`-torsion subgroups counted by brute force. Multiplication by
/// `p` is applied as `VF`, which is exact in characteristic `p`.
pub fn additive_invariants_fq(p: u64, f: usize, r: usize) -> Result<InvariantFactors> {
    let ring = MonomialAlgebra::finite_field(p, f);
    let q = ring.field.order();
    let total = q.pow(r as u32);
    let elems: Vec<_> = (0..total)
        .map(|mut idx| {
            let comps = (0..r)
                .map(|_| {
                    let c = ring.field.element(idx % q);
                    idx /= q;
                    ring.scalar(c)
                })
                .collect();
            WittVector::new(comps)
        })
        .collect();
    let mut current = elems.clone();
    let mut counts = vec![];
    for _ in 0..=r {
        counts.push(current.iter().filter(|v| v.comps.iter().all(|c| c.is_empty())).count() as u64);
        current = current
            .iter()
            .map(|v| {
                if r < 2 {
                    Ok(zero(&ring, r))
                } else {
                    Ok(verschiebung(&ring, &frobenius(&ring, p, v)?))
                }
            })
            .collect::<Result<_>>()?;
    }
    Ok(InvariantFactors::from_torsion_counts(p, &counts))
}
