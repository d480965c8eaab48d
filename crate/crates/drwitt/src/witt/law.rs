//! Universal p-typical Witt laws, solved from the ghost equations.

use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactcore::pow_big;

/// Integer polynomial in `X_0, Y_0, X_1, Y_1, ...`; variable `X_i` has
/// index `2i`, `Y_i` index `2i+1`. Exponent vectors carry no trailing zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntPoly {
    pub terms: BTreeMap<Vec<u32>, BigInt>,
}

fn trim(mut e: Vec<u32>) -> Vec<u32> {
    while e.last() == Some(&0) {
        e.pop();
    }
    e
}

impl IntPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigInt) -> Self {
        let mut p = Self::zero();
        if !c.is_zero() {
            p.terms.insert(vec![], c);
        }
        p
    }

    /// `c * var^e`.
    pub fn monomial(var: usize, e: u32, c: BigInt) -> Self {
        let mut exps = vec![0; var + 1];
        exps[var] = e;
        let mut p = Self::zero();
        p.terms.insert(trim(exps), c);
        p
    }

    pub fn x(i: usize) -> Self {
        Self::monomial(2 * i, 1, BigInt::one())
    }

    pub fn y(i: usize) -> Self {
        Self::monomial(2 * i + 1, 1, BigInt::one())
    }

    fn add_term(&mut self, e: Vec<u32>, c: BigInt) {
        use std::collections::btree_map::Entry;
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, s: &BigInt) -> Self {
        let mut out = Self::zero();
        if s.is_zero() {
            return out;
        }
        for (e, c) in &self.terms {
            out.terms.insert(e.clone(), c * s);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-BigInt::one()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut acc: HashMap<Vec<u32>, BigInt> = HashMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let n = e1.len().max(e2.len());
                let e: Vec<u32> = (0..n)
                    .map(|i| e1.get(i).copied().unwrap_or(0) + e2.get(i).copied().unwrap_or(0))
                    .collect();
                *acc.entry(e).or_insert_with(BigInt::zero) += c1 * c2;
            }
        }
        IntPoly {
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    /// Power by repeated multiplication with the (typically small) base.
    pub fn pow(&self, e: u64) -> Self {
        let mut acc = Self::constant(BigInt::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exact division by an integer; `None` if some coefficient is not
    /// divisible (a non-integral ghost solution).
    pub fn div_exact(&self, d: &BigInt) -> Option<Self> {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            let (q, r) = c.div_rem(d);
            if !r.is_zero() {
                return None;
            }
            out.terms.insert(e.clone(), q);
        }
        Some(out)
    }

    /// Substitute `X_i, Y_i` by the `i`-th entries of `xs`, `ys`; variables
    /// beyond the slices must not occur.
    pub fn eval<T: Clone>(
        &self,
        xs: &[T],
        ys: &[T],
        zero: T,
        one: T,
        coef: impl Fn(&BigInt) -> T,
        add: impl Fn(&T, &T) -> T,
        mul: impl Fn(&T, &T) -> T,
    ) -> T {
        let nvars = 2 * xs.len().max(ys.len());
        let vars: Vec<&T> = (0..nvars)
            .map(|v| if v % 2 == 0 { &xs[v / 2] } else { &ys[v / 2] })
            .collect();
        let mut power_cache: HashMap<(usize, u32), T> = HashMap::new();
        let mut acc = zero;
        for (e, c) in &self.terms {
            let mut t = coef(c);
            for (v, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let pw = power_cache
                    .entry((v, k))
                    .or_insert_with(|| {
                        let mut r = one.clone();
                        let mut b = vars[v].clone();
                        let mut k = k;
                        while k > 0 {
                            if k & 1 == 1 {
                                r = mul(&r, &b);
                            }
                            b = mul(&b, &b);
                            k >>= 1;
                        }
                        r
                    })
                    .clone();
                t = mul(&t, &pw);
            }
            acc = add(&acc, &t);
        }
        acc
    }

    /// Coefficients reduced mod `p`, zero terms dropped.
    pub fn reduce_mod(&self, p: u64) -> Self {
        let m = BigInt::from(p);
        IntPoly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), c.mod_floor(&m)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Human-readable form, e.g. `X1 + Y1 - X0*Y0`.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c < &BigInt::zero();
            let a = if neg { -c.clone() } else { c.clone() };
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors = vec![];
            if !a.is_one() || e.iter().all(|&x| x == 0) {
                factors.push(a.to_string());
            }
            for (v, &x) in e.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                let name = format!("{}{}", if v % 2 == 0 { 'X' } else { 'Y' }, v / 2);
                factors.push(if x == 1 { name } else { format!("{name}^{x}") });
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

/// Ghost polynomial `w_m = sum_{i<=m} p^i T_i^{p^{m-i}}` in the `X` (or `Y`)
/// variables.
pub fn ghost_poly(p: u64, m: usize, use_y: bool) -> IntPoly {
    let mut acc = IntPoly::zero();
    for i in 0..=m {
        let v = if use_y { 2 * i + 1 } else { 2 * i };
        let e = p.pow((m - i) as u32) as u32;
        acc = acc.add(&IntPoly::monomial(v, e, pow_big(p, i as u32)));
    }
    acc
}

/// Substitute polynomials `f_0..f_m` into `w_m`'s lower part:
/// `sum_{i<m} p^i f_i^{p^{m-i}}`.
fn ghost_of_lower(p: u64, fs: &[IntPoly], m: usize) -> IntPoly {
    let mut acc = IntPoly::zero();
    for (i, f) in fs.iter().enumerate().take(m) {
        let e = p.pow((m - i) as u32);
        acc = acc.add(&f.pow(e).scale(&pow_big(p, i as u32)));
    }
    acc
}

/// Solve `w_m(F) = target_m` recursively for `m = 0..=n`.
fn solve(p: u64, n: usize, target: impl Fn(usize) -> IntPoly, what: &str) -> Vec<IntPoly> {
    let mut fs: Vec<IntPoly> = vec![];
    for m in 0..=n {
        let rest = target(m).sub(&ghost_of_lower(p, &fs, m));
        let f = rest
            .div_exact(&pow_big(p, m as u32))
            .unwrap_or_else(|| panic!("{what} law at depth {m} for p={p} is not integral"));
        fs.push(f);
    }
    fs
}

/// Addition, multiplication, negation and Frobenius polynomials up to depth `n`.
#[derive(Clone, Debug)]
pub struct UniversalWittLaw {
    pub p: u64,
    pub depth: usize,
    pub sum: Vec<IntPoly>,
    pub product: Vec<IntPoly>,
    pub negation: Vec<IntPoly>,
    /// `F_m(X)` with `w_m(F(X)) = w_{m+1}(X)`, for `m < depth`.
    pub frobenius: Vec<IntPoly>,
}

static DEPTH_CAP: AtomicUsize = AtomicUsize::new(5);

pub fn depth_cap() -> usize {
    DEPTH_CAP.load(Ordering::Relaxed)
}

pub fn set_depth_cap(cap: usize) {
    DEPTH_CAP.store(cap, Ordering::Relaxed);
}

type LawCache = Mutex<HashMap<(u64, usize), Arc<OnceLock<Arc<UniversalWittLaw>>>>>;

fn cache() -> &'static LawCache {
    static CACHE: OnceLock<LawCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The universal law at depth `n` (components `0..=n`), built once per
/// `(p, n)` and shared.
pub fn synthesize_law(p: u64, n: usize) -> Result<Arc<UniversalWittLaw>> {
    let cap = depth_cap();
    if n > cap {
        return Err(Error::DepthCap { requested: n, cap });
    }
    if !crate::exactcore::is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not prime")));
    }
    let cell = {
        let mut map = cache().lock().unwrap();
        map.entry((p, n)).or_default().clone()
    };
    Ok(cell
        .get_or_init(|| {
            let sum = solve(p, n, |m| ghost_poly(p, m, false).add(&ghost_poly(p, m, true)), "sum");
            let product = solve(p, n, |m| ghost_poly(p, m, false).mul(&ghost_poly(p, m, true)), "product");
            let negation = solve(p, n, |m| ghost_poly(p, m, false).scale(&-BigInt::one()), "negation");
            let frobenius = if n == 0 {
                vec![]
            } else {
                solve(p, n - 1, |m| ghost_poly(p, m + 1, false), "frobenius")
            };
            Arc::new(UniversalWittLaw {
                p,
                depth: n,
                sum,
                product,
                negation,
                frobenius,
            })
        })
        .clone())
}

/// The same law with coefficients reduced mod `p`, for characteristic-p
/// evaluation.
pub fn law_mod_p(p: u64, n: usize) -> Result<Arc<UniversalWittLaw>> {
    type ModCache = Mutex<HashMap<(u64, usize), Arc<UniversalWittLaw>>>;
    static MOD: OnceLock<ModCache> = OnceLock::new();
    let map = MOD.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(l) = map.lock().unwrap().get(&(p, n)) {
        return Ok(l.clone());
    }
    let law = synthesize_law(p, n)?;
    let red = |v: &Vec<IntPoly>| v.iter().map(|f| f.reduce_mod(p)).collect();
    let reduced = Arc::new(UniversalWittLaw {
        p,
        depth: n,
        sum: red(&law.sum),
        product: red(&law.product),
        negation: red(&law.negation),
        frobenius: red(&law.frobenius),
    });
    map.lock().unwrap().entry((p, n)).or_insert(reduced.clone());
    Ok(reduced)
}
