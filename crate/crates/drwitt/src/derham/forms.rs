//! Differential forms with monomial coefficients, before any relations.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_traits::Zero;

use crate::exactcore::{Fq, FqElem, Weight};

/// `x^e dx_J` is keyed by `(e, J)`, `J` a bitmask of variable indices.
pub type FormKey = (Vec<Weight>, u32);
pub type Form = BTreeMap<FormKey, FqElem>;

pub fn add_to(k: &Fq, form: &mut Form, key: FormKey, c: FqElem) {
    if k.is_zero(&c) {
        return;
    }
    match form.entry(key) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            let s = k.add(o.get(), &c);
            if k.is_zero(&s) {
                o.remove();
            } else {
                *o.get_mut() = s;
            }
        }
    }
}

pub fn monomial(k: &Fq, exps: Vec<Weight>, mask: u32) -> Form {
    let mut f = Form::new();
    f.insert((exps, mask), k.one());
    f
}

/// `x_j` as a 0-form.
pub fn variable(k: &Fq, n: usize, j: usize) -> Form {
    let mut e = vec![Weight::zero(); n];
    e[j] = Weight::from_integer(1);
    monomial(k, e, 0)
}

/// Sign of `dx_I ∧ dx_J` relative to `dx_{I∪J}`; `None` if they overlap.
pub fn wedge_sign(i: u32, j: u32) -> Option<bool> {
    if i & j != 0 {
        return None;
    }
    let mut swaps = 0;
    for a in 0..32 {
        if i >> a & 1 == 1 {
            swaps += (j & ((1u32 << a) - 1)).count_ones();
        }
    }
    Some(swaps % 2 == 1)
}

pub fn wedge(k: &Fq, a: &Form, b: &Form) -> Form {
    let mut out = Form::new();
    for ((ea, ma), ca) in a {
        for ((eb, mb), cb) in b {
            let Some(neg) = wedge_sign(*ma, *mb) else { continue };
            let e: Vec<Weight> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            let c = k.mul(ca, cb);
            add_to(k, &mut out, (e, ma | mb), if neg { k.neg(&c) } else { c });
        }
    }
    out
}

/// Exponent as an element of `F_p`; fractional exponents are p-th powers,
/// whose differential vanishes.
fn exp_coeff(k: &Fq, e: &Weight) -> FqElem {
    if e.is_integer() {
        k.from_int(e.to_integer().rem_euclid(k.p as i64))
    } else {
        k.zero()
    }
}

/// Exterior derivative in the variables whose bit is set in `active`.
pub fn d(k: &Fq, form: &Form, active: u32) -> Form {
    let mut out = Form::new();
    for ((e, m), c) in form {
        for j in 0..e.len() {
            if active >> j & 1 == 0 || m >> j & 1 == 1 {
                continue;
            }
            let ej = exp_coeff(k, &e[j]);
            if k.is_zero(&ej) {
                continue;
            }
            let neg = wedge_sign(1 << j, *m).unwrap();
            let mut e2 = e.clone();
            e2[j] -= Weight::from_integer(1);
            let c2 = k.mul(c, &ej);
            add_to(k, &mut out, (e2, m | 1 << j), if neg { k.neg(&c2) } else { c2 });
        }
    }
    out
}

/// Inverse Cartier on representatives: `x_j ↦ x_j^p` and
/// `dx_j ↦ x_j^{p-1} dx_j` for active `j`; frozen variables and scalars
/// go through the base, so coefficients are raised to the p-th power.
pub fn cartier_inverse(k: &Fq, form: &Form, active: u32) -> Form {
    let p = Weight::from_integer(k.p as i64);
    let mut out = Form::new();
    for ((e, m), c) in form {
        let e2: Vec<Weight> = e
            .iter()
            .enumerate()
            .map(|(j, x)| {
                if active >> j & 1 == 0 {
                    *x
                } else if m >> j & 1 == 1 {
                    x * p + (p - Weight::from_integer(1))
                } else {
                    x * p
                }
            })
            .collect();
        add_to(k, &mut out, (e2, *m), k.frobenius(c));
    }
    out
}

pub fn degree(mask: u32) -> usize {
    mask.count_ones() as usize
}

/// Multidegree of `x^e dx_J`: `e + e_J`.
pub fn multidegree(key: &FormKey) -> Vec<Weight> {
    key.0
        .iter()
        .enumerate()
        .map(|(j, x)| if key.1 >> j & 1 == 1 { x + Weight::from_integer(1) } else { *x })
        .collect()
}

pub fn render(k: &Fq, names: &[String], form: &Form) -> String {
    if form.is_empty() {
        return "0".into();
    }
    let mut parts = vec![];
    for ((e, m), c) in form {
        let mut s = vec![];
        if *c != k.one() || (e.iter().all(|x| x.is_zero()) && *m == 0) {
            s.push(k.fmt_elem(c));
        }
        for (x, n) in e.iter().zip(names) {
            if x.is_zero() {
                continue;
            }
            if *x == Weight::from_integer(1) {
                s.push(n.clone());
            } else if x.is_integer() {
                s.push(format!("{n}^{}", x.to_integer()));
            } else {
                s.push(format!("{n}^({x})"));
            }
        }
        for (j, n) in names.iter().enumerate() {
            if m >> j & 1 == 1 {
                s.push(format!("d{n}"));
            }
        }
        parts.push(s.join("*"));
    }
    parts.join(" + ")
}
