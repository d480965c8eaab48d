//! Graded pieces of the de Rham complex.

use std::collections::HashMap;
use std::fmt;

use num_traits::{Signed, Zero};

use super::forms::{self, Form, FormKey};
use super::spec::{Kind, RingSpec};
use crate::error::{Error, Result};
use crate::exactcore::{Echelon, FMat, Fq, FqElem, Weight};

/// Exponent denominators allowed for perfections are `p^PERFECTION_DEPTH`.
pub const PERFECTION_DEPTH: u32 = 2;

/// Polynomial and Laurent rings split by multidegree; quotients only by
/// total weight.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PieceKey {
    Multi(Vec<Weight>),
    Graded(Weight),
}

impl fmt::Display for PieceKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PieceKey::Multi(a) => {
                let v: Vec<String> = a.iter().map(|x| x.to_string()).collect();
                write!(f, "({})", v.join(","))
            }
            PieceKey::Graded(w) => write!(f, "w={w}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Piece {
    pub key: PieceKey,
    pub weight: Weight,
    /// Free generators `x^e dx_J` per degree.
    pub free: Vec<Vec<FormKey>>,
    index: Vec<HashMap<FormKey, usize>>,
    rels: Vec<Echelon>,
    /// Free columns giving a basis of the quotient, per degree.
    pub basis: Vec<Vec<usize>>,
    /// `diffs[i]`: rows are basis elements of degree `i`.
    pub diffs: Vec<FMat>,
}

impl Piece {
    pub fn dim(&self, i: usize) -> usize {
        self.basis.get(i).map_or(0, Vec::len)
    }

    /// Representative of the `b`-th basis element in degree `i`.
    pub fn rep(&self, i: usize, b: usize) -> &FormKey {
        &self.free[i][self.basis[i][b]]
    }

    fn free_vector(&self, k: &Fq, i: usize, form: &Form) -> Option<Vec<FqElem>> {
        let mut v = vec![k.zero(); self.free[i].len()];
        for (key, c) in form {
            let j = *self.index[i].get(key)?;
            v[j] = k.add(&v[j], c);
        }
        Some(v)
    }

    /// Coordinates of a degree-`i` form lying in this piece, or `None` if
    /// some term lives elsewhere.
    pub fn coords(&self, k: &Fq, i: usize, form: &Form) -> Option<Vec<FqElem>> {
        if i >= self.free.len() {
            return form.is_empty().then(Vec::new);
        }
        let v = self.rels[i].reduce(k, &self.free_vector(k, i, form)?);
        Some(self.basis[i].iter().map(|&c| v[c].clone()).collect())
    }

    /// Span of `d(Ω^{i-1})` inside `Ω^i`.
    pub fn boundaries(&self, k: &Fq, i: usize) -> Echelon {
        if i == 0 {
            return Echelon::new(k, self.dim(0), &[]);
        }
        Echelon::new(k, self.dim(i), &self.diffs[i - 1])
    }

    pub fn cohomology_dim(&self, k: &Fq, i: usize) -> usize {
        let rank_out = if i < self.diffs.len() {
            Echelon::new(k, self.dim(i + 1), &self.diffs[i]).rank()
        } else {
            0
        };
        self.dim(i) - rank_out - self.boundaries(k, i).rank()
    }
}

#[derive(Clone, Debug)]
pub struct DeRhamComplex {
    pub spec: RingSpec,
    pub field: Fq,
    pub i_max: usize,
    pub weight_cap: Weight,
    /// Leading variables treated as part of the base (relative complexes).
    pub frozen: usize,
    pub pieces: Vec<Piece>,
    lookup: HashMap<PieceKey, usize>,
}

fn subsets(mask: u32, size: usize) -> Vec<u32> {
    let mut out = vec![];
    let mut s = mask;
    loop {
        if s.count_ones() as usize == size {
            out.push(s);
        }
        if s == 0 {
            break;
        }
        s = (s - 1) & mask;
    }
    out.sort();
    out
}

/// Exponent vectors `e ≥ 0` with `Σ w_j e_j = total`.
fn monomials_of_weight(weights: &[i64], total: i64) -> Vec<Vec<i64>> {
    if weights.is_empty() {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = vec![];
    let w = weights[0];
    let mut e = 0;
    while e * w <= total {
        for mut rest in monomials_of_weight(&weights[1..], total - e * w) {
            rest.insert(0, e);
            out.push(rest);
        }
        e += 1;
    }
    out
}

/// Multidegrees with `Σ w_j |a_j| ≤ cap`, step `1/denom`.
pub(crate) fn multidegrees(weights: &[i64], inverted: &[bool], cap: Weight, denom: i64) -> Vec<Vec<Weight>> {
    if weights.is_empty() {
        return vec![vec![]];
    }
    let mut out = vec![];
    let w = Weight::from_integer(weights[0]);
    let step = Weight::new(1, denom);
    let mut a = Weight::zero();
    while a * w <= cap {
        for rest in multidegrees(&weights[1..], &inverted[1..], cap - a * w, denom) {
            let mut v = vec![a];
            v.extend(rest.iter().copied());
            out.push(v.clone());
            if inverted[0] && !a.is_zero() {
                v[0] = -a;
                out.push(v);
            }
        }
        a += step;
    }
    out.sort();
    out
}

fn active_mask(n: usize, frozen: usize) -> u32 {
    ((1u32 << n) - 1) & !((1u32 << frozen) - 1)
}

impl DeRhamComplex {
    pub fn active(&self) -> u32 {
        active_mask(self.spec.nvars(), self.frozen)
    }

    pub fn piece(&self, key: &PieceKey) -> Option<&Piece> {
        self.lookup.get(key).map(|&i| &self.pieces[i])
    }

    pub fn key_of(&self, key: &FormKey) -> PieceKey {
        match self.spec.base_kind() {
            Kind::Quotient => PieceKey::Graded(self.spec.weight_of(&forms::multidegree(key))),
            _ => PieceKey::Multi(forms::multidegree(key)),
        }
    }

    /// Frobenius twist of a piece key: active coordinates scale by `p`.
    pub fn twist(&self, key: &PieceKey) -> PieceKey {
        let p = Weight::from_integer(self.spec.p as i64);
        match key {
            PieceKey::Graded(w) => PieceKey::Graded(w * p),
            PieceKey::Multi(a) => PieceKey::Multi(
                a.iter()
                    .enumerate()
                    .map(|(j, x)| if j >= self.frozen { x * p } else { *x })
                    .collect(),
            ),
        }
    }

    /// Coordinates of a form in its piece.
    pub fn locate(&self, i: usize, form: &Form) -> Option<(PieceKey, Vec<FqElem>)> {
        let first = form.keys().next()?;
        let key = self.key_of(first);
        let coords = self.piece(&key)?.coords(&self.field, i, form)?;
        Some((key, coords))
    }

    pub fn names(&self) -> Vec<String> {
        self.spec.vars.iter().map(|v| v.0.clone()).collect()
    }
}

fn build_piece(
    spec: &RingSpec,
    k: &Fq,
    key: PieceKey,
    top: usize,
    active: u32,
    rel_forms: &[(Form, Form, i64)],
) -> Piece {
    let n = spec.nvars();
    let weights = spec.weights();
    let perfect = spec.is_perfection();
    let mut free: Vec<Vec<FormKey>> = vec![];
    for i in 0..=top {
        let mut gens = vec![];
        if perfect && i > 0 {
            free.push(gens);
            continue;
        }
        for mask in subsets(active, i) {
            match &key {
                PieceKey::Multi(a) => {
                    let e: Vec<Weight> = (0..n)
                        .map(|j| if mask >> j & 1 == 1 { a[j] - 1 } else { a[j] })
                        .collect();
                    if (0..n).any(|j| !spec.inverted[j] && e[j].is_negative()) {
                        continue;
                    }
                    gens.push((e, mask));
                }
                PieceKey::Graded(w) => {
                    let wj: i64 = (0..n).filter(|j| mask >> j & 1 == 1).map(|j| weights[j]).sum();
                    let rest = w.to_integer() - wj;
                    if rest < 0 {
                        continue;
                    }
                    for e in monomials_of_weight(&weights, rest) {
                        gens.push((e.into_iter().map(Weight::from_integer).collect(), mask));
                    }
                }
            }
        }
        free.push(gens);
    }
    let index: Vec<HashMap<FormKey, usize>> = free
        .iter()
        .map(|g| g.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect())
        .collect();

    let mut rels = vec![];
    for i in 0..=top {
        let mut gens = vec![];
        if let PieceKey::Graded(w) = &key {
            let w = w.to_integer();
            for (r, dr, wr) in rel_forms {
                // m * r * dx_J and m * dr ∧ dx_J'
                for (src, deg) in [(r, i), (dr, i.wrapping_sub(1))] {
                    if deg > n {
                        continue;
                    }
                    for mask in subsets(active, deg) {
                        let wj: i64 = (0..n).filter(|j| mask >> j & 1 == 1).map(|j| weights[j]).sum();
                        let rest = w - wr - wj;
                        if rest < 0 {
                            continue;
                        }
                        for m in monomials_of_weight(&weights, rest) {
                            let mono = forms::monomial(k, m.into_iter().map(Weight::from_integer).collect(), mask);
                            let g = forms::wedge(k, src, &mono);
                            let mut v = vec![k.zero(); free[i].len()];
                            for (fk, c) in &g {
                                let j = index[i][fk];
                                v[j] = k.add(&v[j], c);
                            }
                            gens.push(v);
                        }
                    }
                }
            }
        }
        rels.push(Echelon::new(k, free[i].len(), &gens));
    }
    let basis: Vec<Vec<usize>> = rels.iter().map(|e| e.free_columns()).collect();

    let mut piece = Piece {
        key,
        weight: Weight::zero(),
        free,
        index,
        rels,
        basis,
        diffs: vec![],
    };
    for i in 0..top {
        let mut rows = vec![];
        for b in 0..piece.dim(i) {
            if perfect {
                // every element is a p-th power
                rows.push(vec![k.zero(); piece.dim(i + 1)]);
                continue;
            }
            let rep = piece.rep(i, b).clone();
            let df = forms::d(k, &forms::monomial(k, rep.0, rep.1), active);
            rows.push(piece.coords(k, i + 1, &df).expect("d preserves the grading"));
        }
        piece.diffs.push(rows);
    }
    piece
}

/// Builds all pieces up to `weight_cap`, relative to the first `frozen`
/// variables.
pub fn build_complex(spec: &RingSpec, i_max: usize, weight_cap: Weight, frozen: usize) -> Result<DeRhamComplex> {
    let k = spec.field();
    let n = spec.nvars();
    if n > 16 {
        return Err(Error::InvalidInput("at most 16 variables".into()));
    }
    let active = active_mask(n, frozen);
    let weights = spec.weights();
    let keys: Vec<PieceKey> = match spec.base_kind() {
        Kind::Quotient => {
            if frozen > 0 {
                return Err(Error::UnsupportedKind("relative complexes of quotient kinds".into()));
            }
            (0..=weight_cap.floor().to_integer())
                .map(|w| PieceKey::Graded(Weight::from_integer(w)))
                .collect()
        }
        _ => {
            let denom = if spec.is_perfection() {
                (spec.p as i64).pow(PERFECTION_DEPTH)
            } else {
                1
            };
            multidegrees(&weights, &spec.inverted, weight_cap, denom)
                .into_iter()
                .map(PieceKey::Multi)
                .collect()
        }
    };
    let rel_forms: Vec<(Form, Form, i64)> = spec
        .rels
        .iter()
        .map(|rel| {
            let mut f = Form::new();
            for t in rel {
                forms::add_to(
                    &k,
                    &mut f,
                    (t.exps.iter().map(|&e| Weight::from_integer(e)).collect(), 0),
                    spec.rel_coeff(&k, t),
                );
            }
            let df = forms::d(&k, &f, active);
            let w = rel[0].exps.iter().zip(&weights).map(|(e, w)| e * w).sum();
            (f, df, w)
        })
        .collect();

    let mut pieces = vec![];
    for key in keys {
        let weight = match &key {
            PieceKey::Multi(a) => spec.weight_of(a),
            PieceKey::Graded(w) => *w,
        };
        let mut piece = build_piece(spec, &k, key, i_max + 1, active, &rel_forms);
        piece.weight = weight;
        pieces.push(piece);
    }
    let lookup = pieces.iter().enumerate().map(|(i, p)| (p.key.clone(), i)).collect();
    Ok(DeRhamComplex {
        spec: spec.clone(),
        field: k,
        i_max,
        weight_cap,
        frozen,
        pieces,
        lookup,
    })
}
