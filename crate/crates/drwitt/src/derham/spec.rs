//! Curated test rings and the ring-file format.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactcore::{is_prime, Fq, FqElem, Weight};
use crate::polyparse::parse_terms;
use crate::witt::MonomialAlgebra;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Kind {
    FiniteField,
    Poly,
    Laurent,
    Quotient,
    Perfection(Box<Kind>),
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::FiniteField => write!(f, "finite_field"),
            Kind::Poly => write!(f, "poly"),
            Kind::Laurent => write!(f, "laurent"),
            Kind::Quotient => write!(f, "quotient"),
            Kind::Perfection(k) => write!(f, "perfection({k})"),
        }
    }
}

/// One monomial `c * t^k * x^e` of a relation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelTerm {
    pub coeff: i64,
    pub t_power: u32,
    pub exps: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingSpec {
    pub p: u64,
    /// Degree of the coefficient field over `F_p`.
    pub f: usize,
    pub kind: Kind,
    pub vars: Vec<(String, i64)>,
    /// For laurent kinds: which variables are inverted (all by default).
    pub inverted: Vec<bool>,
    pub rels: Vec<Vec<RelTerm>>,
}

impl RingSpec {
    pub fn finite_field(p: u64, f: usize) -> Self {
        RingSpec {
            p,
            f,
            kind: Kind::FiniteField,
            vars: vec![],
            inverted: vec![],
            rels: vec![],
        }
    }

    pub fn poly(p: u64, vars: &[(&str, i64)]) -> Self {
        RingSpec {
            p,
            f: 1,
            kind: Kind::Poly,
            vars: vars.iter().map(|(n, w)| (n.to_string(), *w)).collect(),
            inverted: vec![false; vars.len()],
            rels: vec![],
        }
    }

    pub fn laurent(p: u64, vars: &[(&str, i64)]) -> Self {
        RingSpec {
            kind: Kind::Laurent,
            inverted: vec![true; vars.len()],
            ..Self::poly(p, vars)
        }
    }

    pub fn with_field_degree(mut self, f: usize) -> Self {
        self.f = f;
        self
    }

    /// Wraps a poly, laurent or finite-field spec.
    pub fn perfection(inner: RingSpec) -> Result<Self> {
        match inner.kind {
            Kind::Poly | Kind::Laurent | Kind::FiniteField => Ok(RingSpec {
                kind: Kind::Perfection(Box::new(inner.kind.clone())),
                ..inner
            }),
            _ => Err(Error::UnsupportedKind(format!("perfection of {}", inner.kind))),
        }
    }

    /// Quotient of a weighted polynomial ring; relations in monomial syntax.
    pub fn quotient(p: u64, vars: &[(&str, i64)], rels: &[&str]) -> Result<Self> {
        let mut text = format!("p = {p}\nkind = quotient\nvars = ");
        text += &vars.iter().map(|(n, w)| format!("{n}:{w}")).collect::<Vec<_>>().join(", ");
        text += &format!("\nrels = {}\n", rels.join("; "));
        parse_ringspec(&text)
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn weights(&self) -> Vec<i64> {
        self.vars.iter().map(|v| v.1).collect()
    }

    pub fn field(&self) -> Fq {
        Fq::new(self.p, self.f)
    }

    pub fn is_perfection(&self) -> bool {
        matches!(self.kind, Kind::Perfection(_))
    }

    /// The kind with any perfection wrapper removed.
    pub fn base_kind(&self) -> &Kind {
        match &self.kind {
            Kind::Perfection(k) => k,
            k => k,
        }
    }

    pub fn weight_of(&self, exps: &[Weight]) -> Weight {
        exps.iter()
            .zip(&self.vars)
            .map(|(e, v)| *e * Ratio::from_integer(v.1))
            .sum()
    }

    pub fn rel_coeff(&self, k: &Fq, t: &RelTerm) -> FqElem {
        k.mul(&k.from_int(t.coeff), &k.generator_or_one(t.t_power))
    }

    /// The ring as a coefficient ring for Witt vectors, truncated at `cap`.
    pub fn algebra(&self, cap: Option<Weight>, depth: u32) -> Result<MonomialAlgebra> {
        let vars: Vec<(&str, i64)> = self.vars.iter().map(|(n, w)| (n.as_str(), *w)).collect();
        let mut a = MonomialAlgebra::polynomial(self.p, self.f, &vars, cap);
        match self.base_kind() {
            Kind::Quotient => return Err(Error::UnsupportedKind("Witt vectors over quotient kinds".into())),
            Kind::Laurent => a.laurent = true,
            _ => {}
        }
        if self.is_perfection() {
            a.depth = depth;
        }
        Ok(a)
    }

    /// Canonical text; parsing it gives back the same spec.
    pub fn to_text(&self) -> String {
        let mut s = format!("p = {}\n", self.p);
        match &self.kind {
            Kind::Perfection(k) => s += &format!("kind = perfection\nof = {k}\n"),
            k => s += &format!("kind = {k}\n"),
        }
        if !self.vars.is_empty() {
            let v: Vec<String> = self.vars.iter().map(|(n, w)| format!("{n}:{w}")).collect();
            s += &format!("vars = {}\n", v.join(", "));
        }
        if *self.base_kind() == Kind::Laurent && self.inverted.iter().any(|b| !b) {
            let v: Vec<&str> = self
                .vars
                .iter()
                .zip(&self.inverted)
                .filter(|(_, b)| **b)
                .map(|(v, _)| v.0.as_str())
                .collect();
            s += &format!("invert = {}\n", v.join(", "));
        }
        if !self.rels.is_empty() {
            let r: Vec<String> = self.rels.iter().map(|r| self.render_rel(r)).collect();
            s += &format!("rels = {}\n", r.join("; "));
        }
        if self.f != 1 {
            s += &format!("f = {}\n", self.f);
        }
        s
    }

    fn render_rel(&self, rel: &[RelTerm]) -> String {
        let mut out = String::new();
        for (i, t) in rel.iter().enumerate() {
            let mut factors = vec![];
            if t.coeff.abs() != 1 {
                factors.push(t.coeff.abs().to_string());
            }
            if t.t_power > 0 {
                factors.push(format!("t^{}", t.t_power));
            }
            for (e, v) in t.exps.iter().zip(&self.vars) {
                match e {
                    0 => {}
                    1 => factors.push(v.0.clone()),
                    e => factors.push(format!("{}^{e}", v.0)),
                }
            }
            if factors.is_empty() {
                factors.push("1".into());
            }
            let sign = if t.coeff < 0 { "-" } else { "+" };
            if i == 0 {
                if t.coeff < 0 {
                    out.push('-');
                }
            } else {
                out += &format!(" {sign} ");
            }
            out += &factors.join("*");
        }
        out
    }

    /// Short human-readable name such as `F_3[x,y]/(y^2 - x^3)`.
    pub fn name(&self) -> String {
        let field = if self.f == 1 {
            format!("F_{}", self.p)
        } else {
            format!("F_{}", self.field().order())
        };
        let vars: Vec<String> = self
            .vars
            .iter()
            .zip(self.inverted.iter().chain(std::iter::repeat(&false)))
            .map(|(v, inv)| {
                if *inv && *self.base_kind() == Kind::Laurent {
                    format!("{}^±1", v.0)
                } else {
                    v.0.clone()
                }
            })
            .collect();
        let mut s = if vars.is_empty() {
            field
        } else {
            format!("{field}[{}]", vars.join(","))
        };
        if !self.rels.is_empty() {
            let r: Vec<String> = self.rels.iter().map(|r| self.render_rel(r)).collect();
            s += &format!("/({})", r.join(", "));
        }
        if self.is_perfection() {
            s = format!("perf({s})");
        }
        s
    }
}

fn perr(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::ParseError {
        line,
        column,
        message: message.into(),
    }
}

fn parse_kind(v: &str, line: usize, col: usize) -> Result<Kind> {
    Ok(match v {
        "finite_field" => Kind::FiniteField,
        "poly" => Kind::Poly,
        "laurent" => Kind::Laurent,
        "quotient" => Kind::Quotient,
        "perfection" => Kind::Perfection(Box::new(Kind::Poly)),
        _ => {
            if let Some(inner) = v.strip_prefix("perfection(").and_then(|s| s.strip_suffix(')')) {
                Kind::Perfection(Box::new(parse_kind(inner, line, col + 11)?))
            } else {
                return Err(perr(line, col, format!("unknown kind `{v}`")));
            }
        }
    })
}

/// Parses the `key = value` ring format (see the guide for the grammar).
pub fn parse_ringspec(text: &str) -> Result<RingSpec> {
    let mut p = None;
    let mut kind = None;
    let mut of = None;
    let mut f = 1usize;
    let mut vars: Vec<(String, i64)> = vec![];
    let mut invert: Option<(usize, usize, String)> = None;
    let mut rels_src: Option<(usize, usize, String)> = None;
    let mut kind_pos = (1, 1);

    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let body = raw.split('#').next().unwrap();
        if body.trim().is_empty() {
            continue;
        }
        let Some(eq) = body.find('=') else {
            let col = body.len() - body.trim_start().len() + 1;
            return Err(perr(line, col, "expected `key = value`"));
        };
        let key = body[..eq].trim();
        let vstart = eq + 1 + (body[eq + 1..].len() - body[eq + 1..].trim_start().len());
        let value = body[eq + 1..].trim();
        let vcol = vstart + 1;
        match key {
            "p" => {
                let n: u64 = value.parse().map_err(|_| perr(line, vcol, "expected a prime"))?;
                if !is_prime(n) {
                    return Err(perr(line, vcol, format!("{n} is not prime")));
                }
                p = Some(n);
            }
            "kind" => {
                kind = Some(parse_kind(value, line, vcol)?);
                kind_pos = (line, vcol);
            }
            "of" => of = Some(parse_kind(value, line, vcol)?),
            "f" => {
                f = value
                    .parse()
                    .ok()
                    .filter(|&n: &usize| n >= 1)
                    .ok_or_else(|| perr(line, vcol, "expected a positive extension degree"))?;
            }
            "vars" => {
                let mut off = 0;
                for item in value.split(',') {
                    let col = vcol + off + (item.len() - item.trim_start().len());
                    off += item.len() + 1;
                    let item = item.trim();
                    let (name, w) = match item.split_once(':') {
                        Some((n, w)) => (n.trim(), w.trim()),
                        None => (item, "1"),
                    };
                    if name.is_empty()
                        || name == "t"
                        || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
                        || name.chars().next().unwrap().is_ascii_digit()
                    {
                        return Err(perr(line, col, format!("bad variable name `{name}`")));
                    }
                    if vars.iter().any(|v| v.0 == name) {
                        return Err(perr(line, col, format!("duplicate variable `{name}`")));
                    }
                    let w: i64 = w
                        .parse()
                        .ok()
                        .filter(|&w| w > 0)
                        .ok_or_else(|| perr(line, col, "weights must be positive integers"))?;
                    vars.push((name.to_string(), w));
                }
            }
            "invert" => invert = Some((line, vcol, value.to_string())),
            "rels" => rels_src = Some((line, vcol, value.to_string())),
            _ => return Err(perr(line, 1 + body.len() - body.trim_start().len(), format!("unknown key `{key}`"))),
        }
    }

    let p = p.ok_or_else(|| perr(1, 1, "missing `p = <prime>`"))?;
    let mut kind = kind.ok_or_else(|| perr(1, 1, "missing `kind = ...`"))?;
    if let Kind::Perfection(_) = kind {
        let inner = of.unwrap_or(if vars.is_empty() { Kind::FiniteField } else { Kind::Poly });
        if !matches!(inner, Kind::Poly | Kind::Laurent | Kind::FiniteField) {
            return Err(perr(kind_pos.0, kind_pos.1, "perfection only wraps poly, laurent or finite_field"));
        }
        kind = Kind::Perfection(Box::new(inner));
    }
    let base = match &kind {
        Kind::Perfection(k) => (**k).clone(),
        k => k.clone(),
    };
    if base == Kind::FiniteField && !vars.is_empty() {
        return Err(perr(kind_pos.0, kind_pos.1, "finite_field takes no variables"));
    }
    if base == Kind::Quotient && rels_src.is_none() {
        return Err(perr(kind_pos.0, kind_pos.1, "quotient needs `rels = ...`"));
    }
    let mut inverted = vec![base == Kind::Laurent; vars.len()];
    if let Some((line, col, text)) = invert {
        if base != Kind::Laurent {
            return Err(perr(line, col, "`invert` only applies to laurent kinds"));
        }
        inverted = vec![false; vars.len()];
        for name in text.split(',').map(str::trim) {
            let Some(i) = vars.iter().position(|v| v.0 == name) else {
                return Err(perr(line, col, format!("unknown variable `{name}`")));
            };
            inverted[i] = true;
        }
    }

    let mut spec = RingSpec {
        p,
        f,
        kind,
        vars,
        inverted,
        rels: vec![],
    };
    if let Some((line, col, text)) = rels_src {
        if base != Kind::Quotient {
            return Err(perr(line, col, "`rels` only applies to quotient kinds"));
        }
        let names: Vec<String> = spec.vars.iter().map(|v| v.0.clone()).collect();
        let mut off = 0;
        for piece in text.split(';') {
            let col_i = col + off;
            off += piece.len() + 1;
            if piece.trim().is_empty() {
                continue;
            }
            let terms = parse_terms(piece, &names, line, col_i - 1)?;
            let mut rel: Vec<RelTerm> = vec![];
            for t in terms {
                let mut exps = vec![];
                for e in &t.exps {
                    if !e.is_integer() || *e.numer() < 0 {
                        return Err(perr(line, col_i, "relations need nonnegative integer exponents"));
                    }
                    exps.push(e.to_integer());
                }
                let c = t.coeff.mod_floor(&BigInt::from(p));
                if c.is_zero() {
                    continue;
                }
                let c = c.to_i64().unwrap();
                match rel.iter_mut().find(|r| r.exps == exps && r.t_power == t.t_power) {
                    Some(r) => r.coeff = (r.coeff + c).rem_euclid(p as i64),
                    None => rel.push(RelTerm {
                        coeff: c,
                        t_power: t.t_power,
                        exps,
                    }),
                }
            }
            rel.retain(|t| t.coeff != 0);
            if rel.is_empty() {
                continue;
            }
            let weights: Vec<i64> = rel
                .iter()
                .map(|t| t.exps.iter().zip(&spec.vars).map(|(e, v)| e * v.1).sum())
                .collect();
            if let Some(w) = weights.iter().find(|&&w| w != weights[0]) {
                return Err(Error::NonQuasiHomogeneous {
                    relation: piece.trim().to_string(),
                    detail: format!("weights {} vs {}", weights[0], w),
                });
            }
            if weights[0] == 0 {
                return Err(Error::InvalidInput(format!("relation `{}` is a nonzero constant", piece.trim())));
            }
            spec.rels.push(rel);
        }
    }
    Ok(spec)
}
