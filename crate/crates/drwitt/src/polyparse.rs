//! Parser for the monomial syntax shared by ring specs and CLI elements:
//! `3*x^2*y - y^(1/3) + t*x`, where `t` names the generator of `F_q`.

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// One parsed term: integer coefficient, exponent per named variable,
/// power of the field generator `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coeff: BigInt,
    pub exps: Vec<Ratio<i64>>,
    pub t_power: u32,
}

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
    line: usize,
    col0: usize,
}

impl Cursor<'_> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::ParseError {
            line: self.line,
            column: self.col0 + self.pos + 1,
            message: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn int(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        if self.s.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| {
                self.pos = start;
                self.err("expected an integer")
            })
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_') {
            if self.pos == start && self.s[self.pos].is_ascii_digit() {
                return None;
            }
            self.pos += 1;
        }
        (self.pos > start).then(|| String::from_utf8(self.s[start..self.pos].to_vec()).unwrap())
    }

    fn exponent(&mut self) -> Result<Ratio<i64>> {
        if self.peek() != Some(b'^') {
            return Ok(Ratio::one());
        }
        self.pos += 1;
        if self.peek() == Some(b'(') {
            self.pos += 1;
            let n = self.int()?;
            let d = if self.peek() == Some(b'/') {
                self.pos += 1;
                self.int()?
            } else {
                1
            };
            if self.peek() != Some(b')') {
                return Err(self.err("expected `)`"));
            }
            self.pos += 1;
            if d == 0 {
                return Err(self.err("zero denominator"));
            }
            Ok(Ratio::new(n, d))
        } else {
            Ok(Ratio::from_integer(self.int()?))
        }
    }
}

/// Parse a polynomial over the named variables. `line` and `col0` locate
/// the text inside a larger file for error reporting.
pub fn parse_terms(text: &str, vars: &[String], line: usize, col0: usize) -> Result<Vec<Term>> {
    let mut c = Cursor {
        s: text.as_bytes(),
        pos: 0,
        line,
        col0,
    };
    let mut out = vec![];
    let mut sign = BigInt::one();
    if c.peek() == Some(b'-') {
        c.pos += 1;
        sign = -sign;
    } else if c.peek() == Some(b'+') {
        c.pos += 1;
    }
    loop {
        let mut term = Term {
            coeff: sign.clone(),
            exps: vec![Ratio::zero(); vars.len()],
            t_power: 0,
        };
        loop {
            match c.peek() {
                Some(b) if b.is_ascii_digit() => {
                    let n = c.int()?;
                    let e = c.exponent()?;
                    if !e.is_integer() || *e.numer() < 0 {
                        return Err(c.err("constant exponents must be nonnegative integers"));
                    }
                    term.coeff *= num_traits::pow(BigInt::from(n), *e.numer() as usize);
                }
                Some(b'(') => return Err(c.err("parenthesized sums are not supported")),
                Some(_) => {
                    let at = c.pos;
                    let Some(name) = c.ident() else {
                        return Err(c.err("expected a variable or a number"));
                    };
                    let e = c.exponent()?;
                    if let Some(i) = vars.iter().position(|v| *v == name) {
                        term.exps[i] += e;
                    } else if name == "t" {
                        if !e.is_integer() || *e.numer() < 0 {
                            return Err(c.err("powers of t must be nonnegative integers"));
                        }
                        term.t_power += *e.numer() as u32;
                    } else {
                        c.pos = at;
                        return Err(c.err(format!("unknown variable `{name}`")));
                    }
                }
                None => return Err(c.err("unexpected end of input")),
            }
            if c.peek() == Some(b'*') {
                c.pos += 1;
            } else {
                break;
            }
        }
        out.push(term);
        match c.peek() {
            None => break,
            Some(b'+') => {
                c.pos += 1;
                sign = BigInt::one();
            }
            Some(b'-') => {
                c.pos += 1;
                sign = -BigInt::one();
            }
            Some(_) => return Err(c.err("expected `+`, `-` or `*`")),
        }
    }
    Ok(out)
}
