//! Rank-generic weight expressions such as `L{k-1}+{d}*L{k}+L{k+1}`.
//!
//! Braces hold integer arithmetic over named parameters and are substituted
//! first. The result is a signed sum of terms `c*Li` (the `*` is optional).
//! Index conventions: `L0` and `L{r+1}` are the zero weight, so such terms
//! drop out; any other index outside `1..=r` makes the whole summand vanish.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::weight::{Weight, MAX_RANK};

pub type Params = BTreeMap<String, i64>;

/// Replaces every `{...}` by the value of the arithmetic inside.
pub fn substitute(template: &str, params: &Params) -> Result<String> {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let close = rest[open..]
            .find('}')
            .ok_or_else(|| Error::Parse(format!("unclosed brace in {template:?}")))?
            + open;
        let value = eval_int(&rest[open + 1..close], params)?;
        out.push_str(&value.to_string());
        rest = &rest[close + 1..];
    }
    if rest.contains('}') {
        return Err(Error::Parse(format!("unmatched brace in {template:?}")));
    }
    out.push_str(rest);
    Ok(out)
}

/// Evaluates `+ - * /` (exact division only) and parentheses over integer
/// literals and parameter names.
pub fn eval_int(src: &str, params: &Params) -> Result<i64> {
    let tokens = tokenize(src)?;
    let mut p = Arith { tokens: &tokens, pos: 0, params };
    let v = p.sum()?;
    if p.pos != tokens.len() {
        return Err(Error::Parse(format!("trailing input in {src:?}")));
    }
    Ok(v)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(i64),
    Name(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c.is_ascii_digit() {
            let mut v: i64 = 0;
            while let Some(d) = chars.peek().and_then(|c| c.to_digit(10)) {
                v = v
                    .checked_mul(10)
                    .and_then(|v| v.checked_add(d as i64))
                    .ok_or_else(|| Error::Parse("integer literal too large".into()))?;
                chars.next();
            }
            out.push(Tok::Num(v));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&c) = chars.peek().filter(|c| c.is_ascii_alphanumeric() || **c == '_') {
                s.push(c);
                chars.next();
            }
            out.push(Tok::Name(s));
        } else if "+-*/()".contains(c) {
            out.push(Tok::Op(c));
            chars.next();
        } else {
            return Err(Error::Parse(format!("unexpected {c:?} in {src:?}")));
        }
    }
    Ok(out)
}

struct Arith<'a> {
    tokens: &'a [Tok],
    pos: usize,
    params: &'a Params,
}

impl Arith<'_> {
    fn peek_op(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some(Tok::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn sum(&mut self) -> Result<i64> {
        let mut v = self.product()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let r = self.product()?;
            v = if op == '+' { v.checked_add(r) } else { v.checked_sub(r) }.ok_or(Error::Overflow("expression"))?;
        }
        Ok(v)
    }

    fn product(&mut self) -> Result<i64> {
        let mut v = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let r = self.unary()?;
            v = if op == '*' {
                v.checked_mul(r).ok_or(Error::Overflow("expression"))?
            } else {
                if r == 0 || v % r != 0 {
                    return Err(Error::Parse(format!("inexact division {v}/{r}")));
                }
                v / r
            };
        }
        Ok(v)
    }

    fn unary(&mut self) -> Result<i64> {
        if self.peek_op() == Some('-') {
            self.pos += 1;
            return self.unary()?.checked_neg().ok_or(Error::Overflow("expression"));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<i64> {
        let tok = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        match tok {
            Some(Tok::Num(v)) => Ok(v),
            Some(Tok::Name(s)) => self
                .params
                .get(&s)
                .copied()
                .ok_or_else(|| Error::Parse(format!("unknown parameter {s:?}"))),
            Some(Tok::Op('(')) => {
                let v = self.sum()?;
                if self.peek_op() != Some(')') {
                    return Err(Error::Parse("missing ')'".into()));
                }
                self.pos += 1;
                Ok(v)
            }
            _ => Err(Error::Parse("expected a number, name or '('".into())),
        }
    }
}

/// A parsed sum `Σ c_i L_{j_i}` before the rank is known.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightExpr {
    terms: Vec<(i64, i64)>,
}

impl WeightExpr {
    /// Parses a substituted expression such as `3*L2-L-1+L4` or `0`.
    pub fn parse(src: &str) -> Result<Self> {
        let s: String = src.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty weight expression".into()));
        }
        let b = s.as_bytes();
        let mut i = 0;
        let mut terms = Vec::new();
        let mut first = true;
        while i < b.len() {
            let mut sign = 1;
            match b[i] {
                b'+' => i += 1,
                b'-' => {
                    sign = -1;
                    i += 1
                }
                _ if !first => return Err(Error::Parse(format!("expected '+' or '-' in {src:?}"))),
                _ => {}
            }
            first = false;
            let (coeff, ni) = read_int(b, i);
            i = ni;
            if i < b.len() && b[i] == b'*' {
                if coeff.is_none() {
                    return Err(Error::Parse(format!("'*' without a coefficient in {src:?}")));
                }
                i += 1;
            }
            if i < b.len() && (b[i] == b'L' || b[i] == b'l') {
                i += 1;
                let mut isign = 1;
                if i < b.len() && b[i] == b'-' {
                    isign = -1;
                    i += 1;
                }
                let (idx, ni) = read_int(b, i);
                let idx = idx.ok_or_else(|| Error::Parse(format!("missing index after L in {src:?}")))?;
                i = ni;
                terms.push((sign * coeff.unwrap_or(1), isign * idx));
            } else {
                match coeff {
                    Some(0) => {}
                    _ => return Err(Error::Parse(format!("bare constant in {src:?}"))),
                }
            }
        }
        Ok(WeightExpr { terms })
    }

    /// The weight at `rank`, or `None` when an index outside `0..=rank+1`
    /// kills the summand.
    pub fn eval(&self, rank: usize) -> Result<Option<Weight>> {
        if rank > MAX_RANK {
            return Err(Error::Parse(format!("rank {rank} exceeds {MAX_RANK}")));
        }
        let mut w = Weight::zero(rank);
        for &(c, j) in &self.terms {
            if c == 0 {
                continue;
            }
            if j < 0 || j > rank as i64 + 1 {
                return Ok(None);
            }
            if j == 0 || j == rank as i64 + 1 {
                continue;
            }
            let c = i32::try_from(c).map_err(|_| Error::Overflow("weight coefficient"))?;
            let slot = &mut w.as_mut_slice()[j as usize - 1];
            *slot = slot.checked_add(c).ok_or(Error::Overflow("weight coefficient"))?;
        }
        Ok(Some(w))
    }
}

fn read_int(b: &[u8], mut i: usize) -> (Option<i64>, usize) {
    let start = i;
    let mut v: i64 = 0;
    while i < b.len() && b[i].is_ascii_digit() {
        v = v.saturating_mul(10).saturating_add((b[i] - b'0') as i64);
        i += 1;
    }
    ((i > start).then_some(v), i)
}

/// Substitutes parameters into `template` and evaluates it at `rank`.
pub fn weight_from_template(template: &str, params: &Params, rank: usize) -> Result<Option<Weight>> {
    WeightExpr::parse(&substitute(template, params)?)?.eval(rank)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(kv: &[(&str, i64)]) -> Params {
        kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn arithmetic() {
        let p = params(&[("n", 13), ("k", 3)]);
        assert_eq!(eval_int("n-1", &p).unwrap(), 12);
        assert_eq!(eval_int("2*(k+1) - -1", &p).unwrap(), 9);
        assert_eq!(eval_int("n/13", &p).unwrap(), 1);
        assert!(eval_int("n/2", &p).is_err());
        assert!(eval_int("m", &p).is_err());
        assert!(eval_int("(1", &p).is_err());
    }

    #[test]
    fn template_weights() {
        let p = params(&[("k", 3), ("d", 1)]);
        let w = weight_from_template("L{k-1}+{d}*L{k}+L{k+1}", &p, 7).unwrap().unwrap();
        assert_eq!(&*w, &[0, 1, 1, 1, 0, 0, 0]);
        let w = weight_from_template("3L1 - 2*L2", &p, 3).unwrap().unwrap();
        assert_eq!(&*w, &[3, -2, 0]);
    }

    #[test]
    fn index_conventions() {
        let p = params(&[("k", 2)]);
        // L0 drops out.
        let w = weight_from_template("L{k-2}+L{k-1}+L{k+1}", &p, 5).unwrap().unwrap();
        assert_eq!(&*w, &[1, 0, 1, 0, 0]);
        // L_{r+1} drops out.
        assert_eq!(&*weight_from_template("3*L1+L5", &p, 4).unwrap().unwrap(), &[3, 0, 0, 0]);
        // Negative or too large indices kill the summand.
        assert!(weight_from_template("L{k-3}+3*L{k+1}", &p, 5).unwrap().is_none());
        assert!(weight_from_template("L7", &p, 5).unwrap().is_none());
        assert_eq!(weight_from_template("0", &p, 2).unwrap().unwrap(), Weight::zero(2));
    }

    #[test]
    fn malformed() {
        for s in ["", "L", "2", "L1L2", "+*L1", "L1+", "{", "}"] {
            assert!(weight_from_template(s, &Params::new(), 3).is_err(), "{s:?}");
        }
    }
}
