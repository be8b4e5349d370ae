//! Tiny arithmetic evaluator for catalog expressions such as `n*(n-1)/2`
//! or `(2*n-1)^2/2`. Values are exact rationals; names are looked up in a
//! parameter map.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::exact::{int, Rational};

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("unexpected character {found:?} at offset {pos} in {expr:?}")]
    Unexpected { expr: String, pos: usize, found: char },
    #[error("unexpected end of expression {0:?}")]
    Eof(String),
    #[error("unknown parameter {name:?} in {expr:?}")]
    UnknownName { expr: String, name: String },
    #[error("division by zero in {0:?}")]
    DivisionByZero(String),
    #[error("exponent must be a small non-negative integer in {0:?}")]
    BadExponent(String),
    #[error("expression {expr:?} evaluates to non-integer {value}")]
    NotInteger { expr: String, value: String },
}

pub type Params = BTreeMap<String, i64>;

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    params: &'a Params,
}

impl<'a> Parser<'a> {
    fn peek(&mut self) -> Option<u8> {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        self.bytes.get(self.pos).copied()
    }

    fn unexpected(&self) -> FormulaError {
        match self.bytes.get(self.pos) {
            Some(&c) => FormulaError::Unexpected {
                expr: self.src.to_string(),
                pos: self.pos,
                found: c as char,
            },
            None => FormulaError::Eof(self.src.to_string()),
        }
    }

    fn expr(&mut self) -> Result<Rational, FormulaError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc += self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc -= self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Rational, FormulaError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc *= self.unary()?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let d = self.unary()?;
                    if d.is_zero() {
                        return Err(FormulaError::DivisionByZero(self.src.to_string()));
                    }
                    acc /= d;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Rational, FormulaError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<Rational, FormulaError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let e = self.unary()?;
            if !e.denom().is_one() || e < Rational::zero() || e > int(64) {
                return Err(FormulaError::BadExponent(self.src.to_string()));
            }
            let k: usize = e.numer().try_into().unwrap_or(0);
            return Ok(num_traits::pow(base, k));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Rational, FormulaError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.unexpected());
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let n: i64 = self.src[start..self.pos].parse().map_err(|_| self.unexpected())?;
                Ok(int(n))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.bytes.len()
                    && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = &self.src[start..self.pos];
                self.params.get(name).map(|&v| int(v)).ok_or_else(|| FormulaError::UnknownName {
                    expr: self.src.to_string(),
                    name: name.to_string(),
                })
            }
            _ => Err(self.unexpected()),
        }
    }
}

pub fn eval(expr: &str, params: &Params) -> Result<Rational, FormulaError> {
    let mut p = Parser { src: expr, bytes: expr.as_bytes(), pos: 0, params };
    let v = p.expr()?;
    if p.peek().is_some() {
        return Err(p.unexpected());
    }
    Ok(v)
}

/// Evaluates and insists on an integer result.
pub fn eval_int(expr: &str, params: &Params) -> Result<i64, FormulaError> {
    let v = eval(expr, params)?;
    let not_int = || FormulaError::NotInteger {
        expr: expr.to_string(),
        value: crate::exact::format_rational(&v),
    };
    if !v.denom().is_one() {
        return Err(not_int());
    }
    i64::try_from(v.numer()).map_err(|_| not_int())
}

/// Substitutes `{expr}` placeholders in a template.
pub fn render(template: &str, params: &Params) -> Result<String, FormulaError> {
    let mut out = String::new();
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let Some(close) = rest[open..].find('}') else {
            return Err(FormulaError::Eof(template.to_string()));
        };
        let inner = &rest[open + 1..open + close];
        out.push_str(&crate::exact::format_rational(&eval(inner, params)?));
        rest = &rest[open + close + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    fn params(kv: &[(&str, i64)]) -> Params {
        kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn precedence_and_power() {
        let p = params(&[("n", 4)]);
        assert_eq!(eval_int("n*(n-1)/2", &p).unwrap(), 6);
        assert_eq!(eval("(2*n-1)^2/2", &p).unwrap(), ratio(49, 2));
        assert_eq!(eval_int("-n+2^3", &p).unwrap(), 4);
        assert!(eval_int("(2*n-1)^2/2", &p).is_err());
    }

    #[test]
    fn errors() {
        let p = params(&[]);
        assert!(matches!(eval("x+1", &p), Err(FormulaError::UnknownName { .. })));
        assert!(matches!(eval("1/0", &p), Err(FormulaError::DivisionByZero(_))));
        assert!(eval("(1", &p).is_err());
        assert!(eval("1 2", &p).is_err());
    }

    #[test]
    fn templates() {
        let p = params(&[("p", 2), ("q", 5)]);
        assert_eq!(render("SO_0({p},{q})/SO({p})xSO({q})", &p).unwrap(), "SO_0(2,5)/SO(2)xSO(5)");
        assert_eq!(render("SO({2*p})", &p).unwrap(), "SO(4)");
    }
}
