//! Affine expressions in grid coordinates.
//!
//! Grammar:
//!
//! ```text
//!   expr   := term (('+' | '-') term)*
//!   term   := unary (('*' | '/') unary)*
//!   unary  := ('+' | '-') unary | atom
//!   atom   := number | var | '(' expr ')'
//!   var    := 'q' digits | 'x' | 'y' | 'z' | 'w'
//! ```
//!
//! `x, y, z, w` are `q0 … q3`. A product needs at least one constant factor
//! and division is only by constants, so every expression stays affine.

use std::str::FromStr;

use crate::error::{FunkError, Result};

/// `constant + Σ coeffs[i] q_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Affine {
    pub constant: f64,
    pub coeffs: Vec<f64>,
}

impl Affine {
    pub fn constant(c: f64) -> Self {
        Self {
            constant: c,
            coeffs: Vec::new(),
        }
    }

    fn var(i: usize) -> Self {
        let mut coeffs = vec![0.0; i + 1];
        coeffs[i] = 1.0;
        Self { constant: 0.0, coeffs }
    }

    fn is_constant(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Highest coordinate index referenced, plus one.
    pub fn arity(&self) -> usize {
        self.coeffs.iter().rposition(|&c| c != 0.0).map_or(0, |i| i + 1)
    }

    pub fn eval(&self, q: &[f64]) -> Result<f64> {
        if self.arity() > q.len() {
            return Err(FunkError::Config(format!(
                "expression uses q{} but the grid has {} axes",
                self.arity() - 1,
                q.len()
            )));
        }
        Ok(self.constant + self.coeffs.iter().zip(q).map(|(a, x)| a * x).sum::<f64>())
    }

    fn combine(mut self, other: Self, sign: f64) -> Self {
        if other.coeffs.len() > self.coeffs.len() {
            self.coeffs.resize(other.coeffs.len(), 0.0);
        }
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += sign * b;
        }
        self.constant += sign * other.constant;
        self
    }

    fn scale(mut self, k: f64) -> Self {
        self.constant *= k;
        for a in &mut self.coeffs {
            *a *= k;
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Var(usize),
    Op(char),
}

fn err(src: &str, msg: &str) -> FunkError {
    FunkError::Config(format!("expression `{src}`: {msg}"))
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if "+-*/()".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // exponent
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text.parse::<f64>().map_err(|_| err(src, &format!("bad number `{text}`")))?;
            out.push(Token::Num(v));
        } else if c == 'q' {
            let start = i + 1;
            i = start;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let idx = text.parse::<usize>().map_err(|_| err(src, "`q` must be followed by an axis index"))?;
            out.push(Token::Var(idx));
        } else if let Some(idx) = "xyzw".find(c) {
            out.push(Token::Var(idx));
            i += 1;
        } else {
            return Err(err(src, &format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a str,
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Affine> {
        let mut acc = self.term()?;
        while let Some(Token::Op(op @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = acc.combine(rhs, if op == '+' { 1.0 } else { -1.0 });
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Affine> {
        let mut acc = self.unary()?;
        while let Some(Token::Op(op @ ('*' | '/'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if op == '*' {
                if rhs.is_constant() {
                    acc.scale(rhs.constant)
                } else if acc.is_constant() {
                    rhs.scale(acc.constant)
                } else {
                    return Err(err(self.src, "product of two coordinates is not affine"));
                }
            } else {
                if !rhs.is_constant() {
                    return Err(err(self.src, "division by a coordinate is not affine"));
                }
                if rhs.constant == 0.0 {
                    return Err(err(self.src, "division by zero"));
                }
                acc.scale(1.0 / rhs.constant)
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Affine> {
        match self.peek() {
            Some(Token::Op('-')) => {
                self.pos += 1;
                Ok(self.unary()?.scale(-1.0))
            }
            Some(Token::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Affine> {
        match self.next() {
            Some(Token::Num(v)) => Ok(Affine::constant(v)),
            Some(Token::Var(i)) => Ok(Affine::var(i)),
            Some(Token::Op('(')) => {
                let inner = self.expr()?;
                match self.next() {
                    Some(Token::Op(')')) => Ok(inner),
                    _ => Err(err(self.src, "missing `)`")),
                }
            }
            Some(t) => Err(err(self.src, &format!("unexpected {t:?}"))),
            None => Err(err(self.src, "unexpected end of input")),
        }
    }
}

impl FromStr for Affine {
    type Err = FunkError;

    fn from_str(src: &str) -> Result<Self> {
        let mut parser = Parser {
            src,
            tokens: tokenize(src)?,
            pos: 0,
        };
        let out = parser.expr()?;
        if parser.pos != parser.tokens.len() {
            return Err(err(src, "trailing input"));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(src: &str, q: &[f64]) -> f64 {
        src.parse::<Affine>().unwrap().eval(q).unwrap()
    }

    #[test]
    fn arithmetic() {
        assert_eq!(eval("-x", &[0.3, 0.0]), -0.3);
        assert_eq!(eval("2*(q0 - 1) + y/4", &[1.5, 2.0]), 1.5);
        assert_eq!(eval("0.3", &[]), 0.3);
        assert_eq!(eval("1e-1 * q1 - -2", &[0.0, 10.0]), 3.0);
        assert_eq!(eval("3 * -y", &[0.0, 1.0]), -3.0);
    }

    #[test]
    fn rejects_non_affine_and_garbage() {
        assert!("x*y".parse::<Affine>().is_err());
        assert!("1/x".parse::<Affine>().is_err());
        assert!("1/0".parse::<Affine>().is_err());
        assert!("sin(x)".parse::<Affine>().is_err());
        assert!("(x".parse::<Affine>().is_err());
        assert!("x y".parse::<Affine>().is_err());
        assert!("z".parse::<Affine>().unwrap().eval(&[0.0, 0.0]).is_err());
    }
}
