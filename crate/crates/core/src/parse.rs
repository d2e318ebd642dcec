//! Text grammar shared by every algebra in the crate.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/' | <juxtaposition>) unary)*
//! unary  := ('-' | '+') unary | power
//! power  := atom ('^' int)?
//! atom   := integer | identifier | '(' expr ')'
//! int    := '-'? digits | '(' '-'? digits ')'
//! ```
//!
//! Parsing produces an [`Expr`] tree; an [`Evaluator`] then interprets it in a
//! concrete ring, so commutative, free, Weyl and Laurent inputs all use one
//! grammar. Multiplication is evaluated left to right, which is what makes
//! juxtaposition noncommutative in the free and Weyl algebras.

use num_bigint::BigInt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(BigInt, Pos),
    Var(String, Pos),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>, Pos),
    Neg(Box<Expr>),
    Pow(Box<Expr>, i64, Pos),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Sym(char),
}

fn tokenize(text: &str, line: usize) -> Result<Vec<(Tok, Pos)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos {
            line,
            column: i + 1,
        };
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push((Tok::Num(s.parse().expect("digits")), pos));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Sym(c), pos));
            i += 1;
        } else if c == '\u{2212}' {
            out.push((Tok::Sym('-'), pos));
            i += 1;
        } else {
            return Err(Error::Parse {
                line,
                column: i + 1,
                message: format!("unexpected character '{c}'"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    end: Pos,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.at).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        let p = self.pos();
        Err(Error::Parse {
            line: p.line,
            column: p.column,
            message: message.into(),
        })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.peek() == Some(&Tok::Sym('/')) {
                let pos = self.pos();
                self.at += 1;
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?), pos);
            } else if matches!(
                self.peek(),
                Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::Sym('('))
            ) {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.power()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Sym('^')) {
            let pos = self.pos();
            self.at += 1;
            let e = self.exponent()?;
            return Ok(Expr::Pow(Box::new(base), e, pos));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<i64> {
        let paren = self.eat('(');
        let neg = self.eat('-');
        let v = match self.peek() {
            Some(Tok::Num(n)) => {
                let n = n.clone();
                self.at += 1;
                i64::try_from(n).or_else(|_| self.err("exponent too large"))?
            }
            _ => return self.err("expected an integer exponent"),
        };
        if paren && !self.eat(')') {
            return self.err("expected ')'");
        }
        Ok(if neg { -v } else { v })
    }

    fn atom(&mut self) -> Result<Expr> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.at += 1;
                Ok(Expr::Num(n, pos))
            }
            Some(Tok::Ident(s)) => {
                self.at += 1;
                Ok(Expr::Var(s, pos))
            }
            Some(Tok::Sym('(')) => {
                self.at += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected ')'");
                }
                Ok(e)
            }
            Some(t) => self.err(format!("unexpected token {t:?}")),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses one expression; `line` is used for error positions.
pub fn parse_expr_at(text: &str, line: usize) -> Result<Expr> {
    let toks = tokenize(text, line)?;
    let end = Pos {
        line,
        column: text.chars().count() + 1,
    };
    let mut p = Parser { toks, at: 0, end };
    let e = p.expr()?;
    if p.at != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

pub fn parse_expr(text: &str) -> Result<Expr> {
    parse_expr_at(text, 1)
}

/// Interprets parsed expressions in a concrete ring.
pub trait Evaluator {
    type Value: Clone;

    fn number(&self, n: &BigInt) -> Result<Self::Value>;
    fn variable(&self, name: &str) -> Option<Self::Value>;
    fn add(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value>;
    fn sub(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value>;
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value>;
    fn neg(&self, a: &Self::Value) -> Result<Self::Value>;
    /// Division, normally only by a nonzero constant.
    fn div(&self, a: &Self::Value, b: &Self::Value) -> std::result::Result<Self::Value, String>;
    /// Integer power; negative exponents are rejected unless the ring allows them.
    fn pow(&self, a: &Self::Value, e: i64) -> std::result::Result<Self::Value, String>;
}

pub fn evaluate<E: Evaluator>(expr: &Expr, ev: &E) -> Result<E::Value> {
    match expr {
        Expr::Num(n, _) => ev.number(n),
        Expr::Var(name, pos) => ev.variable(name).ok_or_else(|| Error::Parse {
            line: pos.line,
            column: pos.column,
            message: format!("unknown variable '{name}'"),
        }),
        Expr::Add(a, b) => ev.add(&evaluate(a, ev)?, &evaluate(b, ev)?),
        Expr::Sub(a, b) => ev.sub(&evaluate(a, ev)?, &evaluate(b, ev)?),
        Expr::Mul(a, b) => ev.mul(&evaluate(a, ev)?, &evaluate(b, ev)?),
        Expr::Neg(a) => ev.neg(&evaluate(a, ev)?),
        Expr::Div(a, b, pos) => ev
            .div(&evaluate(a, ev)?, &evaluate(b, ev)?)
            .map_err(|message| Error::Parse {
                line: pos.line,
                column: pos.column,
                message,
            }),
        Expr::Pow(a, e, pos) => ev.pow(&evaluate(a, ev)?, *e).map_err(|message| Error::Parse {
            line: pos.line,
            column: pos.column,
            message,
        }),
    }
}

/// Repeated squaring for nonnegative powers in any evaluator.
pub(crate) fn pow_by_squaring<E: Evaluator>(
    ev: &E,
    one: E::Value,
    base: &E::Value,
    e: u64,
) -> Result<E::Value> {
    let mut acc = one;
    let mut b = base.clone();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = ev.mul(&acc, &b)?;
        }
        e >>= 1;
        if e > 0 {
            b = ev.mul(&b, &b)?;
        }
    }
    Ok(acc)
}
