//! Expression grammar shared by scalars and superfunctions.
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := power (('*' | '/') power)*
//! power  := atom ['^' integer]
//! atom   := integer | name | '(' expr ')'
//! ```

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use super::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at {pos}: {msg}")]
pub struct ParseScalarError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(BigRational),
    Name(String, usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>, usize),
    Pow(Box<Expr>, u32),
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseScalarError> {
        Err(ParseScalarError {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Expr, ParseScalarError> {
        let mut lhs = if self.peek() == Some(b'-') {
            self.pos += 1;
            Expr::Neg(Box::new(self.term()?))
        } else {
            if self.peek() == Some(b'+') {
                self.pos += 1;
            }
            self.term()?
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(b'-') => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseScalarError> {
        let mut lhs = self.power()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.power()?));
                }
                Some(b'/') => {
                    self.pos += 1;
                    let at = self.pos;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.power()?), at);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn power(&mut self) -> Result<Expr, ParseScalarError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return self.err("expected exponent");
            }
            let k: u32 = std::str::from_utf8(&self.src[start..self.pos])
                .unwrap()
                .parse()
                .map_err(|_| ParseScalarError {
                    pos: start,
                    msg: "exponent too large".into(),
                })?;
            return Ok(Expr::Pow(Box::new(base), k));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseScalarError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let n: BigInt = s.parse().unwrap();
                Ok(Expr::Num(BigRational::from_integer(n)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                Ok(Expr::Name(s.to_string(), start))
            }
            Some(_) => self.err("unexpected character"),
            None => self.err("unexpected end of input"),
        }
    }
}

pub fn parse_expr(src: &str) -> Result<Expr, ParseScalarError> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(e)
}

/// Evaluate an expression tree in a target algebra.
pub trait ExprAlgebra: Sized {
    fn number(c: &BigRational) -> Self;
    fn add(a: Self, b: Self) -> Self;
    fn sub(a: Self, b: Self) -> Self;
    fn mul(a: Self, b: Self) -> Self;
    fn neg(a: Self) -> Self;
    fn div(a: Self, b: Self, pos: usize) -> Result<Self, ParseScalarError>;
}

pub fn eval_expr<A, C>(e: &Expr, ctx: &C) -> Result<A, ParseScalarError>
where
    C: Fn(&str, usize) -> Result<A, ParseScalarError>,
    A: ExprAlgebra,
{
    Ok(match e {
        Expr::Num(c) => A::number(c),
        Expr::Name(n, pos) => ctx(n, *pos)?,
        Expr::Neg(a) => A::neg(eval_expr(a, ctx)?),
        Expr::Add(a, b) => A::add(eval_expr(a, ctx)?, eval_expr(b, ctx)?),
        Expr::Sub(a, b) => A::sub(eval_expr(a, ctx)?, eval_expr(b, ctx)?),
        Expr::Mul(a, b) => A::mul(eval_expr(a, ctx)?, eval_expr(b, ctx)?),
        Expr::Div(a, b, pos) => A::div(eval_expr(a, ctx)?, eval_expr(b, ctx)?, *pos)?,
        Expr::Pow(a, k) => {
            let base = eval_expr::<A, C>(a, ctx)?;
            // powers are expanded by repeated evaluation to keep the trait small
            let mut acc = base;
            for _ in 1..*k {
                acc = A::mul(acc, eval_expr(a, ctx)?);
            }
            if *k == 0 {
                A::number(&BigRational::from_integer(1.into()))
            } else {
                acc
            }
        }
    })
}

impl ExprAlgebra for Scalar {
    fn number(c: &BigRational) -> Self {
        Scalar::from_rational(c.clone())
    }
    fn add(a: Self, b: Self) -> Self {
        a + b
    }
    fn sub(a: Self, b: Self) -> Self {
        a - b
    }
    fn mul(a: Self, b: Self) -> Self {
        a * b
    }
    fn neg(a: Self) -> Self {
        -a
    }
    fn div(a: Self, b: Self, pos: usize) -> Result<Self, ParseScalarError> {
        a.try_div(&b).map_err(|e| ParseScalarError {
            pos,
            msg: e.to_string(),
        })
    }
}

/// Parse a scalar; `vars` maps names to base-variable indices.
pub fn parse_scalar(src: &str, vars: &dyn Fn(&str) -> Option<usize>) -> Result<Scalar, ParseScalarError> {
    let e = parse_expr(src)?;
    eval_expr(&e, &|n: &str, pos| {
        vars(n).map(Scalar::var).ok_or_else(|| ParseScalarError {
            pos,
            msg: format!("unknown variable '{}'", n),
        })
    })
}
