//! Canonical text form of superfunctions and derivations.
//!
//! Terms are sorted by total degree, then by monomial with earlier chart
//! coordinates first. Each term is `coefficient*factors`, where a
//! coefficient with more than one term is parenthesized:
//!
//! ```text
//! -1*th1*th2 + (1*x1 + 1)*p1*p2
//! degree 1: {x1: 1*th1, x2: 1*th2}
//! ```

use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Signed;

use super::chart::{Chart, Role};
use super::derivation::Derivation;
use super::superfunction::{Monomial, Superfunction};
use super::GradedError;
use crate::scalar::text::{eval_expr, parse_expr, ExprAlgebra};
use crate::scalar::{ParseScalarError, Scalar};

fn sorted_terms(f: &Superfunction) -> Vec<(&Monomial, &Scalar)> {
    let chart = f.chart();
    let mut v: Vec<_> = f.terms().collect();
    v.sort_by(|(a, _), (b, _)| a.degree(chart).cmp(&b.degree(chart)).then_with(|| b.cmp(a)));
    v
}

/// A coefficient that prints as a single signed monomial.
fn single_term(c: &Scalar) -> Option<bool> {
    (c.denominator_factors().is_empty() && c.numerator().len() == 1)
        .then(|| c.numerator().leading().unwrap().1.is_negative())
}

pub(crate) fn write_superfunction(f: &Superfunction, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    let chart = f.chart().clone();
    if f.is_zero() {
        return write!(out, "0");
    }
    let names = |v: usize| chart.base_name(v).to_string();
    for (k, (m, c)) in sorted_terms(f).into_iter().enumerate() {
        match single_term(c) {
            Some(neg) => {
                let shown = if neg { -c } else { c.clone() };
                match (k, neg) {
                    (0, true) => write!(out, "-")?,
                    (0, false) => {}
                    (_, true) => write!(out, " - ")?,
                    (_, false) => write!(out, " + ")?,
                }
                shown.fmt_with(out, &names)?;
            }
            None => {
                if k > 0 {
                    write!(out, " + ")?;
                }
                write!(out, "(")?;
                c.fmt_with(out, &names)?;
                write!(out, ")")?;
            }
        }
        for s in 0..chart.slot_count() {
            let e = m.exponent(s);
            if e > 0 {
                write!(out, "*{}", chart.coordinate(chart.slot_coordinate(s)).name)?;
                if e > 1 {
                    write!(out, "^{}", e)?;
                }
            }
        }
    }
    Ok(())
}

pub(crate) fn write_derivation(d: &Derivation, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    write!(out, "degree {}: {{", d.degree())?;
    for (k, (a, f)) in d.components().enumerate() {
        if k > 0 {
            write!(out, ", ")?;
        }
        write!(out, "{}: {}", d.chart().coordinate(a).name, f)?;
    }
    write!(out, "}}")
}

enum Val {
    Const(Scalar),
    F(Superfunction),
}

impl Val {
    fn lift(self, chart: &Arc<Chart>) -> Superfunction {
        match self {
            Val::Const(c) => Superfunction::scalar(chart, c),
            Val::F(f) => f,
        }
    }

    fn pair(a: Val, b: Val) -> Result<(Superfunction, Superfunction), (Scalar, Scalar)> {
        match (a, b) {
            (Val::Const(x), Val::Const(y)) => Err((x, y)),
            (Val::F(f), b) => {
                let c = f.chart().clone();
                Ok((f, b.lift(&c)))
            }
            (a, Val::F(g)) => {
                let c = g.chart().clone();
                Ok((a.lift(&c), g))
            }
        }
    }
}

impl ExprAlgebra for Val {
    fn number(c: &BigRational) -> Self {
        Val::Const(Scalar::from_rational(c.clone()))
    }
    fn add(a: Self, b: Self) -> Self {
        match Val::pair(a, b) {
            Ok((f, g)) => Val::F(f + g),
            Err((x, y)) => Val::Const(x + y),
        }
    }
    fn sub(a: Self, b: Self) -> Self {
        match Val::pair(a, b) {
            Ok((f, g)) => Val::F(f - g),
            Err((x, y)) => Val::Const(x - y),
        }
    }
    fn mul(a: Self, b: Self) -> Self {
        match Val::pair(a, b) {
            Ok((f, g)) => Val::F(f * g),
            Err((x, y)) => Val::Const(x * y),
        }
    }
    fn neg(a: Self) -> Self {
        match a {
            Val::Const(x) => Val::Const(-x),
            Val::F(f) => Val::F(-f),
        }
    }
    fn div(a: Self, b: Self, pos: usize) -> Result<Self, ParseScalarError> {
        let d = match b {
            Val::Const(c) => c,
            Val::F(g) => g.as_scalar().ok_or_else(|| ParseScalarError {
                pos,
                msg: "division by a positive-degree superfunction".into(),
            })?,
        };
        let inv = d.inverse().map_err(|e| ParseScalarError {
            pos,
            msg: e.to_string(),
        })?;
        Ok(match a {
            Val::Const(x) => Val::Const(x * inv),
            Val::F(f) => Val::F(f.scale(&inv)),
        })
    }
}

fn shift(e: ParseScalarError, by: usize) -> ParseScalarError {
    ParseScalarError {
        pos: e.pos + by,
        msg: e.msg,
    }
}

fn parse_at(src: &str, chart: &Arc<Chart>, offset: usize) -> Result<Superfunction, ParseScalarError> {
    let e = parse_expr(src).map_err(|e| shift(e, offset))?;
    let v = eval_expr(&e, &|n: &str, pos| match chart.index_of(n) {
        Some(i) => Ok(match chart.role(i) {
            Role::Base(v) => Val::Const(Scalar::var(v)),
            Role::Slot(_) => Val::F(Superfunction::coordinate(chart, i)),
        }),
        None => Err(ParseScalarError {
            pos,
            msg: format!("unknown coordinate '{}'", n),
        }),
    })
    .map_err(|e| shift(e, offset))?;
    Ok(v.lift(chart))
}

pub fn parse_superfunction(src: &str, chart: &Arc<Chart>) -> Result<Superfunction, GradedError> {
    Ok(parse_at(src, chart, 0)?)
}

/// Parse `degree <n>: {name: expr, ...}`.
pub fn parse_derivation(src: &str, chart: &Arc<Chart>) -> Result<Derivation, GradedError> {
    let err = |pos: usize, msg: &str| {
        GradedError::Parse(ParseScalarError {
            pos,
            msg: msg.to_string(),
        })
    };
    let lead = src.len() - src.trim_start().len();
    let rest = &src[lead..];
    let rest = rest.strip_prefix("degree").ok_or_else(|| err(lead, "expected 'degree'"))?;
    let colon = rest.find(':').ok_or_else(|| err(lead + 6, "expected ':'"))?;
    let degree: i32 = rest[..colon]
        .trim()
        .parse()
        .map_err(|_| err(lead + 6, "bad degree"))?;
    let body_start = lead + 6 + colon + 1;
    let body = &src[body_start..];
    let open = body.find('{').ok_or_else(|| err(body_start, "expected '{'"))?;
    let close = body.rfind('}').ok_or_else(|| err(src.len(), "expected '}'"))?;
    if !body[close + 1..].trim().is_empty() {
        return Err(err(body_start + close + 1, "trailing input"));
    }
    let inner_start = body_start + open + 1;
    let inner = &src[inner_start..body_start + close];
    let mut d = Derivation::zero(chart, degree);
    if inner.trim().is_empty() {
        return Ok(d);
    }
    let mut at = inner_start;
    for item in inner.split(',') {
        let c = item.find(':').ok_or_else(|| err(at, "expected 'name: expr'"))?;
        let name = item[..c].trim();
        let a = chart.index_of(name).ok_or_else(|| err(at, "unknown coordinate"))?;
        let f = parse_at(&item[c + 1..], chart, at + c + 1)?;
        let f = f.try_add(&d.component(a))?;
        d.set(a, f)?;
        at += item.len() + 1;
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::GradedCoordinate;

    fn chart() -> Arc<Chart> {
        Chart::new(vec![
            GradedCoordinate::new("x1", 0),
            GradedCoordinate::new("x2", 0),
            GradedCoordinate::new("th1", 1),
            GradedCoordinate::new("th2", 1),
            GradedCoordinate::new("psi1", 2),
        ])
        .unwrap()
    }

    #[test]
    fn koszul_normal_form_prints() {
        let c = chart();
        let f = parse_superfunction("th2*th1", &c).unwrap();
        assert_eq!(f.to_string(), "-1*th1*th2");
        let g = parse_superfunction("th1*th1 + x1*psi1", &c).unwrap();
        assert_eq!(g.to_string(), "1*x1*psi1");
    }

    #[test]
    fn round_trips() {
        let c = chart();
        for s in [
            "(1 + x1)*th1*th2 - 3/2*x2*psi1^2 + 1/(1 + x1)",
            "x1*th1 - x2*th2",
            "0",
        ] {
            let f = parse_superfunction(s, &c).unwrap();
            let g = parse_superfunction(&f.to_string(), &c).unwrap();
            assert_eq!(f, g, "{}", s);
        }
        let d = parse_derivation("degree 1: {x1: th1, x2: x1*th2}", &c).unwrap();
        assert_eq!(d.to_string(), "degree 1: {x1: 1*th1, x2: 1*x1*th2}");
        assert_eq!(parse_derivation(&d.to_string(), &c).unwrap(), d);
    }

    #[test]
    fn parse_errors_have_positions() {
        let c = chart();
        let e = parse_superfunction("x1 + q", &c).unwrap_err();
        assert!(matches!(e, GradedError::Parse(ParseScalarError { pos: 5, .. })));
        let e = parse_derivation("degree 1: {x1: th1, x2: zz}", &c).unwrap_err();
        assert!(matches!(e, GradedError::Parse(ParseScalarError { pos: 24, .. })), "{:?}", e);
    }
}
