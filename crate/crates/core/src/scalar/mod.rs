//! Coefficient ring: rational functions of the degree-0 coordinates.
//!
//! A [`Scalar`] is `num / Π fᵢ^kᵢ` with exact rational coefficients. The
//! denominator is kept as a list of monic factors in the order they were
//! encountered; no multivariate GCD is ever computed. Zero testing only looks
//! at the numerator, and equality is decided by cross-multiplication, so
//! correctness does not depend on how well factors cancel.

mod poly;
pub mod text;

pub use poly::{Exponents, Poly};
pub use text::{parse_scalar, ParseScalarError};

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("zero divisor")]
    ZeroDivisor,
    #[error("evaluation pole")]
    Pole,
}

/// A degree-0 coordinate of a chart, as seen by the coefficient ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BaseVar {
    pub name: String,
    pub index: usize,
}

/// Exact rational function in the base variables.
#[derive(Clone, Debug, Default)]
pub struct Scalar {
    num: Poly,
    den: Vec<(Poly, u32)>,
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn insert_factor(den: &mut Vec<(Poly, u32)>, f: Poly, k: u32) {
    if k == 0 || f.is_constant() {
        return;
    }
    if let Some(slot) = den.iter_mut().find(|(g, _)| *g == f) {
        slot.1 += k;
    } else {
        den.push((f, k));
    }
}

/// Split factors that are multiples of other factors until no factor divides
/// another.
fn normalize_factors(den: &mut Vec<(Poly, u32)>) {
    loop {
        let mut changed = false;
        'outer: for i in 0..den.len() {
            for j in 0..den.len() {
                if i == j {
                    continue;
                }
                if den[i].0.degree() > den[j].0.degree() {
                    continue;
                }
                if let Some(mut q) = den[j].0.div_exact(&den[i].0) {
                    let kj = den[j].1;
                    let fi = den[i].0.clone();
                    den.remove(j);
                    q.make_monic();
                    insert_factor(den, fi, kj);
                    insert_factor(den, q, kj);
                    changed = true;
                    break 'outer;
                }
            }
        }
        if !changed {
            return;
        }
    }
}

fn expand(den: &[(Poly, u32)]) -> Poly {
    den.iter().fold(Poly::one(), |acc, (f, k)| acc.mul(&f.pow(*k)))
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn one() -> Self {
        Scalar::from_poly(Poly::one())
    }

    pub fn from_poly(num: Poly) -> Self {
        Scalar { num, den: Vec::new() }
    }

    pub fn from_int(c: i64) -> Self {
        Scalar::from_poly(Poly::from_int(c))
    }

    pub fn from_rational(c: BigRational) -> Self {
        Scalar::from_poly(Poly::constant(c))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Scalar::from_rational(rat(n, d))
    }

    pub fn var(index: usize) -> Self {
        Scalar::from_poly(Poly::var(index))
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator_factors(&self) -> &[(Poly, u32)] {
        &self.den
    }

    pub fn denominator(&self) -> Poly {
        expand(&self.den)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_empty() && self.num.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        if self.den.is_empty() {
            self.num.as_constant()
        } else {
            None
        }
    }

    fn canonical(mut self) -> Self {
        if self.num.is_zero() {
            self.den.clear();
            return self;
        }
        normalize_factors(&mut self.den);
        for slot in self.den.iter_mut() {
            while slot.1 > 0 {
                match self.num.div_exact(&slot.0) {
                    Some(q) => {
                        self.num = q;
                        slot.1 -= 1;
                    }
                    None => break,
                }
            }
        }
        self.den.retain(|(_, k)| *k > 0);
        self
    }

    fn lcm(a: &[(Poly, u32)], b: &[(Poly, u32)]) -> Vec<(Poly, u32)> {
        let mut out: Vec<(Poly, u32)> = a.to_vec();
        for (f, k) in b {
            match out.iter_mut().find(|(g, _)| g == f) {
                Some(slot) => slot.1 = slot.1.max(*k),
                None => out.push((f.clone(), *k)),
            }
        }
        out
    }

    /// `L / den(self)` for a multiple `L` of the denominator.
    fn cofactor(&self, l: &[(Poly, u32)]) -> Poly {
        l.iter().fold(Poly::one(), |acc, (f, k)| {
            let own = self.den.iter().find(|(g, _)| g == f).map_or(0, |(_, j)| *j);
            acc.mul(&f.pow(k - own))
        })
    }

    /// Least common multiple of the (factored) denominators of `items`.
    pub fn common_denominator<'a>(items: impl IntoIterator<Item = &'a Scalar>) -> Vec<(Poly, u32)> {
        let mut l: Vec<(Poly, u32)> = Vec::new();
        for s in items {
            l = Scalar::lcm(&l, &s.den);
        }
        l
    }

    /// Numerator of `self` rewritten over the common denominator `l`, which
    /// must be a multiple of this scalar's denominator.
    pub fn numerator_over(&self, l: &[(Poly, u32)]) -> Poly {
        self.num.mul(&self.cofactor(l))
    }

    fn combine(&self, other: &Scalar, negate: bool) -> Scalar {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return if negate { other.neg_ref() } else { other.clone() };
        }
        let l = Scalar::lcm(&self.den, &other.den);
        let a = self.numerator_over(&l);
        let b = other.numerator_over(&l);
        let num = if negate { a.sub(&b) } else { a.add(&b) };
        Scalar { num, den: l }.canonical()
    }

    fn neg_ref(&self) -> Scalar {
        Scalar {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    fn mul_ref(&self, other: &Scalar) -> Scalar {
        if self.is_zero() || other.is_zero() {
            return Scalar::zero();
        }
        if let Some(c) = self.as_constant() {
            return Scalar {
                num: other.num.scale(&c),
                den: other.den.clone(),
            };
        }
        if let Some(c) = other.as_constant() {
            return Scalar {
                num: self.num.scale(&c),
                den: self.den.clone(),
            };
        }
        let mut den = self.den.clone();
        for (f, k) in &other.den {
            insert_factor(&mut den, f.clone(), *k);
        }
        Scalar {
            num: self.num.mul(&other.num),
            den,
        }
        .canonical()
    }

    pub fn scale(&self, c: &BigRational) -> Scalar {
        if c.is_zero() {
            return Scalar::zero();
        }
        Scalar {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    /// Multiplicative inverse; `known` lists factors to peel off the new
    /// denominator before it is stored.
    fn inverse_with(&self, known: &[(Poly, u32)]) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::ZeroDivisor);
        }
        let mut rest = self.num.clone();
        let lc = rest.make_monic();
        let mut den: Vec<(Poly, u32)> = Vec::new();
        for (f, _) in known.iter().chain(self.den.iter()) {
            while !rest.is_constant() {
                match rest.div_exact(f) {
                    Some(q) => {
                        rest = q;
                        insert_factor(&mut den, f.clone(), 1);
                    }
                    None => break,
                }
            }
        }
        let c = rest.make_monic();
        insert_factor(&mut den, rest, 1);
        let num = expand(&self.den).scale(&(lc * c).recip());
        Ok(Scalar { num, den }.canonical())
    }

    pub fn inverse(&self) -> Result<Scalar, ScalarError> {
        self.inverse_with(&[])
    }

    pub fn try_div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        if other.is_zero() {
            return Err(ScalarError::ZeroDivisor);
        }
        if let Some(c) = other.as_constant() {
            return Ok(self.scale(&c.recip()));
        }
        Ok(self.mul_ref(&other.inverse_with(&self.den)?))
    }

    pub fn pow(&self, k: u32) -> Scalar {
        (0..k).fold(Scalar::one(), |acc, _| acc.mul_ref(self))
    }

    /// Exact partial derivative with respect to base variable `var`.
    pub fn partial(&self, var: usize) -> Scalar {
        let dn = self.num.derivative(var);
        if self.den.is_empty() {
            return Scalar::from_poly(dn);
        }
        let derivs: Vec<Poly> = self.den.iter().map(|(f, _)| f.derivative(var)).collect();
        if derivs.iter().all(Poly::is_zero) {
            return Scalar {
                num: dn,
                den: self.den.clone(),
            }
            .canonical();
        }
        // d(n / Π f^k) = (n' F - n Σ k f' F/f) / (Π f^k · F), F = Π f
        let radical: Poly = self.den.iter().fold(Poly::one(), |acc, (f, _)| acc.mul(f));
        let mut num = dn.mul(&radical);
        for (i, (f, k)) in self.den.iter().enumerate() {
            if derivs[i].is_zero() {
                continue;
            }
            let others = self
                .den
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .fold(Poly::one(), |acc, (_, (g, _))| acc.mul(g));
            let t = self
                .num
                .mul(&derivs[i])
                .mul(&others)
                .scale(&BigRational::from_integer(BigInt::from(*k)));
            num = num.sub(&t);
            let _ = f;
        }
        let den = self.den.iter().map(|(f, k)| (f.clone(), k + 1)).collect();
        Scalar { num, den }.canonical()
    }

    pub fn evaluate(&self, point: &[BigRational]) -> Result<BigRational, ScalarError> {
        let mut d = BigRational::one();
        for (f, k) in &self.den {
            let v = f.eval(point);
            if v.is_zero() {
                return Err(ScalarError::Pole);
            }
            d *= num_traits::pow(v, *k as usize);
        }
        Ok(self.num.eval(point) / d)
    }

    /// Rename base variables (`map[old] = new`).
    pub fn rename(&self, map: &[usize]) -> Scalar {
        Scalar {
            num: self.num.rename(map),
            den: self
                .den
                .iter()
                .map(|(f, k)| {
                    let mut g = f.rename(map);
                    g.make_monic();
                    (g, *k)
                })
                .collect(),
        }
        .canonical()
    }

    /// Compose with `values`: base variable `i` is replaced by `values[i]`.
    pub fn substitute(&self, values: &[Scalar]) -> Result<Scalar, ScalarError> {
        let eval_poly = |p: &Poly| -> Scalar {
            let mut acc = Scalar::zero();
            for (e, c) in p.terms() {
                let mut t = Scalar::from_rational(c.clone());
                for (i, k) in e.iter() {
                    let v = values.get(i).cloned().unwrap_or_else(|| Scalar::var(i));
                    t = t.mul_ref(&v.pow(k as u32));
                }
                acc = acc.combine(&t, false);
            }
            acc
        };
        let mut r = eval_poly(&self.num);
        for (f, k) in &self.den {
            let fv = eval_poly(f);
            if fv.is_zero() {
                return Err(ScalarError::Pole);
            }
            r = r.try_div(&fv.pow(*k))?;
        }
        Ok(r)
    }

    pub fn max_var(&self) -> Option<usize> {
        std::iter::once(self.num.max_var())
            .chain(self.den.iter().map(|(f, _)| f.max_var()))
            .flatten()
            .max()
    }

    pub fn fmt_with(&self, f: &mut fmt::Formatter<'_>, names: &dyn Fn(usize) -> String) -> fmt::Result {
        if self.den.is_empty() {
            return self.num.fmt_with(f, names);
        }
        write!(f, "(")?;
        self.num.fmt_with(f, names)?;
        write!(f, ")/(")?;
        for (i, (g, k)) in self.den.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "(")?;
            g.fmt_with(f, names)?;
            write!(f, ")")?;
            if *k > 1 {
                write!(f, "^{}", k)?;
            }
        }
        write!(f, ")")
    }

    pub fn display_with<'a>(&'a self, names: &'a dyn Fn(usize) -> String) -> impl fmt::Display + 'a {
        struct D<'a>(&'a Scalar, &'a dyn Fn(usize) -> String);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt_with(f, self.1)
            }
        }
        D(self, names)
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        if self.den.is_empty() && other.den.is_empty() {
            return self.num == other.num;
        }
        self.combine(other, true).is_zero()
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_with(f, &|i| format!("x{}", i + 1))
    }
}

impl From<i64> for Scalar {
    fn from(c: i64) -> Self {
        Scalar::from_int(c)
    }
}

impl From<BigRational> for Scalar {
    fn from(c: BigRational) -> Self {
        Scalar::from_rational(c)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                let f: fn(&Scalar, &Scalar) -> Scalar = $body;
                f(self, rhs)
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                self.$m(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| a.combine(b, false));
binop!(Sub, sub, |a, b| a.combine(b, true));
binop!(Mul, mul, |a, b| a.mul_ref(b));

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

impl Zero for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for Scalar {
    fn one() -> Self {
        Scalar::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> Scalar {
        Scalar::var(i)
    }

    #[test]
    fn additive_inverse() {
        assert!((x(0) + (-x(0))).is_zero());
    }

    #[test]
    fn multiplicative_inverse() {
        let a = Scalar::one() + x(0);
        let inv = Scalar::one().try_div(&a).unwrap();
        assert!((inv * &a).is_one());
    }

    #[test]
    fn polynomial_division() {
        let num = x(0) * x(1) + x(1);
        let q = num.try_div(&x(1)).unwrap();
        assert!(q.is_polynomial());
        assert_eq!(q, x(0) + Scalar::one());
    }

    #[test]
    fn zero_divisor() {
        assert_eq!(x(0).try_div(&Scalar::zero()), Err(ScalarError::ZeroDivisor));
    }

    #[test]
    fn partials() {
        assert_eq!((x(0) * x(1)).partial(0), x(1));
        assert!(x(0).partial(1).is_zero());
        let a = Scalar::one() + x(0);
        let inv = Scalar::one().try_div(&a).unwrap();
        let expected = -Scalar::one().try_div(&(&a * &a)).unwrap();
        assert_eq!(inv.partial(0), expected);
        assert_eq!(inv.partial(0).denominator_factors().len(), 1);
    }

    #[test]
    fn evaluation() {
        let a = Scalar::one() + x(0);
        let inv = Scalar::one().try_div(&a).unwrap();
        assert_eq!(inv.evaluate(&[rat(1, 1)]).unwrap(), rat(1, 2));
        assert_eq!((x(0) * x(1)).evaluate(&[rat(2, 1), rat(3, 1)]).unwrap(), rat(6, 1));
        assert_eq!(inv.evaluate(&[rat(-1, 1)]), Err(ScalarError::Pole));
    }

    #[test]
    fn factors_are_shared() {
        let a = Scalar::one() + x(0);
        let s = Scalar::one().try_div(&(&a * &a)).unwrap();
        let t = Scalar::one().try_div(&a).unwrap();
        let sum = &s + &t;
        assert_eq!(sum.denominator_factors().len(), 1);
        assert_eq!(sum.denominator_factors()[0].1, 2);
    }

    #[test]
    fn substitution() {
        // 1/(1+x1) with x1 -> x2^2
        let a = Scalar::one() + x(0);
        let inv = Scalar::one().try_div(&a).unwrap();
        let r = inv.substitute(&[x(1) * x(1)]).unwrap();
        assert_eq!(r * (Scalar::one() + x(1) * x(1)), Scalar::one());
    }
}
