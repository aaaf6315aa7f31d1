//! Sparse multivariate polynomials with exact rational coefficients.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exponent vector with trailing zeros trimmed, ordered graded-lex.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Exponents(Vec<u16>);

impl Exponents {
    pub fn one() -> Self {
        Exponents(Vec::new())
    }

    pub fn var(index: usize) -> Self {
        let mut v = vec![0; index + 1];
        v[index] = 1;
        Exponents(v)
    }

    pub fn from_vec(mut v: Vec<u16>) -> Self {
        while v.last() == Some(&0) {
            v.pop();
        }
        Exponents(v)
    }

    pub fn get(&self, index: usize) -> u16 {
        self.0.get(index).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    /// Pairs `(variable, exponent)` with nonzero exponent.
    pub fn iter(&self) -> impl Iterator<Item = (usize, u16)> + '_ {
        self.0.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, &e)| (i, e))
    }

    pub fn mul(&self, other: &Exponents) -> Exponents {
        let n = self.0.len().max(other.0.len());
        let v = (0..n).map(|i| self.get(i) + other.get(i)).collect();
        Exponents(v)
    }

    /// `self / other` if `other` divides `self`.
    pub fn div(&self, other: &Exponents) -> Option<Exponents> {
        if other.0.len() > self.0.len() && other.0[self.0.len()..].iter().any(|&e| e > 0) {
            return None;
        }
        let mut v = self.0.clone();
        for (i, &e) in other.0.iter().enumerate() {
            if i >= v.len() {
                break;
            }
            if v[i] < e {
                return None;
            }
            v[i] -= e;
        }
        Some(Exponents::from_vec(v))
    }

    fn lower(&self, index: usize) -> Exponents {
        let mut v = self.0.clone();
        v[index] -= 1;
        Exponents::from_vec(v)
    }

    pub fn max_var(&self) -> Option<usize> {
        if self.0.is_empty() {
            None
        } else {
            Some(self.0.len() - 1)
        }
    }
}

impl Ord for Exponents {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Exponents {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial `Σ c_α x^α`; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    terms: BTreeMap<Exponents, BigRational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(Exponents::one(), c);
        }
        p
    }

    pub fn from_int(c: i64) -> Self {
        Poly::constant(BigRational::from_integer(BigInt::from(c)))
    }

    pub fn var(index: usize) -> Self {
        let mut p = Poly::zero();
        p.terms.insert(Exponents::var(index), BigRational::one());
        p
    }

    pub fn monomial(exp: Exponents, c: BigRational) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(exp, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponents, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Exponents::degree)
    }

    pub fn max_var(&self) -> Option<usize> {
        self.terms.keys().filter_map(Exponents::max_var).max()
    }

    /// Leading term in graded-lex order.
    pub fn leading(&self) -> Option<(&Exponents, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn coefficient(&self, exp: &Exponents) -> BigRational {
        self.terms.get(exp).cloned().unwrap_or_else(BigRational::zero)
    }

    fn add_term(&mut self, exp: Exponents, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut r = self.clone();
        for (e, c) in &other.terms {
            r.add_term(e.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut r = self.clone();
        for (e, c) in &other.terms {
            r.add_term(e.clone(), -c.clone());
        }
        r
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect(),
        }
    }

    pub fn scale(&self, k: &BigRational) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * k)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        let mut r = Poly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                r.add_term(e1.mul(e2), c1 * c2);
            }
        }
        r
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut r = Poly::one();
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }

    pub fn derivative(&self, var: usize) -> Poly {
        let mut r = Poly::zero();
        for (e, c) in &self.terms {
            let k = e.get(var);
            if k > 0 {
                r.add_term(e.lower(var), c * BigRational::from_integer(BigInt::from(k)));
            }
        }
        r
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (lead_e, lead_c) = d.leading()?;
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        let mut rem = self.clone();
        let mut q = Poly::zero();
        while let Some((re, rc)) = rem.leading() {
            let e = re.div(lead_e)?;
            let c = rc / lead_c;
            let t = Poly::monomial(e.clone(), c.clone());
            rem = rem.sub(&t.mul(d));
            q.add_term(e, c);
        }
        Some(q)
    }

    pub fn eval(&self, point: &[BigRational]) -> BigRational {
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, k) in e.iter() {
                let x = point.get(i).cloned().unwrap_or_else(BigRational::zero);
                t *= num_traits::pow(x, k as usize);
            }
            acc += t;
        }
        acc
    }

    /// Rename variables through `map` (old index -> new index).
    pub fn rename(&self, map: &[usize]) -> Poly {
        let mut r = Poly::zero();
        for (e, c) in &self.terms {
            let mut v: Vec<u16> = Vec::new();
            for (i, k) in e.iter() {
                let j = map[i];
                if v.len() <= j {
                    v.resize(j + 1, 0);
                }
                v[j] += k;
            }
            r.add_term(Exponents::from_vec(v), c.clone());
        }
        r
    }

    /// Divide by the leading coefficient; returns that coefficient.
    pub fn make_monic(&mut self) -> BigRational {
        let lc = match self.leading() {
            Some((_, c)) => c.clone(),
            None => return BigRational::one(),
        };
        if !lc.is_one() {
            let inv = lc.recip();
            for c in self.terms.values_mut() {
                *c *= &inv;
            }
        }
        lc
    }

    /// Coefficient map keyed by exponents; used to split polynomial identities
    /// into scalar equations.
    pub fn coefficients(&self) -> &BTreeMap<Exponents, BigRational> {
        &self.terms
    }

    pub fn fmt_with(&self, f: &mut fmt::Formatter<'_>, names: &dyn Fn(usize) -> String) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            write!(f, "{}", a)?;
            for (i, p) in e.iter() {
                write!(f, "*{}", names(i))?;
                if p > 1 {
                    write!(f, "^{}", p)?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_with(f, &|i| format!("x{}", i + 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> Poly {
        Poly::var(i)
    }

    #[test]
    fn graded_lex_order() {
        let a = Exponents::from_vec(vec![2]);
        let b = Exponents::from_vec(vec![0, 1]);
        let c = Exponents::from_vec(vec![1, 1]);
        assert!(a > b);
        assert!(a > c);
        assert!(c > b);
        assert!(Exponents::var(0) > Exponents::var(1));
    }

    #[test]
    fn long_division() {
        // (x1 x2 + x2) / x2 = x1 + 1
        let num = x(0).mul(&x(1)).add(&x(1));
        let q = num.div_exact(&x(1)).unwrap();
        assert_eq!(q, x(0).add(&Poly::one()));
        assert!(x(0).div_exact(&x(1)).is_none());
        let sq = x(0).add(&Poly::one()).pow(2);
        assert_eq!(sq.div_exact(&x(0).add(&Poly::one())).unwrap(), x(0).add(&Poly::one()));
    }

    #[test]
    fn display_is_descending() {
        let p = x(0).mul(&x(0)).mul(&x(1)).scale(&BigRational::new(3.into(), 2.into())).sub(&Poly::one());
        assert_eq!(p.to_string(), "3/2*x1^2*x2 - 1");
    }
}
