use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_rational::BigRational;

use super::chart::{Chart, Role};
use super::GradedError;
use crate::scalar::Scalar;

/// Exponents of the positive-degree coordinates, one entry per slot.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub(crate) Vec<u8>);

impl Monomial {
    pub fn one(chart: &Chart) -> Self {
        Monomial(vec![0; chart.slot_count()])
    }

    pub fn slot(chart: &Chart, s: usize) -> Self {
        let mut m = Monomial::one(chart);
        m.0[s] = 1;
        m
    }

    pub fn exponent(&self, s: usize) -> u8 {
        self.0[s]
    }

    pub fn exponents(&self) -> &[u8] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn degree(&self, chart: &Chart) -> u32 {
        self.0
            .iter()
            .enumerate()
            .map(|(s, &e)| e as u32 * chart.slot_degree(s))
            .sum()
    }

    /// Product in canonical order: `Some((negative, m))`, or `None` if an odd
    /// coordinate would be squared.
    pub fn mul(&self, other: &Monomial, chart: &Chart) -> Option<(bool, Monomial)> {
        let n = self.0.len();
        let mut v = self.0.clone();
        let mut neg = false;
        // odd factors of `self` standing right of the slot being moved
        let mut odd_right = vec![0u32; n + 1];
        for s in (0..n).rev() {
            odd_right[s] = odd_right[s + 1]
                + if chart.slot_is_odd(s) && self.0[s] > 0 { 1 } else { 0 };
        }
        for s in 0..n {
            let e = other.0[s];
            if e == 0 {
                continue;
            }
            if chart.slot_is_odd(s) {
                if self.0[s] > 0 {
                    return None;
                }
                if odd_right[s + 1] % 2 == 1 {
                    neg = !neg;
                }
            }
            v[s] += e;
        }
        Some((neg, Monomial(v)))
    }
}

/// Polynomial in the positive-degree coordinates with [`Scalar`]
/// coefficients. Zero coefficients are never stored, so equality of the
/// term maps is equality of superfunctions.
#[derive(Clone, Debug)]
pub struct Superfunction {
    chart: Arc<Chart>,
    terms: BTreeMap<Monomial, Scalar>,
}

/// Result of [`Superfunction::degree_of`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Homogeneity {
    Zero,
    Degree(u32),
    Inhomogeneous,
}

impl Superfunction {
    pub fn zero(chart: &Arc<Chart>) -> Self {
        Superfunction {
            chart: chart.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(chart: &Arc<Chart>, c: Scalar) -> Self {
        Superfunction::term(chart, Monomial::one(chart), c)
    }

    pub fn constant(chart: &Arc<Chart>, c: i64) -> Self {
        Superfunction::scalar(chart, Scalar::from_int(c))
    }

    pub fn term(chart: &Arc<Chart>, m: Monomial, c: Scalar) -> Self {
        let mut f = Superfunction::zero(chart);
        if !c.is_zero() {
            f.terms.insert(m, c);
        }
        f
    }

    /// The coordinate with chart index `i` as a superfunction.
    pub fn coordinate(chart: &Arc<Chart>, i: usize) -> Self {
        match chart.role(i) {
            Role::Base(v) => Superfunction::scalar(chart, Scalar::var(v)),
            Role::Slot(s) => Superfunction::term(chart, Monomial::slot(chart, s), Scalar::one()),
        }
    }

    pub fn named(chart: &Arc<Chart>, name: &str) -> Result<Self, GradedError> {
        Ok(Superfunction::coordinate(chart, chart.lookup(name)?))
    }

    pub fn from_terms(chart: &Arc<Chart>, terms: impl IntoIterator<Item = (Monomial, Scalar)>) -> Self {
        let mut f = Superfunction::zero(chart);
        for (m, c) in terms {
            f.add_term(m, c);
        }
        f
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// Degree-0 part of a superfunction (its Scalar), if it has no other terms.
    pub fn as_scalar(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn check(&self, other: &Superfunction) -> Result<(), GradedError> {
        if Chart::same(&self.chart, &other.chart) {
            Ok(())
        } else {
            Err(GradedError::ChartMismatch)
        }
    }

    pub fn try_add(&self, other: &Superfunction) -> Result<Superfunction, GradedError> {
        self.check(other)?;
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.add_term(m.clone(), c.clone());
        }
        Ok(r)
    }

    pub fn try_sub(&self, other: &Superfunction) -> Result<Superfunction, GradedError> {
        self.check(other)?;
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.add_term(m.clone(), -c);
        }
        Ok(r)
    }

    /// Koszul-signed product.
    pub fn try_mul(&self, other: &Superfunction) -> Result<Superfunction, GradedError> {
        self.check(other)?;
        let mut r = Superfunction::zero(&self.chart);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                if let Some((neg, m)) = m1.mul(m2, &self.chart) {
                    let c = c1 * c2;
                    r.add_term(m, if neg { -c } else { c });
                }
            }
        }
        Ok(r)
    }

    pub fn scale(&self, c: &Scalar) -> Superfunction {
        if c.is_zero() {
            return Superfunction::zero(&self.chart);
        }
        let mut r = Superfunction::zero(&self.chart);
        for (m, a) in &self.terms {
            r.add_term(m.clone(), a * c);
        }
        r
    }

    pub fn scale_rational(&self, c: &BigRational) -> Superfunction {
        self.scale(&Scalar::from_rational(c.clone()))
    }

    pub fn scale_int(&self, c: i64) -> Superfunction {
        self.scale(&Scalar::from_int(c))
    }

    pub fn pow(&self, k: u32) -> Superfunction {
        (0..k).fold(Superfunction::constant(&self.chart, 1), |acc, _| &acc * self)
    }

    pub fn degree_of(&self) -> Homogeneity {
        let mut deg = None;
        for m in self.terms.keys() {
            let d = m.degree(&self.chart);
            match deg {
                None => deg = Some(d),
                Some(e) if e != d => return Homogeneity::Inhomogeneous,
                _ => {}
            }
        }
        deg.map_or(Homogeneity::Zero, Homogeneity::Degree)
    }

    /// Total degree if homogeneous and nonzero.
    pub fn degree(&self) -> Option<u32> {
        match self.degree_of() {
            Homogeneity::Degree(d) => Some(d),
            _ => None,
        }
    }

    /// Part of total degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> Superfunction {
        Superfunction {
            chart: self.chart.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree(&self.chart) == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn map_coefficients(&self, f: impl Fn(&Scalar) -> Scalar) -> Superfunction {
        Superfunction::from_terms(&self.chart, self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    /// Move to a chart with the same coordinates.
    pub fn rechart(&self, chart: &Arc<Chart>) -> Result<Superfunction, GradedError> {
        if !Chart::same(&self.chart, chart) {
            return Err(GradedError::ChartMismatch);
        }
        Ok(Superfunction {
            chart: chart.clone(),
            terms: self.terms.clone(),
        })
    }
}

impl PartialEq for Superfunction {
    fn eq(&self, other: &Self) -> bool {
        if !Chart::same(&self.chart, &other.chart) {
            return false;
        }
        self.terms.len() == other.terms.len()
            && self
                .terms
                .iter()
                .zip(other.terms.iter())
                .all(|((m1, c1), (m2, c2))| m1 == m2 && c1 == c2)
    }
}

impl fmt::Display for Superfunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        super::text::write_superfunction(self, f)
    }
}

// Operator forms panic on chart mismatch; use the `try_*` methods when the
// charts are not known to agree.
macro_rules! sf_binop {
    ($tr:ident, $m:ident, $try:ident) => {
        impl $tr<&Superfunction> for &Superfunction {
            type Output = Superfunction;
            fn $m(self, rhs: &Superfunction) -> Superfunction {
                self.$try(rhs).expect("superfunctions on different charts")
            }
        }
        impl $tr<Superfunction> for Superfunction {
            type Output = Superfunction;
            fn $m(self, rhs: Superfunction) -> Superfunction {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Superfunction> for Superfunction {
            type Output = Superfunction;
            fn $m(self, rhs: &Superfunction) -> Superfunction {
                (&self).$m(rhs)
            }
        }
        impl $tr<Superfunction> for &Superfunction {
            type Output = Superfunction;
            fn $m(self, rhs: Superfunction) -> Superfunction {
                self.$m(&rhs)
            }
        }
    };
}

sf_binop!(Add, add, try_add);
sf_binop!(Sub, sub, try_sub);
sf_binop!(Mul, mul, try_mul);

impl Neg for &Superfunction {
    type Output = Superfunction;
    fn neg(self) -> Superfunction {
        self.map_coefficients(|c| -c)
    }
}

impl Neg for Superfunction {
    type Output = Superfunction;
    fn neg(self) -> Superfunction {
        -&self
    }
}
