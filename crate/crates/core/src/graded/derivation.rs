use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::chart::{Chart, Role};
use super::superfunction::Superfunction;
use super::{koszul, GradedError};
use crate::scalar::Scalar;

/// Graded vector field `Σ f_a ∂/∂q^a` of a declared total degree.
#[derive(Clone, Debug)]
pub struct Derivation {
    chart: Arc<Chart>,
    degree: i32,
    comps: BTreeMap<usize, Superfunction>,
}

/// Outcome of [`Derivation::is_q_structure`]. The certificate is the first
/// nonzero component of `[D, D]`.
#[derive(Clone, Debug)]
pub struct QCheck {
    pub holds: bool,
    pub certificate: Option<(String, Superfunction)>,
}

impl Derivation {
    pub fn zero(chart: &Arc<Chart>, degree: i32) -> Self {
        Derivation {
            chart: chart.clone(),
            degree,
            comps: BTreeMap::new(),
        }
    }

    /// Build from components keyed by coordinate index. Each nonzero
    /// component must be homogeneous of degree `degree + deg(q^a)`.
    pub fn new(
        chart: &Arc<Chart>,
        degree: i32,
        comps: impl IntoIterator<Item = (usize, Superfunction)>,
    ) -> Result<Self, GradedError> {
        let mut d = Derivation::zero(chart, degree);
        for (a, f) in comps {
            d.set(a, f)?;
        }
        Ok(d)
    }

    /// Components keyed by coordinate name.
    pub fn from_named<'a>(
        chart: &Arc<Chart>,
        degree: i32,
        comps: impl IntoIterator<Item = (&'a str, Superfunction)>,
    ) -> Result<Self, GradedError> {
        let mut d = Derivation::zero(chart, degree);
        for (n, f) in comps {
            let a = chart.lookup(n)?;
            let f = f.try_add(&d.component(a))?;
            d.set(a, f)?;
        }
        Ok(d)
    }

    /// `∂/∂q^a`.
    pub fn partial(chart: &Arc<Chart>, a: usize) -> Self {
        let mut d = Derivation::zero(chart, -(chart.degree(a) as i32));
        d.comps.insert(a, Superfunction::constant(chart, 1));
        d
    }

    pub fn set(&mut self, a: usize, f: Superfunction) -> Result<(), GradedError> {
        if !Chart::same(&self.chart, f.chart()) {
            return Err(GradedError::ChartMismatch);
        }
        if a >= self.chart.len() {
            return Err(GradedError::UnknownCoordinate(format!("#{}", a)));
        }
        if f.is_zero() {
            self.comps.remove(&a);
            return Ok(());
        }
        let want = self.degree + self.chart.degree(a) as i32;
        match f.degree() {
            Some(d) if d as i32 == want => {}
            Some(_) => {
                return Err(GradedError::DegreeMismatch(format!(
                    "component for '{}' should have degree {}",
                    self.chart.coordinate(a).name,
                    want
                )))
            }
            None => return Err(GradedError::Inhomogeneous(self.chart.coordinate(a).name.clone())),
        }
        self.comps.insert(a, f);
        Ok(())
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn component(&self, a: usize) -> Superfunction {
        self.comps
            .get(&a)
            .cloned()
            .unwrap_or_else(|| Superfunction::zero(&self.chart))
    }

    pub fn components(&self) -> impl Iterator<Item = (usize, &Superfunction)> {
        self.comps.iter().map(|(a, f)| (*a, f))
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    fn check(&self, f: &Arc<Chart>) -> Result<(), GradedError> {
        if Chart::same(&self.chart, f) {
            Ok(())
        } else {
            Err(GradedError::ChartMismatch)
        }
    }

    /// Action on a superfunction by the graded Leibniz rule.
    pub fn apply(&self, f: &Superfunction) -> Result<Superfunction, GradedError> {
        self.check(f.chart())?;
        let chart = &self.chart;
        let mut out = Superfunction::zero(chart);
        if self.comps.is_empty() {
            return Ok(out);
        }
        let deg = self.degree as i64;
        for (m, c) in f.terms() {
            let mono = Superfunction::term(chart, m.clone(), Scalar::one());
            // D(c) m, with D(c) = Σ ∂_v c D(x^v)
            for v in 0..chart.base_count() {
                let a = chart.base_coordinate(v);
                let Some(da) = self.comps.get(&a) else { continue };
                let dc = c.partial(v);
                if dc.is_zero() {
                    continue;
                }
                out = out.try_add(&da.scale(&dc).try_mul(&mono)?)?;
            }
            // c D(m), one slot at a time
            let mut prefix = 0i64;
            for s in 0..chart.slot_count() {
                let e = m.exponent(s);
                if e == 0 {
                    continue;
                }
                let a = chart.slot_coordinate(s);
                let sdeg = chart.slot_degree(s) as i64;
                if let Some(da) = self.comps.get(&a) {
                    let mut left = m.clone();
                    let mut right = m.clone();
                    for t in 0..chart.slot_count() {
                        if t < s {
                            right.0[t] = 0;
                        } else if t > s {
                            left.0[t] = 0;
                        } else {
                            left.0[t] = e - 1;
                            right.0[t] = 0;
                        }
                    }
                    let l = Superfunction::term(chart, left, c.clone());
                    let r = Superfunction::term(chart, right, Scalar::one());
                    let mut t = l.try_mul(da)?.try_mul(&r)?;
                    let mut k = e as i64;
                    if koszul(deg, prefix) {
                        k = -k;
                    }
                    if k != 1 {
                        t = t.scale_int(k);
                    }
                    out = out.try_add(&t)?;
                }
                prefix += sdeg * e as i64;
            }
        }
        Ok(out)
    }

    /// Image of coordinate `a`.
    pub fn on_coordinate(&self, a: usize) -> Superfunction {
        self.component(a)
    }

    /// Graded commutator, computed on generators.
    pub fn commutator(&self, other: &Derivation) -> Result<Derivation, GradedError> {
        self.check(&other.chart)?;
        let neg = koszul(self.degree as i64, other.degree as i64);
        let mut r = Derivation::zero(&self.chart, self.degree + other.degree);
        for a in 0..self.chart.len() {
            let x = self.apply(&other.component(a))?;
            let y = other.apply(&self.component(a))?;
            let c = if neg { x.try_add(&y)? } else { x.try_sub(&y)? };
            if !c.is_zero() {
                r.comps.insert(a, c);
            }
        }
        Ok(r)
    }

    pub fn try_add(&self, other: &Derivation) -> Result<Derivation, GradedError> {
        self.check(&other.chart)?;
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(GradedError::DegreeMismatch(format!(
                "cannot add derivations of degree {} and {}",
                self.degree, other.degree
            )));
        }
        let degree = if self.is_zero() { other.degree } else { self.degree };
        let mut r = Derivation::zero(&self.chart, degree);
        for a in self.comps.keys().chain(other.comps.keys()) {
            let c = self.component(*a).try_add(&other.component(*a))?;
            if c.is_zero() {
                r.comps.remove(a);
            } else {
                r.comps.insert(*a, c);
            }
        }
        Ok(r)
    }

    pub fn try_sub(&self, other: &Derivation) -> Result<Derivation, GradedError> {
        self.try_add(&other.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> Derivation {
        let mut r = Derivation::zero(&self.chart, self.degree);
        for (a, f) in &self.comps {
            let g = f.scale(c);
            if !g.is_zero() {
                r.comps.insert(*a, g);
            }
        }
        r
    }

    /// Left multiplication by a homogeneous superfunction `f`.
    pub fn left_mul(&self, f: &Superfunction) -> Result<Derivation, GradedError> {
        self.check(f.chart())?;
        if f.is_zero() {
            return Ok(Derivation::zero(&self.chart, self.degree));
        }
        let d = f
            .degree()
            .ok_or_else(|| GradedError::Inhomogeneous("multiplier".into()))?;
        let mut r = Derivation::zero(&self.chart, self.degree + d as i32);
        for (a, g) in &self.comps {
            let h = f.try_mul(g)?;
            if !h.is_zero() {
                r.comps.insert(*a, h);
            }
        }
        Ok(r)
    }

    /// `true` iff the degree is 1 and `[D, D] = 0`.
    pub fn is_q_structure(&self) -> Result<QCheck, GradedError> {
        if self.degree != 1 {
            return Ok(QCheck {
                holds: false,
                certificate: None,
            });
        }
        let sq = self.commutator(self)?;
        let certificate = sq
            .comps
            .iter()
            .next()
            .map(|(a, f)| (self.chart.coordinate(*a).name.clone(), f.clone()));
        Ok(QCheck {
            holds: certificate.is_none(),
            certificate,
        })
    }

    /// Move to a chart with identical coordinates.
    pub fn rechart(&self, chart: &Arc<Chart>) -> Result<Derivation, GradedError> {
        self.check(chart)?;
        let mut r = Derivation::zero(chart, self.degree);
        for (a, f) in &self.comps {
            r.comps.insert(*a, f.rechart(chart)?);
        }
        Ok(r)
    }

    /// Components for base coordinates as scalars (zero if absent). Only
    /// meaningful for degree-0 derivations.
    pub fn base_components(&self) -> Vec<Scalar> {
        (0..self.chart.base_count())
            .map(|v| {
                self.component(self.chart.base_coordinate(v))
                    .as_scalar()
                    .unwrap_or_default()
            })
            .collect()
    }

    pub fn role(&self, a: usize) -> Role {
        self.chart.role(a)
    }
}

impl PartialEq for Derivation {
    fn eq(&self, other: &Self) -> bool {
        Chart::same(&self.chart, &other.chart)
            && (self.degree == other.degree || (self.is_zero() && other.is_zero()))
            && self.comps == other.comps
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        super::text::write_derivation(self, f)
    }
}

/// `[E1, [Q, E2]]`.
pub fn derived_bracket(q: &Derivation, e1: &Derivation, e2: &Derivation) -> Result<Derivation, GradedError> {
    if q.degree() != 1 || e1.degree() != -1 || e2.degree() != -1 {
        return Err(GradedError::DegreeMismatch(format!(
            "derived bracket needs degrees (1, -1, -1), got ({}, {}, {})",
            q.degree(),
            e1.degree(),
            e2.degree()
        )));
    }
    e1.commutator(&q.commutator(e2)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::GradedCoordinate;

    fn t1r2() -> Arc<Chart> {
        Chart::new(vec![
            GradedCoordinate::new("x1", 0),
            GradedCoordinate::new("x2", 0),
            GradedCoordinate::new("th1", 1),
            GradedCoordinate::new("th2", 1),
        ])
        .unwrap()
    }

    fn ddr(c: &Arc<Chart>) -> Derivation {
        Derivation::from_named(
            c,
            1,
            [
                ("x1", Superfunction::named(c, "th1").unwrap()),
                ("x2", Superfunction::named(c, "th2").unwrap()),
            ],
        )
        .unwrap()
    }

    #[test]
    fn de_rham_leibniz() {
        let c = t1r2();
        let x1 = Superfunction::named(&c, "x1").unwrap();
        let x2 = Superfunction::named(&c, "x2").unwrap();
        let th1 = Superfunction::named(&c, "th1").unwrap();
        let th2 = Superfunction::named(&c, "th2").unwrap();
        let d = ddr(&c);
        assert_eq!(d.apply(&(&x1 * &x2)).unwrap(), &th1 * &x2 + &x1 * &th2);
        assert!(d.commutator(&d).unwrap().is_zero());
        assert!(d.is_q_structure().unwrap().holds);
    }

    #[test]
    fn odd_partial_sign() {
        let c = t1r2();
        let th1 = Superfunction::named(&c, "th1").unwrap();
        let th2 = Superfunction::named(&c, "th2").unwrap();
        let p = Derivation::partial(&c, 3);
        assert_eq!(p.apply(&(&th1 * &th2)).unwrap(), -&th1);
        // [∂/∂θ¹, d] = ∂/∂x¹
        let b = Derivation::partial(&c, 2).commutator(&ddr(&c)).unwrap();
        assert_eq!(b, Derivation::partial(&c, 0));
    }
}
