//! Exact linear ansatz solving.
//!
//! Constraints are linear in the unknown rational coefficients `c_k` with
//! rational-function coefficients. Each is turned into rational equations by
//! bringing every slot coefficient over a common denominator and reading off
//! the numerator monomial by monomial, so no sampling is involved. Solutions
//! are then re-checked by applying the constraint operators to the assembled
//! superfunction.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::graded::{Chart, Derivation, GradedError, Homogeneity, Monomial, Superfunction};
use crate::scalar::{Exponents, Scalar};

/// `Σ_k coeffs[k]·c_k + constant = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Equation {
    pub label: String,
    pub coeffs: BTreeMap<usize, BigRational>,
    pub constant: BigRational,
}

impl Equation {
    pub fn is_trivial(&self) -> bool {
        self.coeffs.is_empty() && self.constant.is_zero()
    }

    /// Value of the left-hand side at `c`.
    pub fn residual(&self, c: &[BigRational]) -> BigRational {
        self.coeffs.iter().fold(self.constant.clone(), |acc, (k, v)| acc + v * &c[*k])
    }
}

#[derive(Clone, Debug)]
pub enum ConstraintKind {
    Closed(Derivation),
    Horizontal(Vec<Derivation>),
}

#[derive(Clone, Debug)]
pub struct ConstraintSet {
    pub kind: ConstraintKind,
    pub equations: Vec<Equation>,
}

impl ConstraintSet {
    pub fn is_empty(&self) -> bool {
        self.equations.iter().all(Equation::is_trivial)
    }
}

/// `fixed + Σ c_k g_k` over named homogeneous generators.
#[derive(Clone, Debug)]
pub struct AnsatzProblem {
    chart: Arc<Chart>,
    degree: Option<u32>,
    names: Vec<String>,
    gens: Vec<Superfunction>,
    fixed: Superfunction,
}

impl AnsatzProblem {
    pub fn new(chart: &Arc<Chart>) -> Self {
        AnsatzProblem {
            chart: chart.clone(),
            degree: None,
            names: Vec::new(),
            gens: Vec::new(),
            fixed: Superfunction::zero(chart),
        }
    }

    fn check_degree(&mut self, g: &Superfunction) -> Result<(), GradedError> {
        if !Chart::same(g.chart(), &self.chart) {
            return Err(GradedError::ChartMismatch);
        }
        match g.degree_of() {
            Homogeneity::Zero => Ok(()),
            Homogeneity::Inhomogeneous => Err(GradedError::Inhomogeneous(g.to_string())),
            Homogeneity::Degree(d) => match self.degree {
                Some(e) if e != d => Err(GradedError::DegreeMismatch(format!(
                    "generator of degree {} in an ansatz of degree {}",
                    d, e
                ))),
                _ => {
                    self.degree = Some(d);
                    Ok(())
                }
            },
        }
    }

    pub fn add_generator(&mut self, name: impl Into<String>, g: Superfunction) -> Result<usize, GradedError> {
        self.check_degree(&g)?;
        self.names.push(name.into());
        self.gens.push(g);
        Ok(self.gens.len() - 1)
    }

    /// Fix part of the ansatz (anchoring); it enters every equation as a
    /// constant term.
    pub fn add_fixed(&mut self, f: &Superfunction) -> Result<(), GradedError> {
        self.check_degree(f)?;
        self.fixed = self.fixed.try_add(f)?;
        Ok(())
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn generator(&self, k: usize) -> &Superfunction {
        &self.gens[k]
    }

    pub fn fixed(&self) -> &Superfunction {
        &self.fixed
    }

    /// `fixed·w + Σ c_k g_k`; `w` is 1 for the particular solution and 0 for
    /// nullspace vectors.
    pub fn assemble(&self, c: &[BigRational], with_fixed: bool) -> Superfunction {
        let mut f = if with_fixed {
            self.fixed.clone()
        } else {
            Superfunction::zero(&self.chart)
        };
        for (g, v) in self.gens.iter().zip(c) {
            if !v.is_zero() {
                f = f + g.scale_rational(v);
            }
        }
        f
    }

    fn equations_for(
        &self,
        label: &str,
        op: impl Fn(&Superfunction) -> Result<Superfunction, GradedError>,
    ) -> Result<Vec<Equation>, GradedError> {
        let mut slots: BTreeMap<Monomial, (Vec<(usize, Scalar)>, Scalar)> = BTreeMap::new();
        for (k, g) in self.gens.iter().enumerate() {
            for (m, s) in op(g)?.terms() {
                slots.entry(m.clone()).or_insert_with(|| (Vec::new(), Scalar::zero())).0.push((k, s.clone()));
            }
        }
        if !self.fixed.is_zero() {
            for (m, s) in op(&self.fixed)?.terms() {
                slots.entry(m.clone()).or_insert_with(|| (Vec::new(), Scalar::zero())).1 = s.clone();
            }
        }
        let mut out = Vec::new();
        for (m, (cols, fixed)) in slots {
            let slot = Superfunction::term(&self.chart, m, Scalar::one());
            out.extend(split_equations(&format!("{} [{}]", label, slot), &cols, &fixed));
        }
        Ok(out)
    }
}

/// Equations `Σ c_k s_k(x) + s_0(x) ≡ 0` split by monomials of the common
/// numerator.
pub fn split_equations(label: &str, cols: &[(usize, Scalar)], fixed: &Scalar) -> Vec<Equation> {
    let l = Scalar::common_denominator(cols.iter().map(|(_, s)| s).chain(std::iter::once(fixed)));
    let mut rows: BTreeMap<Exponents, Equation> = BTreeMap::new();
    let blank = || Equation {
        label: String::new(),
        coeffs: BTreeMap::new(),
        constant: BigRational::zero(),
    };
    for (k, s) in cols {
        for (e, v) in s.numerator_over(&l).terms() {
            let row = rows.entry(e.clone()).or_insert_with(blank);
            let slot = row.coeffs.entry(*k).or_insert_with(BigRational::zero);
            *slot += v;
        }
    }
    if !fixed.is_zero() {
        for (e, v) in fixed.numerator_over(&l).terms() {
            rows.entry(e.clone()).or_insert_with(blank).constant += v;
        }
    }
    rows.into_iter()
        .filter_map(|(e, mut r)| {
            r.coeffs.retain(|_, v| !v.is_zero());
            if r.is_trivial() {
                return None;
            }
            let m: Vec<String> = e
                .iter()
                .map(|(v, k)| if k == 1 { format!("x{}", v + 1) } else { format!("x{}^{}", v + 1, k) })
                .collect();
            r.label = format!("{}, coefficient of {}", label, if m.is_empty() { "1".into() } else { m.join("*") });
            Some(r)
        })
        .collect()
}

/// One equation per monomial coefficient of `Q̃(ansatz)`.
pub fn impose_closed(p: &AnsatzProblem, qt: &Derivation) -> Result<ConstraintSet, GradedError> {
    if !Chart::same(qt.chart(), p.chart()) {
        return Err(GradedError::ChartMismatch);
    }
    Ok(ConstraintSet {
        equations: p.equations_for("closed", |g| qt.apply(g))?,
        kind: ConstraintKind::Closed(qt.clone()),
    })
}

/// One equation per generator and monomial coefficient of `ε̃(ansatz)`.
pub fn impose_horizontal(p: &AnsatzProblem, gens: &[Derivation]) -> Result<ConstraintSet, GradedError> {
    let mut equations = Vec::new();
    for (j, e) in gens.iter().enumerate() {
        if !Chart::same(e.chart(), p.chart()) {
            return Err(GradedError::ChartMismatch);
        }
        if e.degree() != -1 {
            return Err(GradedError::DegreeMismatch(format!("generator {} has degree {}", j, e.degree())));
        }
        equations.extend(p.equations_for(&format!("horizontal[{}]", j), |g| e.apply(g))?);
    }
    Ok(ConstraintSet {
        kind: ConstraintKind::Horizontal(gens.to_vec()),
        equations,
    })
}

/// Exact affine solution set of a linear system in `n` unknowns.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSolution {
    pub particular: Option<Vec<BigRational>>,
    pub basis: Vec<Vec<BigRational>>,
    pub pivots: Vec<usize>,
    /// Label of an equation reducing to `0 = c ≠ 0`.
    pub witness: Option<String>,
}

/// Reduced row echelon form with pivots chosen in column order.
pub fn solve_linear(n: usize, equations: &[Equation]) -> LinearSolution {
    // pivot column -> (row with leading 1 at that column, constant)
    let mut piv: BTreeMap<usize, (BTreeMap<usize, BigRational>, BigRational)> = BTreeMap::new();
    for eq in equations {
        let mut row = eq.coeffs.clone();
        let mut cst = eq.constant.clone();
        let mut from = 0;
        loop {
            let next = row.range(from..).map(|(k, _)| *k).find(|k| piv.contains_key(k));
            let Some(col) = next else { break };
            let f = row.remove(&col).expect("present");
            let (prow, pc) = &piv[&col];
            for (k, v) in prow.iter().filter(|(k, _)| **k != col) {
                let e = row.entry(*k).or_insert_with(BigRational::zero);
                *e -= &f * v;
                if e.is_zero() {
                    row.remove(k);
                }
            }
            cst -= &f * pc;
            from = col + 1;
        }
        match row.iter().next().map(|(k, v)| (*k, v.clone())) {
            None => {
                if !cst.is_zero() {
                    return LinearSolution {
                        particular: None,
                        basis: Vec::new(),
                        pivots: Vec::new(),
                        witness: Some(eq.label.clone()),
                    };
                }
            }
            Some((lead, v)) => {
                let inv = BigRational::one() / v;
                for x in row.values_mut() {
                    *x *= &inv;
                }
                cst *= &inv;
                piv.insert(lead, (row, cst));
            }
        }
    }
    // Back substitution, highest pivot first.
    let cols: Vec<usize> = piv.keys().rev().copied().collect();
    for &col in &cols {
        let (prow, pc) = piv[&col].clone();
        for (&other, (row, cst)) in piv.iter_mut() {
            if other >= col {
                continue;
            }
            if let Some(f) = row.remove(&col) {
                for (k, v) in prow.iter().filter(|(k, _)| **k != col) {
                    let e = row.entry(*k).or_insert_with(BigRational::zero);
                    *e -= &f * v;
                    if e.is_zero() {
                        row.remove(k);
                    }
                }
                *cst -= &f * &pc;
            }
        }
    }
    let mut particular = vec![BigRational::zero(); n];
    for (&col, (_, cst)) in &piv {
        particular[col] = -cst.clone();
    }
    let mut basis = Vec::new();
    for free in (0..n).filter(|k| !piv.contains_key(k)) {
        let mut v = vec![BigRational::zero(); n];
        v[free] = BigRational::one();
        for (&col, (row, _)) in &piv {
            if let Some(x) = row.get(&free) {
                v[col] = -x.clone();
            }
        }
        basis.push(v);
    }
    LinearSolution {
        particular: Some(particular),
        basis,
        pivots: piv.keys().copied().collect(),
        witness: None,
    }
}

#[derive(Clone, Debug)]
pub struct SolutionSpace {
    pub names: Vec<String>,
    pub particular: Option<Vec<BigRational>>,
    pub basis: Vec<Vec<BigRational>>,
    pub pivots: Vec<usize>,
    pub witness: Option<String>,
    pub equation_count: usize,
    /// Every reported vector was re-checked by applying the constraint
    /// operators to the assembled superfunction.
    pub verified: bool,
}

impl SolutionSpace {
    pub fn is_empty(&self) -> bool {
        self.particular.is_none()
    }

    /// Affine dimension, `None` when empty.
    pub fn dimension(&self) -> Option<usize> {
        self.particular.as_ref().map(|_| self.basis.len())
    }

    pub fn is_unique(&self) -> bool {
        self.dimension() == Some(0)
    }
}

fn satisfies(sets: &[ConstraintSet], f: &Superfunction) -> Result<bool, GradedError> {
    for s in sets {
        let ok = match &s.kind {
            ConstraintKind::Closed(q) => q.apply(f)?.is_zero(),
            ConstraintKind::Horizontal(gs) => {
                let mut ok = true;
                for g in gs {
                    if !g.apply(f)?.is_zero() {
                        ok = false;
                        break;
                    }
                }
                ok
            }
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn solve(p: &AnsatzProblem, sets: &[ConstraintSet]) -> Result<SolutionSpace, GradedError> {
    let eqs: Vec<Equation> = sets.iter().flat_map(|s| s.equations.iter().cloned()).collect();
    let lin = solve_linear(p.len(), &eqs);
    let mut verified = true;
    if let Some(part) = &lin.particular {
        verified &= satisfies(sets, &p.assemble(part, true))?;
        for b in &lin.basis {
            verified &= satisfies(sets, &p.assemble(b, false))?;
        }
    }
    Ok(SolutionSpace {
        names: p.names().to_vec(),
        particular: lin.particular,
        basis: lin.basis,
        pivots: lin.pivots,
        witness: lin.witness,
        equation_count: eqs.len(),
        verified,
    })
}

impl fmt::Display for SolutionSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.particular, &self.witness) {
            (None, w) => write!(f, "empty (witness: {})", w.as_deref().unwrap_or("?")),
            (Some(part), _) => {
                write!(f, "dimension {}:", self.basis.len())?;
                for (k, v) in part.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                    write!(f, " {}={}", self.names[k], v)?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::build_t1m;
    use crate::scalar::rat;

    #[test]
    fn rref_prefers_early_pivots() {
        let eq = |c: &[(usize, i64)], k: i64| Equation {
            label: "e".into(),
            coeffs: c.iter().map(|(i, v)| (*i, rat(*v, 1))).collect(),
            constant: rat(k, 1),
        };
        // c0 + c1 = 1, c1 - c2 = 0
        let s = solve_linear(3, &[eq(&[(0, 1), (1, 1)], -1), eq(&[(1, 1), (2, -1)], 0)]);
        assert_eq!(s.pivots, vec![0, 1]);
        assert_eq!(s.particular.unwrap(), vec![rat(1, 1), rat(0, 1), rat(0, 1)]);
        assert_eq!(s.basis, vec![vec![rat(-1, 1), rat(1, 1), rat(1, 1)]]);
        let bad = solve_linear(1, &[eq(&[(0, 1)], 0), eq(&[(0, 2)], -1)]);
        assert!(bad.particular.is_none());
    }

    #[test]
    fn constant_three_forms_are_closed() {
        let m = build_t1m(3).unwrap();
        let th = |i: usize| m.coord(&format!("th{}", i));
        let mut p = AnsatzProblem::new(&m.chart);
        p.add_generator("c", &th(1) * &th(2) * th(3)).unwrap();
        let s = solve(&p, &[impose_closed(&p, &m.q).unwrap()]).unwrap();
        assert!(s.verified);
        assert_eq!(s.dimension(), Some(1));
    }

    #[test]
    fn de_rham_closedness_of_two_forms() {
        // a(x) th1 th2 with a in {1, x1, x3}: closed iff no x3.
        let m = build_t1m(3).unwrap();
        let w = &m.coord("th1") * &m.coord("th2");
        let mut p = AnsatzProblem::new(&m.chart);
        for (name, s) in [("1", Scalar::one()), ("x1", Scalar::var(0)), ("x3", Scalar::var(2))] {
            p.add_generator(name, w.scale(&s)).unwrap();
        }
        let c = impose_closed(&p, &m.q).unwrap();
        let s = solve(&p, &[c]).unwrap();
        assert!(s.verified);
        assert_eq!(s.basis.len(), 2);
        assert!(s.basis.iter().all(|b| b[2].is_zero()));
    }

    #[test]
    fn exact_generator_gives_no_constraints() {
        let m = build_t1m(2).unwrap();
        let mut p = AnsatzProblem::new(&m.chart);
        let f = &m.coord("x1") * &m.coord("x2") * m.coord("th1");
        p.add_generator("dq", m.q.apply(&f).unwrap()).unwrap();
        assert!(impose_closed(&p, &m.q).unwrap().is_empty());
    }

    #[test]
    fn inconsistent_horizontality() {
        let m = crate::catalog::build_twisted_cotangent(&crate::catalog::PoissonData::symplectic_plane()).unwrap();
        let mut p = AnsatzProblem::new(&m.chart);
        p.add_fixed(&m.coord("p1")).unwrap();
        let e = Derivation::partial(&m.chart, m.chart.lookup("p1").unwrap());
        let s = solve(&p, &[impose_horizontal(&p, &[e]).unwrap()]).unwrap();
        assert!(s.is_empty());
        assert!(s.witness.is_some());
        assert!(impose_horizontal(&p, &[]).unwrap().is_empty());
    }

    #[test]
    fn rational_coefficients_split_over_common_denominator() {
        // c0/(1+x) + c1 x/(1+x) + 1 = 0  =>  c0 = -1, c1 = -1
        let f = Scalar::one() + Scalar::var(0);
        let cols = vec![
            (0, Scalar::one().try_div(&f).unwrap()),
            (1, Scalar::var(0).try_div(&f).unwrap()),
        ];
        let eqs = split_equations("t", &cols, &Scalar::one());
        let s = solve_linear(2, &eqs);
        assert_eq!(s.particular.unwrap(), vec![rat(-1, 1), rat(-1, 1)]);
    }
}
