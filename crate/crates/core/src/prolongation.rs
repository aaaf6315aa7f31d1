//! Tangent prolongation `T[1]M` with `Q̃ = d + L_Q`, Cartan calculus, the
//! lifting of degree-preserving maps to Q-morphisms and gauge variations.

use std::collections::HashMap;
use std::sync::Arc;

use crate::catalog::QManifold;
use crate::graded::{Chart, Derivation, GradedCoordinate, GradedError, Morphism, Superfunction};

/// Morphism sending each coordinate of `from` to the equally named
/// coordinate of `into`.
pub fn inclusion(from: &Arc<Chart>, into: &Arc<Chart>) -> Result<Morphism, GradedError> {
    Morphism::by_names(from, into, &HashMap::new())
}

/// Transport a derivation along a name-preserving chart inclusion; the
/// result has no components along coordinates outside `from`.
pub fn extend_derivation(d: &Derivation, into: &Arc<Chart>) -> Result<Derivation, GradedError> {
    let inc = inclusion(d.chart(), into)?;
    let mut r = Derivation::zero(into, d.degree());
    for (a, f) in d.components() {
        let b = into.lookup(&d.chart().coordinate(a).name)?;
        r.set(b, inc.pull(f)?)?;
    }
    Ok(r)
}

/// Chart with the coordinates of `a` followed by those of `b`.
pub fn product_chart(a: &Chart, b: &Chart) -> Result<Arc<Chart>, GradedError> {
    Chart::new(a.coordinates().iter().chain(b.coordinates()).cloned().collect())
}

/// `T[1]M` over a Q-manifold: coordinates `q^a` then `dq^a`.
#[derive(Clone, Debug)]
pub struct ProlongedChart {
    pub base: QManifold,
    pub chart: Arc<Chart>,
    /// Functions on the base seen on the prolonged chart.
    pub embed: Morphism,
    pub d: Derivation,
    pub qt: Derivation,
    /// Chart `(q^a, Q̃q^a)` in which `Q̃` is the trivial differential.
    pub q_chart: Arc<Chart>,
    to_q: Morphism,
    from_q: Morphism,
}

pub fn d_name(name: &str) -> String {
    format!("d{}", name)
}

pub fn q_name(name: &str) -> String {
    format!("Q{}", name)
}

impl ProlongedChart {
    pub fn dim(&self) -> usize {
        self.base.chart.len()
    }

    /// Index of `dq^a` on the prolonged chart.
    pub fn d_index(&self, a: usize) -> usize {
        self.dim() + a
    }

    pub fn lift_function(&self, f: &Superfunction) -> Result<Superfunction, GradedError> {
        self.embed.pull(f)
    }

    /// `dq^a` for a base coordinate name.
    pub fn dq(&self, name: &str) -> Superfunction {
        Superfunction::named(&self.chart, &d_name(name)).expect("prolonged coordinate")
    }

    pub fn q(&self, name: &str) -> Superfunction {
        Superfunction::named(&self.chart, name).expect("prolonged coordinate")
    }

    /// Rewrite in the generators `(q^a, Q̃q^a)` via `dq^a = Q̃q^a − Q^a`.
    pub fn to_q_basis(&self, f: &Superfunction) -> Result<Superfunction, GradedError> {
        self.to_q.pull(f)
    }

    pub fn from_q_basis(&self, f: &Superfunction) -> Result<Superfunction, GradedError> {
        self.from_q.pull(f)
    }

    /// `Q̃` written on [`Self::q_chart`]: `q^a ↦ Q̃q^a ↦ 0`.
    pub fn qt_in_q_basis(&self) -> Derivation {
        let n = self.dim();
        Derivation::new(
            &self.q_chart,
            1,
            (0..n).map(|a| (a, Superfunction::coordinate(&self.q_chart, n + a))),
        )
        .expect("degrees match by construction")
    }

    /// Conjugate a derivation of [`Self::chart`] into [`Self::q_chart`].
    pub fn derivation_to_q_basis(&self, e: &Derivation) -> Result<Derivation, GradedError> {
        if !Chart::same(e.chart(), &self.chart) {
            return Err(GradedError::ChartMismatch);
        }
        let comps = (0..self.q_chart.len())
            .map(|a| {
                let u = Superfunction::coordinate(&self.q_chart, a);
                Ok((a, self.to_q.pull(&e.apply(&self.from_q.pull(&u)?)?)?))
            })
            .collect::<Result<Vec<_>, GradedError>>()?;
        Derivation::new(&self.q_chart, e.degree(), comps)
    }

    /// `Q̃q^a` on [`Self::q_chart`] for a base coordinate name.
    pub fn qq(&self, name: &str) -> Superfunction {
        Superfunction::named(&self.q_chart, &q_name(name)).expect("q-basis coordinate")
    }

    /// Contraction `ι_E`: `ι_E(q^a) = 0`, `ι_E(dq^a) = E^a`.
    pub fn contraction(&self, e: &Derivation) -> Result<Derivation, GradedError> {
        if !Chart::same(e.chart(), &self.base.chart) {
            return Err(GradedError::ChartMismatch);
        }
        let mut r = Derivation::zero(&self.chart, e.degree() - 1);
        for (a, f) in e.components() {
            r.set(self.d_index(a), self.embed.pull(f)?)?;
        }
        Ok(r)
    }

    /// `L_E = [ι_E, d]`, which restricts to `E` on base functions.
    pub fn lie_lift(&self, e: &Derivation) -> Result<Derivation, GradedError> {
        self.contraction(e)?.commutator(&self.d)
    }

    /// Lift a degree-preserving assignment `φ` (images of the base
    /// coordinates on the source) to the Q-morphism `f*` with
    /// `f*(dq^a) = Q₁ f*(q^a) − f*(Q^a)`.
    pub fn lift_pullback(&self, source: &QManifold, phi: Vec<Superfunction>) -> Result<Morphism, GradedError> {
        let base_map = Morphism::new(&self.base.chart, &source.chart, phi)?;
        let mut images: Vec<Superfunction> = (0..self.dim()).map(|a| base_map.image(a).clone()).collect();
        for a in 0..self.dim() {
            let qa = source.q.apply(base_map.image(a))?;
            let fq = base_map.pull(&self.base.q.component(a))?;
            images.push(qa.try_sub(&fq)?);
        }
        Morphism::new(&self.chart, &source.chart, images)
    }

    /// First coordinate `u` (if any) where `Q₁ f*(u) ≠ f*(Q̃u)`.
    pub fn q_morphism_defect(&self, source: &QManifold, f: &Morphism) -> Result<Option<(String, Superfunction)>, GradedError> {
        for a in 0..self.chart.len() {
            let u = Superfunction::coordinate(&self.chart, a);
            let lhs = source.q.apply(&f.pull(&u)?)?;
            let rhs = f.pull(&self.qt.apply(&u)?)?;
            let diff = lhs.try_sub(&rhs)?;
            if !diff.is_zero() {
                return Ok(Some((self.chart.coordinate(a).name.clone(), diff)));
            }
        }
        Ok(None)
    }

    /// `f*([Q̂, ε̂] u)` on `M₁ × T[1]M` with `Q̂ = Q₁ + Q̃`. `ehat` lives on
    /// `product` and must have no components along source coordinates.
    pub fn gauge_variation(
        &self,
        source: &QManifold,
        f: &Morphism,
        product: &Arc<Chart>,
        ehat: &Derivation,
        u: &Superfunction,
    ) -> Result<Superfunction, GradedError> {
        if !Chart::same(ehat.chart(), product) {
            return Err(GradedError::ChartMismatch);
        }
        for (a, _) in ehat.components() {
            let name = &product.coordinate(a).name;
            if source.chart.index_of(name).is_some() {
                return Err(GradedError::DegreeMismatch(format!(
                    "gauge parameter is not vertical: component along '{}'",
                    name
                )));
            }
        }
        let qhat = extend_derivation(&source.q, product)?.try_add(&extend_derivation(&self.qt, product)?)?;
        let uhat = inclusion(&self.chart, product)?.pull(u)?;
        let v = qhat.commutator(ehat)?.apply(&uhat)?;
        let mut images = HashMap::new();
        for a in 0..self.chart.len() {
            images.insert(self.chart.coordinate(a).name.clone(), f.image(a).clone());
        }
        let fhat = Morphism::by_names(product, &source.chart, &images)?;
        fhat.pull(&v)
    }
}

/// Build `T[1]M` with `d` and `Q̃ = d + L_Q`.
pub fn prolong(m: &QManifold) -> Result<ProlongedChart, GradedError> {
    if !m.is_valid() {
        return Err(GradedError::DegreeMismatch("base vector field is not homological".into()));
    }
    let base = &m.chart;
    let n = base.len();
    let mut coords: Vec<GradedCoordinate> = base.coordinates().to_vec();
    let mut qcoords = coords.clone();
    for c in base.coordinates() {
        coords.push(GradedCoordinate::new(d_name(&c.name), c.degree + 1).with_bidegree(c.degree, 1));
        qcoords.push(GradedCoordinate::new(q_name(&c.name), c.degree + 1).with_bidegree(c.degree, 1));
    }
    let chart = Chart::new(coords)?;
    let q_chart = Chart::new(qcoords)?;
    let embed = inclusion(base, &chart)?;
    let d = Derivation::new(&chart, 1, (0..n).map(|a| (a, Superfunction::coordinate(&chart, n + a))))?;
    let mut p = ProlongedChart {
        base: m.clone(),
        chart: chart.clone(),
        embed,
        d: d.clone(),
        qt: d.clone(),
        q_chart: q_chart.clone(),
        to_q: inclusion(&chart, &chart)?,
        from_q: inclusion(&chart, &chart)?,
    };
    p.qt = d.try_add(&p.lie_lift(&m.q)?)?;

    let into_q = inclusion(base, &q_chart)?;
    let mut to_q = Vec::with_capacity(2 * n);
    let mut from_q = Vec::with_capacity(2 * n);
    for a in 0..n {
        to_q.push(Superfunction::coordinate(&q_chart, a));
        from_q.push(Superfunction::coordinate(&chart, a));
    }
    for a in 0..n {
        let qa = m.q.component(a);
        to_q.push(Superfunction::coordinate(&q_chart, n + a).try_sub(&into_q.pull(&qa)?)?);
        from_q.push(Superfunction::coordinate(&chart, n + a).try_add(&p.embed.pull(&qa)?)?);
    }
    p.to_q = Morphism::new(&chart, &q_chart, to_q)?;
    p.from_q = Morphism::new(&q_chart, &chart, from_q)?;
    Ok(p)
}

/// Formal jet chart of `T[1]Σ` for fields `X^i(σ)` and one-forms
/// `A_i = A_{iμ} s^μ`, truncated after second derivatives of `X` and first
/// derivatives of `A`. `Q₁ = s^μ D_μ` with the truncated total derivative.
#[derive(Clone, Debug)]
pub struct Worldsheet {
    pub dim: usize,
    pub targets: usize,
    pub m: QManifold,
}

impl Worldsheet {
    pub fn new(dim: usize, targets: usize) -> Result<Self, GradedError> {
        let mut coords = Vec::new();
        for i in 1..=targets {
            coords.push(GradedCoordinate::new(format!("X{}", i), 0));
        }
        for i in 1..=targets {
            for mu in 1..=dim {
                coords.push(GradedCoordinate::new(format!("X{}_{}", i, mu), 0));
            }
        }
        for i in 1..=targets {
            for mu in 1..=dim {
                for nu in mu..=dim {
                    coords.push(GradedCoordinate::new(format!("X{}_{}{}", i, mu, nu), 0));
                }
            }
        }
        for i in 1..=targets {
            for mu in 1..=dim {
                coords.push(GradedCoordinate::new(format!("A{}_{}", i, mu), 0));
            }
        }
        for i in 1..=targets {
            for mu in 1..=dim {
                for nu in 1..=dim {
                    coords.push(GradedCoordinate::new(format!("A{}_{}_{}", i, mu, nu), 0));
                }
            }
        }
        for mu in 1..=dim {
            coords.push(GradedCoordinate::new(format!("s{}", mu), 1).with_bidegree(0, 1));
        }
        let chart = Chart::new(coords)?;
        let c = |n: String| Superfunction::named(&chart, &n);
        let s: Vec<_> = (1..=dim).map(|mu| c(format!("s{}", mu))).collect::<Result<_, _>>()?;
        let mut comps = Vec::new();
        let mut push = |name: String, derivs: Vec<String>| -> Result<(), GradedError> {
            let mut f = Superfunction::zero(&chart);
            for (mu, dn) in derivs.into_iter().enumerate() {
                f = f + &s[mu] * c(dn)?;
            }
            comps.push((chart.lookup(&name)?, f));
            Ok(())
        };
        for i in 1..=targets {
            push(format!("X{}", i), (1..=dim).map(|mu| format!("X{}_{}", i, mu)).collect())?;
            for nu in 1..=dim {
                push(
                    format!("X{}_{}", i, nu),
                    (1..=dim)
                        .map(|mu| format!("X{}_{}{}", i, mu.min(nu), mu.max(nu)))
                        .collect(),
                )?;
                push(
                    format!("A{}_{}", i, nu),
                    (1..=dim).map(|mu| format!("A{}_{}_{}", i, nu, mu)).collect(),
                )?;
            }
        }
        let q = Derivation::new(&chart, 1, comps)?;
        Ok(Worldsheet {
            dim,
            targets,
            m: QManifold::new(q)?,
        })
    }

    pub fn coord(&self, name: &str) -> Superfunction {
        self.m.coord(name)
    }

    /// `A_i = A_{iμ} s^μ` (1-based `i`).
    pub fn a(&self, i: usize) -> Superfunction {
        let mut f = Superfunction::zero(&self.m.chart);
        for mu in 1..=self.dim {
            f = f + self.coord(&format!("A{}_{}", i, mu)) * self.coord(&format!("s{}", mu));
        }
        f
    }

    /// `dX^i = Q₁ X^i`.
    pub fn dx(&self, i: usize) -> Superfunction {
        self.m.q.apply(&self.coord(&format!("X{}", i))).expect("same chart")
    }

    /// `φ: x^i ↦ X^i`, `p_i ↦ A_i` onto a cotangent-type base chart whose
    /// first `targets` coordinates are `x` and the next `targets` are `p`.
    pub fn field_map(&self) -> Vec<Superfunction> {
        (1..=self.targets)
            .map(|i| self.coord(&format!("X{}", i)))
            .chain((1..=self.targets).map(|i| self.a(i)))
            .collect()
    }
}
