//! Exact twisted Courant algebroid on `TM ⊕ T*M` realized on `T*[2]T[1]M`.

use std::sync::Arc;

use crate::equivariance::{contract_two_form, d_one_form, is_basic, is_equivariant, is_horizontal, lie_one_form};
use crate::equivariance::{BasicVerdict, OneForm, TwoTensor, Verdict};
use crate::graded::{derived_bracket, Chart, Derivation, GradedCoordinate, GradedError, Homogeneity, Superfunction};
use crate::scalar::{rat, Scalar};
use crate::tensor::ThreeForm;

/// `v ⊕ η`.
#[derive(Clone, Debug, PartialEq)]
pub struct Section {
    pub v: Vec<Scalar>,
    pub eta: OneForm,
}

impl Section {
    pub fn new(v: Vec<Scalar>, eta: OneForm) -> Self {
        Section { v, eta }
    }

    pub fn zero(n: usize) -> Self {
        Section {
            v: vec![Scalar::zero(); n],
            eta: vec![Scalar::zero(); n],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.v.iter().chain(&self.eta).all(Scalar::is_zero)
    }

    fn zip(&self, o: &Section, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> Section {
        Section {
            v: self.v.iter().zip(&o.v).map(|(a, b)| f(a, b)).collect(),
            eta: self.eta.iter().zip(&o.eta).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn add(&self, o: &Section) -> Section {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &Section) -> Section {
        self.zip(o, |a, b| a - b)
    }
}

/// `T*[2]T[1]M`: `x^i (0)`, `θ^i (1)`, `p_i (1)`, `ψ_i (2)`, with
/// `Q_CA = {𝒬, ·}`, `𝒬 = ψ_i θ^i + (1/6) H_{ijk} θ^i θ^j θ^k`.
#[derive(Clone, Debug)]
pub struct CourantPhase {
    pub n: usize,
    pub h: ThreeForm,
    pub chart: Arc<Chart>,
    pub hamiltonian: Superfunction,
    pub q: Derivation,
    basic: Vec<Derivation>,
}

fn names(prefix: &str, n: usize, degree: u32) -> impl Iterator<Item = GradedCoordinate> + '_ {
    (1..=n).map(move |i| GradedCoordinate::new(format!("{}{}", prefix, i), degree))
}

pub fn build_courant_phase(h: &ThreeForm) -> Result<CourantPhase, GradedError> {
    let n = h.dim();
    let chart = Chart::new(
        names("x", n, 0)
            .chain(names("th", n, 1))
            .chain(names("p", n, 1))
            .chain(names("psi", n, 2))
            .collect(),
    )?;
    let c = |s: String| Superfunction::named(&chart, &s);
    // {u, ·} for each coordinate u.
    let mut basic = Vec::with_capacity(4 * n);
    for i in 1..=n {
        // {x^i, ·} = −∂/∂ψ_i
        let mut d = Derivation::zero(&chart, -2);
        d.set(chart.lookup(&format!("psi{}", i))?, Superfunction::constant(&chart, -1))?;
        basic.push(d);
    }
    for i in 1..=n {
        // {θ^i, ·} = ∂/∂p_i
        basic.push(Derivation::partial(&chart, chart.lookup(&format!("p{}", i))?));
    }
    for i in 1..=n {
        // {p_i, ·} = ∂/∂θ^i
        basic.push(Derivation::partial(&chart, chart.lookup(&format!("th{}", i))?));
    }
    for i in 1..=n {
        // {ψ_i, ·} = ∂/∂x^i
        basic.push(Derivation::partial(&chart, chart.lookup(&format!("x{}", i))?));
    }
    let mut q = Superfunction::zero(&chart);
    for i in 1..=n {
        q = q + c(format!("psi{}", i))? * c(format!("th{}", i))?;
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let v = h.get(i, j, k);
                if !v.is_zero() {
                    let t = c(format!("th{}", i + 1))? * c(format!("th{}", j + 1))? * c(format!("th{}", k + 1))?;
                    q = q + t.scale(v);
                }
            }
        }
    }
    let mut phase = CourantPhase {
        n,
        h: h.clone(),
        chart: chart.clone(),
        hamiltonian: q.clone(),
        q: Derivation::zero(&chart, 1),
        basic,
    };
    phase.q = phase.hamiltonian_field(&q)?;
    Ok(phase)
}

impl CourantPhase {
    fn coord(&self, s: &str) -> Superfunction {
        Superfunction::named(&self.chart, s).expect("phase coordinate")
    }

    /// `{f, ·}` for a homogeneous `f`.
    pub fn hamiltonian_field(&self, f: &Superfunction) -> Result<Derivation, GradedError> {
        if !Chart::same(f.chart(), &self.chart) {
            return Err(GradedError::ChartMismatch);
        }
        let deg = match f.degree_of() {
            Homogeneity::Zero => return Ok(Derivation::zero(&self.chart, 0)),
            Homogeneity::Degree(d) => d as i64,
            Homogeneity::Inhomogeneous => return Err(GradedError::Inhomogeneous(f.to_string())),
        };
        let mut comps = Vec::new();
        for (u, xu) in self.basic.iter().enumerate() {
            // {f, u} = −(−1)^{|f||u|} {u, f}
            let du = self.chart.degree(u) as i64;
            let mut g = xu.apply(f)?;
            if (deg * du) % 2 == 0 {
                g = -g;
            }
            comps.push((u, g));
        }
        Derivation::new(&self.chart, deg as i32 - 2, comps)
    }

    /// Canonical degree −2 bracket, bilinear over homogeneous parts of `f`.
    pub fn poisson(&self, f: &Superfunction, g: &Superfunction) -> Result<Superfunction, GradedError> {
        let mut out = Superfunction::zero(&self.chart);
        let top = f.terms().map(|(m, _)| m.degree(&self.chart)).max().unwrap_or(0);
        for d in 0..=top {
            let part = f.homogeneous_part(d);
            if !part.is_zero() {
                out = out.try_add(&self.hamiltonian_field(&part)?.apply(g)?)?;
            }
        }
        Ok(out)
    }

    /// `ϵ = η_i θ^i + v^i p_i`.
    pub fn section_to_function(&self, s: &Section) -> Superfunction {
        let mut f = Superfunction::zero(&self.chart);
        for i in 0..self.n {
            f = f + self.coord(&format!("th{}", i + 1)).scale(&s.eta[i]);
            f = f + self.coord(&format!("p{}", i + 1)).scale(&s.v[i]);
        }
        f
    }

    pub fn function_to_section(&self, f: &Superfunction) -> Result<Section, GradedError> {
        let read = |name: String| -> Result<Scalar, GradedError> {
            let m = self.coord(&name).terms().next().expect("coordinate").0.clone();
            Ok(f.coefficient(&m))
        };
        let s = Section {
            v: (1..=self.n).map(|i| read(format!("p{}", i))).collect::<Result<_, _>>()?,
            eta: (1..=self.n).map(|i| read(format!("th{}", i))).collect::<Result<_, _>>()?,
        };
        if self.section_to_function(&s) != *f {
            return Err(GradedError::DegreeMismatch(format!("not of the form η_i θ^i + v^i p_i: {}", f)));
        }
        Ok(s)
    }

    /// Read `v ⊕ η` off a degree −1 derivation: `v^i = D θ^i`, `η_i = D p_i`.
    pub fn derivation_to_section(&self, d: &Derivation) -> Result<Section, GradedError> {
        let read = |name: String| -> Result<Scalar, GradedError> {
            d.component(self.chart.lookup(&name)?)
                .as_scalar()
                .ok_or_else(|| GradedError::DegreeMismatch(format!("component along {} is not a function", name)))
        };
        Ok(Section {
            v: (1..=self.n).map(|i| read(format!("th{}", i))).collect::<Result<_, _>>()?,
            eta: (1..=self.n).map(|i| read(format!("p{}", i))).collect::<Result<_, _>>()?,
        })
    }

    fn to_section_checked(&self, b: &Derivation) -> Result<Section, GradedError> {
        let s = self.derivation_to_section(b)?;
        // The result must again be hamiltonian.
        if self.hamiltonian_field(&self.section_to_function(&s))? != *b {
            return Err(GradedError::DegreeMismatch("derived bracket is not hamiltonian".into()));
        }
        Ok(s)
    }

    pub fn section_field(&self, s: &Section) -> Result<Derivation, GradedError> {
        self.hamiltonian_field(&self.section_to_function(s))
    }

    /// `[ε1, [Q, ε2]]` read back as a section.
    pub fn derived_section_bracket(&self, s1: &Section, s2: &Section) -> Result<Section, GradedError> {
        let b = derived_bracket(&self.q, &self.section_field(s1)?, &self.section_field(s2)?)?;
        self.to_section_checked(&b)
    }

    /// `[[ε1, Q], ε2]` read back as a section.
    pub fn dorfman_via_derived(&self, s1: &Section, s2: &Section) -> Result<Section, GradedError> {
        let b = self.section_field(s1)?.commutator(&self.q)?.commutator(&self.section_field(s2)?)?;
        self.to_section_checked(&b)
    }

    /// `{ϵ1, ϵ2}`.
    pub fn pairing_via_bracket(&self, s1: &Section, s2: &Section) -> Result<Scalar, GradedError> {
        let b = self.poisson(&self.section_to_function(s1), &self.section_to_function(s2))?;
        Ok(b.as_scalar().unwrap_or_else(Scalar::zero))
    }

    /// `{𝒬, 𝒬}`.
    pub fn q_squared(&self) -> Result<Superfunction, GradedError> {
        self.poisson(&self.hamiltonian, &self.hamiltonian)
    }
}

/// `[v, w]^i = v^k ∂_k w^i − w^k ∂_k v^i`.
pub fn lie_bracket(v: &[Scalar], w: &[Scalar]) -> Vec<Scalar> {
    let n = v.len();
    (0..n)
        .map(|i| {
            (0..n).fold(Scalar::zero(), |acc, k| acc + &v[k] * &w[i].partial(k) - &w[k] * &v[i].partial(k))
        })
        .collect()
}

/// `(ι_v H)_{jk} = v^i H_{ijk}`.
pub fn contract_three_form(h: &ThreeForm, v: &[Scalar]) -> TwoTensor {
    let n = v.len();
    (0..n)
        .map(|j| (0..n).map(|k| (0..n).fold(Scalar::zero(), |acc, i| acc + &v[i] * h.get(i, j, k))).collect())
        .collect()
}

/// `ι_v ι_w H`, i.e. `H(w, v, ·)`.
pub fn iota_iota(h: &ThreeForm, v: &[Scalar], w: &[Scalar]) -> OneForm {
    contract_two_form(v, &contract_three_form(h, w))
}

/// `[v,v′]_Lie ⊕ (L_v η′ − ι_{v′} dη + twist·ι_v ι_{v′} H)`; the derived
/// bracket corresponds to `twist = 1`.
pub fn dorfman_classical(h: &ThreeForm, s1: &Section, s2: &Section, twist: i64) -> Section {
    let l = lie_one_form(&s1.v, &s2.eta);
    let i = contract_two_form(&s2.v, &d_one_form(&s1.eta));
    let hv = iota_iota(h, &s1.v, &s2.v);
    let eta = (0..s1.v.len())
        .map(|k| &l[k] - &i[k] + hv[k].scale(&rat(twist, 1)))
        .collect();
    Section {
        v: lie_bracket(&s1.v, &s2.v),
        eta,
    }
}

/// `⟨v ⊕ η, v′ ⊕ η′⟩ = η(v′) + η′(v)`.
pub fn pairing(s1: &Section, s2: &Section) -> Scalar {
    (0..s1.v.len()).fold(Scalar::zero(), |acc, i| acc + &s1.eta[i] * &s2.v[i] + &s2.eta[i] * &s1.v[i])
}

fn apply_vector(v: &[Scalar], f: &Scalar) -> Scalar {
    v.iter().enumerate().fold(Scalar::zero(), |acc, (i, c)| acc + c * &f.partial(i))
}

/// Which Courant axiom failed, if any.
#[derive(Clone, Debug, PartialEq)]
pub enum AxiomFailure {
    Pairing,
    Leibniz,
    Symmetric,
}

/// The three axioms for a bracket on given sections.
pub fn axioms_check(
    bracket: &dyn Fn(&Section, &Section) -> Section,
    phi: &Section,
    psi1: &Section,
    psi2: &Section,
) -> Option<AxiomFailure> {
    // ρ(φ)⟨ψ,ψ⟩ = 2⟨[φ,ψ],ψ⟩
    let lhs = apply_vector(&phi.v, &pairing(psi1, psi1));
    let rhs = pairing(&bracket(phi, psi1), psi1).scale(&rat(2, 1));
    if !(lhs - rhs).is_zero() {
        return Some(AxiomFailure::Pairing);
    }
    let l = bracket(phi, &bracket(psi1, psi2));
    let r = bracket(&bracket(phi, psi1), psi2).add(&bracket(psi1, &bracket(phi, psi2)));
    if !l.sub(&r).is_zero() {
        return Some(AxiomFailure::Leibniz);
    }
    // 2[φ,φ] = 0 ⊕ d⟨φ,φ⟩
    let b = bracket(phi, phi);
    let d = pairing(phi, phi);
    let n = phi.v.len();
    let want = Section {
        v: vec![Scalar::zero(); n],
        eta: (0..n).map(|i| d.partial(i)).collect(),
    };
    let two = Section {
        v: b.v.iter().map(|x| x.scale(&rat(2, 1))).collect(),
        eta: b.eta.iter().map(|x| x.scale(&rat(2, 1))).collect(),
    };
    if !two.sub(&want).is_zero() {
        return Some(AxiomFailure::Symmetric);
    }
    None
}

/// Polarized first axiom `⟨[φ,ψ],χ⟩ + ⟨ψ,[φ,χ]⟩ = ρ(φ)⟨ψ,χ⟩`.
pub fn polarized_pairing_defect(
    bracket: &dyn Fn(&Section, &Section) -> Section,
    phi: &Section,
    psi: &Section,
    chi: &Section,
) -> Scalar {
    pairing(&bracket(phi, psi), chi) + pairing(psi, &bracket(phi, chi)) - apply_vector(&phi.v, &pairing(psi, chi))
}

/// Horizontal/equivariant/basic predicates with `Q = Q_CA`; generators may be
/// hamiltonian or arbitrary degree −1 fields.
pub fn courant_equivariant(phase: &CourantPhase, w: &Superfunction, gens: &[Derivation]) -> Result<BasicVerdict, GradedError> {
    is_basic(w, &phase.q, gens)
}

pub fn courant_horizontal(phase: &CourantPhase, w: &Superfunction, gens: &[Derivation]) -> Result<Verdict, GradedError> {
    if !Chart::same(w.chart(), &phase.chart) {
        return Err(GradedError::ChartMismatch);
    }
    is_horizontal(w, gens)
}

pub fn courant_equivariance(phase: &CourantPhase, w: &Superfunction, gens: &[Derivation]) -> Result<Verdict, GradedError> {
    is_equivariant(w, &phase.q, gens)
}
