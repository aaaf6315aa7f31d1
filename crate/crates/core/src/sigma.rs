//! Sigma-model workflows: minimal coupling, Wess-Zumino gauging on an action
//! Lie algebroid, and the twisted Poisson sigma model extension.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;

use crate::catalog::{build_action_algebroid, build_twisted_cotangent, LieData, PoissonData, QManifold};
use crate::equivariance::{dh_operator, gt_lift, GtElement, OneForm};
use crate::graded::{Chart, GradedCoordinate, GradedError, Superfunction};
use crate::prolongation::{extend_derivation, product_chart, prolong, ProlongedChart, Worldsheet};
use crate::scalar::{rat, Exponents, Poly, Scalar};
use crate::solver::{self, impose_closed, impose_horizontal, AnsatzProblem, SolutionSpace};
use crate::tensor::{self, Matrix, ThreeForm};

/// Monomials of total degree at most `degree` in `nvars` variables, each
/// divided by `den` when given.
pub fn coefficient_basis(nvars: usize, degree: u32, den: Option<&Scalar>) -> Vec<Scalar> {
    let mut exps: Vec<Vec<u16>> = vec![vec![0; nvars]];
    let mut frontier = exps.clone();
    for _ in 0..degree {
        let mut next = Vec::new();
        for e in &frontier {
            let last = e.iter().rposition(|&k| k > 0).unwrap_or(0);
            for v in last..nvars {
                let mut f = e.clone();
                f[v] += 1;
                next.push(f);
            }
        }
        exps.extend(next.iter().cloned());
        frontier = next;
    }
    exps.into_iter()
        .map(|e| {
            let m = Scalar::from_poly(Poly::monomial(Exponents::from_vec(e), rat(1, 1)));
            match den {
                Some(d) => m.try_div(d).expect("nonzero denominator"),
                None => m,
            }
        })
        .collect()
}

/// An [`AnsatzProblem`] whose unknowns are indexed by a named block, tensor
/// indices and a coefficient function.
#[derive(Clone, Debug)]
pub struct BlockAnsatz {
    pub problem: AnsatzProblem,
    pub coefficients: Vec<Scalar>,
    entries: BTreeMap<(String, Vec<usize>), Vec<usize>>,
}

impl BlockAnsatz {
    pub fn new(chart: &Arc<Chart>, coefficients: Vec<Scalar>) -> Self {
        BlockAnsatz {
            problem: AnsatzProblem::new(chart),
            coefficients,
            entries: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, block: &str, idx: Vec<usize>, m: &Superfunction) -> Result<(), GradedError> {
        if m.is_zero() {
            return Ok(());
        }
        let mut ks = Vec::new();
        for (c, s) in self.coefficients.iter().enumerate() {
            let name = format!("{}{:?}#{}", block, idx, c);
            ks.push(self.problem.add_generator(name, m.scale(s))?);
        }
        self.entries.insert((block.to_string(), idx), ks);
        Ok(())
    }

    /// Coefficient function of a block entry in the solution vector `c`.
    pub fn read(&self, c: &[BigRational], block: &str, idx: &[usize]) -> Scalar {
        match self.entries.get(&(block.to_string(), idx.to_vec())) {
            None => Scalar::zero(),
            Some(ks) => ks.iter().zip(&self.coefficients).fold(Scalar::zero(), |acc, (k, s)| {
                if c[*k].is_zero() {
                    acc
                } else {
                    acc + s.scale(&c[*k])
                }
            }),
        }
    }
}

/// Report of an extension computation.
#[derive(Clone, Debug)]
pub struct IntegrandReport {
    /// Chosen solution on the `(q, Q̃q)` chart.
    pub q_basis: Option<Superfunction>,
    /// The same on the `(q, dq)` chart.
    pub extension: Option<Superfunction>,
    pub space: SolutionSpace,
    pub hypothesis: bool,
    pub obstructions: Vec<String>,
    pub degree_bound: u32,
}

// ---------------------------------------------------------------------------
// Minimal coupling

/// Formal chart `X^i (0)`, `dX^i (1)`, `A^a (1)` for a 2d worldsheet.
pub fn coupling_chart(n: usize, r: usize) -> Result<Arc<Chart>, GradedError> {
    let mut coords = Vec::new();
    for i in 1..=n {
        coords.push(GradedCoordinate::new(format!("X{}", i), 0));
    }
    for i in 1..=n {
        coords.push(GradedCoordinate::new(format!("dX{}", i), 1));
    }
    for a in 1..=r {
        coords.push(GradedCoordinate::new(format!("A{}", a), 1));
    }
    Chart::new(coords)
}

/// `(ι_v B)_j = v^i B_{ij}`.
fn contract2(v: &[Scalar], b: &Matrix) -> Vec<Scalar> {
    let n = v.len();
    (0..n)
        .map(|j| (0..n).fold(Scalar::zero(), |acc, i| acc + &v[i] * &b[i][j]))
        .collect()
}

/// `X*B − A^a X*ι_{v_a}B + ½ A^a A^b X*ι_{v_a}ι_{v_b}B` with
/// `X*B = ½ B_{ij} dX^i dX^j`.
pub fn minimal_coupling(b: &Matrix, vs: &[Vec<Scalar>]) -> Result<Superfunction, GradedError> {
    let n = b.len();
    let chart = coupling_chart(n, vs.len())?;
    let c = |s: String| Superfunction::named(&chart, &s).expect("coupling coordinate");
    let dx: Vec<_> = (1..=n).map(|i| c(format!("dX{}", i))).collect();
    let a: Vec<_> = (1..=vs.len()).map(|k| c(format!("A{}", k))).collect();
    let mut f = Superfunction::zero(&chart);
    for i in 0..n {
        for j in 0..n {
            f = f + (&dx[i] * &dx[j]).scale(&b[i][j].scale(&rat(1, 2)));
        }
    }
    let ib: Vec<Vec<Scalar>> = vs.iter().map(|v| contract2(v, b)).collect();
    for (k, w) in ib.iter().enumerate() {
        for j in 0..n {
            f = f - (&a[k] * &dx[j]).scale(&w[j]);
        }
    }
    for (k, v) in vs.iter().enumerate() {
        for (l, w) in ib.iter().enumerate() {
            let s = (0..n).fold(Scalar::zero(), |acc, j| acc + &v[j] * &w[j]);
            f = f + (&a[k] * &a[l]).scale(&s.scale(&rat(1, 2)));
        }
    }
    Ok(f)
}

// ---------------------------------------------------------------------------
// Wess-Zumino gauging on T[1]E[1]

/// Closed invariant 3-form with a Lie algebra action.
#[derive(Clone, Debug)]
pub struct WzData {
    pub h: ThreeForm,
    pub lie: LieData,
}

/// `(L_v H)_{ijk}`.
pub fn lie_three_form(v: &[Scalar], h: &ThreeForm) -> ThreeForm {
    let n = v.len();
    let mut out = ThreeForm::zero(n);
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let mut s = Scalar::zero();
                for l in 0..n {
                    let dv = |m: usize| v[l].partial(m);
                    s = s + &v[l] * &h.get(i, j, k).partial(l)
                        + h.get(l, j, k) * &dv(i)
                        + h.get(i, l, k) * &dv(j)
                        + h.get(i, j, l) * &dv(k);
                }
                out.set(i, j, k, s);
            }
        }
    }
    out
}

impl WzData {
    pub fn n(&self) -> usize {
        self.h.dim()
    }

    pub fn rho(&self) -> Vec<Vec<Scalar>> {
        match &self.lie.action {
            Some((_, r)) => r.clone(),
            None => vec![vec![Scalar::zero(); self.n()]; self.lie.dim],
        }
    }

    /// First failed validity condition, if any.
    pub fn invalidity(&self) -> Option<String> {
        if !self.h.is_closed() {
            return Some("H is not closed".into());
        }
        if self.lie.jacobi_witness().is_some() {
            return Some("structure constants violate Jacobi".into());
        }
        if let Some((_, r)) = &self.lie.action {
            if r.iter().any(|v| v.len() != self.n()) {
                return Some("action dimension mismatch".into());
            }
            if self.lie.action_witness().is_some() {
                return Some("ρ is not an action".into());
            }
        }
        for (a, v) in self.rho().iter().enumerate() {
            if !lie_three_form(v, &self.h).is_zero() {
                return Some(format!("H is not invariant under ρ_{}", a + 1));
            }
        }
        None
    }
}

/// Readback of the gauging data from a Stanciu solution.
#[derive(Clone, Debug)]
pub struct GaugingData {
    /// `E_{ia}`.
    pub e: Matrix,
    /// `F_{ab}`, coefficient of `ξ^a Q̃ξ^b`.
    pub f: Matrix,
}

#[derive(Clone, Debug)]
pub struct StanciuReport {
    pub report: IntegrandReport,
    pub data: Option<GaugingData>,
    pub pc: ProlongedChart,
    pub ansatz: BlockAnsatz,
}

/// Q̃-basis ansatz of degree 3 on `T[1]E[1]` or `T[1]T*[1]M`: the six
/// blocks `A` (Q̃xQ̃xQ̃x), `B` (Q̃xQ̃xη), `K` (Q̃xηη), `D` (ηηη),
/// `E` (Q̃x Q̃η), `F` (η Q̃η or Q̃η η) where `η` are the degree-1 fibre
/// coordinates.
fn degree_three_ansatz(
    pc: &ProlongedChart,
    n: usize,
    fibre: &[String],
    coefficients: Vec<Scalar>,
    with_a: bool,
    f_eta_first: bool,
) -> Result<BlockAnsatz, GradedError> {
    let qc = &pc.q_chart;
    let r = fibre.len();
    let x: Vec<String> = (1..=n).map(|i| format!("x{}", i)).collect();
    let qx: Vec<_> = x.iter().map(|s| pc.qq(s)).collect();
    let eta: Vec<_> = fibre.iter().map(|s| Superfunction::named(qc, s)).collect::<Result<_, _>>()?;
    let qeta: Vec<_> = fibre.iter().map(|s| pc.qq(s)).collect();
    let mut b = BlockAnsatz::new(qc, coefficients);
    if with_a {
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    b.add("A", vec![i, j, k], &(&qx[i] * &qx[j] * &qx[k]))?;
                }
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for a in 0..r {
                b.add("B", vec![i, j, a], &(&qx[i] * &qx[j] * &eta[a]))?;
            }
        }
    }
    for i in 0..n {
        for a in 0..r {
            for c in a + 1..r {
                b.add("K", vec![i, a, c], &(&qx[i] * &eta[a] * &eta[c]))?;
            }
        }
    }
    for a in 0..r {
        for c in a + 1..r {
            for e in c + 1..r {
                b.add("D", vec![a, c, e], &(&eta[a] * &eta[c] * &eta[e]))?;
            }
        }
    }
    for i in 0..n {
        for a in 0..r {
            b.add("E", vec![i, a], &(&qx[i] * &qeta[a]))?;
        }
    }
    for a in 0..r {
        for c in 0..r {
            let m = if f_eta_first { &eta[a] * &qeta[c] } else { &qeta[a] * &eta[c] };
            b.add("F", vec![a, c], &m)?;
        }
    }
    Ok(b)
}

/// `Σ_{i<j<k} H_{ijk} Q̃x^i Q̃x^j Q̃x^k`, i.e. `(1/6) H_{ijk} Q̃x^i Q̃x^j Q̃x^k`.
pub fn q_basis_three_form(pc: &ProlongedChart, h: &ThreeForm) -> Superfunction {
    let n = h.dim();
    let qx: Vec<_> = (1..=n).map(|i| pc.qq(&format!("x{}", i))).collect();
    let mut f = Superfunction::zero(&pc.q_chart);
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let c = h.get(i, j, k);
                if !c.is_zero() {
                    f = f + (&qx[i] * &qx[j] * &qx[k]).scale(c);
                }
            }
        }
    }
    f
}

/// Closedness-only ansatz on `T[1]E[1]` (all six blocks free).
pub fn stanciu_closed_family(w: &WzData, degree: u32) -> Result<(BlockAnsatz, SolutionSpace), GradedError> {
    let (pc, fibre) = action_prolongation(w)?;
    let b = degree_three_ansatz(&pc, w.n(), &fibre, coefficient_basis(w.n(), degree, None), true, true)?;
    let c = impose_closed(&b.problem, &pc.qt_in_q_basis())?;
    let s = solver::solve(&b.problem, &[c])?;
    Ok((b, s))
}

fn action_prolongation(w: &WzData) -> Result<(ProlongedChart, Vec<String>), GradedError> {
    let lie = match &w.lie.action {
        Some(_) => w.lie.clone(),
        None => w.lie.clone().with_action(w.n(), w.rho()),
    };
    let m = build_action_algebroid(&lie)?;
    let fibre = (1..=w.lie.dim).map(|a| format!("xi{}", a)).collect();
    Ok((prolong(&m)?, fibre))
}

/// Lie lifts of the constant generators `∂/∂ξ^a`, on the Q̃ chart.
pub fn stanciu_generators(pc: &ProlongedChart, r: usize) -> Result<Vec<crate::graded::Derivation>, GradedError> {
    (1..=r)
        .map(|a| {
            let base = &pc.base.chart;
            let e = crate::graded::Derivation::partial(base, base.lookup(&format!("xi{}", a))?);
            pc.derivation_to_q_basis(&pc.lie_lift(&e)?)
        })
        .collect()
}

/// Q̃-closed, horizontal extension of `H` on `T[1]E[1]`, anchored at
/// `(1/6) H Q̃xQ̃xQ̃x`, with coefficient functions polynomial of degree at
/// most `degree`.
pub fn stanciu_gauging(w: &WzData, degree: u32) -> Result<StanciuReport, GradedError> {
    if let Some(why) = w.invalidity() {
        return Err(GradedError::DegreeMismatch(format!("invalid Wess-Zumino data: {}", why)));
    }
    let (pc, fibre) = action_prolongation(w)?;
    let n = w.n();
    let r = w.lie.dim;
    let mut b = degree_three_ansatz(&pc, n, &fibre, coefficient_basis(n, degree, None), false, true)?;
    b.problem.add_fixed(&q_basis_three_form(&pc, &w.h))?;
    let closed = impose_closed(&b.problem, &pc.qt_in_q_basis())?;
    let hor = impose_horizontal(&b.problem, &stanciu_generators(&pc, r)?)?;
    let space = solver::solve(&b.problem, &[closed, hor])?;
    let mut data = None;
    let mut obstructions = Vec::new();
    let (mut q_basis, mut extension) = (None, None);
    if let Some(part) = &space.particular {
        let e: Matrix = (0..n).map(|i| (0..r).map(|a| b.read(part, "E", &[i, a])).collect()).collect();
        let f: Matrix = (0..r).map(|a| (0..r).map(|c| b.read(part, "F", &[a, c])).collect()).collect();
        let rho = w.rho();
        for a in 0..r {
            for c in a..r {
                let er = |a: usize, c: usize| (0..n).fold(Scalar::zero(), |acc, i| acc + &e[i][a] * &rho[c][i]);
                let sym = er(a, c) + er(c, a);
                if !sym.is_zero() {
                    obstructions.push(format!("(E_ia rho^i_b)_(ab) != 0 at ({}, {}): {}", a + 1, c + 1, sym));
                }
            }
        }
        let h = b.problem.assemble(part, true);
        extension = Some(pc.from_q_basis(&h)?);
        q_basis = Some(h);
        data = Some(GaugingData { e, f });
    } else if let Some(wit) = &space.witness {
        obstructions.push(format!("inconsistent: {}", wit));
    }
    Ok(StanciuReport {
        report: IntegrandReport {
            q_basis,
            extension,
            space,
            hypothesis: true,
            obstructions,
            degree_bound: degree,
        },
        data,
        pc,
        ansatz: b,
    })
}

/// `(1/6)H Q̃xQ̃xQ̃x + Q̃(½ E_{ja} ρ^j_b ξ^a ξ^b − E_{ia} Q̃x^i ξ^a)`.
pub fn stanciu_display(pc: &ProlongedChart, w: &WzData, e: &Matrix) -> Result<Superfunction, GradedError> {
    let qc = &pc.q_chart;
    let n = w.n();
    let r = w.lie.dim;
    let rho = w.rho();
    let xi: Vec<_> = (1..=r).map(|a| Superfunction::named(qc, &format!("xi{}", a))).collect::<Result<_, _>>()?;
    let mut inner = Superfunction::zero(qc);
    for a in 0..r {
        for c in 0..r {
            let s = (0..n).fold(Scalar::zero(), |acc, j| acc + &e[j][a] * &rho[c][j]);
            inner = inner + (&xi[a] * &xi[c]).scale(&s.scale(&rat(1, 2)));
        }
        for i in 0..n {
            inner = inner - (pc.qq(&format!("x{}", i + 1)) * &xi[a]).scale(&e[i][a]);
        }
    }
    Ok(q_basis_three_form(pc, &w.h) + pc.qt_in_q_basis().apply(&inner)?)
}

// ---------------------------------------------------------------------------
// Twisted Poisson sigma model

/// `ε` with `D_H ε = 0`: a basis of the kernel within `ε_i ∈ span(basis)`.
pub fn dh_kernel(p: &PoissonData, basis: &[Scalar]) -> Vec<OneForm> {
    let n = p.n;
    let nb = basis.len();
    let mut images = Vec::new();
    for i in 0..n {
        for s in basis {
            let mut e = vec![Scalar::zero(); n];
            e[i] = s.clone();
            images.push(dh_operator(p, &e));
        }
    }
    let mut eqs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let cols: Vec<(usize, Scalar)> = images
                .iter()
                .enumerate()
                .filter(|(_, m)| !m[a][b].is_zero())
                .map(|(k, m)| (k, m[a][b].clone()))
                .collect();
            eqs.extend(solver::split_equations(&format!("D_H[{},{}]", a + 1, b + 1), &cols, &Scalar::zero()));
        }
    }
    let sol = solver::solve_linear(n * nb, &eqs);
    sol.basis
        .iter()
        .map(|v| {
            (0..n)
                .map(|i| {
                    (0..nb).fold(Scalar::zero(), |acc, k| {
                        let c = &v[i * nb + k];
                        if c.is_zero() {
                            acc
                        } else {
                            acc + basis[k].scale(c)
                        }
                    })
                })
                .collect()
        })
        .filter(|e: &OneForm| tensor::is_zero_matrix(&dh_operator(p, e)))
        .collect()
}

/// Generating family of the extended gauge algebra: α-type elements with
/// symmetric polynomial `ᾱ` of degree at most `alpha_degree`, plus plain
/// lifts (`ᾱ = 0`) of the given `D_H`-closed 1-forms.
pub fn gt_family(n: usize, alpha_degree: u32, eps: &[OneForm]) -> Vec<GtElement> {
    let zero = vec![Scalar::zero(); n];
    let mut out = Vec::new();
    for s in coefficient_basis(n, alpha_degree, None) {
        for i in 0..n {
            for j in i..n {
                let mut bar = tensor::zeros(n);
                bar[i][j] = s.clone();
                bar[j][i] = s.clone();
                out.push(GtElement::from_bar(zero.clone(), &bar));
            }
        }
    }
    for e in eps {
        out.push(GtElement::from_bar(e.clone(), &tensor::zeros(n)));
    }
    out
}

/// Options for [`tpsm_extension`].
#[derive(Clone, Debug)]
pub struct TpsmOptions {
    /// Coefficient functions multiplying each block entry.
    pub coefficients: Vec<Scalar>,
    /// Fix `A = H/6`; otherwise `A` is unknown.
    pub anchored: bool,
    pub alpha_degree: u32,
    /// `D_H`-closed 1-forms added to the generating family.
    pub eps: Vec<OneForm>,
    pub degree_bound: u32,
}

impl TpsmOptions {
    /// Polynomials of degree `degree` over the common denominator of `π`'s
    /// derivatives.
    pub fn for_instance(p: &PoissonData, degree: u32) -> Self {
        let mut items = Vec::new();
        for row in &p.pi {
            for c in row {
                items.push(c.clone());
                for v in 0..p.n {
                    items.push(c.partial(v));
                }
            }
        }
        let den_factors = Scalar::common_denominator(items.iter());
        let den = den_factors
            .iter()
            .fold(Scalar::one(), |acc, (f, k)| acc * Scalar::from_poly(f.clone()).pow(*k));
        let den = if den.is_one() { None } else { Some(den) };
        let eps = dh_kernel(p, &coefficient_basis(p.n, degree.min(2), None));
        TpsmOptions {
            coefficients: coefficient_basis(p.n, degree, den.as_ref()),
            anchored: true,
            alpha_degree: 0,
            eps,
            degree_bound: degree,
        }
    }
}

/// Blocks in the `(x, p, Q̃x, Q̃p)` basis for `T[1]T*[1]M`, with `F` on
/// `Q̃p_i p_j`.
pub fn tpsm_ansatz(pc: &ProlongedChart, n: usize, coefficients: Vec<Scalar>, with_a: bool) -> Result<BlockAnsatz, GradedError> {
    let fibre: Vec<String> = (1..=n).map(|i| format!("p{}", i)).collect();
    degree_three_ansatz(pc, n, &fibre, coefficients, with_a, false)
}

/// `H` restricted to dense orbits is nonzero: for nondegenerate `π` this is
/// `H ≠ 0`.
pub fn tpsm_hypothesis(p: &PoissonData) -> bool {
    tensor::invert(&p.pi).is_ok() && !p.h.is_zero()
}

pub struct TpsmRun {
    pub pc: ProlongedChart,
    pub ansatz: BlockAnsatz,
    pub report: IntegrandReport,
}

pub fn tpsm_extension(p: &PoissonData, opts: &TpsmOptions) -> Result<TpsmRun, GradedError> {
    let m = build_twisted_cotangent(p)?;
    if !m.is_valid() {
        return Err(GradedError::DegreeMismatch("not a twisted Poisson structure".into()));
    }
    let pc = prolong(&m)?;
    let n = p.n;
    let mut b = tpsm_ansatz(&pc, n, opts.coefficients.clone(), !opts.anchored)?;
    if opts.anchored {
        b.problem.add_fixed(&q_basis_three_form(&pc, &p.h))?;
    }
    let gens = gt_family(n, opts.alpha_degree, &opts.eps)
        .iter()
        .map(|g| pc.derivation_to_q_basis(&gt_lift(&pc, g)?))
        .collect::<Result<Vec<_>, _>>()?;
    let closed = impose_closed(&b.problem, &pc.qt_in_q_basis())?;
    let hor = impose_horizontal(&b.problem, &gens)?;
    let space = solver::solve(&b.problem, &[closed, hor])?;

    let hypothesis = tpsm_hypothesis(p);
    let mut obstructions = Vec::new();
    if !hypothesis {
        obstructions.push("hypothesis unverified".to_string());
    }
    let chosen = match (&space.particular, space.basis.as_slice()) {
        (Some(part), _) if (opts.anchored && !p.h.is_zero()) || part.iter().any(|c| !c.is_zero()) => Some(b.problem.assemble(part, true)),
        (Some(_), [only]) => {
            // Normalize the one-parameter family by E^1_1 = 1.
            let e11 = b.read(only, "E", &[0, 0]);
            e11.as_constant().filter(|c| !c.is_zero()).map(|c| {
                let v: Vec<BigRational> = only.iter().map(|x| x / &c).collect();
                b.problem.assemble(&v, false)
            })
        }
        (Some(_), _) => None,
        (None, _) => {
            obstructions.push(format!("inconsistent: {}", space.witness.clone().unwrap_or_default()));
            None
        }
    };
    let extension = match &chosen {
        Some(h) => Some(pc.from_q_basis(h)?),
        None => None,
    };
    Ok(TpsmRun {
        pc,
        ansatz: b,
        report: IntegrandReport {
            q_basis: chosen,
            extension,
            space,
            hypothesis,
            obstructions,
            degree_bound: opts.degree_bound,
        },
    })
}

/// `(1/6)H Q̃xQ̃xQ̃x + ½π^{jk}_{,i} Q̃x^i p_j p_k + Q̃x^i Q̃p_i + π^{ij} Q̃p_i p_j`.
pub fn tpsm_q_display(pc: &ProlongedChart, p: &PoissonData) -> Superfunction {
    let qc = &pc.q_chart;
    let n = p.n;
    let pp: Vec<_> = (1..=n).map(|i| Superfunction::named(qc, &format!("p{}", i)).expect("p")).collect();
    let qx: Vec<_> = (1..=n).map(|i| pc.qq(&format!("x{}", i))).collect();
    let qp: Vec<_> = (1..=n).map(|i| pc.qq(&format!("p{}", i))).collect();
    let mut f = q_basis_three_form(pc, &p.h);
    for i in 0..n {
        f = f + &qx[i] * &qp[i];
        for j in 0..n {
            f = f + (&qp[i] * &pp[j]).scale(&p.pi[i][j]);
            for k in 0..n {
                f = f + (&qx[i] * &pp[j] * &pp[k]).scale(&p.pi[j][k].partial(i).scale(&rat(1, 2)));
            }
        }
    }
    f
}

/// `(1/6)H dx dx dx + ½H_{ijk}π^{k'k} dx^i dx^j p_{k'} + dp_i dx^i`.
pub fn tpsm_display(pc: &ProlongedChart, p: &PoissonData) -> Superfunction {
    let n = p.n;
    let x = |i: usize| format!("x{}", i + 1);
    let pn = |i: usize| format!("p{}", i + 1);
    let mut t = Superfunction::zero(&pc.chart);
    for i in 0..n {
        t = t + pc.dq(&pn(i)) * pc.dq(&x(i));
        for j in 0..n {
            for k in 0..n {
                let h = p.h.get(i, j, k);
                if h.is_zero() {
                    continue;
                }
                t = t + (pc.dq(&x(i)) * pc.dq(&x(j)) * pc.dq(&x(k))).scale(&h.scale(&rat(1, 6)));
                for kk in 0..n {
                    t = t + (pc.dq(&x(i)) * pc.dq(&x(j)) * pc.q(&pn(kk))).scale(&(h * &p.pi[kk][k]).scale(&rat(1, 2)));
                }
            }
        }
    }
    t
}

/// Symmetry predicate for the twisted model: `D_H ε = 0`.
pub fn tpsm_symmetry_check(p: &PoissonData, e: &[Scalar]) -> bool {
    tensor::is_zero_matrix(&dh_operator(p, e))
}

/// The worldsheet side of the pullback comparison.
pub struct PullbackSetup {
    pub ws: Worldsheet,
    pub source: QManifold,
    pub f: crate::graded::Morphism,
}

pub fn pullback_setup(pc: &ProlongedChart, n: usize) -> Result<PullbackSetup, GradedError> {
    let ws = Worldsheet::new(3, n)?;
    let f = pc.lift_pullback(&ws.m, ws.field_map())?;
    Ok(PullbackSetup {
        source: ws.m.clone(),
        ws,
        f,
    })
}

/// `f*(H̃) − d_Σ(A_i dX^i + ½π^{ij}A_iA_j) − (1/6)H_{ijk} dX^i dX^j dX^k`.
pub fn worldsheet_pullback_identity(
    p: &PoissonData,
    setup: &PullbackSetup,
    h_ext: &Superfunction,
) -> Result<Superfunction, GradedError> {
    let n = p.n;
    let ws = &setup.ws;
    let wc = &ws.m.chart;
    let rename: Vec<usize> = (1..=n)
        .map(|i| wc.base_var_index(&format!("X{}", i)).expect("X coordinate"))
        .collect();
    let on_ws = |s: &Scalar| s.rename(&rename);
    let ft = setup.f.pull(h_ext)?;
    let mut b = Superfunction::zero(wc);
    for i in 0..n {
        b = b + ws.a(i + 1) * ws.dx(i + 1);
        for j in 0..n {
            if !p.pi[i][j].is_zero() {
                b = b + (ws.a(i + 1) * ws.a(j + 1)).scale(&on_ws(&p.pi[i][j]).scale(&rat(1, 2)));
            }
        }
    }
    let mut hh = Superfunction::zero(wc);
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let h = p.h.get(i, j, k);
                if !h.is_zero() {
                    hh = hh + (ws.dx(i + 1) * ws.dx(j + 1) * ws.dx(k + 1)).scale(&on_ws(h));
                }
            }
        }
    }
    ft.try_sub(&ws.m.q.apply(&b)?)?.try_sub(&hh)
}

/// `f̂*([Q̂, ε̂] H̃)` for the lift of `(ε, ᾱ)` on the worldsheet product.
pub fn gauge_variation_of(
    pc: &ProlongedChart,
    setup: &PullbackSetup,
    g: &GtElement,
    h_ext: &Superfunction,
) -> Result<Superfunction, GradedError> {
    let product = product_chart(&setup.source.chart, &pc.chart)?;
    let ehat = extend_derivation(&gt_lift(pc, g)?, &product)?;
    pc.gauge_variation(&setup.source, &setup.f, &product, &ehat, h_ext)
}
