//! Workflow execution.

use std::collections::BTreeMap;

use qgraded::catalog::{build_action_algebroid, build_g1, build_t1m, build_twisted_cotangent, PoissonData};
use qgraded::courant::{
    axioms_check, build_courant_phase, courant_equivariant, dorfman_classical, pairing, CourantPhase, Section,
};
use qgraded::equivariance::{
    anchor, dh_operator, lie_two_tensor, one_form_bracket, one_form_field, one_form_of, GtElement, OneForm, Verdict,
};
use qgraded::graded::{derived_bracket, parse_derivation, parse_superfunction, Chart, GradedCoordinate};
use qgraded::prolongation::prolong;
use qgraded::sampling::Sampler;
use qgraded::sigma::{
    coefficient_basis, dh_kernel, gauge_variation_of, pullback_setup, stanciu_closed_family, stanciu_gauging,
    tpsm_display, tpsm_extension, tpsm_symmetry_check, worldsheet_pullback_identity, TpsmOptions, WzData,
};
use qgraded::solver::SolutionSpace;
use qgraded::tensor::{self, Matrix};
use qgraded::{Derivation, GradedError, Superfunction};
use serde::Serialize;
use serde_json::{json, Value};

use crate::scenario::{self, err, Instance, Scenario, ScenarioError, Workflow};

#[derive(Debug)]
pub enum RunError {
    Scenario(ScenarioError),
    Internal(String),
}

impl From<ScenarioError> for RunError {
    fn from(e: ScenarioError) -> Self {
        RunError::Scenario(e)
    }
}

impl From<GradedError> for RunError {
    fn from(e: GradedError) -> Self {
        RunError::Internal(e.to_string())
    }
}

type Result<T> = std::result::Result<T, RunError>;

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<String>,
}

/// Parameters after command-line overrides.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Params {
    pub seed: Option<u64>,
    pub degree_bound: Option<u32>,
    pub samples: Option<usize>,
}

#[derive(Default)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub facts: BTreeMap<String, Value>,
    pub data: BTreeMap<String, Value>,
}

impl Outcome {
    fn check(&mut self, name: &str, pass: bool, detail: Option<String>, certificate: Option<String>) -> bool {
        self.checks.push(Check {
            name: name.into(),
            pass,
            detail,
            certificate,
        });
        pass
    }

    fn fact(&mut self, key: &str, v: impl Into<Value>) {
        self.facts.insert(key.into(), v.into());
    }

    fn data(&mut self, key: &str, v: impl Into<Value>) {
        self.data.insert(key.into(), v.into());
    }
}

fn seed(p: &Params, w: Workflow) -> Result<u64> {
    p.seed
        .ok_or_else(|| err("seed", format!("required by workflow {}", w.name())).into())
}

fn text<T: ToString>(v: &[T]) -> Value {
    Value::from(v.iter().map(|s| s.to_string()).collect::<Vec<_>>())
}

fn matrix_text(m: &Matrix) -> Value {
    Value::from(m.iter().map(|r| text(r)).collect::<Vec<_>>())
}

fn verdict_cert(v: &Verdict) -> Option<String> {
    v.certificate.as_ref().map(|(k, f)| format!("generator {}: {}", k + 1, f))
}

pub fn space_json(s: &SolutionSpace) -> Value {
    let sparse = |c: &[num_rational::BigRational]| {
        let m: BTreeMap<String, String> = c
            .iter()
            .enumerate()
            .filter(|(_, v)| !num_traits::Zero::is_zero(*v))
            .map(|(k, v)| (s.names[k].clone(), v.to_string()))
            .collect();
        json!(m)
    };
    json!({
        "unknowns": s.names.len(),
        "equations": s.equation_count,
        "dimension": s.dimension(),
        "verified": s.verified,
        "witness": s.witness,
        "particular": s.particular.as_deref().map(sparse),
        "basis": s.basis.iter().map(|b| sparse(b)).collect::<Vec<_>>(),
    })
}

fn require_verified(s: &SolutionSpace) -> Result<()> {
    if s.verified {
        Ok(())
    } else {
        Err(RunError::Internal("solution failed re-verification".into()))
    }
}

pub fn execute(sc: &Scenario, p: &Params) -> Result<Outcome> {
    let w = sc.workflow;
    let mut out = Outcome::default();
    match (w, &sc.instance) {
        (Workflow::CheckQ, inst) => check_q(inst, &mut out)?,
        (Workflow::Bracket | Workflow::DerivedBracket, Instance::Poisson { pi, h }) => {
            brackets(w, &scenario::poisson(pi, h)?, sc, p, &mut out)?
        }
        (Workflow::Equivariance, Instance::Poisson { pi, h }) => {
            equivariance(&scenario::poisson(pi, h)?, sc, p, &mut out)?
        }
        (Workflow::Tpsm, Instance::Poisson { pi, h }) => tpsm(&scenario::poisson(pi, h)?, p, &mut out)?,
        (
            Workflow::Stanciu,
            Instance::Wz {
                n,
                h,
                dim,
                constants,
                action,
            },
        ) => {
            let wz = WzData {
                h: scenario::three_form(h, *n, "instance.h")?,
                lie: scenario::lie_data(*dim, constants, action.as_deref().map(|a| (a, *n)), "instance")?,
            };
            stanciu(&wz, p, &mut out)?
        }
        (Workflow::CourantAxioms, Instance::Courant { n, h }) => {
            courant_axioms(&build_courant_phase(&scenario::three_form(h, *n, "instance.h")?)?, p, &mut out)?
        }
        (Workflow::CourantEquivariance, Instance::Courant { n, h }) => {
            let ph = build_courant_phase(&scenario::three_form(h, *n, "instance.h")?)?;
            courant_equivariance(&ph, sc, &mut out)?
        }
        (w, _) => {
            return Err(err("instance.kind", format!("unsupported for workflow {}", w.name())).into());
        }
    }
    let all = out.checks.iter().all(|c| c.pass);
    out.fact("all_pass", all);
    Ok(out)
}

fn check_q(inst: &Instance, out: &mut Outcome) -> Result<()> {
    let q: Derivation = match inst {
        Instance::DeRham { n } => build_t1m(*n)?.q,
        Instance::Lie {
            dim,
            constants,
            n,
            action,
        } => match action {
            Some(a) => {
                let n = n.ok_or_else(|| err("instance.n", "required with an action"))?;
                build_action_algebroid(&scenario::lie_data(*dim, constants, Some((a, n)), "instance")?)?.q
            }
            None => build_g1(&scenario::lie_data(*dim, constants, None, "instance")?)?.q,
        },
        Instance::Poisson { pi, h } => build_twisted_cotangent(&scenario::poisson(pi, h)?)?.q,
        Instance::Courant { n, h } => build_courant_phase(&scenario::three_form(h, *n, "instance.h")?)?.q,
        Instance::Wz {
            n,
            dim,
            constants,
            action,
            ..
        } => {
            let a = action.as_deref().ok_or_else(|| err("instance.action", "missing"))?;
            build_action_algebroid(&scenario::lie_data(*dim, constants, Some((a, *n)), "instance")?)?.q
        }
        Instance::Chart { coordinates, q } => {
            let chart = Chart::new(
                coordinates
                    .iter()
                    .map(|c| GradedCoordinate::new(c.name.clone(), c.degree))
                    .collect(),
            )
            .map_err(|e| err("instance.coordinates", e.to_string()))?;
            let d = parse_derivation(q, &chart).map_err(|e| err("instance.q", e.to_string()))?;
            if d.degree() != 1 {
                return Err(err("instance.q", format!("degree {}, expected 1", d.degree())).into());
            }
            d
        }
    };
    let c = q.is_q_structure()?;
    let cert = c.certificate.as_ref().map(|(u, f)| format!("[Q,Q]({}) = {}", u, f));
    out.check("Q^2 = 0", c.holds, None, cert);
    out.fact("q_structure", c.holds);
    out.data(
        "chart",
        Value::from(
            q.chart()
                .coordinates()
                .iter()
                .map(|c| format!("{}:{}", c.name, c.degree))
                .collect::<Vec<_>>(),
        ),
    );
    out.data("q", q.to_string());
    Ok(())
}

fn pairs_of(sc: &Scenario, p: &Params, n: usize) -> Result<Vec<(OneForm, OneForm)>> {
    let forms = match &sc.inputs.forms {
        Some(f) => {
            if f.len() % 2 != 0 {
                return Err(err("inputs.forms", "expected an even number of forms (consecutive pairs)").into());
            }
            scenario::forms(f, n)?
        }
        None => {
            let mut s = Sampler::new(seed(p, sc.workflow)?, n, p.degree_bound.unwrap_or(1));
            (0..2 * p.samples.unwrap_or(5)).map(|_| s.one_form()).collect()
        }
    };
    Ok(forms.chunks(2).map(|c| (c[0].clone(), c[1].clone())).collect())
}

fn sub(a: &Matrix, b: &Matrix) -> Matrix {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x - y).collect())
        .collect()
}

fn brackets(w: Workflow, pd: &PoissonData, sc: &Scenario, p: &Params, out: &mut Outcome) -> Result<()> {
    let pairs = pairs_of(sc, p, pd.n)?;
    let m = build_twisted_cotangent(pd)?;
    out.check("Q^2 = 0", m.is_valid(), None, None);
    let mut rows = Vec::new();
    let mut agree = true;
    for (k, (e1, e2)) in pairs.iter().enumerate() {
        let br = one_form_bracket(pd, e1, e2);
        let mut row = json!({ "e1": text(e1), "e2": text(e2), "bracket": text(&br) });
        match w {
            Workflow::Bracket => {
                let back = one_form_bracket(pd, e2, e1);
                let anti = br.iter().zip(&back).all(|(a, b)| (a + b).is_zero());
                out.check(&format!("pair {}: antisymmetry", k + 1), anti, None, None);
                let (v1, v2) = (anchor(pd, e1), anchor(pd, e2));
                let lhs = dh_operator(pd, &br);
                let rhs = sub(&lie_two_tensor(&v1, &dh_operator(pd, e2)), &lie_two_tensor(&v2, &dh_operator(pd, e1)));
                let defect = sub(&lhs, &rhs);
                let ok = tensor::is_zero_matrix(&defect);
                out.check(
                    &format!("pair {}: D_H compatibility", k + 1),
                    ok,
                    None,
                    (!ok).then(|| format!("{:?}", defect.iter().map(|r| text(r)).collect::<Vec<_>>())),
                );
                agree &= anti && ok;
            }
            _ => {
                let f1 = one_form_field(&m.chart, e1)?;
                let f2 = one_form_field(&m.chart, e2)?;
                let got = one_form_of(&derived_bracket(&m.q, &f1, &f2)?, pd.n)?;
                let ok = got.iter().zip(&br).all(|(u, v)| (u - v).is_zero());
                out.check(
                    &format!("pair {}: derived bracket = classical bracket", k + 1),
                    ok,
                    None,
                    (!ok).then(|| format!("derived {:?}", got.iter().map(|s| s.to_string()).collect::<Vec<_>>())),
                );
                row["derived"] = text(&got);
                agree &= ok;
            }
        }
        rows.push(row);
    }
    out.fact("agree", agree);
    out.fact("pairs", pairs.len());
    out.data("pairs", rows);
    Ok(())
}

fn equivariance(pd: &PoissonData, sc: &Scenario, p: &Params, out: &mut Outcome) -> Result<()> {
    let mut s = Sampler::new(seed(p, sc.workflow)?, pd.n, 1);
    let candidates = match &sc.inputs.forms {
        Some(f) => scenario::forms(f, pd.n)?,
        None => {
            let mut c = dh_kernel(pd, &coefficient_basis(pd.n, p.degree_bound.unwrap_or(1), None));
            c.extend((0..p.samples.unwrap_or(3)).map(|_| s.one_form()));
            c
        }
    };
    let pc = prolong(&build_twisted_cotangent(pd)?)?;
    let h = tpsm_display(&pc, pd);
    let setup = pullback_setup(&pc, pd.n)?;
    let mut rows = Vec::new();
    let mut symmetries = 0;
    let mut agree = true;
    for (k, e) in candidates.iter().enumerate() {
        let sym = tpsm_symmetry_check(pd, e);
        let g = GtElement::from_bar(e.clone(), &s.symmetric());
        let var = gauge_variation_of(&pc, &setup, &g, &h)?;
        let ok = sym == var.is_zero();
        out.check(
            &format!("form {}: D_H e = 0 iff the gauge variation vanishes", k + 1),
            ok,
            Some(format!("D_H e = 0: {}", sym)),
            (!ok).then(|| var.to_string()),
        );
        symmetries += sym as usize;
        agree &= ok;
        rows.push(json!({
            "eps": text(e),
            "alpha_bar": matrix_text(&g.alpha_bar()),
            "symmetry": sym,
            "member": g.is_member(pd),
            "variation_zero": var.is_zero(),
        }));
    }
    out.fact("symmetries", symmetries);
    out.fact("candidates", candidates.len());
    out.fact("agree", agree);
    out.data("forms", rows);
    Ok(())
}

fn tpsm(pd: &PoissonData, p: &Params, out: &mut Outcome) -> Result<()> {
    let deg = p.degree_bound.unwrap_or(2);
    let valid = build_twisted_cotangent(pd)?.is_valid();
    out.check("Q^2 = 0", valid, None, None);
    out.fact("q_structure", valid);
    if !valid {
        out.fact("unique", false);
        out.fact("matches_display", false);
        out.fact("residual_zero", Value::Null);
        return Ok(());
    }
    let opts = TpsmOptions::for_instance(pd, deg);
    let run = tpsm_extension(pd, &opts)?;
    let rep = &run.report;
    require_verified(&rep.space)?;
    out.check(
        "hypothesis: pi nondegenerate and H nonzero",
        rep.hypothesis,
        None,
        None,
    );
    let dim = rep.space.dimension();
    out.check(
        "closed and horizontal extension exists",
        dim.is_some(),
        dim.map(|d| format!("affine dimension {}", d)),
        rep.space.witness.clone(),
    );
    out.check("extension unique within the degree bound", rep.space.is_unique(), None, None);
    out.fact("dimension", json!(dim));
    out.fact("unique", rep.space.is_unique());
    out.fact("hypothesis", rep.hypothesis);
    out.data("space", space_json(&rep.space));
    out.data("obstructions", text(&rep.obstructions));
    out.data("degree_bound", deg);
    out.data("unknowns", run.ansatz.problem.len());
    if let Some(part) = &rep.space.particular {
        let n = pd.n;
        let read = |b: &str| -> Matrix { (0..n).map(|i| (0..n).map(|j| run.ansatz.read(part, b, &[i, j])).collect()).collect() };
        out.data("E", matrix_text(&read("E")));
        out.data("F", matrix_text(&read("F")));
    }
    match (&rep.q_basis, &rep.extension) {
        (Some(qb), Some(ext)) => {
            out.data("extension_q_basis", qb.to_string());
            out.data("extension", ext.to_string());
            let display = *ext == tpsm_display(&run.pc, pd);
            out.check("extension equals the closed-form display", display, None, None);
            out.fact("matches_display", display);
            let setup = pullback_setup(&run.pc, pd.n)?;
            let r = worldsheet_pullback_identity(pd, &setup, ext)?;
            out.check(
                "worldsheet pullback residual vanishes",
                r.is_zero(),
                None,
                (!r.is_zero()).then(|| r.to_string()),
            );
            out.fact("residual_zero", r.is_zero());
            out.data("pullback_residual", r.to_string());
        }
        _ => {
            out.fact("residual_zero", Value::Null);
            out.fact("matches_display", false);
        }
    }
    Ok(())
}

fn stanciu(wz: &WzData, p: &Params, out: &mut Outcome) -> Result<()> {
    let deg = p.degree_bound.unwrap_or(2);
    let invalid = wz.invalidity();
    out.check("valid Wess-Zumino data", invalid.is_none(), invalid.clone(), None);
    out.fact("valid", invalid.is_none());
    if invalid.is_some() {
        return Ok(());
    }
    let (_, closed) = stanciu_closed_family(wz, deg)?;
    require_verified(&closed)?;
    out.fact("closed_dimension", json!(closed.dimension()));
    let r = stanciu_gauging(wz, deg)?;
    require_verified(&r.report.space)?;
    let dim = r.report.space.dimension();
    out.check(
        "closed and horizontal extension exists",
        dim.is_some(),
        dim.map(|d| format!("affine dimension {}", d)),
        r.report.space.witness.clone(),
    );
    out.check(
        "no obstructions",
        r.report.obstructions.is_empty(),
        None,
        (!r.report.obstructions.is_empty()).then(|| r.report.obstructions.join("; ")),
    );
    out.fact("dimension", json!(dim));
    out.fact("unobstructed", r.report.obstructions.is_empty());
    out.data("space", space_json(&r.report.space));
    out.data("obstructions", text(&r.report.obstructions));
    out.data("degree_bound", deg);
    if let Some(d) = &r.data {
        out.data("E", matrix_text(&d.e));
        out.data("F", matrix_text(&d.f));
    }
    if let Some(f) = &r.report.q_basis {
        out.data("extension_q_basis", f.to_string());
    }
    if let Some(f) = &r.report.extension {
        out.data("extension", f.to_string());
    }
    Ok(())
}

fn courant_axioms(ph: &CourantPhase, p: &Params, out: &mut Outcome) -> Result<()> {
    let n = ph.n;
    let mut s = Sampler::new(seed(p, Workflow::CourantAxioms)?, n, p.degree_bound.unwrap_or(1));
    let samples = p.samples.unwrap_or(10);
    let qq = ph.q_squared()?;
    out.check("{Q,Q} = 0", qq.is_zero(), None, (!qq.is_zero()).then(|| qq.to_string()));
    out.fact("q_structure", qq.is_zero());
    out.data("hamiltonian", ph.hamiltonian.to_string());

    let mut sec = || Section::new(s.one_form(), s.one_form());
    let show = |x: &Section| json!({ "v": text(&x.v), "eta": text(&x.eta) });
    let (mut dorfman, mut pair, mut detected) = (true, true, false);
    let mut witness = None;
    for _ in 0..samples {
        let (a, b) = (sec(), sec());
        let derived = ph.dorfman_via_derived(&a, &b)?;
        let classical = dorfman_classical(&ph.h, &a, &b, 1);
        if derived != classical && witness.is_none() {
            witness = Some(json!({ "s1": show(&a), "s2": show(&b), "derived": show(&derived), "classical": show(&classical) }));
        }
        dorfman &= derived == classical;
        pair &= ph.pairing_via_bracket(&a, &b)? == pairing(&a, &b);
        detected |= derived != dorfman_classical(&ph.h, &a, &b, 0);
    }
    out.check("derived bracket = Dorfman bracket", dorfman, Some(format!("{} pairs", samples)), None);
    out.check("{e1,e2} = pairing", pair, Some(format!("{} pairs", samples)), None);
    if let Some(w) = witness {
        out.data("dorfman_witness", w);
    }
    let br = |a: &Section, b: &Section| dorfman_classical(&ph.h, a, b, 1);
    let mut failure = None;
    for _ in 0..samples {
        let (a, b, c) = (sec(), sec(), sec());
        if let Some(f) = axioms_check(&br, &a, &b, &c) {
            failure = Some(format!("{:?}", f));
            break;
        }
    }
    out.check("Courant axioms", failure.is_none(), Some(format!("{} triples", samples)), failure);
    if ph.h.is_zero() {
        out.fact("mutation_detected", Value::Null);
    } else {
        out.check("dropping the H-term is detected", detected, None, None);
        out.fact("mutation_detected", detected);
    }
    out.fact("dorfman_agrees", dorfman);
    out.fact("pairing_agrees", pair);
    Ok(())
}

fn courant_equivariance(ph: &CourantPhase, sc: &Scenario, out: &mut Outcome) -> Result<()> {
    let src = sc
        .inputs
        .function
        .as_deref()
        .ok_or_else(|| err("inputs.function", "required by workflow courant-equivariance"))?;
    let w: Superfunction = parse_superfunction(src, &ph.chart).map_err(|e| err("inputs.function", e.to_string()))?;
    let secs = scenario::sections(sc.inputs.sections.as_deref().unwrap_or(&[]), ph.n)?;
    let gens = secs.iter().map(|s| ph.section_field(s)).collect::<std::result::Result<Vec<_>, _>>()?;
    let v = courant_equivariant(ph, &w, &gens)?;
    out.check("horizontal", v.horizontal.holds, None, verdict_cert(&v.horizontal));
    out.check("equivariant", v.equivariant.holds, None, verdict_cert(&v.equivariant));
    out.fact("horizontal", v.horizontal.holds);
    out.fact("equivariant", v.equivariant.holds);
    out.fact("basic", v.holds());
    out.data("function", w.to_string());
    out.data(
        "generators",
        Value::from(gens.iter().map(|g| g.to_string()).collect::<Vec<_>>()),
    );
    Ok(())
}
