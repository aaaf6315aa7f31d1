//! Scenario files: TOML with tensor entries written as scalar expressions.

use std::collections::BTreeMap;
use std::path::Path;

use qgraded::catalog::{LieData, PoissonData};
use qgraded::courant::Section;
use qgraded::equivariance::OneForm;
use qgraded::scalar::parse_scalar;
use qgraded::tensor::{Matrix, ThreeForm};
use qgraded::Scalar;
use serde::Deserialize;
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

/// A parse failure; `at` is a dotted path into the scenario.
#[derive(Debug, Error)]
#[error("{at}: {msg}")]
pub struct ScenarioError {
    pub at: String,
    pub msg: String,
}

pub fn err(at: impl Into<String>, msg: impl Into<String>) -> ScenarioError {
    ScenarioError {
        at: at.into(),
        msg: msg.into(),
    }
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Workflow {
    CheckQ,
    Bracket,
    DerivedBracket,
    Equivariance,
    Stanciu,
    Tpsm,
    CourantAxioms,
    CourantEquivariance,
}

impl Workflow {
    pub fn name(self) -> &'static str {
        match self {
            Workflow::CheckQ => "check-q",
            Workflow::Bracket => "bracket",
            Workflow::DerivedBracket => "derived-bracket",
            Workflow::Equivariance => "equivariance",
            Workflow::Stanciu => "stanciu",
            Workflow::Tpsm => "tpsm",
            Workflow::CourantAxioms => "courant-axioms",
            Workflow::CourantEquivariance => "courant-equivariance",
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub name: String,
    pub workflow: Workflow,
    pub seed: Option<u64>,
    pub degree_bound: Option<u32>,
    pub samples: Option<usize>,
    pub instance: Instance,
    #[serde(default)]
    pub inputs: Inputs,
    #[serde(default)]
    pub expect: BTreeMap<String, serde_json::Value>,
}

/// `at = [i, j, k]` (1-based) with a scalar value.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    pub at: Vec<usize>,
    pub value: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoordSpec {
    pub name: String,
    pub degree: u32,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Instance {
    DeRham {
        n: usize,
    },
    Lie {
        dim: usize,
        #[serde(default)]
        constants: Vec<Entry>,
        n: Option<usize>,
        action: Option<Vec<Vec<String>>>,
    },
    Poisson {
        pi: Vec<Vec<String>>,
        #[serde(default)]
        h: Vec<Entry>,
    },
    Courant {
        n: usize,
        #[serde(default)]
        h: Vec<Entry>,
    },
    Wz {
        n: usize,
        #[serde(default)]
        h: Vec<Entry>,
        dim: usize,
        #[serde(default)]
        constants: Vec<Entry>,
        action: Option<Vec<Vec<String>>>,
    },
    Chart {
        coordinates: Vec<CoordSpec>,
        q: String,
    },
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionSpec {
    pub v: Vec<String>,
    pub eta: Vec<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inputs {
    /// One-forms on the base.
    pub forms: Option<Vec<Vec<String>>>,
    /// Superfunction on the instance chart.
    pub function: Option<String>,
    /// Sections generating the symmetry family.
    pub sections: Option<Vec<SectionSpec>>,
}

pub fn load(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|e| err(path.display().to_string(), e.to_string()))?;
    parse(&text).map_err(|mut e| {
        e.at = format!("{}: {}", path.display(), e.at);
        e
    })
}

pub fn parse(text: &str) -> Result<Scenario, ScenarioError> {
    let s: Scenario = toml::from_str(text).map_err(|e| {
        let at = match e.span() {
            Some(sp) => {
                let line = text[..sp.start].matches('\n').count() + 1;
                let col = sp.start - text[..sp.start].rfind('\n').map_or(0, |p| p + 1) + 1;
                format!("line {}, column {}", line, col)
            }
            None => "scenario".into(),
        };
        err(at, e.message().to_string())
    })?;
    if s.schema_version != SCHEMA_VERSION {
        return Err(err(
            "schema_version",
            format!("unsupported version {}, expected {}", s.schema_version, SCHEMA_VERSION),
        ));
    }
    Ok(s)
}

fn x_vars(n: usize) -> impl Fn(&str) -> Option<usize> {
    move |s: &str| {
        s.strip_prefix('x')
            .and_then(|i| i.parse::<usize>().ok())
            .filter(|&i| (1..=n).contains(&i))
            .map(|i| i - 1)
    }
}

/// A scalar in the variables `x1..xn`.
pub fn scalar(src: &str, n: usize, at: &str) -> Result<Scalar, ScenarioError> {
    parse_scalar(src, &x_vars(n)).map_err(|e| err(at, format!("column {}: {}", e.pos + 1, e.msg)))
}

pub fn vector(v: &[String], n: usize, at: &str) -> Result<Vec<Scalar>, ScenarioError> {
    if v.len() != n {
        return Err(err(at, format!("expected {} entries, found {}", n, v.len())));
    }
    v.iter()
        .enumerate()
        .map(|(i, s)| scalar(s, n, &format!("{}[{}]", at, i)))
        .collect()
}

pub fn matrix(m: &[Vec<String>], rows: usize, cols: usize, n: usize, at: &str) -> Result<Matrix, ScenarioError> {
    if m.len() != rows {
        return Err(err(at, format!("expected {} rows, found {}", rows, m.len())));
    }
    m.iter()
        .enumerate()
        .map(|(i, r)| {
            let at = format!("{}[{}]", at, i);
            if r.len() != cols {
                return Err(err(at, format!("expected {} entries, found {}", cols, r.len())));
            }
            r.iter()
                .enumerate()
                .map(|(j, s)| scalar(s, n, &format!("{}[{}]", at, j)))
                .collect()
        })
        .collect()
}

fn indices(e: &Entry, arity: usize, bound: usize, at: &str) -> Result<Vec<usize>, ScenarioError> {
    if e.at.len() != arity {
        return Err(err(
            format!("{}.at", at),
            format!("expected {} indices, found {}", arity, e.at.len()),
        ));
    }
    if let Some(&bad) = e.at.iter().find(|&&i| i == 0 || i > bound) {
        return Err(err(format!("{}.at", at), format!("index {} outside 1..={}", bad, bound)));
    }
    Ok(e.at.iter().map(|i| i - 1).collect())
}

pub fn three_form(entries: &[Entry], n: usize, at: &str) -> Result<ThreeForm, ScenarioError> {
    let mut h = ThreeForm::zero(n);
    for (k, e) in entries.iter().enumerate() {
        let at = format!("{}[{}]", at, k);
        let ix = indices(e, 3, n, &at)?;
        if ix[0] == ix[1] || ix[1] == ix[2] || ix[0] == ix[2] {
            return Err(err(format!("{}.at", at), "indices must be distinct"));
        }
        h.set(ix[0], ix[1], ix[2], scalar(&e.value, n, &format!("{}.value", at))?);
    }
    Ok(h)
}

pub fn lie_data(
    dim: usize,
    constants: &[Entry],
    action: Option<(&[Vec<String>], usize)>,
    at: &str,
) -> Result<LieData, ScenarioError> {
    let mut l = LieData::new(dim);
    for (k, e) in constants.iter().enumerate() {
        let at = format!("{}.constants[{}]", at, k);
        let ix = indices(e, 3, dim, &at)?;
        let v = scalar(&e.value, 0, &format!("{}.value", at))?
            .as_constant()
            .ok_or_else(|| err(format!("{}.value", at), "structure constants must be rational"))?;
        l.set(ix[0], ix[1], ix[2], v);
    }
    if let Some((rho, n)) = action {
        let m = matrix(rho, dim, n, n, &format!("{}.action", at))?;
        l = l.with_action(n, m);
    }
    Ok(l)
}

pub fn poisson(pi: &[Vec<String>], h: &[Entry]) -> Result<PoissonData, ScenarioError> {
    let n = pi.len();
    let m = matrix(pi, n, n, n, "instance.pi")?;
    let h = three_form(h, n, "instance.h")?;
    PoissonData::new(m, h).map_err(|e| err("instance", e.to_string()))
}

pub fn forms(f: &[Vec<String>], n: usize) -> Result<Vec<OneForm>, ScenarioError> {
    f.iter()
        .enumerate()
        .map(|(k, v)| vector(v, n, &format!("inputs.forms[{}]", k)))
        .collect()
}

pub fn sections(s: &[SectionSpec], n: usize) -> Result<Vec<Section>, ScenarioError> {
    s.iter()
        .enumerate()
        .map(|(k, sp)| {
            let at = format!("inputs.sections[{}]", k);
            Ok(Section::new(
                vector(&sp.v, n, &format!("{}.v", at))?,
                vector(&sp.eta, n, &format!("{}.eta", at))?,
            ))
        })
        .collect()
}
