//! Built-in example problems and the comparison of their expected outcomes
//! against a report.

use std::collections::BTreeMap;

use anyhow::Result;
use isomon_core::difftower::Tower;
use serde::{Deserialize, Serialize};

use crate::problem::{self, MatrixText, ProblemFile};
use crate::report::Report;

pub const FIXTURES: &[(&str, &str)] = &[
    ("heisenberg-obstruction", include_str!("../fixtures/heisenberg-obstruction.json")),
    ("iterated-integrals", include_str!("../fixtures/iterated-integrals.json")),
    ("legendre", include_str!("../fixtures/legendre.json")),
    ("incomplete-gamma", include_str!("../fixtures/incomplete-gamma.json")),
    ("replace-bi", include_str!("../fixtures/replace-bi.json")),
    ("per-derivation-triviality", include_str!("../fixtures/per-derivation-triviality.json")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    FIXTURES.iter().map(|(n, _)| *n)
}

pub fn source(name: &str) -> Option<&'static str> {
    FIXTURES.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn load(name: &str) -> Result<ProblemFile> {
    let text = source(name).ok_or_else(|| anyhow::anyhow!(UnknownExample(name.to_string())))?;
    ProblemFile::from_json(text)
}

#[derive(Debug, thiserror::Error)]
#[error("no example named `{0}`")]
pub struct UnknownExample(pub String);

/// Expected content of a report. Expressions are compared as elements of the
/// problem's field; operators are compared up to a nonzero factor.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Expect {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub verdicts: BTreeMap<String, bool>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub matrices: BTreeMap<String, MatrixText>,
    /// `p_0, …, p_n` of `Σ p_i ∂^i`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub operators: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, String>,
}

fn same_expr(tower: &Tower, a: &str, b: &str) -> bool {
    match (problem::eval(tower, a), problem::eval(tower, b)) {
        (Ok(x), Ok(y)) => x == y,
        _ => a == b,
    }
}

fn same_matrix(tower: &Tower, a: &MatrixText, b: &MatrixText) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|(r, s)| r.len() == s.len() && r.iter().zip(s).all(|(x, y)| same_expr(tower, x, y)))
}

/// `p` and `q` proportional, with the factor read off the leading terms.
fn proportional(tower: &Tower, p: &[String], q: &[String]) -> bool {
    if p.len() != q.len() || p.is_empty() {
        return false;
    }
    let eval = |v: &[String]| -> Option<Vec<_>> { v.iter().map(|s| problem::eval(tower, s).ok()).collect() };
    let (Some(p), Some(q)) = (eval(p), eval(q)) else {
        return false;
    };
    let (pn, qn) = (p.last().unwrap(), q.last().unwrap());
    !pn.is_zero() && !qn.is_zero() && p.iter().zip(&q).all(|(a, b)| &(a * qn) == &(b * pn))
}

impl Expect {
    /// Human-readable mismatches; empty when everything matches.
    pub fn mismatches(&self, tower: &Tower, r: &Report) -> Vec<String> {
        let mut out = Vec::new();
        for (check, want) in &self.verdicts {
            match r.find_verdict(check) {
                Some(v) if v.holds == *want => {}
                Some(v) => out.push(format!("verdict `{check}`: expected {want}, got {}", v.holds)),
                None => out.push(format!("verdict `{check}` missing")),
            }
        }
        for (name, want) in &self.matrices {
            match r.find_matrix(name) {
                Some(m) if same_matrix(tower, &m.rows, want) => {}
                Some(m) => out.push(format!("matrix `{name}`: expected {want:?}, got {:?}", m.rows)),
                None => out.push(format!("matrix `{name}` missing")),
            }
        }
        for (name, want) in &self.operators {
            match r.find_operator(name) {
                Some(o) if proportional(tower, &o.coefficients, want) => {}
                Some(o) => out.push(format!("operator `{name}`: expected a multiple of {want:?}, got {}", o.text)),
                None => out.push(format!("operator `{name}` missing")),
            }
        }
        for (name, want) in &self.values {
            match r.find_value(name) {
                Some(v) if same_expr(tower, v, want) => {}
                Some(v) => out.push(format!("value `{name}`: expected {want}, got {v}")),
                None => out.push(format!("value `{name}` missing")),
            }
        }
        out
    }
}
