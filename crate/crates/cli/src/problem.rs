//! Problem files: JSON documents describing a field, and optionally a
//! connection system, a curve, an integrand, a rebase and expectations.
//!
//! Matrices are lists of rows of expression strings. With `"dual": true` a
//! stored matrix `B` (written for `∂ē = −ē·B`) is loaded as `A = −Bᵀ` and
//! results are converted back the same way before printing.

use std::collections::BTreeMap;

use anyhow::{anyhow, bail, Context, Result};
use isomon_core::connection::{ConnectionSystem, Mat};
use isomon_core::difftower::{ConsistencyPolicy, DerivKind, GeneratorKind, Tower, TowerBuilder};
use isomon_core::exactalg::RationalFunction;
use serde::{Deserialize, Serialize};

use crate::expr::{self, BuilderScope, TowerScope};

type Rf = RationalFunction;

pub type MatrixText = Vec<Vec<String>>;

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub field: FieldSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<CurveSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integrand: Option<IntegrandSpec>,
    /// Basis of the allowed corrections for `flatten`, stored like the system matrices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub commutant: Option<Vec<MatrixText>>,
    /// Generators whose centralizer should span `commutant`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub centralizer: Option<Vec<MatrixText>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flatten: Option<FlattenSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauge: Option<GaugeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rebase: Option<RebaseSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<crate::fixtures::Expect>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub principal: Option<String>,
    #[serde(default)]
    pub parametric: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub generators: Vec<GeneratorSpec>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKindText {
    Free,
    Defined,
    Mixed,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub name: String,
    pub kind: GeneratorKindText,
    /// Derivation name to derivative expression.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub rules: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub size: usize,
    #[serde(default)]
    pub dual: bool,
    pub matrices: BTreeMap<String, MatrixText>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CurveSection {
    pub f: String,
    #[serde(default = "default_x")]
    pub var: String,
    #[serde(default = "default_t")]
    pub param: String,
    #[serde(default)]
    pub form: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_order: Option<usize>,
    /// Factor applied to the monic operator before printing.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<String>,
    /// Certificate for the scaled operator, an expression in `z`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct IntegrandSpec {
    pub expr: String,
    #[serde(default = "default_x")]
    pub var: String,
    #[serde(default = "default_t")]
    pub param: String,
    /// A known operator `∂^n − Σ c_i ∂^i`, as `c_0, …, c_{n−1}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operator: Option<Vec<String>>,
    /// Certificate `a` with `D(b) = ∂_x(a)` for the known operator.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_order: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FlattenSpec {
    pub order: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<u32>,
    /// Also run without the commutant constraint.
    #[serde(default)]
    pub unconstrained: bool,
}

/// `system` should equal `from` gauged by `matrix`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GaugeSpec {
    pub from: SystemSpec,
    pub matrix: MatrixText,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RebaseSpec {
    pub old: Vec<String>,
    pub new: Vec<String>,
    pub matrix: MatrixText,
    /// Degree bound for horizontal sections.
    #[serde(default = "default_degree")]
    pub degree: u32,
}

fn default_degree() -> u32 {
    6
}

fn default_x() -> String {
    "x".into()
}

fn default_t() -> String {
    "t".into()
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).context("malformed problem file")
    }

    pub fn read(path: &str) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {path}"))?;
        Self::from_json(&text).with_context(|| format!("in {path}"))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn system_spec(&self) -> Result<&SystemSpec> {
        self.system.as_ref().ok_or_else(|| anyhow!(MissingSection("system")))
    }

    pub fn dual(&self) -> bool {
        self.system.as_ref().is_some_and(|s| s.dual)
    }
}

#[derive(Debug, thiserror::Error)]
#[error("problem file has no `{0}` section")]
pub struct MissingSection(pub &'static str);

/// Input that parses but does not describe a valid problem.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct Malformed(pub String);

impl FieldSpec {
    pub fn build(&self) -> Result<Tower> {
        let mut b = TowerBuilder::new();
        let mut bases = Vec::new();
        if let Some(p) = &self.principal {
            b.base(p, DerivKind::Principal)?;
            bases.push(p.clone());
        }
        for p in &self.parametric {
            b.base(p, DerivKind::Parametric)?;
            bases.push(p.clone());
        }
        let mut vars = Vec::new();
        for g in &self.generators {
            let kind = match g.kind {
                GeneratorKindText::Free => GeneratorKind::Free,
                GeneratorKindText::Defined => GeneratorKind::Defined,
                GeneratorKindText::Mixed => GeneratorKind::Mixed,
            };
            vars.push(b.generator(&g.name, kind)?);
        }
        let names: Vec<String> = self.generators.iter().map(|g| g.name.clone()).collect();
        for (g, v) in self.generators.iter().zip(vars) {
            for (d, text) in &g.rules {
                let value = expr::parse(text)?
                    .eval(&mut BuilderScope {
                        builder: &mut b,
                        generators: &names,
                        bases: &bases,
                    })
                    .with_context(|| format!("rule for {} along {d}", g.name))?;
                b.rule(v, d, value)?;
            }
        }
        Ok(b.build(ConsistencyPolicy::Refuse)?)
    }
}

pub fn eval(tower: &Tower, text: &str) -> Result<Rf> {
    expr::parse(text)?
        .eval(&mut TowerScope { tower })
        .with_context(|| format!("evaluating `{text}`"))
}

pub fn eval_matrix(tower: &Tower, rows: &MatrixText) -> Result<Mat> {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != m) {
        bail!(Malformed("matrix rows have different lengths".into()));
    }
    let mut out = Mat::zeros(n, m);
    for (i, r) in rows.iter().enumerate() {
        for (j, e) in r.iter().enumerate() {
            out.set(i, j, eval(tower, e)?);
        }
    }
    Ok(out)
}

/// `B ↦ −Bᵀ`; an involution.
pub fn dualize(m: &Mat) -> Mat {
    m.transpose().neg()
}

/// Internal convention from file convention and back.
pub fn convert(m: &Mat, dual: bool) -> Mat {
    if dual {
        dualize(m)
    } else {
        m.clone()
    }
}

pub fn matrix_text(tower: &Tower, m: &Mat) -> MatrixText {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| tower.format(m.get(i, j))).collect())
        .collect()
}

impl SystemSpec {
    pub fn load(&self, tower: &Tower) -> Result<ConnectionSystem> {
        let mut ms = Vec::new();
        for (name, rows) in &self.matrices {
            let m = eval_matrix(tower, rows).with_context(|| format!("matrix for `{name}`"))?;
            if m.rows() != self.size || m.cols() != self.size {
                bail!(Malformed(format!(
                    "matrix for `{name}` is {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    self.size,
                    self.size
                )));
            }
            ms.push((name.clone(), convert(&m, self.dual)));
        }
        let principal = tower.principal();
        let principal = principal.as_deref().filter(|p| self.matrices.contains_key(*p));
        Ok(ConnectionSystem::new(tower, self.size, principal, ms)?)
    }

    /// Inverse of [`SystemSpec::load`] up to expression formatting.
    pub fn store(s: &ConnectionSystem, dual: bool) -> SystemSpec {
        let tower = s.tower();
        SystemSpec {
            size: s.size(),
            dual,
            matrices: s
                .matrices()
                .map(|(n, m)| (n.to_string(), matrix_text(tower, &convert(m, dual))))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEIS: &str = r#"{
        "field": {"principal": "x", "parametric": ["t1", "t2"]},
        "system": {"size": 2, "dual": true, "matrices": {
            "x": [["0", "0"], ["0", "0"]],
            "t1": [["0", "1/t1"], ["0", "0"]],
            "t2": [["t2", "0"], ["1", "x"]]
        }}
    }"#;

    #[test]
    fn load_store_round_trip() {
        let p = ProblemFile::from_json(HEIS).unwrap();
        let tw = p.field.build().unwrap();
        let spec = p.system_spec().unwrap();
        let s = spec.load(&tw).unwrap();
        let b = eval_matrix(&tw, &spec.matrices["t1"]).unwrap();
        assert_eq!(s.matrix("t1").unwrap(), &dualize(&b));
        assert_eq!(dualize(&dualize(&b)), b);
        let back = SystemSpec::store(&s, true);
        assert_eq!(back.load(&tw).unwrap(), s);
        assert_eq!(back.matrices["t2"], spec.matrices["t2"]);
    }

    #[test]
    fn malformed_inputs() {
        assert!(ProblemFile::from_json("{").is_err());
        assert!(ProblemFile::from_json(r#"{"field": {}, "bogus": 1}"#).is_err());
        let p = ProblemFile::from_json(r#"{"field": {"parametric": ["t"]},
            "system": {"size": 2, "matrices": {"t": [["0"], ["0", "1"]]}}}"#)
        .unwrap();
        let tw = p.field.build().unwrap();
        assert!(p.system_spec().unwrap().load(&tw).is_err());
    }

    #[test]
    fn tower_with_rules_and_jets() {
        let p = ProblemFile::from_json(
            r#"{"field": {"principal": "x", "parametric": ["t"], "generators": [
                {"name": "h", "kind": "defined", "rules": {"x": "((t-1)/x-1)*h", "t": "l*h"}},
                {"name": "l", "kind": "defined", "rules": {"x": "1/x", "t": "0"}},
                {"name": "g", "kind": "mixed", "rules": {"x": "h"}}
            ]}}"#,
        )
        .unwrap();
        let tw = p.field.build().unwrap();
        let lhs = &tw.derive_by(&eval(&tw, "h").unwrap(), "t").unwrap() - &eval(&tw, "h").unwrap();
        let rhs = tw.derive_by(&eval(&tw, "g_t - g").unwrap(), "x").unwrap();
        assert_eq!(lhs, rhs);
    }
}
