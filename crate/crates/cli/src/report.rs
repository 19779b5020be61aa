//! Command output: verdicts, matrices, operators and named values, rendered
//! either for humans or as pretty JSON. Empty parts are omitted, so an empty
//! report serializes to `{}`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::problem::MatrixText;

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
pub struct Report {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub verdicts: Vec<Verdict>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub matrices: Vec<NamedMatrix>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub operators: Vec<OperatorEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<NamedValue>,
    /// One sub-report per example when several run together.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sections: Vec<Report>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Verdict {
    pub check: String,
    pub holds: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct NamedMatrix {
    pub name: String,
    pub rows: MatrixText,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct OperatorEntry {
    pub name: String,
    pub text: String,
    /// `p_0, …, p_n` of `Σ p_i ∂^i`.
    pub coefficients: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct NamedValue {
    pub name: String,
    pub value: String,
}

impl Report {
    pub fn titled(title: impl Into<String>) -> Self {
        Report {
            title: Some(title.into()),
            ..Default::default()
        }
    }

    pub fn verdict(&mut self, check: impl Into<String>, holds: bool, detail: Option<String>) {
        self.verdicts.push(Verdict {
            check: check.into(),
            holds,
            detail,
        });
    }

    pub fn matrix(&mut self, name: impl Into<String>, rows: MatrixText) {
        self.matrices.push(NamedMatrix {
            name: name.into(),
            rows,
        });
    }

    pub fn operator(&mut self, name: impl Into<String>, text: String, coefficients: Vec<String>) {
        self.operators.push(OperatorEntry {
            name: name.into(),
            text,
            coefficients,
        });
    }

    pub fn value(&mut self, name: impl Into<String>, value: impl Into<String>) {
        self.values.push(NamedValue {
            name: name.into(),
            value: value.into(),
        });
    }

    pub fn find_verdict(&self, check: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.check == check)
    }

    pub fn find_matrix(&self, name: &str) -> Option<&NamedMatrix> {
        self.matrices.iter().find(|m| m.name == name)
    }

    pub fn find_operator(&self, name: &str) -> Option<&OperatorEntry> {
        self.operators.iter().find(|o| o.name == name)
    }

    pub fn find_value(&self, name: &str) -> Option<&str> {
        self.values.iter().find(|v| v.name == name).map(|v| v.value.as_str())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn to_human(&self) -> String {
        let mut out = String::new();
        self.write_human(&mut out, 0);
        out
    }

    fn write_human(&self, out: &mut String, depth: usize) {
        let pad = "  ".repeat(depth);
        if let Some(t) = &self.title {
            let _ = writeln!(out, "{pad}== {t} ==");
        }
        for v in &self.verdicts {
            let mark = if v.holds { "holds" } else { "FAILS" };
            match &v.detail {
                Some(d) => {
                    let _ = writeln!(out, "{pad}[{mark}] {}: {d}", v.check);
                }
                None => {
                    let _ = writeln!(out, "{pad}[{mark}] {}", v.check);
                }
            }
        }
        for m in &self.matrices {
            let _ = writeln!(out, "{pad}{} =", m.name);
            for r in &m.rows {
                let _ = writeln!(out, "{pad}  [{}]", r.join(", "));
            }
        }
        for o in &self.operators {
            let _ = writeln!(out, "{pad}{}: {}", o.name, o.text);
        }
        for v in &self.values {
            let _ = writeln!(out, "{pad}{} = {}", v.name, v.value);
        }
        for s in &self.sections {
            s.write_human(out, depth + 1);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_is_empty_object() {
        assert_eq!(Report::default().to_json(), "{}");
    }

    #[test]
    fn json_round_trip() {
        let mut r = Report::titled("demo");
        r.verdict("full", false, Some("pair (t2, t1)".into()));
        r.matrix("defect(t2,t1)", vec![vec!["0".into(), "1/(t1*t2)".into()]]);
        r.operator("D", "Dt + 1".into(), vec!["1".into(), "1".into()]);
        r.value("certificate", "x");
        r.sections.push(Report::titled("inner"));
        let back = Report::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json(), r.to_json());
        assert!(r.to_human().contains("[FAILS] full: pair (t2, t1)"));
    }
}
