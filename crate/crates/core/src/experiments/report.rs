use serde::{Deserialize, Serialize};

/// Where a reference value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    /// A closed form or statement taken from the source analysis.
    #[serde(rename = "[PAPER]")]
    Paper,
    /// Follows from a definition or elementary arithmetic.
    #[serde(rename = "[TRIVIAL]")]
    Trivial,
    /// Worked out independently (hand computation or an oracle).
    #[serde(rename = "[DERIVED]")]
    Derived,
}

impl Provenance {
    pub fn tag(&self) -> &'static str {
        match self {
            Provenance::Paper => "[PAPER]",
            Provenance::Trivial => "[TRIVIAL]",
            Provenance::Derived => "[DERIVED]",
        }
    }
}

/// How `computed` is compared with `reference`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `|computed - reference| <= tol * |reference|`.
    Relative,
    /// `|computed - reference| <= tol`.
    Absolute,
    /// `computed <= reference + tol`.
    AtMost,
    /// `computed >= reference - tol`.
    AtLeast,
    /// `computed` is finite; `reference` is ignored.
    Finite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub computed: f64,
    pub reference: f64,
    pub provenance: Provenance,
    pub tol: f64,
    pub kind: Comparison,
    pub pass: bool,
}

impl Check {
    pub fn new(id: impl Into<String>, computed: f64, reference: f64, provenance: Provenance, tol: f64, kind: Comparison) -> Self {
        let pass = computed.is_finite()
            && match kind {
                Comparison::Relative => (computed - reference).abs() <= tol * reference.abs(),
                Comparison::Absolute => (computed - reference).abs() <= tol,
                Comparison::AtMost => computed <= reference + tol,
                Comparison::AtLeast => computed >= reference - tol,
                Comparison::Finite => true,
            };
        Check { id: id.into(), computed, reference, provenance, tol, kind, pass }
    }

    pub fn verdict(&self) -> &'static str {
        if self.pass {
            "PASS"
        } else {
            "FAIL"
        }
    }
}

/// A reported quantity that is not gated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub id: String,
    pub value: f64,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub params: serde_json::Value,
    pub checks: Vec<Check>,
    pub observations: Vec<Observation>,
    pub notes: Vec<String>,
    pub pass: bool,
}

impl ExperimentReport {
    pub fn new(name: impl Into<String>, params: &impl Serialize) -> Self {
        ExperimentReport {
            name: name.into(),
            params: serde_json::to_value(params).unwrap_or(serde_json::Value::Null),
            checks: Vec::new(),
            observations: Vec::new(),
            notes: Vec::new(),
            pass: true,
        }
    }

    pub fn check(&mut self, check: Check) -> &Check {
        self.pass &= check.pass;
        self.checks.push(check);
        self.checks.last().unwrap()
    }

    pub fn observe(&mut self, id: impl Into<String>, value: f64, note: impl Into<String>) {
        self.observations.push(Observation { id: id.into(), value, note: note.into() });
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn find(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comparisons() {
        assert!(Check::new("a", 1.01, 1.0, Provenance::Paper, 0.02, Comparison::Relative).pass);
        assert!(!Check::new("a", 1.03, 1.0, Provenance::Paper, 0.02, Comparison::Relative).pass);
        assert!(Check::new("a", 0.5, 1.0, Provenance::Derived, 0.0, Comparison::AtMost).pass);
        assert!(!Check::new("a", 0.5, 1.0, Provenance::Derived, 0.0, Comparison::AtLeast).pass);
        assert!(!Check::new("a", f64::NAN, 1.0, Provenance::Trivial, 1.0, Comparison::Absolute).pass);
    }

    #[test]
    fn report_pass_is_conjunction() {
        let mut r = ExperimentReport::new("x", &());
        r.check(Check::new("a", 1.0, 1.0, Provenance::Trivial, 0.0, Comparison::Absolute));
        assert!(r.pass);
        r.check(Check::new("b", 2.0, 1.0, Provenance::Trivial, 0.0, Comparison::Absolute));
        assert!(!r.pass);
        assert_eq!(r.failed().count(), 1);
    }

    #[test]
    fn provenance_serializes_as_tag() {
        assert_eq!(serde_json::to_string(&Provenance::Derived).unwrap(), "\"[DERIVED]\"");
    }
}
