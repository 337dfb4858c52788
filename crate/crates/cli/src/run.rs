use std::fmt::Write as _;
use std::path::Path;

use amalgam::experiments::*;
use serde::Serialize;

use crate::config::{Experiment, Plan, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical error: {0}")]
    Numerical(amalgam::Error),
    #[error("output error: {0}")]
    Output(String),
}

impl From<amalgam::Error> for RunError {
    fn from(e: amalgam::Error) -> Self {
        if e.is_numerical() {
            RunError::Numerical(e)
        } else {
            RunError::Config(e.to_string())
        }
    }
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) | RunError::Output(_) => 2,
            RunError::Numerical(_) => 3,
        }
    }
}

pub fn execute(plan: &Plan) -> Result<Vec<ExperimentReport>, RunError> {
    Ok(match plan {
        Plan::ChirpNorm(p) => vec![verify_chirp_norm(p)?],
        Plan::Dispersive(p) => vec![dispersive_experiment(p)?],
        Plan::FixedTime(p) => vec![fixed_time_amalgam_experiment(p)?],
        Plan::PhiAlphaTail(runs) => runs.iter().map(phi_alpha_tail_experiment).collect::<amalgam::Result<_>>()?,
        Plan::Strichartz(p) => vec![strichartz_ratio_experiment(p)?],
        Plan::Holder(h, e) => vec![holder_duality_experiment(h)?, pointwise_embedding_experiment(e)?],
        Plan::BupuCheck(p) => vec![bupu_check_experiment(p)?],
        Plan::Potential(p) => vec![potential_experiment(p)?],
    })
}

/// Verdict lines for one report.
pub fn render(report: &ExperimentReport) -> String {
    let mut out = String::new();
    for c in &report.checks {
        let _ = writeln!(
            out,
            "{} {}/{}: computed {:.6e}, reference {:.6e}, {} tol {:e} {}",
            c.verdict(),
            report.name,
            c.id,
            c.computed,
            c.reference,
            kind_name(c.kind),
            c.tol,
            c.provenance.tag()
        );
    }
    for o in &report.observations {
        let _ = writeln!(out, "info {}/{} = {:.6e} ({})", report.name, o.id, o.value, o.note);
    }
    for n in &report.notes {
        let _ = writeln!(out, "note {}: {n}", report.name);
    }
    if report.name == "strichartz" {
        let verdict = match report.find("family_spread") {
            Some(c) if c.pass => "bounded",
            Some(_) => "not bounded",
            None => "exploratory, nothing asserted",
        };
        let _ = writeln!(out, "verdict: {verdict}");
    }
    out
}

fn kind_name(kind: Comparison) -> &'static str {
    match kind {
        Comparison::Relative => "relative",
        Comparison::Absolute => "absolute",
        Comparison::AtMost => "at_most",
        Comparison::AtLeast => "at_least",
        Comparison::Finite => "finite",
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    experiment: &'a str,
    id: &'a str,
    computed: f64,
    reference: f64,
    provenance: &'static str,
    tol: f64,
    kind: &'static str,
    pass: bool,
}

pub fn csv_bytes(reports: &[ExperimentReport]) -> Result<Vec<u8>, RunError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in reports {
        for c in &r.checks {
            w.serialize(CsvRow {
                experiment: &r.name,
                id: &c.id,
                computed: c.computed,
                reference: c.reference,
                provenance: c.provenance.tag(),
                tol: c.tol,
                kind: kind_name(c.kind),
                pass: c.pass,
            })
            .map_err(|e| RunError::Output(e.to_string()))?;
        }
    }
    w.into_inner().map_err(|e| RunError::Output(e.to_string()))
}

/// Writes `report.json` (an array of reports) and `report.csv` (their checks).
pub fn write_outputs(dir: &Path, reports: &[ExperimentReport]) -> Result<(), RunError> {
    let io = |e: std::io::Error| RunError::Output(format!("{}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(io)?;
    let mut json = serde_json::to_string_pretty(reports).map_err(|e| RunError::Output(e.to_string()))?;
    json.push('\n');
    std::fs::write(dir.join("report.json"), json).map_err(io)?;
    std::fs::write(dir.join("report.csv"), csv_bytes(reports)?).map_err(io)?;
    Ok(())
}

/// Runs one experiment; `Ok(true)` when every check passed.
pub fn run(exp: Experiment, args: RunConfig) -> Result<bool, RunError> {
    let cfg = args.resolve(exp)?;
    let plan = cfg.plan(exp)?;
    let reports = execute(&plan)?;
    for r in &reports {
        print!("{}", render(r));
    }
    if let Some(dir) = &cfg.out {
        write_outputs(dir, &reports)?;
    }
    let failed: usize = reports.iter().map(|r| r.failed().count()).sum();
    let total: usize = reports.iter().map(|r| r.checks.len()).sum();
    if failed == 0 {
        println!("{}: all {total} checks passed", exp.name());
    } else {
        println!("{}: {failed} of {total} checks failed", exp.name());
    }
    Ok(failed == 0)
}

fn defaults_toml(value: &impl Serialize) -> String {
    toml::to_string(value).unwrap_or_default()
}

pub fn list_experiments() -> String {
    let mut out = String::new();
    for exp in Experiment::ALL {
        let _ = writeln!(out, "{} ({})", exp.name(), exp.anchor());
        let _ = writeln!(out, "  keys: {}", exp.keys().join(", "));
        let defaults: Vec<(String, String)> = match RunConfig::default().plan(exp) {
            Ok(Plan::ChirpNorm(p)) => vec![(String::new(), defaults_toml(&p))],
            Ok(Plan::Dispersive(p)) => {
                vec![("d=1".into(), defaults_toml(&p)), ("d=2".into(), defaults_toml(&DispersiveParams::standard(2)))]
            }
            Ok(Plan::FixedTime(p)) => vec![(String::new(), defaults_toml(&p))],
            Ok(Plan::PhiAlphaTail(runs)) => runs.iter().map(|p| (format!("alpha={}", p.alpha), defaults_toml(p))).collect(),
            Ok(Plan::Strichartz(p)) => vec![
                ("d=1".into(), defaults_toml(&p)),
                ("d=2 endpoint".into(), defaults_toml(&StrichartzParams::endpoint_2d())),
                ("anchor".into(), defaults_toml(&StrichartzParams::anchor(1))),
            ],
            Ok(Plan::Holder(h, e)) => vec![("duality".into(), defaults_toml(&h)), ("pointwise".into(), defaults_toml(&e))],
            Ok(Plan::BupuCheck(p)) => vec![(String::new(), defaults_toml(&p))],
            Ok(Plan::Potential(p)) => vec![(String::new(), defaults_toml(&p))],
            Err(e) => vec![(String::new(), e.to_string())],
        };
        for (label, body) in defaults {
            let _ = writeln!(out, "  defaults{}:", if label.is_empty() { String::new() } else { format!(" ({label})") });
            for line in body.lines().filter(|l| !l.is_empty()) {
                let _ = writeln!(out, "    {line}");
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn listing_has_anchors() {
        let text = list_experiments();
        for needle in ["chirp-norm (Eq. chirpnorm)", "phi-alpha-tail (Lemma 4.1)", "potential (Section 6)"] {
            assert!(text.contains(needle), "{needle}");
        }
        assert!(text.contains("a_values = [0.5, 1.0, 2.0, 4.0, 8.0]"));
    }

    #[test]
    fn error_classes() {
        assert_eq!(RunError::from(amalgam::Error::Aliasing("x".into())).exit_code(), 3);
        assert_eq!(RunError::from(amalgam::Error::NonFinite("x".into())).exit_code(), 3);
        assert_eq!(RunError::from(amalgam::Error::InvalidSpec("x".into())).exit_code(), 2);
    }

    #[test]
    fn csv_carries_provenance() {
        let mut r = ExperimentReport::new("x", &());
        r.check(Check::new("a", 1.0, 1.0, Provenance::Paper, 0.0, Comparison::Absolute));
        r.check(Check::new("b", 1.0, 2.0, Provenance::Derived, 0.0, Comparison::AtMost));
        let text = String::from_utf8(csv_bytes(&[r]).unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "experiment,id,computed,reference,provenance,tol,kind,pass");
        assert_eq!(lines[1], "x,a,1.0,1.0,[PAPER],0.0,absolute,true");
        assert_eq!(lines[2], "x,b,1.0,2.0,[DERIVED],0.0,at_most,true");
    }
}
