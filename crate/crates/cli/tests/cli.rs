use std::path::Path;
use std::process::{Command, Output};

fn amalgam(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_amalgam"));
    cmd.args(args).env_remove("AMALGAM_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

const SMALL_CHIRP: &[&str] = &["chirp-norm", "--dim", "1", "--a", "1,2", "--extent", "16", "--n", "4096"];

#[test]
fn passing_run_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = SMALL_CHIRP.to_vec();
    args.extend(["--out", dir.path().to_str().unwrap()]);
    let out = amalgam(&args, &[]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS ")).count(), 2);

    let json: serde_json::Value = serde_json::from_str(&read(dir.path(), "report.json")).unwrap();
    let report = &json.as_array().unwrap()[0];
    assert_eq!(report["name"], "chirp-norm");
    assert_eq!(report["params"]["a_values"], serde_json::json!([1.0, 2.0]));
    for c in report["checks"].as_array().unwrap() {
        for key in ["id", "computed", "reference", "provenance", "tol", "pass"] {
            assert!(c.get(key).is_some(), "missing {key}");
        }
    }
}

#[test]
fn every_csv_row_has_a_provenance_tag() {
    let dir = tempfile::tempdir().unwrap();
    let out = amalgam(&["bupu-check", "--out", dir.path().to_str().unwrap()], &[]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let mut rdr = csv::Reader::from_path(dir.path().join("report.csv")).unwrap();
    let headers = rdr.headers().unwrap().clone();
    let col = headers.iter().position(|h| h == "provenance").unwrap();
    let mut rows = 0;
    for rec in rdr.records() {
        let tag = rec.unwrap()[col].to_string();
        assert!(["[PAPER]", "[TRIVIAL]", "[DERIVED]"].contains(&tag.as_str()), "{tag}");
        rows += 1;
    }
    assert!(rows > 0);
}

#[test]
fn same_config_gives_identical_csv() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        let out = amalgam(&["holder", "--samples", "4", "--seed", "3", "--out", dir.path().to_str().unwrap()], &[]);
        assert_eq!(code(&out), 0, "{}", stdout(&out));
    }
    assert_eq!(std::fs::read(a.path().join("report.csv")).unwrap(), std::fs::read(b.path().join("report.csv")).unwrap());
    assert_eq!(read(a.path(), "report.json"), read(b.path(), "report.json"));
}

#[test]
fn failed_check_exits_one() {
    // the fitted tail slope misses -alpha (see the phi-alpha-tail report)
    let out = amalgam(&["phi-alpha-tail", "--alpha", "0.25", "--n", "4096"], &[]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).lines().any(|l| l.starts_with("FAIL phi-alpha-tail/")));
}

#[test]
fn aliasing_exits_three() {
    let out = amalgam(&["chirp-norm", "--a", "0.5", "--extent", "32", "--n", "256"], &[]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("aliasing"));
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "dimension = 2\n").unwrap();
    let wrong = dir.path().join("wrong.toml");
    std::fs::write(&wrong, "experiment = \"holder\"\n").unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["chirp-norm", "--config", bad.to_str().unwrap()],
        vec!["chirp-norm", "--config", wrong.to_str().unwrap()],
        vec!["chirp-norm", "--config", "/nonexistent/run.toml"],
        vec!["chirp-norm", "--alpha", "0.25"],
        vec!["chirp-norm", "--dim", "3"],
        vec!["chirp-norm", "--n", "1000"],
        vec!["phi-alpha-tail", "--alpha", "0.6"],
        vec!["strichartz", "--endpoint", "--dim", "1"],
        vec!["strichartz", "--q", "3"],
        vec!["potential", "--potential", "square"],
        vec!["dispersive", "--small-t", "0.2"],
        vec!["no-such-experiment"],
    ];
    for args in cases {
        assert_eq!(code(&amalgam(&args, &[])), 2, "{args:?}");
    }
    assert_eq!(code(&amalgam(SMALL_CHIRP, &[("AMALGAM_THREADS", "zero")])), 2);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("run.toml");
    std::fs::write(&file, "experiment = \"chirp-norm\"\ndim = 1\na = [1.0, 2.0]\nextent = 16.0\nn = 4096\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = amalgam(&["chirp-norm", "--config", file.to_str().unwrap(), "--a", "4", "--out", out_dir.to_str().unwrap()], &[]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let csv = read(&out_dir, "report.csv");
    assert_eq!(csv.lines().count(), 2, "{csv}");
    assert!(csv.contains("chirp_norm[a=4]"));
}

#[test]
fn thread_count_does_not_change_results() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = |d: &Path| vec!["potential".to_string(), "--out".into(), d.to_str().unwrap().into()];
    let one = amalgam(&args(a.path()).iter().map(String::as_str).collect::<Vec<_>>(), &[("AMALGAM_THREADS", "1")]);
    let two = amalgam(&args(b.path()).iter().map(String::as_str).collect::<Vec<_>>(), &[("AMALGAM_THREADS", "2")]);
    assert_eq!((code(&one), code(&two)), (0, 0));
    assert_eq!(read(a.path(), "report.csv"), read(b.path(), "report.csv"));
}

#[test]
fn strichartz_prints_a_verdict() {
    let out = amalgam(&["strichartz", "--anchor", "--dim", "1", "--family", "0.5,1", "--T", "1"], &[]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("verdict: bounded"));
}

#[test]
fn list_names_every_experiment() {
    let out = amalgam(&["list"], &[]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    for needle in [
        "chirp-norm (Eq. chirpnorm)",
        "dispersive (",
        "fixed-time (",
        "phi-alpha-tail (Lemma 4.1)",
        "strichartz (",
        "holder (",
        "bupu-check (",
        "potential (Section 6)",
    ] {
        assert!(text.contains(needle), "missing {needle}");
    }
    assert!(text.contains("defaults"));
}
