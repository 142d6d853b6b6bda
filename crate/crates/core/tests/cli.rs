use std::path::{Path, PathBuf};
use std::process::Command;

use ggmle::colored::frets;
use ggmle::existence::{buhl_cycle, Status};
use ggmle::models::sample_gaussian;
use serde_json::Value;
use tempfile::TempDir;

fn schema() -> jsonschema::JSONSchema {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schema/report.schema.json");
    let text = std::fs::read_to_string(path).expect("schema file");
    let value: Value = serde_json::from_str(&text).unwrap();
    jsonschema::JSONSchema::compile(&value).expect("valid schema")
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Run {
    fn json(&self) -> Value {
        let v: Value = serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("{e}: {}", self.stdout));
        let schema = schema();
        if let Err(errors) = schema.validate(&v) {
            let msgs: Vec<String> = errors.map(|e| format!("{e} at {}", e.instance_path)).collect();
            panic!("report does not match schema: {msgs:?}\n{}", self.stdout);
        }
        v
    }
}

fn ggmle(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_ggmle")).args(args).output().expect("spawn");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn csv(rows: &[Vec<f64>]) -> String {
    rows.iter()
        .map(|r| r.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join(","))
        .collect::<Vec<_>>()
        .join("\n")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn decide_exit_codes() {
    let dir = TempDir::new().unwrap();
    let pd = write(&dir, "pd.csv", "1,0,0\n0,1,0\n0,0,1\n1,1,1\n");
    let r = ggmle(&["decide", "--family", "complete:3", "--data", s(&pd)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = r.json();
    assert_eq!(v["result"]["status"], "Exists");
    assert!(v["meta"]["version"].is_string());

    let r = ggmle(&["decide", "--family", "complete:3"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("--data"));

    let bad = write(&dir, "bad.csv", "1,2\nx,3\n");
    let r = ggmle(&["decide", "--family", "cycle:4", "--data", s(&bad)]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("line 2"));

    let r = ggmle(&["decide", "--family", "cycle:5", "--data", s(&pd)]);
    assert_eq!(r.code, 2);
    let r = ggmle(&["decide", "--family", "nosuch:3", "--data", s(&pd)]);
    assert_eq!(r.code, 2);
}

#[test]
fn decide_cycle_matches_line_criterion() {
    let dir = TempDir::new().unwrap();
    let cases = [[0.1, 0.2, 0.3, 0.4], [0.1, 0.3, 0.2, 0.4], [0.4, 0.3, 0.2, 0.1], [0.1, 1.2, 2.9, 0.5]];
    for angles in cases {
        let rows = vec![angles.iter().map(|a: &f64| a.cos()).collect(), angles.iter().map(|a: &f64| a.sin()).collect()];
        let path = write(&dir, "c.csv", &csv(&rows));
        let want = buhl_cycle(&angles).unwrap().status;
        let r = ggmle(&["--no-meta", "decide", "--family", "cycle:4", "--data", s(&path)]);
        let v = r.json();
        let code = match want {
            Status::Exists => 0,
            Status::NotExists => 3,
            _ => 4,
        };
        assert_eq!(r.code, code, "{angles:?}");
        assert_eq!(v["result"]["status"], serde_json::to_value(want).unwrap());
    }
}

#[test]
fn mle_identity_and_divergence() {
    let dir = TempDir::new().unwrap();
    let c = 3f64.sqrt();
    let ident = write(&dir, "i.csv", &csv(&[vec![c, 0.0, 0.0], vec![0.0, c, 0.0], vec![0.0, 0.0, c]]));
    let r = ggmle(&["mle", "--family", "path:3", "--data", s(&ident)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = r.json();
    for i in 0..3 {
        for j in 0..3 {
            let got = v["result"]["sigma_hat"][i][j].as_f64().unwrap();
            assert!((got - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
        }
    }
    assert_eq!(v["result"]["fiber"]["pass"], true);

    let a = [0.1f64, 0.2, 0.3, 0.4];
    let lines = write(&dir, "l.csv", &csv(&[a.iter().map(|t| t.cos()).collect(), a.iter().map(|t| t.sin()).collect()]));
    let r = ggmle(&["mle", "--family", "cycle:4", "--data", s(&lines)]);
    assert_eq!(r.code, 3);
    let v = r.json();
    assert_eq!(v["result"]["status"], "Diverged");
    assert!(v["result"]["diagnostics"]["k_max"].as_f64().unwrap() > 1e5);
}

#[test]
fn mle_colored_matches_class_sums() {
    let dir = TempDir::new().unwrap();
    let sigma = ggmle::numkernel::SymMatrix::identity(4);
    let data = sample_gaussian(&sigma, 25, 5).unwrap();
    let path = write(&dir, "f.csv", &data.to_csv());
    let graph = write(&dir, "f.json", &serde_json::to_string(&frets().to_json()).unwrap());
    let by_family = ggmle(&["--no-meta", "mle", "--family", "colored:fret", "--data", s(&path)]);
    assert_eq!(by_family.code, 0, "{}", by_family.stderr);
    let v = by_family.json();
    assert!(v["result"]["fiber"]["moment_residual"].as_f64().unwrap() <= 1e-7);
    assert_eq!(v["result"]["fiber"]["pass"], true);
    let by_file = ggmle(&["--no-meta", "mle", "--graph", s(&graph), "--data", s(&path)]);
    let w = by_file.json();
    assert_eq!(v["result"]["sigma_hat"], w["result"]["sigma_hat"]);
}

#[test]
fn certify_prob_mldegree() {
    let r = ggmle(&["certify", "--family", "G_fig5", "--n", "3"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.json()["result"]["verdict"], "AlmostSurelyExists");

    let r = ggmle(&["certify", "--family", "Hprime_fig5", "--n", "3", "--by-atoms"]);
    let v = r.json();
    assert_eq!(v["result"]["verdict"], "AlmostSurelyExists");
    assert_eq!(v["result"]["atoms"].as_array().unwrap().len(), 2);

    let r = ggmle(&["prob", "--family", "K:2,3", "--n", "2", "--trials", "20000", "--seed", "7"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = r.json();
    assert!((v["result"]["p_hat"].as_f64().unwrap() - 0.5).abs() < 0.02);
    assert_eq!(v["result"]["seed"], 7);

    let r = ggmle(&["mldegree", "--m", "3", "--seed", "11", "--coefficients"]);
    let v = r.json();
    assert_eq!(v["result"]["degree"], 7);
    assert_eq!(v["result"]["coefficients"].as_array().unwrap().len(), 8);
    assert!(v["result"]["residual"].as_f64().unwrap() < 1e-6);
}

#[test]
fn prob_with_explicit_sigma() {
    let dir = TempDir::new().unwrap();
    let sig = write(&dir, "s.csv", "1,0,0,0\n0,1,0,0\n0,0,3,0\n0,0,0,3\n");
    let r = ggmle(&["prob", "--family", "colored:fret", "--n", "1", "--trials", "4000", "--seed", "2", "--sigma", s(&sig)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let p = r.json()["result"]["p_hat"].as_f64().unwrap();
    assert!((p - 0.5).abs() < 0.04, "{p}");
    let wrong = write(&dir, "w.csv", "1,0\n0,1\n");
    assert_eq!(ggmle(&["prob", "--family", "colored:fret", "--n", "1", "--seed", "2", "--sigma", s(&wrong)]).code, 2);
}

#[test]
fn listings_validate() {
    let v = ggmle(&["catalog"]).json();
    assert_eq!(v["result"].as_array().unwrap().len(), 26);
    let v = ggmle(&["families"]).json();
    assert!(v["result"].as_array().unwrap().len() > 5);
    let r = ggmle(&["--no-meta", "classify", "--table", "colored", "--trials", "100", "--seed", "1"]);
    assert_eq!(r.json()["result"]["cells"].as_array().unwrap().len(), 78);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let data = sample_gaussian(&ggmle::numkernel::SymMatrix::identity(5), 2, 9).unwrap();
    let path = write(&dir, "d.csv", &data.to_csv());
    let commands: Vec<Vec<&str>> = vec![
        vec!["prob", "--family", "table1:g", "--n", "3", "--trials", "500", "--seed", "4"],
        vec!["certify", "--family", "wheel:5", "--n", "2", "--seed", "8"],
        vec!["mldegree", "--m", "4", "--seed", "3", "--coefficients"],
        vec!["classify", "--trials", "200", "--seed", "5"],
        vec!["decide", "--family", "K:2,3", "--data", s(&path)],
        vec!["mle", "--family", "K:2,3", "--data", s(&path)],
    ];
    for cmd in commands {
        let outs: Vec<String> = (0..2)
            .map(|k| {
                let out = dir.path().join(format!("r{k}.json"));
                let mut args = vec!["--no-meta", "--out", s(&out)];
                args.extend(&cmd);
                ggmle(&args);
                std::fs::read_to_string(&out).unwrap()
            })
            .collect();
        assert_eq!(outs[0], outs[1], "{cmd:?}");
        let v: Value = serde_json::from_str(&outs[0]).unwrap();
        assert!(v.get("meta").is_none());
        assert!(schema().is_valid(&v), "{cmd:?}");
    }
}

#[test]
fn schema_rejects_malformed_reports() {
    let schema = schema();
    let good = ggmle(&["--no-meta", "certify", "--family", "cycle:4", "--n", "2"]).json();
    assert!(schema.is_valid(&good));
    let mut bad = good.clone();
    bad["result"]["verdict"] = "Maybe".into();
    assert!(!schema.is_valid(&bad));
    let mut bad = good.clone();
    bad["command"] = "decide".into();
    assert!(!schema.is_valid(&bad));
    let mut bad = good;
    bad["extra"] = 1.into();
    assert!(!schema.is_valid(&bad));
}
