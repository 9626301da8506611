use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn heptasaw(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heptasaw"))
        .args(args)
        .env("HEPTASAW_OUT", dir)
        .output()
        .expect("binary runs")
}

#[test]
fn enumerate_writes_counts() {
    let dir = tempfile::tempdir().unwrap();
    let out = heptasaw(dir.path(), &["enumerate", "--n", "3"]);
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("counts_n3.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows, ["n,c_n", "0,1", "1,7", "2,42", "3,238"]);
    assert!(csv.starts_with("# provenance: {"));
}

#[test]
fn build_writes_lattice() {
    let dir = tempfile::tempdir().unwrap();
    assert!(heptasaw(dir.path(), &["build", "--R", "2"]).status.success());
    let text = fs::read_to_string(dir.path().join("lattice_R2.json")).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["vertices"], 29);
    assert_eq!(doc["lattice"]["rotation"].as_array().unwrap().len(), 29);
    assert_eq!(doc["lattice"]["digest"], doc["digest"]);

    let again = tempfile::tempdir().unwrap();
    heptasaw(again.path(), &["build", "--R", "2", "--mode", "geometric"]);
    let geo: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(again.path().join("lattice_R2.json")).unwrap()).unwrap();
    assert_eq!(geo["digest"], doc["digest"]);
}

#[test]
fn verify_is_reproducible() {
    let args = ["verify", "--n", "6", "--C", "2", "--seed", "1", "--thin-radius", "2", "--build-radius", "6"];
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ra = heptasaw(a.path(), &args);
    let rb = heptasaw(b.path(), &[&["--workers", "3"], &args[..]].concat());
    let ja = fs::read(a.path().join("verify.json")).unwrap();
    assert_eq!(ja, fs::read(b.path().join("verify.json")).unwrap());
    // interval thinness of the lattice is 2, so the delta = 1 check fails
    assert_eq!(ra.status.code(), Some(1));
    assert_eq!(rb.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&ja).unwrap();
    for c in report["checks"].as_array().unwrap() {
        assert_eq!(c["pass"], c["name"] != "thinness", "{c}");
    }
    let stderr = String::from_utf8(ra.stderr).unwrap();
    assert!(stderr.contains("\"failed\""));

    let ok = tempfile::tempdir().unwrap();
    let r = heptasaw(ok.path(), &[&args[..], &["--delta", "2"]].concat());
    assert_eq!(r.status.code(), Some(0));
}

#[test]
fn config_file_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "seed = 3\n[sample]\nn = 6\nsampler = \"exact\"\nsamples = 5\n").unwrap();
    let c = cfg.to_str().unwrap();
    assert!(heptasaw(dir.path(), &["--config", c, "sample", "--samples", "4"]).status.success());
    let text = fs::read_to_string(dir.path().join("samples_exact_n6.ndjson")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    let head: serde_json::Value = serde_json::from_str(lines[0]).unwrap();
    assert_eq!(head["provenance"]["seed"], 3);
    assert_eq!(head["provenance"]["config"]["samples"], 4);
    for l in &lines[1..] {
        let rec: serde_json::Value = serde_json::from_str(l).unwrap();
        assert_eq!(rec["n"], 6);
        assert_eq!(rec["walk"].as_array().unwrap().len(), 7);
    }
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(heptasaw(dir.path(), &["enumerate", "--n", "5", "--R", "3"]).status.code(), Some(2));
    assert_eq!(heptasaw(dir.path(), &["experiment", "--exact-max", "0"]).status.code(), Some(2));
    assert_eq!(heptasaw(dir.path(), &["frobnicate"]).status.code(), Some(2));
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "[verify]\nflavour = 1\n").unwrap();
    assert_eq!(heptasaw(dir.path(), &["--config", bad.to_str().unwrap(), "verify"]).status.code(), Some(2));
}

#[test]
fn experiment_and_render_reproduce() {
    let args = [
        "experiment", "--exact-max", "5", "--hull-exact-max", "4", "--pivot-n", "8,12,16", "--hull-n", "10",
        "--samples", "800", "--chains", "4", "--burn-in", "500", "--thin", "2", "--seed", "5",
    ];
    let render = ["render", "--n", "6", "--mirror", "2", "--seed", "9"];
    let mut outputs = Vec::new();
    for workers in ["1", "4"] {
        let dir = tempfile::tempdir().unwrap();
        let code = heptasaw(dir.path(), &[&["--workers", workers], &args[..]].concat()).status.code();
        assert!(matches!(code, Some(0 | 1)));
        assert!(heptasaw(dir.path(), &[&["--workers", workers], &render[..]].concat()).status.success());
        outputs.push(
            ["experiment.csv", "experiment.json", "walk_n6_seed9.svg"].map(|f| fs::read(dir.path().join(f)).unwrap()),
        );
    }
    assert_eq!(outputs[0], outputs[1]);
    let svg = String::from_utf8(outputs[0][2].clone()).unwrap();
    assert!(svg.starts_with("<!-- provenance:") && svg.contains("<svg"));
}
