use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use perforate::manifest::Manifest;

fn perforate(root: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_perforate"))
        .env("PERFORATE_OUTPUT_ROOT", root)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

const SMALL: &str = r#"{
  "version": 1,
  "seed": 11,
  "output_dir": "small",
  "studies": ["sample", "thin", "percolate", "conductivity", "stats", "pde"],
  "process": {"intensity": 1.0, "dim": 2, "window": [[0, 0], [12, 12]]},
  "geometry": {"r": 0.3, "r_c": 0.6},
  "thinning": {"levels": [2, 5]},
  "lattice": {"n": 12, "crossing": {"ns": [8], "c1": 0.05, "replicas": 10}, "decay": {"n": 16, "replicas": 40, "m_max": 6}},
  "conductivity": {"n": 8, "s": 2, "filled": true, "compare_filled": true, "channel_bound": true},
  "stats": {"window": [[0, 0], [16, 16]], "replicas": 4, "levels": [2, 4]},
  "pde": {"q": [[0, 0], [1, 1]], "t_final": 0.03, "dt": 0.01, "cells_per_unit": 16, "level": 5, "eps": [0.25, 0.125],
          "coefficients": {"replicas": 2, "window_side": 20, "n": 8, "s": 2}}
}"#;

#[test]
fn one_shot_commands_chain() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let rep = ok(&perforate(
        root,
        &["sample", "--lambda", "1", "--r", "0.3", "--window", "-1,-1,9,9", "--seed", "3", "--out", "x.json"],
    ));
    assert_eq!(rep["equidistance_violations"], 0);
    let cloud = root.join("x.json");
    let thinned = ok(&perforate(
        root,
        &["thin", "--cloud", cloud.to_str().unwrap(), "--r", "0.3", "--n", "5", "--out", "x5.json"],
    ));
    assert!(thinned["kept"].as_u64().unwrap() <= thinned["points"].as_u64().unwrap());
    let counts = ok(&perforate(
        root,
        &[
            "percolate", "--cloud", cloud.to_str().unwrap(), "--r", "0.3", "--k-scale", "2", "--n", "12", "--out",
            "channels.json", "--pbm", "field.pbm", "--svg", "field.svg",
        ],
    ));
    assert_eq!(counts["N"], counts["L"]);
    assert!(fs::read_to_string(root.join("field.pbm")).unwrap().starts_with("P1"));
    assert!(fs::read_to_string(root.join("field.svg")).unwrap().contains("<svg"));
}

#[test]
fn study_run_is_reproducible_and_verifiable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.json");
    fs::write(&cfg, SMALL).unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for root in [&a, &b] {
        let out = perforate(root, &["study", "run", cfg.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let ma = Manifest::load(&a.join("small/manifest.json")).unwrap();
    let mb = Manifest::load(&b.join("small/manifest.json")).unwrap();
    let hashes = |m: &Manifest| m.files.iter().map(|f| (f.path.clone(), f.sha256.clone())).collect::<Vec<_>>();
    assert_eq!(hashes(&ma), hashes(&mb));
    for needle in ["cloud.json", "field.pbm", "report.json", "convergence_plain.csv", ".svg"] {
        assert!(ma.files.iter().any(|f| f.path.contains(needle)), "{needle} missing");
    }
    ma.verify(&a.join("small")).unwrap();

    // Rendering a selector adds an SVG to the manifest.
    let manifest = a.join("small/manifest.json");
    let out = perforate(&a, &["render", manifest.to_str().unwrap(), "thin"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(Manifest::load(&manifest).unwrap().files.iter().any(|f| f.path.starts_with("render/")));
    let out = perforate(&a, &["render", manifest.to_str().unwrap(), "no-such-artifact"]);
    assert_eq!(out.status.code(), Some(2));

    // Deleting any emitted file is detected.
    let victim = &ma.files[0].path;
    fs::remove_file(a.join("small").join(victim)).unwrap();
    assert!(Manifest::load(&manifest).unwrap().verify(&a.join("small")).is_err());
}

#[test]
fn invalid_configs_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("unknown.json", SMALL.replace("\"seed\": 11", "\"seed\": 11, \"colour\": 1")),
        ("version.json", SMALL.replace("\"version\": 1", "\"version\": 9")),
        ("radius.json", SMALL.replace("\"r\": 0.3", "\"r\": -1")),
    ];
    for (name, body) in cases {
        let path = dir.path().join(name);
        fs::write(&path, body).unwrap();
        let out = perforate(dir.path(), &["study", "run", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let out = perforate(dir.path(), &["study", "run", dir.path().join("absent.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn minimal_config_writes_cloud_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("min.json");
    fs::write(&cfg, r#"{"version": 1, "seed": 1, "studies": ["sample"], "output_dir": "min"}"#).unwrap();
    let out = perforate(dir.path(), &["study", "run", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let m = Manifest::load(&dir.path().join("min/manifest.json")).unwrap();
    assert!(m.files.iter().any(|f| f.path.ends_with("cloud.json")));
}

#[test]
fn readme_config_example_parses() {
    let readme = include_str!("../../../README.md");
    let start = readme.find("```json\n").expect("json block") + "```json\n".len();
    let body = &readme[start..start + readme[start..].find("```").unwrap()];
    let cfg = perforate::config::ScenarioConfig::from_json(body.as_bytes()).unwrap();
    assert_eq!(cfg.studies.len(), 6);
}
