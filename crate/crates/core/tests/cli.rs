//! End-to-end runs of the `orbitkit` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use orbitkit::io::{MatrixFile, Meta};
use orbitkit::linalg::{CMatrix, OrthProjection, C64};
use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> (i32, Value, Output) {
    let out = Command::new(env!("CARGO_BIN_EXE_orbitkit"))
        .arg("--no-timing")
        .args(args)
        .env_remove("ORBITKIT_TOL_FILE")
        .output()
        .expect("binary runs");
    let line = String::from_utf8_lossy(&out.stdout).to_string();
    let report = serde_json::from_str(line.trim()).unwrap_or(Value::Null);
    (out.status.code().unwrap_or(-1), report, out)
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write_projection(dir: &TempDir, name: &str, cols: &[Vec<C64>]) -> PathBuf {
    let proj = OrthProjection::from_orthonormal(cols[0].len(), cols);
    let path = dir.path().join(name);
    MatrixFile::projection(&proj, Meta::new()).save(&path).unwrap();
    path
}

fn basis(d: usize, k: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); d];
    v[k] = C64::new(1.0, 0.0);
    v
}

#[test]
fn distance_of_identical_lines_is_zero() {
    let dir = TempDir::new().unwrap();
    let s = 0.5f64.sqrt();
    let v = vec![C64::new(s, 0.0), C64::new(0.0, s), C64::new(0.0, 0.0)];
    let a = write_projection(&dir, "a.json", std::slice::from_ref(&v));
    let b = write_projection(&dir, "b.json", &[v]);
    let (code, r, _) = run(&["distance", p(&a), p(&b)]);
    assert_eq!(code, 0);
    assert_eq!(r["status"], "ok");
    assert!(r["outputs"]["geodesic"].as_f64().unwrap().abs() <= 1e-12);
    assert!(r["outputs"]["trace_dist"].as_f64().unwrap().abs() <= 1e-12);
    assert_eq!(r["inputs"][0], r["inputs"][1]);
}

#[test]
fn generated_orbit_pair_is_intertwined() {
    let dir = TempDir::new().unwrap();
    let prefix = dir.path().join("orbit");
    let (code, _, _) = run(&[
        "gen", "orbit-pair", "--dim", "6", "--spectrum", "0.5:2,-0.25:1", "--perturb", "0.01", "--seed", "3",
        "--out", p(&prefix),
    ]);
    assert_eq!(code, 0);
    let rho = dir.path().join("orbit_rho.json");
    let rho_prime = dir.path().join("orbit_rho_prime.json");
    let u = dir.path().join("v.json");
    let (code, r, _) = run(&["intertwine", p(&rho), p(&rho_prime), "--eps", "0.4", "--out", p(&u)]);
    assert_eq!(code, 0, "{r}");
    assert_eq!(r["outputs"]["bound_ok"], true);
    assert!(r["outputs"]["conjugation_residual"].as_f64().unwrap() <= 1e-9);
    assert!(r["outputs"]["op_norm_dev"].as_f64().unwrap() <= 0.4);
    let v = MatrixFile::load(&u, &orbitkit::Tolerances::default()).unwrap();
    assert_eq!(v.dim, 6);
}

#[test]
fn same_orbit_on_generated_pair() {
    let dir = TempDir::new().unwrap();
    let prefix = dir.path().join("o");
    run(&["gen", "orbit-pair", "--dim", "5", "--spectrum", "0.3:1,0.1:2", "--perturb", "0.5", "--out", p(&prefix)]);
    let (code, r, _) = run(&[
        "same-orbit",
        p(&dir.path().join("o_rho.json")),
        p(&dir.path().join("o_rho_prime.json")),
    ]);
    assert_eq!(code, 0);
    assert_eq!(r["outputs"]["same"], true);
    assert_eq!(r["outputs"]["anomaly"], false);
}

#[test]
fn orthogonal_lines_violate_the_hypothesis() {
    let dir = TempDir::new().unwrap();
    let e = write_projection(&dir, "e.json", &[basis(3, 0)]);
    let f = write_projection(&dir, "f.json", &[basis(3, 1)]);
    let (code, r, _) = run(&["intertwine-proj", p(&e), p(&f), "--eps", "0.5"]);
    assert_eq!(code, 2);
    assert_ne!(r["status"], "ok");
    assert!(r["outputs"]["error"].is_string());
}

#[test]
fn close_lines_get_a_unitary() {
    let dir = TempDir::new().unwrap();
    let (c, s) = (0.05f64.cos(), 0.05f64.sin());
    let e = write_projection(&dir, "e.json", &[basis(3, 0)]);
    let f = write_projection(&dir, "f.json", &[vec![C64::new(c, 0.0), C64::new(s, 0.0), C64::new(0.0, 0.0)]]);
    let (code, r, _) = run(&["intertwine-proj", p(&e), p(&f), "--eps", "0.5"]);
    assert_eq!(code, 0, "{r}");
    assert!(r["outputs"]["conjugation_residual"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn example_generator_feeds_affiliate() {
    let dir = TempDir::new().unwrap();
    let prefix = dir.path().join("ex");
    let (code, r, _) = run(&["gen", "example", "--alpha", "0.8,-0.6", "--dim", "6", "--out", p(&prefix)]);
    assert_eq!(code, 0, "{r}");
    let (code, r, _) = run(&[
        "affiliate",
        p(&dir.path().join("ex_E.json")),
        p(&dir.path().join("ex_F.json")),
    ]);
    assert_eq!(code, 0, "{r}");
    let mut efe: Vec<f64> = r["outputs"]["efe_eigenvalues"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    efe.sort_by(f64::total_cmp);
    assert!((efe[0] - 0.36).abs() < 1e-12 && (efe[1] - 0.64).abs() < 1e-12);
}

#[test]
fn malformed_json_exits_four() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"dim\": 2, \"kind\": \"hermitian\", \"entries\": [[1.0, 0.0],").unwrap();
    let (code, r, _) = run(&["decompose", p(&bad)]);
    assert_eq!(code, 4);
    let msg = r["outputs"]["error"].as_str().unwrap();
    assert!(msg.contains("line"), "{msg}");
}

#[test]
fn non_idempotent_projection_is_rejected() {
    let dir = TempDir::new().unwrap();
    let mut m = CMatrix::zeros(2);
    m[(0, 0)] = C64::new(1.0 + 1e-3, 0.0);
    let path = dir.path().join("p.json");
    std::fs::write(&path, MatrixFile::new(orbitkit::io::MatrixKind::Projection, &m, Meta::new()).to_json().unwrap())
        .unwrap();
    let q = write_projection(&dir, "q.json", &[basis(2, 0)]);
    let (code, _, _) = run(&["distance", p(&path), p(&q)]);
    assert_eq!(code, 4);
}

#[test]
fn usage_errors_exit_four_and_help_exits_zero() {
    let (code, _, _) = run(&["intertwine"]);
    assert_eq!(code, 4);
    let (code, _, _) = run(&["--help"]);
    assert_eq!(code, 0);
}

#[test]
fn tolerance_file_overrides_defaults() {
    let dir = TempDir::new().unwrap();
    let tol = dir.path().join("tol.json");
    std::fs::write(&tol, "{\"cluster_tol\": 0.25}").unwrap();
    let mut m = CMatrix::zeros(4);
    for (k, l) in [10.0, 9.8, 9.6, 9.4].into_iter().enumerate() {
        m[(k, k)] = C64::new(l, 0.0);
    }
    let path = dir.path().join("h.json");
    std::fs::write(&path, MatrixFile::new(orbitkit::io::MatrixKind::Hermitian, &m, Meta::new()).to_json().unwrap())
        .unwrap();
    let default = run(&["decompose", p(&path)]).1;
    assert_eq!(default["outputs"]["eigenvalues"].as_array().unwrap().len(), 4);
    let out = Command::new(env!("CARGO_BIN_EXE_orbitkit"))
        .args(["--no-timing", "decompose", p(&path)])
        .env("ORBITKIT_TOL_FILE", &tol)
        .output()
        .unwrap();
    // A gap of 0.2 under cluster_tol 0.25 chains all four values together.
    assert_eq!(out.status.code(), Some(3));
    let bogus = dir.path().join("bogus.json");
    std::fs::write(&bogus, "{\"no_such_tol\": 1}").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_orbitkit"))
        .args(["decompose", p(&path)])
        .env("ORBITKIT_TOL_FILE", &bogus)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn verify_single_check() {
    let (code, r, _) = run(&["verify", "suite", "--seed", "5", "--count", "20", "--check", "dual_route"]);
    assert_eq!(code, 0, "{r}");
    assert_eq!(r["outputs"]["all_passed"], true);
    assert_eq!(r["outputs"]["checks"].as_array().unwrap().len(), 1);
}
