use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn run(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dirac-trace"))
        .args(args)
        .current_dir(cwd)
        .env_remove("DIRAC_TRACE_CACHE")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn digest(path: &Path) -> Vec<u8> {
    Sha256::digest(fs::read(path).unwrap()).to_vec()
}

#[test]
fn group_verify_bolza() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["group-verify", "--json"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["passed"], true);
    let area = v["summary"].as_array().unwrap().iter().find(|p| p[0] == "area").unwrap()[1].as_str().unwrap().to_string();
    assert!((area.parse::<f64>().unwrap() - 4.0 * std::f64::consts::PI).abs() < 1e-11);
}

#[test]
fn corrupted_generator_names_the_check() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(root().join("configs/bolza.presentation")).unwrap();
    // perturb generator 1 so that the relator no longer closes
    let bad = text.replacen("0.00000000000000000e0 0.00000000000000000e0", "1.0e-3 0.00000000000000000e0", 1);
    assert_ne!(bad, text);
    let path = dir.path().join("bad.presentation");
    fs::write(&path, bad).unwrap();
    let o = run(&["group-verify", "--set", &format!("group.source={}", path.display())], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("FAIL  group/presentation"), "{out}");
    assert!(out.contains("relator"), "{out}");
}

#[test]
fn example_configs_resolve() {
    let mut n = 0;
    for e in fs::read_dir(root().join("configs")).unwrap() {
        let p = e.unwrap().path();
        if p.extension().map_or(true, |x| x != "cfg") {
            continue;
        }
        let o = run(&["group-verify", "--config", p.to_str().unwrap(), "--set", "cache.dir=", "--set", "output.dir="], &root());
        assert_eq!(o.status.code(), Some(0), "{}: {}{}", p.display(), stdout(&o), stderr(&o));
        n += 1;
    }
    assert_eq!(n, 6);
}

#[test]
fn geodesics_are_cached_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["geodesics", "--set", "cutoffs.length=8", "--set", "cache.dir=c", "--set", "output.dir=o"];
    let first = run(&args, dir.path());
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    assert!(stdout(&first).contains("(written)"));
    let cached: Vec<PathBuf> = fs::read_dir(dir.path().join("c")).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(cached.len(), 1);
    let h1 = digest(&cached[0]);
    let second = run(&args, dir.path());
    assert!(stdout(&second).contains("(hit)"));
    assert_eq!(digest(&cached[0]), h1);
    // same config and same cache state give the same report bytes
    let r2 = digest(&dir.path().join("o/geodesics.json"));
    let third = run(&args, dir.path());
    assert_eq!(second.stdout, third.stdout);
    assert_eq!(digest(&dir.path().join("o/geodesics.json")), r2);
}

#[test]
fn cache_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_dirac-trace"))
        .args(["geodesics", "--set", "cutoffs.length=5"])
        .current_dir(dir.path())
        .env("DIRAC_TRACE_CACHE", dir.path().join("env-cache"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read_dir(dir.path().join("env-cache")).unwrap().count(), 1);
}

#[test]
fn brute_and_pruned_summaries_agree() {
    let dir = tempfile::tempdir().unwrap();
    let summary = |m: &str| {
        let o = run(&["geodesics", "--set", "cutoffs.length=6", "--set", &format!("group.method={m}")], dir.path());
        assert_eq!(o.status.code(), Some(0));
        let keep = ["records", "classes", "primitive classes", "systole", "growth"];
        stdout(&o)
            .lines()
            .filter(|l| keep.iter().any(|k| l.trim_start().starts_with(k)))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let brute = summary("brute");
    assert_eq!(brute.lines().count(), 5);
    assert_eq!(brute, summary("pruned"));
}

#[test]
fn empty_spectrum_warns() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["geodesics", "--set", "cutoffs.length=0.5"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("spectrum is empty"));
}

#[test]
fn trace_with_resolvent_reports_residuals() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["trace", "--set", "testfn.family=resolvent", "--set", "cutoffs.length=9"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("PASS  traceformula/geometric_vs_zeta"), "{out}");
    assert!(out.contains("PASS  traceformula/identity_vs_digamma"), "{out}");
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["trace", "--json", "--set", "cutoffs.length=8", "--set", "testfn.t=0.3"];
    assert_eq!(run(&args, dir.path()).stdout, run(&args, dir.path()).stdout);
}

#[test]
fn scan_asks_to_raise_l() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["scan", "--set", "cutoffs.length=6", "--set", "cutoffs.delta_length=1", "--set", "tolerances.scan_tail=0.5"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("raise L") && err.contains("tail bound"), "{err}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| run(args, dir.path()).status.code();
    assert_eq!(code(&["trace", "--set", "cutoffs.lenght=3"]), Some(2));
    assert_eq!(code(&["trace", "--set", "tolerances.tail=2"]), Some(2));
    assert_eq!(code(&["zeta", "--set", "cutoffs.length=5", "--set", "zeta.eigenvalues=/dev/null"]), Some(2));
    assert_eq!(code(&["geodesics", "--set", "group.budget=1000"]), Some(3));
    assert_eq!(code(&["zeta", "--set", "cutoffs.length=5", "--set", "zeta.re=1.0"]), Some(1));
}

#[test]
fn zeta_product_with_planted_list() {
    let dir = tempfile::tempdir().unwrap();
    let list = root().join("configs/planted.eigenvalues");
    let o = run(
        &[
            "zeta",
            "--set",
            "cutoffs.length=6",
            "--set",
            &format!("zeta.eigenvalues={}", list.display()),
            "--set",
            "zeta.zero_modes=0",
            "--set",
            "zeta.gamma_d=0",
            "--set",
            "zeta.leading=1",
            "--set",
            "output.dir=o",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("o/zeta.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap().split(',').count(), 8);
    assert_eq!(lines.count(), 6);
}

#[test]
fn verify_all_passes_on_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["verify-all"], dir.path());
    let out = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{out}{}", stderr(&o));
    assert!(out.contains("PASS  geodesics/brute_vs_pruned"), "{out}");
    assert!(out.contains(", 0 failed"), "{out}");
}
