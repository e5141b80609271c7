use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn formdepth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_formdepth"))
        .args(args)
        .env_remove("FORMDEPTH_PRIME")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn report(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    text.lines()
        .rev()
        .find_map(|line| serde_json::from_str(line).ok())
        .unwrap_or_else(|| panic!("no report in {text:?}"))
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generates_the_size_36_instance() {
    let out = formdepth(&["gen-hard", "--k", "2", "--r", "3"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["size"], 36);
    assert_eq!(r["depth"], 4);
    assert!(String::from_utf8(out.stdout).unwrap().trim_end().ends_with(')'));
}

#[test]
fn reduce_writes_a_verified_formula() {
    let dir = TempDir::new().unwrap();
    let m = dir.path().join("m.fm");
    assert_eq!(code(&formdepth(&["gen-hard", "--k", "2", "--r", "2", "-o", s(&m)])), 0);
    let reduced = dir.path().join("r.fm");
    let out = formdepth(&["reduce", s(&m), "--method", "main", "-o", s(&reduced)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["verification"]["verdict"], "equal");
    assert!(r["potential"].is_u64());
    let eq = formdepth(&["verify-equal", s(&m), s(&reduced)]);
    assert_eq!(code(&eq), 0);
    assert_eq!(code(&formdepth(&["check-hard", "--k", "2", "--r", "2", s(&reduced)])), 0);
}

#[test]
fn every_method_runs() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "f.fm", "(+ (* x1 (+ x2 (* x3 x4))) (* x5 x6))");
    for method in ["bb", "main", "nearlinear", "homogeneous"] {
        let out = formdepth(&["reduce", s(&f), "--method", method]);
        assert_eq!(code(&out), 0, "{method}: {}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(code(&formdepth(&["prodfanin2", s(&f)])), 0);
    let out = formdepth(&["homogenize", s(&f), "--degree", "2"]);
    assert_eq!(code(&out), 0);
    let comp = write(&dir, "c.fm", &String::from_utf8(out.stdout).unwrap());
    let want = write(&dir, "w.fm", "(+ (* x1 x2) (* x5 x6))");
    assert_eq!(code(&formdepth(&["verify-equal", s(&comp), s(&want)])), 0);
    let zero = formdepth(&["homogenize", s(&f), "--degree", "5"]);
    assert_eq!(code(&zero), 0);
    assert_eq!(report(&zero)["zero"], true);
}

#[test]
fn unequal_formulas_exit_1() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.fm", "(* x1 (+ x2 x3))");
    let b = write(&dir, "b.fm", "(+ (* x1 x2) (* x1 x3))");
    let c = write(&dir, "c.fm", "(+ (* x1 x2) x3)");
    assert_eq!(code(&formdepth(&["verify-equal", s(&a), s(&b)])), 0);
    let out = formdepth(&["verify-equal", s(&a), s(&c)]);
    assert_eq!(code(&out), 1);
    assert_eq!(report(&out)["verdict"], "unequal");
    let pit = formdepth(&["verify-equal", s(&a), s(&c), "--method", "pit"]);
    assert_eq!(code(&pit), 1);
}

#[test]
fn malformed_input_exits_2() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.fm", "(* 1 x1)");
    assert_eq!(code(&formdepth(&["validate", s(&bad)])), 2);
    let broken = write(&dir, "broken.fm", "(+ x1");
    let out = formdepth(&["stats", s(&broken)]);
    assert_eq!(code(&out), 2);
    assert!(!out.stderr.is_empty());
    assert_eq!(code(&formdepth(&["reduce", s(&bad), "--method", "fold"])), 2);
    assert_eq!(code(&formdepth(&["gen-hard", "--k", "0", "--r", "2"])), 2);
    assert_eq!(code(&formdepth(&["no-such-command"])), 2);
    let mixed = write(&dir, "mixed.fm", "(* (+ x1 1) (+ (* x2 x3) x4))");
    assert_eq!(code(&formdepth(&["reduce", s(&mixed), "--method", "pipeline"])), 2);
}

#[test]
fn budget_overflow_exits_3() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "f.fm", "(* (+ x1 x2) (+ x3 x4) (+ x5 x6))");
    assert_eq!(code(&formdepth(&["expand", s(&f)])), 0);
    assert_eq!(code(&formdepth(&["--budget", "3", "expand", s(&f)])), 3);
}

#[test]
fn prime_comes_from_the_environment() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "f.fm", "field: Fp\n(+ x1 x2)");
    let out = Command::new(env!("CARGO_BIN_EXE_formdepth"))
        .args(["stats", s(&f)])
        .env("FORMDEPTH_PRIME", "7")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert_eq!(report(&out)["field"], "Fp:7");
    let out = formdepth(&["--prime", "11", "stats", s(&f)]);
    assert_eq!(report(&out)["field"], "Fp:11");
}

#[test]
fn bench_without_timing_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let run = |name: &str| {
        let csv = dir.path().join(name);
        let out = formdepth(&[
            "--seed", "4", "bench", "--family", "random-homogeneous:6:4:40", "--family", "hard:1:3", "--pass", "main",
            "--pass", "bb:1", "--repetitions", "3", "--no-timing", "--csv", s(&csv),
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        assert!(report(&out)["constants"]["c_depth"].is_number());
        fs::read(csv).unwrap()
    };
    let first = run("a.csv");
    assert_eq!(first, run("b.csv"));
    assert_eq!(String::from_utf8(first).unwrap().lines().count(), 13);
}

#[test]
fn reports_append_to_a_file() {
    let dir = TempDir::new().unwrap();
    let log = dir.path().join("log.jsonl");
    for _ in 0..2 {
        let out = formdepth(&["--report", s(&log), "gen-hard", "--k", "1", "--r", "2"]);
        assert_eq!(code(&out), 0);
        assert!(out.stderr.is_empty());
    }
    let text = fs::read_to_string(&log).unwrap();
    assert_eq!(text.lines().count(), 2);
    for line in text.lines() {
        assert_eq!(serde_json::from_str::<Value>(line).unwrap()["pass"], "gen-hard");
    }
}

#[test]
fn human_reports_span_lines() {
    let out = formdepth(&["--human", "gen-hard", "--k", "1", "--r", "2"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8(out.stderr).unwrap().lines().count() > 1);
}
