//! End-to-end runs of the `sturmlab` binary: exit codes, reproducible outputs, config files.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sturmlab")).args(args).output().expect("spawn sturmlab")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn success_exits_zero() {
    let o = run(&["verify", "--family", "roy", "--abc", "2,1,2", "--up-to", "6"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = run(&["spectrum", "--endpoints"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn failed_checks_exit_one() {
    let o = run(&["three-system", "--family", "bl", "--ab", "1,2", "--s1", "1", "--k", "4:8", "--refine", "5", "--delta", "0.5"]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    assert!(stderr(&o).contains("not a 3-system"), "{}", stderr(&o));
    let o = run(&["gray", "--family", "roy", "--abc", "2,1,2", "--program", "prefix=[-1,1];period=[2]", "--i", "5"]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    let o = run(&["exponents", "--family", "roy", "--abc", "2,1,2"]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["verify", "--family", "roy", "--abc", "2,x,2"][..],
        &["verify", "--family", "roy", "--abc", "2,1"][..],
        &["three-system", "--family", "bl", "--ab", "1,2", "--s1", "1", "--k", "9:4"][..],
        &["verify", "--family", "nope"][..],
        &["frobnicate"][..],
    ] {
        let o = run(args);
        assert_eq!(code(&o), 2, "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn io_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("plain");
    std::fs::write(&file, "").unwrap();
    let bad = file.join("out.json");
    let o = run(&["spectrum", "--endpoints", "--json", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    let o = run(&["verify", "--seed-file", dir.path().join("none.cfg").to_str().unwrap()]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

#[test]
fn outputs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let sub = dir.path();
    let mut files = Vec::new();
    for _ in 0..2 {
        let o = run(&[
            "three-system", "--family", "bl", "--ab", "1,2", "--s1", "1", "--k", "4:8", "--refine", "10",
            "--out-dir", sub.to_str().unwrap(), "--json", "sys.json", "--csv", "sys.csv", "--svg", "sys.svg",
        ]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let o = run(&["xi", "--family", "bl", "--ab", "1,2", "--s1", "1", "--digits", "40", "--out-dir", sub.to_str().unwrap(), "--json", "xi.json"]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        files.push(["sys.json", "sys.csv", "sys.svg", "xi.json"].map(|f| std::fs::read(sub.join(f)).unwrap()));
    }
    for (a, b) in files[0].iter().zip(&files[1]) {
        assert!(a == b, "outputs differ between runs");
    }
    let j: Value = serde_json::from_slice(&files[0][0]).unwrap();
    assert_eq!(j["schema"], "sturmlab/1");
    assert_eq!(j["command"], "three-system");
    assert!(String::from_utf8_lossy(&files[0][1]).starts_with("# "));
    assert!(String::from_utf8_lossy(&files[0][2]).contains("<desc>"));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# Roy seed\nfamily = roy\nabc = 2,1,2\nup_to = 5\n").unwrap();
    let out = dir.path().join("v.json");
    let o = run(&["verify", "--seed-file", cfg.to_str().unwrap(), "--up-to", "6", "--json", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let j = read_json(&out);
    let s = &j["config"];
    assert_eq!(s["family"], "roy");
    assert_eq!(s["abc"], "2,1,2");
    assert_eq!(s["up-to"], "6");

    std::fs::write(&cfg, "family = roy\nabc = 2,1,2\nthis line is wrong\n").unwrap();
    let o = run(&["verify", "--seed-file", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
}
