use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nsplit::codec::split_file;
use nsplit::SchemeParams;

fn nsplit(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nsplit"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("run nsplit")
}

fn sample(len: usize) -> Vec<u8> {
    (0..len).map(|i| (i * 31 % 251) as u8).collect()
}

fn module(dir: &Path, name: &str, pos: u32) -> PathBuf {
    dir.join(format!("{name}.mod{pos:03}"))
}

#[test]
fn single_module_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("f"), b"one module holds everything").unwrap();
    assert!(nsplit(&["split", "--n", "1", "--m", "1", "f"], dir.path())
        .status
        .success());
    let out = nsplit(&["join", "--out", "g", "f.mod001"], dir.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(
        fs::read(dir.path().join("g")).unwrap(),
        b"one module holds everything"
    );
}

#[test]
fn any_two_deleted_of_five_three() {
    let dir = tempfile::tempdir().unwrap();
    let data = sample(1234);
    fs::write(dir.path().join("f"), &data).unwrap();
    let out = nsplit(&["split", "--n", "5", "--m", "3", "f"], dir.path());
    assert!(out.status.success());
    let summary = String::from_utf8(out.stdout).unwrap();
    assert!(summary.contains("R=5 K=3 Z=3"), "{summary}");

    for a in 1..=5 {
        for b in a + 1..=5 {
            let kept: Vec<String> = (1..=5)
                .filter(|&p| p != a && p != b)
                .map(|p| module(dir.path(), "f", p).display().to_string())
                .collect();
            let target = dir.path().join(format!("g{a}{b}"));
            let mut args = vec!["join", "--out", target.to_str().unwrap()];
            args.extend(kept.iter().map(String::as_str));
            let out = nsplit(&args, dir.path());
            assert!(out.status.success(), "deleted {a},{b}");
            assert_eq!(fs::read(&target).unwrap(), data);
        }
    }
}

#[test]
fn cli_modules_match_library() {
    let dir = tempfile::tempdir().unwrap();
    let data = sample(777);
    fs::write(dir.path().join("f"), &data).unwrap();
    assert!(nsplit(
        &["split", "--n", "7", "--m", "4", "--optimized", "f"],
        dir.path()
    )
    .status
    .success());
    let lib = split_file(&data, SchemeParams::new(7, 4).unwrap(), true).unwrap();
    for (i, expected) in lib.iter().enumerate() {
        assert_eq!(
            &fs::read(module(dir.path(), "f", i as u32 + 1)).unwrap(),
            expected
        );
    }
}

#[test]
fn join_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("f"), sample(100)).unwrap();
    fs::write(dir.path().join("h"), sample(101)).unwrap();
    assert!(nsplit(&["split", "--n", "5", "--m", "3", "f"], dir.path())
        .status
        .success());
    assert!(nsplit(&["split", "--n", "5", "--m", "3", "h"], dir.path())
        .status
        .success());

    let out = nsplit(&["join", "--out", "x", "f.mod001", "f.mod002"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing element ids: 5"));

    let out = nsplit(
        &["join", "--out", "x", "f.mod001", "h.mod002", "f.mod003"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(5));

    let mut damaged = fs::read(dir.path().join("f.mod002")).unwrap();
    // byte inside element 3, which module 1 does not hold
    damaged[24 + 25] ^= 1;
    fs::write(dir.path().join("f.mod002"), damaged).unwrap();
    let out = nsplit(
        &["join", "--out", "x", "f.mod001", "f.mod002", "f.mod003"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(4));

    fs::write(dir.path().join("junk"), b"not a module").unwrap();
    let out = nsplit(&["join", "--out", "x", "junk"], dir.path());
    assert_eq!(out.status.code(), Some(6));

    let out = nsplit(
        &["join", "--out", "f", "f.mod001", "f.mod003", "f.mod004"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(7));
    let out = nsplit(&["join", "--out", "x"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn split_refuses_to_overwrite() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("f"), b"abc").unwrap();
    assert!(nsplit(&["split", "--n", "3", "--m", "2", "f"], dir.path())
        .status
        .success());
    let out = nsplit(&["split", "--n", "3", "--m", "2", "f"], dir.path());
    assert_eq!(out.status.code(), Some(7));
    let out = nsplit(
        &["split", "--n", "3", "--m", "2", "--force", "f"],
        dir.path(),
    );
    assert!(out.status.success());
}

#[test]
fn inspect_json_keys() {
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/valid_5_3_pos1.mod");
    let out = nsplit(
        &["inspect", "--json", fixture.to_str().unwrap()],
        Path::new("."),
    );
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let mut keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
    keys.sort();
    assert_eq!(
        keys,
        [
            "checksum",
            "elements",
            "flags",
            "m",
            "magic",
            "n",
            "optimized",
            "original_length",
            "payload_length",
            "position",
            "version"
        ]
    );
    assert_eq!(v["elements"], serde_json::json!([1, 2, 4]));
    assert_eq!(v["checksum"], "321e6d05");

    let bad = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/bad_magic.mod");
    let out = nsplit(&["inspect", bad.to_str().unwrap()], Path::new("."));
    assert_eq!(out.status.code(), Some(6));
}

#[test]
fn analyze_and_simulate_json() {
    let out = nsplit(
        &["analyze", "--n", "6", "--m", "4", "--p", "0.9", "--json"],
        Path::new("."),
    );
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["R"], 2);
    assert_eq!(v["ml"], "1/2");
    assert_eq!(v["base"], serde_json::json!({"n": 2, "m": 2}));
    assert_eq!(v["is_base"], false);
    assert_eq!(v["family"][1], serde_json::json!({"n": 4, "m": 3}));
    assert_eq!(v["pr2_percent"], "50");
    assert!(v["reliability"]["exact_threshold"].as_f64().unwrap() > 0.98);

    let out = nsplit(
        &[
            "simulate", "--n", "5", "--m", "3", "--p", "0.8", "--trials", "1000", "--seed", "5",
            "--json",
        ],
        Path::new("."),
    );
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["trials"], 1000);
    assert_eq!(v["seed"], 5);
    assert!(v["mc_coverage"]["estimate"].as_f64() >= v["mc_threshold"]["estimate"].as_f64());
}
