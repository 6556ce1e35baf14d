use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn qrbm(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qrbm"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = qrbm(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

/// Drops the trailing wall-clock field of per-epoch lines.
fn without_times(stdout: &str) -> String {
    stdout
        .lines()
        .map(|l| match l.find("  time ") {
            Some(i) => &l[..i],
            None => l,
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn small_fixture(dir: &Path) {
    ok(dir, &["fixture", "--out", "fx.txt", "--records", "400"]);
}

#[test]
fn fixture_is_reproducible() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["fixture", "--out", "a.txt", "--records", "300"]);
    ok(dir.path(), &["fixture", "--out", "b.txt", "--records", "300"]);
    let a = fs::read(dir.path().join("a.txt")).unwrap();
    assert_eq!(a, fs::read(dir.path().join("b.txt")).unwrap());
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 300);
}

#[test]
fn training_is_deterministic_across_thread_counts() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    small_fixture(d);
    for sampler in ["cd", "annealer"] {
        let base = [
            "train",
            "--data",
            "fx.txt",
            "--hidden",
            "8",
            "--epochs",
            "2",
            "--seed",
            "7",
            "--sampler",
            sampler,
        ];
        let one = ok(d, &[&base[..], &["--out", "m1.txt", "--threads", "1"]].concat());
        let two = ok(d, &[&base[..], &["--out", "m2.txt", "--threads", "2"]].concat());
        assert_eq!(
            without_times(&one).replace("m1.txt", "m.txt"),
            without_times(&two).replace("m2.txt", "m.txt")
        );
        assert_eq!(
            fs::read(d.join("m1.txt")).unwrap(),
            fs::read(d.join("m2.txt")).unwrap(),
            "{sampler}"
        );
    }
}

#[test]
fn generation_is_deterministic_and_well_formed() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    small_fixture(d);
    ok(
        d,
        &[
            "train", "--data", "fx.txt", "--hidden", "8", "--epochs", "2", "--out", "m.txt",
        ],
    );
    for method in ["gibbs", "annealer"] {
        let args = [
            "generate", "--model", "m.txt", "--count", "25", "--method", method, "--seed", "3",
        ];
        let a = ok(d, &[&args[..], &["--threads", "1"]].concat());
        let b = ok(d, &[&args[..], &["--threads", "3"]].concat());
        assert_eq!(a, b, "{method}");
        let rows: Vec<&str> = a.lines().collect();
        assert_eq!(rows.len(), 25);
        for row in rows {
            assert_eq!(row.split(',').count(), 64);
            assert!(row.split(',').all(|x| x == "0" || x == "1"));
        }
    }
    let c = ok(d, &["generate", "--model", "m.txt", "--count", "25", "--seed", "4"]);
    let a = ok(d, &["generate", "--model", "m.txt", "--count", "25", "--seed", "3"]);
    assert_ne!(a, c);
}

#[test]
fn evaluate_reports_both_classes() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    small_fixture(d);
    ok(
        d,
        &[
            "train", "--data", "fx.txt", "--hidden", "8", "--epochs", "3", "--out", "m.txt",
        ],
    );
    for mode in ["free-energy", "reconstruction"] {
        let out = ok(d, &["evaluate", "--model", "m.txt", "--data", "fx.txt", "--mode", mode]);
        assert!(out.contains("accuracy "));
        assert!(out.lines().any(|l| l.starts_with("attack ")));
        assert!(out.lines().any(|l| l.starts_with("benign ")));
        assert!(out.contains("TP="));
    }
}

#[test]
fn exit_codes_distinguish_failure_kinds() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    small_fixture(d);
    let code = |args: &[&str]| qrbm(d, args).status.code();

    assert_eq!(
        code(&["train", "--data", "fx.txt", "--out", "m.txt", "--lr", "0"]),
        Some(2)
    );
    assert_eq!(
        code(&["train", "--data", "fx.txt", "--out", "m.txt", "--hidden", "0"]),
        Some(2)
    );
    assert_eq!(
        code(&["train", "--data", "fx.txt", "--out", "m.txt", "--sampler", "bogus"]),
        Some(2)
    );
    assert_eq!(code(&["nonsense"]), Some(2));

    assert_eq!(code(&["train", "--data", "absent.txt", "--out", "m.txt"]), Some(3));
    fs::write(d.join("bad.txt"), "1,0,1\n1,2,0\n").unwrap();
    assert_eq!(code(&["train", "--data", "bad.txt", "--out", "m.txt"]), Some(3));
    fs::write(d.join("ragged.txt"), "1,0,1\n1,0\n").unwrap();
    assert_eq!(code(&["train", "--data", "ragged.txt", "--out", "m.txt"]), Some(3));
    fs::write(d.join("model.txt"), "not a model\n").unwrap();
    assert_eq!(code(&["generate", "--model", "model.txt", "--count", "2"]), Some(3));
    assert_eq!(
        code(&["scheme1", "--data", "fx.txt", "--test-per-class", "5000"]),
        Some(3)
    );

    fs::write(d.join("tiny.txt"), "1,0,1,0\n0,1,0,1\n1,1,1,0\n").unwrap();
    let diverge = qrbm(
        d,
        &[
            "train",
            "--data",
            "tiny.txt",
            "--hidden",
            "2",
            "--sampler",
            "exact",
            "--lr",
            "1.7e308",
            "--epochs",
            "50",
            "--out",
            "m.txt",
        ],
    );
    assert_eq!(diverge.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&diverge.stderr).contains("diverged"));
}

#[test]
fn scheme1_prints_table_and_csv() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let args = [
        "scheme1",
        "--epochs",
        "2",
        "--hidden",
        "8",
        "--parts",
        "3",
        "--test-per-class",
        "50",
        "--csv",
        "s1.csv",
    ];
    let a = ok(d, &args);
    let csv = fs::read_to_string(d.join("s1.csv")).unwrap();
    assert!(a.contains("Majority Vote"));
    assert_eq!(csv.lines().count(), 1 + 3 + 3);
    assert!(csv.starts_with("row,records,benign_accuracy,attack_accuracy,total_accuracy"));
    assert_eq!(a, ok(d, &args));
    assert_eq!(csv, fs::read_to_string(d.join("s1.csv")).unwrap());
}

#[test]
fn scheme2_prints_every_requested_row() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let out = ok(
        d,
        &[
            "scheme2",
            "--epochs",
            "2",
            "--hidden",
            "8",
            "--classifiers",
            "knn,nb",
            "--variants",
            "cd",
            "--gen-batch",
            "300",
            "--max-rounds",
            "2",
            "--test-per-class",
            "50",
            "--csv",
            "s2.csv",
            "--generation-csv",
            "gen.csv",
        ],
    );
    assert!(out.contains("only records labelled with the minority class are kept"));
    let csv = fs::read_to_string(d.join("s2.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    for prefix in ["knn,CD-bal,", "knn,imbal,", "nb,CD-bal,", "nb,imbal,"] {
        assert!(rows.iter().any(|r| r.starts_with(prefix)), "{prefix}");
    }
    assert_eq!(fs::read_to_string(d.join("gen.csv")).unwrap().lines().count(), 2);
}
