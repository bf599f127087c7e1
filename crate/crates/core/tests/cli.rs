use std::fs;
use std::path::Path;

use clap::Parser;
use hp2_core::cli::{run, Cli, Exit};

fn run_args(args: &[&str]) -> (Exit, String) {
    let cli = Cli::try_parse_from(std::iter::once("hp2").chain(args.iter().copied())).unwrap();
    let mut out = Vec::new();
    let exit = run(&cli, &mut out).unwrap();
    (exit, String::from_utf8(out).unwrap())
}

fn data_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/data"))
}

/// A copy of the shipped fact files with one order fact removed.
fn db_without(order_id: &str) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    for entry in fs::read_dir(data_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("jsonl") {
            continue;
        }
        let mut lines = Vec::new();
        for line in fs::read_to_string(&path).unwrap().lines() {
            let mut doc: serde_json::Value = serde_json::from_str(line).unwrap();
            if let Some(orders) = doc.get_mut("orders").and_then(|o| o.as_array_mut()) {
                orders.retain(|o| o["id"] != order_id);
            }
            lines.push(doc.to_string());
        }
        fs::write(dir.path().join(path.file_name().unwrap()), lines.join("\n") + "\n").unwrap();
    }
    dir
}

#[test]
fn derive_match_exits_zero() {
    let (exit, out) = run_args(&["derive", "--prime", "2", "--r", "11", "--k", "1"]);
    assert_eq!(exit, Exit::Ok);
    assert!(out.starts_with("p=2 r=11 k=1 | match | Z/8 | expected Z/8"), "{out}");
    assert!(out.contains("| π_12(ΣHP^2) |"), "{out}");
}

#[test]
fn missing_fact_exits_two() {
    let (exit, out) = run_args(&["derive", "--prime", "2", "--r", "17", "--k", "2"]);
    assert_eq!((exit, exit.code()), (Exit::Missing, 2));
    assert!(out.contains("π_19(S^6)"), "{out}");
}

#[test]
fn table_mismatch_exits_one() {
    let (exit, out) = run_args(&["table", "--compare"]);
    assert_eq!(exit.code(), 1);
    let differing: Vec<&str> = out.lines().map(str::trim).filter(|l| l.contains("| mismatch |")).collect();
    assert_eq!(differing, ["p=3 r=14 k=1 | mismatch | Z/3 | expected Z/9"]);
}

#[test]
fn dropping_a_fact_makes_the_goal_ambiguous() {
    let db = db_without("o2-r15-k4-lift");
    let dir = db.path().to_str().unwrap();
    let (exit, out) = run_args(&["--db", dir, "derive", "--prime", "2", "--r", "15", "--k", "4"]);
    assert_eq!(exit.code(), 3, "{out}");
    let (exit, _) = run_args(&["--db", dir, "derive", "--prime", "2", "--r", "11", "--k", "1"]);
    assert_eq!(exit, Exit::Ok);
}

#[test]
fn precedence_of_statuses() {
    assert_eq!(Exit::Ambiguous.worst(Exit::Missing), Exit::Missing);
    assert_eq!(Exit::Missing.worst(Exit::Mismatch), Exit::Mismatch);
    assert_eq!(Exit::Mismatch.worst(Exit::Ambiguous), Exit::Mismatch);
    assert_eq!(Exit::Ok.worst(Exit::Ambiguous), Exit::Ambiguous);
}

#[test]
fn trace_dir_gets_one_file_per_goal() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().to_str().unwrap();
    let (exit, _) = run_args(&["--trace-dir", path, "derive", "--prime", "3", "--r", "11", "--all"]);
    assert_eq!(exit, Exit::Ok);
    for k in 0..=6 {
        let trace = fs::read_to_string(dir.path().join(format!("p3-r11-k{k}.trace"))).unwrap();
        assert!(trace.starts_with(&format!("goal | p=3 r=11 k={k} |")), "{trace}");
    }
    let summary = fs::read_to_string(dir.path().join("run.txt")).unwrap();
    assert_eq!(summary.lines().count(), 8);
}

#[test]
fn db_validate_is_clean() {
    let (exit, out) = run_args(&["db", "validate"]);
    assert_eq!(exit, Exit::Ok);
    assert!(out.contains(" 0 violations"), "{out}");
}

#[test]
fn classify_and_smash_print() {
    let (_, out) = run_args(&["classify", "--k", "4"]);
    assert!(out.contains("(t >= 0)"), "{out}");
    let (_, out) = run_args(&["smash", "--space", "HP2"]);
    assert!(out.starts_with("plus: S^13\n"), "{out}");
}
