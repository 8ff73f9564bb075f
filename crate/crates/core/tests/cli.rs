use serde_json::Value;
use shrinkshoot::cli::{solve_row, Family, Format, RunConfig, CSV_HEADER, CURVE_HEADER};
use std::process::{Command, Output};

fn shrinkshoot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shrinkshoot")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = shrinkshoot(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn config(family: Family, dims: Vec<u64>) -> RunConfig {
    RunConfig {
        family,
        dims,
        rel_tol: 1e-10,
        abs_tol: 1e-12,
        bracket_tol: 1e-10,
        outer_tol: 1e-12,
        l_max: None,
        format: Format::Json,
        out: None,
        samples: 1000,
        jobs: 1,
        timing: false,
    }
}

#[test]
fn solve_prints_one_row() {
    let text = stdout(&["solve", "--family", "sphere", "--dims", "2"]);
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 2);
    let entropy: f64 = lines[1].split(',').nth(4).unwrap().parse().unwrap();
    assert!((entropy - 1.47151776).abs() < 1e-8);
}

#[test]
fn output_is_deterministic_and_order_preserving() {
    let args = ["table", "--family", "angenent", "--dims", "5,2..4"];
    let serial = stdout(&[&args[..], &["--jobs", "1"]].concat());
    assert_eq!(serial, stdout(&[&args[..], &["--jobs", "1"]].concat()));
    assert_eq!(serial, stdout(&[&args[..], &["--jobs", "4"]].concat()));
    let dims: Vec<&str> = serial.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(dims, ["5", "2", "3", "4"]);
}

#[test]
fn json_round_trips_exactly() {
    let text = stdout(&["table", "--family", "cheng-wei", "--dims", "2", "--format", "json"]);
    let rows: Vec<Value> = serde_json::from_str(&text).unwrap();
    let expected = solve_row(&config(Family::ChengWei, vec![2]), 2).unwrap();
    let row = &rows[0];
    assert_eq!(row["dimension"].as_u64(), Some(2));
    assert_eq!(row["r0"].as_f64(), Some(expected.r0));
    assert_eq!(row["a0"].as_f64(), expected.a0);
    assert_eq!(row["perimeter"].as_f64(), expected.perimeter);
    assert_eq!(row["entropy"].as_f64(), Some(expected.entropy));
    assert_eq!(row["closure_residual"].as_f64(), expected.closure_residual);
    assert_eq!(row["iterations"].as_u64(), Some(expected.iterations as u64));

    let text = stdout(&["table", "--family", "mcgrath", "--dims", "2", "--format", "json"]);
    let rows: Vec<Value> = serde_json::from_str(&text).unwrap();
    assert!(rows[0]["a0"].is_null());
}

#[test]
fn cylinder_rows_have_no_profile_fields() {
    let text = stdout(&["table", "--family", "cylinder", "--dims", "1,2"]);
    let first: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(first[0], "1");
    assert_eq!(first[3], "");
    assert_eq!(first[4], "1.52034690");
}

#[test]
fn published_grid_rows() {
    let text = stdout(&["table", "--family", "cylinder", "--grid", "paper"]);
    assert_eq!(text.lines().count(), 15);
    assert!(text.lines().last().unwrap().starts_with("10000,"));
}

#[test]
fn curve_samples_close_up() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curve.csv");
    let out = shrinkshoot(&["curve", "--family", "angenent", "--dims", "2", "--samples", "1000", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(CURVE_HEADER));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 1000);
    let (first, last) = (&rows[0], &rows[999]);
    assert_eq!((first[0], first[1], first[3], first[4]), (0.0, 0.0, 0.0, 0.0));
    assert!((first[1] - last[1]).abs() < 1e-6 && (first[2] - last[2]).abs() < 1e-6);
    let (lo, hi) = rows.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r[2]), hi.max(r[2])));
    assert!(hi - lo > 1.0);

    let text = stdout(&["curve", "--family", "mcgrath", "--dims", "2", "--samples", "200"]);
    for line in text.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        assert!(v[1] > 0.0 && v[2] > 0.0);
    }
}

#[test]
fn exit_codes() {
    assert_eq!(shrinkshoot(&["solve", "--family", "angenent"]).status.code(), Some(2));
    assert_eq!(shrinkshoot(&["solve", "--family", "torus", "--dims", "2"]).status.code(), Some(2));
    assert_eq!(shrinkshoot(&["solve", "--family", "angenent", "--dims", "1"]).status.code(), Some(2));
    assert_eq!(shrinkshoot(&["solve", "--family", "angenent", "--dims", "2,3"]).status.code(), Some(2));
    assert_eq!(shrinkshoot(&["table", "--family", "angenent", "--dims", "3..2"]).status.code(), Some(2));
    assert_eq!(shrinkshoot(&["curve", "--family", "cylinder", "--dims", "2"]).status.code(), Some(2));
    assert_eq!(shrinkshoot(&["--help"]).status.code(), Some(0));

    let failed = shrinkshoot(&["table", "--family", "angenent", "--dims", "2,3", "--l-max", "1"]);
    assert_eq!(failed.status.code(), Some(1));
    let text = String::from_utf8(failed.stdout).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().nth(1).unwrap().contains("NaN"));
    assert!(String::from_utf8(failed.stderr).unwrap().contains("no torus"));
}

#[test]
fn timing_is_opt_in() {
    let text = stdout(&["solve", "--family", "angenent", "--dims", "3", "--timing"]);
    let wall: f64 = text.lines().nth(1).unwrap().rsplit(',').next().unwrap().parse().unwrap();
    assert!(wall >= 0.0);
    let text = stdout(&["solve", "--family", "angenent", "--dims", "3"]);
    assert!(text.lines().nth(1).unwrap().ends_with(",0.00000000"));
}
