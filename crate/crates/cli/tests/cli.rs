//! End-to-end tests of the `hvlab` binary: exit codes, output contracts,
//! and reproducibility.

use std::process::{Command, Output};

fn hvlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hvlab"))
        .args(args)
        .output()
        .expect("spawn hvlab")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

#[test]
fn verify_default_run_passes_and_lists_checks() {
    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("report.json");
    let out = hvlab(&["verify", "--json", json_path.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );

    let text = stdout(&out);
    let pass_lines = text.lines().filter(|l| l.starts_with("[pass]")).count();
    assert!(pass_lines >= 12, "only {pass_lines} checks listed:\n{text}");
    assert!(text.starts_with("config: "));

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    let checks = report.as_array().expect("report is a JSON array");
    assert!(checks.len() >= 12);
    for c in checks {
        assert!(c["name"].is_string());
        assert_eq!(c["status"], "pass");
        assert!(c["achieved"].is_number());
        assert!(c["tolerance"].is_number());
    }
}

#[test]
fn verify_unreachable_tolerance_exits_one_and_names_the_check() {
    let out = hvlab(&[
        "verify",
        "--tol-closed-form",
        "1e-15",
        "--grid-steps",
        "21",
        "--mc-n",
        "20000",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(
        text.lines()
            .any(|l| l.starts_with("[FAIL]") && l.contains("closed_form_vs_quadrature")),
        "failing check not named:\n{text}"
    );
}

#[test]
fn scan_writes_the_documented_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("grid.csv");
    let json_path = dir.path().join("summary.json");
    let out = hvlab(&[
        "scan",
        "--alpha-steps",
        "21",
        "--tau-steps",
        "21",
        "--out",
        csv_path.to_str().unwrap(),
        "--json",
        json_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));

    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("alpha,tau,F,abs_F,region"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 21 * 21);

    // round trip: the region column reproduces exactly from the F column
    for row in &rows {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols.len(), 5);
        let f: f64 = cols[2].parse().unwrap();
        let abs_f: f64 = cols[3].parse().unwrap();
        assert_eq!(abs_f, f.abs());
        let expected = if f.abs() <= 2.0 {
            "local"
        } else if f.abs() <= 2.0 * std::f64::consts::SQRT_2 {
            "quantum"
        } else {
            "superquantum"
        };
        assert_eq!(cols[4], expected, "row: {row}");
    }

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(summary["alpha_steps"], 21);
    let counts = &summary["counts"];
    let total = counts["local"].as_u64().unwrap()
        + counts["quantum"].as_u64().unwrap()
        + counts["superquantum"].as_u64().unwrap();
    assert_eq!(total, 21 * 21);
    assert!(summary["max_abs_F"].as_f64().unwrap() <= 4.0 + 1e-9);
}

#[test]
fn scan_at_fig_resolution_finds_all_regions() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("grid.csv");
    let json_path = dir.path().join("summary.json");
    let out = hvlab(&[
        "scan",
        "--out",
        csv_path.to_str().unwrap(),
        "--json",
        json_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert_eq!(csv.lines().count(), 201 * 201 + 1);

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    for region in ["local", "quantum", "superquantum"] {
        assert!(
            summary["counts"][region].as_u64().unwrap() > 0,
            "{region} empty"
        );
    }
}

#[test]
fn scan_rejects_unwritable_out_path() {
    let out = hvlab(&["scan", "--out", "/nonexistent-dir/grid.csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn scan_requires_out() {
    let out = hvlab(&["scan"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn mc_is_byte_reproducible() {
    let args = [
        "mc",
        "--quantity",
        "f",
        "--alpha",
        "0.3927",
        "--n",
        "100000",
        "--seed",
        "7",
    ];
    let first = hvlab(&args);
    let second = hvlab(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);

    // the estimate itself lands within 4 sigma of -2*sqrt(2)
    let text = stdout(&first);
    let line = text.lines().find(|l| l.starts_with("mean: ")).unwrap();
    let fields: Vec<&str> = line.split_whitespace().collect();
    let mean: f64 = fields[1].parse().unwrap();
    let stderr: f64 = fields[3].parse().unwrap();
    assert!((mean + 2.0 * std::f64::consts::SQRT_2).abs() < 4.0 * stderr);
}

#[test]
fn mc_marginal_is_statistically_zero() {
    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("mc.json");
    let out = hvlab(&[
        "mc",
        "--quantity",
        "marginal",
        "--side",
        "a",
        "--alpha",
        "0.3",
        "--n",
        "1000000",
        "--json",
        json_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    let mean = report["mean"].as_f64().unwrap();
    let stderr = report["stderr"].as_f64().unwrap();
    assert!(mean.abs() < 4.0 * stderr);
}

#[test]
fn mc_accepts_uppercase_quantity_and_side() {
    let out = hvlab(&["mc", "--quantity", "F", "--alpha", "0.3927", "--n", "10000"]);
    assert_eq!(out.status.code(), Some(0));
    let out = hvlab(&[
        "mc",
        "--quantity",
        "marginal",
        "--side",
        "A",
        "--alpha",
        "0.3",
        "--n",
        "10000",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn mc_accepts_degrees() {
    let out = hvlab(&[
        "mc",
        "--quantity",
        "pair",
        "--alpha",
        "22.5",
        "--degrees",
        "--n",
        "50000",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("mean: "));
}

#[test]
fn mc_usage_errors_exit_two() {
    for args in [
        vec!["mc", "--quantity", "f"],                          // missing alpha
        vec!["mc", "--quantity", "pair-tau", "--alpha", "0.3"], // missing tau
        vec!["mc", "--quantity", "marginal", "--alpha", "0.3"], // missing side
        vec!["mc", "--quantity", "f", "--alpha", "2.0"],        // alpha out of range
        vec!["mc", "--quantity", "f", "--alpha", "0.3", "--n", "0"], // empty sample
        vec!["mc", "--quantity", "nonsense", "--alpha", "0.3"], // bad enum (clap)
    ] {
        let out = hvlab(&args);
        assert_eq!(out.status.code(), Some(2), "args: {args:?}");
    }
}

#[test]
fn constants_prints_the_expected_values() {
    let out = hvlab(&["constants"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("alpha_tilde:    0.562220056392"));
    assert!(text.contains("local_bound:    2"));
    assert!(text.contains("pr_box_F:       4"));
    assert!(text.contains("0.316"));
    assert!(text.contains("quantum_bound:  2.828427124746"));
}

#[test]
fn sup_table_is_monotone() {
    let out = hvlab(&["sup", "--epsilons", "1e-2,1e-3,1e-4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let abs_f: Vec<f64> = text
        .lines()
        .filter(|l| l.trim_start().starts_with("1."))
        .map(|l| l.split_whitespace().last().unwrap().parse().unwrap())
        .collect();
    assert_eq!(abs_f.len(), 3);
    assert!(abs_f[0] < abs_f[1] && abs_f[1] < abs_f[2]);
    assert!(abs_f[1] > 3.98 && abs_f[2] > 3.99);
    assert!(abs_f.iter().all(|a| *a < 4.0));
}

#[test]
fn sup_rejects_nondecreasing_epsilons() {
    let out = hvlab(&["sup", "--epsilons", "1e-4,1e-3"]);
    assert_eq!(out.status.code(), Some(2));
}
