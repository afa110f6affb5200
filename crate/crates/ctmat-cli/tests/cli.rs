//! End-to-end tests of the `ctmat` binary: flag handling, exit codes, file
//! formats and determinism.

use std::path::PathBuf;
use std::process::Command;

use ctmat::{
    evaluate, fock_angle, BoundStateContext, MomentumPair, QuadratureSpec, RepresentationKind,
};

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_ctmat"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn stdout_field(stdout: &str, name: &str) -> f64 {
    for line in stdout.lines() {
        if let Some(rest) = line.strip_prefix(name) {
            let rest = rest.trim_start();
            if let Some(v) = rest.strip_prefix('=') {
                return v.trim().parse().unwrap();
            }
        }
    }
    panic!("field {name} not found in:\n{stdout}");
}

fn temp_path(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("ctmat-cli-test-{}-{name}", std::process::id()))
}

#[test]
fn eval_closed_backward_point() {
    let (code, stdout, _) = run(&[
        "eval", "--mu", "1", "--q1q2", "1", "--n", "1", "--k", "1", "--kp", "1", "--cos", "-1",
        "--rep", "closed",
    ]);
    assert_eq!(code, 0);
    let bracket = stdout_field(&stdout, "bracket");
    assert!((bracket - (3.0 - 4.0 * std::f64::consts::LN_2)).abs() < 1e-14);
    let omega = stdout_field(&stdout, "omega");
    assert_eq!(omega, std::f64::consts::PI);
}

#[test]
fn eval_free_gamma_is_born_bracket() {
    let (code, stdout, _) = run(&[
        "eval", "--gamma", "0", "--kappa", "1", "--k", "2", "--kp", "1", "--cos", "0.3",
    ]);
    assert_eq!(code, 0);
    let pair = MomentumPair::new(2.0, 1.0, 0.3).unwrap();
    let omega = fock_angle(&pair, 1.0);
    let expected = 1.0 / (0.5 * omega).sin().powi(2);
    assert!((stdout_field(&stdout, "bracket") - expected).abs() < 1e-12);
    assert_eq!(stdout_field(&stdout, "value"), 0.0); // gamma = 0 means q1q2 = 0
}

#[test]
fn eval_generalized_closed_no_pole() {
    let (code, stdout, _) = run(&[
        "eval", "--gamma", "-1", "--kappa", "1", "--k", "1", "--kp", "1", "--cos", "0", "--rep",
        "generalized-closed",
    ]);
    assert_eq!(code, 0);
    assert!(stdout_field(&stdout, "value").is_finite());
    // omega = pi/2 here, so the bracket is 2 - 2 ln 2
    assert!(
        (stdout_field(&stdout, "bracket") - (2.0 - 2.0 * std::f64::consts::LN_2)).abs() < 1e-13
    );
}

#[test]
fn usage_errors_exit_1() {
    let (code, _, stderr) = run(&["eval", "--gamma", "1", "--k", "1", "--kp", "1", "--cos", "0"]);
    assert_eq!(code, 1, "{stderr}");
    let (code, _, _) = run(&[
        "eval", "--mu", "1", "--q1q2", "1", "--n", "1", "--gamma", "1", "--kappa", "1", "--k",
        "1", "--kp", "1", "--cos", "0",
    ]);
    assert_eq!(code, 1);
    let (code, _, _) = run(&[
        "eval", "--gamma", "1", "--kappa", "1", "--k", "1", "--kp", "1", "--cos", "0", "--rep",
        "bogus",
    ]);
    assert_eq!(code, 1);
    let (code, _, _) = run(&["nonsense"]);
    assert_eq!(code, 1);
}

#[test]
fn evaluation_errors_exit_2() {
    // forward singularity
    let (code, _, stderr) = run(&[
        "eval", "--gamma", "1", "--kappa", "1", "--k", "1", "--kp", "1", "--cos", "1", "--rep",
        "closed",
    ]);
    assert_eq!(code, 2, "{stderr}");
    // representation/context mismatch is a usage problem caught before evaluation
    let (code, _, _) = run(&[
        "eval", "--gamma", "-1", "--kappa", "1", "--k", "1", "--kp", "2", "--cos", "0", "--rep",
        "closed",
    ]);
    assert_eq!(code, 2);
}

#[test]
fn scan_cardinality_and_omega_pi_row() {
    let out = temp_path("scan-card.csv");
    let (code, _, stderr) = run(&[
        "scan", "--gamma", "1", "--kappa", "1", "--k-min", "0.5", "--k-max", "2", "--k-count",
        "3", "--kp-min", "0.5", "--kp-max", "2", "--kp-count", "3", "--cos=-1,0", "--reps",
        "series,closed", "--output", out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{stderr}");
    let text = std::fs::read_to_string(&out).unwrap();
    let data_rows: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("k,"))
        .collect();
    assert_eq!(data_rows.len(), 36); // 3 x 3 x 2 x 2

    // the k = k' = kappa = 1, cos = -1 row sits at the omega = pi limit and
    // must be finite
    let pi_row: Vec<&str> = data_rows
        .iter()
        .filter(|r| {
            let f: Vec<&str> = r.split(',').collect();
            f[0].parse::<f64>().unwrap() == 1.0
                && f[1].parse::<f64>().unwrap() == 1.0
                && f[2].parse::<f64>().unwrap() == -1.0
        })
        .copied()
        .collect();
    assert_eq!(pi_row.len(), 2);
    for row in pi_row {
        let f: Vec<&str> = row.split(',').collect();
        assert_eq!(f[3].parse::<f64>().unwrap(), std::f64::consts::PI);
        assert!(f[9].parse::<f64>().unwrap().is_finite());
    }
    std::fs::remove_file(&out).ok();
}

#[test]
fn scan_csv_rows_reevaluate() {
    let out = temp_path("scan-roundtrip.csv");
    let (code, _, _) = run(&[
        "scan", "--gamma", "2", "--kappa", "1", "--k-min", "0.4", "--k-max", "3", "--k-count",
        "2", "--kp-min", "0.7", "--kp-max", "1.9", "--kp-count", "2", "--cos=-0.8,0.4",
        "--reps", "closed,integral", "--output", out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let ctx = BoundStateContext::from_dimensionless(2.0, 1.0).unwrap();
    let spec = QuadratureSpec::default();
    let text = std::fs::read_to_string(&out).unwrap();
    for line in text.lines().filter(|l| !l.starts_with('#') && !l.starts_with("k,")) {
        let f: Vec<&str> = line.split(',').collect();
        let (k, kp, cos) = (
            f[0].parse::<f64>().unwrap(),
            f[1].parse::<f64>().unwrap(),
            f[2].parse::<f64>().unwrap(),
        );
        let rep: RepresentationKind = f[6].parse().unwrap();
        let value: f64 = f[9].parse().unwrap();
        let pair = MomentumPair::new(k, kp, cos).unwrap();
        let again = evaluate(&pair, &ctx, rep, &spec).unwrap();
        assert!(
            ((again.value - value) / value.abs().max(1e-300)).abs() < 1e-12,
            "row {line}: re-evaluated {} vs {value}",
            again.value
        );
    }
    std::fs::remove_file(&out).ok();
}

#[test]
fn scan_json_structure() {
    let (code, stdout, _) = run(&[
        "scan", "--gamma", "1", "--kappa", "1", "--k-min", "1", "--k-max", "2", "--k-count",
        "2", "--kp-min", "0.5", "--kp-max", "0.5", "--kp-count", "1", "--cos", "0", "--reps",
        "closed", "--format", "json",
    ]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert!(doc["config"].is_object());
    assert_eq!(doc["rows"].as_array().unwrap().len(), 2);
    assert_eq!(doc["summary"]["rows"], 2);
    assert!(doc["config"]["reps"] == "closed");
    let row = &doc["rows"][0];
    for key in [
        "k", "kprime", "cos_theta", "omega", "eta", "xi", "representation", "bracket",
        "prefactor", "value", "error_estimate",
    ] {
        assert!(!row[key].is_null(), "missing {key}");
    }
}

#[test]
fn validate_exit_codes() {
    let (code, stdout, _) = run(&["validate", "--gamma", "1", "--kappa", "1"]);
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.contains("PASS"));

    let (code, stdout, _) = run(&["validate", "--gamma", "-1", "--kappa", "1"]);
    assert_eq!(code, 0, "{stdout}");

    let (code, stdout, stderr) = run(&[
        "validate", "--gamma", "1", "--kappa", "1", "--threshold", "1e-15",
    ]);
    assert_eq!(code, 3, "{stdout}{stderr}");
    assert!(stdout.contains("FAIL"));
    assert!(stderr.contains("max relative deviation"));
}

#[test]
fn validate_json_report() {
    let out = temp_path("validate-report.json");
    let (code, _, _) = run(&[
        "validate", "--gamma", "2", "--kappa", "1", "--k-count", "2", "--kp-count", "2",
        "--cos", "0", "--output", out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["summary"]["pass"], true);
    assert_eq!(doc["summary"]["points"], 4);
    let point = &doc["points"][0];
    assert!(point["values"]["closed"].is_number());
    assert!(point["max_rel_deviation"].is_number());
    std::fs::remove_file(&out).ok();
}

#[test]
fn partial_wave_table_and_symmetry() {
    let (code, stdout, _) = run(&[
        "partial-wave", "--gamma", "1", "--kappa", "1", "--k", "2", "--kp", "1", "--l-max",
        "4", "--rep", "closed",
    ]);
    assert_eq!(code, 0);
    let rows: Vec<&str> = stdout
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("l,"))
        .collect();
    assert_eq!(rows.len(), 5);

    // k <-> k' swap reproduces the same t_l within quadrature tolerance
    let (_, swapped, _) = run(&[
        "partial-wave", "--gamma", "1", "--kappa", "1", "--k", "1", "--kp", "2", "--l-max",
        "4", "--rep", "closed",
    ]);
    let swapped_rows: Vec<&str> = swapped
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("l,"))
        .collect();
    for (a, b) in rows.iter().zip(&swapped_rows) {
        let va: f64 = a.split(',').nth(3).unwrap().parse().unwrap();
        let vb: f64 = b.split(',').nth(3).unwrap().parse().unwrap();
        assert!((va - vb).abs() < 1e-9, "{va} vs {vb}");
    }

    // representation swap stays within the projector tolerance
    let (_, other, _) = run(&[
        "partial-wave", "--gamma", "1", "--kappa", "1", "--k", "2", "--kp", "1", "--l-max",
        "4", "--rep", "separated",
    ]);
    for (a, b) in rows.iter().zip(other.lines().filter(|l| !l.starts_with('#') && !l.starts_with("l,"))) {
        let va: f64 = a.split(',').nth(3).unwrap().parse().unwrap();
        let vb: f64 = b.split(',').nth(3).unwrap().parse().unwrap();
        assert!((va - vb).abs() / va.abs().max(1e-300) < 1e-7, "{va} vs {vb}");
    }
}

#[test]
fn config_file_supplies_defaults_flags_override() {
    let conf = temp_path("eval.conf");
    std::fs::write(
        &conf,
        "# sample config\ngamma = 1\nkappa = 1\nk = 1\nkp = 2\ncos = 0.5\nrep = closed\n",
    )
    .unwrap();
    let (code, stdout, _) = run(&["eval", "--config", conf.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.contains("representation = closed"));
    let base = stdout_field(&stdout, "value");

    // flag overrides the file entry
    let (code, stdout, _) = run(&[
        "eval", "--config", conf.to_str().unwrap(), "--rep", "series",
    ]);
    assert_eq!(code, 0);
    assert!(stdout.contains("representation = series"));
    let series = stdout_field(&stdout, "value");
    assert!(((series - base) / base).abs() < 1e-8);
    std::fs::remove_file(&conf).ok();
}

#[test]
fn partial_wave_json_and_generalized_default_rep() {
    let (code, stdout, _) = run(&[
        "partial-wave", "--gamma", "-1", "--kappa", "1", "--k", "2", "--kp", "1", "--l-max",
        "1", "--format", "json",
    ]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(doc["config"]["rep"], "generalized-closed");
    assert_eq!(doc["rows"].as_array().unwrap().len(), 2);
}
