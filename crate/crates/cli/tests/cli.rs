use std::path::{Path, PathBuf};
use std::process::{Command as Process, Output};

use qbs_cli::commands::Command;
use qbs_cli::config::{parse_config, raw_matrix, RunConfig};
use qbs_cli::error::CliError;
use qbs_cli::{execute, Invocation};
use qbs_core::operator::ComplexMatrix;
use qbs_core::QbsError;
use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn read(name: &str) -> String {
    std::fs::read_to_string(data(name)).unwrap()
}

fn qbs(args: &[&str]) -> Output {
    Process::new(env!("CARGO_BIN_EXE_qbs"))
        .args(args)
        .output()
        .unwrap()
}

fn qbs_with(command: &str, config: &Path, extra: &[&str]) -> Output {
    let mut args = vec![command, "--config", config.to_str().unwrap()];
    args.extend_from_slice(extra);
    qbs(&args)
}

fn write_temp(text: &str) -> tempfile::NamedTempFile {
    let f = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(f.path(), text).unwrap();
    f
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn minimal_scalar_config_is_valid() {
    let cfg = parse_config(&read("scalar_atm.json")).unwrap();
    assert_eq!(cfg.model.dim(), 1);
    assert_eq!(cfg.model.rate, 0.0);
    assert!(cfg.state.is_some());
}

#[test]
fn round_trip_reparses_equal() {
    for name in ["scalar_atm.json", "two_level.json"] {
        let first = parse_config(&read(name)).unwrap().raw;
        let text = serde_json::to_string_pretty(&first).unwrap();
        let second = parse_config(&text).unwrap().raw;
        assert_eq!(first, second, "{name}");
    }
}

fn with_s(s: &ComplexMatrix) -> String {
    let mut raw: RunConfig = serde_json::from_str(&read("two_level.json")).unwrap();
    raw.model.ops.s = raw_matrix(s);
    serde_json::to_string(&raw).unwrap()
}

#[test]
fn non_unitary_s_names_the_field_and_defect() {
    // diag(1 + 5e-4, 1): ‖S*S − I‖_F = 1e-3 + 2.5e-7.
    let s = ComplexMatrix::from_real_diagonal(&[1.0 + 5e-4, 1.0]);
    match parse_config(&with_s(&s)) {
        Err(CliError::Field {
            path,
            source: QbsError::NotUnitary { defect },
        }) => {
            assert_eq!(path, "model.ops.S");
            assert!((defect - 1e-3).abs() < 1e-6, "{defect}");
        }
        other => panic!("expected unitarity rejection, got {other:?}"),
    }
    let f = write_temp(&with_s(&s));
    let out = qbs_with("coeffs", f.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("ops.S") && err.contains("1.000e-3"), "{err}");
}

#[test]
fn config_errors_exit_2() {
    let bad_json = write_temp("{ \"schema_version\": 1, ");
    assert_eq!(
        qbs_with("coeffs", bad_json.path(), &[]).status.code(),
        Some(2)
    );

    let unknown = read("scalar_atm.json").replace("\"seed\": 7", "\"seed\": 7, \"colour\": 1");
    let f = write_temp(&unknown);
    assert_eq!(qbs_with("coeffs", f.path(), &[]).status.code(), Some(2));

    let not_pd = read("scalar_atm.json").replace("\"X\": [[[1.0, 0.0]]]", "\"X\": [[[-1.0, 0.0]]]");
    let f = write_temp(&not_pd);
    let out = qbs_with("price", f.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("model"));

    assert_eq!(
        qbs(&["frobnicate", "--config", "x.json"]).status.code(),
        Some(2)
    );
    assert_eq!(
        qbs_with("price", &data("missing.json"), &[]).status.code(),
        Some(2)
    );
    assert_eq!(
        qbs_with("price", &data("scalar_atm.json"), &["--tol", "bogus=1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn stochastic_commands_need_a_seed() {
    let no_seed = read("scalar_atm.json").replace("\"seed\": 7,", "");
    let f = write_temp(&no_seed);
    let out = qbs_with("replicate", f.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));
    let out = qbs_with(
        "replicate",
        f.path(),
        &["--seed", "7", "--tol", "replication_mean_abs=0.1"],
    );
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn invariant_failure_exits_3() {
    // 100 rebalancing steps leave a mean hedging error above 1% of x0.
    let out = qbs_with("replicate", &data("scalar_atm.json"), &[]);
    assert_eq!(out.status.code(), Some(3));
    let rep = report(&out);
    assert_eq!(rep["passed"], Value::Bool(false));
    assert_eq!(rep["violations"].as_array().unwrap().len(), 1);

    let out = qbs_with(
        "replicate",
        &data("scalar_atm.json"),
        &["--tol", "replication_mean_abs=0.1"],
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        report(&out)["command"]["tolerances"]["replication_mean_abs"],
        0.1
    );
}

#[test]
fn at_the_money_price() {
    let out = qbs_with("price", &data("scalar_atm.json"), &[]);
    assert_eq!(out.status.code(), Some(0));
    let rep = report(&out);
    let results = rep["results"].as_array().unwrap();
    assert_eq!(results.len(), 2);
    let at_one = &results[1];
    assert_eq!(at_one["t"], 1.0);
    let v = at_one["omega_expectation"].as_f64().unwrap();
    assert!((v - 0.382_924_922_548_026).abs() < 1e-14);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("3.82924922548026"));
}

#[test]
fn coeffs_on_identity_are_zero() {
    let cfg = parse_config(&read("two_level.json")).unwrap();
    let mut raw = cfg.raw.clone();
    raw.model.ops.x = raw_matrix(&ComplexMatrix::identity(2));
    raw.model.strike = qbs_cli::config::StrikeConfig::Scalar(1.0);
    let cfg = raw.validate().unwrap();
    let out = execute(Command::Coeffs, &cfg, &Invocation::default()).unwrap();
    assert!(out.passed);
    let rep: Value = serde_json::from_str(&out.text).unwrap();
    let c = &rep["results"][0]["coefficients"];
    for name in ["alpha", "alpha_dagger", "lambda", "theta"] {
        for row in c[name].as_array().unwrap() {
            for z in row.as_array().unwrap() {
                assert_eq!(z[0].as_f64().unwrap().abs(), 0.0, "{name}");
                assert_eq!(z[1].as_f64().unwrap().abs(), 0.0, "{name}");
            }
        }
    }
}

#[test]
fn ito_check_passes_on_random_models() {
    let text = read("two_level.json").replace(
        "\"schema_version\": 1,",
        "\"schema_version\": 1, \"seed\": 11, \"ito\": { \"dims\": [2, 3, 4], \"k_max\": 6, \"trials\": 100 },",
    );
    let cfg = parse_config(&text).unwrap();
    let out = execute(Command::ItoCheck, &cfg, &Invocation::default()).unwrap();
    assert!(out.passed, "{:?}", out.violations);
    let rep: Value = serde_json::from_str(&out.text).unwrap();
    let results = rep["results"].as_array().unwrap();
    assert_eq!(results.len(), 3 * 5 + 1);
    for cell in &results[..15] {
        assert!(cell["max_relative_deviation"].as_f64().unwrap() <= 1e-10);
    }
}

#[test]
fn every_grid_point_appears_once_in_order() {
    let out = qbs_with("residual", &data("two_level.json"), &[]);
    assert_eq!(out.status.code(), Some(0));
    let rep = report(&out);
    let pts: Vec<(f64, u64)> = rep["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["t"].as_f64().unwrap(), r["z_index"].as_u64().unwrap()))
        .collect();
    let mut expected = Vec::new();
    for t in [0.1, 0.5, 1.0, 2.0] {
        for z in 0..2 {
            expected.push((t, z));
        }
    }
    assert_eq!(pts, expected);
}

#[test]
fn identical_inputs_give_identical_bytes() {
    for command in ["replicate", "price", "hedge", "lindblad"] {
        let a = qbs_with(command, &data("scalar_atm.json"), &[]);
        let b = qbs_with(command, &data("scalar_atm.json"), &[]);
        assert_eq!(a.stdout, b.stdout, "{command}");
        assert!(!a.stdout.is_empty());
    }
    let a = qbs_with("replicate", &data("scalar_atm.json"), &["--seed", "8"]);
    let b = qbs_with("replicate", &data("scalar_atm.json"), &[]);
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn csv_output() {
    let out = qbs_with("price", &data("two_level.json"), &["--csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,z_index,omega_trace,omega_min_eigenvalue,omega_max_eigenvalue,omega_expectation"
    );
    assert_eq!(lines.count(), 8);
}

#[test]
fn terminal_check_reports_both_conventions() {
    let out = qbs_with("terminal-check", &data("two_level.json"), &[]);
    assert_eq!(out.status.code(), Some(0));
    let r = &report(&out)["results"][0];
    let spectral = r["spectral_payoff_expectation"].as_f64().unwrap();
    let expect = r["expectation_convention_payoff"].as_f64().unwrap();
    // K = 1.5 I, z = diag(1, −1), u = (1, 1)/√2.
    let e = std::f64::consts::E;
    assert!((spectral - 1.5 * (e - 1.0) / 2.0).abs() < 1e-12);
    assert!((expect - 1.5 * (e + 1.0 / e - 2.0) / 2.0).abs() < 1e-12);
}

#[test]
fn terminal_check_near_zero_spectrum_is_a_precondition_error() {
    let text = read("scalar_atm.json").replace(
        "\"terminal\": { \"z\": [[[[1.0, 0.0]]], [[[-1.0, 0.0]]]] },",
        "\"terminal\": { \"z\": [[[[0.01, 0.0]]]] },",
    );
    let f = write_temp(&text);
    let out = qbs_with("terminal-check", f.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("terminal.z[0]"));
}

#[test]
fn hedge_records_convention() {
    let out = qbs_with("hedge", &data("two_level.json"), &[]);
    assert_eq!(out.status.code(), Some(0));
    let rep = report(&out);
    let conv: Vec<&str> = rep["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["convention"].as_str().unwrap())
        .collect();
    assert_eq!(conv, ["log_moneyness", "classical"]);
}

#[test]
fn timing_is_opt_in() {
    let plain = report(&qbs_with("classical", &data("scalar_atm.json"), &[]));
    assert!(plain.get("wall_time_seconds").is_none());
    let timed = report(&qbs_with(
        "classical",
        &data("scalar_atm.json"),
        &["--timing"],
    ));
    assert!(timed["wall_time_seconds"].as_f64().unwrap() >= 0.0);
}
