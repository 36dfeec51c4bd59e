use std::process::{Command, Output};

use klm_hifi::cli::canonical_json;

fn klm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_klm-hifi"))
        .args(args)
        .env_remove("KLM_HIFI_ORACLE_CAP")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn coefficients_text_matches_known_values() {
    let o = klm(&["coefficients", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("0.75000000"));
    assert!(s.contains("0.40824829") && s.contains("0.81649658"));
}

#[test]
fn coefficients_csv_has_full_precision() {
    let s = stdout(&klm(&["coefficients", "--n", "3", "--format", "csv"]));
    let mut lines = s.lines();
    assert_eq!(lines.next(), Some("n,k,f,lambda_solved,lambda_closed"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    let lambda: f64 = first[3].parse().unwrap();
    assert!((lambda - (2.0 + 2f64.sqrt()) / 4.0).abs() < 1e-12);
    // 17 significant digits
    assert_eq!(
        first[2].split('e').next().unwrap().replace('.', "").len(),
        17
    );
}

#[test]
fn lambda_table_json() {
    let s = stdout(&klm(&["lambda-table", "--n-max", "10", "--format", "json"]));
    let v: serde_json::Value = serde_json::from_str(&s).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 10);
    for r in rows {
        assert!(r["gap_closed"].as_f64().unwrap() <= 1e-10);
        assert!(r["gap_mu"].as_f64().unwrap() <= 1e-10);
    }
    let r4 = &rows[3];
    assert!((r4["lambda_solved"].as_f64().unwrap() - 0.904_508_497_187_473_7).abs() < 1e-12);
    assert_eq!(r4["uniform_baseline"].as_f64().unwrap(), 0.8);
    assert_eq!(canonical_json(&s).unwrap(), s);
}

#[test]
fn outcomes_footer_and_inputs() {
    let s = stdout(&klm(&["outcomes", "--n", "2"]));
    assert!(s.contains("success probability = 0.75000000"));
    assert!(s.contains("lambda_n = 0.75000000"));
    assert!(s.contains("fail"));

    let s = stdout(&klm(&[
        "outcomes",
        "--n",
        "3",
        "--profile",
        "uniform",
        "--format",
        "json",
    ]));
    let v: serde_json::Value = serde_json::from_str(&s).unwrap();
    assert!((v["success_probability"].as_f64().unwrap() - 0.75).abs() < 1e-12);
    assert!(v["lambda_n"].is_null());
    assert!(v["outcomes"][0]["fidelity_sq"].is_null());

    let s = stdout(&klm(&[
        "outcomes",
        "--n",
        "2",
        "--alpha-re",
        "1",
        "--beta-re",
        "0",
        "--format",
        "csv",
    ]));
    let last = s.lines().last().unwrap();
    let cumulative: f64 = last.split(',').nth(3).unwrap().parse().unwrap();
    assert!((cumulative - 5.0 / 6.0).abs() < 1e-12);
}

#[test]
fn input_state_is_renormalized_with_warning() {
    let o = klm(&["outcomes", "--n", "2", "--alpha-re", "1", "--beta-re", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("renormalized"));
    assert!(stdout(&o).contains("success probability = 0.75000000"));
    let zero = klm(&["outcomes", "--n", "2", "--alpha-re", "0"]);
    assert_eq!(zero.status.code(), Some(2));
}

#[test]
fn profile_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("profile.txt");
    std::fs::write(&path, "# (1,2,1) unnormalized\n1\n2\n\n1\n").unwrap();
    let spec = format!("file:{}", path.display());
    let o = klm(&["outcomes", "--profile", &spec]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("renormalized"));
    assert!(stdout(&o).contains("success probability = 0.75000000"));

    let mismatch = klm(&["outcomes", "--n", "3", "--profile", &spec]);
    assert_eq!(mismatch.status.code(), Some(2));

    std::fs::write(&path, "0.5\nabc\n").unwrap();
    assert_eq!(
        klm(&["outcomes", "--profile", &spec]).status.code(),
        Some(2)
    );
    let missing = format!("file:{}", dir.path().join("nope").display());
    assert_eq!(
        klm(&["outcomes", "--profile", &missing]).status.code(),
        Some(2)
    );
}

#[test]
fn verify_exit_codes() {
    let o = klm(&["verify", "--n", "2", "--seed", "42", "--tol", "1e-9"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.trim_end().ends_with("PASS"), "{s}");

    let o = klm(&[
        "verify",
        "--n",
        "1",
        "--profile",
        "uniform",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], serde_json::Value::Bool(true));

    assert_eq!(
        klm(&["verify", "--n", "2", "--tol", "1e-300"])
            .status
            .code(),
        Some(1)
    );

    let capped = klm(&["verify", "--n", "7"]);
    assert_eq!(capped.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&capped.stderr).contains("oracle cap"));
}

#[test]
fn oracle_cap_env_override() {
    let o = Command::new(env!("CARGO_BIN_EXE_klm-hifi"))
        .args(["verify", "--n", "2", "--trials", "1"])
        .env("KLM_HIFI_ORACLE_CAP", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_klm-hifi"))
        .args(["verify", "--n", "7", "--trials", "2"])
        .env("KLM_HIFI_ORACLE_CAP", "7")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["coefficients", "--n", "0"][..],
        &["lambda-table", "--n-max", "0"][..],
        &["coefficients"][..],
        &["outcomes", "--n", "2", "--profile", "best"][..],
        &["outcomes", "--n", "2", "--format", "xml"][..],
        &["frobnicate"][..],
    ] {
        assert_eq!(klm(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn identical_configs_give_identical_bytes() {
    for args in [
        &["verify", "--n", "3", "--seed", "7", "--format", "csv"][..],
        &["verify", "--n", "3", "--seed", "7", "--format", "json"][..],
        &["lambda-table", "--n-max", "20", "--format", "csv"][..],
        &[
            "outcomes",
            "--n",
            "4",
            "--alpha-re",
            "0.6",
            "--beta-im",
            "0.8",
            "--format",
            "json",
        ][..],
    ] {
        assert_eq!(klm(args).stdout, klm(args).stdout, "{args:?}");
    }
}

#[test]
fn output_path_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lambda.csv");
    let o = klm(&[
        "lambda-table",
        "--n-max",
        "5",
        "--format",
        "csv",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    assert_eq!(written.lines().count(), 6);
    assert!(!written.contains('\r'));
    assert!(written.ends_with('\n'));
}
