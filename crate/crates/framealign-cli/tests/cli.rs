//! End-to-end tests through the compiled binary.

use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_framealign"))
        .args(args)
        .output()
        .expect("binary is runnable");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).expect("stdout is UTF-8"),
        String::from_utf8(out.stderr).expect("stderr is UTF-8"),
    )
}

fn parse(stdout: &str) -> Value {
    serde_json::from_str(stdout).expect("output is valid JSON")
}

#[test]
fn optimize_reports_the_library_eigenpair() {
    let (code, stdout, _) = run(&["optimize", "--n", "3"]);
    assert_eq!(code, 0);
    let doc = parse(&stdout);
    assert_eq!(doc["tool"], "framealign");
    assert_eq!(doc["command"], "optimize");
    assert_eq!(doc["config"]["n"], 3);
    let result = &doc["result"];
    let expected = framealign::optimal_protocol(3).unwrap();
    assert!((result["lambda"].as_f64().unwrap() - expected.lambda).abs() < 1e-12);
    assert!((result["avg_error"].as_f64().unwrap() - expected.average_error()).abs() < 1e-12);
    assert_eq!(result["d_max"], 8);
    assert!((result["sigma_n"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((result["sigma_n_plus_2"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    let coeffs = result["coefficients"].as_array().unwrap();
    assert_eq!(coeffs.len(), 2);
    assert_eq!(coeffs[0]["j"].as_f64().unwrap(), 1.5);
    assert_eq!(coeffs[1]["j"].as_f64().unwrap(), 0.5);
}

#[test]
fn optimize_rejects_n_below_two() {
    let (code, _, stderr) = run(&["optimize", "--n", "1"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("N must be \u{2265} 2"), "stderr: {stderr}");
}

#[test]
fn sweep_csv_has_the_pinned_header() {
    let (code, stdout, _) = run(&[
        "sweep", "--n-min", "4", "--n-max", "20", "--step", "2", "--format", "csv",
    ]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = stdout.lines().collect();
    assert!(lines[0].starts_with("# tool: framealign "));
    assert_eq!(lines[1], "# command: sweep");
    assert!(lines[2].starts_with("# config:"));
    assert_eq!(lines[3], "N,lambda,avg_error,ratio,sigma_lo,sigma_hi,sandwich_ok");
    let rows: Vec<&str> = lines[4..].to_vec();
    assert_eq!(rows.len(), 9);
    for row in rows {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 7);
        assert_eq!(fields[6], "true");
    }
}

#[test]
fn sweep_json_ratio_rises_toward_one() {
    let (code, stdout, _) = run(&[
        "sweep", "--n-min", "20", "--n-max", "200", "--step", "20", "--format", "json",
    ]);
    assert_eq!(code, 0);
    let doc = parse(&stdout);
    let rows = doc["result"].as_array().unwrap();
    assert_eq!(rows.len(), 10);
    let mut previous = 0.0;
    for row in rows {
        let ratio = row["ratio"].as_f64().unwrap();
        assert!(ratio > previous && ratio < 1.0, "ratio {ratio}");
        assert_eq!(row["sandwich_ok"], true);
        previous = ratio;
    }
}

#[test]
fn simulate_is_byte_identical_across_reruns() {
    let args = ["simulate", "--n", "3", "--trials", "1000", "--seed", "7"];
    let (code_a, stdout_a, _) = run(&args);
    let (code_b, stdout_b, _) = run(&args);
    assert_eq!(code_a, 0);
    assert_eq!(code_b, 0);
    assert_eq!(stdout_a, stdout_b);
    let doc = parse(&stdout_a);
    assert_eq!(doc["config"]["seed"], 7);
    let result = &doc["result"];
    assert!(result["z_score"].as_f64().unwrap() < 4.0);
    let rate = result["acceptance_rate"].as_f64().unwrap();
    assert!(rate > 0.0 && rate <= 1.0);
}

#[test]
fn simulate_rejects_out_of_range_requests() {
    let (code, _, stderr) = run(&["simulate", "--n", "12"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("sampler"), "stderr: {stderr}");
    let (code, _, stderr) = run(&["simulate", "--n", "3", "--trials", "99"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("trials"), "stderr: {stderr}");
    let (code, _, _) = run(&["simulate", "--n", "1"]);
    assert_eq!(code, 1);
}

#[test]
fn verify_passes_and_reports_the_fidelity_matrix() {
    let (code, stdout, _) = run(&["verify", "--n", "2", "--grid", "24"]);
    assert_eq!(code, 0);
    let doc = parse(&stdout);
    let result = &doc["result"];
    assert_eq!(result["all_pass"], true);
    let diag = result["fidelity_diag"].as_array().unwrap();
    assert!((diag[0].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!(diag[1].as_f64().unwrap().abs() < 1e-12);
    let off = result["fidelity_off"].as_array().unwrap();
    assert!((off[0].as_f64().unwrap() - 1.0 / 3.0f64.sqrt()).abs() < 1e-12);
    for check in result["checks"].as_array().unwrap() {
        assert_eq!(check["pass"], true, "check {check}");
    }

    let (code, stdout, _) = run(&["verify", "--n", "3", "--grid", "24"]);
    assert_eq!(code, 0);
    assert_eq!(parse(&stdout)["result"]["all_pass"], true);
}

#[test]
fn verify_rejects_large_n() {
    let (code, _, stderr) = run(&["verify", "--n", "7"]);
    assert_eq!(code, 1);
    assert!(
        stderr.contains("oracle limited to N \u{2264} 6"),
        "stderr: {stderr}"
    );
}

#[test]
fn unknown_flags_are_usage_errors_and_help_is_not() {
    let (code, _, _) = run(&["optimize", "--bogus"]);
    assert_eq!(code, 1);
    let (code, stdout, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("optimize"));
}

#[test]
fn output_flag_writes_the_same_bytes() {
    let path = std::env::temp_dir().join("framealign-cli-test-optimize.json");
    let path_str = path.to_str().unwrap();
    let (code, stdout, _) = run(&["optimize", "--n", "5"]);
    assert_eq!(code, 0);
    let (code, _, _) = run(&["optimize", "--n", "5", "--output", path_str]);
    assert_eq!(code, 0);
    let written = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    // The file records output=<path> in its embedded config; stdout mode
    // records null. Everything else must match byte for byte.
    let normalized = written.replace(
        &format!("\"output\":\"{path_str}\""),
        "\"output\":null",
    );
    assert_eq!(normalized, stdout);
}

#[test]
fn json_outputs_validate_against_the_published_schema() {
    let schema_path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../schema/output.schema.json"
    );
    let schema: Value =
        serde_json::from_str(&std::fs::read_to_string(schema_path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let invocations: [&[&str]; 4] = [
        &["optimize", "--n", "4"],
        &["sweep", "--n-min", "4", "--n-max", "8", "--step", "2"],
        &["simulate", "--n", "2", "--trials", "200", "--seed", "3"],
        &["verify", "--n", "2", "--grid", "16"],
    ];
    for args in invocations {
        let (code, stdout, _) = run(args);
        assert_eq!(code, 0, "args {args:?}");
        let doc = parse(&stdout);
        if let Err(err) = validator.validate(&doc) {
            panic!("schema violation for {args:?}: {err}");
        }
    }
}
