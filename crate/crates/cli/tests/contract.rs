use std::path::{Path, PathBuf};
use std::process::Command;

use kernel_dynamics_cli::analyze::{analyze, AnalysisReport};
use kernel_dynamics_cli::spec::{parse_spec, KernelSpec};
use serde_json::{json, Value};

fn schema() -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/report-schema.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// One spec per kernel kind, small orders.
fn specs() -> Vec<KernelSpec> {
    [
        json!({"kind": "diagonal", "beta": {"named": "dirichlet"}, "order": 48}),
        json!({"kind": "diagonal", "beta": {"expr": "2^(-n/2)"}, "order": 48, "criteria": {"window": 32}}),
        json!({"kind": "tridiagonal", "mu": {"expr": "1/(n+1)"}, "nu": {"expr": "1/(2*(n+2))"}, "order": 48}),
        json!({"kind": "theta_conjugated", "beta": {"named": "power(-1)"}, "order": 48}),
        json!({"kind": "polynomial_conjugated", "beta": {"named": "bergman"}, "poly": [1, [0, -0.5]], "order": 48}),
        json!({"kind": "quasi_scalar", "base": {"kind": "diagonal", "beta": {"named": "hardy"}}, "dim": 2, "order": 48}),
        json!({
            "kind": "block_polynomial",
            "beta": {"list": [1, 0.5, 0.25], "tail": "2^(-n)"},
            "blocks": [[[2, 0], [0, 2]], [[1, [0, 1]], [0, 0.5]]],
            "test_set": {"vectors": [[1, 0], [0, 1]]},
            "order": 32
        }),
        json!({"kind": "explicit_matrix", "matrix": [[2, [0.5, 0.5]], [[0.5, -0.5], 1]]}),
        // not positive definite: the model is skipped and reported
        json!({"kind": "explicit_matrix", "matrix": [[1, 2], [2, 1]]}),
    ]
    .into_iter()
    .map(|v| KernelSpec::from_value(v).unwrap())
    .collect()
}

fn resolve<'a>(root: &'a Value, schema: &'a Value) -> &'a Value {
    match schema.get("$ref").and_then(Value::as_str) {
        Some(r) => {
            let name = r.strip_prefix("#/$defs/").expect("local ref");
            resolve(root, &root["$defs"][name])
        }
        None => schema,
    }
}

fn type_matches(value: &Value, ty: &str) -> bool {
    match ty {
        "object" => value.is_object(),
        "array" => value.is_array(),
        "string" => value.is_string(),
        "number" => value.is_number(),
        "integer" => value.is_u64() || value.is_i64(),
        "boolean" => value.is_boolean(),
        "null" => value.is_null(),
        other => panic!("unsupported type {other}"),
    }
}

/// The subset of JSON Schema the report schema uses.
fn check(root: &Value, schema: &Value, value: &Value, path: &str, errors: &mut Vec<String>) {
    let schema = resolve(root, schema);
    if let Some(t) = schema.get("type") {
        let types: Vec<&str> = match t {
            Value::String(s) => vec![s.as_str()],
            Value::Array(a) => a.iter().map(|x| x.as_str().unwrap()).collect(),
            _ => panic!("bad type at {path}"),
        };
        if !types.iter().any(|ty| type_matches(value, ty)) {
            errors.push(format!("{path}: {value} is not {types:?}"));
            return;
        }
    }
    if let Some(Value::Array(allowed)) = schema.get("enum") {
        if !allowed.contains(value) {
            errors.push(format!("{path}: {value} not in enum"));
        }
    }
    if let Value::Object(map) = value {
        let props = schema.get("properties").and_then(Value::as_object);
        if let Some(Value::Array(required)) = schema.get("required") {
            for r in required {
                if !map.contains_key(r.as_str().unwrap()) {
                    errors.push(format!("{path}: missing required {r}"));
                }
            }
        }
        for (k, v) in map {
            match props.and_then(|p| p.get(k)) {
                Some(sub) => check(root, sub, v, &format!("{path}.{k}"), errors),
                None if schema.get("additionalProperties") == Some(&Value::Bool(false)) => {
                    errors.push(format!("{path}.{k}: not documented"))
                }
                None => {}
            }
        }
    }
    if let (Value::Array(items), Some(sub)) = (value, schema.get("items")) {
        for (i, v) in items.iter().enumerate() {
            check(root, sub, v, &format!("{path}[{i}]"), errors);
        }
    }
}

#[test]
fn every_report_field_is_documented() {
    let schema = schema();
    for s in specs() {
        let report = analyze(&s, None).unwrap();
        let value: Value = serde_json::from_str(&report.to_json()).unwrap();
        let mut errors = Vec::new();
        check(&schema, &schema, &value, "$", &mut errors);
        assert!(errors.is_empty(), "{}: {errors:#?}", s.kernel.name());
    }
}

#[test]
fn schema_check_rejects_undocumented_fields() {
    let schema = schema();
    let report = analyze(&specs()[0], None).unwrap();
    let mut value: Value = serde_json::from_str(&report.to_json()).unwrap();
    value["diagnostics"]["extra"] = json!(1);
    value["verdicts"][0]["classification"] = json!("MAYBE");
    let mut errors = Vec::new();
    check(&schema, &schema, &value, "$", &mut errors);
    assert_eq!(errors.len(), 2, "{errors:#?}");
}

#[test]
fn optional_diagnostics_are_exercised() {
    let reports: Vec<Value> = specs()
        .iter()
        .map(|s| serde_json::from_str(&analyze(s, None).unwrap().to_json()).unwrap())
        .collect();
    for key in ["block_dim", "compression_norm", "annihilation", "model_error", "boundedness", "tridiagonal_gate"] {
        assert!(reports.iter().any(|r| r["diagnostics"].get(key).is_some()), "{key} never emitted");
    }
    assert!(reports.iter().any(|r| r["diagnostics"]["flags"].get("sufficient_not_necessary").is_some()));
}

#[test]
fn report_round_trip_is_byte_identical() {
    for s in specs() {
        let text = analyze(&s, None).unwrap().to_json();
        let again = AnalysisReport::from_json(&text).unwrap().to_json();
        assert_eq!(text, again, "{}", s.kernel.name());
    }
}

#[test]
fn reports_are_deterministic() {
    for s in specs() {
        let a = analyze(&s, None).unwrap().without_timestamp();
        let b = analyze(&s, None).unwrap().without_timestamp();
        assert_eq!(a.to_json(), b.to_json(), "{}", s.kernel.name());
    }
}

#[test]
fn spec_echo_reparses_to_the_same_spec() {
    for s in specs() {
        let report = analyze(&s, None).unwrap();
        let echoed = KernelSpec::from_value(report.spec.clone()).unwrap();
        assert_eq!(echoed.kernel, s.kernel);
    }
}

fn kdyn() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kdyn"))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn analyze_writes_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "k.json", r#"{"kind":"diagonal","beta":{"named":"bergman"}}"#);
    let out = dir.path().join("report.json");
    let status = kdyn()
        .args(["analyze", "--spec"])
        .arg(&spec)
        .args(["--order", "40", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let report = AnalysisReport::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report.provenance.order, 40);
    assert_eq!(report.spec, parse_spec(r#"{"kind":"diagonal","beta":{"named":"bergman"}}"#).unwrap().to_value());
}

#[test]
fn bad_spec_exits_two_with_field_path() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "k.json", r#"{"kind":"diagonal","beta":{"expr":"1/(n+"}}"#);
    let out = kdyn().args(["analyze", "--spec"]).arg(&spec).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.starts_with("error:") && stderr.contains("beta"), "{stderr}");
}

#[test]
fn simulate_writes_orbit_and_periodic_tables() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "k.json", r#"{"kind":"diagonal","beta":{"named":"hardy"}}"#);
    let out = dir.path().join("orbit.csv");
    let status = kdyn()
        .args(["simulate", "--spec"])
        .arg(&spec)
        .args(["--vector", "5", "--steps", "8", "--order", "32", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("step,norm,coord_0_re,coord_0_im"));
    assert_eq!(lines.len(), 10);
    let norms: Vec<&str> = lines[1..].iter().map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(norms, ["1", "1", "1", "1", "1", "1", "0", "0", "0"]);
    assert!(!dir.path().join("orbit_periodic.csv").exists());

    // periodic points need summable weights
    let spec = write(dir.path(), "g.json", r#"{"kind":"diagonal","beta":{"expr":"2^(-n/2)"}}"#);
    let status = kdyn()
        .args(["simulate", "--spec"])
        .arg(&spec)
        .args(["--vector", "0", "--steps", "0", "--periods", "1,2,4", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let periodic = std::fs::read_to_string(dir.path().join("orbit_periodic.csv")).unwrap();
    assert_eq!(periodic.lines().count(), 4);
    assert!(periodic.starts_with("p,residual,bound,distance_to_x"));
}

#[test]
fn demo_exit_codes() {
    let ok = kdyn()
        .args(["demo", "counterexample", "--beta", "1/(n+1)", "--order", "64"])
        .output()
        .unwrap();
    assert!(ok.status.success());
    let report: Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(report["conjugated_sufficient"]["classification"], "VIOLATED_ON_WINDOW");

    let refused = kdyn().args(["demo", "counterexample", "--beta", "hardy"]).output().unwrap();
    assert_eq!(refused.status.code(), Some(2));
}

#[test]
fn verify_exits_zero_when_all_checks_pass() {
    for suite in ["oracles", "dynamics"] {
        let out = kdyn().args(["verify", "--suite", suite]).output().unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
        let stdout = String::from_utf8_lossy(&out.stdout);
        assert!(stdout.lines().all(|l| !l.starts_with("FAIL")));
        assert!(stdout.trim_end().ends_with(", 0 failed"));
    }
}
