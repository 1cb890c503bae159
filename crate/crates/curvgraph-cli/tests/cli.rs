use std::io::Write;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_curvgraph"))
}

fn stdout_of(args: &[&str]) -> String {
    let out = bin().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn enumerate_counts() {
    assert_eq!(stdout_of(&["enumerate", "--degree", "1"]).lines().count(), 2);
    assert_eq!(
        stdout_of(&["enumerate", "--degree", "3", "--connected-black"])
            .lines()
            .count(),
        5
    );
    assert_eq!(
        stdout_of(&["enumerate", "--degree", "4", "--connected-black"])
            .lines()
            .count(),
        17
    );
}

#[test]
fn enumerate_respects_env_cap() {
    let out = bin()
        .args(["enumerate", "--degree", "3"])
        .env("CURVGRAPH_MAX_DEGREE", "2")
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds the cap"));
}

#[test]
fn dims_table() {
    let text = stdout_of(&["dims", "--max-degree", "4"]);
    let dims: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(dims.len(), 5);
    assert!(dims[4].contains("26") && dims[4].contains("15"));
    let json = stdout_of(&["dims", "--max-degree", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v[2]["stable_dim"], 3);
}

#[test]
fn eval_builtin_on_constant_model() {
    let json = stdout_of(&[
        "eval",
        "--poly",
        "pf:2",
        "--model",
        r#"{"type":"constant","m":4,"c":1}"#,
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    let value = v["value"].as_f64().unwrap();
    assert!((value - 3.0).abs() < 1e-9);
    assert!(v["plan_cost"].as_u64().unwrap() > 0);
}

#[test]
fn eval_theta_prints_kappa() {
    let json = stdout_of(&[
        "eval",
        "--poly",
        "theta",
        "--model",
        r#"{"type":"nk_random","m":5,"terms":3,"seed":42}"#,
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    let value = v["value"].as_f64().unwrap();
    let kappa = v["kappa"].as_f64().unwrap();
    assert!((value + 2.0 * kappa).abs() <= 1e-9 * (1.0 + value.abs()));
}

#[test]
fn poly_file_evaluation_matches_builtin() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pf1.txt");
    let text = stdout_of(&["poly", "--name", "pf:1"]);
    std::fs::File::create(&path)
        .unwrap()
        .write_all(text.as_bytes())
        .unwrap();
    let model = r#"{"type":"nk_random","m":4,"terms":3,"seed":7}"#;
    let from_file = stdout_of(&[
        "eval",
        "--poly",
        path.to_str().unwrap(),
        "--model",
        model,
        "--format",
        "json",
    ]);
    let from_builtin = stdout_of(&[
        "eval", "--poly", "pf:1", "--model", model, "--format", "json",
    ]);
    let a: serde_json::Value = serde_json::from_str(&from_file).unwrap();
    let b: serde_json::Value = serde_json::from_str(&from_builtin).unwrap();
    assert_eq!(a["value"], b["value"]);
}

#[test]
fn ihx_dump_round_trips() {
    let text = stdout_of(&["ihx", "dump", "--degree", "1"]);
    assert!(text.contains("# relation 0"));
    // dumped relations parse back in the polynomial text format
    let body: String = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect();
    let p = curvgraph::algebra::parse_poly_rat(&body).unwrap();
    assert_eq!(p.len(), 2);
}

#[test]
fn verify_exit_codes_and_schema() {
    let out = bin().args(["verify", "gauss-bonnet"]).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["suite"], "gauss-bonnet");
    assert_eq!(v["overall"], true);
    assert!(v["cases"].as_array().unwrap().len() >= 4);
    for c in v["cases"].as_array().unwrap() {
        for key in ["name", "expected", "actual", "tolerance", "pass"] {
            assert!(c.get(key).is_some(), "case misses {key}");
        }
    }
    let out = bin().args(["verify", "no-such-suite"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_report_is_byte_stable() {
    let norm = |raw: &[u8]| {
        let mut v: serde_json::Value = serde_json::from_slice(raw).unwrap();
        v["wall_time_ms"] = 0.into();
        serde_json::to_string(&v).unwrap()
    };
    let a = bin().args(["verify", "delta-table", "--seed", "3"]).output().unwrap();
    let b = bin().args(["verify", "delta-table", "--seed", "3"]).output().unwrap();
    assert_eq!(norm(&a.stdout), norm(&b.stdout));
    let c = bin().args(["verify", "norm12", "--seed", "3"]).output().unwrap();
    let d = bin().args(["verify", "norm12", "--seed", "3"]).output().unwrap();
    assert_eq!(norm(&c.stdout), norm(&d.stdout));
}

#[test]
fn delta_reduced_of_crossed_square() {
    let text = stdout_of(&["delta", "--poly", "sq-cross", "--reduced"]);
    assert_eq!(text.trim(), "12 * c=[[0,1]];r=[[0,1]]");
}

#[test]
fn verify_fails_with_impossible_tolerance() {
    // residual cases cannot beat a zero tolerance; exit code must be 1
    let out = bin()
        .args(["verify", "norm12", "--tolerance", "0.0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["overall"], false);
}

#[test]
fn all_suites_pass() {
    for suite in [
        "ihx-numeric",
        "dims",
        "gauss-bonnet",
        "norm12",
        "delta-table",
        "const-values",
        "pfaffian-defn",
        "psi-closure",
        "moments-mc",
        "cubic-lemma",
        "einstein-cubic",
        "einstein-symbolic",
        "hitchin-thorpe4",
        "stability",
    ] {
        let out = bin().args(["verify", suite]).output().unwrap();
        assert!(
            out.status.success(),
            "suite {suite}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}
