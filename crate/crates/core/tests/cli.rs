use std::io::Write;
use std::process::{Command, Output};

use monocat::suite::SuiteConfig;

const SNAKE: &str = "(eta(0,1)*id(1)) ; (id(1)*eps(0,1))";

fn monocat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_monocat"))
        .args(args)
        .env_remove("MONOCAT_MAX_STATES")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn eq_triangle_is_equal() {
    let o = monocat(&["eq", "(eta(0,1)*id(1)) ; eps(1,1)", "id(1)", "--mode", "C"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("Equal (1 step)"), "{text}");
    assert!(text.contains("TriangleA"));
}

#[test]
fn eq_snake_is_unknown() {
    let o = monocat(&["eq", SNAKE, "id(1)", "--mode", "C", "--json"]);
    assert_eq!(o.status.code(), Some(10));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["result"]["Unknown"]["states_visited"].as_u64().unwrap() > 0);
}

#[test]
fn eq_shape_mismatch_is_usage_error() {
    let o = monocat(&["eq", "id(1)", "id(2)"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("different shapes"));
}

#[test]
fn eq_respects_state_budget() {
    let o = Command::new(env!("CARGO_BIN_EXE_monocat"))
        .args(["eq", SNAKE, "id(1)", "--json"])
        .env("MONOCAT_MAX_STATES", "25")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(10));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["caps"]["max_states"], 25);
    assert_eq!(v["result"]["Unknown"]["truncated"], true);

    let o = monocat(&["eq", SNAKE, "id(1)", "--max-states", "30", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["caps"]["max_states"], 30);

    let o = Command::new(env!("CARGO_BIN_EXE_monocat"))
        .args(["eq", "id(1)", "id(1)"])
        .env("MONOCAT_MAX_STATES", "lots")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn parse_errors() {
    let o = monocat(&["parse", "eta(0,1) ; id(1)"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr).to_string();
    assert!(err.contains("position 9") && err.contains("2"), "{err}");
    assert_eq!(monocat(&["parse", "eta(0,0)"]).status.code(), Some(2));
    let o = monocat(&["parse", "id(0)"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("id(0)\n"));
}

#[test]
fn normalize_prints_canonical_form() {
    let o = monocat(&["normalize", "(id(2)*eta(0,1)) ; (eta(0,1)*id(4))", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["canonical"]["gen_count"], 2);
    assert_eq!(v["canonical"]["source"], 2);
    assert_eq!(v["canonical"]["target"], 6);
}

#[test]
fn eval_examples() {
    let o = monocat(&[
        "eval",
        "eta(0,1) ; eps(0,1)",
        "--dim",
        "2",
        "--phi",
        "identity",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "[2]\n");

    let o = monocat(&["eval", SNAKE, "--dim", "2", "--phi", "random:5"]);
    assert_eq!(stdout(&o), "[1 0]\n[0 1]\n");

    let o = monocat(&["eval", "id(3)", "--dim", "2", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!((v["rows"].as_u64(), v["cols"].as_u64()), (Some(8), Some(8)));

    let o = monocat(&[
        "eval",
        "eps(0,1)",
        "--field",
        "p:998244353",
        "--phi",
        "random:2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 1);
}

#[test]
fn eval_rejects_bad_input() {
    assert_eq!(
        monocat(&["eval", "id(1)", "--field", "p:7"]).status.code(),
        Some(2)
    );
    assert_eq!(
        monocat(&["eval", "id(1)", "--phi", "sideways"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        monocat(&["eval", "id(30)", "--dim", "2"]).status.code(),
        Some(2)
    );

    let mut singular = tempfile::NamedTempFile::new().unwrap();
    writeln!(singular, "2\n1 2\n2 4").unwrap();
    let phi = format!("file:{}", singular.path().display());
    let o = monocat(&["eval", "id(1)", "--phi", &phi]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("invertible"));
}

#[test]
fn eval_reads_phi_file() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "2\n0 1\n-1 1/2").unwrap();
    let phi = format!("file:{}", file.path().display());
    let o = monocat(&["eval", SNAKE, "--phi", &phi]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "[1 0]\n[0 1]\n");
    assert_eq!(
        monocat(&["eval", SNAKE, "--phi", &phi, "--dim", "3"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn explore_and_homset() {
    let o = monocat(&["explore", SNAKE, "--max-gens", "4", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["identity_found"], false);

    let o = monocat(&["homset", "1", "0", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["classes"].as_array().unwrap().len(), 0);

    let o = monocat(&["homset", "2", "0", "--max-gens", "1"]);
    assert!(stdout(&o).contains("eps(0,1)"));
}

#[test]
fn usage_errors_and_help() {
    assert_eq!(monocat(&[]).status.code(), Some(2));
    assert_eq!(monocat(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(monocat(&["eq", "id(1)"]).status.code(), Some(2));
    assert_eq!(
        monocat(&["eq", "id(1)", "id(1)", "--mode", "E"])
            .status
            .code(),
        Some(2)
    );
    let o = monocat(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("homset"));
    assert_eq!(monocat(&["--version"]).status.code(), Some(0));
}

#[test]
fn suite_bad_config() {
    assert_eq!(
        monocat(&["suite", "--config", "/no/such/file.json"])
            .status
            .code(),
        Some(2)
    );
    let mut bad = tempfile::NamedTempFile::new().unwrap();
    writeln!(bad, "{{\"dims\": [7]}}").unwrap();
    let path = bad.path().to_str().unwrap();
    assert_eq!(monocat(&["suite", "--config", path]).status.code(), Some(2));
    let mut unknown = tempfile::NamedTempFile::new().unwrap();
    writeln!(unknown, "{{\"colour\": 1}}").unwrap();
    let path = unknown.path().to_str().unwrap();
    assert_eq!(monocat(&["suite", "--config", path]).status.code(), Some(2));
}

#[test]
fn suite_defaults_pass() {
    let o = monocat(&["suite", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let statuses: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["status"].as_str().unwrap())
        .collect();
    assert_eq!(statuses.len(), monocat::suite::CHECK_NAMES.len());
    assert!(
        statuses.iter().all(|s| ["Pass", "Evidence"].contains(s)),
        "{statuses:?}"
    );
}

fn quick_config() -> SuiteConfig {
    let mut cfg = SuiteConfig::default();
    cfg.caps.max_gen_count = 4;
    cfg.hom_caps.max_gen_count = 3;
    cfg.dims = vec![2];
    cfg.phi_seeds = vec![1];
    cfg.samples = 10;
    cfg
}

#[test]
fn suite_json_is_stable() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(file, "{}", serde_json::to_string(&quick_config()).unwrap()).unwrap();
    let path = file.path().to_str().unwrap();
    let a = monocat(&["suite", "--config", path, "--json", "--no-timings"]);
    let b = monocat(&["suite", "--config", path, "--json", "--no-timings"]);
    assert_eq!(
        a.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&a.stdout)
    );
    assert_eq!(a.stdout, b.stdout);

    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys.len(), 2);
    assert!(v["config"].is_object());
    for check in v["checks"].as_array().unwrap() {
        assert!(check["name"].is_string() && check["details"].is_object());
        assert!(["Pass", "Evidence", "Skipped"].contains(&check["status"].as_str().unwrap()));
        assert_eq!(check["timing_ms"], 0);
    }
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.find("\"config\"").unwrap() < text.find("\"checks\"").unwrap());
}

#[test]
fn suite_reports_corrupted_rule() {
    let mut cfg = quick_config();
    cfg.corrupt_rule = Some(monocat::RuleId::TriangleA);
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(file, "{}", serde_json::to_string(&cfg).unwrap()).unwrap();
    let o = monocat(&["suite", "--config", file.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("Fail"));
}

#[test]
fn run_returns_exit_codes_in_process() {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = monocat::cli::run(["monocat", "parse", "eta(0,1)"], &mut out, &mut err);
    assert_eq!(code, 0);
    assert_eq!(
        String::from_utf8(out).unwrap(),
        "eta(0,1)\n0 -> 2, 1 generators\n"
    );
    assert!(err.is_empty());
}
