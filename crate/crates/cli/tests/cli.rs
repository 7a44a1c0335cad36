//! End-to-end runs of the `voatwist` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_voatwist")).args(args).output().expect("binary runs")
}

fn run_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_voatwist")).args(args).env(key, value).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("voatwist-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn twisted_heisenberg_zhu_algebra_is_one_dimensional() {
    let v = json(&run(&["zhu", "--voa", "heisenberg", "--twist", "theta", "--trunc", "6"]));
    assert_eq!(v["dim"], 1);
}

#[test]
fn lattice_zhu_algebra_has_two_classes() {
    let out = run(&["zhu", "--voa", "lattice-a1", "--twist", "theta", "--format", "text"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("dim 2") || text.contains("dim: 2") || text.contains("dimension 2"), "{text}");
}

#[test]
fn kernels_report_agreeing_expansions() {
    let v = json(&run(&["kernels", "--twist", "theta", "--n", "1/2", "--i", "2", "--trunc", "6"]));
    assert_eq!(v["expansions"].as_array().unwrap().len(), 3);
    assert_eq!(v["expansions_agree"], true);
    assert_eq!(v["i"], 2);
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        vec!["zhu", "--voa", "e8"],
        vec!["zhu", "--twist", "theta", "--denominator", "3"],
        vec!["zhu", "--trunc", "1/3"],
        vec!["zhu", "--format", "latex"],
        vec!["kernels", "--n", "1/3"],
        vec!["no-such-command"],
        vec!["fusion", "--voa", "heisenberg", "--m1", "T-"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn missing_input_file_is_a_usage_error() {
    let out = run(&["corr", "--emit", "n-point", "--inputs", "/nonexistent/inputs.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn insertions_beyond_the_window_exit_with_one() {
    let inputs = scratch("heavy.json");
    let heavy = r#"[{"monomial": "a[-3]", "coeff": "1"}]"#;
    std::fs::write(&inputs, format!(r#"{{"states": [{heavy}, {heavy}], "vector": [{{"monomial": "e(1/2 a)", "coeff": "1"}}]}}"#)).unwrap();
    let out = run(&["corr", "--voa", "heisenberg", "--twist", "theta", "--emit", "n-point", "--inputs", inputs.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn bad_thread_count_is_a_usage_error() {
    assert_eq!(run_env(&["zhu"], "VOATWIST_THREADS", "0").status.code(), Some(2));
    assert!(run_env(&["zhu"], "VOATWIST_THREADS", "1").status.success());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = ["corr", "--check", "locality", "--voa", "lattice-a1", "--twist", "theta", "--m1", "V{L+a/2}", "--m2", "T+", "--m3", "T-"];
    let first = run(&args);
    let second = run_env(&args, "VOATWIST_THREADS", "2");
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    let v: Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(v["failures"], 0);
    assert!(v["cases"].as_u64().unwrap() > 0);
}

#[test]
fn single_fusion_query_reports_both_routes() {
    let v = json(&run(&["fusion", "--voa", "lattice-a1", "--twist", "theta", "--trunc", "3", "--m1", "V{L+a/2}", "--m2", "T+", "--m3", "T-"]));
    assert_eq!(v["dimension"], 1);
    assert!(v["assumption"].is_string());
}

#[test]
fn config_file_and_out_flag() {
    let cfg = scratch("session.conf");
    std::fs::write(&cfg, "# lattice session\nvoa = lattice-a1\ntwist = theta\ntrunc = 4\n").unwrap();
    let out_path = scratch("zhu.json");
    let out = run(&["zhu", "--config", cfg.to_str().unwrap(), "--out", out_path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["dim"], 2);

    let overridden = json(&run(&["zhu", "--config", cfg.to_str().unwrap(), "--voa", "heisenberg"]));
    assert_eq!(overridden["dim"], 1);

    std::fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(run(&["zhu", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn emitted_four_point_function_has_the_current_form() {
    let inputs = scratch("inputs.json");
    std::fs::write(&inputs, r#"{"states": [[{"monomial": "a[-1]", "coeff": "1"}]], "vector": [{"monomial": "e(1/2 a)", "coeff": "1"}]}"#).unwrap();
    let out = run(&["corr", "--voa", "heisenberg", "--twist", "theta", "--emit", "n-point", "--inputs", inputs.to_str().unwrap(), "--format", "text"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("z1^(-1/2)") && text.contains("w^(1/2)") && text.contains("(z1-w)"), "{text}");
}

#[test]
fn fusion_table_renders_as_latex() {
    let out = run(&["fusion", "--table", "--trunc", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("\\begin{tabular}"));
    let values: Vec<&str> = text.lines().filter(|l| l.ends_with("yes \\\\")).map(|l| l.split(" & ").nth(3).unwrap()).collect();
    assert_eq!(values, ["1", "1", "0", "0", "1", "0", "1", "1", "0"]);
}
