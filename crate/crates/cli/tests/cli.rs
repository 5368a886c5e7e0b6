use std::path::Path;
use std::process::{Command, Output};

use exotic_core::series::{delta_sigma, ForestSeries, JsonSeries};
use exotic_core::stochastic::exact_flow_character;

fn exotic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_exotic")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = exotic(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn golden_outputs_are_stable() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("golden");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let body = std::fs::read_to_string(&path).unwrap();
        let (head, expected) = body.split_once('\n').unwrap();
        let args: Vec<String> = serde_json::from_str(head.strip_prefix("# ").unwrap()).unwrap();
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        assert_eq!(stdout(&args), expected, "{}", path.display());
        count += 1;
    }
    assert!(count >= 20);
}

#[test]
fn verify_suites_pass() {
    for suite in ["hopf", "ibp", "laws", "paper-tables"] {
        let text = stdout(&["verify", "--suite", suite]);
        assert!(text.contains(" 0 failed"), "{suite}: {text}");
    }
}

#[test]
fn json_round_trip() {
    let text = stdout(&["--format", "json", "exact-flow", "--order", "3"]);
    let j: JsonSeries = serde_json::from_str(&text).unwrap();
    let s = ForestSeries::from_json(&j).unwrap();
    assert_eq!(s, delta_sigma(&exact_flow_character(3).unwrap()));

    let path = std::env::temp_dir().join(format!("exotic-roundtrip-{}.json", std::process::id()));
    std::fs::write(&path, &text).unwrap();
    let arg = format!("@{}", path.display());
    let back = stdout(&["--format", "json", "ibp", "--series", &arg, "--gradient"]);
    std::fs::remove_file(&path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&back).unwrap();
    assert!(v.get("trees").is_some() && v.get("residual").is_some());
}

#[test]
fn inline_series_matches_single_forest() {
    let a = stdout(&["quadrature", "--series", "2*b[b]; -1/2*b[1,1]"]);
    let b = stdout(&["quadrature", "--forest", "b[b]"]);
    let c = stdout(&["quadrature", "--forest", "b[1,1]"]);
    let v = |s: &str| s.trim().parse::<f64>().unwrap();
    assert!((v(&a) - (2.0 * v(&b) - 0.5 * v(&c))).abs() < 1e-12);
}

#[test]
fn latex_output() {
    let text = stdout(&["--format", "latex", "exact-flow", "--order", "1"]);
    assert!(text.contains("\\forest{b}"), "{text}");
}

#[test]
fn tableau_file_matches_builtin() {
    let path = std::env::temp_dir().join(format!("exotic-tableau-{}.json", std::process::id()));
    std::fs::write(&path, r#"{"a": [["0"]], "b": ["1"], "d": ["0"], "d0": "1"}"#).unwrap();
    let file = stdout(&["srk-character", "--tableau", path.to_str().unwrap(), "--order", "3"]);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(file, stdout(&["srk-character", "--method", "em", "--order", "3"]));
}

#[test]
fn simulation_is_reproducible() {
    let args = ["simulate", "--h", "1/5", "--steps", "2000", "--trajectories", "2", "--seed", "11"];
    assert_eq!(stdout(&args), stdout(&args));
}

#[test]
fn bad_input_exits_with_usage_code() {
    for args in [
        vec!["sigma", "--forest", "b[b"],
        vec!["enumerate", "--order", "2", "--filter", "nope"],
        vec!["bea", "--method", "nope"],
        vec!["verify", "--suite", "nope"],
        vec!["coproduct", "--kind", "bck", "--forest", "b", "--decorations", "b,w"],
        vec!["no-such-command"],
    ] {
        let out = exotic(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}
