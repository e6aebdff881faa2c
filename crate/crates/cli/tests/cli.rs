use std::process::{Command, Output};

const ALPHA_INV: &str = "t^-3 + 1 + t + t^2";

fn ascoder(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ascoder"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = ascoder(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap().trim_end().to_string()
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut args = args.to_vec();
    args.push("--json");
    serde_json::from_str(&stdout(&args)).unwrap()
}

#[test]
fn documented_examples() {
    assert_eq!(stdout(&["vhat", "--field", "3", ALPHA_INV]), "Finite(1)");
    assert_eq!(
        stdout(&["choose-n", "--field", "3", "--alpha-inv", ALPHA_INV]),
        "{C: 3, D: 1, k: 0, N: 2}"
    );
    assert_eq!(stdout(&["check", "--field", "3", "--alpha", "t", "--m", "4", "--n", "4"]), "true");
    let report = json(&["scan", "--field", "3", "--alpha-inv", ALPHA_INV, "--N", "1", "--bound", "4"]);
    let mismatches = report["mismatches"].as_array().unwrap();
    assert!(mismatches.contains(&serde_json::json!([2, 1, true, false])));
    assert_eq!(report["checked"], 16);
}

#[test]
fn solver_outputs() {
    assert_eq!(
        stdout(&["solve-as", "--field", "3", "t^-1"]),
        "Unsolvable(NonPDivisibleNegativeValuation(-1))"
    );
    assert_eq!(stdout(&["solve-as", "--field", "3", "1"]), "Unsolvable(TraceObstruction(1))");
    assert_eq!(
        stdout(&["solve-as", "--field", "3", "--alpha", "t", "--m", "18", "--n", "2"]),
        "Solvable(t^-6 + t^-2)"
    );
    let out = json(&["solve-as", "--field", "3", "--alpha-inv", ALPHA_INV, "--m", "2", "--n", "1", "--prec", "30"]);
    assert_eq!(out["outcome"], "Solvable");
    assert_eq!(out["witness"]["prec"], 30);
    assert_eq!(out["verified_to"], 30);
}

#[test]
fn valuations_and_eval() {
    assert_eq!(stdout(&["vt", "--field", "3", ALPHA_INV]), "Finite(-3)");
    assert_eq!(stdout(&["vt", "--field", "3", "--alpha-inv", ALPHA_INV]), "Finite(3)");
    assert_eq!(stdout(&["vhat", "--field", "3", "--alpha-inv", ALPHA_INV]), "Finite(7)");
    assert_eq!(stdout(&["vhat", "--field", "2", "t^2 + t^4"]), "AtLeast(inf)");
    assert_eq!(stdout(&["vt", "--field", "2", "O(t^5)"]), "AtLeast(5)");
    assert_eq!(
        stdout(&["eval", "--field", "9", "(g+1)*t^-2 + g*g + t^2*t + O(t^7)"]),
        "(g+1)*t^-2 + 2 + t^3 + O(t^7)"
    );
    assert_eq!(stdout(&["eval", "--field", "3", "t^-1 + t + t^4", "--prec", "3"]), "t^-1 + t + O(t^3)");
    let v = json(&["vhat", "--field", "3", ALPHA_INV]);
    assert_eq!(v, serde_json::json!({"kind": "Finite", "value": 1}));
}

#[test]
fn text_and_json_agree() {
    for (m, n) in [(2, 1), (3, 1), (4, 2), (9, 3)] {
        let (m, n) = (m.to_string(), n.to_string());
        let args = ["check", "--field", "3", "--alpha-inv", ALPHA_INV, "--m", &m, "--n", &n];
        let text = stdout(&args);
        let value = json(&args);
        assert_eq!(value["verdict"].to_string(), text);
        assert_eq!(value["N"], 2);
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["scan", "--field", "9", "--alpha-inv", "t^-6 + g + t^5", "--bound", "6", "--json"];
    assert_eq!(ascoder(&args).stdout, ascoder(&args).stdout);
    let demo = ["demo-counterexample", "--json"];
    assert_eq!(ascoder(&demo).stdout, ascoder(&demo).stdout);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| ascoder(args).status.code();
    assert_eq!(code(&["--help"]), Some(0));
    assert_eq!(code(&["bogus"]), Some(1));
    assert_eq!(code(&["vt", "--field", "6", "t"]), Some(1));
    assert_eq!(code(&["vt", "--field", "3", "t^"]), Some(1));
    assert_eq!(code(&["vt", "t"]), Some(1));
    assert_eq!(code(&["choose-n", "--field", "3", "--alpha", "t^-1"]), Some(1));
    assert_eq!(code(&["check", "--field", "3", "--alpha", "t"]), Some(1));
    assert_eq!(code(&["eval", "--field", "3", "t", "--bound", "3"]), Some(1));
    assert_eq!(
        code(&["check", "--field", "3", "--alpha-inv", ALPHA_INV, "--m", "40", "--n", "3", "--prec", "2"]),
        Some(2)
    );
    assert_eq!(code(&["demo-counterexample"]), Some(0));
    assert_eq!(code(&["demo-counterexample", "--N", "1"]), Some(3));
}

#[test]
fn diagnostics_go_to_stderr() {
    let out = ascoder(&["vt", "--field", "3", "t^"]);
    assert!(out.stdout.is_empty());
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with("error:"));
}
