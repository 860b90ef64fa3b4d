use std::process::{Command, Output};

fn hfkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hfkit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn results(out: &Output) -> serde_json::Value {
    let report: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("stdout is a JSON report");
    report["results"].clone()
}

#[test]
fn compile_example_emits_a_term() {
    let out = hfkit(&["compile", "--formula", "x1 in x2", "--vars", "x1,x2"]);
    assert!(out.status.success());
    let r = results(&out);
    assert_eq!(r["term"], "(in (var A_x1) (var A_x2))");
}

#[test]
fn delta_example_round_trips() {
    let out = hfkit(&["fullmodel", "delta", "--bits", "1011"]);
    assert!(out.status.success());
    let r = results(&out);
    assert_eq!(r["decoded"], "1011");
    assert_eq!(r["round_trip"], true);
}

#[test]
fn sep_reports_the_stage_bound() {
    let out = hfkit(&[
        "sep",
        "--formula",
        "x1 in x2 & ~(x1 = x3)",
        "--vars",
        "x1,x2,x3",
        "--var",
        "x1",
    ]);
    assert!(out.status.success());
    let r = results(&out);
    assert!(r["stage_bound"].as_u64().unwrap() >= 2);
    assert_eq!(r["params"], serde_json::json!(["x2", "x3"]));
}

#[test]
fn usage_errors_exit_two() {
    let out = hfkit(&["compile", "--formula", "x1 in ((", "--vars", "x1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = hfkit(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn budget_exceedance_exits_three_with_partial_report() {
    let out = hfkit(&[
        "eval-term",
        "--term",
        "(times (times (var x) (var x)) (times (var x) (var x)))",
        "--env",
        "x=4",
        "--budget-elems",
        "50",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["error"], "budget exceeded");
}

#[test]
fn suite_passes_and_is_deterministic() {
    let a = hfkit(&["suite"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(results(&a)["failures"], 0);
    let b = hfkit(&["suite"]);
    assert_eq!(a.stdout, b.stdout, "reports must be byte-identical");
}

#[test]
fn erec_run_evaluates_terms_from_files() {
    let dir = std::env::temp_dir().join("hfkit-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("skk.term");
    std::fs::write(
        &path,
        "(app (app (app (idx s) (idx k)) (idx k)) (const {0,{1}}))",
    )
    .unwrap();
    let out = hfkit(&["erec", "run", "--term", path.to_str().unwrap(), "--fuel", "1000"]);
    assert!(out.status.success());
    let r = results(&out);
    assert_eq!(r["outcome"]["kind"], "value");
    assert_eq!(r["outcome"]["value"], "{0,{1}}");
}

#[test]
fn realize_check_and_kripke_defaults_work() {
    let out = hfkit(&[
        "realize",
        "check",
        "--realizer",
        "{}",
        "--formula",
        "0 in 1",
        "--variant",
        "wt",
    ]);
    assert!(out.status.success());
    assert_eq!(results(&out)["verdict"], "realized");

    let out = hfkit(&[
        "kripke",
        "--check",
        "a = b | ~(a = b)",
        "--assign",
        "a=a,b=b",
    ]);
    assert!(out.status.success());
    let r = results(&out);
    assert_eq!(r["violations"].as_array().unwrap().len(), 0);
    assert_eq!(r["check"]["results"][0]["forced"], false);
    assert_eq!(r["check"]["results"][1]["forced"], true);
}
