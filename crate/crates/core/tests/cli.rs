use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn temp_path(label: &str) -> PathBuf {
    std::env::temp_dir().join(format!("qpvar-cli-{label}-{}", std::process::id()))
}

fn qpvar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpvar"))
        .args(args)
        .env_remove("QPVAR_SEED")
        .output()
        .expect("run qpvar")
}

fn json_out(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn validate_e1() {
    let out = qpvar(&["validate", &data("e1.json")]);
    assert_eq!(code(&out), 0);
    assert_eq!(json_out(&out), json!({"qm1": true, "qm2": true, "qm3": true, "t1": false}));
}

#[test]
fn validate_reports_triangle_violation() {
    let out = qpvar(&["validate", &data("bad_triangle.json")]);
    assert_eq!(code(&out), 2);
    let v = json_out(&out);
    assert_eq!(v["qm2"], false);
    assert_eq!(v["violations"]["qm2"], json!(["a", "b", "c"]));
}

#[test]
fn invalid_space_is_rejected_by_solvers() {
    let out = qpvar(&["ekeland-weak", &data("bad_triangle.json"), &data("phi_e3.json")]);
    assert_eq!(code(&out), 2);
    assert_eq!(json_out(&out)["error"], "rejected");
}

#[test]
fn report_lists_order_and_hasse() {
    let out = qpvar(&[
        "report",
        &data("e1.json"),
        "--phi",
        &data("phi_01.json"),
        "--seq",
        "pre=[a];cycle=[b]",
    ]);
    assert_eq!(code(&out), 0);
    let v = json_out(&out);
    assert_eq!(v["order_class"], "partial_order");
    assert_eq!(v["t0"], true);
    assert_eq!(v["t1"], false);
    assert_eq!(v["hasse"]["classes"], json!([["a"], ["b"]]));
    assert_eq!(v["hasse"]["covers"], json!([[0, 1]]));
    assert_eq!(v["phi"]["lsc"], true);
    assert_eq!(v["sequences"][0]["limits"], json!(["a", "b"]));
}

#[test]
fn weak_ekeland_e1() {
    let out = qpvar(&["ekeland-weak", &data("e1.json"), &data("phi_e1_10.json")]);
    assert_eq!(code(&out), 0);
    let v = json_out(&out);
    assert_eq!(v["principle"], "weak-ekeland");
    assert_eq!(v["z"], "b");
    assert!(v["evidence"].is_object());
}

#[test]
fn full_ekeland_e3() {
    let out = qpvar(&[
        "ekeland-full",
        &data("e3.json"),
        &data("phi_e3.json"),
        "--eps",
        "4",
        "--lambda",
        "2",
        "--x0",
        "c",
    ]);
    assert_eq!(code(&out), 0);
    let v = json_out(&out);
    assert_eq!(v["z"], "a");
    assert_eq!(v["evidence"]["gamma"], "2");
}

#[test]
fn full_ekeland_zero_lambda() {
    let out = qpvar(&[
        "ekeland-full",
        &data("e1.json"),
        &data("phi_e1_10.json"),
        "--eps",
        "1",
        "--lambda",
        "0",
        "--x0",
        "a",
    ]);
    assert_eq!(code(&out), 2);
    assert_eq!(json_out(&out)["message"], "lambda must be positive");
    assert!(String::from_utf8_lossy(&out.stderr).contains("lambda must be positive"));
}

#[test]
fn full_ekeland_gap_is_reported() {
    let out = qpvar(&[
        "ekeland-full",
        &data("e3.json"),
        &data("phi_e3.json"),
        "--eps",
        "1",
        "--lambda",
        "1",
        "--x0",
        "c",
    ]);
    assert_eq!(code(&out), 2);
    assert!(json_out(&out)["message"].as_str().unwrap().contains("by 3"));
}

#[test]
fn takahashi_minimizer_and_violation() {
    let out = qpvar(&["takahashi", &data("e1.json"), &data("phi_01.json")]);
    assert_eq!(code(&out), 0);
    assert_eq!(json_out(&out)["z"], "a");

    let out = qpvar(&["takahashi", &data("e2.json"), &data("phi_01.json")]);
    assert_eq!(code(&out), 0);
    assert_eq!(json_out(&out)["z"], "a");

    // S(b) = {b} because 0 + d(a, b) = 1 > 1/2.
    let out = qpvar(&["takahashi", &data("e2.json"), &data("phi_0_half.json")]);
    assert_eq!(code(&out), 2);
    let v = json_out(&out);
    assert_eq!(v["z"], Value::Null);
    assert_eq!(v["evidence"]["witness"], "b");
}

#[test]
fn caristi_single_and_multi() {
    let out = qpvar(&["caristi", &data("e1.json"), &data("phi_01.json"), "--map", &data("map_to_a.json")]);
    assert_eq!(code(&out), 0);
    assert_eq!(json_out(&out)["z"], "a");

    let out = qpvar(&["caristi", &data("e1.json"), &data("phi_01.json"), "--map", &data("map_multi.json")]);
    assert_eq!(code(&out), 0);
    assert_eq!(json_out(&out)["evidence"]["set_valued"], true);

    let out = qpvar(&["caristi", &data("e1.json"), &data("phi_e1_10.json"), "--map", &data("map_to_a.json")]);
    assert_eq!(code(&out), 2);
    assert!(json_out(&out)["message"].as_str().unwrap().contains("`b`"));
}

#[test]
fn equivalence_takes_weak_branch() {
    let out = qpvar(&["equivalence", &data("e3.json"), &data("phi_e3.json")]);
    assert_eq!(code(&out), 0);
    let v = json_out(&out);
    assert_eq!(v["principle"], "equivalence");
    assert_eq!(v["evidence"]["branch"], "weak-ekeland");
}

#[test]
fn improper_objective_is_rejected() {
    let out = qpvar(&["ekeland-weak", &data("e1.json"), &data("phi_inf.json")]);
    assert_eq!(code(&out), 2);
}

#[test]
fn certificates_verify_and_forgeries_do_not() {
    let cert = temp_path("cert.json");
    let out = qpvar(&[
        "ekeland-weak",
        &data("e1.json"),
        &data("phi_e1_10.json"),
        "--out",
        cert.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let out = qpvar(&["verify", cert.to_str().unwrap(), &data("e1.json"), &data("phi_e1_10.json")]);
    assert_eq!(code(&out), 0);
    assert_eq!(json_out(&out)["valid"], true);

    let text = std::fs::read_to_string(&cert).unwrap();
    let mut v: Value = serde_json::from_str(&text).unwrap();
    v["z"] = json!("a");
    std::fs::write(&cert, v.to_string()).unwrap();
    let out = qpvar(&["verify", cert.to_str().unwrap(), &data("e1.json"), &data("phi_e1_10.json")]);
    let _ = std::fs::remove_file(&cert);
    assert_eq!(code(&out), 2);
    assert_eq!(json_out(&out)["valid"], false);
}

#[test]
fn every_command_output_reverifies() {
    let cases: Vec<Vec<String>> = vec![
        vec!["ekeland-weak".into(), data("e3.json"), data("phi_e3.json")],
        vec![
            "ekeland-full".into(),
            data("e3.json"),
            data("phi_e3.json"),
            "--eps".into(),
            "4".into(),
            "--lambda".into(),
            "2".into(),
            "--x0".into(),
            "c".into(),
        ],
        vec!["takahashi".into(), data("e1.json"), data("phi_01.json")],
        vec!["caristi".into(), data("e1.json"), data("phi_zero.json"), "--map".into(), data("map_to_a.json")],
        vec!["equivalence".into(), data("e1.json"), data("phi_e1_10.json")],
    ];
    for (i, args) in cases.iter().enumerate() {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = qpvar(&args);
        assert_eq!(code(&out), 0, "{args:?}");
        let cert = temp_path(&format!("reverify-{i}"));
        std::fs::write(&cert, &out.stdout).unwrap();
        let out = qpvar(&["verify", cert.to_str().unwrap(), args[1], args[2]]);
        let _ = std::fs::remove_file(&cert);
        assert_eq!(code(&out), 0, "{args:?}: {}", String::from_utf8_lossy(&out.stdout));
    }
}

#[test]
fn output_is_byte_stable() {
    let a = qpvar(&["ekeland-weak", &data("e3.json"), &data("phi_e3.json")]);
    let b = qpvar(&["ekeland-weak", &data("e3.json"), &data("phi_e3.json")]);
    assert_eq!(a.stdout, b.stdout);
    let a = qpvar(&["prop-test", "--seed", "5", "--count", "20"]);
    let b = qpvar(&["prop-test", "--seed", "5", "--count", "20"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn seed_falls_back_to_environment() {
    let run = |seed: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_qpvar"));
        cmd.args(["prop-test", "--count", "3", "--group", "2"]);
        match seed {
            Some(s) => cmd.env("QPVAR_SEED", s),
            None => cmd.env_remove("QPVAR_SEED"),
        };
        cmd.output().unwrap()
    };
    let from_env = json_out(&run(Some("99")));
    assert_eq!(from_env["seed"], 99);
    assert_eq!(json_out(&run(None))["seed"], 0);
    assert_eq!(code(&run(Some("not-a-number"))), 2);
}

#[test]
fn mutant_run_fails() {
    let out = qpvar(&["prop-test", "--count", "30", "--mutant", "strict-s", "--group", "4"]);
    assert_eq!(code(&out), 1);
    let v = json_out(&out);
    assert_eq!(v["passed"], false);
    let failure = &v["failures"][0];
    assert!(failure["space"]["d"].is_array());
    assert!(failure["phi"]["phi"].is_object());
}

#[test]
fn incomplete_demo_table() {
    let out = qpvar(&["incomplete-demo", "--n", "3"]);
    assert_eq!(code(&out), 0);
    let v = json_out(&out);
    assert_eq!(v["phi"], json!({"x1": "1", "x2": "1/2", "x3": "1/4"}));
    assert_eq!(v["passed"], true);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&qpvar(&[])), 2);
    assert_eq!(code(&qpvar(&["no-such-command"])), 2);
    assert_eq!(code(&qpvar(&["ekeland-full", &data("e1.json"), &data("phi_01.json")])), 2);
    assert_eq!(code(&qpvar(&["prop-test", "--mutant", "bogus"])), 2);
}
