use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_greedylab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8")
}

#[test]
fn norm_of_two_ones_in_l_half() {
    let o = run(&["norm", "--space", "lp:0.5", "--vec", "1@1,1@2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "4");
}

#[test]
fn norm_json() {
    let o = run(&["norm", "--space", "lp:2", "--vec", "3@1,4@2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["norm"], 5.0);
    assert_eq!(v["vector"], "3@1,4@2");
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["norm", "--space", "lp:-1", "--vec", "1@1"][..],
        &["norm", "--space", "lp:1", "--vec", "1@0"],
        &["norm", "--space", "lp:1"],
        &["frobnicate"],
        &["examples", "--name", "nope"],
        &["verify", "--space", "lp:1", "--checks", "nope"],
        &["norm", "--space", "lp:1", "--vec", "1@1", "--format", "xml"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    let o = run(&["norm", "--space", "lp:-1", "--vec", "1@1"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("--space"));
}

#[test]
fn verify_emits_csv() {
    let o = run(&["verify", "--space", "dsum(lp:1,lp:2)", "--dim", "8", "--seed", "7", "--format", "csv", "--samples", "50"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("check_id,space,lhs,rhs,margin,status,witness_ref"));
    assert!(lines.all(|l| l.contains(",pass,") || l.contains("skipped(")));
}

#[test]
fn verify_is_deterministic() {
    let args = ["verify", "--space", "lp:0.5", "--space", "vp:0.5", "--dim", "5", "--samples", "30", "--format", "json"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn kt_example_json() {
    let o = run(&["examples", "--name", "kt-not-qg", "--q", "2", "--N", "4096", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["N"], 4096);
    assert!(v["ratio"].as_f64().unwrap() > 1.0);
    assert_eq!(v["digest"].as_str().unwrap().len(), 64);
}

#[test]
fn every_example_runs() {
    for (name, extra) in [
        ("vp-alternating", &["--m", "64"][..]),
        ("lplq", &["--m", "16"]),
        ("hilbert", &["--N", "4"]),
        ("kt-qg-bound", &["--dim", "16", "--budget-random", "20"]),
        ("garling-escape", &["--p", "0.5", "--N", "2"]),
        ("t-eta", &["--budget-random", "20", "--N", "10"]),
    ] {
        let mut args = vec!["examples", "--name", name, "--format", "csv"];
        args.extend_from_slice(extra);
        let o = run(&args);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(stdout(&o).starts_with("key,value\n"), "{name}");
    }
}

#[test]
fn other_commands() {
    let o = run(&["greedy", "--space", "lp:1", "--vec", "1@1,-3@2,2@3", "--m", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["ordering"], serde_json::json!([2, 3, 1]));
    assert_eq!(v["projection"], "-3@2,2@3");

    let o = run(&["sigma", "--space", "lp:2", "--vec", "3@1,2@2,1@3", "--m", "1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["sigma"].as_f64().unwrap() - 5f64.sqrt()).abs() < 1e-12);

    let o = run(&["constants", "--space", "lp:1", "--dim", "4", "--kinds", "C_qg,Gamma", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["estimates"][0]["value"], 1.0);

    let o = run(&["democracy", "--space", "lp:0.5", "--dim", "4", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["phi_u"][1], 4.0);

    let o = run(&["weights", "--weight", "const:1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["predicates"]["urp"], false);
    assert_eq!(v["hardy_harmonic_prefixes"]["strictly_increasing"], true);

    let o = run(&["renorm", "--space", "lp:0.5", "--kind", "trunc1", "--dim", "6", "--budget-random", "40"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["renorm", "--space", "lp:1", "--kind", "chain0", "--vec", "1@1,-2@2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["value"].as_f64().unwrap() >= 3.0 - 1e-12);
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("greedylab-cli-test-{}.json", std::process::id()));
    let p = path.to_str().unwrap();
    let o = run(&["norm", "--space", "lp:1", "--vec", "1@1,1@2", "--format", "json", "--out", p]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["norm"], 2.0);
    std::fs::remove_file(path).unwrap();
}
