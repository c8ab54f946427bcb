//! End-to-end tests of the `secidx` binary: exit codes, JSON reports, and
//! the property that every file one command writes is accepted by the
//! commands that read it.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("secidx-cli-{}-{tag}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn secidx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_secidx"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(output: &Output) -> serde_json::Value {
    serde_json::from_slice(&output.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON: {e}\nstdout: {}\nstderr: {}",
            String::from_utf8_lossy(&output.stdout),
            String::from_utf8_lossy(&output.stderr)
        )
    })
}

const XOR_INSTANCE: &str = r#"{"t":2,"p":2,"side_info":[[2],[1]],"msg_len":[1,1]}"#;

#[test]
fn minrank_gotp_verify_reduce_pipeline() {
    let dir = temp_dir("pipeline");
    let instance = dir.join("xor.json");
    fs::write(&instance, XOR_INSTANCE).unwrap();
    let keys = dir.join("keys.json");
    fs::write(&keys, r#"{"l_k":1,"l_ki":[0,0],"l_w":0}"#).unwrap();

    // minrank writes a conventional witness file
    let witness = dir.join("witness.json");
    let out = secidx(&[
        "minrank",
        instance.to_str().unwrap(),
        "--out",
        witness.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rep = report(&out);
    assert_eq!(rep["l_star"], 1);
    assert!(witness.exists());

    // gotp consumes that witness as the inner code and writes a secure code
    let code = dir.join("code.json");
    let out = secidx(&[
        "gotp",
        instance.to_str().unwrap(),
        keys.to_str().unwrap(),
        "--conv",
        witness.to_str().unwrap(),
        "--out",
        code.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rep = report(&out);
    assert_eq!(rep["l"], 1);
    assert_eq!(rep["rate"]["r_k"], "1");

    // verify passes on the emitted code
    let out = secidx(&["verify", code.to_str().unwrap(), "--metric", "all"]);
    assert_eq!(out.status.code(), Some(0));
    let rep = report(&out);
    assert_eq!(rep["pass"], true);
    assert_eq!(rep["perfect"], true);
    assert_eq!(rep["tv"], "0");
    assert_eq!(rep["perr"], "0");

    // reduce writes standard form + conventional code
    let prefix = dir.join("reduced");
    let out = secidx(&[
        "reduce",
        code.to_str().unwrap(),
        "--out",
        prefix.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rep = report(&out);
    assert_eq!(rep["l"], 1);
    assert_eq!(rep["l_k"], 1);
    assert_eq!(rep["reduced_msg_len"], serde_json::json!([1, 1]));
    let standard = format!("{}.standard.json", prefix.display());
    let conventional = format!("{}.conventional.json", prefix.display());
    assert!(PathBuf::from(&standard).exists());
    assert!(PathBuf::from(&conventional).exists());

    // the standard form is itself a valid code file
    let out = secidx(&["verify", &standard, "--metric", "perfect"]);
    assert_eq!(out.status.code(), Some(0));

    // the extracted conventional code feeds gotp again (round trip)
    let out = secidx(&[
        "gotp",
        instance.to_str().unwrap(),
        keys.to_str().unwrap(),
        "--conv",
        &conventional,
    ]);
    assert_eq!(out.status.code(), Some(0));

    // report runs every metric plus a seeded Monte-Carlo cross-check
    let out = secidx(&[
        "report",
        code.to_str().unwrap(),
        "--mc-samples",
        "1000",
        "--seed",
        "42",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rep = report(&out);
    assert_eq!(rep["perfect"], true);
    assert_eq!(rep["decode"], true);
    assert_eq!(rep["perr_mc"], 0.0);
}

#[test]
fn exit_one_on_bad_input() {
    let dir = temp_dir("badinput");
    let bad = dir.join("bad.json");
    fs::write(&bad, "{ not json").unwrap();
    let out = secidx(&["minrank", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));

    let missing = dir.join("missing.json");
    let out = secidx(&["verify", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));

    // self-loop instance: distinct diagnostic, same exit class
    let selfloop = dir.join("selfloop.json");
    fs::write(
        &selfloop,
        r#"{"t":1,"p":2,"side_info":[[1]],"msg_len":[1]}"#,
    )
    .unwrap();
    let out = secidx(&["minrank", selfloop.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("its own message"));
}

#[test]
fn exit_two_on_cap_exceeded() {
    let dir = temp_dir("cap");
    let instance = dir.join("xor.json");
    fs::write(&instance, XOR_INSTANCE).unwrap();
    let out = secidx(&["minrank", instance.to_str().unwrap(), "--cap", "1"]);
    assert_eq!(out.status.code(), Some(2));

    // the SECIDX_CAP environment variable has the same effect
    let out = Command::new(env!("CARGO_BIN_EXE_secidx"))
        .args(["minrank", instance.to_str().unwrap()])
        .env("SECIDX_CAP", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_three_on_infeasible_keys() {
    let dir = temp_dir("infeasible");
    let instance = dir.join("one.json");
    fs::write(&instance, r#"{"t":1,"p":2,"side_info":[[]],"msg_len":[2]}"#).unwrap();
    let keys = dir.join("keys.json");
    fs::write(&keys, r#"{"l_k":1,"l_ki":[0],"l_w":0}"#).unwrap();
    let out = secidx(&["gotp", instance.to_str().unwrap(), keys.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let rep = report(&out);
    assert_eq!(rep["feasible"], false);
    assert!(rep["reason"]
        .as_str()
        .unwrap()
        .contains("l_k < required code length"));
}

#[test]
fn exit_three_on_failed_verification() {
    let dir = temp_dir("leaky");
    // table code that just reveals the message: decodes fine, leaks fully
    let code = dir.join("leaky.json");
    fs::write(
        &code,
        r#"{
            "p": 2,
            "instance": {"t":1,"p":2,"side_info":[[]],"msg_len":[1]},
            "keys": {"l_k":0,"l_ki":[0],"l_w":0},
            "l": 1,
            "encoder": [0, 1]
        }"#,
    )
    .unwrap();
    let out = secidx(&["verify", code.to_str().unwrap(), "--metric", "perfect"]);
    assert_eq!(out.status.code(), Some(3));
    let rep = report(&out);
    assert_eq!(rep["perfect"], false);
    assert_eq!(rep["witness"]["m"], serde_json::json!([0]));
    assert_eq!(rep["witness"]["m_prime"], serde_json::json!([1]));

    // decoding still passes for this code
    let out = secidx(&["verify", code.to_str().unwrap(), "--metric", "decode"]);
    assert_eq!(out.status.code(), Some(0));

    // the leak also shows up in the distance and information metrics
    let out = secidx(&["verify", code.to_str().unwrap(), "--metric", "strong"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(report(&out)["tv"], "1/2");

    let out = secidx(&["verify", code.to_str().unwrap(), "--metric", "weak"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(report(&out)["mi_bits"].as_f64().unwrap() > 0.9);
}

#[test]
fn strong_and_weak_metrics_pass_on_secure_codes() {
    let dir = temp_dir("metrics");
    let instance = dir.join("xor.json");
    fs::write(&instance, XOR_INSTANCE).unwrap();
    let keys = dir.join("keys.json");
    fs::write(&keys, r#"{"l_k":1,"l_ki":[0,0],"l_w":0}"#).unwrap();
    let code = dir.join("code.json");
    let out = secidx(&[
        "gotp",
        instance.to_str().unwrap(),
        keys.to_str().unwrap(),
        "--out",
        code.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));

    for metric in ["strong", "weak"] {
        let out = secidx(&["verify", code.to_str().unwrap(), "--metric", metric]);
        assert_eq!(out.status.code(), Some(0), "metric {metric}");
        assert_eq!(report(&out)["pass"], true);
    }
}

#[test]
fn cone_verdicts_and_exit_codes() {
    let dir = temp_dir("cone");
    let instance = dir.join("xor.json");
    fs::write(&instance, XOR_INSTANCE).unwrap();

    let out = secidx(&["cone", instance.to_str().unwrap(), "1,1,1,0,0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["verdict"], "in-cone");

    let out = secidx(&["cone", instance.to_str().unwrap(), "2,2,1,0,0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["verdict"], "out-of-cone");

    // two unit messages with no side information cannot reach rate (1, 1):
    // the witness search exhausts its scales and stays undecided
    let empty = dir.join("empty.json");
    fs::write(
        &empty,
        r#"{"t":2,"p":2,"side_info":[[],[]],"msg_len":[1,1]}"#,
    )
    .unwrap();
    let out = secidx(&[
        "cone",
        empty.to_str().unwrap(),
        "1,1,1,0,0",
        "--max-scale",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out)["verdict"], "undecided");
}

#[test]
fn nonlinear_minrank_matches_linear_on_xor() {
    let dir = temp_dir("nonlinear");
    let instance = dir.join("xor.json");
    fs::write(&instance, XOR_INSTANCE).unwrap();
    let witness = dir.join("table.json");
    let out = secidx(&[
        "minrank",
        instance.to_str().unwrap(),
        "--nonlinear",
        "--out",
        witness.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["l_star"], 1);

    // the table witness decodes with zero error
    let out = secidx(&["verify", witness.to_str().unwrap(), "--metric", "decode"]);
    assert_eq!(out.status.code(), Some(0));
}
