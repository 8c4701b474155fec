use std::path::Path;
use std::process::{Command, Output};

use capcont::spec::parse_channel_spec;
use capcont_core::channels::truncated_classical_example;
use capcont_core::{tol, ComplexMatrix, QuantumChannel};
use serde_json::Value;

fn capcont(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_capcont"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn diamond_report_envelope() {
    let out = capcont(&[
        "norm", "diamond", "--channel-a", "identity:d=2", "--channel-b", "depolarizing:d=2,p=0.3", "--json",
        "--seed", "5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["seed"], 5);
    assert_eq!(v["command"], "norm diamond");
    assert!(v["tolerances"]["sdp"].is_number());
    let value = v["result"]["value"].as_f64().unwrap();
    assert!((value - 0.45).abs() < 1e-6);
}

#[test]
fn equal_channels_verify_cleanly() {
    let out = capcont(&[
        "verify", "output-entropy", "--channel-a", "erasure:d=2,p=0.2", "--channel-b", "erasure:d=2,p=0.2",
        "--n", "2", "--trials", "5", "--all-reports", "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let reports = v["result"]["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 5 * 6);
    assert!(reports.iter().all(|r| r["margin"].as_f64().unwrap() >= 0.0));
    assert_eq!(reports[0]["meta"]["channels"][0], "erasure:d=2,p=0.2");
}

#[test]
fn violations_exit_two() {
    // with zero slack, rounding at the telescoping equality counts
    let out = capcont(&["verify", "output-entropy", "--random-pairs", "1", "--trials", "20", "--tol-ent", "0", "--json"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert!(v["result"]["violations"].as_u64().unwrap() > 0);
    assert!(v["result"]["min_margin"].as_f64().unwrap() > -1e-12);
}

#[test]
fn far_pairs_are_refused() {
    let out = capcont(&["verify", "corollaries", "--channel-a", "sink:n=4", "--channel-b", "truncated-classical:n=4"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error[domain]"));
}

#[test]
fn demo_csv_columns() {
    let out = capcont(&["demo", "discontinuity", "--n-max", "4", "--csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,diamond_eps,two_over_log_n,classical_lb,quantum_lb,corollary_bound"
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.len() == 6));
    // n = 2 has ε = 2, outside the bound's domain
    assert_eq!(rows[0][5], "");
    assert!(rows[2][5].parse::<f64>().unwrap() > 1.0);
}

#[test]
fn csv_only_for_tables() {
    let out = capcont(&["assisted", "erasure", "--p", "0.3", "--csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error[usage]"));
}

#[test]
fn channel_file_errors() {
    let dir = tempfile::tempdir().unwrap();
    let malformed = write(dir.path(), "bad.json", "{ \"d_in\": 2, ");
    let out = capcont(&["norm", "diamond", "--channel-a", &malformed, "--channel-b", "identity:d=2", "--json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["error"]["code"], "malformed-json");

    let not_tp = write(dir.path(), "tp.json", r#"{"d_in":1,"d_out":1,"kraus":[[[2,0]]]}"#);
    let out = capcont(&["norm", "diamond", "--channel-a", &not_tp, "--channel-b", "identity:d=1", "--json"]);
    assert_eq!(json(&out)["error"]["code"], "tp-violation");

    let swap = r#"{"d_in":2,"d_out":2,"choi":[[1,0],[0,0],[0,0],[0,0],[0,0],[0,0],[1,0],[0,0],[0,0],[1,0],[0,0],[0,0],[0,0],[0,0],[0,0],[1,0]]}"#;
    let not_cp = write(dir.path(), "cp.json", swap);
    let out = capcont(&["norm", "diamond", "--channel-a", &not_cp, "--channel-b", "identity:d=2", "--json"]);
    assert_eq!(json(&out)["error"]["code"], "cp-violation");

    let out = capcont(&["norm", "diamond", "--channel-a", "warp:d=2", "--channel-b", "identity:d=2", "--json"]);
    assert_eq!(json(&out)["error"]["code"], "unknown-channel");
    let out = capcont(&["norm", "diamond", "--channel-a", "erasure:d=2", "--channel-b", "identity:d=2", "--json"]);
    assert_eq!(json(&out)["error"]["code"], "bad-parameter");
}

#[test]
fn truncated_channel_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let ch = truncated_classical_example(4).unwrap();
    let path = write(dir.path(), "m4.json", &serde_json::to_string(&ch).unwrap());
    let read = parse_channel_spec(&path, tol::PSD, tol::TP).unwrap();
    let back = QuantumChannel::from_choi(&read.to_choi()).unwrap();
    assert!(back.to_choi().matrix().max_abs_diff(ch.to_choi().matrix()) < 1e-8);
    for i in 0..4 {
        let x = ComplexMatrix::unit(4, 4, i, (i + 1) % 4);
        assert!(back.apply_operator(&x).max_abs_diff(&ch.apply_operator(&x)) < 1e-8);
    }
}

#[test]
fn information_commands() {
    let dir = tempfile::tempdir().unwrap();
    let bell = write(
        dir.path(),
        "bell.json",
        r#"{"dims":[2,2],"vector":[[0.7071067811865476,0],[0,0],[0,0],[0.7071067811865476,0]]}"#,
    );
    let out = capcont(&["info", "coherent", "--channel", "erasure:d=2,p=0.25", "--state", &bell, "--json"]);
    assert_eq!(out.status.code(), Some(0));
    assert!((json(&out)["result"]["value"].as_f64().unwrap() - 0.5).abs() < 1e-9);

    let out = capcont(&["entropy", "--state", &bell, "--split", "1", "--json"]);
    let v = json(&out);
    assert!(v["result"]["entropy"].as_f64().unwrap().abs() < 1e-9);
    assert!((v["result"]["conditional_entropy"].as_f64().unwrap() + 1.0).abs() < 1e-9);

    let ens = write(
        dir.path(),
        "ens.json",
        r#"{"items":[{"p":0.5,"state":{"dims":[2],"matrix":[[1,0],[0,0],[0,0],[0,0]]}},{"p":0.5,"state":{"dims":[2],"matrix":[[0,0],[0,0],[0,0],[1,0]]}}]}"#,
    );
    let out = capcont(&["info", "holevo", "--channel", "identity:d=2", "--ensemble", &ens, "--json"]);
    assert!((json(&out)["result"]["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn capacity_command() {
    let out = capcont(&[
        "capacity", "coherent", "--channel", "erasure:d=2,p=0.25", "--restarts", "2", "--iters", "300", "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["result"]["best_value"].as_f64().unwrap() - 0.5).abs() < 1e-3);
    assert_eq!(v["result"]["argmax"]["kind"], "state");
}

#[test]
fn assisted_commands() {
    let out = capcont(&["assisted", "bounds", "--q2n", "0.5", "--q2m", "0.7", "--p1", "0.2", "--p2", "0.1", "--json"]);
    let v = json(&out);
    assert!((v["result"]["gap_bound"].as_f64().unwrap() - 0.03).abs() < 1e-12);
    assert!((v["result"]["simulation_upper_bound"].as_f64().unwrap() - 0.6).abs() < 1e-12);

    let out = capcont(&["assisted", "bounds", "--q2n", "0", "--p1", "0.2"]);
    assert_eq!(out.status.code(), Some(1));

    let out = capcont(&["assisted", "erasure", "--json"]);
    let points = json(&out)["result"]["points"].as_array().unwrap().clone();
    assert_eq!(points.len(), 101);
    assert_eq!(points[100]["qb_upper"], 0.0);
}

#[test]
fn unknown_flags_are_rejected() {
    let out = capcont(&["demo", "discontinuity", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
    let out = capcont(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn pretty_output_names_the_seed() {
    let out = capcont(&["assisted", "erasure", "--p", "0.5", "--seed", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# assisted erasure (seed 3)"));
    assert!(text.contains("q2 = 0.5"));
}
