//! End-to-end checks of the `rediswap` binary: exit codes, file formats,
//! and byte-for-byte reproducibility.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rediswap"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(output: &Output) -> serde_json::Value {
    serde_json::from_slice(&output.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&output.stdout)
        )
    })
}

const EXAMPLE_SLOT: &str = r#"{
  "pool": {"curve": {"type": "constant_product", "k": 400}, "reserves": [4, 100], "fee": 0.0},
  "orders": [
    {"side": "XY", "delta_in": 8, "delta_out": 25, "owner": "u1"},
    {"side": "XY", "delta_in": 30, "delta_out": 12, "owner": "u2"},
    {"side": "YX", "delta_in": 20, "delta_out": 10, "owner": "u3"}
  ],
  "reports": [{"arb": 1, "q": 4.0}, {"arb": 2, "q": 1.0}],
  "seed": 0
}"#;

#[test]
fn demo_exits_zero_and_emits_golden_json() {
    let output = run(&["demo", "--output", "json"]);
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let json = stdout_json(&output);
    assert_eq!(json["optimal"]["optimal_mev"], 151.0);
    assert_eq!(json["optimal"]["potential_s0"], 36.0);
    assert_eq!(json["rediswap"]["lp_refund"], 36.0);
}

#[test]
fn demo_detects_a_corrupted_curve_constant() {
    let output = run(&["demo", "--curve-k", "401"]);
    assert_eq!(output.status.code(), Some(1), "{}", String::from_utf8_lossy(&output.stderr));
    assert!(String::from_utf8_lossy(&output.stderr).contains("golden values failed"));
}

#[test]
fn mechanism_runs_the_worked_examples() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("slot.json");
    std::fs::write(&input, EXAMPLE_SLOT).unwrap();

    let output = run(&["mechanism", "--input", input.to_str().unwrap(), "--mech", "rediswap"]);
    assert!(output.status.success());
    let json = stdout_json(&output);
    assert_eq!(json["payments"][0]["arb"], 1);
    assert_eq!(json["payments"][0]["amount"], 18.0);
    assert_eq!(json["payments"][1]["amount"], 36.0);
    assert_eq!(json["lp_refund"], 36.0);
    assert_eq!(json["refunds"][1]["amount"], 18.0);
    assert_eq!(json["audit"][3]["item"], "initial-state");

    let output = run(&["mechanism", "--input", input.to_str().unwrap(), "--mech", "strawman"]);
    assert!(output.status.success());
    let json = stdout_json(&output);
    assert_eq!(json["payments"][0]["amount"], 92.0);
    assert_eq!(json["audit"][0]["item"], "all-opportunities");
}

#[test]
fn mechanism_maps_domain_and_schema_errors_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // no reports: domain error, exit 1
    let input = dir.path().join("empty.json");
    std::fs::write(
        &input,
        r#"{"pool": {"curve": {"reserves": [4, 100]}}, "orders": [], "reports": []}"#,
    )
    .unwrap();
    let output = run(&["mechanism", "--input", input.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("no arbitrageur reports"));

    // malformed JSON: exit 2
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let output = run(&["mechanism", "--input", bad.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));

    // missing file: exit 2
    let output = run(&["mechanism", "--input", dir.path().join("nope.json").to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn probe_exit_codes_follow_the_verdict() {
    let output = run(&["probe", "--probe", "sybil", "--mech", "rediswap", "--trials", "60", "--seed", "5"]);
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let json = stdout_json(&output);
    assert_eq!(json["probe"], "sybil");
    assert_eq!(json["trials"], 60);
    assert!(json["witness"].is_null());

    let output = run(&["probe", "--probe", "sybil", "--mech", "strawman", "--trials", "60", "--seed", "5"]);
    assert_eq!(output.status.code(), Some(1));
    let json = stdout_json(&output);
    assert!(json["max_violation"].as_f64().unwrap() > 0.0);
    assert!(json["witness"].is_object(), "witness should be printed");
}

#[test]
fn probe_truthfulness_passes_for_both_mechanisms() {
    for mech in ["rediswap", "strawman"] {
        let output = run(&["probe", "--probe", "truthfulness", "--mech", mech, "--trials", "60"]);
        assert!(output.status.success(), "{mech}");
    }
}

#[test]
fn probe_rejects_zero_trials() {
    let output = run(&["probe", "--probe", "sybil", "--trials", "0"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn replay_synthetic_writes_reproducible_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    // same seed, different worker counts: outputs must match byte for byte
    for (out, threads) in [(&out_a, "1"), (&out_b, "3")] {
        let output = bin()
            .args([
                "replay",
                "--synthetic",
                "40",
                "--n-arbs",
                "4",
                "--dist",
                "gaussian",
                "--fee",
                "0",
                "--fee",
                "0.003",
                "--seed",
                "9",
                "--out-dir",
                out.to_str().unwrap(),
                "--output",
                "json",
            ])
            .env("REDISWAP_THREADS", threads)
            .output()
            .unwrap();
        assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    }
    let metrics_a = std::fs::read(out_a.join("metrics.csv")).unwrap();
    let metrics_b = std::fs::read(out_b.join("metrics.csv")).unwrap();
    assert_eq!(metrics_a, metrics_b, "metrics.csv differs between identical runs");
    let summary_a = std::fs::read(out_a.join("summary.json")).unwrap();
    let summary_b = std::fs::read(out_b.join("summary.json")).unwrap();
    assert_eq!(summary_a, summary_b);

    let summary: serde_json::Value = serde_json::from_slice(&summary_a).unwrap();
    assert_eq!(summary["blocks"], 40);
    assert_eq!(summary["per_fee"].as_array().unwrap().len(), 2);
    // execution quality degrades (weakly) with the swap fee
    let better_free = summary["per_fee"][0]["better_pct"].as_f64().unwrap();
    let better_fee = summary["per_fee"][1]["better_pct"].as_f64().unwrap();
    assert!(better_fee <= better_free, "{better_fee} > {better_free}");
}

fn write_csvs(dir: &Path, with_candle_for_block_1: bool) {
    std::fs::write(
        dir.join("pools.csv"),
        "block,x,y\n0,1000,4000000\n1,1010,3960396.0396039605\n",
    )
    .unwrap();
    let mut candles = String::from("block,low,high\n0,3995,4010\n");
    if with_candle_for_block_1 {
        candles.push_str("1,3940,3960\n");
    }
    std::fs::write(dir.join("candles.csv"), candles).unwrap();
    std::fs::write(
        dir.join("orders.csv"),
        "block,side,delta_in,delta_out,owner,ref_price\n0,XY,5,19900,alice,3980\n1,YX,8000,2,bob,4000\n",
    )
    .unwrap();
}

#[test]
fn replay_reads_csv_inputs() {
    let dir = tempfile::tempdir().unwrap();
    write_csvs(dir.path(), true);
    let out = dir.path().join("out");
    let output = run(&[
        "replay",
        "--pools",
        dir.path().join("pools.csv").to_str().unwrap(),
        "--candles",
        dir.path().join("candles.csv").to_str().unwrap(),
        "--orders",
        dir.path().join("orders.csv").to_str().unwrap(),
        "--n-arbs",
        "3",
        "--out-dir",
        out.to_str().unwrap(),
        "--output",
        "json",
    ]);
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let summary = stdout_json(&output);
    assert_eq!(summary["blocks"], 2);
    let metrics = std::fs::read_to_string(out.join("metrics.csv")).unwrap();
    assert!(metrics.starts_with("block,fee,orders,filled,better,ties,lvr_without,loss_with,reduction_ratio"));
    assert_eq!(metrics.lines().count(), 3);
}

#[test]
fn replay_missing_candle_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    write_csvs(dir.path(), false);
    let output = run(&[
        "replay",
        "--pools",
        dir.path().join("pools.csv").to_str().unwrap(),
        "--candles",
        dir.path().join("candles.csv").to_str().unwrap(),
        "--orders",
        dir.path().join("orders.csv").to_str().unwrap(),
        "--out-dir",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("missing candle"));
}

#[test]
fn replay_rejects_malformed_csv() {
    let dir = tempfile::tempdir().unwrap();
    write_csvs(dir.path(), true);
    std::fs::write(dir.path().join("orders.csv"), "block,direction\n0,sideways\n").unwrap();
    let output = run(&[
        "replay",
        "--pools",
        dir.path().join("pools.csv").to_str().unwrap(),
        "--candles",
        dir.path().join("candles.csv").to_str().unwrap(),
        "--orders",
        dir.path().join("orders.csv").to_str().unwrap(),
        "--out-dir",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let output = run(&["frobnicate"]);
    assert_eq!(output.status.code(), Some(2));
}
