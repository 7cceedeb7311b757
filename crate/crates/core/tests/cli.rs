use std::path::Path;
use std::process::{Command, Output};

use branch_learn::bench::Report;
use branch_learn::data::Dataset;
use branch_learn::predictor::TrainedModel;
use serde_json::Value;

fn blc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blc")).args(args).output().unwrap()
}

fn ok_json(args: &[&str]) -> Value {
    let out = blc(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn error_of(out: &Output) -> (i32, String) {
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    (out.status.code().unwrap(), v["error"]["kind"].as_str().unwrap().to_string())
}

fn s(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

#[test]
fn errors_are_json_on_stderr() {
    let (code, kind) = error_of(&blc(&["frobnicate"]));
    assert_eq!((code, kind.as_str()), (2, "usage"));
    let (code, kind) = error_of(&blc(&["eval", "--data", "/no/such/file.json", "--model", "/no/model.json"]));
    assert_eq!((code, kind.as_str()), (1, "io_error"));

    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.json");
    ok_json(&["generate", "--problem", "mcvc", "--topology", "abilene", "--n", "10", "--out", &s(&data)]);
    let out = blc(&["train", "--data", &s(&data), "--correction", "B", "--out", &s(&dir.path().join("m.json"))]);
    assert_eq!(error_of(&out), (1, "invalid_argument".to_string()));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"problem\": 3}").unwrap();
    let out = blc(&["train", "--data", &s(&bad), "--out", &s(&dir.path().join("m.json"))]);
    assert_eq!(error_of(&out).0, 1);
}

#[test]
fn generate_train_eval_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let (data, model, dump, eval) = (dir.path().join("d.json"), dir.path().join("m.json"), dir.path().join("l.json"), dir.path().join("e.json"));
    let g = ok_json(&["generate", "--problem", "maxflow", "--topology", "polska", "--n", "20", "--noise", "2", "--out", &s(&data)]);
    assert_eq!(g["instances"], 20);
    let ds = Dataset::load(&data).unwrap();
    assert_eq!(ds.len(), 20);

    ok_json(&[
        "train", "--data", &s(&data), "--correction", "B", "--penalty", "I", "--max-passes", "1", "--i0", "-50,50",
        "--out", &s(&model), "--dump-loss", &s(&dump),
    ]);
    let trained = TrainedModel::from_json(&std::fs::read_to_string(&model).unwrap()).unwrap();
    let events: Vec<Value> = serde_json::from_str(&std::fs::read_to_string(&dump).unwrap()).unwrap();
    assert_eq!(events.len() + 1, trained.loss_history.len());
    assert!(events.iter().all(|e| e["loss"].is_object() || e["loss"].is_array()));

    ok_json(&["eval", "--data", &s(&data), "--model", &s(&model), "--correction", "B", "--penalty", "I", "--out", &s(&eval)]);
    let e: Value = serde_json::from_str(&std::fs::read_to_string(&eval).unwrap()).unwrap();
    assert_eq!(e["regrets"].as_array().unwrap().len(), 20);
    let last = *trained.loss_history.last().unwrap();
    assert!((e["mean"].as_f64().unwrap() - last).abs() <= 1e-6);
}

#[test]
fn bench_then_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bench");
    ok_json(&[
        "bench", "--problem", "knapsack", "--n", "30", "--noise", "10", "--seeds", "1,2", "--max-passes", "1", "--out", &s(&out),
    ]);
    for f in ["report.json", "report.csv", "timings.csv", "report.txt"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let report = Report::from_json(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report.rows.len(), 3);
    assert_eq!(report.seeds, vec![1, 2]);

    let text = dir.path().join("table.txt");
    ok_json(&["report", "--input", &s(&out.join("report.json")), "--out", &s(&text)]);
    let rendered = std::fs::read_to_string(&text).unwrap();
    for label in ["B&L-C", "B&L", "Ridge"] {
        assert!(rendered.contains(label), "{rendered}");
    }
    assert_eq!(rendered, report.to_text(false));
}
