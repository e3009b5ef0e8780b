use std::path::Path;
use std::process::{Command, Output};

fn partlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_partlab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn missing_seed_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", r#"{"scenario": "semicircle", "N": [20], "samples": 5}"#);
    let o = partlab(&["simulate", "--config", &cfg, "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/seed") && stderr(&o).contains("seed is required"), "{}", stderr(&o));
}

#[test]
fn zero_samples_and_unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", r#"{"scenario": "semicircle", "seed": 1, "samples": 0}"#);
    let o = partlab(&["simulate", "--config", &cfg]);
    assert!(stderr(&o).contains("/samples"), "{}", stderr(&o));
    let cfg = write_config(dir.path(), "d.json", r#"{"scenario": "semicircle", "seed": 1, "colour": 3}"#);
    let o = partlab(&["simulate", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("colour"), "{}", stderr(&o));
}

#[test]
fn simulate_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"scenario": "semicircle", "seed": 7, "k": [2, 4], "N": [30], "samples": 40}"#,
    );
    let mut runs = Vec::new();
    for (i, threads) in ["1", "3"].iter().enumerate() {
        let out = dir.path().join(format!("run{i}"));
        let o = partlab(&["simulate", "--config", &cfg, "--threads", threads, "--out-dir", out.to_str().unwrap()]);
        assert!(o.status.code().is_some_and(|c| c <= 1), "{}", stderr(&o));
        let csv = std::fs::read(out.join("semicircle.csv")).unwrap();
        let json = std::fs::read(out.join("semicircle.json")).unwrap();
        runs.push((csv, json));
    }
    assert_eq!(runs[0], runs[1]);
    let csv = String::from_utf8(runs[0].0.clone()).unwrap();
    assert!(csv.starts_with("# partlab results v1\nscenario,method,k,partition,N,t,"));
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn emitted_partitions_parse_back() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", r#"{"scenario": "wick", "N": [2], "k": [2], "samples": 200, "seed": 3}"#);
    let out = dir.path().join("out");
    partlab(&["simulate", "--config", &cfg, "--out-dir", out.to_str().unwrap()]);
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("wick.json")).unwrap()).unwrap();
    let results = json["results"].as_array().unwrap();
    assert!(!results.is_empty());
    for r in results {
        let text = r["partition"].as_str().unwrap();
        let o = partlab(&["partition", "canonical", text]);
        assert_eq!(stdout(&o).trim(), text);
    }
}

#[test]
fn exact_scenario_runs_without_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", r#"{"scenario": "classical-bridge", "law": "bernoulli:1/2"}"#);
    let o = partlab(&["simulate", "--config", &cfg, "--out-dir", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("classical-bridge.csv")).unwrap();
    assert!(csv.lines().skip(2).all(|l| l.contains(",true,")), "{csv}");
}

#[test]
fn predict_gives_closed_forms() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", r#"{"scenario": "semicircle", "k": [4]}"#);
    let o = partlab(&["predict", "--config", &cfg]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["prediction"], 2.0);
    let cfg = write_config(dir.path(), "u.json", r#"{"scenario": "unitary-bm", "k": [1], "t": [1.0]}"#);
    let v: serde_json::Value = serde_json::from_str(&stdout(&partlab(&["predict", "--config", &cfg]))).unwrap();
    assert!((v[0]["prediction"].as_f64().unwrap() - (-0.5f64).exp()).abs() < 1e-12);
}

#[test]
fn partition_operations() {
    let o = partlab(&["partition", "compose", "{1 2}{1' 2'}", "{1 2}{1' 2'}"]);
    assert_eq!(stdout(&o), "{1 2}{1' 2'}\nkappa 1\n");
    let o = partlab(&["partition", "transpose", "{1 2 1'}{2'}"]);
    assert_eq!(stdout(&o).trim(), "{1 1' 2'}{2}");
    let o = partlab(&["partition", "canonical", "{1 2'"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn transform_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.json");
    std::fs::write(
        &m,
        r#"{"format": "partlab-table/1", "kind": "moments", "alphabet": ["a"],
            "entries": [{"partition": "{1 1'}", "word": ["a"], "value": "1/2"},
                        {"partition": "{1}{1'}", "word": ["a"], "value": "1/3"}]}"#,
    )
    .unwrap();
    let k = dir.path().join("k.json");
    let back = dir.path().join("back.json");
    let p = |x: &Path| x.to_str().unwrap().to_string();
    let o = partlab(&["transform", "--op", "m2k", "--input", &p(&m), "--output", &p(&k)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = partlab(&["transform", "--op", "k2m", "--input", &p(&k), "--output", &p(&back)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&back).unwrap()).unwrap();
    let vals: Vec<&str> = v["entries"].as_array().unwrap().iter().map(|e| e["value"].as_str().unwrap()).collect();
    assert_eq!(vals.len(), 2);
    assert!(vals.contains(&"1/2") && vals.contains(&"1/3"));
}

#[test]
fn verify_rejects_zero_samples_and_runs_single_criteria() {
    let o = partlab(&["verify", "--level", "mc", "--samples", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("samples"));
    let o = partlab(&["verify", "--level", "exact", "--criterion", "7,8"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("criterion")).count(), 2);
    let o = partlab(&["verify", "--level", "exact", "--criterion", "11"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("known deviation"));
}
