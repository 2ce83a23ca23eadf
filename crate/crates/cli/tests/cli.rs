use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn inclab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_inclab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn strip_seconds(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.remove("seconds");
            map.values_mut().for_each(strip_seconds);
        }
        Value::Array(a) => a.iter_mut().for_each(strip_seconds),
        _ => {}
    }
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(inclab(&[]).status.code(), Some(1));
    assert_eq!(inclab(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(inclab(&["count", "--mode", "fast"]).status.code(), Some(1));
    let o = inclab(&["count"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("no input"));
    assert_eq!(inclab(&["rich", "--family", "pencil", "--m", "2", "--n", "3"]).status.code(), Some(1));
    assert_eq!(inclab(&["--help"]).status.code(), Some(0));
}

#[test]
fn infeasible_specs_exit_three() {
    let o = inclab(&["generate", "--family", "pencil", "--m", "9", "--n", "4"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("infeasible"));
    let o = inclab(&["partition", "--family", "random-tangency", "--m", "4", "--n", "1", "--levels", "4"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn generate_is_byte_reproducible_and_seeded() {
    let args = ["generate", "--family", "circle-sampled", "--m", "20", "--n", "7", "--seed", "5"];
    let a = inclab(&args);
    let b = inclab(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = inclab(&["generate", "--family", "circle-sampled", "--m", "20", "--n", "7", "--seed", "6"]);
    assert_ne!(a.stdout, c.stdout);
    let v = json(&a);
    assert_eq!(v["spec"]["seed"], 5);
    assert_eq!(v["planted"].as_array().unwrap().len(), 20);
}

#[test]
fn count_round_trips_through_files_and_modes_agree() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    let o = inclab(&[
        "generate", "--family", "random-tangency", "--m", "80", "--n", "90", "--density", "0.4", "--seed", "2", "--out",
        inst.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut exact = json(&inclab(&["count", "--input", inst.to_str().unwrap()]));
    let mut pre = json(&inclab(&["count", "--input", inst.to_str().unwrap(), "--mode", "prefilter", "--threads", "2"]));
    assert_eq!(exact["total"], pre["total"]);
    assert_eq!(exact["per_point"], pre["per_point"]);
    strip_seconds(&mut exact);
    let mut again = json(&inclab(&["count", "--input", inst.to_str().unwrap()]));
    strip_seconds(&mut again);
    strip_seconds(&mut pre);
    assert_eq!(exact, again);
    let csv = stdout(&inclab(&["count", "--input", inst.to_str().unwrap(), "--format", "csv"]));
    assert!(csv.starts_with("m,n,total,mode,seconds\n80,90,"));
}

#[test]
fn config_fields_are_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "run.json",
        r#"{"generate": {"kind": "pencil", "m": 3, "n": 6, "seed": 1}, "seed": 4, "format": "csv"}"#,
    );
    let o = inclab(&["count", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("m,n,total"));
    let a = json(&inclab(&["generate", "--config", &cfg, "--format", "json"]));
    assert_eq!(a["spec"]["seed"], 4);
    let b = json(&inclab(&["generate", "--config", &cfg, "--format", "json", "--seed", "9", "--n", "8"]));
    assert_eq!(b["spec"]["seed"], 9);
    assert_eq!(b["spec"]["n"], 8);
    assert_eq!(b["spec"]["m"], 3);
}

#[test]
fn config_input_is_relative_to_the_config_and_exclusive() {
    let dir = tempfile::tempdir().unwrap();
    let inst = inclab(&["generate", "--family", "pencil", "--m", "2", "--n", "4"]);
    write(dir.path(), "inst.json", &stdout(&inst));
    let cfg = write(dir.path(), "run.json", r#"{"input": "inst.json"}"#);
    let o = inclab(&["count", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(json(&o)["total"], 4);
    let o = inclab(&["count", "--config", &cfg, "--family", "pencil", "--m", "1", "--n", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("exactly one input"));
}

#[test]
fn parse_errors_report_line_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{\n  \"points\": {\"kind\": \"directed\", \"items\": [\n    {\"p\": [\"1/0\", \"0\"], \"u\": \"0\"}]},\n");
    let o = inclab(&["count", "--input", &bad]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line"), "{}", stderr(&o));
    assert!(stderr(&o).contains("column"), "{}", stderr(&o));
    let cfg = write(dir.path(), "cfg.json", r#"{"sead": 3}"#);
    let o = inclab(&["count", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unknown field"));
}

#[test]
fn rich_points_and_planes() {
    let o = inclab(&["rich", "--family", "pencil", "--m", "2", "--n", "7", "--t", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["count"], 2);
    let o = inclab(&["rich", "--family", "random-tangency", "--m", "12", "--n", "1", "--q", "3", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("plane,count,members\n"));
    let o = inclab(&["rich", "--family", "anchored-random", "--m", "5", "--n", "5", "--q", "3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn dual_and_partition_outputs() {
    let o = inclab(&["dual", "--family", "circle-sampled", "--m", "4", "--n", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["points"]["kind"], "dual");
    assert_eq!(v["points"]["items"].as_array().unwrap().len(), 3);
    assert_eq!(v["curves"]["items"].as_array().unwrap().len(), 4);
    assert_eq!(inclab(&["dual", "--family", "anchored-random", "--m", "2", "--n", "2"]).status.code(), Some(1));

    let args = ["partition", "--family", "anchored-random", "--m", "256", "--n", "1", "--levels", "2", "--epsilon", "0.2"];
    let a = inclab(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    let v = json(&a);
    assert!(v["max_population"].as_u64().unwrap() <= (1.2f64 * 64.0) as u64);
    assert_eq!(a.stdout, inclab(&args).stdout);
    let mut csv_args = args.to_vec();
    csv_args.extend(["--format", "csv"]);
    let csv = stdout(&inclab(&csv_args));
    assert!(csv.starts_with("point,cell,zero_set\n0,"));
    assert_eq!(csv.lines().count(), 257);
}

#[test]
fn scan_emits_sorted_rows_with_fit() {
    let o = inclab(&["scan", "--family", "pencil", "--n0", "32", "--doublings", "4", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("family,m,n,total,bound_ratio,seconds"));
    let ms: Vec<usize> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(ms, vec![32, 64, 128, 256]);
    let v = json(&inclab(&["scan", "--family", "st-grid-horizontal-lines", "--n0", "64", "--doublings", "2"]));
    assert!(v["exponent"].is_null());
    let v = json(&inclab(&["scan", "--family", "pencil", "--n0", "32", "--doublings", "3"]));
    let slope = v["exponent"]["slope"].as_f64().unwrap();
    assert!((slope - 1.0).abs() < 0.05);
    assert_eq!(inclab(&["scan"]).status.code(), Some(1));
}

#[test]
fn verify_runs_selected_checks() {
    let o = inclab(&["verify", "--check", "master-duality", "--check", "fstar-eliminant", "--scale", "0.01", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("module,id,trials,failures,soft,passed,seconds,detail\n"));
    assert_eq!(text.lines().count(), 3);
    assert!(stderr(&o).contains("PASS dual3/master-duality"));
    assert_eq!(inclab(&["verify", "--check", "no-such-invariant"]).status.code(), Some(1));
}
