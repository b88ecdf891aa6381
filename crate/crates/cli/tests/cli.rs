use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "data", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

fn qrt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qrt"))
        .args(args)
        .env_remove("QRT_MAX_ORDER")
        .env_remove("QRT_PRECISION")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = qrt(&all);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn analyze_order_eight_example() {
    let r = json(&["analyze", &data("order8.json")]);
    let v = &r["result"]["analysis"]["verdict"];
    assert_eq!(v["group_order"], 8);
    assert_eq!(v["certificate"], "C3=0");
    assert_eq!(v["oracle_agreement"], true);
    assert_eq!(r["result"]["closed_forms_agree"], true);
}

#[test]
fn analyze_double_point_example() {
    let r = json(&["analyze", &data("double_point.json")]);
    let a = &r["result"]["analysis"];
    assert_eq!(a["class"]["case"], "i");
    assert_eq!(a["verdict"]["n"], 3);
    assert_eq!(a["double_point"]["ratio"], "1/4");
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(
        qrt(&["analyze", &data("empty.json")]).status.code(),
        Some(2)
    );
    assert_eq!(
        qrt(&["analyze", "/nonexistent/curve.json"]).status.code(),
        Some(2)
    );
    let out = qrt(&["linkage", "--sides", "1,2,3/0,2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("position"));
    assert_eq!(
        qrt(&["linkage", "--sides", "1,1,1,5"]).status.code(),
        Some(2)
    );
}

#[test]
fn walk_step_set_grid() {
    let r = json(&["walk", "--step-set", "S22", "--t", "1/5,1/4,1/3"]);
    let samples = r["result"]["samples"].as_array().unwrap();
    let orders: Vec<i64> = samples
        .iter()
        .map(|s| s["group_order"].as_i64().unwrap())
        .collect();
    assert_eq!(orders, [8, 8, 8]);
    assert_eq!(samples[1]["route"], "double-point");
}

#[test]
fn walk_file_simple() {
    let r = json(&["walk", &data("simple_walk.json")]);
    assert_eq!(r["result"]["diagnostics"]["group_order"], 4);
    assert_eq!(
        r["result"]["kernel_analysis"]["analysis"]["verdict"]["group_order"],
        4
    );
}

#[test]
fn linkage_period_and_semi_period() {
    let r = json(&["linkage", "--sides", "1,2,4,2"]);
    let rep = &r["result"]["report"];
    assert_eq!(rep["period"], 4);
    assert_eq!(rep["semi_period"], 2);
    assert_eq!(rep["agreement"], true);
    assert_eq!(rep["poristic"]["passed"], true);
}

#[test]
fn linkage_pitot_route() {
    let r = json(&["linkage", "--sides", "3,2,1,2"]);
    assert_eq!(r["result"]["smooth"], false);
    assert_eq!(r["result"]["report"]["printed_ratio"], "4");
    assert_eq!(
        r["result"]["report"]["analysis"]["verdict"]["kind"],
        "aperiodic"
    );
}

#[test]
fn convert_example_walk() {
    let r = json(&[
        "convert",
        "walk-to-link",
        "--lambda",
        "-10",
        &data("example_walk.json"),
    ]);
    let res = &r["result"];
    let sides: Vec<&str> = res["sides"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s.as_str().unwrap())
        .collect();
    assert_eq!(sides, ["3/2", "1", "1/2*sqrt(13)", "1"]);
    assert_eq!(res["inverse"]["q1"], "0");
    assert_eq!(res["inverse"]["q2"], "5");
    assert_eq!(res["stochastic"], false);
    assert_eq!(res["discrepancies"].as_array().unwrap().len(), 3);
    let back = json(&[
        "convert",
        "link-to-walk",
        "--lambda",
        "-10",
        "--sides",
        "3/2,1,sqrt(13)/2,1",
    ]);
    assert_eq!(back["result"]["weights"]["-1,-1"], "3/10");
    assert_eq!(back["result"]["kernel_proportional"], true);
}

#[test]
fn reports_are_byte_identical() {
    let a = qrt(&["linkage", "--sides", "2,1,2,sqrt(7)"]);
    let b = qrt(&["linkage", "--sides", "2,1,2,sqrt(7)"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn sweep_is_ordered_and_thread_independent() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_qrt"))
            .args(["sweep", "--family", "kt:S22", "--grid", "t=1/6..1/3:4"])
            .env("RAYON_NUM_THREADS", threads)
            .output()
            .unwrap()
    };
    let one = run("1");
    let four = run("4");
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
    let lines: Vec<Value> = String::from_utf8(one.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let ts: Vec<&str> = lines
        .iter()
        .map(|l| l["point"]["t"].as_str().unwrap())
        .collect();
    assert_eq!(ts, ["1/6", "2/9", "5/18", "1/3"]);
    assert!(lines.iter().all(|l| l["group_order"] == 8));
}

#[test]
fn sweep_two_parameter_link_family() {
    let out = qrt(&[
        "sweep",
        "--family",
        "link:a,2,4,b",
        "--grid",
        "a=1,3/2",
        "--grid",
        "b=2,5/2",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<Value> = text
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0]["point"]["a"], "1");
    assert_eq!(lines[0]["period"], 4);
}

#[test]
fn sweep_curve_template() {
    let family = format!("curve:{}", data("kt_template.json"));
    let out = qrt(&["sweep", "--family", &family, "--grid", "t=1/5,1/3"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 2);
}

#[test]
fn env_defaults_and_flag_precedence() {
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_qrt"));
        c.args(["analyze", &data("order8.json"), "--format", "json"]);
        if let Some(f) = flag {
            c.args(["--max-order", f]);
        }
        match env {
            Some(v) => c.env("QRT_MAX_ORDER", v),
            None => c.env_remove("QRT_MAX_ORDER"),
        };
        let r: Value = serde_json::from_slice(&c.output().unwrap().stdout).unwrap();
        (
            r["mode"]["max_order"].as_i64().unwrap(),
            r["result"]["analysis"]["verdict"]["kind"].clone(),
        )
    };
    assert_eq!(run(None, None).0, 24);
    let (m, kind) = run(Some("3"), None);
    assert_eq!(m, 3);
    assert_eq!(kind, "no-order-up-to");
    assert_eq!(run(Some("3"), Some("12")).0, 12);
}

#[test]
fn out_flag_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = qrt(&[
        "analyze",
        &data("double_point.json"),
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(r["command"], "analyze");
}

#[test]
fn render_writes_svg() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("orbit.svg");
    let out = qrt(&[
        "render",
        "--sides",
        "1,2,4,2",
        "--steps",
        "4",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let svg = std::fs::read_to_string(&path).unwrap();
    assert_eq!(svg.matches("<polygon").count(), 5);
    assert_eq!(
        qrt(&["render", "--sides", "1,2,4,2"]).status.code(),
        Some(2)
    );
}

#[test]
fn timing_is_opt_in() {
    let r = json(&["analyze", &data("double_point.json")]);
    assert!(r.get("timing_ms").is_none());
    let r = json(&["analyze", &data("double_point.json"), "--timing"]);
    assert!(r["timing_ms"].is_number());
}
