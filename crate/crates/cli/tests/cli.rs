use std::path::Path;
use std::process::{Command, Output};

use clap::Parser;
use epschain::space::io::load_space;
use epschain::Metric;
use epschain_cli::args::{Cli, RunConfig};
use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_epschain")).args(args).output().unwrap()
}

fn ok_json(args: &[&str]) -> Value {
    let out = bin(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn error_of(out: &Output) -> (i32, String) {
    let v: Value = serde_json::from_slice(&out.stderr).expect("error JSON on stderr");
    assert_eq!(v["schema"], 1);
    (out.status.code().unwrap(), v["error"]["code"].as_str().unwrap().to_string())
}

fn strip_runtime(text: &[u8]) -> Value {
    let mut v: Value = serde_json::from_slice(text).unwrap();
    v.as_object_mut().unwrap().remove("runtime_ms").expect("runtime_ms present");
    v
}

#[test]
fn gradient_min_matches_two_sequence_sum() {
    let v = ok_json(&["gradient", "min", "--fixture", "two_sequence_3_50"]);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "gradient min");
    let expected: f64 = (3..=50).map(|n| 2.0 / (n * n) as f64).sum();
    let got = v["result"]["objective"].as_f64().unwrap();
    assert!((got - expected).abs() <= 1e-9, "{got} vs {expected}");
    assert_eq!(v["result"]["violations"].as_array().unwrap().len(), 0);
    assert_eq!(v["result"]["g"].as_array().unwrap().len(), 96);
    assert_eq!(v["result"]["status"], "optimal");
}

#[test]
fn out_flag_redirects_the_result() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = bin(&["gradient", "min", "--fixture", "grid1d_11", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!((v["result"]["objective"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn input_errors_exit_2_with_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"points\": [").unwrap();
    let out = bin(&["space", "validate", "--space", bad.to_str().unwrap()]);
    assert_eq!(error_of(&out), (2, "ConfigParse".into()));

    let out = bin(&["space", "validate", "--space", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(error_of(&out), (2, "MissingInput".into()));

    let tri = dir.path().join("tri.json");
    let doc = r#"{"points": [{"id": "a", "mass": 1}, {"id": "b", "mass": 1}, {"id": "c", "mass": 1}],
                  "metric": {"matrix": [[0, 1, 5], [1, 0, 1], [5, 1, 0]]}}"#;
    std::fs::write(&tri, doc).unwrap();
    let out = bin(&["space", "validate", "--space", tri.to_str().unwrap()]);
    assert_eq!(error_of(&out), (2, "TriangleViolation".into()));

    let out = bin(&["gradient", "min", "--fixture", "grid1d_11", "--u", "values:1,2"]);
    assert_eq!(error_of(&out), (2, "LengthMismatch".into()));

    let out = bin(&["gradient", "min", "--fixture", "grid1d_11", "--bogus"]);
    assert_eq!(error_of(&out), (2, "ConfigParse".into()));

    let out = bin(&["gradient", "min", "--fixture", "grid1d_11", "--u", "expr:1/"]);
    assert_eq!(error_of(&out), (2, "ConfigParse".into()));
}

#[test]
fn operation_errors_exit_3() {
    let out = bin(&["keith", "--fixture", "grid1d_11", "--x", "3", "--y", "3", "--eps-list", "0.1"]);
    assert_eq!(error_of(&out), (3, "InvalidArgument".into()));
    let out = bin(&["gradient", "min", "--fixture", "grid1d_11", "--eps=-1"]);
    assert_eq!(error_of(&out), (3, "NonPositiveEps".into()));
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let space = dir.path().join("s.json");
    let gen = bin(&["space", "gen", "--kind", "grid", "--side", "9", "--alpha", "0.5", "--write", space.to_str().unwrap()]);
    assert!(gen.status.success());
    let args = ["gradient", "min", "--space", space.to_str().unwrap(), "--u", "expr:x0^2", "--eps", "0.6", "--p", "2"];
    let (a, b) = (bin(&args), bin(&args));
    assert!(a.status.success());
    assert_eq!(strip_runtime(&a.stdout), strip_runtime(&b.stdout));
    let text = |o: &Output| {
        let s = String::from_utf8(o.stdout.clone()).unwrap();
        s.lines().filter(|l| !l.contains("runtime_ms")).collect::<Vec<_>>().join("\n")
    };
    assert_eq!(text(&a), text(&b));
    let v = strip_runtime(&a.stdout);
    let digest = &v["inputs"][0];
    assert_eq!(digest["path"], space.to_str().unwrap());
    assert_eq!(digest["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn run_config_round_trips_and_replays() {
    let argv = [
        "epschain", "--seed", "7", "modulus", "--fixture", "punctured_grid", "--family", "hit:5", "--eps", "0.1",
        "--class", "lip:3",
    ];
    let cli = Cli::try_parse_from(argv).unwrap();
    let config = RunConfig { command: cli.command, global: cli.global };
    let text = serde_json::to_string_pretty(&config).unwrap();
    let back: RunConfig = serde_json::from_str(&text).unwrap();
    assert_eq!(back, config);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(&path, &text).unwrap();
    let replay = ok_json(&["run", "--config", path.to_str().unwrap()]);
    let direct = ok_json(&argv[1..]);
    assert_eq!(replay["result"], direct["result"]);
    assert_eq!(replay["parameters"], direct["parameters"]);
    assert_eq!(replay["inputs"][0]["path"], path.to_str().unwrap());

    let mut v: Value = serde_json::from_str(&text).unwrap();
    v["global"]["colour"] = Value::from("blue");
    assert!(serde_json::from_value::<RunConfig>(v).is_err());
    let mut v: Value = serde_json::from_str(&text).unwrap();
    v["command"]["modulus"]["familly"] = Value::from("hit:4");
    std::fs::write(&path, v.to_string()).unwrap();
    assert_eq!(error_of(&bin(&["run", "--config", path.to_str().unwrap()])), (2, "ConfigParse".into()));
}

#[test]
fn fixtures_list_and_load() {
    let v = ok_json(&["fixtures"]);
    let list = v["result"]["fixtures"].as_array().unwrap();
    let names: Vec<&str> = list.iter().map(|f| f["name"].as_str().unwrap()).collect();
    for n in ["two_sequence_3_50", "grid1d_11", "grid1d_101", "grid1d_1001", "snowflake_0.5", "snowflake_0.8", "punctured_grid"] {
        assert!(names.contains(&n), "{n}");
    }
    let two = list.iter().find(|f| f["name"] == "two_sequence_3_50").unwrap();
    assert_eq!(two["expected"][0]["formula"], "2*sum(n=3..50) n^-2");

    let dir = tempfile::tempdir().unwrap();
    assert!(bin(&["fixtures", "--write", dir.path().to_str().unwrap()]).status.success());
    for n in &names {
        let path = dir.path().join(format!("{n}.json"));
        let space = load_space(&path).unwrap_or_else(|e| panic!("{n}: {e}"));
        assert!(!space.is_empty());
        assert!(dir.path().join(format!("{n}.manifest.json")).exists());
    }
    for n in ["snowflake_0.5", "snowflake_0.8"] {
        let path = dir.path().join(format!("{n}.json"));
        let v = ok_json(&["space", "validate", "--space", path.to_str().unwrap()]);
        assert_eq!(v["result"]["valid"], true);
        assert_eq!(v["result"]["n"], 65);
    }
}

#[test]
fn profiles_go_to_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("p.csv");
    let v = ok_json(&["poincare", "minkowski", "--fixture", "grid1d_11", "--set", "0,1,2,3,4", "--radii", "0.15,0.25", "--csv", csv.to_str().unwrap()]);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,value"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 2);
    // One shell point at r = 0.15, two at 0.25, each of mass 0.1.
    assert!((rows[0][1] - 0.1 / 0.15).abs() < 1e-12);
    assert!((rows[1][1] - 0.2 / 0.25).abs() < 1e-12);
    assert!((v["result"]["minimum"].as_f64().unwrap() - 0.1 / 0.15).abs() < 1e-12);
}

#[test]
fn seeded_riemann_is_reproducible() {
    let args = ["--seed", "3", "riemann", "--f", "s^2", "--n", "1000", "--exact", "0.3333333333333333"];
    let a = ok_json(&args);
    assert_eq!(a["result"]["sums"].as_array().unwrap().len(), 10);
    assert_eq!(a["result"], ok_json(&args)["result"]);
    assert!(a["result"]["mean_error"].as_f64().unwrap() < 1e-3);
    let other = ok_json(&["--seed", "4", "riemann", "--f", "s^2", "--n", "1000"]);
    assert_ne!(a["result"]["sums"][0]["t"], other["result"]["sums"][0]["t"]);
}

#[test]
fn subcommands_cover_the_surface() {
    let f = ["--fixture", "grid1d_11"];
    let run = |extra: &[&str]| ok_json(&[extra, &f[..]].concat());
    assert_eq!(run(&["gradient", "verify", "--g", "const:1"])["result"]["accepted"], true);
    assert_eq!(run(&["gradient", "verify", "--g", "const:0.5"])["result"]["accepted"], false);
    assert!(run(&["gradient", "weak"])["result"]["objective"].as_f64().unwrap() > 0.0);
    let ladder = run(&["gradient", "ladder", "--eps-list", "0.3,0.2,0.1"]);
    assert_eq!(ladder["result"]["rungs"].as_array().unwrap().len(), 3);
    assert_eq!(run(&["gradient", "consistency", "--g", "const:1"])["result"]["consistent"], true);
    let m = run(&["modulus", "--family", "connect:0,10", "--p", "2"]);
    assert!(m["result"]["objective"].as_f64().unwrap() > 0.0);
    assert_eq!(m["result"]["rho"].as_array().unwrap().len(), 11);
    let riesz = run(&["poincare", "riesz", "--x", "2", "--y", "6", "--l", "1"]);
    assert_eq!(riesz["result"]["weights"][2], 0.0);
    assert!(run(&["poincare", "ball", "--g", "const:1"])["result"]["constant"].as_f64().is_some());
    assert_eq!(run(&["poincare", "pointwise", "--x", "0", "--y", "10", "--g", "const:1"])["result"]["satisfied"], true);
    let w = run(&["poincare", "width", "--x", "0", "--y", "10", "--set", "5,6", "--eps", "0.1"]);
    assert!((w["result"]["width"].as_f64().unwrap() - 0.2).abs() < 1e-12);
    let b = run(&["poincare", "bmc", "--x", "0", "--y", "10", "--candidate", "0,1,2,3,4", "--candidate", "0,1", "--eps", "0.1"]);
    assert_eq!(b["result"]["candidates"].as_array().unwrap().len(), 2);
    let pot = run(&["potential", "--seeds", "0", "--uA", "0", "--g", "const:1"]);
    assert_eq!(pot["result"]["gradient_check"]["accepted"], true);
    assert!((pot["result"]["potential"]["values"][10].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(run(&["leibniz", "--g", "const:1", "--phi", "expr:1-x"])["result"]["product_check"]["accepted"], true);
    assert!(run(&["space", "validate"])["result"]["doubling"]["constant"].as_f64().unwrap() >= 1.0);

    let eb = ok_json(&["eb-pipeline", "--n", "8,16,32", "--u", "x*(1-x)", "--g", "abs(1-2*x)"]);
    assert_eq!(eb["result"]["rungs"].as_array().unwrap().len(), 3);
    let gen = ok_json(&["space", "gen", "--kind", "two-sequence", "--n-min", "3", "--n-max", "5"]);
    assert_eq!(gen["result"]["n"], 6);
}

#[test]
fn matrix_and_point_table_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("d.csv");
    let w = dir.path().join("m.csv");
    std::fs::write(&m, "0,1,2\n1,0,1\n2,1,0\n").unwrap();
    std::fs::write(&w, "1\n1\n1\n").unwrap();
    let v = ok_json(&["gradient", "min", "--matrix", m.to_str().unwrap(), "--masses", w.to_str().unwrap(), "--u", "values:0,1,2", "--eps", "1"]);
    // Both unit steps need g sum >= 2; the cheapest is (0, 2, 0).
    assert!((v["result"]["objective"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert_eq!(v["inputs"].as_array().unwrap().len(), 2);

    let pts = dir.path().join("p.csv");
    std::fs::write(&pts, "id,mass,x0\na,1,0\nb,1,1\nc,1,2\n").unwrap();
    let space = load_space(Path::new(&pts)).unwrap();
    assert_eq!(space.len(), 3);
    let v = ok_json(&["poincare", "width", "--space", pts.to_str().unwrap(), "--x", "a", "--y", "c", "--set", "b", "--eps", "1"]);
    assert!((v["result"]["width"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}
