mod common;

use std::f64::consts::PI;

use common::*;
use tempfile::tempdir;

const SIMPLE: &str = r#"{"curve":"simple","n":20,"sd":0.25,"seed":1}"#;

fn simulate(dir: &std::path::Path, cfg: &str, name: &str) -> String {
    let c = write(dir, &format!("{name}.json"), cfg);
    let out = path(dir, &format!("{name}.csv"));
    run_ok(&["simulate", "--config", &c, "--out", &out]);
    out
}

#[test]
fn simulate_writes_dataset_truth_and_manifest() {
    let dir = tempdir().unwrap();
    let data = simulate(dir.path(), SIMPLE, "data");
    let rows = csv_rows(&data);
    assert_eq!(rows[0], ["x", "y1", "y2", "y3"]);
    assert_eq!(rows.len(), 21);
    let truth = csv_rows(&path(dir.path(), "data.truth.csv"));
    assert_eq!(truth[0], ["t", "theta", "phi", "y1", "y2", "y3"]);
    assert_eq!(truth.len(), 102);
    let m = manifest(&data);
    for key in ["version", "seed", "config", "started_at", "elapsed_s"] {
        assert!(m.get(key).is_some(), "manifest lacks {key}");
    }
    assert_eq!(m["seed"], 1);
}

#[test]
fn same_seed_gives_identical_bytes() {
    let dir = tempdir().unwrap();
    let a = simulate(dir.path(), SIMPLE, "a");
    let b = simulate(dir.path(), SIMPLE, "b");
    assert_eq!(read(&a), read(&b));
    let c = path(dir.path(), "c.csv");
    run_ok(&["simulate", "--config", &path(dir.path(), "a.json"), "--out", &c, "--seed", "2"]);
    assert_ne!(read(&a), read(&c));
}

#[test]
fn floats_round_trip_at_full_precision() {
    let dir = tempdir().unwrap();
    let data = simulate(dir.path(), SIMPLE, "data");
    for row in csv_rows(&data).iter().skip(1) {
        for cell in row {
            let v: f64 = cell.parse().unwrap();
            assert_eq!(format!("{v:.16e}"), *cell);
        }
    }
    let pred = path(dir.path(), "pred.csv");
    run_ok(&["fit", "--data", &data, "--method", "linfre", "--out", &pred]);
    for row in csv_rows(&pred).iter().skip(1) {
        let y: Vec<f64> = row[3..].iter().map(|c| c.parse().unwrap()).collect();
        assert!((y.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn config_errors_exit_2_and_name_the_key() {
    let dir = tempdir().unwrap();
    let cases = [
        (r#"{"curve":"simple","n":20,"sd":3.0,"seed":1}"#, "sd"),
        (r#"{"curve":"simple","n":20,"sd":0.2,"seed":1,"sdd":1}"#, "sdd"),
        (r#"{"curve":"simple","n":"twenty","sd":0.2,"seed":1}"#, "n"),
        (r#"{"curve":"geodesic","n":20,"sd":0.2,"seed":1}"#, "speed"),
    ];
    for (i, (cfg, key)) in cases.iter().enumerate() {
        let c = write(dir.path(), &format!("bad{i}.json"), cfg);
        let out = run(&["simulate", "--config", &c, "--out", &path(dir.path(), "x.csv")]);
        assert_eq!(code(&out), 2, "{cfg}");
        assert!(stderr(&out).contains(&format!("`{key}`")), "{}", stderr(&out));
    }
    let missing = run(&["simulate", "--config", &path(dir.path(), "nope.json"), "--out", "x.csv"]);
    assert_eq!(code(&missing), 2);
}

#[test]
fn fit_records_hyperparameters() {
    let dir = tempdir().unwrap();
    let data = simulate(dir.path(), SIMPLE, "data");
    let fixed = path(dir.path(), "fixed.csv");
    run_ok(&["fit", "--data", &data, "--method", "locfre", "--h", "0.2", "--out", &fixed]);
    let rows = csv_rows(&fixed);
    assert_eq!(rows[0], ["t", "theta", "phi", "y1", "y2", "y3"]);
    assert_eq!(rows.len(), 102);
    assert_eq!(manifest(&fixed)["results"]["h"], 0.2);

    let cv = path(dir.path(), "cv.csv");
    run_ok(&["fit", "--data", &data, "--method", "locfre", "--loocv", "--out", &cv]);
    let m = manifest(&cv);
    let h = m["results"]["h"].as_f64().unwrap();
    assert!([0.05, 0.075, 0.1, 0.15, 0.2, 0.3, 0.5].contains(&h));
    assert_eq!(m["results"]["selected_by"], "loocv");

    for method in ["lingeo", "lincos", "locgeo", "trigeo", "trifre"] {
        let out = path(dir.path(), &format!("{method}.csv"));
        let mut args = vec!["fit", "--data", data.as_str(), "--method", method, "--out", out.as_str()];
        if method == "locgeo" {
            args.extend(["--h", "0.3"]);
        }
        run_ok(&args);
        assert_eq!(csv_rows(&out).len(), 102);
    }
}

#[test]
fn fit_exit_codes() {
    let dir = tempdir().unwrap();
    let data = simulate(dir.path(), SIMPLE, "data");
    let out = path(dir.path(), "p.csv");
    let unknown = run(&["fit", "--data", &data, "--method", "kriging", "--out", &out]);
    assert_eq!(code(&unknown), 2);
    let no_h = run(&["fit", "--data", &data, "--method", "locfre", "--out", &out]);
    assert_eq!(code(&no_h), 2);
    let too_many = run(&["fit", "--data", &data, "--method", "trifre", "--N", "25", "--out", &out]);
    assert_eq!(code(&too_many), 3);
    assert!(stderr(&too_many).contains("TooManyTerms") && stderr(&too_many).contains("N ≥ n"));
    let bad_flag = run(&["fit", "--data", &data, "--method", "locfre", "--h", "-1", "--out", &out]);
    assert_eq!(code(&bad_flag), 2);
}

const PARAM_TABLE: &str = r#"{
  "methods": ["linfre", "lingeo", "lincos"],
  "settings": [
    {"curve":"geodesic","speed":1.0,"n":10,"sd":0.1},
    {"curve":"geodesic","speed":1.0,"n":100,"sd":0.1},
    {"curve":"geodesic","speed":1.0,"n":10,"sd":1.0},
    {"curve":"geodesic","speed":1.0,"n":100,"sd":1.0},
    {"curve":"geodesic","speed":3.14159,"n":10,"sd":0.1},
    {"curve":"geodesic","speed":3.14159,"n":100,"sd":0.1},
    {"curve":"geodesic","speed":3.14159,"n":10,"sd":1.0},
    {"curve":"geodesic","speed":3.14159,"n":100,"sd":1.0},
    {"curve":"geodesic","speed":8.0,"n":10,"sd":0.1},
    {"curve":"geodesic","speed":8.0,"n":100,"sd":0.1},
    {"curve":"geodesic","speed":8.0,"n":10,"sd":1.0},
    {"curve":"geodesic","speed":8.0,"n":100,"sd":1.0}
  ],
  "reps": 2,
  "seed": 5
}"#;

#[test]
fn mise_table_has_one_row_per_setting() {
    let dir = tempdir().unwrap();
    let cfg = write(dir.path(), "param.json", PARAM_TABLE);
    let out = path(dir.path(), "param.csv");
    let res = run_ok(&["mise", "--config", &cfg, "--out", &out]);
    let rows = csv_rows(&out);
    assert_eq!(rows[0], ["setting", "curve", "speed", "n", "sd", "method", "mise", "se", "reps", "flag"]);
    assert_eq!(rows.len(), 1 + 36);
    let text = read(&path(dir.path(), "param.txt"));
    assert_eq!(String::from_utf8_lossy(&res.stdout), text);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].contains("linfre") && lines[0].contains("lingeo") && lines[0].contains("lincos"));
    assert_eq!(lines.len(), 2 + 12 + 1);
}

#[test]
fn mise_single_replication_flags_se() {
    let dir = tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "one.json",
        r#"{"methods":["linfre"],"settings":[{"curve":"simple","n":15,"sd":0.2}],"reps":1,"seed":3}"#,
    );
    let out = path(dir.path(), "one.csv");
    run_ok(&["mise", "--config", &cfg, "--out", &out]);
    let rows = csv_rows(&out);
    assert_eq!(rows[1][7].parse::<f64>().unwrap(), 0.0);
    assert_eq!(rows[1][9], "se_undefined");

    let empty = write(
        dir.path(),
        "empty.json",
        r#"{"methods":[],"settings":[{"curve":"simple","n":15,"sd":0.2}],"reps":2,"seed":3}"#,
    );
    let e = run(&["mise", "--config", &empty, "--out", &out]);
    assert_eq!(code(&e), 2);
    assert!(stderr(&e).contains("`methods`"));
}

#[test]
fn mise_output_is_independent_of_threads() {
    let dir = tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "t.json",
        r#"{"methods":["locfre","trifre"],"settings":[{"curve":"simple","n":25,"sd":0.3}],"reps":6,"seed":8}"#,
    );
    let one = path(dir.path(), "one.csv");
    let eight = path(dir.path(), "eight.csv");
    run_ok(&["mise", "--config", &cfg, "--out", &one, "--threads", "1"]);
    run_ok(&["mise", "--config", &cfg, "--out", &eight, "--threads", "8"]);
    assert_eq!(read(&one), read(&eight));
    let env = path(dir.path(), "env.csv");
    let out = std::process::Command::new(BIN)
        .args(["mise", "--config", &cfg, "--out", &env])
        .env("MANIFOLD_REGRESS_THREADS", "3")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(read(&one), read(&env));
    assert_eq!(code(&run(&["mise", "--config", &cfg, "--out", &env, "--threads", "0"])), 2);
}

#[test]
fn rate_writes_slope() {
    let dir = tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "rate.json",
        r#"{"method":"linfre","curve":"geodesic","speed":1.0,"sd":0.5,"ladder":[10,20,40],"reps":4,"seed":2,"target_exponent":-1.0}"#,
    );
    let out = path(dir.path(), "rate.csv");
    run_ok(&["rate", "--config", &cfg, "--out", &out]);
    assert_eq!(csv_rows(&out).len(), 4);
    assert!(read(&path(dir.path(), "rate.txt")).contains("slope"));
    assert!(manifest(&out)["results"]["slope"].is_f64());
    let bad = write(dir.path(), "bad.json", r#"{"method":"linfre","curve":"simple","sd":0.5,"ladder":[20,10,40],"reps":4,"seed":2}"#);
    assert_eq!(code(&run(&["rate", "--config", &bad, "--out", &out])), 2);
}

fn truth_polylines(svg: &str) -> Vec<String> {
    let start = svg.find(r#"<g class="truth">"#).unwrap();
    let end = start + svg[start..].find("</g>").unwrap();
    svg[start..end].lines().filter(|l| l.starts_with("<polyline")).map(str::to_string).collect()
}

#[test]
fn plot_is_deterministic_and_follows_conventions() {
    let dir = tempdir().unwrap();
    let data = simulate(dir.path(), SIMPLE, "data");
    let truth = path(dir.path(), "data.truth.csv");
    let pred = path(dir.path(), "pred.csv");
    run_ok(&["fit", "--data", &data, "--method", "locfre", "--h", "0.2", "--out", &pred]);
    let a = path(dir.path(), "a.svg");
    let b = path(dir.path(), "b.svg");
    for out in [&a, &b] {
        run_ok(&["plot", "--data", &data, "--truth", &truth, "--pred", &pred, "--out", out]);
    }
    assert_eq!(read(&a), read(&b));
    let svg = read(&a);
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg.matches("<circle").count(), 20);
    assert!(svg.contains(r#"<g class="residuals">"#));

    let only = path(dir.path(), "truth.svg");
    run_ok(&["plot", "--truth", &truth, "--out", &only]);
    let svg = read(&only);
    assert_eq!(svg.matches("<circle").count(), 0);
    // The simple curve crosses φ = 0 once: two pieces, each a border and an inner stroke.
    let lines = truth_polylines(&svg);
    assert_eq!(lines.len(), 4);
    let y_theta = 20.0 + (PI / 4.0) / PI * 410.0;
    for line in &lines {
        let pts = line.split('"').nth(1).unwrap();
        for pair in pts.split(' ') {
            let y: f64 = pair.split(',').nth(1).unwrap().parse().unwrap();
            assert!((y - y_theta).abs() < 0.01);
        }
    }
    let grid = path(dir.path(), "grid.svg");
    run_ok(&["plot", "--truth", &truth, "--out", &grid, "--gridlines"]);
    assert!(read(&grid).contains(r#"<g class="gridlines">"#));
}

#[test]
fn plot_rejects_higher_dimensions() {
    let dir = tempdir().unwrap();
    let csv = write(dir.path(), "s3.csv", "x,y1,y2,y3,y4\n0,1,0,0,0\n0.5,0,1,0,0\n1,0,0,1,0\n");
    let out = run(&["plot", "--data", &csv, "--out", &path(dir.path(), "x.svg")]);
    assert_eq!(code(&out), 2);
    assert_eq!(code(&run(&["plot", "--out", &path(dir.path(), "x.svg")])), 2);
}
