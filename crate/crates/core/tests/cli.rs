use std::path::{Path, PathBuf};
use std::process::Command;

use didpr::rewire::RewiringTrace;
use didpr::{assortativity_of_graph, DirectedGraph};
use serde_json::Value;

struct Run {
    code: i32,
    json: Value,
    stderr: String,
}

fn didpr(args: &[&str]) -> Run {
    didpr_env(args, &[])
}

fn didpr_env(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_didpr"));
    cmd.args(args).env_remove("DIDPR_SEED");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    let stdout = String::from_utf8_lossy(&out.stdout).into_owned();
    Run {
        code: out.status.code().unwrap_or(-1),
        json: serde_json::from_str(&stdout).unwrap_or(Value::Null),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

fn ok(args: &[&str]) -> Value {
    let r = didpr(args);
    assert_eq!(r.code, 0, "{args:?}: {}", r.stderr);
    r.json
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_graph(p: &Path) -> DirectedGraph {
    DirectedGraph::read_edge_list(std::io::BufReader::new(std::fs::File::open(p).unwrap())).unwrap()
}

fn er_graph(dir: &Path, n: &str, seed: &str) -> PathBuf {
    ok(&["generate", "er", "--n", n, "--p", "0.1", "--seed", seed, "--out-dir", s(dir)]);
    dir.join("graph.edges")
}

#[test]
fn generate_er_without_edges() {
    let d = tempfile::tempdir().unwrap();
    let j = ok(&["generate", "er", "--n", "100", "--p", "0", "--out-dir", s(d.path())]);
    assert_eq!(j["outputs"][0]["edges"], 0);
    let g = read_graph(&d.path().join("graph.edges"));
    assert_eq!(g.num_edges(), 0);
}

#[test]
fn generate_dpa_pure_alpha_node_count() {
    let d = tempfile::tempdir().unwrap();
    let j = ok(&["generate", "dpa", "--alpha", "1", "--edges", "50", "--out-dir", s(d.path())]);
    assert_eq!(j["outputs"][0]["nodes"], 51);
    assert!(d.path().join("graph.labels").exists());
}

#[test]
fn generate_is_deterministic_and_reproducible_from_config() {
    let (a, b, c, e) = (
        tempfile::tempdir().unwrap(),
        tempfile::tempdir().unwrap(),
        tempfile::tempdir().unwrap(),
        tempfile::tempdir().unwrap(),
    );
    let args = |d: &Path| vec!["generate".to_string(), "er".into(), "--n".into(), "1000".into(), "--p".into(), "0.1".into(), "--seed".into(), "7".into(), "--out-dir".into(), s(d).into()];
    for d in [a.path(), b.path()] {
        let v = args(d);
        ok(&v.iter().map(String::as_str).collect::<Vec<_>>());
    }
    let first = std::fs::read(a.path().join("graph.edges")).unwrap();
    assert_eq!(first, std::fs::read(b.path().join("graph.edges")).unwrap());

    let cfg = a.path().join("generate.config.json");
    ok(&["generate", "--config", s(&cfg), "--out-dir", s(c.path())]);
    assert_eq!(first, std::fs::read(c.path().join("graph.edges")).unwrap());

    let r = didpr_env(&["generate", "er", "--n", "1000", "--p", "0.1", "--out-dir", s(e.path())], &[("DIDPR_SEED", "7")]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(first, std::fs::read(e.path().join("graph.edges")).unwrap());
}

#[test]
fn generate_replicates_get_distinct_files() {
    let d = tempfile::tempdir().unwrap();
    let j = ok(&["generate", "er", "--n", "50", "--p", "0.1", "--replicates", "3", "--seed", "1", "--out-dir", s(d.path())]);
    assert_eq!(j["outputs"].as_array().unwrap().len(), 3);
    let files: Vec<Vec<u8>> = (0..3)
        .map(|k| std::fs::read(d.path().join(format!("graph_{k:03}.edges"))).unwrap())
        .collect();
    assert_ne!(files[0], files[1]);
    assert_ne!(files[1], files[2]);
}

#[test]
fn invalid_usage_exits_with_2() {
    let d = tempfile::tempdir().unwrap();
    let r = didpr(&["generate", "er", "--n", "10", "--p", "1.5", "--out-dir", s(d.path())]);
    assert_eq!(r.code, 2, "{}", r.stderr);
    assert!(!r.stderr.is_empty());

    let cfg = d.path().join("bad.json");
    std::fs::write(&cfg, r#"{"model": {"er": {"n": 5, "p": 0.1}}, "colour": 1}"#).unwrap();
    let r = didpr(&["generate", "--config", s(&cfg)]);
    assert_eq!(r.code, 2, "{}", r.stderr);

    let g = er_graph(d.path(), "30", "1");
    let r = didpr(&["solve-eta", "--graph", s(&g), "--targets", "0.1,0.2,0.3", "--out-dir", s(d.path())]);
    assert_eq!(r.code, 2, "{}", r.stderr);
}

#[test]
fn assort_matches_library() {
    let d = tempfile::tempdir().unwrap();
    let g = er_graph(d.path(), "80", "3");
    let j = ok(&["assort", "--graph", s(&g)]);
    let r = assortativity_of_graph(&read_graph(&g)).unwrap();
    assert_eq!(j["assortativity"]["r11"].as_f64().unwrap(), r.r11);
    assert_eq!(j["assortativity"]["r22"].as_f64().unwrap(), r.r22);
}

#[test]
fn bounds_bracket_observed_profile_and_reject_unattainable_conditioning() {
    let d = tempfile::tempdir().unwrap();
    let g = er_graph(d.path(), "60", "4");
    let r = assortativity_of_graph(&read_graph(&g)).unwrap();
    let interval = format!("11={}", r.r11);
    ok(&["bounds", "--graph", s(&g), "--interval", &interval, "--out-dir", s(d.path())]);
    let mut rdr = csv::Reader::from_path(d.path().join("bounds.csv")).unwrap();
    let headers = rdr.headers().unwrap().clone();
    assert_eq!(&headers, vec!["conditioned_pair", "conditioned_value", "pair", "lower", "upper"]);
    let mut rows = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let pair: didpr::TypePair = rec[2].parse().unwrap();
        let (lo, hi): (f64, f64) = (rec[3].parse().unwrap(), rec[4].parse().unwrap());
        assert!(lo - 1e-7 <= r.get(pair) && r.get(pair) <= hi + 1e-7, "{pair}: {lo} {hi}");
        rows += 1;
    }
    assert_eq!(rows, 4);

    let sweep = ok(&["bounds", "--graph", s(&g), "--sweep", "11=-0.2,0,0.2", "--order", "22", "--out-dir", s(d.path())]);
    assert_eq!(sweep["outputs"][0]["bounds"].as_array().unwrap().len(), 3);

    let r = didpr(&["bounds", "--graph", s(&g), "--sweep", "11=1.5", "--out-dir", s(d.path())]);
    assert_eq!(r.code, 3, "{}", r.stderr);
}

#[test]
fn solve_eta_hits_targets_and_guides_on_failure() {
    let d = tempfile::tempdir().unwrap();
    let g = er_graph(d.path(), "120", "5");
    let j = ok(&["solve-eta", "--graph", s(&g), "--targets", "0.3,0.2,-0.2,-0.1", "--out-dir", s(d.path())]);
    assert!(j["max_target_error"].as_f64().unwrap() < 1e-4);
    assert!(j["max_marginal_residual"].as_f64().unwrap() < 1e-7);
    assert!(d.path().join("eta.csv").exists());

    let r = didpr(&["solve-eta", "--graph", s(&g), "--targets", "0.99,-0.99,0.99,-0.99", "--out-dir", s(d.path())]);
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains("unconditional_bounds"), "{}", r.stderr);
}

#[test]
fn rewire_at_observed_profile_stays_flat_and_preserves_degrees() {
    let d = tempfile::tempdir().unwrap();
    // Large enough that chain noise stays well inside the tolerance.
    let g = er_graph(d.path(), "400", "6");
    let input = read_graph(&g);
    let r = assortativity_of_graph(&input).unwrap();
    let targets = format!("{},{},{},{}", r.r11, r.r12, r.r21, r.r22);
    let out = d.path().join("run");
    let j = ok(&["rewire", "--graph", s(&g), "--targets", &targets, "--steps", "20000", "--seed", "2", "--out-dir", s(&out)]);
    assert_eq!(j["outputs"][0]["degrees_preserved"], true);
    let rewired = read_graph(&out.join("rewired.edges"));
    assert_eq!(rewired.out_degrees(), input.out_degrees());
    assert_eq!(rewired.in_degrees(), input.in_degrees());
    let trace = RewiringTrace::read_csv(std::io::BufReader::new(std::fs::File::open(out.join("trace.csv")).unwrap())).unwrap();
    assert!(trace.checkpoints.iter().all(|c| c.profile().max_abs_diff(&r) <= 0.05));

    // Re-running from the echoed configuration reproduces the outputs.
    let again = d.path().join("again");
    ok(&["rewire", "--config", s(&out.join("rewire.config.json")), "--out-dir", s(&again)]);
    for f in ["rewired.edges", "trace.csv"] {
        assert_eq!(std::fs::read(out.join(f)).unwrap(), std::fs::read(again.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn rewire_replicates_aggregate() {
    let d = tempfile::tempdir().unwrap();
    let g = er_graph(d.path(), "100", "8");
    let out = d.path().join("reps");
    ok(&[
        "rewire", "--graph", s(&g), "--targets", "0.3,0.2,-0.2,-0.1", "--steps", "5000", "--checkpoint-every", "1000",
        "--replicates", "3", "--jobs", "2", "--out-dir", s(&out),
    ]);
    let traces: Vec<PathBuf> = (0..3).map(|k| out.join(format!("trace_{k:03}.csv"))).collect();
    let agg = d.path().join("mean.csv");
    let mut args = vec!["aggregate", "--out", s(&agg)];
    for t in &traces {
        args.extend(["--input", s(t)]);
    }
    let j = ok(&args);
    assert_eq!(j["checkpoints"], 6);
    let mut rdr = csv::Reader::from_path(&agg).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(&rows[5][0], "5000");
    assert_eq!(&rows[5][6], "3");

    let r = didpr(&["rewire", "--graph", s(&g), "--targets", "0.99,-0.99,0.99,-0.99", "--out-dir", s(&out)]);
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains("unconditional_bounds"));
}

#[test]
fn scenario_gains_telescoping() {
    let d = tempfile::tempdir().unwrap();
    // Pure α growth gives every node out-degree 1, so out-degree
    // coefficients are undefined and cannot be targeted.
    let r = didpr(&[
        "scenario-gains", "--alpha", "1", "--edges", "2000", "--targets", "0.1,0.1,0.1,0.1", "--out-dir", s(d.path()),
    ]);
    assert_ne!(r.code, 0);
    assert!(r.stderr.contains("degenerate"), "{}", r.stderr);

    let j = ok(&[
        "scenario-gains", "--alpha", "0.3", "--beta", "0.4", "--edges", "3000", "--targets", "0.1,0.15,0.1,0.15",
        "--steps", "5000", "--seed", "2", "--out-dir", s(d.path()),
    ]);
    let o = &j["outputs"][0];
    let mut rdr = csv::Reader::from_path(d.path().join("gains.csv")).unwrap();
    let mut sums = [0.0; 4];
    for rec in rdr.records() {
        let rec = rec.unwrap();
        for k in 0..4 {
            sums[k] += rec[k + 2].parse::<f64>().unwrap();
        }
    }
    for (k, name) in ["r11", "r12", "r21", "r22"].iter().enumerate() {
        let change = o["final"][name].as_f64().unwrap() - o["initial"][name].as_f64().unwrap();
        assert!((sums[k] - change).abs() < 1e-9, "{name}: {} vs {change}", sums[k]);
    }
}

#[test]
fn fit_writes_parameters() {
    let d = tempfile::tempdir().unwrap();
    ok(&["generate", "dpa", "--alpha", "0.3", "--beta", "0.4", "--edges", "20000", "--seed", "3", "--out-dir", s(d.path())]);
    let j = ok(&[
        "fit", "--graph", s(&d.path().join("graph.edges")), "--n-tail", "200", "--alpha-grid", "8", "--seed", "1",
        "--out-dir", s(d.path()),
    ]);
    let fit = &j["fit"];
    let (a, b, g) = (fit["alpha_hat"].as_f64().unwrap(), fit["beta_hat"].as_f64().unwrap(), fit["gamma_hat"].as_f64().unwrap());
    assert!((a + b + g - 1.0).abs() < 1e-9);
    assert!((b - 0.4).abs() < 0.05, "beta_hat {b}");
    assert!(d.path().join("fit.json").exists());

    let r = didpr(&["fit", "--graph", s(&d.path().join("graph.edges")), "--n-tail", "10", "--out-dir", s(d.path())]);
    assert_eq!(r.code, 2);
}
