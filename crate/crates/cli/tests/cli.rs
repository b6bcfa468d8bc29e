use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn holder(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_holder"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok_json(args: &[&str]) -> Value {
    let out = holder(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn err_json(args: &[&str]) -> Value {
    let out = holder(args);
    assert!(!out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["error"]["kind"].is_string());
    v
}

fn write_temp(name: &str, v: &Value) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("holder-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string(v).unwrap()).unwrap();
    path
}

fn normal(mean: f64, var: f64) -> Value {
    json!({"family": "gaussian", "params": {"mean": [mean], "cov": [[var]]}})
}

#[test]
fn div_cauchy_schwarz() {
    let same = write_temp(
        "same.json",
        &json!([{"family": "bernoulli", "params": {"p": 0.3}}, {"family": "bernoulli", "params": {"p": 0.3}}]),
    );
    let v = ok_json(&["div", "--input", same.to_str().unwrap(), "--variant", "cs"]);
    assert_eq!(v["value"], 0.0);

    let pair = write_temp("normals.json", &json!({"p": normal(0.0, 1.0), "q": normal(1.0, 1.0)}));
    let v = ok_json(&["div", "--input", pair.to_str().unwrap(), "--variant", "cs", "--oracle"]);
    assert!((v["value"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert!((v["oracle_value"].as_f64().unwrap() - 0.25).abs() < 1e-9);
    assert_eq!(v["variant"], "cs");
}

#[test]
fn div_variants_agree_with_oracle() {
    let pair = write_temp(
        "bern.json",
        &json!([{"family": "bernoulli", "params": {"p": 0.2}}, {"family": "bernoulli", "params": {"p": 0.7}}]),
    );
    let path = pair.to_str().unwrap();
    for (variant, extra) in [
        ("hpd", vec!["--alpha", "3"]),
        ("hd", vec!["--alpha", "3", "--gamma", "1.5"]),
        ("sym-hpd", vec!["--alpha", "1.5"]),
        ("sym-hd", vec!["--alpha", "1.5", "--gamma", "2"]),
        ("escort", vec!["--alpha", "4"]),
        ("bhat", vec![]),
    ] {
        let mut args = vec!["div", "--input", path, "--variant", variant, "--oracle"];
        args.extend(extra);
        let v = ok_json(&args);
        let (a, b) = (v["value"].as_f64().unwrap(), v["oracle_value"].as_f64().unwrap());
        assert!((a - b).abs() < 1e-10, "{variant}: {a} vs {b}");
    }
}

#[test]
fn div_validation_errors() {
    let pair = write_temp("normals2.json", &json!([normal(0.0, 1.0), normal(1.0, 2.0)]));
    let path = pair.to_str().unwrap();
    let v = err_json(&["div", "--input", path, "--variant", "hpd", "--alpha", "1.0"]);
    assert_eq!(v["error"]["kind"], "usage");
    err_json(&["div", "--input", path, "--variant", "hd", "--alpha", "2"]);
    err_json(&["div", "--input", "/nonexistent/file.json", "--variant", "cs"]);
    let mixed = write_temp("mixed.json", &json!([normal(0.0, 1.0), {"family": "bernoulli", "params": {"p": 0.5}}]));
    let v = err_json(&["div", "--input", mixed.to_str().unwrap(), "--variant", "cs"]);
    assert_eq!(v["error"]["kind"], "family_mismatch");
    let bad = write_temp("bad.json", &json!([normal(0.0, -1.0), normal(0.0, 1.0)]));
    err_json(&["div", "--input", bad.to_str().unwrap(), "--variant", "cs"]);
}

#[test]
fn centroid_single_bernoulli() {
    let set = write_temp("single.json", &json!([{"family": "bernoulli", "natural": [0.5]}]));
    let path = set.to_str().unwrap();
    let v = ok_json(&["centroid", "--input", path, "--variant", "hpd", "--alpha", "3"]);
    assert!((v["natural"][0].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(v["converged"], true);
    let v = ok_json(&["centroid", "--input", path, "--variant", "sym-hd", "--alpha", "3", "--gamma", "2"]);
    assert!((v["natural"][0].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert!(v["holder_information"].as_f64().unwrap().abs() < 1e-12);
    err_json(&["centroid", "--input", path, "--variant", "hd", "--alpha", "3"]);
}

#[test]
fn centroid_weighted_set() {
    let set = write_temp(
        "weighted.json",
        &json!({"distributions": [normal(-1.0, 0.5), normal(2.0, 1.5)], "weights": [1.0, 3.0]}),
    );
    let v = ok_json(&["centroid", "--input", set.to_str().unwrap(), "--variant", "left-hd", "--alpha", "2", "--gamma", "1"]);
    let energies: Vec<f64> = v["energies"].as_array().unwrap().iter().map(|e| e.as_f64().unwrap()).collect();
    assert!(energies.windows(2).all(|w| w[1] <= w[0] + 1e-10));
    assert_eq!(v["centroid"]["family"], "gaussian");
}

#[test]
fn cluster_requires_seed_and_is_deterministic() {
    let v = err_json(&["cluster", "--toy", "20", "--alpha", "1.5", "--gamma", "1.5"]);
    assert_eq!(v["error"]["kind"], "usage");
    let args = ["cluster", "--toy", "20", "--alpha", "1.5", "--gamma", "1.5", "--seed", "3"];
    let (a, b) = (holder(&args), holder(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["labels"].as_array().unwrap().len(), 20);
    let acc = v["accuracy"].as_f64().unwrap();
    assert!((0.5..=1.0).contains(&acc));
}

#[test]
fn cluster_from_file() {
    let set = write_temp("points.json", &json!([normal(-5.0, 0.1), normal(-5.1, 0.1), normal(5.0, 0.1), normal(5.2, 0.1)]));
    let v = ok_json(&["cluster", "--input", set.to_str().unwrap(), "--alpha", "2", "--gamma", "2", "--seed", "1"]);
    let l: Vec<u64> = v["labels"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect();
    assert_eq!(l[0], l[1]);
    assert_eq!(l[2], l[3]);
    assert_ne!(l[0], l[2]);
}

#[test]
fn table1_layout() {
    let args = ["table1", "--runs", "50", "--seed", "7"];
    let out = holder(&args);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], "n,alpha=gamma=1.1,alpha=gamma=1.5,alpha=gamma=2,alpha=gamma=10");
    for (line, n) in lines[1..].iter().zip(["50", "100"]) {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), 5);
        assert_eq!(cells[0], n);
        for c in &cells[1..] {
            let (mean, std) = c.split_once('±').unwrap();
            let (mean, std): (f64, f64) = (mean.parse().unwrap(), std.parse().unwrap());
            assert!((50.0..=100.0).contains(&mean) && std >= 0.0);
        }
    }
    assert_eq!(holder(&args).stdout, out.stdout);
    err_json(&["table1", "--runs", "5"]);
}

#[test]
fn grid_simplex_and_gaussian() {
    let out = holder(&["grid", "--figure", "simplex", "--resolution", "9"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let (cs, kl) = (
        header.iter().position(|h| *h == "hpd_alpha=2").unwrap(),
        header.iter().position(|h| *h == "kl").unwrap(),
    );
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    assert_eq!(rows.len(), 10 * 11 / 2);
    let mut best = (f64::INFINITY, 0);
    for (i, r) in rows.iter().enumerate() {
        let boundary = r[..3].iter().any(|x| x.parse::<f64>().unwrap() == 0.0);
        assert_eq!(r[kl] == "inf", boundary);
        let v: f64 = r[cs].parse().unwrap();
        if v < best.0 {
            best = (v, i);
        }
    }
    for x in &rows[best.1][..3] {
        assert!((x.parse::<f64>().unwrap() - 1.0 / 3.0).abs() < 1e-12);
    }

    let out = holder(&["grid", "--figure", "gaussian", "--resolution", "8", "--alpha-list", "2", "--gamma-list", "1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "mu,sigma,hpd_alpha=2,hd_alpha=2_gamma=1,kl");
    assert_eq!(text.lines().count(), 1 + 81);

    err_json(&["grid", "--figure", "simplex", "--resolution", "4"]);
    err_json(&["grid", "--figure", "simplex", "--reference", "0.5,0.5,0"]);
}

#[test]
fn bounds_single_components_are_exact() {
    let m = write_temp("m.json", &json!({"family": "gaussian", "components": [{"mean": [0.0], "cov": [[1.0]]}]}));
    let n = write_temp("n.json", &json!({"family": "gaussian", "components": [{"mean": [1.0], "cov": [[2.0]]}]}));
    let v = ok_json(&["bounds", "--m", m.to_str().unwrap(), "--n", n.to_str().unwrap(), "--alpha", "3"]);
    assert_eq!(v["lower"], v["upper"]);
    assert!((v["lower"].as_f64().unwrap() - v["quadrature_reference"].as_f64().unwrap()).abs() < 1e-9);

    let mix = write_temp(
        "mix.json",
        &json!({"family": "laplace", "weights": [0.3, 0.7], "components": [{"scale": 0.5}, {"scale": 2.0}]}),
    );
    let v = ok_json(&["bounds", "--m", mix.to_str().unwrap(), "--n", mix.to_str().unwrap(), "--alpha", "2", "--resolution", "16"]);
    let (lo, hi, q) = (
        v["lower"].as_f64().unwrap(),
        v["upper"].as_f64().unwrap(),
        v["quadrature_reference"].as_f64().unwrap(),
    );
    assert!(lo - 1e-9 <= q && q <= hi + 1e-9);
}
