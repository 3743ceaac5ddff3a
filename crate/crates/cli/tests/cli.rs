use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tailscope"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("TAILSCOPE_THREADS")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn csv_column(path: &Path, name: &str) -> Vec<f64> {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    let i = rdr.headers().unwrap().iter().position(|h| h == name).unwrap();
    rdr.records().map(|r| r.unwrap()[i].parse().unwrap()).collect()
}

fn json(path: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

#[test]
fn refdist_n3_is_constant() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["refdist", "--n", "3", "--t-max", "1.7"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for v in csv_column(&d.path().join("refdist.csv"), "psi_n") {
        assert!((v - 0.288_675_134_594_812_9).abs() < 1e-12, "{v}");
    }
    assert!(d.path().join("refdist.provenance.json").exists());
}

#[test]
fn refdist_n256_positive_and_monotone() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(d.path(), &["refdist", "--n", "256", "--t-max", "4", "--plot"])), 0);
    let f = d.path().join("refdist.csv");
    let cdf = csv_column(&f, "Psi_n");
    assert!(csv_column(&f, "psi_n").iter().all(|&v| v > 0.0));
    assert!(cdf.windows(2).all(|w| w[0] <= w[1]));
    let svg = std::fs::read_to_string(d.path().join("refdist.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("polyline"));
}

#[test]
fn usage_errors_exit_2() {
    let d = tempfile::tempdir().unwrap();
    for args in [
        &["refdist", "--n", "2"][..],
        &["refdist", "--n", "16", "--t-min", "3", "--t-max", "1"],
        &["sample", "--body", "lp-cone", "--p", "2", "--n", "64", "--N", "10"],
        &["sample", "--body", "lp-cone", "--n", "64", "--N", "10", "--seed", "1"],
        &["sample", "--body", "lp-cone", "--p", "0.5", "--n", "64", "--N", "10", "--seed", "1"],
        &["verify", "--all"],
        &["frobnicate"],
    ] {
        assert_eq!(code(&run(d.path(), args)), 2, "{args:?}");
    }
}

#[test]
fn runtime_errors_exit_1() {
    let d = tempfile::tempdir().unwrap();
    let missing = d.path().join("nope.csv");
    let o = run(d.path(), &["transform", "--radial", missing.to_str().unwrap(), "--n", "16"]);
    assert_eq!(code(&o), 1);
    let o = run(
        d.path(),
        &["marginal", "--body", "sphere", "--n", "64", "--N", "1000", "--seed", "1", "--method", "direct", "--t-max", "3"],
    );
    assert_eq!(code(&o), 1);
}

#[test]
fn verify_exit_codes() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["verify", "--lemma", "lapl", "--beta", "1"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("PASS"));
    // the literal fourth-order law does not hold at small t
    let o = run(d.path(), &["verify", "--lemma", "sph"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("first failing cell"));
    assert!(d.path().join("verify.csv").exists());
}

#[test]
fn sample_is_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["sample", "--body", "lp-cone", "--p", "2", "--n", "64", "--N", "1000", "--seed", "7"];
    assert_eq!(code(&run(a.path(), &args)), 0);
    assert_eq!(code(&run(b.path(), &args)), 0);
    let read = |d: &Path| std::fs::read(d.join("sample.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
    let rows = csv::Reader::from_path(a.path().join("sample.csv")).unwrap().records().count();
    assert_eq!(rows, 1000);
}

#[test]
fn binary_sample_header() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["sample", "--body", "uniform", "--n", "5", "--N", "7", "--seed", "3", "--binary"]);
    assert_eq!(code(&o), 0);
    let bytes = std::fs::read(d.path().join("sample.bin")).unwrap();
    assert_eq!(&bytes[..4], b"TSB1");
    assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 5);
    assert_eq!(u64::from_le_bytes(bytes[8..16].try_into().unwrap()), 7);
    assert_eq!(bytes.len(), 16 + 5 * 7 * 8);
}

#[test]
fn radial_to_transform_and_deviation_to_fit() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    let o = run(p, &["sample", "--body", "lp-volume", "--p", "1", "--n", "32", "--N", "5000", "--seed", "2", "--emit", "radial"]);
    assert_eq!(code(&o), 0);
    let radial = p.join("radial.csv");
    let o = run(p, &["transform", "--radial", radial.to_str().unwrap(), "--n", "32", "--t-max", "3", "--steps", "10"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(csv::Reader::from_path(p.join("transform.csv")).unwrap().records().count(), 11);

    let mut files = Vec::new();
    for n in ["64", "256", "1024"] {
        let sub = p.join(n);
        let o = run(&sub, &["sample", "--body", "lp-cone", "--p", "1", "--n", n, "--N", "50000", "--seed", "4", "--emit", "deviation"]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        files.push(sub.join("deviation.csv").to_str().unwrap().to_string());
    }
    let mut args = vec!["fit", "--format", "json", "--deviation"];
    args.extend(files.iter().map(String::as_str));
    let o = run(p, &args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let fit = json(&p.join("fit.json"));
    assert!(fit["beta"].as_f64().unwrap() > 0.0, "{fit}");
}

#[test]
fn sweep_report_carries_provenance() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["sweep", "--body", "lp-volume", "--p", "inf", "--n", "256", "--T", "2", "--M", "200", "--N", "200000", "--seed", "1"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&d.path().join("sweep.json"));
    let prov = &r["provenance"];
    for key in ["spec", "samples", "seed", "directions", "t_grid", "scale", "version"] {
        assert!(!prov[key].is_null(), "missing {key}");
    }
    assert_eq!(prov["samples"], 200_000);
    assert_eq!(prov["directions"], 200);
    assert_eq!(r["directions"].as_array().unwrap().len(), 200);
    assert!(r["eps_hat"].as_f64().unwrap() > 0.0);
    let side = json(&d.path().join("sweep.provenance.json"));
    assert_eq!(side["args"]["global"]["seed"], 1);
    assert!(side["outputs"].as_array().unwrap().iter().any(|o| o == "sweep.json"));
}
