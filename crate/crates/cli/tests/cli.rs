use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn coneres(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coneres"))
        .args(args)
        .output()
        .expect("run coneres")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn json(out: &Output) -> Value {
    serde_json::from_str(&stdout(out)).expect("json output")
}

#[test]
fn zeros_table_has_watson_count_rows() {
    let out = coneres(&["zeros", "--nu", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,seed_re,seed_im,zero_re,zero_im,residual"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 5);
    for (i, row) in rows.iter().enumerate() {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 6);
        assert_eq!(fields[0], (i + 1).to_string());
        let residual: f64 = fields[5].parse().unwrap();
        assert!(residual <= 1e-9);
    }
}

#[test]
fn zeros_below_three_halves_is_empty() {
    let out = coneres(&["zeros", "--nu", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().count(), 1);
}

#[test]
fn negative_order_is_a_usage_error() {
    let out = coneres(&["zeros", "--nu", "-1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn missing_argument_is_a_usage_error() {
    assert_eq!(coneres(&["zeros"]).status.code(), Some(2));
    assert_eq!(coneres(&["bogus"]).status.code(), Some(2));
}

#[test]
fn an_reports_the_constant() {
    let out = coneres(&["an", "--dim", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let a3 = v["A_n"].as_f64().unwrap();
    assert!((a3 - 0.1391280918594127).abs() <= 1e-8 * a3);
    assert!(v["quadrature_error"].as_f64().unwrap() <= 1e-8 * a3);
    assert!((v["t0"].as_f64().unwrap() - 1.199678640257734).abs() < 1e-12);
    assert_eq!(v["max_abs_z_on_boundary"].as_f64().unwrap(), 1.0);

    let a2 = json(&coneres(&["an", "--dim", "2"]))["A_n"].as_f64().unwrap();
    assert!(a2.is_finite() && a2 > 0.0);

    assert_eq!(coneres(&["an", "--dim", "1"]).status.code(), Some(2));
}

#[test]
fn count_on_the_sphere_grows_cubically() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("res.csv");
    let out = coneres(&[
        "count",
        "--link",
        "sphere",
        "--dim",
        "3",
        "--rmax",
        "40",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let exponent = v["report"]["fitted_exponent"].as_f64().unwrap();
    assert!((exponent - 3.0).abs() < 0.15, "exponent {exponent}");
    assert_eq!(v["measure_zero_asserted"], Value::Bool(false));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("modulus,argument,nu,k,mult\n"));
    assert_eq!(text.lines().count() - 1, v["resonances"].as_u64().unwrap() as usize);
}

#[test]
fn count_rejects_bad_radius() {
    assert_eq!(coneres(&["count", "--rmax", "0"]).status.code(), Some(2));
    assert_eq!(coneres(&["count", "--rmax", "10", "--link", "torus"]).status.code(), Some(2));
}

fn write_sphere(dir: &Path, cutoff: &str) -> String {
    let path = dir.join("sphere.txt");
    let out = coneres(&[
        "spectrum",
        "sphere",
        "--dim",
        "3",
        "--cutoff",
        cutoff,
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    path.to_str().unwrap().to_string()
}

#[test]
fn file_link_matches_builtin_sphere() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_sphere(dir.path(), "62");
    let link = format!("file:{path}");
    let from_file = json(&coneres(&["count", "--link", &link, "--rmax", "30"]));
    let builtin = json(&coneres(&["count", "--link", "sphere", "--dim", "3", "--rmax", "30"]));
    assert_eq!(from_file["report"]["samples"], builtin["report"]["samples"]);
    assert_eq!(from_file["resonances"], builtin["resonances"]);
}

#[test]
fn short_spectrum_is_a_completeness_failure() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_sphere(dir.path(), "20");
    let out = coneres(&["count", "--link", &format!("file:{path}"), "--rmax", "40"]);
    assert_eq!(out.status.code(), Some(4));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("need cutoff mu >="), "{err}");
}

#[test]
fn malformed_spectrum_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    std::fs::write(&path, "n=3 vol=12.5 cutoff=5\n1.0,notanumber\n").unwrap();
    let out = coneres(&["spectrum", "validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = coneres(&["count", "--link", &format!("file:{}", path.display()), "--rmax", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn spectrum_validate_reports_weyl_coefficient() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_sphere(dir.path(), "62");
    let v = json(&coneres(&["spectrum", "validate", &path]));
    assert_eq!(v["n"], 3);
    assert_eq!(v["total_multiplicity"], 62 * 62);
    assert!((v["weyl_coefficient"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn fit_reads_samples() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("samples.csv");
    // exact r³ growth with coefficient 2
    let body: String = [10.0f64, 15.0, 20.0, 25.0, 30.0]
        .iter()
        .map(|r| format!("{r},{}\n", (2.0 * r * r * r) as u64))
        .collect();
    std::fs::write(&path, format!("r,count\n{body}")).unwrap();
    let out = coneres(&["fit", "--samples", path.to_str().unwrap(), "--dim", "3", "--vol", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["fitted_exponent"].as_f64().unwrap() - 3.0).abs() < 1e-12);
    assert!((v["fitted_coefficient"].as_f64().unwrap() - 2.0).abs() < 1e-12);

    std::fs::write(&path, "r,count\n10,5\n20,40\n").unwrap();
    let out = coneres(&["fit", "--samples", path.to_str().unwrap(), "--dim", "3", "--vol", "1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn kernel_check_passes_off_resonance() {
    let out = coneres(&[
        "kernel-check",
        "--nu",
        "1.5",
        "--lambda-abs",
        "2",
        "--lambda-arg",
        "0.3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let ratio = v["ratio"].as_f64().unwrap();
    assert!((3.0..=5.0).contains(&ratio));
    assert_eq!(v["boundary_ok"], Value::Bool(true));
    assert_eq!(v["diagonal_ok"], Value::Bool(true));
}

#[test]
fn kernel_check_at_a_resonance_reports_a_pole() {
    // H¹_{3/2}(λ) vanishes at λ = -i
    let out = coneres(&[
        "kernel-check",
        "--nu",
        "1.5",
        "--lambda-abs",
        "1",
        "--lambda-arg",
        "-1.5707963267948966",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stderr).unwrap().contains("resonance"));
}

#[test]
fn output_is_independent_of_worker_count() {
    let args = ["count", "--rmax", "25", "--sector", "25:-0.4:0"];
    let one = coneres(&[&["--workers", "1"][..], &args[..]].concat());
    let four = coneres(&[&["--workers", "4"][..], &args[..]].concat());
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);

    let z1 = coneres(&["--workers", "1", "zeros", "--nu", "37.3"]);
    let z4 = coneres(&["--workers", "4", "zeros", "--nu", "37.3"]);
    assert_eq!(z1.stdout, z4.stdout);
    assert_eq!(coneres(&["--workers", "0", "zeros", "--nu", "3"]).status.code(), Some(2));
}
