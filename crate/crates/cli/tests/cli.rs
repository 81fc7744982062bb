use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use jsonschema::{Registry, Resource, Validator};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vacfluct"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

/// Rows of a CSV as maps keyed by header.
fn csv(text: &str) -> Vec<Vec<(String, String)>> {
    let mut lines = text.lines();
    let header: Vec<String> = lines.next().expect("header").split(',').map(String::from).collect();
    lines
        .map(|l| header.iter().cloned().zip(l.split(',').map(String::from)).collect())
        .collect()
}

fn field(row: &[(String, String)], key: &str) -> String {
    row.iter().find(|(k, _)| k == key).unwrap_or_else(|| panic!("no column {key}")).1.clone()
}

fn num(row: &[(String, String)], key: &str) -> f64 {
    field(row, key).parse().unwrap()
}

fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/schemas")
}

fn load(name: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(schema_dir().join(name)).unwrap()).unwrap()
}

const BASE: &str = "https://vacfluct.invalid/schemas/";

fn validator(name: &str) -> Validator {
    let registry = Registry::new()
        .add(
            format!("{BASE}decomposition.schema.json"),
            Resource::from_contents(load("decomposition.schema.json")),
        )
        .unwrap()
        .prepare()
        .unwrap();
    jsonschema::options()
        .with_base_uri(BASE)
        .with_registry(&registry)
        .build(&load(name))
        .unwrap()
}

fn assert_valid(schema: &str, doc: &Value) {
    let v = validator(schema);
    let errors: Vec<String> = v.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{schema}: {errors:?}\n{doc:#}");
}

fn sp(omega: f64) -> String {
    format!("kind=single-pole,omega={omega}")
}

#[test]
fn casimir_closed_form() {
    let o = run(&["casimir", "--closed-form", "--q", "1"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.starts_with("q,force,abs_error,evaluations,status\n"));
    assert!(text.contains("1.308996938996e-01"), "{text}");
}

#[test]
fn casimir_transparent_mirror() {
    let o = run(&["casimir", "--mirror", "kind=transparent", "--mirror", &sp(5.0), "--q", "1"]);
    assert_eq!(code(&o), 0);
    let rows = csv(&stdout(&o));
    assert_eq!(num(&rows[0], "force"), 0.0);
}

#[test]
fn casimir_single_pole_sweep_approaches_perfect() {
    let target = PI / 24.0;
    let mut errors = Vec::new();
    for cut in [10.0, 100.0] {
        let o = run(&["casimir", "--mirror", &sp(cut), "--mirror", &sp(cut), "--q", "1"]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let rows = csv(&stdout(&o));
        assert_eq!(field(&rows[0], "status"), "ok");
        errors.push((num(&rows[0], "force") - target).abs() / target);
    }
    assert!(errors[1] < errors[0]);
    assert!(errors[1] < 0.02, "{errors:?}");
}

#[test]
fn casimir_needs_two_mirrors() {
    let o = run(&["casimir", "--mirror", &sp(1.0), "--q", "1"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn casimir_convergence_failure_is_flagged() {
    let o = run(&["casimir", "--mirror", &sp(30.0), "--mirror", &sp(30.0), "--q", "1", "--tol", "1e-16"]);
    assert_eq!(code(&o), 3);
    let rows = csv(&stdout(&o));
    assert_eq!(field(&rows[0], "status"), "convergence");
    assert!(num(&rows[0], "force") > 0.0);
}

#[test]
fn noise_perfect_mirror() {
    let o = run(&["noise", "--mirror", "kind=perfect", "--grid", "0,2,3,lin"]);
    assert_eq!(code(&o), 0);
    let rows = csv(&stdout(&o));
    assert_eq!(rows.len(), 3);
    let want = 1.0 / (3.0 * PI);
    assert_eq!(field(&rows[1], "c_ff"), format!("{}", "1.061032953946e-01"));
    assert!((num(&rows[1], "c_ff") - want).abs() < 1e-12);
    assert!(rows.iter().all(|r| num(r, "omega") >= 0.0));
}

#[test]
fn noise_rejects_negative_frequencies() {
    let o = run(&["noise", "--mirror", "kind=perfect", "--grid", "-1,1,5,lin"]);
    assert_eq!(code(&o), 2);
}

/// `C_FF = hbar^2 Re K / pi` with the closed-form kernel of a single-pole mirror.
fn single_pole_noise(cut: f64, w: f64) -> f64 {
    use num_complex::Complex64;
    let i = Complex64::new(0.0, 1.0);
    let (c, w) = (Complex64::from(cut), Complex64::from(w));
    let k = i * c * (w + 2.0 * i * c) * w + 2.0 * c * c * (w + i * c) * (1.0 - i * w / c).ln();
    k.re / PI
}

#[test]
fn noise_single_pole_matches_closed_form() {
    let o = run(&["noise", "--mirror", &sp(2.0), "--grid", "0.5,20,9,log"]);
    assert_eq!(code(&o), 0);
    for row in csv(&stdout(&o)) {
        let w = num(&row, "omega");
        let want = single_pole_noise(2.0, w);
        assert!((num(&row, "c_ff") - want).abs() <= 1e-9 * want, "w {w}");
        assert!((num(&row, "c_ff") - 2.0 * num(&row, "xi_ff")).abs() <= 1e-9 * want);
    }
}

#[test]
fn susceptibility_perfect_mirror() {
    let o = run(&["susceptibility", "--mirror", "kind=perfect", "--grid", "0,4,5,lin"]);
    assert_eq!(code(&o), 0);
    let rows = csv(&stdout(&o));
    assert_eq!(num(&rows[0], "re_chi"), 0.0);
    assert_eq!(num(&rows[0], "im_chi"), 0.0);
    for r in &rows {
        let w = num(r, "omega");
        let want = w.powi(3) / (6.0 * PI);
        assert!((num(r, "im_chi") - want).abs() <= 1e-11 * want.max(1e-300));
    }
}

#[test]
fn susceptibility_default_grid_dispersion_defect() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("chi.csv");
    let o = run(&["susceptibility", "--mirror", &sp(1.0), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv(&fs::read_to_string(&out).unwrap());
    assert_eq!(rows.len(), 4097);
    assert_eq!(num(rows.last().unwrap(), "omega"), 50.0);
    let defects: Vec<f64> = rows.iter().map(|r| num(r, "kk_defect")).filter(|d| !d.is_nan()).collect();
    assert!(defects.len() > 1000);
    let worst = defects.iter().cloned().fold(0.0, f64::max);
    assert!(worst <= 3e-7, "{worst}");
}

#[test]
fn stability_reports() {
    let o = run(&["stability", "--mirror", &sp(1.0), "--m0", "1"]);
    assert_eq!(code(&o), 0);
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_valid("stability.schema.json", &doc);
    assert_eq!(doc["stable"], Value::Bool(true));
    assert_eq!(doc["uhp_pole_count"], 0);
    let m_ind = doc["ledger"]["induced_mass"].as_f64().unwrap();
    assert!((m_ind - 1.0 / (2.0 * PI)).abs() < 1e-5);

    let o = run(&["stability", "--mirror", &sp(1.0), "--m0", "0.1"]);
    assert_eq!(code(&o), 0);
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["stable"], Value::Bool(false));
    assert_eq!(doc["uhp_pole_count"], 1);
}

#[test]
fn stability_perfect_mirror_has_no_cutoff() {
    let o = run(&["stability", "--mirror", "kind=perfect", "--m0", "1"]);
    assert_eq!(code(&o), 4);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("cut-off"), "{err}");
}

#[test]
fn position_noise_with_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pn.csv");
    let m0 = format!("{}", 100.0 / (2.0 * PI));
    let o = run(&[
        "position-noise", "--mirror", &sp(1.0), "--m0", &m0, "--omega0", "1",
        "--grid", "0.5,1.5,2001,lin", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv(&fs::read_to_string(&out).unwrap());
    assert_eq!(rows.len(), 2001);
    assert!(rows.iter().all(|r| num(r, "c_qq") >= 0.0));
    let sidecar: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("pn.decomposition.json")).unwrap()).unwrap();
    assert_valid("decomposition.schema.json", &sidecar);
    let center = sidecar["peak"]["center"].as_f64().unwrap();
    assert!((center - 1.0).abs() < 0.01, "{center}");
    assert!(sidecar["background_median"].as_f64().unwrap() > 0.0);
}

#[test]
fn position_noise_flags_dropped_resonance() {
    let o = run(&[
        "position-noise", "--mirror", "kind=transparent", "--m0", "1", "--omega0", "1",
        "--grid", "0.5,1.5,5,lin", "--format", "json",
    ]);
    assert_eq!(code(&o), 0);
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_valid("table.schema.json", &doc);
    let cols: Vec<&str> = doc["columns"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
    let status = cols.iter().position(|&c| c == "status").unwrap();
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows[2][0].as_f64().unwrap(), 1.0);
    assert_eq!(rows[2][status], "resonance");
    assert_eq!(rows[0][status], "ok");
    assert!(doc["decomposition"]["peak"].is_null());
}

#[test]
fn stress4d_components() {
    let o = run(&["stress4d", "1", "0", "0", "0"]);
    assert_eq!(code(&o), 0);
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_valid("stress4d.schema.json", &doc);
    let c = doc["components"].as_object().unwrap();
    let v = c["1,2,1,2"].as_f64().unwrap();
    assert!((v - 1.0 / (80.0 * PI)).abs() < 1e-14);
    for (key, value) in c {
        let i: Vec<&str> = key.split(',').collect();
        let swapped = format!("{},{},{},{}", i[2], i[3], i[0], i[1]);
        assert_eq!(&c[&swapped], value, "{key}");
    }
}

#[test]
fn stress4d_spacelike_is_empty() {
    let o = run(&["stress4d", "1", "2", "0", "-0.5"]);
    assert_eq!(code(&o), 0);
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_valid("stress4d.schema.json", &doc);
    assert!(doc["components"].as_object().unwrap().is_empty());
}

#[test]
fn json_table_validates() {
    let o = run(&["noise", "--mirror", &sp(1.0), "--grid", "0,3,4,lin", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_valid("table.schema.json", &doc);
    assert_eq!(doc["rows"].as_array().unwrap().len(), 4);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "mirror = \"kind=perfect\"\ngrid = \"0,2,3,lin\"\nhbar = 2.0\n").unwrap();
    let o = bin().args(["noise", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(code(&o), 0);
    let rows = csv(&stdout(&o));
    // hbar^2 w^3 / 3 pi with hbar = 2
    assert!((num(&rows[1], "c_ff") - 4.0 / (3.0 * PI)).abs() < 1e-12);

    let o = bin().args(["noise", "--hbar", "1", "--config"]).arg(&cfg).output().unwrap();
    let rows = csv(&stdout(&o));
    assert!((num(&rows[1], "c_ff") - 1.0 / (3.0 * PI)).abs() < 1e-12);

    fs::write(&cfg, "mirror = \"kind=perfect\"\nspeed = 3\n").unwrap();
    let o = bin().args(["noise", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = |p: &Path| {
        vec![
            "noise".to_string(), "--mirror".into(), sp(1.5), "--grid".into(), "0,10,64,lin".into(),
            "--temperature".into(), "0.7".into(), "--out".into(), p.to_str().unwrap().into(),
        ]
    };
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    assert_eq!(code(&bin().args(args(&a)).output().unwrap()), 0);
    assert_eq!(code(&bin().args(args(&b)).output().unwrap()), 0);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn bad_arguments_exit_2() {
    assert_eq!(code(&run(&["noise", "--mirror", "kind=mirror", "--grid", "0,1,3,lin"])), 2);
    assert_eq!(code(&run(&["noise", "--mirror", "kind=perfect", "--grid", "0,1"])), 2);
    assert_eq!(code(&run(&["casimir", "--closed-form", "--q", "-1"])), 2);
    assert_eq!(code(&run(&["noise", "--bogus"])), 2);
}
