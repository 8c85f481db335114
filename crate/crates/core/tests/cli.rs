use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use riskvec::cli::SpecDocument;
use riskvec::{measure_vector, MeasureVector};
use serde_json::Value;
use tempfile::TempDir;

fn riskvec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_riskvec"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const ASSET_TWO: &str = r#"{"kind":"position","name":"asset 2","outcomes":[[2000000,0.95],[-1000000,0.01],[-1000000000,0.04]]}"#;
const LOAN: &str = r#"{"kind":"position","outcomes":[[0,0.96],[-1000000,0.04]]}"#;

#[test]
fn measures_on_asset_two() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "a2.json", ASSET_TWO);
    let out = riskvec(&["--json", "measures", arg(&spec), "--levels", "0.95"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let entry = &v["measures"]["entries"][0];
    assert_eq!(entry["var"].as_f64(), Some(1e6));
    assert_eq!(entry["tce"].as_f64(), Some(8.002e8));
    assert_eq!(v["measures"]["max_loss"].as_f64(), Some(1e9));
}

#[test]
fn text_report_flags_convention_divergence() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "a2.json", ASSET_TWO);
    let text = stdout(&riskvec(&["measures", arg(&spec)]));
    assert!(
        text.contains("largest quantile gives VaR -2000000"),
        "{text}"
    );

    let uniform = write(
        &dir,
        "u.json",
        r#"{"kind":"loss_distribution","segments":[[0,1,1,1]]}"#,
    );
    let text = stdout(&riskvec(&["measures", arg(&uniform)]));
    assert!(!text.contains("note:"), "{text}");
}

#[test]
fn json_output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let spec = write(
        &dir,
        "tail.json",
        r#"{"kind":"tail_spec","c":"2/3","d":"8/3","level":0.95}"#,
    );
    let runs: Vec<Vec<u8>> = (0..3)
        .map(|_| riskvec(&["--json", "measures", arg(&spec)]).stdout)
        .collect();
    assert!(runs.windows(2).all(|w| w[0] == w[1]));

    let v: Value = serde_json::from_slice(&runs[0]).unwrap();
    let parsed: MeasureVector = serde_json::from_value(v["measures"].clone()).unwrap();
    let doc = SpecDocument::from_path(&spec).unwrap();
    let direct = measure_vector(&doc.payload.loss_distribution().unwrap(), &[0.95, 0.99]).unwrap();
    assert_eq!(parsed, direct);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let broken = write(
        &dir,
        "broken.json",
        "{\"kind\": \"position\",\n \"outcomes\": [[1, 0.5],",
    );
    let out = riskvec(&["measures", arg(&broken)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let bad_mass = write(
        &dir,
        "mass.json",
        r#"{"kind":"position","outcomes":[[1,0.5]]}"#,
    );
    assert_eq!(
        riskvec(&["measures", arg(&bad_mass)]).status.code(),
        Some(2)
    );

    let missing = dir.path().join("absent.json");
    assert_eq!(riskvec(&["measures", arg(&missing)]).status.code(), Some(2));

    let loan = write(&dir, "loan.json", LOAN);
    assert_eq!(
        riskvec(&["measures", arg(&loan), "--levels", "1.5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(riskvec(&["family", arg(&loan)]).status.code(), Some(2));

    let capital = write(&dir, "cap.json", r#"{"kind":"capital","tier1":8}"#);
    assert_eq!(riskvec(&["basel", arg(&capital)]).status.code(), Some(2));
    let no_risk = write(
        &dir,
        "zero.json",
        r#"{"kind":"capital","tier1":8,"credit_risk":0}"#,
    );
    assert_eq!(riskvec(&["basel", arg(&no_risk)]).status.code(), Some(3));

    let tail = write(
        &dir,
        "tail.json",
        r#"{"kind":"tail_spec","c":0,"d":5,"level":0.95}"#,
    );
    assert_eq!(
        riskvec(&["family", arg(&tail), "--n", "100000"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn coherence_on_two_loan_fixture() {
    let dir = TempDir::new().unwrap();
    let loan = write(&dir, "loan.json", LOAN);
    let out = riskvec(&["coherence", "--measure", "var", arg(&loan)]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("subadditivity            FAIL"), "{text}");
    assert!(text.contains("lhs 1000000 vs rhs 0"), "{text}");

    // With atoms the tail conditional expectation is not subadditive either.
    for (measure, coherent) in [("tce", false), ("ml", true), ("scenario", true)] {
        let out = riskvec(&["--json", "coherence", "--measure", measure, arg(&loan)]);
        let v: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["coherent_on_family"], Value::Bool(coherent), "{measure}");
    }
}

#[test]
fn family_of_three() {
    let dir = TempDir::new().unwrap();
    let spec = write(
        &dir,
        "five.json",
        r#"{"kind":"tail_spec","c":0,"d":5,"level":0.95,"inner":[[0.99,4]]}"#,
    );
    let out = riskvec(&["--json", "family", arg(&spec), "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["members"].as_array().unwrap().len(), 3);
    assert_eq!(v["all_measures_equal"], Value::Bool(true));
    assert!(v["min_pairwise_l1"].as_f64().unwrap() >= 1e-3);

    let text = stdout(&riskvec(&["family", arg(&spec), "--n", "3"]));
    assert!(text.contains("all measures equal: yes"), "{text}");
}

#[test]
fn compare_reports_distinguishing_measures() {
    let dir = TempDir::new().unwrap();
    let u = write(
        &dir,
        "u.json",
        r#"{"kind":"tail_spec","c":0,"d":5,"level":0.95}"#,
    );
    let t = write(
        &dir,
        "t.json",
        r#"{"kind":"tail_spec","c":0,"d":5,"level":0.95,"shape":"triangular","apex":5}"#,
    );
    let out = riskvec(&["--json", "compare", arg(&u), arg(&t), "--levels", "0.95"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = v["report"]["rows"].as_array().unwrap();
    let unequal: Vec<&str> = rows
        .iter()
        .filter(|r| r["equal"] == Value::Bool(false))
        .map(|r| r["measure"].as_str().unwrap())
        .collect();
    assert_eq!(unequal, ["TCE 95%"]);
}

#[test]
fn basel_with_exposures() {
    let dir = TempDir::new().unwrap();
    let capital = write(
        &dir,
        "cap.json",
        r#"{"kind":"capital","tier1":8,"tier3":2,"market_risk":25}"#,
    );
    let book = write(
        &dir,
        "book.json",
        r#"{"kind":"exposures","exposures":[
            {"category":"residential_mortgage","amount":100},
            {"category":"private_sector","amount":50}]}"#,
    );
    let out = riskvec(&[
        "--json",
        "basel",
        arg(&capital),
        "--exposures",
        arg(&book),
        "--accord",
        "amendment1996",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["credit_risk"].as_f64(), Some(100.0));
    assert_eq!(v["ratio"].as_f64(), Some(0.08));
    assert_eq!(v["pass"], Value::Bool(true));

    let out = riskvec(&["basel", arg(&capital), "--exposures", arg(&book)]);
    assert_eq!(out.status.code(), Some(2));
}

fn csv_rows(text: &str) -> Vec<(f64, Option<f64>, Option<f64>)> {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,density,atom_mass"));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            assert_eq!(f.len(), 3);
            let opt = |s: &str| (!s.is_empty()).then(|| s.parse::<f64>().unwrap());
            (f[0].parse().unwrap(), opt(f[1]), opt(f[2]))
        })
        .collect()
}

#[test]
fn plot_csv_integrates_to_tail_mass() {
    let dir = TempDir::new().unwrap();
    let specs = [
        r#"{"kind":"tail_spec","c":0,"d":5,"level":0.95}"#,
        r#"{"kind":"tail_spec","c":0,"d":10,"level":0.95,"shape":"triangular","apex":0}"#,
        r#"{"kind":"tail_spec","c":3,"d":5,"level":0.95,"shape":"triangular","apex":3.4}"#,
        r#"{"kind":"tail_spec","c":0,"d":5,"level":0.95,"inner":[[0.99,4]]}"#,
    ];
    for (k, text) in specs.iter().enumerate() {
        let spec = write(&dir, &format!("s{k}.json"), text);
        for resolution in [2usize, 5, 40] {
            let out = riskvec(&["plot", arg(&spec), "--resolution", &resolution.to_string()]);
            assert_eq!(out.status.code(), Some(0));
            let rows = csv_rows(&stdout(&out));
            let density: Vec<(f64, f64)> =
                rows.iter().filter_map(|r| r.1.map(|d| (r.0, d))).collect();
            let area: f64 = density
                .windows(2)
                .map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0)
                .sum();
            assert!(
                (area - 0.05).abs() <= 1.0 / resolution as f64,
                "spec {k} resolution {resolution}: area {area}"
            );
            let atoms: Vec<_> = rows.iter().filter(|r| r.2.is_some()).collect();
            assert_eq!(atoms.len(), 1);
            assert!(atoms[0].1.is_none());
        }
    }

    let tri = write(
        &dir,
        "tri.json",
        r#"{"kind":"tail_spec","c":0,"d":10,"level":0.95,"shape":"triangular","apex":0}"#,
    );
    let rows = csv_rows(&stdout(&riskvec(&["plot", arg(&tri)])));
    let density: Vec<_> = rows.iter().filter(|r| r.1.is_some()).collect();
    assert_eq!(density[0].0, 0.0);
    assert!((density[0].1.unwrap() - 0.01).abs() < 1e-12);
    let last = density.last().unwrap();
    assert_eq!((last.0, last.1), (10.0, Some(0.0)));

    let point = write(
        &dir,
        "point.json",
        r#"{"kind":"position","outcomes":[[3,1]]}"#,
    );
    let rows = csv_rows(&stdout(&riskvec(&["plot", arg(&point)])));
    assert_eq!(rows, [(-3.0, None, Some(1.0))]);

    assert_eq!(
        riskvec(&["plot", arg(&point), "--resolution", "1"])
            .status
            .code(),
        Some(2)
    );
}
