use std::path::Path;
use std::process::{Command, Output};

fn hardisk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hardisk"))
        .args(args)
        .output()
        .expect("running hardisk")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn bound_for_eight_cells() {
    let out = hardisk(&["bound", "--L", "8"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["L"], 8);
    let rho = v["rho_star"].as_f64().unwrap();
    assert!((rho - 0.150024).abs() < 2e-4);
    assert_eq!(v["metric"]["values"].as_array().unwrap().len(), 8);
}

#[test]
fn table_rows_are_ordered_and_nondecreasing() {
    let out = hardisk(&["table", "--Ls", "8,16,32"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("L,rho_star"));
    let rows: Vec<(usize, f64)> = lines
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.iter().map(|r| r.0).collect::<Vec<_>>(), [8, 16, 32]);
    assert!(rows.windows(2).all(|w| w[0].1 <= w[1].1));

    let single = stdout(&hardisk(&["table", "--Ls", "8"]));
    assert_eq!(single.lines().count(), 2);
}

#[test]
fn metric_writes_csv_report_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("m.csv");
    let out = hardisk(&["metric", "--L", "256", "--rho", "0.1544", "--out", path_str(&out_path)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = json(&out);
    assert_eq!(summary["tight_lambda_max"].as_f64(), Some(2.0));
    assert!(summary["max_overlay_error"].as_f64().unwrap() < 5e-3);

    let csv = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(csv.lines().count(), 257);
    let report = std::fs::read_to_string(dir.path().join("m.report.csv")).unwrap();
    let header = report.lines().next().unwrap();
    assert_eq!(header, "lambda_right,d,minimal,residual,tight,analytic");
    // overlay present exactly for λ ≤ 1
    let with_overlay = report.lines().skip(1).filter(|l| !l.ends_with(',')).count();
    assert_eq!(with_overlay, 64);
    assert!(dir.path().join("m.axioms.json").exists());
    let manifest: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("m.csv.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["command"], "metric");
    assert_eq!(manifest["parameters"]["rho"], 0.1544);
}

#[test]
fn small_metric_passes_axioms() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("m2.csv");
    let out = hardisk(&["metric", "--L", "2", "--rho", "0.05", "--out", path_str(&out_path)]);
    assert!(out.status.success());
    let summary = json(&out);
    for key in ["monotonicity", "subadditivity", "tail", "range"] {
        assert!(summary["axioms"][key].as_array().unwrap().is_empty(), "{key}");
    }
    assert_eq!(std::fs::read_to_string(&out_path).unwrap().lines().count(), 3);
}

#[test]
fn exit_codes() {
    assert_eq!(hardisk(&["bound", "--L", "0"]).status.code(), Some(2));
    assert_eq!(hardisk(&["bound", "--variant", "sideways"]).status.code(), Some(2));
    assert_eq!(hardisk(&["frobnicate"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("x.csv");
    assert_eq!(
        hardisk(&["metric", "--L", "8", "--rho", "0.2", "--out", path_str(&p)]).status.code(),
        Some(3)
    );
    assert_eq!(
        hardisk(&["simulate", "--n", "4", "--rho", "0.2", "--steps", "10"]).status.code(),
        Some(3)
    );
    let missing = dir.path().join("missing.csv");
    let args = ["couple", "--n", "8", "--rho", "0.1", "--ell", "1", "--trials", "5"];
    let mut with_metric = args.to_vec();
    with_metric.extend(["--metric", path_str(&missing)]);
    assert_eq!(hardisk(&with_metric).status.code(), Some(4));
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "lambda_right,d\n1,0.5\n").unwrap();
    let mut with_bad = args.to_vec();
    with_bad.extend(["--metric", path_str(&bad)]);
    assert_eq!(hardisk(&with_bad).status.code(), Some(4));
}

#[test]
fn simulate_reports_acceptance_and_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let snap = dir.path().join("snap");
    let out = hardisk(&[
        "simulate", "--n", "64", "--rho", "0.15", "--steps", "200000", "--seed", "7",
        "--snapshot", path_str(&snap),
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["steps"], 200000);
    assert!(v["acceptance_rate"].as_f64().unwrap() > 0.4 - 3.0 * (0.24f64 / 2e5).sqrt());
    assert!(dir.path().join("snap.csv").exists());
    assert!(dir.path().join("snap.json").exists());
    assert!(dir.path().join("snap.csv.manifest.json").exists());
}

#[test]
fn couple_is_reproducible_and_replayable() {
    let dir = tempfile::tempdir().unwrap();
    let metric = dir.path().join("m.csv");
    assert!(hardisk(&["metric", "--L", "32", "--rho", "0.14", "--out", path_str(&metric)])
        .status
        .success());
    let first = dir.path().join("c1.json");
    let args = |out: &Path| {
        vec![
            "couple".to_string(), "--n".into(), "16".into(), "--rho".into(), "0.14".into(),
            "--ell".into(), "2".into(), "--trials".into(), "20000".into(), "--metric".into(),
            path_str(&metric).into(), "--seed".into(), "7".into(), "--out".into(),
            path_str(out).into(),
        ]
    };
    let a: Vec<String> = args(&first);
    let out = hardisk(&a.iter().map(String::as_str).collect::<Vec<_>>());
    assert!(out.status.success());
    let v = json(&out);
    assert!(v["mean_delta_exact"].as_f64().unwrap() <= v["mean_delta_bound"].as_f64().unwrap());
    let counts: u64 = v["outcome_counts"]
        .as_object()
        .unwrap()
        .values()
        .map(|c| c.as_u64().unwrap())
        .sum();
    assert_eq!(counts, 20000);

    let again = hardisk(&a.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(out.stdout, again.stdout);

    let saved = std::fs::read(&first).unwrap();
    std::fs::remove_file(&first).unwrap();
    let manifest = dir.path().join("c1.json.manifest.json");
    let replay = hardisk(&["replay", path_str(&manifest)]);
    assert!(replay.status.success());
    assert_eq!(std::fs::read(&first).unwrap(), saved);
}

#[test]
fn numbers_use_twelve_significant_digits() {
    let out = stdout(&hardisk(&["table", "--Ls", "16"]));
    let value = out.lines().nth(1).unwrap().split(',').nth(1).unwrap();
    let digits = value.chars().filter(char::is_ascii_digit).collect::<String>();
    assert_eq!(digits.trim_start_matches('0').len(), 12, "{value}");
}
