use std::f64::consts::TAU;
use std::process::{Command, Output};

use qmetro::bounds::state_bound_report;
use qmetro::{EstimationReport, Generator, ProbeState};

fn qmetro(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmetro")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Value printed on the line starting with `key`.
fn printed(out: &str, key: &str) -> f64 {
    let line = out.lines().find(|l| l.starts_with(key)).unwrap_or_else(|| panic!("no {key} in\n{out}"));
    line.split_whitespace().nth_back(0).unwrap().parse().unwrap()
}

struct Row {
    family: String,
    n: f64,
    alpha: String,
    cr: f64,
    entropic: f64,
    asymptotic: f64,
}

fn bounds_rows(args: &[&str]) -> Vec<Row> {
    let o = qmetro(args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    assert_eq!(
        r.headers().unwrap().iter().collect::<Vec<_>>(),
        ["family", "n", "alpha", "delta_g", "entropy_g_nats", "cr_bound", "entropic_bound", "asymptotic_bound"]
    );
    r.records()
        .map(|rec| {
            let rec = rec.unwrap();
            Row {
                family: rec[0].to_string(),
                n: rec[1].parse().unwrap(),
                alpha: rec[2].to_string(),
                cr: rec[5].parse().unwrap(),
                entropic: rec[6].parse().unwrap(),
                asymptotic: rec[7].parse().unwrap(),
            }
        })
        .collect()
}

fn row<'a>(rows: &'a [Row], family: &str, n: f64) -> &'a Row {
    rows.iter().find(|r| r.family == family && r.n == n).unwrap()
}

#[test]
fn fig3_rows() {
    let rows = bounds_rows(&["fig3", "--n", "2,50,100"]);
    assert_eq!(rows.len(), 6);
    let ecs100 = row(&rows, "ecs", 100.0);
    assert!((ecs100.entropic - 0.1182).abs() < 5e-4, "{}", ecs100.entropic);
    assert!((ecs100.entropic - ecs100.asymptotic).abs() / ecs100.entropic < 0.05);

    let (e2, c2) = (row(&rows, "ecs", 2.0), row(&rows, "coh", 2.0));
    assert!((e2.entropic - c2.entropic).abs() / c2.entropic < 0.15);

    let (e50, c50) = (row(&rows, "ecs", 50.0), row(&rows, "coh", 50.0));
    assert!(c50.entropic < e50.entropic);
    assert!(e50.cr < c50.cr);
}

#[test]
fn bounds_include_noon_without_alpha() {
    let rows = bounds_rows(&["bounds", "--family", "noon", "--n-range", "1:3:5"]);
    // only the integer photon numbers of 1, 1.5, 2, 2.5, 3
    assert_eq!(rows.iter().map(|r| r.n).collect::<Vec<_>>(), [1.0, 2.0, 3.0]);
    assert!(rows.iter().all(|r| r.alpha.is_empty()));
    assert!(rows.iter().all(|r| (r.entropic - 0.7602).abs() < 1e-3));
}

#[test]
fn bounds_output_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = qmetro(&["bounds", "--n-range", "1:40:7", "--out", p.to_str().unwrap()]);
        assert!(o.status.success());
    }
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}

#[test]
fn bits_header() {
    let o = qmetro(&["bounds", "--n", "4", "--units", "bits"]);
    let first = stdout(&o).lines().next().unwrap().to_string();
    assert!(first.contains("entropy_g_bits"));
}

#[test]
fn simulate_noon_information_is_at_most_a_bit() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("noon.json");
    let o = qmetro(&[
        "simulate",
        "--state",
        "noon:n=8",
        "--prior",
        "uniform:width=6.283185",
        "--trials",
        "100000",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: EstimationReport = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert!(report.mutual_info_nats <= 0.72, "{}", report.mutual_info_nats);
    assert_eq!(report.phi_grid.len(), 64);
    let out = stdout(&o);
    assert!(printed(&out, "mutual_info") <= 0.72);
    assert!(printed(&out, "cr_bound") == 1.0 / 8.0);
}

#[test]
fn simulate_prints_library_bounds_exactly() {
    let o = qmetro(&["simulate", "--state", "ecs:alpha=10", "--trials", "1000", "--grid", "8"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let lib = state_bound_report(&ProbeState::ecs(10.0).unwrap(), Generator::N2, TAU.ln()).unwrap();
    let shown = printed(&out, "entropic_bound");
    assert_eq!(shown, lib.entropic_bound);
    assert!((shown - 0.1182).abs() < 5e-4);
    assert_eq!(printed(&out, "delta_g"), lib.delta_g);
}

#[test]
fn narrow_prior_hides_variance_bound() {
    let o = qmetro(&[
        "simulate",
        "--state",
        "noon:n=2",
        "--prior",
        "uniform:center=0,width=0.7854",
        "--trials",
        "1000",
        "--grid",
        "4",
    ]);
    assert!(o.status.success());
    assert!(!stdout(&o).contains("variance_entropic_bound"));
}

#[test]
fn simulate_curves_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curves.csv");
    let o = qmetro(&[
        "simulate", "--state", "cohpair:alpha=2", "--trials", "1000", "--grid", "8", "--format", "csv", "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("phi,bias,rmse_local,slope,precision"));
    assert_eq!(lines.count(), 8);
}

#[test]
fn iterate_counts_resources() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("it.json");
    let o = qmetro(&[
        "iterate", "--family", "coh", "--bits", "3", "--copies", "4", "--trials", "500", "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: EstimationReport = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(report.total_resources_n, 84.0);
    assert_eq!(printed(&stdout(&o), "total_n"), 84.0);
}

#[test]
fn verify_passes_and_mutation_fails() {
    let o = qmetro(&["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.lines().any(|l| l.contains("alpha=4") && l.contains("<= 1e-8") && l.starts_with("[PASS]")));

    let o = qmetro(&["verify", "--mutate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("[FAIL]"));
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["bounds", "--bogus"][..],
        &["bounds", "--n-range", "1:2"],
        &["bounds", "--n", "5,3"],
        &["simulate", "--state", "noon:n=0"],
        &["simulate", "--state", "noon:n=2", "--trials", "10"],
        &["simulate", "--state", "multi:[cohpair:alpha=1 x2]", "--trials", "1000"],
        &["iterate", "--bits", "0"],
    ] {
        assert_eq!(qmetro(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn io_errors_name_the_path() {
    let o = qmetro(&["bounds", "--n", "1", "--out", "/nonexistent/dir/b.csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent/dir/b.csv"));
}
