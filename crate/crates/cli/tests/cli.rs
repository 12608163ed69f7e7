use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use capshape::report::Report;
use capshape::search::{Branch, SolveReport, SweepRow};

fn capshape(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_capshape"))
        .arg("--out-dir")
        .arg(out)
        .args(args)
        .env_remove("CAPSHAPE_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn report<T: serde::de::DeserializeOwned>(path: &Path) -> Report<T> {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn bifurcation_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = capshape(
        dir.path(),
        &["bifurcations", "--dimension", "3", "--modes", "2..6"],
    );
    assert!(o.status.success());
    assert!(stdout(&o).contains("1/2"));
    let csv = fs::read_to_string(dir.path().join("bifurcations.csv")).unwrap();
    assert!(csv.starts_with("N,l,numerator,denominator,Gamma\n"));
    assert!(csv.contains("3,2,1,2,0.5\n"));
    let o = capshape(
        dir.path(),
        &["bifurcations", "--dimension", "4", "--modes", "2"],
    );
    assert!(stdout(&o).contains("6/5"));
}

#[test]
fn normalize_example() {
    let dir = tempfile::tempdir().unwrap();
    let o = capshape(
        dir.path(),
        &[
            "normalize",
            "--dimension",
            "3",
            "--gamma",
            "2",
            "--u0",
            "1",
            "--R0",
            "1",
        ],
    );
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("Gamma = 2\n") && s.contains("C0 = 1\n"), "{s}");
    let r: Report<serde_json::Value> = report(&dir.path().join("normalize.json"));
    assert_eq!(r.results["C0"], 1.0);
    assert_eq!(r.header.sign_conventions.len(), 6);
}

#[test]
fn identities_on_the_ball() {
    let dir = tempfile::tempdir().unwrap();
    let ball = dir.path().join("ball3.json");
    fs::write(&ball, r#"{"dimension":3,"coefficients":[1.0]}"#).unwrap();
    let o = capshape(
        dir.path(),
        &[
            "identities",
            "--domain",
            ball.to_str().unwrap(),
            "--Gamma",
            "1.5",
        ],
    );
    assert!(o.status.success(), "{}", stdout(&o));
    let r: Report<serde_json::Value> = report(&dir.path().join("identities.json"));
    assert_eq!(r.summary.failed, 0);
    let am = r.results["suite"]["reports"]
        .as_array()
        .unwrap()
        .iter()
        .find(|x| x["name"] == "am_inequality")
        .unwrap()
        .clone();
    assert!(am["defect"].as_f64().unwrap().abs() < 1e-10);
    let csv = fs::read_to_string(dir.path().join("identities.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + r.summary.passed);
}

#[test]
fn physical_parameters_resolve_to_gamma() {
    let dir = tempfile::tempdir().unwrap();
    let o = capshape(
        dir.path(),
        &[
            "identities",
            "--dimension",
            "2",
            "--coefficients",
            "1,0,0,0.05,0",
            "--gamma",
            "0.6",
            "--alpha",
            "0.3",
        ],
    );
    assert!(o.status.success());
    let r: Report<serde_json::Value> = report(&dir.path().join("identities.json"));
    assert_eq!(r.results["suite"]["Gamma"], 2.0);
}

#[test]
fn spectrum_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = capshape(
        dir.path(),
        &[
            "spectrum",
            "--dimension",
            "2",
            "--modes",
            "2,3",
            "--Gamma",
            "1/3,1",
        ],
    );
    assert!(o.status.success());
    let csv = fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("N,l,Gamma,analytic,numeric,gap"));
    assert_eq!(lines.count(), 4);
}

#[test]
fn branch_outputs_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let o = capshape(
        dir.path(),
        &[
            "branch",
            "--dimension",
            "2",
            "--mode",
            "2",
            "--steps",
            "2",
            "--ds",
            "0.01",
        ],
    );
    assert!(o.status.success(), "{}", stdout(&o));
    let r: Report<Branch> = report(&dir.path().join("branch.json"));
    assert_eq!(r.results.points.len(), 3);
    let dat = fs::read_to_string(dir.path().join("branch.dat")).unwrap();
    assert_eq!(dat.lines().filter(|l| !l.starts_with('#')).count(), 3);
    for l in dat.lines().skip(1) {
        let cols: Vec<f64> = l.split_whitespace().map(|v| v.parse().unwrap()).collect();
        assert_eq!(cols.len(), 2);
    }
}

#[test]
fn sweep_is_byte_identical_across_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = [
        "sweep",
        "--dimension",
        "2",
        "--Gamma",
        "-1,2",
        "--seeds",
        "2",
        "--seed",
        "4",
    ];
    assert!(capshape(a.path(), &args).status.success());
    assert!(capshape(b.path(), &args).status.success());
    for f in ["sweep.csv", "sweep.dat", "sweep.json"] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
    let r: Report<Vec<SweepRow>> = report(&a.path().join("sweep.json"));
    assert_eq!(r.results.len(), 4);
    assert_eq!(r.results[0].seed, 4);
}

#[test]
fn failed_assertion_sets_exit_status() {
    let dir = tempfile::tempdir().unwrap();
    let o = capshape(
        dir.path(),
        &[
            "solve",
            "--dimension",
            "2",
            "--coefficients",
            "1,0,0,0.1,0",
            "--Gamma",
            "2",
            "--max-iterations",
            "0",
        ],
    );
    assert_eq!(o.status.code(), Some(1));
    let r: Report<SolveReport> = report(&dir.path().join("solve.json"));
    assert!(!r.results.converged);
    assert!(r.summary.failed > 0);

    let o = capshape(
        dir.path(),
        &[
            "solve",
            "--dimension",
            "2",
            "--coefficients",
            "1,0,0,0.1,0",
            "--Gamma",
            "2",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let r: Report<SolveReport> = report(&dir.path().join("solve.json"));
    assert!(r.results.converged && r.summary.failed == 0);
}

#[test]
fn malformed_input_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = capshape(dir.path(), &["solve", "--coefficients", "1,0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = capshape(
        dir.path(),
        &["identities", "--domain", "missing.json", "--Gamma", "1"],
    );
    assert_eq!(o.status.code(), Some(2));
    let o = capshape(
        dir.path(),
        &[
            "identities",
            "--dimension",
            "2",
            "--coefficients",
            "1,0,0",
            "--Gamma",
            "1",
            "--gamma",
            "1",
        ],
    );
    assert_eq!(o.status.code(), Some(2));
    let o = capshape(
        dir.path(),
        &[
            "normalize",
            "--dimension",
            "3",
            "--gamma",
            "1",
            "--u0",
            "0",
            "--R0",
            "1",
        ],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Alexandrov"));
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_capshape"))
        .args(["bifurcations", "--dimension", "2", "--modes", "2..3"])
        .env("CAPSHAPE_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(dir.path().join("bifurcations.csv").exists());
}
