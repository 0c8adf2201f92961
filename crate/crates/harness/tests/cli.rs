use std::path::Path;
use std::process::{Command, Output};

use dirac4cfd::observables::total_density;
use dirac4cfd::Preset;
use dirac4cfd_harness::output::read_f64_le;

fn dirac4cfd(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dirac4cfd"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SMALL_SWEEP: &str = r#"
epsilon = [1.0, 0.5]
h = ["pi/8", "pi/16", "pi/32"]
tau = 1e-3
t_final = 0.5

[reference]
n = 64
tau = 1e-3
gate = false
"#;

#[test]
fn oracle_check_passes_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let ra = dirac4cfd(&["oracle-check", "--seed", "11"], &a);
    let rb = dirac4cfd(&["oracle-check", "--seed", "11"], &b);
    assert!(ra.status.success(), "{}", stderr(&ra));
    assert!(rb.status.success());
    let ja = std::fs::read(a.join("oracle_report.json")).unwrap();
    assert_eq!(ja, std::fs::read(b.join("oracle_report.json")).unwrap());
    let report: serde_json::Value = serde_json::from_slice(&ja).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["seed"], 11);
}

#[test]
fn converge_space_writes_recomputable_orders() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.toml");
    std::fs::write(&cfg, SMALL_SWEEP).unwrap();
    let cfg = cfg.to_str().unwrap();
    let out = dir.path().join("run1");
    let r = dirac4cfd(&["converge-space", "--config", cfg], &out);
    assert!(r.status.success(), "{}", stderr(&r));

    let csv_path = out.join("converge_space.csv");
    let mut rdr = csv::Reader::from_path(&csv_path).unwrap();
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(&header[..6], ["epsilon", "resolution", "e_phi", "e_rho", "e_J", "order_phi"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 6);
    for pair in rows.windows(2) {
        if pair[0][0] != pair[1][0] {
            continue;
        }
        for (err_col, ord_col) in [(2, 5), (3, 6), (4, 7)] {
            let coarse: f64 = pair[0][err_col].parse().unwrap();
            let fine: f64 = pair[1][err_col].parse().unwrap();
            let order: f64 = pair[1][ord_col].parse().unwrap();
            assert!(((coarse / fine).log2() - order).abs() < 1e-8);
        }
    }
    for row in &rows {
        let digits = row[2].split('e').next().unwrap().replace(['.', '-'], "");
        assert!(digits.len() >= 6, "{}", &row[2]);
    }
    assert!(rows.iter().all(|r| r[5].is_empty() || r[0] == rows[0][0] || r[1] != rows[3][1]));
    assert!(rows[0][5].is_empty() && rows[3][5].is_empty());

    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out.join("run-manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["spec"]["command"], "converge-space");
    assert_eq!(manifest["spec"]["preset"], "dirac1d-standard");
    assert_eq!(manifest["spec"]["reference"]["n"], 64);

    let again = dir.path().join("run2");
    let r = Command::new(env!("CARGO_BIN_EXE_dirac4cfd"))
        .args(["converge-space", "--config", cfg, "--out"])
        .arg(&again)
        .env("DIRAC4CFD_THREADS", "1")
        .output()
        .unwrap();
    assert!(r.status.success());
    assert_eq!(
        std::fs::read(&csv_path).unwrap(),
        std::fs::read(again.join("converge_space.csv")).unwrap()
    );
}

#[test]
fn stability_gate_refuses_then_warns() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["solve", "--tau", "0.6", "--tfinal", "1.8", "--h", "pi/16"];
    let r = dirac4cfd(&args, dir.path());
    assert!(!r.status.success());
    assert!(stderr(&r).contains("stability"), "{}", stderr(&r));

    let mut with_flag = args.to_vec();
    with_flag.push("--allow-unstable");
    let r = dirac4cfd(&with_flag, dir.path());
    assert!(r.status.success(), "{}", stderr(&r));
    assert!(stderr(&r).contains("warning"));
    assert!(dir.path().join("solution.csv").exists());

    let r = dirac4cfd(&["solve", "--tau", "0.45", "--tfinal", "1.8", "--h", "pi/16"], dir.path());
    assert!(r.status.success());
    assert!(!stderr(&r).contains("warning"));
}

#[test]
fn solve_compares_with_reference() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("ref.toml");
    std::fs::write(&cfg, "[reference]\nn = 128\ntau = 1e-3\ngate = false\n").unwrap();
    let r = dirac4cfd(
        &[
            "solve",
            "--config",
            cfg.to_str().unwrap(),
            "--h",
            "pi/32",
            "--tau",
            "1e-3",
            "--tfinal",
            "0.5",
            "--compare-reference",
        ],
        dir.path(),
    );
    assert!(r.status.success(), "{}", stderr(&r));
    let mut rdr = csv::Reader::from_path(dir.path().join("errors.csv")).unwrap();
    let row = rdr.records().next().unwrap().unwrap();
    let e_phi: f64 = row[3].parse().unwrap();
    assert!(e_phi > 0.0 && e_phi < 1e-2, "{e_phi}");
}

#[test]
fn dynamics_snapshots_and_sidecars() {
    let dir = tempfile::tempdir().unwrap();
    let r = dirac4cfd(
        &[
            "dynamics2d",
            "--preset",
            "periodic-em-2d",
            "--n",
            "32",
            "--tau",
            "0.01",
            "--tfinal",
            "0.1",
            "--snapshots",
            "0,0.1",
            "--epsilon",
            "1,0.5",
        ],
        dir.path(),
    );
    assert!(r.status.success(), "{}", stderr(&r));
    let grid = Preset::PeriodicEm2d.grid(32).unwrap();
    let rho0 = total_density(&Preset::PeriodicEm2d.sample_initial(&grid).unwrap());
    for eps in ["1", "0.5"] {
        let raw = read_f64_le(&dir.path().join(format!("rho_eps{eps}_t0.f64"))).unwrap();
        assert_eq!(raw, rho0);
        let meta: serde_json::Value = serde_json::from_slice(
            &std::fs::read(dir.path().join(format!("rho_eps{eps}_t0.1.json"))).unwrap(),
        )
        .unwrap();
        assert_eq!(meta["shape"], serde_json::json!([32, 32]));
        assert_eq!(meta["t"], 0.1);
        let raw = read_f64_le(&dir.path().join(format!("rho_eps{eps}_t0.1.f64"))).unwrap();
        assert_eq!(raw.len(), 32 * 32);
        assert!(raw.iter().all(|r| *r >= 0.0));
    }
    assert!(dir.path().join("dynamics_summary.csv").exists());
}

#[test]
fn conserve_writes_series() {
    let dir = tempfile::tempdir().unwrap();
    let r = dirac4cfd(&["conserve", "--epsilon", "1", "--h", "pi/16", "--tfinal", "0.2"], dir.path());
    assert!(r.status.success(), "{}", stderr(&r));
    let mut rdr = csv::Reader::from_path(dir.path().join("conserve.csv")).unwrap();
    let mass: Vec<f64> = rdr.records().map(|r| r.unwrap()[3].parse().unwrap()).collect();
    assert_eq!(mass.len(), 21);
    assert!(mass.iter().all(|m| ((m - mass[0]) / mass[0]).abs() < 1e-10));
}

#[test]
fn invalid_input_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let r = dirac4cfd(&["solve", "--preset", "nope"], dir.path());
    assert_eq!(r.status.code(), Some(2));
    assert!(stderr(&r).contains("unknown preset"));

    let r = dirac4cfd(&["solve", "--tau", "0.3", "--tfinal", "1"], dir.path());
    assert_eq!(r.status.code(), Some(2));

    let r = Command::new(env!("CARGO_BIN_EXE_dirac4cfd"))
        .args(["oracle-check", "--out"])
        .arg(dir.path())
        .env("DIRAC4CFD_THREADS", "zero")
        .output()
        .unwrap();
    // the oracle check never spawns a pool, so only sweeps read the variable
    assert!(r.status.success());
    let r = Command::new(env!("CARGO_BIN_EXE_dirac4cfd"))
        .args(["conserve", "--h", "pi/8", "--tfinal", "0.1", "--out"])
        .arg(dir.path())
        .env("DIRAC4CFD_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(r.status.code(), Some(2));
    assert!(stderr(&r).contains("DIRAC4CFD_THREADS"));
}
