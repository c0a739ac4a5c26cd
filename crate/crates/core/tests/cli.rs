use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use adiapower::cli::config::ConfigDocument;
use adiapower::cli::output::{fmt_f64, FIG4_HEADER, FIG5_HEADER, TRAJECTORY_HEADER};
use adiapower::{CoilPair, LossModel, Scenario, Schedule};
use num_complex::Complex64;
use proptest::prelude::*;
use tempfile::TempDir;

const FIG2_AP: &str = r#"{
  "schedule": {"variant": "LinearChirp", "kappa0": 40000.0, "delta": 200000.0, "beta": 3e9, "t0": 1e-4},
  "losses": {"gamma_S": 0.0, "gamma_D": 0.0, "gamma_W": 0.0},
  "t_start": 0.0,
  "t_end": 2e-4
}"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_adiapower"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_config(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn read_csv(path: &Path) -> (String, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    (header, rows)
}

fn column(header: &str, rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let i = header.split(',').position(|h| h == name).unwrap();
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn simulate_writes_trajectory() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "ap.json", FIG2_AP);
    let out = dir.path().join("out");
    let o = run(&["simulate", s(&cfg), "--out", s(&out), "--svg"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = read_csv(&out.join("trajectory.csv"));
    assert_eq!(header, TRAJECTORY_HEADER);
    assert_eq!(rows.len(), 201);
    let e_d = column(&header, &rows, "E_D");
    // Frozen from the reference integrator.
    assert!((e_d[200] - 0.978402).abs() < 1e-6, "{}", e_d[200]);
    assert!(out.join("trajectory.svg").exists());
    let text = stdout(&o);
    assert!(text.contains("eta: undefined"), "{text}");
    assert!(text.contains("r_max:"));
    assert!(text.contains("satisfied"));
}

#[test]
fn csv_values_round_trip() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "ap.json", FIG2_AP);
    assert_eq!(run(&["simulate", s(&cfg), "--out", s(dir.path())]).status.code(), Some(0));
    let (_, rows) = read_csv(&dir.path().join("trajectory.csv"));
    for field in rows.iter().flatten() {
        let x: f64 = field.parse().unwrap();
        assert_eq!(&fmt_f64(x), field);
    }
}

#[test]
fn output_dir_from_config() {
    let dir = TempDir::new().unwrap();
    let target = dir.path().join("nested");
    let text = FIG2_AP.replace(
        "\"t_end\": 2e-4",
        &format!("\"t_end\": 2e-4, \"output\": {{\"dir\": {:?}, \"diagnostics\": false}}", s(&target)),
    );
    let cfg = write_config(&dir, "ap.json", &text);
    assert_eq!(run(&["simulate", s(&cfg)]).status.code(), Some(0));
    let (header, rows) = read_csv(&target.join("trajectory.csv"));
    let i = header.split(',').position(|h| h == "theta").unwrap();
    assert!(rows.iter().all(|r| r[i].is_empty()));
}

#[test]
fn extraction_reports_efficiency() {
    let dir = TempDir::new().unwrap();
    let text = FIG2_AP.replace("\"gamma_W\": 0.0", "\"gamma_W\": 1e4");
    let cfg = write_config(&dir, "w.json", &text);
    let o = run(&["simulate", s(&cfg), "--out", s(dir.path())]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let line = text.lines().find(|l| l.starts_with("eta: ")).unwrap();
    let eta: f64 = line["eta: ".len()..].parse().unwrap();
    assert!(eta > 0.0 && eta <= 1.0);
}

#[test]
fn config_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let bad_window = write_config(&dir, "w.json", &FIG2_AP.replace("\"t_end\": 2e-4", "\"t_end\": 0.0"));
    let unknown = write_config(&dir, "u.json", &FIG2_AP.replace("\"t_end\"", "\"t_stop\": 1, \"t_end\""));
    let negative = write_config(&dir, "n.json", &FIG2_AP.replace("\"gamma_S\": 0.0", "\"gamma_S\": -1.0"));
    let missing = dir.path().join("absent.json");
    for cfg in [&bad_window, &unknown, &negative, &missing] {
        let o = run(&["simulate", s(cfg), "--out", s(dir.path())]);
        assert_eq!(o.status.code(), Some(2), "{}", cfg.display());
        assert!(!o.stderr.is_empty());
    }
    let o = run(&["simulate", s(&unknown)]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("t_stop"));
    assert_eq!(run(&["sweep", "fig7"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn solver_failure_exits_3() {
    let dir = TempDir::new().unwrap();
    let text = r#"{"schedule": {"variant": "Static", "kappa0": 1.0, "delta": 0.0},
                   "losses": {"gamma_S": 1e300, "gamma_D": 0.0, "gamma_W": 0.0}, "t_end": 1.0}"#;
    let cfg = write_config(&dir, "stiff.json", text);
    let o = run(&["simulate", s(&cfg), "--out", s(dir.path())]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("t ="));
}

#[test]
fn diagnose_fig2_chirp() {
    let dir = TempDir::new().unwrap();
    let text = FIG2_AP.replace("\"gamma_S\": 0.0, \"gamma_D\": 0.0", "\"gamma_S\": 2e3, \"gamma_D\": 2e3");
    let cfg = write_config(&dir, "ap.json", &text);
    let o = run(&["diagnose", s(&cfg)]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let line = text.lines().find(|l| l.starts_with("r_max: ")).unwrap();
    let parts: Vec<&str> = line.split_whitespace().collect();
    let r: f64 = parts[1].parse().unwrap();
    let t: f64 = parts[5].parse().unwrap();
    assert!((r - 0.2344).abs() < 1e-3, "{line}");
    assert!((t - 3.333e-5).abs() <= 1e-6, "{line}");
    assert!(text.contains("resonance crossing: t = 3.333"), "{text}");
}

#[test]
fn diagnose_flags_marginal_configs() {
    let dir = TempDir::new().unwrap();
    let static_cfg = write_config(
        &dir,
        "static.json",
        r#"{"schedule": {"variant": "Static", "kappa0": 4e4, "delta": 0.0}, "t_end": 2e-4}"#,
    );
    let lossy = write_config(
        &dir,
        "lossy.json",
        &FIG2_AP.replace("\"gamma_S\": 0.0, \"gamma_D\": 0.0", "\"gamma_S\": 5e4, \"gamma_D\": 5e4"),
    );
    for cfg in [&static_cfg, &lossy] {
        let o = run(&["diagnose", s(cfg)]);
        assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
        assert!(stdout(&o).contains("violated"));
    }
}

#[test]
fn sweep_fig4_default_grid() {
    let dir = TempDir::new().unwrap();
    let o = run(&["sweep", "fig4-near", "--out", s(dir.path())]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = read_csv(&dir.path().join("fig4-near.csv"));
    assert_eq!(header, FIG4_HEADER);
    assert_eq!(rows.len(), 81);
    let delta = column(&header, &rows, "delta");
    assert!(delta.windows(2).all(|w| w[0] < w[1]));
    assert_eq!((delta[0], delta[80]), (-2e5, 2e5));
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("fig4-near.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["study"], "fig4-near");
}

#[test]
fn sweep_overrides_and_thread_count() {
    let dir = TempDir::new().unwrap();
    let args = |out: &Path| {
        vec![
            "sweep".to_string(),
            "fig4-far".into(),
            "--out".into(),
            s(out).into(),
            "--grid-min".into(),
            "-1e5".into(),
            "--grid-max".into(),
            "5e4".into(),
            "--grid-n".into(),
            "7".into(),
        ]
    };
    let one = dir.path().join("one");
    let many = dir.path().join("many");
    assert_eq!(bin().args(args(&one)).env("ADIAPOWER_THREADS", "1").status().unwrap().code(), Some(0));
    assert_eq!(bin().args(args(&many)).env("ADIAPOWER_THREADS", "4").status().unwrap().code(), Some(0));
    let a = fs::read(one.join("fig4-far.csv")).unwrap();
    let b = fs::read(many.join("fig4-far.csv")).unwrap();
    assert_eq!(a, b);
    let (header, rows) = read_csv(&one.join("fig4-far.csv"));
    assert_eq!(rows.len(), 7);
    let delta = column(&header, &rows, "delta");
    assert_eq!((delta[0], delta[6]), (-1e5, 5e4));
}

#[test]
fn sweep_fig5_grids() {
    let dir = TempDir::new().unwrap();
    let o = run(&["sweep", "fig5", "--out", s(dir.path())]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = read_csv(&dir.path().join("fig5.csv"));
    assert_eq!(header, FIG5_HEADER);
    assert_eq!(rows.len(), 1681);
    for eta in column(&header, &rows, "eta_ap").into_iter().chain(column(&header, &rows, "eta_static")) {
        assert!((0.0..=1.0).contains(&eta));
    }
    let mut points: Vec<(f64, f64)> = column(&header, &rows, "kappa0")
        .into_iter()
        .zip(column(&header, &rows, "gamma"))
        .collect();
    points.dedup();
    assert_eq!(points.len(), 1681);

    let small = dir.path().join("small");
    let o = run(&[
        "sweep", "fig5", "--out", s(&small), "--grid-min", "2e4", "--grid-max", "8e4", "--grid-n", "3",
        "--gamma-min", "1e3", "--gamma-max", "4e3", "--gamma-n", "2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = read_csv(&small.join("fig5.csv"));
    assert_eq!(rows.len(), 6);
    let k = column(&header, &rows, "kappa0");
    let g = column(&header, &rows, "gamma");
    assert_eq!((k[0], k[5]), (2e4, 8e4));
    assert_eq!((g[0], g[1]), (1e3, 4e3));
}

#[test]
fn cycles_command() {
    let dir = TempDir::new().unwrap();
    let text = FIG2_AP.replace("\"gamma_W\": 0.0", "\"gamma_W\": 1e4").replace("\"gamma_S\": 0.0, \"gamma_D\": 0.0", "\"gamma_S\": 2e3, \"gamma_D\": 2e3");
    let cfg = write_config(&dir, "c.json", &text);
    let o = run(&["cycles", s(&cfg), "--n", "3", "--trep", "5e-4", "--out", s(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("cycle ")).count(), 3);
    let (header, rows) = read_csv(&dir.path().join("cycles.csv"));
    assert_eq!(header, TRAJECTORY_HEADER);
    let t = column(&header, &rows, "t");
    assert!(t.windows(2).all(|w| w[0] < w[1]));
    assert!((t[t.len() - 1] - 1.5e-3).abs() < 1e-15);

    let o = run(&["cycles", s(&cfg), "--n", "2", "--out", s(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
}

fn doc_strategy() -> impl Strategy<Value = ConfigDocument> {
    (0usize..4, 1e3..1e5f64, -3e5..3e5f64, 1e8..1e10f64, 0.0..2e-4f64, 0.0..1e4f64, 0.0..1e4f64, 2usize..500, 0.0..6.3f64)
        .prop_map(|(v, k, d, b, t0, g, gw, n, phase)| {
            let chirp = Schedule::linear_chirp(k, d, b, t0);
            let schedule = match v {
                0 => Schedule::constant(k, d),
                1 => chirp,
                2 => Schedule::detuning_coupled(k, d, b, t0),
                _ => Schedule::cyclic(1e-4, chirp),
            };
            let initial = CoilPair::new(Complex64::from_polar(phase.cos(), phase), Complex64::new(0.0, phase.sin()));
            let scenario = Scenario::new(schedule, LossModel::new(g, g, gw).unwrap(), 0.0, 2e-4)
                .with_samples(n)
                .with_initial(initial);
            ConfigDocument::from_scenario(&scenario)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn config_round_trip(doc in doc_strategy()) {
        let again = ConfigDocument::parse(&doc.to_json()).unwrap();
        prop_assert_eq!(&again, &doc);
        prop_assert_eq!(again.scenario().unwrap(), doc.scenario().unwrap());
    }
}
