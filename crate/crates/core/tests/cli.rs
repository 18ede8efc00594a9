use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use savanna_pulse::config::ScenarioConfig;

fn cli(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_savanna-pulse"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn classify_labels() {
    let dir = tempfile::tempdir().unwrap();
    for (g, want) in [("0.03", "XIII"), ("0.051", "V")] {
        let o = cli(&["--preset", "R1", "--gamma-tg", g, "classify", "--label-only"], dir.path());
        assert!(o.status.success());
        assert_eq!(stdout(&o).trim(), want);
    }
}

#[test]
fn thresholds_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&["--preset", "R1", "--gamma-tg", "0.03", "thresholds"], dir.path());
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let r01 = v["thresholds"]["R_01"].as_f64().unwrap();
    assert!((r01 - 1.6667).abs() < 1e-4, "{r01}");

    let o = cli(&["--preset", "R1", "--lambda-fg", "0", "thresholds"], dir.path());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["thresholds"]["R_pulse_Ge"], "inf");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| cli(args, dir.path()).status.code().unwrap();
    assert_eq!(code(&["--preset", "R1", "--tau=-1", "thresholds"]), 2);
    assert_eq!(code(&["--preset", "nowhere", "thresholds"]), 2);
    assert_eq!(code(&["thresholds"]), 2);
    assert_eq!(code(&["--preset", "R1", "--gamma-tg", "0.051", "orbit", "--kind", "savanna"]), 3);
    assert_eq!(
        code(&["--preset", "R1", "--gamma-tg=-5", "--dt", "12", "simulate", "--scheme", "nsfd"]),
        4
    );
}

#[test]
fn zero_horizon_writes_initial_row_only() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&["--preset", "R1", "--horizon", "0", "simulate", "--initial", "2,7"], dir.path());
    assert!(o.status.success());
    let text = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("0.0000000000000000e0,2.0000000000000000e0,7.0000000000000000e0"));
}

#[test]
fn simulate_is_deterministic_and_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    let args = ["--preset", "R2", "--horizon", "3", "simulate", "--initial", "3,10"];
    assert!(cli(&args, a.path()).status.success());
    assert!(cli(&args, b.path()).status.success());
    let first = fs::read(a.path().join("trajectory.csv")).unwrap();
    assert_eq!(first, fs::read(b.path().join("trajectory.csv")).unwrap());

    let scenario = a.path().join("scenario.json");
    let cfg = ScenarioConfig::from_json(&fs::read_to_string(&scenario).unwrap()).unwrap();
    assert_eq!(cfg.horizon, Some(3));
    let o = cli(&["--config", scenario.to_str().unwrap(), "simulate"], c.path());
    assert!(o.status.success());
    assert_eq!(first, fs::read(c.path().join("trajectory.csv")).unwrap());
}

#[test]
fn fire_rows_follow_pre_fire_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&["--preset", "R1", "--horizon", "2", "simulate"], dir.path());
    assert!(o.status.success());
    let text = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').take(3).map(|x| x.parse().unwrap()).collect())
        .collect();
    let fires: Vec<usize> = text.lines().skip(1).enumerate().filter(|(_, l)| l.ends_with("fire")).map(|(i, _)| i).collect();
    assert_eq!(fires.len(), 2);
    for i in fires {
        let (pre, post) = (&rows[i - 1], &rows[i]);
        assert_eq!(pre[0], post[0]);
        assert_eq!(post[1], pre[1] * 0.5);
    }
}

#[test]
fn grassland_orbit_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&["--preset", "R1", "orbit", "--kind", "grassland"], dir.path());
    assert!(o.status.success());
    let text = fs::read_to_string(dir.path().join("orbit.csv")).unwrap();
    let last = text.lines().last().unwrap();
    let g: f64 = last.split(',').nth(1).unwrap().parse().unwrap();
    assert!((g - 1.9996).abs() < 1e-3, "{last}");
}

#[test]
fn fig6_basin_under_standing_grass() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(
        &["--preset", "R3-fig6", "--omega-arg", "standing", "basin", "--n-g", "12", "--n-t", "12"],
        dir.path(),
    );
    assert!(o.status.success());
    let text = fs::read_to_string(dir.path().join("basin.csv")).unwrap();
    assert!(text.starts_with("G0,T0,attractor,periods"));
    let interior: std::collections::BTreeSet<&str> = text
        .lines()
        .skip(1)
        .filter_map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            let (g, t): (f64, f64) = (f[0].parse().unwrap(), f[1].parse().unwrap());
            (g > 0.0 && t > 0.0).then_some(f[2])
        })
        .collect();
    assert_eq!(interior.len(), 2, "{interior:?}");
}

#[test]
fn sweep_and_presets() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(
        &["--preset", "R1", "sweep", "--param", "gamma_TG", "--values", "-0.01,0.01,0.03,0.051"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = cli(&["presets", "list"], dir.path());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 6);
}
