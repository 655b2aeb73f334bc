use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_hybrid-qme");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_config(dir: &Path, name: &str, json: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, json).unwrap();
    p
}

/// (header, rows) of a CSV with `#` metadata lines.
fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

/// A tiny model so each simulate call takes well under a second.
const TINY: &[&str] = &[
    "--set",
    "model.truncations=[2,2,2,3,3]",
    "--set",
    "cat.alpha0=0.5",
    "--set",
    "evolution.t_end=0.2",
    "--set",
    "evolution.dt=0.01",
    "--set",
    "evolution.sample_every=5",
];

fn simulate(dir: &Path, preset: &str, extra: &[&str]) -> (Output, PathBuf) {
    let out = dir.join(format!("{preset}.csv"));
    let set = format!("preset={preset}");
    let mut args = vec!["simulate", "--set", set.as_str(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(TINY);
    args.extend_from_slice(extra);
    (run(&args), out)
}

#[test]
fn validate_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "defaults.json", r#"{"preset": "custom"}"#);
    let o = run(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("total_dim: 2592"));
    let nth: f64 = stdout
        .lines()
        .find_map(|l| l.strip_prefix("n_thermal_a1: "))
        .unwrap()
        .parse()
        .unwrap();
    // (e^{hf/kT} - 1)^{-1} at f = 2.87 GHz, T = 0.5 K
    assert!((nth - 3.153_000_414_758_534_3).abs() < 1e-12 * nth);
}

#[test]
fn validate_rejects_bad_configs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "neg.json", r#"{"preset": "custom", "model": {"kappa": -0.1}}"#);
    let o = run(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("kappa"));

    let cfg = write_config(dir.path(), "nopreset.json", r#"{"model": {"kappa": 0.1}}"#);
    let o = run(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("preset"));

    let cfg = write_config(dir.path(), "broken.json", "{not json");
    assert_eq!(code(&run(&["validate", "--config", cfg.to_str().unwrap()])), 2);
    assert_eq!(code(&run(&["validate", "--config", "/no/such/file.json"])), 2);
    assert_eq!(code(&run(&["validate", "--scale", "huge"])), 2);
}

#[test]
fn fig5_and_fig4_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let (o, path) = simulate(dir.path(), "fig5_fidelity", &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let (header, rows) = read_csv(&path);
    assert_eq!(header, ["time_ns", "fidelity_cscs", "fidelity_sscs"]);
    assert_eq!(rows.len(), 5);
    assert!((rows[0][1] - 1.0).abs() < 1e-9 && (rows[0][2] - 1.0).abs() < 1e-9);

    let (o, path) = simulate(dir.path(), "fig4_concurrence", &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let (header, _) = read_csv(&path);
    assert_eq!(
        header,
        [
            "time_ns",
            "concurrence_cscs",
            "concurrence_sscs",
            "projection_weight_cscs",
            "projection_weight_sscs"
        ]
    );

    let (o, path) = simulate(dir.path(), "fig3_populations", &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let (header, rows) = read_csv(&path);
    assert_eq!(header.len(), 13);
    assert_eq!(header[1], "nve1_pop_cscs");
    assert!((rows[0][1] - 0.5).abs() < 1e-12);
}

#[test]
fn output_is_deterministic_and_replayable() {
    let dir = tempfile::tempdir().unwrap();
    let (o, first) = simulate(dir.path(), "custom", &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let a = std::fs::read(&first).unwrap();
    let (_, again) = simulate(dir.path(), "custom", &[]);
    assert_eq!(a, std::fs::read(&again).unwrap());

    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("# generator: "));
    assert!(text.lines().any(|l| l.starts_with("# config: {")));
    assert!(text.lines().any(|l| l.starts_with("# diagnostics_cscs: ")));

    // the output file carries enough to rerun itself
    let replay = dir.path().join("replay.csv");
    let o = run(&[
        "simulate",
        "--config",
        first.to_str().unwrap(),
        "--out",
        replay.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(read_csv(&first), read_csv(&replay));
    // the destination is not part of the recorded config
    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&replay).unwrap());
    assert!(!text.contains("output_path"));
}

#[test]
fn blown_up_integration_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let (o, path) = simulate(
        dir.path(),
        "custom",
        &["--set", "evolution.dt=5", "--set", "evolution.t_end=500"],
    );
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(!path.exists());
}

#[test]
fn adaptive_tolerance_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let (o, _) = simulate(dir.path(), "custom", &["--set", "evolution.tolerance=1e-8"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("evolution.tolerance"));
}

fn wigner(dir: &Path, name: &str, args: &[&str]) -> (Vec<String>, Vec<Vec<f64>>) {
    let out = dir.join(name);
    let mut all = vec!["wigner", "--out", out.to_str().unwrap(), "--points", "41"];
    all.extend_from_slice(args);
    let o = run(&all);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    read_csv(&out)
}

fn at_origin(rows: &[Vec<f64>]) -> f64 {
    rows.iter().find(|r| r[0] == 0.0 && r[1] == 0.0).expect("origin on grid")[2]
}

#[test]
fn wigner_odd_and_vacuum() {
    let dir = tempfile::tempdir().unwrap();
    let two_over_pi = 2.0 / std::f64::consts::PI;

    let (header, rows) = wigner(dir.path(), "odd.csv", &["--state", "cscs", "--alpha", "2", "--parity", "odd"]);
    assert_eq!(header, ["x", "p", "w"]);
    assert_eq!(rows.len(), 41 * 41);
    let min = rows.iter().map(|r| r[2]).fold(f64::INFINITY, f64::min);
    assert!((min + two_over_pi).abs() < 1e-2);
    assert!((at_origin(&rows) + two_over_pi).abs() < 1e-2);

    let (_, rows) = wigner(dir.path(), "vac.csv", &["--state", "cscs", "--alpha", "0", "--parity", "even"]);
    let max = rows.iter().map(|r| r[2]).fold(f64::NEG_INFINITY, f64::max);
    assert!((max - two_over_pi).abs() < 1e-9);
    assert!((at_origin(&rows) - two_over_pi).abs() < 1e-9);
}

#[test]
fn squeezing_deforms_the_grid() {
    let dir = tempfile::tempdir().unwrap();
    let (_, squeezed) = wigner(dir.path(), "s.csv", &["--state", "sscs", "--alpha", "2", "--r", "0.3"]);
    let (_, plain) = wigner(dir.path(), "c.csv", &["--state", "sscs", "--alpha", "2", "--r", "0"]);
    let diff = squeezed
        .iter()
        .zip(&plain)
        .map(|(a, b)| (a[2] - b[2]).abs())
        .fold(0.0, f64::max);
    assert!(diff > 1e-3, "{diff}");
}

#[test]
fn wigner_rejects_infeasible_amplitudes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w.csv");
    let o = run(&["wigner", "--alpha", "3", "--levels", "12", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("alpha"));
    let o = run(&["wigner", "--alpha", "0", "--parity", "odd", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let o = run(&["wigner", "--mode", "diagonal", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn fig2_preset_writes_both_grids() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig2.csv");
    let o = run(&[
        "simulate",
        "--set",
        "preset=fig2_wigner",
        "--scale",
        "fast",
        "--set",
        "wigner.nx=11",
        "--set",
        "wigner.np=11",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let (header, rows) = read_csv(&out);
    assert_eq!(header, ["x", "p", "w_cscs", "w_sscs"]);
    assert_eq!(rows.len(), 121);
}
