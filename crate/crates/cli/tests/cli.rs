use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn sqbath(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sqbath"))
        .args(args)
        .current_dir(dir)
        .env("SQBATH_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) {
    fs::write(dir.join(name), body).unwrap();
}

const LATTICE: &str = r#"
seed = 11
[model]
kind = "cluster"
lattice = [2, 3]
couplings = 3.0
[bath]
n_bar = 1.0
phase = 0.4
[sweep]
gamma_scaled = [0.0, 0.01, 0.1]
realizations = 2
[optimize]
sites = 6
mean_coupling = 3.0
restarts = 5
"#;

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn build_then_explicit_round_trip() {
    let tmp = TempDir::new().unwrap();
    write_config(tmp.path(), "lat.toml", LATTICE);
    let o = sqbath(&["build", "--config", "lat.toml", "--out", "a"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("dark_mode_free: true"));

    write_config(
        tmp.path(),
        "explicit.toml",
        "[model]\nkind = \"explicit\"\nfile = \"a/model.json\"\n[bath]\nn_bar = 1.0\n",
    );
    let o = sqbath(&["build", "--config", "explicit.toml", "--out", "b"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let a = fs::read_to_string(tmp.path().join("a/model.json")).unwrap();
    let b = fs::read_to_string(tmp.path().join("b/model.json")).unwrap();
    assert_eq!(a, b);

    // steady state of the reloaded model still reaches the target
    let o = sqbath(&["steady", "--config", "explicit.toml", "--out", "b", "--residual"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let fid: f64 = stdout(&o)
        .lines()
        .find_map(|l| l.strip_prefix("fidelity: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((fid - 1.0).abs() < 1e-9, "{fid}");
    assert!(stdout(&o).contains("lyapunov_residual"));
}

#[test]
fn decoupled_site_is_a_dark_mode() {
    let tmp = TempDir::new().unwrap();
    // site 2 has no coupling to the rest
    let model = r#"{
  "format_version": 1,
  "sites": 3,
  "bath": {"kappa": 1.0, "n_bar": 0.5, "m_bar_re": 0.7071067811865476, "m_bar_im": 0.0},
  "coupling": {"rows": 3, "cols": 3,
    "re": [0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    "im": [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]}
}"#;
    fs::write(tmp.path().join("dark.json"), model).unwrap();
    write_config(
        tmp.path(),
        "dark.toml",
        "[model]\nkind = \"explicit\"\nfile = \"dark.json\"\n[bath]\nn_bar = 0.5\n",
    );
    let o = sqbath(&["build", "--config", "dark.toml", "--out", "o"], tmp.path());
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("dark mode"));

    let o = sqbath(&["steady", "--config", "dark.toml", "--out", "o"], tmp.path());
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn zero_chain_coupling_is_rejected() {
    let tmp = TempDir::new().unwrap();
    write_config(
        tmp.path(),
        "zero.toml",
        "[model]\nkind = \"chain\"\ncouplings = [1.0, 0.0]\n[bath]\nn_bar = 0.5\n",
    );
    let o = sqbath(&["build", "--config", "zero.toml", "--out", "o"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_is_deterministic_without_timestamp() {
    let tmp = TempDir::new().unwrap();
    write_config(tmp.path(), "lat.toml", LATTICE);
    for dir in ["r1", "r2"] {
        let o = sqbath(&["sweep", "--config", "lat.toml", "--out", dir, "--no-timestamp"], tmp.path());
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let a = fs::read(tmp.path().join("r1/sweep.csv")).unwrap();
    let b = fs::read(tmp.path().join("r2/sweep.csv")).unwrap();
    assert_eq!(a, b);

    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("# sqbath "));
    assert!(text.contains("# seed: 11"));
    assert!(!text.contains("timestamp"));
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    // header + 3 rates * (baseline + 2 series * 2 realizations)
    assert_eq!(data.len(), 1 + 3 * 5);
    assert!(data[0].contains("var_x_5") && data[0].contains("var_y_0"));

    let o = sqbath(&["sweep", "--config", "lat.toml", "--out", "r3", "--no-timestamp", "--seed", "12"], tmp.path());
    assert_eq!(o.status.code(), Some(0));
    let c = fs::read_to_string(tmp.path().join("r3/sweep.csv")).unwrap();
    assert_ne!(c, text);
}

#[test]
fn timestamp_is_written_by_default() {
    let tmp = TempDir::new().unwrap();
    write_config(tmp.path(), "lat.toml", LATTICE);
    let o = sqbath(&["steady", "--config", "lat.toml", "--out", "o", "--gamma", "0.01"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(tmp.path().join("o/steady.csv")).unwrap();
    assert!(csv.contains("# timestamp_unix: "));
    assert!(csv.contains("# gamma: 1e-2"));
}

#[test]
fn decompose_recovers_bath_squeezing() {
    let tmp = TempDir::new().unwrap();
    write_config(tmp.path(), "lat.toml", LATTICE);
    let o = sqbath(&["build", "--config", "lat.toml", "--out", "o"], tmp.path());
    assert_eq!(o.status.code(), Some(0));
    let o = sqbath(&["decompose", "o/target_transform.json", "--out", "o"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    // n̄ = 1 gives z0 = asinh(1)
    let z0 = 1f64.asinh();
    let line = stdout(&o).lines().find(|l| l.starts_with("squeezing:")).unwrap().to_string();
    let zs: Vec<f64> = line["squeezing:".len()..].split_whitespace().map(|s| s.parse().unwrap()).collect();
    assert_eq!(zs.len(), 6);
    assert!(zs.iter().all(|z| (z - z0).abs() < 1e-9), "{zs:?}");
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("o/decompose.json")).unwrap()).unwrap();
    assert_eq!(report["equal_squeezing"], true);
}

#[test]
fn optimize_writes_equalized_overlaps() {
    let tmp = TempDir::new().unwrap();
    write_config(tmp.path(), "lat.toml", LATTICE);
    let o = sqbath(&["optimize", "--config", "lat.toml", "--out", "o", "--no-timestamp"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(tmp.path().join("o/optimize.csv")).unwrap();
    assert!(csv.contains("# converged: true"));
    let target = 1.0 / 6f64.sqrt();
    for line in csv.lines().filter(|l| !l.starts_with('#')).skip(1) {
        let ov: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(ov >= target * (1.0 - 1e-3), "{line}");
    }
}

#[test]
fn validation_errors_exit_with_code_two() {
    let tmp = TempDir::new().unwrap();
    write_config(tmp.path(), "typo.toml", &LATTICE.replace("n_bar = 1.0", "n_bar = 1.0\nnbar = 1.0"));
    let o = sqbath(&["build", "--config", "typo.toml"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("typo.toml:9"), "{}", stderr(&o));

    write_config(tmp.path(), "neg.toml", &LATTICE.replace("n_bar = 1.0", "n_bar = -1.0"));
    let o = sqbath(&["build", "--config", "neg.toml"], tmp.path());
    assert_eq!(o.status.code(), Some(2));

    let o = sqbath(&["build", "--config", "missing.toml"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
}
