use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use fsr_cli::render::read_records;

fn fsr(args: &[&str], out_env: Option<&Path>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_fsr"));
    c.args(args).env_remove("FSR_OUT_DIR");
    if let Some(p) = out_env {
        c.env("FSR_OUT_DIR", p);
    }
    c.output().unwrap()
}

fn ok(o: &Output) {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn run_writes_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = fsr(&["run", "--function", "f1", "--n", "64", "--m", "16", "--n-shot", "5000", "--seeds", "0,1", "--name", "a", "--out", out], None);
    ok(&o);
    let recs = read_records(&dir.path().join("a.csv")).unwrap();
    assert_eq!(recs.len(), 2);
    assert_eq!((recs[0].seed, recs[1].seed), (0, 1));
    assert!(recs.iter().all(|r| r.schema_version == 1 && r.m_chosen == "16" && r.rmse > 0.0));
    let side: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("a.config.json")).unwrap()).unwrap();
    assert_eq!(side["config"]["n"], 64);
    assert_eq!(side["config"]["delta"], serde_json::Value::Null);
    assert_eq!(side["wall_ms"].as_array().unwrap().len(), 2);
}

#[test]
fn identical_configs_give_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    fs::write(&cfg, "function = f2\nmethod = fsr-adaptive\nn = 128\nn-shot = 4000\nseeds = 0..4\n").unwrap();
    let out = dir.path().to_str().unwrap();
    let c = cfg.to_str().unwrap();
    ok(&fsr(&["run", "--config", c, "--name", "x", "--out", out, "--threads", "1"], None));
    ok(&fsr(&["run", "--config", c, "--name", "y", "--out", out, "--threads", "4"], None));
    let x = fs::read(dir.path().join("x.csv")).unwrap();
    let y = fs::read(dir.path().join("y.csv")).unwrap();
    assert_eq!(x, y);
}

#[test]
fn flags_override_file_and_env_sets_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    fs::write(&cfg, "n = 32\nm = 8\nseeds = 3\nname = envrun\nstatevector = false\n").unwrap();
    ok(&fsr(&["run", "--config", cfg.to_str().unwrap(), "--m", "4", "--statevector"], Some(dir.path())));
    let recs = read_records(&dir.path().join("envrun.csv")).unwrap();
    assert_eq!((recs[0].m, recs[0].seed, recs[0].statevector), (4, 3, true));
    assert_eq!(recs[0].n_sum, None);
}

#[test]
fn sweep_and_render_data() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = fsr(&["sweep", "--function", "f1", "--n", "256", "--statevector", "--seeds", "0", "--axis", "m", "--values", "8,16,32,64", "--name", "s", "--out", out], None);
    ok(&o);
    let stdout = String::from_utf8_lossy(&o.stdout);
    let slope: f64 = stdout.lines().find_map(|l| l.strip_prefix("slope ")).unwrap().parse().unwrap();
    assert!(slope < -1.0, "{slope}");
    let agg = dir.path().join("agg.csv");
    ok(&fsr(&["render-data", dir.path().join("s.csv").to_str().unwrap(), "--out", agg.to_str().unwrap()], None));
    let text = fs::read_to_string(&agg).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.lines().next().unwrap().contains("rmse_std"));
    let side: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("s.config.json")).unwrap()).unwrap();
    assert!((side["slope"].as_f64().unwrap() - slope).abs() < 1e-4);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(fsr(&["run", "--n", "100", "--out", out], None).status.code(), Some(2));
    assert_eq!(fsr(&["run", "--set", "bogus=1", "--out", out], None).status.code(), Some(2));
    assert_eq!(fsr(&["sweep", "--out", out, "--axis", "m"], None).status.code(), Some(2));
    assert_eq!(fsr(&["run", "--n", "4096", "--set", "max-qubits=10", "--out", out], None).status.code(), Some(3));
    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "").unwrap();
    assert_eq!(fsr(&["render-data", empty.to_str().unwrap()], None).status.code(), Some(2));
    assert_eq!(fsr(&["frobnicate"], None).status.code(), Some(2));
}
