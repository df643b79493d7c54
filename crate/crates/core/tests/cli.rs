use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn antires(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_antires"));
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("ANTIRES_THREADS", t),
        None => cmd.env_remove("ANTIRES_THREADS"),
    };
    cmd.output().unwrap()
}

fn write_config(dir: &Path, name: &str, json: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, json).unwrap();
    path
}

fn run(command: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![command, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    antires(&args, None)
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn spectrum_writes_poles_and_zeros() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "c.json", "{}");
    let out = dir.path().join("out");
    let result = run("spectrum", &config, &out, &[]);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));
    let features = json(&out.join("features.json"));
    let zero = &features["antiresonances"][0];
    assert_eq!(zero["center_mhz"].as_f64().unwrap(), -3.0);
    assert_eq!(zero["half_width_mhz"].as_f64().unwrap(), 3.0);
    assert_eq!(features["resonances"].as_array().unwrap().len(), 2);

    let spectrum = antires::io::read_spectrum_csv(&out.join("spectrum.csv")).unwrap();
    assert_eq!(spectrum.grid().points(), 501);
    assert_eq!(spectrum.labels(), ["cavity", "atom"]);
}

#[test]
fn empty_cavity_has_no_antiresonance() {
    let dir = tempfile::tempdir().unwrap();
    let network = r#"{ "modes": [ { "label": "cavity", "kind": "resonator", "frequency_mhz": 0.0, "decay_mhz": 1.5 } ],
                       "drive": [ { "label": "cavity", "re": 1.0 } ] }"#;
    write_config(dir.path(), "net.json", network);
    let config = write_config(dir.path(), "c.json", r#"{ "network": { "file": "net.json" } }"#);
    let out = dir.path().join("out");
    assert!(run("spectrum", &config, &out, &[]).status.success());
    let features = json(&out.join("features.json"));
    assert!(features["antiresonances"].as_array().unwrap().is_empty());
    assert_eq!(features["resonances"][0]["half_width_mhz"].as_f64().unwrap(), 1.5);
}

#[test]
fn outputs_are_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "c.json",
        r#"{ "motion": { "enabled": true, "samples": 64 }, "heterodyne": { "windows": 100, "probes": [-6.0, 0.0, 6.0] } }"#,
    );
    let cfg = config.to_str().unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "4"] {
        for command in ["spectrum", "heterodyne-demo"] {
            let out = dir.path().join(format!("{command}-{threads}"));
            let status = antires(&[command, "--config", cfg, "--out", out.to_str().unwrap(), "--seed", "17"], Some(threads));
            assert!(status.status.success());
            outputs.push(out);
        }
    }
    for (a, b) in [(0, 2), (1, 3)] {
        let mut names: Vec<_> = fs::read_dir(&outputs[a]).unwrap().map(|e| e.unwrap().file_name()).collect();
        names.sort();
        for name in names {
            assert_eq!(fs::read(outputs[a].join(&name)).unwrap(), fs::read(outputs[b].join(&name)).unwrap(), "{name:?}");
        }
    }

    let reseeded = dir.path().join("reseeded");
    run("heterodyne-demo", &config, &reseeded, &["--seed", "18"]);
    assert_ne!(
        fs::read(outputs[1].join("heterodyne_phases.csv")).unwrap(),
        fs::read(reseeded.join("heterodyne_phases.csv")).unwrap()
    );
}

#[test]
fn bundled_scenarios_run() {
    let dir = tempfile::tempdir().unwrap();
    for (command, file) in [
        ("spectrum", "spectrum.json"),
        ("scan2d", "scan2d.json"),
        ("stark-scan", "stark_scan.json"),
        ("characterize", "characterize.json"),
        ("oracle-check", "oracle_check.json"),
    ] {
        let out = dir.path().join(command);
        let result = run(command, &scenario(file), &out, &[]);
        assert!(result.status.success(), "{command}: {}", String::from_utf8_lossy(&result.stderr));
        assert!(String::from_utf8_lossy(&result.stdout).contains("wrote "));
    }
    let verdict = json(&dir.path().join("characterize/characterize.json"));
    assert_eq!(verdict["lossy_component"], "n3");
    let scan = json(&dir.path().join("scan2d/scan2d_centers.json"));
    assert_eq!(scan["all_rows_track_diagonal"], true);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let code = |command: &str, config: &Path| run(command, config, &out, &[]).status.code().unwrap();

    assert_eq!(code("spectrum", &dir.path().join("missing.json")), 3);
    let bad = write_config(dir.path(), "bad.json", r#"{ "grid": { "points": "many" } }"#);
    assert_eq!(code("spectrum", &bad), 4);
    let unknown = write_config(dir.path(), "unknown.json", r#"{ "colour": "blue" }"#);
    assert_eq!(code("spectrum", &unknown), 4);
    let negative = write_config(dir.path(), "neg.json", r#"{ "network": { "gamma_mhz": -3.0 } }"#);
    assert_eq!(code("spectrum", &negative), 5);

    write_config(
        dir.path(),
        "chain.json",
        r#"{ "modes": [ { "label": "a", "kind": "resonator", "frequency_mhz": 0.0, "decay_mhz": 1.0 },
                        { "label": "b", "kind": "resonator", "frequency_mhz": 3.0, "decay_mhz": 1.0 },
                        { "label": "c", "kind": "resonator", "frequency_mhz": -3.0, "decay_mhz": 1.0 } ],
             "couplings": [ { "a": "a", "b": "b", "g_mhz": 4.0 }, { "a": "b", "b": "c", "g_mhz": 4.0 } ] }"#,
    );
    let ambiguous = write_config(dir.path(), "amb.json", r#"{ "network": { "file": "chain.json" } }"#);
    assert_eq!(code("characterize", &ambiguous), 6);
    assert!(out.join("characterize.json").exists());

    let failing = write_config(dir.path(), "oracle.json", r#"{ "oracle": { "eta_over_kappa": [0.1, 0.3] } }"#);
    assert_ne!(code("oracle-check", &failing), 0);

    let threads = antires(&["spectrum", "--config", "x.json"], Some("zero"));
    assert_eq!(threads.status.code(), Some(4));
    assert_eq!(antires(&["no-such-command"], None).status.code(), Some(2));
}
