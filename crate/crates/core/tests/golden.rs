//! Output reproducibility: repeated runs and different thread counts give
//! byte-identical files, and a few small outputs match frozen copies.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_enso-gspt"))
}

fn output(args: &[&str], threads: &str) -> Vec<u8> {
    let out = bin().args(args).env("ENSO_GSPT_THREADS", threads).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

#[test]
fn regime_map_independent_of_threads() {
    let a = ["regime-map", "--c-range", "1:2:40", "--k-range", "0:1:40"];
    let one = output(&a, "1");
    assert_eq!(one, output(&a, "1"));
    assert_eq!(one, output(&a, "4"));
}

#[test]
fn simulation_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for (i, threads) in ["1", "3"].iter().enumerate() {
        let path = dir.path().join(format!("t{i}.csv"));
        let p = path.to_string_lossy().into_owned();
        output(&["simulate", "--c", "1.4", "--k", "0.2", "--a", "4.4", "--t-end", "20000", "--out", &p], threads);
        let events = dir.path().join(format!("t{i}.events.csv"));
        files.push((std::fs::read(&path).unwrap(), std::fs::read(events).unwrap()));
    }
    assert_eq!(files[0], files[1]);
}

#[test]
fn sweep_independent_of_threads() {
    let a = ["sweep-a", "--c", "1.06", "--k", "0.4", "--a-grid", "0.5:5:4", "--t-end", "30000"];
    assert_eq!(output(&a, "1"), output(&a, "4"));
}

#[test]
fn frozen_outputs() {
    let json = output(&["classify-regime", "--c", "1.4", "--k", "0.2"], "1");
    assert_eq!(String::from_utf8(json).unwrap(), include_str!("golden/classify_regime_1.4_0.2.json"));
    let csv = output(&["regime-map", "--c-range", "1:2:5", "--k-range", "0:1:5"], "2");
    assert_eq!(String::from_utf8(csv).unwrap(), include_str!("golden/regime_map_5x5.csv"));
    let csv = output(&["fibre", "--c", "1.4", "--x0", "-1", "--z0", "0.3", "--x-range=-1.2:-0.2:6"], "1");
    assert_eq!(String::from_utf8(csv).unwrap(), include_str!("golden/fibre_1.4.csv"));
}
