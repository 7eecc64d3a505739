use std::process::Command;

use tracial_fermi::scenario::{config_from_manifest, run_scenario, verify_manifest};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tracial-fermi"))
}

#[test]
fn lists_every_scenario() {
    let out = bin().arg("list-scenarios").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for s in tracial_fermi::config::Scenario::ALL {
        assert!(text.contains(s.name()), "missing {}", s.name());
    }
}

#[test]
fn fast_check_passes() {
    let out = bin().args(["--threads", "1", "check"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn run_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.cfg");
    std::fs::write(&config, "[run]\nscenario = interacting_decay\n[lattice]\nL = 4\n[hamiltonian]\nhopping = -1:1, 1:1\ninteraction = 0 1 ; 1 0 ; 0.5\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = bin().arg("run").arg(&config).arg("--out").arg(&out_dir).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest = verify_manifest(&out_dir).unwrap();
    assert!(manifest.files.iter().any(|f| f.name.starts_with("curve_") && f.name.ends_with(".csv")));
    let csv = std::fs::read_to_string(out_dir.join(&manifest.files[0].name)).unwrap();
    assert!(csv.starts_with("t,"));

    // the echoed config reproduces the run
    let again = dir.path().join("again");
    let replay = run_scenario(&config_from_manifest(&manifest, &again).unwrap()).unwrap();
    for f in &manifest.files {
        assert_eq!(
            std::fs::read(out_dir.join(&f.name)).unwrap(),
            std::fs::read(again.join(&f.name)).unwrap(),
            "{}",
            f.name
        );
    }
    assert_eq!(replay.files, manifest.files);
}

#[test]
fn bad_config_fails_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.cfg");
    std::fs::write(&config, "[lattice]\nL = 4\nbogus = 1\n").unwrap();
    let out = bin().arg("run").arg(&config).output().unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn oversized_run_is_refused_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("big.cfg");
    let out_dir = dir.path().join("out");
    std::fs::write(&config, "[run]\nscenario = interacting_decay\nmemory_budget_mb = 1\n[lattice]\nL = 10\n").unwrap();
    let out = bin().arg("run").arg(&config).arg("--out").arg(&out_dir).output().unwrap();
    assert!(!out.status.success());
    assert!(!out_dir.exists());
}
