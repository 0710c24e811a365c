//! End-to-end checks of the `lmsim` binary: reproducibility, config
//! validation and exit codes.

use std::process::Command;

fn lmsim() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lmsim"))
}

#[test]
fn squeeze_row_matches_reference_variance() {
    let out = lmsim()
        .args(["run", "--scenario", "squeeze", "-P", "kappa=1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("2.50000000e-1"), "output:\n{text}");
}

#[test]
fn rerun_from_recorded_config_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a.csv");
    let out = lmsim()
        .args([
            "run",
            "--scenario",
            "memory",
            "--sweep",
            "kappa 0.2:1.0:0.2",
            "-P",
            "gain=0.8",
            "-P",
            "n_bar=8",
            "--out",
            first.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    // reconstruct the config from the emitted header and run again
    let text = std::fs::read_to_string(&first).unwrap();
    let recorded: String = text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .map(|l| l.trim_start_matches("# ").to_string() + "\n")
        .collect();
    let cfg_path = dir.path().join("recorded.cfg");
    std::fs::write(&cfg_path, recorded).unwrap();
    let second = dir.path().join("b.csv");
    let out2 = lmsim()
        .args([
            "run",
            "--config",
            cfg_path.to_str().unwrap(),
            "--out",
            second.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out2.status.success(), "{}", String::from_utf8_lossy(&out2.stderr));
    let a = std::fs::read(&first).unwrap();
    let b = std::fs::read(&second).unwrap();
    assert_eq!(a, b, "rerun from recorded config differs");
}

#[test]
fn unknown_parameter_exits_with_config_code() {
    let out = lmsim()
        .args(["run", "--scenario", "squeeze", "-P", "kappa=1", "-P", "bogus=2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_seed_for_sampling_scenario_is_config_error() {
    let out = lmsim()
        .args(["run", "--scenario", "teleport", "-P", "kappa=1.48"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_of_range_loss_is_numeric_error() {
    let out = lmsim()
        .args(["run", "--scenario", "squeeze", "-P", "kappa=1", "-P", "eta_a=1.5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn teleport_sweep_finds_resource_minimum() {
    let out = lmsim()
        .args([
            "run",
            "--scenario",
            "teleport",
            "--seed",
            "7",
            "--sweep",
            "kappa 1.3:1.7:0.01",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    // locate the delta_epr_resource column and the row with minimal value
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let epr_col = header.iter().position(|h| *h == "delta_epr_resource").unwrap();
    let kappa_col = header.iter().position(|h| *h == "kappa").unwrap();
    let mut best = (f64::INFINITY, 0.0);
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        let epr: f64 = cells[epr_col].parse().unwrap();
        let kappa: f64 = cells[kappa_col].parse().unwrap();
        if epr < best.0 {
            best = (epr, kappa);
        }
    }
    assert!((best.0 - 0.66).abs() < 0.01, "min EPR {}", best.0);
    assert!((best.1 - 1.48).abs() < 0.02, "argmin {}", best.1);
}

#[test]
fn acceptance_single_criterion_runs() {
    let out = lmsim()
        .args(["acceptance", "--only", "squeezing-bound"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("[PASS] squeezing-bound"), "{text}");
}

#[test]
fn unknown_acceptance_criterion_fails_with_code_4() {
    let out = lmsim()
        .args(["acceptance", "--only", "nope"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn json_output_carries_config_and_tomography() {
    let out = lmsim()
        .args([
            "run",
            "--scenario",
            "dlcz",
            "-P",
            "kappa=0.1",
            "-P",
            "cutoff=4",
            "--format",
            "json",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("valid JSON output");
    assert!(doc["config"].as_str().unwrap().contains("scenario = dlcz"));
    assert!(doc["tomography"]["rho_re"].is_array());
    assert_eq!(doc["rows"].as_array().unwrap().len(), 1);
}
