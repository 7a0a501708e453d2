//! End-to-end runs of the `isinglab` binary.

use std::path::Path;
use std::process::{Command, Output};

use isinglab::pipeline::write_distribution_file;
use isinglab::{catalog_entry, IsingModel};

fn isinglab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isinglab"))
        .arg("--out-dir")
        .arg(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    assert!(
        output.status.success(),
        "exit {:?}, stderr: {}",
        output.status.code(),
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8_lossy(&output.stdout).into_owned()
}

#[test]
fn degeneracy_reports_catalog_instances() {
    let dir = tempfile::tempdir().unwrap();
    let output = isinglab(dir.path(), &["degeneracy", "GSD-10"]);
    let text = stdout(&output);
    assert!(text.contains("degeneracy 10"), "stdout: {text}");
    assert!(text.contains("declared 10"), "stdout: {text}");
}

#[test]
fn degeneracy_accepts_the_sign_convention_flag() {
    let dir = tempfile::tempdir().unwrap();
    let output = isinglab(dir.path(), &["degeneracy", "GSD-2", "--dwave-convention"]);
    stdout(&output);
}

#[test]
fn unknown_instances_fail_with_a_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let output = isinglab(dir.path(), &["degeneracy", "GSD-999"]);
    assert!(!output.status.success());
    let text = String::from_utf8_lossy(&output.stderr);
    assert!(text.contains("unknown instance"), "stderr: {text}");
}

#[test]
fn chain3_reports_the_crossing_and_writes_the_csv() {
    let dir = tempfile::tempdir().unwrap();
    let output = isinglab(dir.path(), &["chain3", "--j-grid", "0.1,0.3,0.5"]);
    let text = stdout(&output);
    assert!(text.contains("crosses zero at j_in ="), "stdout: {text}");
    assert!(dir.path().join("chain3.csv").exists());
    assert!(dir.path().join("chain3.manifest.json").exists());
}

#[test]
fn bs_reports_no_sign_change() {
    let dir = tempfile::tempdir().unwrap();
    let output = isinglab(dir.path(), &["bs", "--j-grid", "0.25,0.5,1.0"]);
    let text = stdout(&output);
    assert!(text.contains("no sign change"), "stdout: {text}");
    assert!(dir.path().join("bs.csv").exists());
}

#[test]
fn config_files_supply_defaults_to_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("run.json");
    std::fs::write(&config_path, r#"{"seed": 7, "j_grid": [0.25, 0.5]}"#).unwrap();
    let output = isinglab(
        dir.path(),
        &["bs", "--config", config_path.to_str().unwrap()],
    );
    let text = stdout(&output);
    assert!(text.contains("wrote 2 rows"), "stdout: {text}");

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("bs.manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["seed"], 7);
}

#[test]
fn fit_alpha_recovers_a_stored_distribution() {
    let dir = tempfile::tempdir().unwrap();
    let model = catalog_entry("GSD-6").unwrap().model;
    let nu = model.enumerate_gibbs(0.45).unwrap();
    let nu_path = dir.path().join("nu.json");
    write_distribution_file(&nu_path, &nu).unwrap();

    let output = isinglab(
        dir.path(),
        &["fit-alpha", nu_path.to_str().unwrap(), "--instance", "GSD-6", "--alpha-max", "6"],
    );
    let text = stdout(&output);
    assert!(text.contains("alpha_out 0.45"), "stdout: {text}");
}

#[test]
fn gen_instance_hits_a_degeneracy_target() {
    let dir = tempfile::tempdir().unwrap();
    let output = isinglab(
        dir.path(),
        &["gen-instance", "--target-degeneracy", "6", "--max-tries", "2000", "--seed", "11"],
    );
    let text = stdout(&output);
    assert!(text.contains("degeneracy 6"), "stdout: {text}");

    let written = IsingModel::from_json_file(dir.path().join("instance.json")).unwrap();
    assert_eq!(written.ground_states().unwrap().degeneracy, 6);
}

#[test]
fn sample_writes_the_requested_count() {
    let dir = tempfile::tempdir().unwrap();
    let output = isinglab(
        dir.path(),
        &["sample", "--instance", "GSD-2", "--alpha", "0.3", "--num-samples", "200", "--seed", "5"],
    );
    let text = stdout(&output);
    assert!(text.contains("wrote 200 samples"), "stdout: {text}");
    assert!(dir.path().join("samples.json").exists());
    assert!(dir.path().join("samples.manifest.json").exists());
}
