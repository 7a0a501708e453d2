//! Runs the full scale-versus-anneal-time sweep against the built-in
//! emulator, which samples true Gibbs laws at per-anneal-time effective
//! temperatures. Fitted temperatures rise with the anneal-time label.
//!
//! Run with `cargo run --example emulator_sweep`.

use isinglab::pipeline::{cmd_tv_sweep, RunConfig};
use isinglab::Result;

fn main() -> Result<()> {
    let dir = tempfile::tempdir().expect("temp dir");
    let config = RunConfig {
        instance: Some("GSD-2".to_string()),
        backend: Some("emulator".to_string()),
        // A short scale list keeps this demo quick; the default is the
        // banded 30-point grid.
        alpha_in: Some(vec![0.1, 0.4, 0.7, 1.0]),
        total_samples: Some(20_000),
        batch_size: Some(100),
        seed: Some(42),
        out_dir: Some(dir.path().to_string_lossy().into_owned()),
        ..RunConfig::default()
    };
    let output = cmd_tv_sweep(&config)?;

    println!("{:>8} {:>8} {:>10} {:>10} {:>10}", "alpha_in", "label", "tv", "alpha_out", "floor");
    for row in &output.rows {
        println!(
            "{:>8.2} {:>8} {:>10.4} {:>10.2} {:>10.4}",
            row.alpha_in, row.anneal_label, row.tv, row.alpha_out, row.tv_floor
        );
    }
    println!(
        "\nwrote {} and {}",
        output.csv_path.display(),
        output.manifest_path.display()
    );
    Ok(())
}
