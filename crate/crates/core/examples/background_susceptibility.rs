//! Sweeps the background-susceptibility law, whose parasitic end-to-end
//! coupling grows quadratically with the programmed coupling and never
//! changes sign, unlike the noise-averaged chain's.
//!
//! Run with `cargo run --example background_susceptibility`.

use isinglab::{three_spin_sweep, zero_crossing, Result, SweepSource};

fn main() -> Result<()> {
    let (beta, chi) = (11.0, 0.05);
    let source = SweepSource::BackgroundSusceptibility { beta, chi };
    let grid: Vec<f64> = (1..=8).map(|k| k as f64 / 8.0).collect();
    let rows = three_spin_sweep(&grid, &source)?;

    println!("{:>6} {:>12} {:>14}", "j_in", "J13", "beta*chi*j^2");
    for row in &rows {
        println!(
            "{:>6.3} {:>12.6} {:>14.6}",
            row.j_in,
            row.j13,
            beta * chi * row.j_in * row.j_in
        );
    }

    assert!(zero_crossing(&rows).is_none());
    println!("\nno sign change: the law stays on one side of zero");
    Ok(())
}
