//! Fits the effective inverse temperature of a distribution by scanning the
//! banded grid for the TV-closest Gibbs law of a reference instance.
//!
//! Run with `cargo run --example fit_effective_temperature`.

use isinglab::{catalog_entry, fit_alpha_out, AlphaGrid, Result};

fn main() -> Result<()> {
    let model = catalog_entry("GSD-6")?.model;
    let grid = AlphaGrid::new(6.0)?;

    // A Gibbs law generated at a grid point fits back to it exactly.
    let nu = model.enumerate_gibbs(2.85)?;
    let (alpha_out, tv) = fit_alpha_out(&nu, &model, &grid)?;
    println!("exact Gibbs at 2.85 fits to alpha_out {alpha_out} with tv {tv:.3e}");

    // Mixing in a uniform component cools the fit and leaves residual TV.
    let uniform = 1.0 / nu.probs().len() as f64;
    for weight in [0.01, 0.05, 0.2] {
        let blended: Vec<f64> =
            nu.probs().iter().map(|&p| (1.0 - weight) * p + weight * uniform).collect();
        let blended = isinglab::DiscreteDistribution::new(model.n_sites(), blended)?;
        let (alpha_out, tv) = fit_alpha_out(&blended, &model, &grid)?;
        println!(
            "{:>4.0}% uniform noise: alpha_out {alpha_out:.2}, tv {tv:.4}",
            weight * 100.0
        );
    }
    Ok(())
}
