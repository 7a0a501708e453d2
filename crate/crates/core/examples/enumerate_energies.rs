//! Builds a small frustrated triangle by hand, enumerates its full energy
//! landscape, and prints Gibbs probabilities at two scales.
//!
//! Run with `cargo run --example enumerate_energies`.

use isinglab::{IsingModel, Result, SpinConfig};

fn main() -> Result<()> {
    // An antiferromagnetic triangle cannot satisfy all three edges at once,
    // so six of the eight configurations tie for the minimum.
    let model = IsingModel::new(
        vec![0, 1, 2],
        vec![(0, 1, -1.0), (1, 2, -1.0), (0, 2, -1.0)],
        Vec::new(),
    )?;

    println!("configuration  energy");
    for (index, energy) in model.energies()?.iter().enumerate() {
        let config = SpinConfig::from_index(index, model.n_sites())?;
        println!("{:>12?}  {energy:+.1}", config.spins());
    }

    let ground = model.ground_states()?;
    println!(
        "\nminimum energy {} with degeneracy {}",
        ground.min_energy, ground.degeneracy
    );

    for alpha in [0.5, 3.0] {
        let gibbs = model.enumerate_gibbs(alpha)?;
        let max = gibbs.probs().iter().cloned().fold(0.0, f64::max);
        println!(
            "alpha {alpha}: most likely configuration has probability {max:.4}"
        );
    }
    Ok(())
}
