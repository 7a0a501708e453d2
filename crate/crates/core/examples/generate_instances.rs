//! Draws random two-cell instances with +-1 parameters, optionally rejecting
//! until a target ground-state degeneracy comes up.
//!
//! Run with `cargo run --example generate_instances`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use isinglab::{generate_instance, Result};

fn main() -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    println!("unconstrained draws (couplings only):");
    for _ in 0..5 {
        let (model, degeneracy) = generate_instance(&mut rng, false, None, 1)?;
        println!("  {} sites, degeneracy {degeneracy}", model.n_sites());
    }

    println!("\nrejection sampling to fixed degeneracies (with fields):");
    for target in [2, 4, 6] {
        let (_, degeneracy) = generate_instance(&mut rng, true, Some(target), 10_000)?;
        assert_eq!(degeneracy, target);
        println!("  hit target {target}");
    }
    Ok(())
}
