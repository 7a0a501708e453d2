//! Walks the bundled instance catalog and compares each name's declared
//! ground-state degeneracy with the exhaustively enumerated one.
//!
//! Run with `cargo run --example catalog_degeneracies`.

use isinglab::{catalog, Result};

fn main() -> Result<()> {
    println!("{:<10} {:>6} {:>8} {:>10} {:>12}", "instance", "sites", "fields", "declared", "enumerated");
    for entry in catalog() {
        let ground = entry.model.ground_states()?;
        let marker = if ground.degeneracy == entry.declared_degeneracy { "" } else { "  <- differs" };
        println!(
            "{:<10} {:>6} {:>8} {:>10} {:>12}{marker}",
            entry.name,
            entry.model.n_sites(),
            if entry.has_fields { "yes" } else { "no" },
            entry.declared_degeneracy,
            ground.degeneracy,
        );
    }
    Ok(())
}
