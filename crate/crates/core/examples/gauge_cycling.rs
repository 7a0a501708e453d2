//! Collects samples under per-batch random gauges, checks the mapped-back
//! empirical law against the target, and compares with the finite-sampling
//! floor achievable at the same budget.
//!
//! Run with `cargo run --example gauge_cycling`.

use isinglab::{
    catalog_entry, collect_with_gauges, finite_sampling_bound, total_variation,
    ExactGibbsBackend, GaugePolicy, Result,
};

fn main() -> Result<()> {
    let model = catalog_entry("GSD-2")?.model;
    let alpha = 0.3;
    let scaled = model.scaled(alpha);
    let target = model.enumerate_gibbs(alpha)?;
    let total = 50_000;

    for (name, policy) in [("random", GaugePolicy::Random), ("identity", GaugePolicy::Identity)] {
        let set = collect_with_gauges(&ExactGibbsBackend, &scaled, total, 100, "1us", 42, &policy)?;
        let tv = total_variation(&set.empirical()?, &target)?;
        println!(
            "{name:>8} gauges: {} samples over {} batches, tv to target {tv:.5}",
            set.len(),
            set.gauges.len()
        );
    }

    let floor = finite_sampling_bound(&model, alpha, total, 8, 42)?;
    println!("finite-sampling floor at this budget: {floor:.5}");
    Ok(())
}
