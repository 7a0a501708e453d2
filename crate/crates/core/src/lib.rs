//! Exact analysis machinery for small Ising models: enumeration-based Gibbs
//! sampling and ground-state search, effective-temperature fitting in total
//! variation, dense transverse-field thermal states, interaction-screening
//! inverse Ising, a 16-site instance catalog, and pluggable sampler backends
//! with gauge-cycled collection.
//!
//! Everything is built around exhaustive enumeration of configuration space,
//! so models are capped at desk scale (20 sites classically, 10 qubits for
//! the quantum pieces) and every quantity is exact up to floating-point
//! rounding rather than Monte Carlo error.
//!
//! The `examples/` directory walks through each capability; the `isinglab`
//! binary exposes the figure-level pipelines as subcommands.

pub mod backends;
pub mod dist;
pub mod error;
pub mod instances;
pub mod ising;
pub mod pipeline;
pub mod quantum;
pub mod screening;

pub use backends::{
    collect_with_gauges, EffectiveTemperatureTable, EmulatorBackend, ExactGibbsBackend,
    GaugePolicy, NoiseAveragedBackend, RemoteBackend, RemoteMode, SampleRequest, SampleSet,
    SamplerBackend,
};
pub use dist::{
    empirical_distribution, finite_sampling_bound, finite_sampling_trials, fit_alpha_out,
    kl_divergence, total_variation, AlphaGrid, CumulativeSampler, DiscreteDistribution,
};
pub use error::{Error, Result};
pub use instances::{catalog, catalog_entry, generate_instance, two_cell_chimera_edges};
pub use ising::{GaugeVector, GroundStates, IsingModel, SpinConfig};
pub use quantum::{
    bs_distribution, bs_model, build_noise_hamiltonian, noise_averaged_distribution,
    thermal_distribution, HermitianOperator, QuantumChainSpec,
};
pub use screening::{
    iso_gradient, iso_objective, reconstruct, three_spin_sweep, zero_crossing, NodeParams,
    NodeResult, ReconstructionResult, SweepRow, SweepSource,
};
