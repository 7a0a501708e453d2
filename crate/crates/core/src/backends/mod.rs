//! Sampler backends standing in for annealing hardware, plus the gauge-cycled
//! collection protocol used to gather large sample sets.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dist::{empirical_distribution, DiscreteDistribution};
use crate::error::{Error, Result};
use crate::ising::{gauge_map_config, GaugeVector, IsingModel, SpinConfig};

mod emulator;
mod exact;
mod remote;
mod toy;

pub use emulator::{EffectiveTemperatureTable, EmulatorBackend};
pub use exact::ExactGibbsBackend;
pub use remote::{
    request_hash, store_fixture, RemoteBackend, RemoteMode, WireRequest, WireResponse,
    WireTiming, ENDPOINT_ENV, TOKEN_ENV,
};
pub use toy::NoiseAveragedBackend;

/// Anneal-time labels used by the default sweep configuration.
pub const DEFAULT_ANNEAL_LABELS: [&str; 4] = ["1us", "5us", "25us", "125us"];

/// Default number of samples drawn between gauge changes.
pub const DEFAULT_GAUGE_BATCH: usize = 100;

// Dedicated RNG stream for gauge draws so they never collide with the
// per-batch sampling seeds handed to the backend.
const GAUGE_STREAM: u64 = 0x6761_7567;

/// A sampling request: the model is sent as-is, so any inverse-temperature
/// scaling is folded into its parameters before the call.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleRequest {
    pub model: IsingModel,
    pub anneal_time_label: String,
    pub num_samples: usize,
    pub seed: u64,
}

impl SampleRequest {
    /// Builds a request after checking the sample count.
    pub fn new(
        model: IsingModel,
        anneal_time_label: impl Into<String>,
        num_samples: usize,
        seed: u64,
    ) -> Result<Self> {
        if num_samples == 0 {
            return Err(Error::InvalidArgument("request for zero samples".into()));
        }
        Ok(Self { model, anneal_time_label: anneal_time_label.into(), num_samples, seed })
    }
}

/// An ordered collection of observed configurations with the gauges used to
/// collect them. Configurations are always in the original model's frame.
#[derive(Debug, Clone)]
pub struct SampleSet {
    pub configs: Vec<SpinConfig>,
    pub batch_size: usize,
    pub gauges: Vec<GaugeVector>,
    pub backend_id: String,
    pub request: SampleRequest,
}

impl SampleSet {
    /// Number of samples collected.
    pub fn len(&self) -> usize {
        self.configs.len()
    }

    /// True when no samples were collected.
    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    /// Frequency distribution of the collected configurations.
    pub fn empirical(&self) -> Result<DiscreteDistribution> {
        empirical_distribution(&self.configs, self.request.model.n_sites())
    }
}

/// The sampling contract shared by every backend: deterministic output for a
/// fixed request on every non-live backend.
pub trait SamplerBackend {
    /// Stable identifier recorded in sample sets.
    fn id(&self) -> &str;

    /// Largest site count this backend accepts.
    fn capacity(&self) -> usize;

    /// Draws `request.num_samples` configurations.
    fn sample(&self, request: &SampleRequest) -> Result<SampleSet>;
}

fn check_capacity(backend: &dyn SamplerBackend, model: &IsingModel) -> Result<()> {
    let n = model.n_sites();
    if n > backend.capacity() {
        return Err(Error::Capacity { sites: n, limit: backend.capacity() });
    }
    Ok(())
}

fn draw_indexed_samples(
    dist: &DiscreteDistribution,
    num_samples: usize,
    seed: u64,
) -> Vec<SpinConfig> {
    let sampler = crate::dist::CumulativeSampler::new(dist);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = dist.n_sites();
    (0..num_samples)
        .map(|_| {
            SpinConfig::from_index(sampler.sample(&mut rng), n)
                .expect("sampler indices are in range")
        })
        .collect()
}

fn single_batch_set(
    backend_id: &str,
    request: &SampleRequest,
    configs: Vec<SpinConfig>,
) -> SampleSet {
    let batch_size = configs.len();
    SampleSet {
        configs,
        batch_size,
        gauges: vec![GaugeVector::identity(request.model.n_sites())],
        backend_id: backend_id.to_string(),
        request: request.clone(),
    }
}

/// How [`collect_with_gauges`] chooses the gauge for each batch.
#[derive(Debug, Clone)]
pub enum GaugePolicy {
    /// A fresh uniform random gauge per batch.
    Random,
    /// The identity gauge for every batch; collection degenerates to plain
    /// batched sampling.
    Identity,
    /// One fixed gauge reused for every batch.
    Fixed(GaugeVector),
}

/// Collects `total` samples in batches, drawing a gauge per batch,
/// transforming the model, sampling, and mapping the results back to the
/// original frame. Batch `k` uses request seed `seed + k`; gauge draws use a
/// separate stream of the same seed.
pub fn collect_with_gauges(
    backend: &dyn SamplerBackend,
    model: &IsingModel,
    total: usize,
    batch_size: usize,
    anneal_time_label: &str,
    seed: u64,
    policy: &GaugePolicy,
) -> Result<SampleSet> {
    if total == 0 || batch_size == 0 {
        return Err(Error::InvalidArgument(
            "gauge-cycled collection needs a positive total and batch size".into(),
        ));
    }
    let n = model.n_sites();
    let mut gauge_rng = ChaCha8Rng::seed_from_u64(seed);
    gauge_rng.set_stream(GAUGE_STREAM);

    let mut configs = Vec::with_capacity(total);
    let mut gauges = Vec::new();
    let mut batch_index = 0u64;
    let mut remaining = total;
    while remaining > 0 {
        let gauge = match policy {
            GaugePolicy::Random => GaugeVector::random(&mut gauge_rng, n),
            GaugePolicy::Identity => GaugeVector::identity(n),
            GaugePolicy::Fixed(fixed) => fixed.clone(),
        };
        let count = remaining.min(batch_size);
        let transformed = model.gauge_transform(&gauge)?;
        let request = SampleRequest::new(
            transformed,
            anneal_time_label,
            count,
            seed.wrapping_add(batch_index),
        )?;
        let batch = backend.sample(&request)?;
        for config in &batch.configs {
            configs.push(gauge_map_config(config, &gauge)?);
        }
        gauges.push(gauge);
        remaining -= count;
        batch_index += 1;
    }

    Ok(SampleSet {
        configs,
        batch_size,
        gauges,
        backend_id: backend.id().to_string(),
        request: SampleRequest::new(model.clone(), anneal_time_label, total, seed)?,
    })
}
