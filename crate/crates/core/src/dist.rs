//! Probability distributions over spin configurations: comparison metrics,
//! empirical estimation, inverse-temperature grids, effective-temperature
//! fitting, and finite-sampling floors.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ising::{IsingModel, SpinConfig, ENUMERATION_CAP};

/// Default trial count for [`finite_sampling_bound`].
pub const DEFAULT_BOUND_TRIALS: usize = 8;

pub(crate) fn kahan_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut compensation = 0.0;
    for v in values {
        let y = v - compensation;
        let t = sum + y;
        compensation = (t - sum) - y;
        sum = t;
    }
    sum
}

/// A dense probability vector over all `2^n` spin configurations, indexed by
/// the canonical configuration index.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    n_sites: usize,
    probs: Vec<f64>,
}

impl DiscreteDistribution {
    /// Validates and wraps a probability vector of length `2^n_sites`.
    pub fn new(n_sites: usize, probs: Vec<f64>) -> Result<Self> {
        if n_sites > ENUMERATION_CAP {
            return Err(Error::Capacity { sites: n_sites, limit: ENUMERATION_CAP });
        }
        if probs.len() != 1usize << n_sites {
            return Err(Error::InvalidDistribution(format!(
                "expected {} entries for {n_sites} sites, got {}",
                1usize << n_sites,
                probs.len()
            )));
        }
        for (m, &p) in probs.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "probability {p} at index {m}"
                )));
            }
        }
        let sum = kahan_sum(probs.iter().copied());
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidDistribution(format!("sums to {sum}, not 1")));
        }
        Ok(Self { n_sites, probs })
    }

    /// The uniform distribution over `2^n_sites` configurations.
    pub fn uniform(n_sites: usize) -> Result<Self> {
        if n_sites > ENUMERATION_CAP {
            return Err(Error::Capacity { sites: n_sites, limit: ENUMERATION_CAP });
        }
        let len = 1usize << n_sites;
        Ok(Self { n_sites, probs: vec![1.0 / len as f64; len] })
    }

    /// A point mass on one configuration index.
    pub fn point_mass(n_sites: usize, index: usize) -> Result<Self> {
        if n_sites > ENUMERATION_CAP {
            return Err(Error::Capacity { sites: n_sites, limit: ENUMERATION_CAP });
        }
        let len = 1usize << n_sites;
        if index >= len {
            return Err(Error::InvalidArgument(format!(
                "index {index} out of range for {n_sites} sites"
            )));
        }
        let mut probs = vec![0.0; len];
        probs[index] = 1.0;
        Ok(Self { n_sites, probs })
    }

    /// Number of sites.
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// The probability vector, indexed by configuration index.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Probability of one configuration index.
    pub fn prob(&self, index: usize) -> f64 {
        self.probs[index]
    }

    /// Expectation of a function of the configuration index.
    pub fn expectation(&self, f: impl Fn(usize) -> f64) -> f64 {
        kahan_sum(self.probs.iter().enumerate().map(|(m, &p)| p * f(m)))
    }
}

/// Total variation distance `(1/2) sum |mu - nu|`, in `[0, 1]`.
pub fn total_variation(mu: &DiscreteDistribution, nu: &DiscreteDistribution) -> Result<f64> {
    if mu.n_sites() != nu.n_sites() {
        return Err(Error::DimensionMismatch { left: mu.n_sites(), right: nu.n_sites() });
    }
    let sum = kahan_sum(
        mu.probs()
            .iter()
            .zip(nu.probs())
            .map(|(&p, &q)| (p - q).abs()),
    );
    Ok(0.5 * sum)
}

/// Kullback-Leibler divergence `sum mu log(mu/nu)`, returning infinity when
/// `mu` puts mass outside the support of `nu`. Diagnostic only; fitting
/// always uses [`total_variation`].
pub fn kl_divergence(mu: &DiscreteDistribution, nu: &DiscreteDistribution) -> Result<f64> {
    if mu.n_sites() != nu.n_sites() {
        return Err(Error::DimensionMismatch { left: mu.n_sites(), right: nu.n_sites() });
    }
    let mut total = 0.0;
    for (&p, &q) in mu.probs().iter().zip(nu.probs()) {
        if p == 0.0 {
            continue;
        }
        if q == 0.0 {
            return Ok(f64::INFINITY);
        }
        total += p * (p / q).ln();
    }
    Ok(total)
}

/// Frequency distribution of observed configurations.
pub fn empirical_distribution(
    configs: &[SpinConfig],
    n_sites: usize,
) -> Result<DiscreteDistribution> {
    if n_sites > ENUMERATION_CAP {
        return Err(Error::Capacity { sites: n_sites, limit: ENUMERATION_CAP });
    }
    if configs.is_empty() {
        return Err(Error::InvalidArgument("empirical distribution of zero samples".into()));
    }
    let mut counts = vec![0usize; 1 << n_sites];
    for config in configs {
        if config.n_sites() != n_sites {
            return Err(Error::CoverageMismatch { expected: n_sites, got: config.n_sites() });
        }
        counts[config.index()] += 1;
    }
    let total = configs.len() as f64;
    let probs = counts.into_iter().map(|c| c as f64 / total).collect();
    DiscreteDistribution::new(n_sites, probs)
}

/// An ordered inverse-temperature search grid from 0 to `alpha_max`.
///
/// The default grid scales a 30-point template with three step bands (fine
/// below a tenth of the range, medium to half, coarse above) by `alpha_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaGrid {
    alpha_max: f64,
    points: Vec<f64>,
}

impl AlphaGrid {
    /// Builds the banded 30-point grid scaled to `alpha_max`.
    pub fn new(alpha_max: f64) -> Result<Self> {
        if !(alpha_max > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "alpha_max must be positive, got {alpha_max}"
            )));
        }
        let bands = [(0u32..=7, 80u32), (4..=20, 40), (6..=10, 10)];
        let mut points = Vec::with_capacity(30);
        for (numerators, denominator) in bands {
            for numerator in numerators {
                points.push(alpha_max * f64::from(numerator) / f64::from(denominator));
            }
        }
        Ok(Self { alpha_max, points })
    }

    /// Wraps explicit grid points; they must start at 0 and strictly increase.
    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        if points.first() != Some(&0.0) {
            return Err(Error::InvalidArgument("grid must start at 0".into()));
        }
        if points.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("grid points must strictly increase".into()));
        }
        let alpha_max = *points.last().unwrap();
        Ok(Self { alpha_max, points })
    }

    /// Largest grid point.
    pub fn alpha_max(&self) -> f64 {
        self.alpha_max
    }

    /// Grid points in increasing order.
    pub fn points(&self) -> &[f64] {
        &self.points
    }
}

/// Fits the inverse temperature whose Gibbs distribution is TV-closest to
/// `nu`, returning `(alpha_out, tv_min)`. Ties break toward smaller alpha.
pub fn fit_alpha_out(
    nu: &DiscreteDistribution,
    model: &IsingModel,
    grid: &AlphaGrid,
) -> Result<(f64, f64)> {
    let mut best_alpha = f64::NAN;
    let mut best_tv = f64::INFINITY;
    for &alpha in grid.points() {
        let gibbs = model.enumerate_gibbs(alpha)?;
        let tv = total_variation(nu, &gibbs)?;
        if tv < best_tv {
            best_tv = tv;
            best_alpha = alpha;
        }
    }
    Ok((best_alpha, best_tv))
}

/// Draws configuration indices from a fixed distribution by inverse-CDF
/// lookup on a precomputed cumulative table.
#[derive(Debug, Clone)]
pub struct CumulativeSampler {
    cumulative: Vec<f64>,
}

impl CumulativeSampler {
    /// Precomputes the cumulative table for a distribution.
    pub fn new(dist: &DiscreteDistribution) -> Self {
        let mut cumulative = Vec::with_capacity(dist.probs().len());
        let mut running = 0.0;
        for &p in dist.probs() {
            running += p;
            cumulative.push(running);
        }
        // Guard the top entry so rounding can never push a draw past the end.
        if let Some(last) = cumulative.last_mut() {
            *last = 1.0;
        }
        Self { cumulative }
    }

    /// Draws one configuration index.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        self.cumulative.partition_point(|&c| c <= u).min(self.cumulative.len() - 1)
    }
}

/// Per-trial TVs between empirical estimates from `num_samples` exact Gibbs
/// draws and the Gibbs law itself. Each trial uses an independent
/// seed-derived stream.
pub fn finite_sampling_trials(
    model: &IsingModel,
    alpha_out: f64,
    num_samples: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if num_samples == 0 || trials == 0 {
        return Err(Error::InvalidArgument(
            "finite-sampling bound needs at least one sample and one trial".into(),
        ));
    }
    let target = model.enumerate_gibbs(alpha_out)?;
    let sampler = CumulativeSampler::new(&target);
    let n = model.n_sites();
    let mut values = Vec::with_capacity(trials);
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial as u64);
        let mut counts = vec![0usize; 1 << n];
        for _ in 0..num_samples {
            counts[sampler.sample(&mut rng)] += 1;
        }
        let probs = counts.into_iter().map(|c| c as f64 / num_samples as f64).collect();
        let empirical = DiscreteDistribution::new(n, probs)?;
        values.push(total_variation(&empirical, &target)?);
    }
    Ok(values)
}

/// Mean TV between `trials` empirical estimates from `num_samples` exact
/// Gibbs draws and the Gibbs law itself: the achievable TV floor at that
/// sample budget.
pub fn finite_sampling_bound(
    model: &IsingModel,
    alpha_out: f64,
    num_samples: usize,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    let values = finite_sampling_trials(model, alpha_out, num_samples, trials, seed)?;
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}
