//! Backend emulating annealer output as a Gibbs law at an effective inverse
//! temperature looked up from a configurable table.

use std::collections::BTreeMap;

use super::{check_capacity, draw_indexed_samples, single_batch_set, SampleRequest, SampleSet, SamplerBackend};
use crate::dist::DiscreteDistribution;
use crate::error::{Error, Result};
use crate::ising::ENUMERATION_CAP;

/// Effective inverse temperature per (input-scale band, anneal label).
///
/// A band applies to input scales up to its bound; scales beyond every bound
/// fall into the last band.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveTemperatureTable {
    bands: Vec<AlphaBand>,
}

#[derive(Debug, Clone, PartialEq)]
struct AlphaBand {
    upper: f64,
    betas: BTreeMap<String, f64>,
}

impl EffectiveTemperatureTable {
    /// Builds a table from `(band upper bound, per-label betas)` rows ordered
    /// by increasing bound.
    pub fn new(bands: Vec<(f64, Vec<(String, f64)>)>) -> Result<Self> {
        if bands.is_empty() {
            return Err(Error::InvalidArgument("temperature table needs at least one band".into()));
        }
        let mut built = Vec::with_capacity(bands.len());
        let mut previous = f64::NEG_INFINITY;
        for (upper, betas) in bands {
            if !(upper > previous) {
                return Err(Error::InvalidArgument(
                    "band bounds must strictly increase".into(),
                ));
            }
            previous = upper;
            let mut map = BTreeMap::new();
            for (label, beta) in betas {
                if !(beta > 0.0) || !beta.is_finite() {
                    return Err(Error::InvalidArgument(format!(
                        "effective temperature for {label:?} must be positive, got {beta}"
                    )));
                }
                map.insert(label, beta);
            }
            built.push(AlphaBand { upper, betas: map });
        }
        Ok(Self { bands: built })
    }

    /// Effective inverse temperature for an input scale and anneal label.
    pub fn lookup(&self, alpha_in: f64, label: &str) -> Result<f64> {
        let band = self
            .bands
            .iter()
            .find(|band| alpha_in <= band.upper)
            .unwrap_or_else(|| self.bands.last().expect("table has at least one band"));
        band.betas
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownAnnealLabel(label.to_string()))
    }

    /// Labels known to every band, in sorted order.
    pub fn labels(&self) -> Vec<String> {
        self.bands
            .first()
            .map(|band| band.betas.keys().cloned().collect())
            .unwrap_or_default()
    }
}

impl Default for EffectiveTemperatureTable {
    /// One all-scales band whose effective temperature rises linearly from
    /// 1.85 at the shortest anneal to 5.16 at the longest, the span of
    /// fitted output temperatures the emulation is meant to rehearse.
    fn default() -> Self {
        let low = 1.85;
        let high = 5.16;
        let labels = super::DEFAULT_ANNEAL_LABELS;
        let step = (high - low) / (labels.len() - 1) as f64;
        let betas = labels
            .iter()
            .enumerate()
            .map(|(k, &label)| (label.to_string(), low + step * k as f64))
            .collect();
        Self::new(vec![(f64::INFINITY, betas)]).expect("default table is valid")
    }
}

/// Emulates hardware sampling: infers the input scale from the request
/// model's largest parameter magnitude, looks up an effective inverse
/// temperature for the anneal label, and samples the corresponding Gibbs law.
#[derive(Debug, Clone, Default)]
pub struct EmulatorBackend {
    table: EffectiveTemperatureTable,
}

impl EmulatorBackend {
    /// Builds an emulator over a custom temperature table.
    pub fn new(table: EffectiveTemperatureTable) -> Self {
        Self { table }
    }

    /// The table driving this emulator.
    pub fn table(&self) -> &EffectiveTemperatureTable {
        &self.table
    }

    fn target_distribution(&self, request: &SampleRequest) -> Result<DiscreteDistribution> {
        let scale = request.model.max_abs_param();
        if scale == 0.0 {
            return DiscreteDistribution::uniform(request.model.n_sites());
        }
        let beta_eff = self.table.lookup(scale, &request.anneal_time_label)?;
        // The request model already carries the scale, so sampling it at
        // beta_eff / scale realizes the unscaled model at beta_eff.
        request.model.enumerate_gibbs(beta_eff / scale)
    }
}

impl SamplerBackend for EmulatorBackend {
    fn id(&self) -> &str {
        "effective-temperature-emulator"
    }

    fn capacity(&self) -> usize {
        ENUMERATION_CAP
    }

    fn sample(&self, request: &SampleRequest) -> Result<SampleSet> {
        check_capacity(self, &request.model)?;
        let dist = self.target_distribution(request)?;
        let configs = draw_indexed_samples(&dist, request.num_samples, request.seed);
        Ok(single_batch_set(self.id(), request, configs))
    }
}
