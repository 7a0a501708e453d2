//! Classical Ising models: construction, exact energy enumeration, ground-state
//! analysis, Gibbs distributions, and gauge (spin-reversal) transforms.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dist::{kahan_sum, DiscreteDistribution};
use crate::error::{Error, Result};

/// Largest site count accepted by full-enumeration operations (2^20 states).
pub const ENUMERATION_CAP: usize = 20;

const DEGENERACY_TIE_TOLERANCE: f64 = 1e-9;

/// A spin configuration packed into an integer: bit `k` holds the spin of the
/// `k`-th site in the model's site order, with bit 1 meaning spin +1.
///
/// The packed integer doubles as the configuration's canonical index into any
/// [`DiscreteDistribution`] over the same sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpinConfig {
    bits: u32,
    n_sites: usize,
}

impl SpinConfig {
    /// Builds a configuration from its canonical index.
    pub fn from_index(index: usize, n_sites: usize) -> Result<Self> {
        if n_sites > ENUMERATION_CAP {
            return Err(Error::Capacity { sites: n_sites, limit: ENUMERATION_CAP });
        }
        if index >= (1usize << n_sites) {
            return Err(Error::InvalidArgument(format!(
                "config index {index} out of range for {n_sites} sites"
            )));
        }
        Ok(Self { bits: index as u32, n_sites })
    }

    /// Builds a configuration from explicit spins in site order.
    pub fn from_spins(spins: &[i8]) -> Result<Self> {
        if spins.len() > ENUMERATION_CAP {
            return Err(Error::Capacity { sites: spins.len(), limit: ENUMERATION_CAP });
        }
        let mut bits = 0u32;
        for (k, &s) in spins.iter().enumerate() {
            match s {
                1 => bits |= 1 << k,
                -1 => {}
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "spin value {other} at position {k}; spins must be -1 or +1"
                    )))
                }
            }
        }
        Ok(Self { bits, n_sites: spins.len() })
    }

    /// Canonical index of this configuration.
    pub fn index(&self) -> usize {
        self.bits as usize
    }

    /// Number of sites covered.
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Spin of the `k`-th site, as -1 or +1.
    pub fn spin(&self, k: usize) -> i8 {
        if self.bits >> k & 1 == 1 {
            1
        } else {
            -1
        }
    }

    /// All spins in site order.
    pub fn spins(&self) -> Vec<i8> {
        (0..self.n_sites).map(|k| self.spin(k)).collect()
    }
}

/// A spin-reversal gauge: one sign per site, in site order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaugeVector {
    signs: Vec<i8>,
}

impl GaugeVector {
    /// Builds a gauge from explicit signs; every entry must be -1 or +1.
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        for (k, &a) in signs.iter().enumerate() {
            if a != 1 && a != -1 {
                return Err(Error::InvalidArgument(format!(
                    "gauge sign {a} at position {k}; signs must be -1 or +1"
                )));
            }
        }
        Ok(Self { signs })
    }

    /// The identity gauge (all +1) over `n_sites` sites.
    pub fn identity(n_sites: usize) -> Self {
        Self { signs: vec![1; n_sites] }
    }

    /// A uniformly random gauge over `n_sites` sites.
    pub fn random<R: rand::Rng>(rng: &mut R, n_sites: usize) -> Self {
        let signs = (0..n_sites).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect();
        Self { signs }
    }

    /// Number of sites covered.
    pub fn len(&self) -> usize {
        self.signs.len()
    }

    /// True when the gauge covers no sites.
    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    /// Sign for the `k`-th site.
    pub fn sign(&self, k: usize) -> i8 {
        self.signs[k]
    }

    /// Bit mask with bit `k` set where the gauge flips site `k`.
    pub fn flip_mask(&self) -> u32 {
        let mut mask = 0u32;
        for (k, &a) in self.signs.iter().enumerate() {
            if a == -1 {
                mask |= 1 << k;
            }
        }
        mask
    }
}

/// Relabels a configuration through a gauge: each spin maps to `a_k * spin_k`.
pub fn gauge_map_config(config: &SpinConfig, gauge: &GaugeVector) -> Result<SpinConfig> {
    if gauge.len() != config.n_sites {
        return Err(Error::CoverageMismatch { expected: config.n_sites, got: gauge.len() });
    }
    Ok(SpinConfig { bits: config.bits ^ gauge.flip_mask(), n_sites: config.n_sites })
}

/// On-disk form of a model: `sites`, `couplings` as `[i, j, value]` triples,
/// and `fields` as `[i, value]` pairs, all keyed by site label.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub sites: Vec<u32>,
    pub couplings: Vec<(u32, u32, f64)>,
    pub fields: Vec<(u32, f64)>,
}

/// A sparse Ising model over labeled sites, with energy
/// `H(s) = -sum_ij J_ij s_i s_j - sum_i h_i s_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "InstanceFile", try_from = "InstanceFile")]
pub struct IsingModel {
    sites: Vec<u32>,
    couplings: BTreeMap<(usize, usize), f64>,
    fields: BTreeMap<usize, f64>,
}

impl IsingModel {
    /// Builds a model from site labels, coupling triples, and field pairs.
    pub fn new(
        sites: Vec<u32>,
        couplings: Vec<(u32, u32, f64)>,
        fields: Vec<(u32, f64)>,
    ) -> Result<Self> {
        let mut position = BTreeMap::new();
        for (k, &label) in sites.iter().enumerate() {
            if position.insert(label, k).is_some() {
                return Err(Error::InvalidModel(format!("duplicate site label {label}")));
            }
        }
        let lookup = |label: u32| -> Result<usize> {
            position
                .get(&label)
                .copied()
                .ok_or_else(|| Error::InvalidModel(format!("site {label} not in site list")))
        };

        let mut coupling_map = BTreeMap::new();
        for &(a, b, value) in &couplings {
            if a == b {
                return Err(Error::InvalidModel(format!("self-coupling on site {a}")));
            }
            if !value.is_finite() {
                return Err(Error::InvalidModel(format!("non-finite coupling on ({a}, {b})")));
            }
            let (i, j) = {
                let (pa, pb) = (lookup(a)?, lookup(b)?);
                (pa.min(pb), pa.max(pb))
            };
            if coupling_map.insert((i, j), value).is_some() {
                return Err(Error::InvalidModel(format!("duplicate coupling on ({a}, {b})")));
            }
        }

        let mut field_map = BTreeMap::new();
        for &(a, value) in &fields {
            if !value.is_finite() {
                return Err(Error::InvalidModel(format!("non-finite field on site {a}")));
            }
            if field_map.insert(lookup(a)?, value).is_some() {
                return Err(Error::InvalidModel(format!("duplicate field on site {a}")));
            }
        }

        Ok(Self { sites, couplings: coupling_map, fields: field_map })
    }

    /// A field-free chain with `n` sites labeled `0..n` and uniform coupling.
    pub fn chain(n: usize, coupling: f64) -> Result<Self> {
        let sites: Vec<u32> = (0..n as u32).collect();
        let couplings = (0..n.saturating_sub(1))
            .map(|i| (i as u32, i as u32 + 1, coupling))
            .collect();
        Self::new(sites, couplings, Vec::new())
    }

    /// Site labels in canonical order.
    pub fn sites(&self) -> &[u32] {
        &self.sites
    }

    /// Number of sites.
    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    /// Position of a site label in the canonical order.
    pub fn site_position(&self, label: u32) -> Option<usize> {
        self.sites.iter().position(|&s| s == label)
    }

    /// Couplings as (label pair, value), ordered by site position.
    pub fn couplings(&self) -> impl Iterator<Item = ((u32, u32), f64)> + '_ {
        self.couplings.iter().map(|(&(i, j), &v)| ((self.sites[i], self.sites[j]), v))
    }

    /// Fields as (label, value), ordered by site position.
    pub fn fields(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.fields.iter().map(|(&i, &v)| (self.sites[i], v))
    }

    /// Coupling value between two labeled sites, if present.
    pub fn coupling(&self, a: u32, b: u32) -> Option<f64> {
        let (pa, pb) = (self.site_position(a)?, self.site_position(b)?);
        self.couplings.get(&(pa.min(pb), pa.max(pb))).copied()
    }

    /// Field value on a labeled site, if present.
    pub fn field(&self, a: u32) -> Option<f64> {
        self.fields.get(&self.site_position(a)?).copied()
    }

    /// Largest absolute coupling or field magnitude; 0 for an empty model.
    pub fn max_abs_param(&self) -> f64 {
        self.couplings
            .values()
            .chain(self.fields.values())
            .fold(0.0, |acc, &v| acc.max(v.abs()))
    }

    /// The model with every coupling and field multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            sites: self.sites.clone(),
            couplings: self.couplings.iter().map(|(&k, &v)| (k, factor * v)).collect(),
            fields: self.fields.iter().map(|(&k, &v)| (k, factor * v)).collect(),
        }
    }

    /// The model with every coupling and field negated.
    pub fn negated(&self) -> Self {
        self.scaled(-1.0)
    }

    /// Applies a spin-reversal gauge: `h_i -> a_i h_i`, `J_ij -> a_i a_j J_ij`.
    pub fn gauge_transform(&self, gauge: &GaugeVector) -> Result<Self> {
        if gauge.len() != self.n_sites() {
            return Err(Error::CoverageMismatch { expected: self.n_sites(), got: gauge.len() });
        }
        let couplings = self
            .couplings
            .iter()
            .map(|(&(i, j), &v)| ((i, j), f64::from(gauge.sign(i) * gauge.sign(j)) * v))
            .collect();
        let fields = self
            .fields
            .iter()
            .map(|(&i, &v)| (i, f64::from(gauge.sign(i)) * v))
            .collect();
        Ok(Self { sites: self.sites.clone(), couplings, fields })
    }

    /// Energy of one configuration: `-sum_ij J_ij s_i s_j - sum_i h_i s_i`.
    pub fn energy(&self, config: &SpinConfig) -> Result<f64> {
        if config.n_sites() != self.n_sites() {
            return Err(Error::CoverageMismatch {
                expected: self.n_sites(),
                got: config.n_sites(),
            });
        }
        let mut total = 0.0;
        for (&(i, j), &v) in &self.couplings {
            total -= v * f64::from(config.spin(i) * config.spin(j));
        }
        for (&i, &v) in &self.fields {
            total -= v * f64::from(config.spin(i));
        }
        Ok(total)
    }

    /// True when every coupling and field is an exactly representable integer.
    pub fn has_integral_params(&self) -> bool {
        self.couplings
            .values()
            .chain(self.fields.values())
            .all(|&v| v.fract() == 0.0 && v.abs() <= 2f64.powi(40))
    }

    fn check_capacity(&self) -> Result<()> {
        let n = self.n_sites();
        if n > ENUMERATION_CAP {
            return Err(Error::Capacity { sites: n, limit: ENUMERATION_CAP });
        }
        Ok(())
    }

    fn neighbor_lists(&self) -> Vec<Vec<(usize, f64)>> {
        let mut lists = vec![Vec::new(); self.n_sites()];
        for (&(i, j), &v) in &self.couplings {
            lists[i].push((j, v));
            lists[j].push((i, v));
        }
        lists
    }

    /// Energies of all `2^n` configurations, indexed by configuration index.
    ///
    /// Enumeration walks configurations in Gray-code order so each step costs
    /// one spin flip; with integer parameters the accumulation is exact.
    pub fn energies(&self) -> Result<Vec<f64>> {
        self.check_capacity()?;
        if self.has_integral_params() {
            Ok(self.energies_integer())
        } else {
            Ok(self.energies_float())
        }
    }

    fn energies_integer(&self) -> Vec<f64> {
        let n = self.n_sites();
        let total = 1usize << n;
        let neighbors: Vec<Vec<(usize, i64)>> = self
            .neighbor_lists()
            .into_iter()
            .map(|list| list.into_iter().map(|(j, v)| (j, v as i64)).collect())
            .collect();
        let field: Vec<i64> = {
            let mut f = vec![0i64; n];
            for (&i, &v) in &self.fields {
                f[i] = v as i64;
            }
            f
        };

        let mut spins = vec![-1i64; n];
        let mut energy: i64 = self.couplings.values().map(|&v| -(v as i64)).sum::<i64>()
            + field.iter().sum::<i64>();
        let mut out = vec![0.0; total];
        out[0] = energy as f64;

        let mut bits = 0usize;
        for step in 1..total {
            let b = step.trailing_zeros() as usize;
            // The flip delta uses the spin values before the flip.
            let mut local = field[b];
            for &(j, v) in &neighbors[b] {
                local += v * spins[j];
            }
            energy += 2 * spins[b] * local;
            spins[b] = -spins[b];
            bits ^= 1 << b;
            out[bits] = energy as f64;
        }
        out
    }

    fn energies_float(&self) -> Vec<f64> {
        let n = self.n_sites();
        let total = 1usize << n;
        let neighbors = self.neighbor_lists();
        let field: Vec<f64> = {
            let mut f = vec![0.0; n];
            for (&i, &v) in &self.fields {
                f[i] = v;
            }
            f
        };

        let mut spins = vec![-1.0f64; n];
        let mut energy: f64 =
            self.couplings.values().map(|&v| -v).sum::<f64>() + field.iter().sum::<f64>();
        let mut out = vec![0.0; total];
        out[0] = energy;

        let mut bits = 0usize;
        for step in 1..total {
            let b = step.trailing_zeros() as usize;
            let mut local = field[b];
            for &(j, v) in &neighbors[b] {
                local += v * spins[j];
            }
            energy += 2.0 * spins[b] * local;
            spins[b] = -spins[b];
            bits ^= 1 << b;
            out[bits] = energy;
        }
        out
    }

    /// The Gibbs distribution `p(s) = exp(-alpha H(s)) / Z` over all
    /// configurations, stabilized by subtracting the largest exponent.
    pub fn enumerate_gibbs(&self, alpha: f64) -> Result<DiscreteDistribution> {
        if !(alpha >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "inverse temperature must be non-negative, got {alpha}"
            )));
        }
        let energies = self.energies()?;
        let max_exponent = energies
            .iter()
            .map(|&e| -alpha * e)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut probs: Vec<f64> =
            energies.iter().map(|&e| (-alpha * e - max_exponent).exp()).collect();
        let norm = kahan_sum(probs.iter().copied());
        for p in &mut probs {
            *p /= norm;
        }
        let residual = kahan_sum(probs.iter().copied());
        for p in &mut probs {
            *p /= residual;
        }
        DiscreteDistribution::new(self.n_sites(), probs)
    }

    /// Minimum energy, its degeneracy, and the attaining configurations.
    ///
    /// Ties are exact for integer parameters and use a 1e-9 tolerance
    /// otherwise.
    pub fn ground_states(&self) -> Result<GroundStates> {
        let energies = self.energies()?;
        let min_energy = energies.iter().copied().fold(f64::INFINITY, f64::min);
        let tolerance = if self.has_integral_params() { 0.0 } else { DEGENERACY_TIE_TOLERANCE };
        let n = self.n_sites();
        let states: Vec<SpinConfig> = energies
            .iter()
            .enumerate()
            .filter(|&(_, &e)| e <= min_energy + tolerance)
            .map(|(m, _)| SpinConfig { bits: m as u32, n_sites: n })
            .collect();
        Ok(GroundStates { min_energy, degeneracy: states.len(), states })
    }
}

/// Result of a ground-state search.
#[derive(Debug, Clone)]
pub struct GroundStates {
    pub min_energy: f64,
    pub degeneracy: usize,
    pub states: Vec<SpinConfig>,
}

impl From<IsingModel> for InstanceFile {
    fn from(model: IsingModel) -> Self {
        let couplings = model.couplings().map(|((a, b), v)| (a, b, v)).collect();
        let fields = model.fields().collect();
        Self { sites: model.sites, couplings, fields }
    }
}

impl TryFrom<InstanceFile> for IsingModel {
    type Error = Error;

    fn try_from(file: InstanceFile) -> Result<Self> {
        Self::new(file.sites, file.couplings, file.fields)
    }
}

impl IsingModel {
    /// Reads a model from a JSON instance file.
    pub fn from_json_file(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Writes the model as a JSON instance file.
    pub fn to_json_file(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text)?;
        Ok(())
    }
}
