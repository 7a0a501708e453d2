//! Figure-level pipelines behind the command-line driver: run configuration,
//! instance and backend resolution, sweep execution, and CSV plus manifest
//! emission.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::backends::{
    collect_with_gauges, EmulatorBackend, ExactGibbsBackend, GaugePolicy, NoiseAveragedBackend,
    RemoteBackend, RemoteMode, SampleRequest, SamplerBackend, DEFAULT_ANNEAL_LABELS,
    DEFAULT_GAUGE_BATCH,
};
use crate::dist::{
    finite_sampling_bound, fit_alpha_out, AlphaGrid, DiscreteDistribution, DEFAULT_BOUND_TRIALS,
};
use crate::error::{Error, Result};
use crate::instances::{catalog_entry, generate_instance};
use crate::ising::IsingModel;
use crate::screening::{three_spin_sweep, zero_crossing, SweepSource};

/// Seed used when a run does not pin one.
pub const DEFAULT_SEED: u64 = 42;

/// Upper end of the default effective-temperature fitting grid.
pub const DEFAULT_ALPHA_MAX: f64 = 6.0;

/// Samples collected per sweep cell when not configured otherwise.
pub const DEFAULT_TOTAL_SAMPLES: usize = 1_000_000;

const DEFAULT_CHAIN_BETA: f64 = 11.0;
const DEFAULT_TRANSVERSE_SCALE: f64 = 0.013;
const DEFAULT_NOISE_AMPLITUDE: f64 = 0.04;
const DEFAULT_SUSCEPTIBILITY: f64 = 0.05;
const CELL_SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

/// Merged settings for one command invocation. Every field is optional; a
/// JSON config file provides the base layer and command-line flags override
/// it field by field.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Catalog name or path of a JSON instance file.
    pub instance: Option<String>,
    /// Negate all couplings and fields on load.
    pub dwave_convention: Option<bool>,
    /// Single model scale used by `sample`.
    pub alpha: Option<f64>,
    /// Model scales swept by `tv-sweep`; defaults to the banded 30-point grid.
    pub alpha_in: Option<Vec<f64>>,
    /// Upper end of the fitting grid.
    pub alpha_max: Option<f64>,
    /// Anneal-time labels to sweep.
    pub anneal_labels: Option<Vec<String>>,
    /// Backend name: exact, emulator, toy, replay, record, or live.
    pub backend: Option<String>,
    /// Fixture directory for the replay and record backends.
    pub fixture_dir: Option<String>,
    /// Samples collected per sweep cell or per `sample` run.
    pub total_samples: Option<usize>,
    /// Samples drawn between gauge changes.
    pub batch_size: Option<usize>,
    /// Trials averaged into each finite-sampling floor estimate.
    pub bound_trials: Option<usize>,
    /// Base RNG seed.
    pub seed: Option<u64>,
    /// Directory receiving CSV, JSON, and manifest outputs.
    pub out_dir: Option<String>,
    /// Inverse temperature of the three-spin laws.
    pub beta: Option<f64>,
    /// Transverse amplitude per unit coupling in the noise-averaged chain.
    pub gamma: Option<f64>,
    /// Longitudinal noise amplitude in the noise-averaged chain.
    pub eta: Option<f64>,
    /// Next-neighbor susceptibility of the background-susceptibility law.
    pub chi: Option<f64>,
    /// Programmed couplings swept by `chain3` and `bs`.
    pub j_grid: Option<Vec<f64>>,
    /// Path of the distribution file fitted by `fit-alpha`.
    pub nu_file: Option<String>,
    /// Whether `gen-instance` draws local fields.
    pub with_fields: Option<bool>,
    /// Ground-state degeneracy `gen-instance` rejection-samples for.
    pub target_degeneracy: Option<usize>,
    /// Draw budget for the degeneracy rejection sampler.
    pub max_tries: Option<usize>,
    /// Whether `sample` cycles random gauges batch by batch.
    pub gauge_cycled: Option<bool>,
}

impl RunConfig {
    /// Reads a config layer from a JSON file, rejecting unknown fields.
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Combines two layers; fields set in `overrides` win.
    pub fn merged(base: RunConfig, overrides: RunConfig) -> RunConfig {
        RunConfig {
            instance: overrides.instance.or(base.instance),
            dwave_convention: overrides.dwave_convention.or(base.dwave_convention),
            alpha: overrides.alpha.or(base.alpha),
            alpha_in: overrides.alpha_in.or(base.alpha_in),
            alpha_max: overrides.alpha_max.or(base.alpha_max),
            anneal_labels: overrides.anneal_labels.or(base.anneal_labels),
            backend: overrides.backend.or(base.backend),
            fixture_dir: overrides.fixture_dir.or(base.fixture_dir),
            total_samples: overrides.total_samples.or(base.total_samples),
            batch_size: overrides.batch_size.or(base.batch_size),
            bound_trials: overrides.bound_trials.or(base.bound_trials),
            seed: overrides.seed.or(base.seed),
            out_dir: overrides.out_dir.or(base.out_dir),
            beta: overrides.beta.or(base.beta),
            gamma: overrides.gamma.or(base.gamma),
            eta: overrides.eta.or(base.eta),
            chi: overrides.chi.or(base.chi),
            j_grid: overrides.j_grid.or(base.j_grid),
            nu_file: overrides.nu_file.or(base.nu_file),
            with_fields: overrides.with_fields.or(base.with_fields),
            target_degeneracy: overrides.target_degeneracy.or(base.target_degeneracy),
            max_tries: overrides.max_tries.or(base.max_tries),
            gauge_cycled: overrides.gauge_cycled.or(base.gauge_cycled),
        }
    }

    /// Base RNG seed for the run.
    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    /// Upper end of the fitting grid.
    pub fn alpha_max(&self) -> f64 {
        self.alpha_max.unwrap_or(DEFAULT_ALPHA_MAX)
    }

    /// Samples per sweep cell.
    pub fn total_samples(&self) -> usize {
        self.total_samples.unwrap_or(DEFAULT_TOTAL_SAMPLES)
    }

    /// Samples between gauge changes.
    pub fn batch_size(&self) -> usize {
        self.batch_size.unwrap_or(DEFAULT_GAUGE_BATCH)
    }

    /// Trials per finite-sampling floor estimate.
    pub fn bound_trials(&self) -> usize {
        self.bound_trials.unwrap_or(DEFAULT_BOUND_TRIALS)
    }

    /// Output directory, created on demand by the commands.
    pub fn out_dir(&self) -> PathBuf {
        PathBuf::from(self.out_dir.clone().unwrap_or_else(|| ".".to_string()))
    }

    /// Anneal-time labels for the sweep, widest-coverage default.
    pub fn anneal_labels(&self) -> Vec<String> {
        self.anneal_labels
            .clone()
            .unwrap_or_else(|| DEFAULT_ANNEAL_LABELS.iter().map(|s| s.to_string()).collect())
    }

    /// The swept model scales, all required to lie in [0, 1].
    pub fn alpha_in_grid(&self) -> Result<Vec<f64>> {
        let alphas = match &self.alpha_in {
            Some(values) => values.clone(),
            None => AlphaGrid::new(1.0)?.points().to_vec(),
        };
        for &alpha in &alphas {
            if !(0.0..=1.0).contains(&alpha) {
                return Err(Error::InvalidArgument(format!(
                    "alpha_in value {alpha} lies outside [0, 1]"
                )));
            }
        }
        Ok(alphas)
    }

    /// The swept programmed couplings; defaults to the banded grid on [0, 1].
    pub fn coupling_grid(&self) -> Result<Vec<f64>> {
        let grid = match &self.j_grid {
            Some(values) => values.clone(),
            None => AlphaGrid::new(1.0)?.points().to_vec(),
        };
        for &j in &grid {
            if !j.is_finite() {
                return Err(Error::InvalidArgument("j_grid values must be finite".to_string()));
            }
        }
        Ok(grid)
    }

    /// Loads the referenced instance, returning its display name and model.
    /// Catalog names are tried first, then the filesystem.
    pub fn resolve_instance(&self) -> Result<(String, IsingModel)> {
        let name = self
            .instance
            .as_deref()
            .ok_or_else(|| Error::InvalidArgument("an instance name or file is required".into()))?;
        let (display, model) = match catalog_entry(name) {
            Ok(entry) => (entry.name.to_string(), entry.model),
            Err(_) => {
                let path = Path::new(name);
                if !path.exists() {
                    return Err(Error::UnknownInstance(name.to_string()));
                }
                let display = path
                    .file_stem()
                    .map(|stem| stem.to_string_lossy().into_owned())
                    .unwrap_or_else(|| name.to_string());
                (display, IsingModel::from_json_file(path)?)
            }
        };
        if self.dwave_convention.unwrap_or(false) {
            Ok((display, model.negated()))
        } else {
            Ok((display, model))
        }
    }

    /// Instantiates the configured sampler backend.
    pub fn resolve_backend(&self) -> Result<Box<dyn SamplerBackend>> {
        let name = self.backend.as_deref().unwrap_or("exact");
        let remote = |mode: RemoteMode| -> Result<Box<dyn SamplerBackend>> {
            let dir = self.fixture_dir.as_deref().ok_or_else(|| {
                Error::InvalidArgument(format!("backend '{name}' needs a fixture_dir"))
            })?;
            Ok(Box::new(RemoteBackend::new(mode, dir)))
        };
        match name {
            "exact" => Ok(Box::new(ExactGibbsBackend)),
            "emulator" => Ok(Box::new(EmulatorBackend::default())),
            "toy" => Ok(Box::new(NoiseAveragedBackend::new(
                self.beta.unwrap_or(DEFAULT_CHAIN_BETA),
                self.gamma.unwrap_or(DEFAULT_TRANSVERSE_SCALE),
                self.eta.unwrap_or(DEFAULT_NOISE_AMPLITUDE),
            )?)),
            "replay" => remote(RemoteMode::Replay),
            "record" => remote(RemoteMode::Record),
            "live" => remote(RemoteMode::Live),
            other => Err(Error::InvalidArgument(format!(
                "unknown backend '{other}' (expected exact, emulator, toy, replay, record, or live)"
            ))),
        }
    }

    /// Checks the cross-command invariants: the referenced instance loads and
    /// every configured scale lies in [0, 1].
    pub fn validate(&self) -> Result<()> {
        if self.instance.is_some() {
            self.resolve_instance()?;
        }
        self.alpha_in_grid()?;
        self.coupling_grid()?;
        if let Some(alpha) = self.alpha {
            if !(0.0..=1.0).contains(&alpha) {
                return Err(Error::InvalidArgument(format!("alpha {alpha} lies outside [0, 1]")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    seed: u64,
    parameters: serde_json::Value,
}

fn write_manifest(
    output_path: &Path,
    command: &str,
    seed: u64,
    parameters: serde_json::Value,
) -> Result<PathBuf> {
    let manifest_path = output_path.with_extension("manifest.json");
    let manifest = Manifest {
        tool: "isinglab",
        version: env!("CARGO_PKG_VERSION"),
        command,
        seed,
        parameters,
    };
    fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)?)?;
    Ok(manifest_path)
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Ground-state report for one instance.
#[derive(Debug, Clone, Serialize)]
pub struct DegeneracyReport {
    /// Display name of the instance.
    pub instance: String,
    /// Degeneracy advertised by the catalog, when the instance came from it.
    pub declared_degeneracy: Option<usize>,
    /// Minimum energy over all configurations.
    pub min_energy: f64,
    /// Number of configurations attaining the minimum.
    pub degeneracy: usize,
}

/// Enumerates the instance's ground states and reports the degeneracy.
pub fn cmd_degeneracy(config: &RunConfig) -> Result<DegeneracyReport> {
    let (instance, model) = config.resolve_instance()?;
    let declared = catalog_entry(&instance).ok().map(|entry| entry.declared_degeneracy);
    let ground = model.ground_states()?;
    Ok(DegeneracyReport {
        instance,
        declared_degeneracy: declared,
        min_energy: ground.min_energy,
        degeneracy: ground.degeneracy,
    })
}

/// One effective-temperature sweep cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TvSweepRow {
    /// Scale applied to the instance before sampling.
    pub alpha_in: f64,
    /// Anneal-time label the cell was sampled at.
    pub anneal_label: String,
    /// Total variation between the collected samples and the fitted law.
    pub tv: f64,
    /// Fitted inverse temperature.
    pub alpha_out: f64,
    /// Finite-sampling floor at the fitted inverse temperature.
    pub tv_floor: f64,
}

/// Files and rows produced by a sweep command.
#[derive(Debug)]
pub struct TvSweepOutput {
    pub rows: Vec<TvSweepRow>,
    pub csv_path: PathBuf,
    pub manifest_path: PathBuf,
}

/// Sweeps model scale against anneal time: each cell scales the instance,
/// collects gauge-cycled samples, fits the closest Gibbs law of the unscaled
/// instance, and records the fit alongside the finite-sampling floor.
pub fn cmd_tv_sweep(config: &RunConfig) -> Result<TvSweepOutput> {
    let (instance, model) = config.resolve_instance()?;
    let backend = config.resolve_backend()?;
    let alphas = config.alpha_in_grid()?;
    let labels = config.anneal_labels();
    let grid = AlphaGrid::new(config.alpha_max())?;
    let seed = config.seed();
    let total = config.total_samples();
    let batch_size = config.batch_size();
    let trials = config.bound_trials();

    let mut floors: BTreeMap<u64, f64> = BTreeMap::new();
    let mut rows = Vec::with_capacity(alphas.len() * labels.len());
    let mut cell = 0u64;
    for &alpha_in in &alphas {
        let scaled = model.scaled(alpha_in);
        for label in &labels {
            let cell_seed = seed.wrapping_add(cell.wrapping_mul(CELL_SEED_STRIDE));
            let set = collect_with_gauges(
                backend.as_ref(),
                &scaled,
                total,
                batch_size,
                label,
                cell_seed,
                &GaugePolicy::Random,
            )?;
            let empirical = set.empirical()?;
            let (alpha_out, tv) = fit_alpha_out(&empirical, &model, &grid)?;
            let floor = match floors.get(&alpha_out.to_bits()) {
                Some(&cached) => cached,
                None => {
                    let value = finite_sampling_bound(&model, alpha_out, total, trials, seed)?;
                    floors.insert(alpha_out.to_bits(), value);
                    value
                }
            };
            rows.push(TvSweepRow {
                alpha_in,
                anneal_label: label.clone(),
                tv,
                alpha_out,
                tv_floor: floor,
            });
            cell += 1;
        }
    }

    let out_dir = config.out_dir();
    fs::create_dir_all(&out_dir)?;
    let csv_path = out_dir.join("tv-sweep.csv");
    write_csv(&csv_path, &rows)?;
    let manifest_path = write_manifest(
        &csv_path,
        "tv-sweep",
        seed,
        json!({
            "instance": instance,
            "backend": backend.id(),
            "alpha_in": alphas,
            "anneal_labels": labels,
            "alpha_max": config.alpha_max(),
            "total_samples": total,
            "batch_size": batch_size,
            "bound_trials": trials,
        }),
    )?;
    Ok(TvSweepOutput { rows, csv_path, manifest_path })
}

/// One three-spin reconstruction sweep cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingSweepRow {
    /// Programmed chain coupling.
    pub j_in: f64,
    /// Recovered nearest-neighbor coupling (1, 2).
    pub j12_rec: f64,
    /// Recovered nearest-neighbor coupling (2, 3).
    pub j23_rec: f64,
    /// Recovered end-to-end coupling (1, 3).
    pub j13_rec: f64,
}

/// Files, rows, and crossing location produced by a three-spin sweep.
#[derive(Debug)]
pub struct CouplingSweepOutput {
    pub rows: Vec<CouplingSweepRow>,
    /// Interpolated location where the end-to-end coupling changes sign.
    pub crossing: Option<f64>,
    pub csv_path: PathBuf,
    pub manifest_path: PathBuf,
}

fn run_coupling_sweep(
    config: &RunConfig,
    command: &str,
    file_name: &str,
    source: &SweepSource,
    mut parameters: serde_json::Value,
) -> Result<CouplingSweepOutput> {
    let j_grid = config.coupling_grid()?;
    let raw = three_spin_sweep(&j_grid, source)?;
    let crossing = zero_crossing(&raw);
    let rows: Vec<CouplingSweepRow> = raw
        .iter()
        .map(|row| CouplingSweepRow {
            j_in: row.j_in,
            j12_rec: row.j12,
            j23_rec: row.j23,
            j13_rec: row.j13,
        })
        .collect();

    let out_dir = config.out_dir();
    fs::create_dir_all(&out_dir)?;
    let csv_path = out_dir.join(file_name);
    write_csv(&csv_path, &rows)?;
    parameters["j_grid"] = json!(j_grid);
    parameters["crossing"] = json!(crossing);
    let manifest_path = write_manifest(&csv_path, command, config.seed(), parameters)?;
    Ok(CouplingSweepOutput { rows, crossing, csv_path, manifest_path })
}

/// Sweeps the programmed coupling of the noise-averaged three-spin chain and
/// reconstructs the effective couplings at each point.
pub fn cmd_chain3(config: &RunConfig) -> Result<CouplingSweepOutput> {
    let beta = config.beta.unwrap_or(DEFAULT_CHAIN_BETA);
    let gamma = config.gamma.unwrap_or(DEFAULT_TRANSVERSE_SCALE);
    let eta = config.eta.unwrap_or(DEFAULT_NOISE_AMPLITUDE);
    run_coupling_sweep(
        config,
        "chain3",
        "chain3.csv",
        &SweepSource::NoiseAveraged { beta, gamma, eta },
        json!({ "beta": beta, "gamma": gamma, "eta": eta }),
    )
}

/// Sweeps the programmed coupling of the background-susceptibility law and
/// reconstructs the effective couplings at each point.
pub fn cmd_bs(config: &RunConfig) -> Result<CouplingSweepOutput> {
    let beta = config.beta.unwrap_or(DEFAULT_CHAIN_BETA);
    let chi = config.chi.unwrap_or(DEFAULT_SUSCEPTIBILITY);
    run_coupling_sweep(
        config,
        "bs",
        "bs.csv",
        &SweepSource::BackgroundSusceptibility { beta, chi },
        json!({ "beta": beta, "chi": chi }),
    )
}

/// On-disk form of a distribution: probabilities in configuration-index order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistributionFile {
    pub n_sites: usize,
    pub probs: Vec<f64>,
}

/// Writes a distribution as a JSON file.
pub fn write_distribution_file(path: impl AsRef<Path>, dist: &DiscreteDistribution) -> Result<()> {
    let file = DistributionFile { n_sites: dist.n_sites(), probs: dist.probs().to_vec() };
    fs::write(path, serde_json::to_string(&file)?)?;
    Ok(())
}

/// Reads a distribution from a JSON file.
pub fn read_distribution_file(path: impl AsRef<Path>) -> Result<DiscreteDistribution> {
    let text = fs::read_to_string(path)?;
    let file: DistributionFile = serde_json::from_str(&text)?;
    DiscreteDistribution::new(file.n_sites, file.probs)
}

/// Result of fitting a stored distribution against an instance.
#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    /// Display name of the instance fitted against.
    pub instance: String,
    /// Fitted inverse temperature.
    pub alpha_out: f64,
    /// Total variation at the fit.
    pub tv: f64,
}

/// Fits the inverse temperature of a stored distribution against the
/// configured instance.
pub fn cmd_fit_alpha(config: &RunConfig) -> Result<FitReport> {
    let nu_path = config
        .nu_file
        .as_deref()
        .ok_or_else(|| Error::InvalidArgument("a distribution file is required".into()))?;
    let nu = read_distribution_file(nu_path)?;
    let (instance, model) = config.resolve_instance()?;
    let grid = AlphaGrid::new(config.alpha_max())?;
    let (alpha_out, tv) = fit_alpha_out(&nu, &model, &grid)?;
    Ok(FitReport { instance, alpha_out, tv })
}

/// Files produced by instance generation.
#[derive(Debug)]
pub struct GenerateOutput {
    pub model: IsingModel,
    pub degeneracy: usize,
    pub instance_path: PathBuf,
    pub manifest_path: PathBuf,
}

/// Draws a random two-cell instance (optionally rejection-sampling toward a
/// target degeneracy) and writes it as an instance file.
pub fn cmd_gen_instance(config: &RunConfig) -> Result<GenerateOutput> {
    let seed = config.seed();
    let with_fields = config.with_fields.unwrap_or(false);
    let max_tries = config.max_tries.unwrap_or(10_000);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (model, degeneracy) =
        generate_instance(&mut rng, with_fields, config.target_degeneracy, max_tries)?;

    let out_dir = config.out_dir();
    fs::create_dir_all(&out_dir)?;
    let instance_path = out_dir.join("instance.json");
    model.to_json_file(&instance_path)?;
    let manifest_path = write_manifest(
        &instance_path,
        "gen-instance",
        seed,
        json!({
            "with_fields": with_fields,
            "target_degeneracy": config.target_degeneracy,
            "max_tries": max_tries,
            "degeneracy": degeneracy,
        }),
    )?;
    Ok(GenerateOutput { model, degeneracy, instance_path, manifest_path })
}

/// On-disk form of a sample set: one signed spin vector per draw, in site
/// order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SamplesFile {
    pub sites: Vec<u32>,
    pub backend: String,
    pub anneal_time_label: String,
    pub seed: u64,
    pub configs: Vec<Vec<i8>>,
}

/// Files produced by a sampling run.
#[derive(Debug)]
pub struct SampleOutput {
    pub num_samples: usize,
    pub samples_path: PathBuf,
    pub manifest_path: PathBuf,
}

/// Scales the instance, draws samples from the configured backend, and
/// writes them as a JSON file.
pub fn cmd_sample(config: &RunConfig) -> Result<SampleOutput> {
    let (instance, model) = config.resolve_instance()?;
    let alpha = config.alpha.unwrap_or(1.0);
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidArgument(format!("alpha {alpha} lies outside [0, 1]")));
    }
    let scaled = model.scaled(alpha);
    let backend = config.resolve_backend()?;
    let label = config
        .anneal_labels()
        .first()
        .cloned()
        .ok_or_else(|| Error::InvalidArgument("at least one anneal label is required".into()))?;
    let total = config.total_samples();
    let seed = config.seed();

    let set = if config.gauge_cycled.unwrap_or(true) {
        collect_with_gauges(
            backend.as_ref(),
            &scaled,
            total,
            config.batch_size(),
            &label,
            seed,
            &GaugePolicy::Random,
        )?
    } else {
        backend.sample(&SampleRequest::new(scaled.clone(), &label, total, seed)?)?
    };

    let out_dir = config.out_dir();
    fs::create_dir_all(&out_dir)?;
    let samples_path = out_dir.join("samples.json");
    let file = SamplesFile {
        sites: scaled.sites().to_vec(),
        backend: set.backend_id.clone(),
        anneal_time_label: label.clone(),
        seed,
        configs: set.configs.iter().map(|config| config.spins()).collect(),
    };
    fs::write(&samples_path, serde_json::to_string(&file)?)?;
    let manifest_path = write_manifest(
        &samples_path,
        "sample",
        seed,
        json!({
            "instance": instance,
            "backend": set.backend_id,
            "alpha": alpha,
            "anneal_time_label": label,
            "total_samples": total,
            "batch_size": config.batch_size(),
            "gauge_cycled": config.gauge_cycled.unwrap_or(true),
        }),
    )?;
    Ok(SampleOutput { num_samples: set.len(), samples_path, manifest_path })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain_instance_file(dir: &Path) -> String {
        let path = dir.join("chain3.json");
        IsingModel::chain(3, 0.8).unwrap().to_json_file(&path).unwrap();
        path.to_string_lossy().into_owned()
    }

    #[test]
    fn merge_prefers_the_override_layer() {
        let base = RunConfig {
            instance: Some("GSD-6".to_string()),
            seed: Some(1),
            ..RunConfig::default()
        };
        let overrides = RunConfig { seed: Some(2), ..RunConfig::default() };
        let merged = RunConfig::merged(base, overrides);
        assert_eq!(merged.instance.as_deref(), Some("GSD-6"));
        assert_eq!(merged.seed(), 2);
    }

    #[test]
    fn config_round_trips_through_json_and_rejects_unknown_fields() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        let config = RunConfig {
            instance: Some("GSD-2".to_string()),
            alpha_in: Some(vec![0.0, 0.3]),
            backend: Some("emulator".to_string()),
            ..RunConfig::default()
        };
        fs::write(&path, serde_json::to_string(&config).unwrap()).unwrap();
        assert_eq!(RunConfig::from_json_file(&path).unwrap(), config);
        assert!(serde_json::from_str::<RunConfig>(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn validation_rejects_out_of_range_scales_and_unknown_backends() {
        let config = RunConfig { alpha_in: Some(vec![0.5, 1.2]), ..RunConfig::default() };
        assert!(config.validate().is_err());
        let config = RunConfig { alpha: Some(-0.1), ..RunConfig::default() };
        assert!(config.validate().is_err());
        let config = RunConfig { backend: Some("annealer".to_string()), ..RunConfig::default() };
        assert!(config.resolve_backend().is_err());
        let config = RunConfig { backend: Some("replay".to_string()), ..RunConfig::default() };
        assert!(config.resolve_backend().is_err());
    }

    #[test]
    fn instances_resolve_from_catalog_and_files() {
        let dir = tempfile::tempdir().unwrap();
        let file = chain_instance_file(dir.path());
        let config = RunConfig { instance: Some(file), ..RunConfig::default() };
        let (name, model) = config.resolve_instance().unwrap();
        assert_eq!(name, "chain3");
        assert_eq!(model.n_sites(), 3);

        let config = RunConfig { instance: Some("gsd-2".to_string()), ..RunConfig::default() };
        let (name, model) = config.resolve_instance().unwrap();
        assert_eq!(name, "GSD-2");
        assert_eq!(model.n_sites(), 16);

        let config = RunConfig { instance: Some("missing".to_string()), ..RunConfig::default() };
        assert!(matches!(config.resolve_instance(), Err(Error::UnknownInstance(_))));
    }

    #[test]
    fn convention_flag_negates_the_loaded_model() {
        let config = RunConfig {
            instance: Some("GSD-2".to_string()),
            dwave_convention: Some(true),
            ..RunConfig::default()
        };
        let (_, negated) = config.resolve_instance().unwrap();
        let (_, plain) = RunConfig {
            instance: Some("GSD-2".to_string()),
            ..RunConfig::default()
        }
        .resolve_instance()
        .unwrap();
        for ((pair, negated_value), (_, plain_value)) in
            negated.couplings().zip(plain.couplings())
        {
            assert_eq!(negated_value, -plain_value, "{pair:?}");
        }
    }

    #[test]
    fn degeneracy_report_covers_catalog_and_generated_instances() {
        let config = RunConfig { instance: Some("GSD-10".to_string()), ..RunConfig::default() };
        let report = cmd_degeneracy(&config).unwrap();
        assert_eq!(report.degeneracy, 10);
        assert_eq!(report.declared_degeneracy, Some(10));

        let dir = tempfile::tempdir().unwrap();
        let file = chain_instance_file(dir.path());
        let report = cmd_degeneracy(&RunConfig {
            instance: Some(file),
            ..RunConfig::default()
        })
        .unwrap();
        assert_eq!(report.degeneracy, 2);
        assert_eq!(report.declared_degeneracy, None);
    }

    #[test]
    fn tv_sweep_emits_grid_complete_deterministic_rows() {
        let dir = tempfile::tempdir().unwrap();
        let file = chain_instance_file(dir.path());
        let config = RunConfig {
            instance: Some(file),
            alpha_in: Some(vec![0.0, 0.5]),
            anneal_labels: Some(vec!["1us".to_string()]),
            alpha_max: Some(2.0),
            total_samples: Some(4000),
            batch_size: Some(1000),
            bound_trials: Some(2),
            seed: Some(9),
            out_dir: Some(dir.path().join("out").to_string_lossy().into_owned()),
            ..RunConfig::default()
        };
        let output = cmd_tv_sweep(&config).unwrap();
        assert_eq!(output.rows.len(), 2);
        assert_eq!(output.rows[0].alpha_out, 0.0);
        assert!((output.rows[1].alpha_out - 0.5).abs() <= 0.1);
        for row in &output.rows {
            assert!(row.tv_floor > 0.0);
            assert!(row.tv < 0.2);
        }

        let mut reader = csv::Reader::from_path(&output.csv_path).unwrap();
        let reread: Vec<TvSweepRow> = reader.deserialize().map(|r| r.unwrap()).collect();
        assert_eq!(reread, output.rows);

        let manifest: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(&output.manifest_path).unwrap()).unwrap();
        assert_eq!(manifest["command"], "tv-sweep");
        assert_eq!(manifest["seed"], 9);
        assert_eq!(manifest["parameters"]["backend"], "exact-gibbs");

        let again = cmd_tv_sweep(&config).unwrap();
        assert_eq!(again.rows, output.rows);
    }

    #[test]
    fn chain3_locates_the_sign_change() {
        let dir = tempfile::tempdir().unwrap();
        let config = RunConfig {
            j_grid: Some(vec![0.1, 0.3, 0.5]),
            out_dir: Some(dir.path().to_string_lossy().into_owned()),
            ..RunConfig::default()
        };
        let output = cmd_chain3(&config).unwrap();
        assert_eq!(output.rows.len(), 3);
        assert!(output.rows[0].j13_rec < 0.0);
        assert!(output.rows[2].j13_rec > 0.0);
        let crossing = output.crossing.unwrap();
        assert!(crossing > 0.1 && crossing < 0.5);
        assert!(output.csv_path.exists());

        let manifest: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(&output.manifest_path).unwrap()).unwrap();
        assert_eq!(manifest["parameters"]["beta"], 11.0);
        assert!(manifest["parameters"]["crossing"].is_number());
    }

    #[test]
    fn bs_sweep_tracks_the_quadratic_without_crossing() {
        let dir = tempfile::tempdir().unwrap();
        let config = RunConfig {
            j_grid: Some(vec![0.25, 0.5]),
            out_dir: Some(dir.path().to_string_lossy().into_owned()),
            ..RunConfig::default()
        };
        let output = cmd_bs(&config).unwrap();
        assert_eq!(output.crossing, None);
        for row in &output.rows {
            let expected = 11.0 * 0.05 * row.j_in * row.j_in;
            assert!((row.j13_rec - expected).abs() < 1e-6, "j_in {}", row.j_in);
        }
    }

    #[test]
    fn fit_alpha_recovers_a_stored_gibbs_law_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let file = chain_instance_file(dir.path());
        let model = IsingModel::chain(3, 0.8).unwrap();
        let nu_path = dir.path().join("nu.json");
        write_distribution_file(&nu_path, &model.enumerate_gibbs(0.45).unwrap()).unwrap();
        let config = RunConfig {
            instance: Some(file),
            nu_file: Some(nu_path.to_string_lossy().into_owned()),
            ..RunConfig::default()
        };
        let report = cmd_fit_alpha(&config).unwrap();
        assert_eq!(report.alpha_out, 0.45);
        assert!(report.tv < 1e-12);
    }

    #[test]
    fn generated_instances_round_trip_with_their_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let config = RunConfig {
            seed: Some(5),
            with_fields: Some(true),
            out_dir: Some(dir.path().to_string_lossy().into_owned()),
            ..RunConfig::default()
        };
        let output = cmd_gen_instance(&config).unwrap();
        let reloaded = IsingModel::from_json_file(&output.instance_path).unwrap();
        assert_eq!(reloaded, output.model);
        assert_eq!(reloaded.ground_states().unwrap().degeneracy, output.degeneracy);
        let manifest: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(&output.manifest_path).unwrap()).unwrap();
        assert_eq!(manifest["parameters"]["degeneracy"], output.degeneracy as u64);
    }

    #[test]
    fn sampling_writes_a_deterministic_samples_file() {
        let dir = tempfile::tempdir().unwrap();
        let file = chain_instance_file(dir.path());
        let config = RunConfig {
            instance: Some(file),
            alpha: Some(0.5),
            total_samples: Some(500),
            batch_size: Some(100),
            seed: Some(3),
            out_dir: Some(dir.path().join("out").to_string_lossy().into_owned()),
            ..RunConfig::default()
        };
        let output = cmd_sample(&config).unwrap();
        assert_eq!(output.num_samples, 500);
        let first: SamplesFile =
            serde_json::from_str(&fs::read_to_string(&output.samples_path).unwrap()).unwrap();
        assert_eq!(first.configs.len(), 500);
        assert!(first.configs.iter().all(|c| c.len() == 3));

        let again = cmd_sample(&config).unwrap();
        let second: SamplesFile =
            serde_json::from_str(&fs::read_to_string(&again.samples_path).unwrap()).unwrap();
        assert_eq!(first.configs, second.configs);
    }
}
