//! Thin command-line driver over the pipeline module.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use isinglab::pipeline::{
    cmd_bs, cmd_chain3, cmd_degeneracy, cmd_fit_alpha, cmd_gen_instance, cmd_sample,
    cmd_tv_sweep, RunConfig,
};

#[derive(Parser)]
#[command(name = "isinglab", version, about = "Exact analysis toolkit for small Ising models")]
struct Cli {
    /// JSON config file providing defaults for all flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Base RNG seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory receiving CSV, JSON, and manifest outputs.
    #[arg(long, global = true)]
    out_dir: Option<String>,
    /// Backend: exact, emulator, toy, replay, record, or live.
    #[arg(long, global = true)]
    backend: Option<String>,
    /// Negate all couplings and fields on load.
    #[arg(long, global = true)]
    dwave_convention: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the ground states of an instance and report the degeneracy.
    Degeneracy {
        /// Catalog name or instance file.
        instance: String,
    },
    /// Sweep model scale against anneal time and fit effective temperatures.
    TvSweep {
        /// Catalog name or instance file.
        #[arg(long)]
        instance: String,
        /// Comma-separated model scales; defaults to the banded 30-point grid.
        #[arg(long, value_delimiter = ',')]
        alpha_in: Option<Vec<f64>>,
        /// Upper end of the fitting grid.
        #[arg(long)]
        alpha_max: Option<f64>,
        /// Comma-separated anneal-time labels.
        #[arg(long, value_delimiter = ',')]
        anneal_labels: Option<Vec<String>>,
        /// Samples collected per sweep cell.
        #[arg(long)]
        total_samples: Option<usize>,
        /// Samples drawn between gauge changes.
        #[arg(long)]
        batch_size: Option<usize>,
        /// Trials averaged into each finite-sampling floor estimate.
        #[arg(long)]
        bound_trials: Option<usize>,
        /// Fixture directory for the replay and record backends.
        #[arg(long)]
        fixture_dir: Option<String>,
    },
    /// Sweep the noise-averaged three-spin chain and reconstruct couplings.
    Chain3 {
        /// Inverse temperature of the thermal state.
        #[arg(long)]
        beta: Option<f64>,
        /// Transverse amplitude per unit coupling.
        #[arg(long)]
        gamma: Option<f64>,
        /// Longitudinal noise amplitude.
        #[arg(long)]
        eta: Option<f64>,
        /// Comma-separated programmed couplings; defaults to the banded grid.
        #[arg(long, value_delimiter = ',')]
        j_grid: Option<Vec<f64>>,
    },
    /// Fit the inverse temperature of a stored distribution to an instance.
    FitAlpha {
        /// JSON distribution file with n_sites and probs.
        nu_file: String,
        /// Catalog name or instance file.
        #[arg(long)]
        instance: String,
        /// Upper end of the fitting grid.
        #[arg(long)]
        alpha_max: Option<f64>,
    },
    /// Sweep the background-susceptibility law and reconstruct couplings.
    Bs {
        /// Inverse temperature of the law.
        #[arg(long)]
        beta: Option<f64>,
        /// Next-neighbor susceptibility.
        #[arg(long)]
        chi: Option<f64>,
        /// Comma-separated programmed couplings; defaults to the banded grid.
        #[arg(long, value_delimiter = ',')]
        j_grid: Option<Vec<f64>>,
    },
    /// Draw a random two-cell instance, optionally at a target degeneracy.
    GenInstance {
        /// Draw local fields as well as couplings.
        #[arg(long)]
        with_fields: bool,
        /// Redraw until this ground-state degeneracy is hit.
        #[arg(long)]
        target_degeneracy: Option<usize>,
        /// Draw budget for the rejection sampler.
        #[arg(long)]
        max_tries: Option<usize>,
    },
    /// Draw samples from a backend and store them as JSON.
    Sample {
        /// Catalog name or instance file.
        #[arg(long)]
        instance: String,
        /// Scale applied to the instance before sampling.
        #[arg(long)]
        alpha: Option<f64>,
        /// Number of samples to draw (default 10000).
        #[arg(long)]
        num_samples: Option<usize>,
        /// Samples drawn between gauge changes.
        #[arg(long)]
        batch_size: Option<usize>,
        /// Anneal-time label sent with each request.
        #[arg(long)]
        anneal_label: Option<String>,
        /// Send one plain request instead of cycling random gauges.
        #[arg(long)]
        no_gauges: bool,
        /// Fixture directory for the replay and record backends.
        #[arg(long)]
        fixture_dir: Option<String>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> isinglab::Result<()> {
    let base = match &cli.config {
        Some(path) => RunConfig::from_json_file(path)?,
        None => RunConfig::default(),
    };
    let mut flags = RunConfig {
        seed: cli.seed,
        out_dir: cli.out_dir.clone(),
        backend: cli.backend.clone(),
        dwave_convention: cli.dwave_convention.then_some(true),
        ..RunConfig::default()
    };

    match cli.command {
        Command::Degeneracy { instance } => {
            flags.instance = Some(instance);
            let config = RunConfig::merged(base, flags);
            let report = cmd_degeneracy(&config)?;
            match report.declared_degeneracy {
                Some(declared) => println!(
                    "{}: degeneracy {} (declared {declared}), minimum energy {}",
                    report.instance, report.degeneracy, report.min_energy
                ),
                None => println!(
                    "{}: degeneracy {}, minimum energy {}",
                    report.instance, report.degeneracy, report.min_energy
                ),
            }
        }
        Command::TvSweep {
            instance,
            alpha_in,
            alpha_max,
            anneal_labels,
            total_samples,
            batch_size,
            bound_trials,
            fixture_dir,
        } => {
            flags.instance = Some(instance);
            flags.alpha_in = alpha_in;
            flags.alpha_max = alpha_max;
            flags.anneal_labels = anneal_labels;
            flags.total_samples = total_samples;
            flags.batch_size = batch_size;
            flags.bound_trials = bound_trials;
            flags.fixture_dir = fixture_dir;
            let config = RunConfig::merged(base, flags);
            let output = cmd_tv_sweep(&config)?;
            println!(
                "wrote {} rows to {} (manifest {})",
                output.rows.len(),
                output.csv_path.display(),
                output.manifest_path.display()
            );
        }
        Command::Chain3 { beta, gamma, eta, j_grid } => {
            flags.beta = beta;
            flags.gamma = gamma;
            flags.eta = eta;
            flags.j_grid = j_grid;
            let config = RunConfig::merged(base, flags);
            let output = cmd_chain3(&config)?;
            print_coupling_sweep(&output);
        }
        Command::FitAlpha { nu_file, instance, alpha_max } => {
            flags.nu_file = Some(nu_file);
            flags.instance = Some(instance);
            flags.alpha_max = alpha_max;
            let config = RunConfig::merged(base, flags);
            let report = cmd_fit_alpha(&config)?;
            println!(
                "{}: alpha_out {}, tv {:.3e}",
                report.instance, report.alpha_out, report.tv
            );
        }
        Command::Bs { beta, chi, j_grid } => {
            flags.beta = beta;
            flags.chi = chi;
            flags.j_grid = j_grid;
            let config = RunConfig::merged(base, flags);
            let output = cmd_bs(&config)?;
            print_coupling_sweep(&output);
        }
        Command::GenInstance { with_fields, target_degeneracy, max_tries } => {
            flags.with_fields = with_fields.then_some(true);
            flags.target_degeneracy = target_degeneracy;
            flags.max_tries = max_tries;
            let config = RunConfig::merged(base, flags);
            let output = cmd_gen_instance(&config)?;
            println!(
                "wrote instance with degeneracy {} to {}",
                output.degeneracy,
                output.instance_path.display()
            );
        }
        Command::Sample {
            instance,
            alpha,
            num_samples,
            batch_size,
            anneal_label,
            no_gauges,
            fixture_dir,
        } => {
            flags.instance = Some(instance);
            flags.alpha = alpha;
            flags.total_samples = num_samples;
            flags.batch_size = batch_size;
            flags.anneal_labels = anneal_label.map(|label| vec![label]);
            flags.gauge_cycled = no_gauges.then_some(false);
            flags.fixture_dir = fixture_dir;
            let mut config = RunConfig::merged(base, flags);
            if config.total_samples.is_none() {
                config.total_samples = Some(10_000);
            }
            let output = cmd_sample(&config)?;
            println!(
                "wrote {} samples to {}",
                output.num_samples,
                output.samples_path.display()
            );
        }
    }
    Ok(())
}

fn print_coupling_sweep(output: &isinglab::pipeline::CouplingSweepOutput) {
    match output.crossing {
        Some(j) => println!(
            "wrote {} rows to {}; end-to-end coupling crosses zero at j_in = {j:.4}",
            output.rows.len(),
            output.csv_path.display()
        ),
        None => println!(
            "wrote {} rows to {}; no sign change in the end-to-end coupling",
            output.rows.len(),
            output.csv_path.display()
        ),
    }
}
