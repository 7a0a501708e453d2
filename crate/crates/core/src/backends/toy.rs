//! Backend drawing samples from the noise-averaged transverse-field chain
//! distribution instead of a classical Gibbs law.

use super::{check_capacity, draw_indexed_samples, single_batch_set, SampleRequest, SampleSet, SamplerBackend};
use crate::dist::DiscreteDistribution;
use crate::error::{Error, Result};
use crate::ising::IsingModel;
use crate::quantum::{noise_averaged_distribution, QuantumChainSpec, QUANTUM_CAP};

/// Samples the noise-averaged thermal distribution of the requested model,
/// treating its largest coupling magnitude as the chain scale so transverse
/// amplitudes track the programmed coupling strength.
#[derive(Debug, Clone)]
pub struct NoiseAveragedBackend {
    beta: f64,
    gamma: f64,
    eta: f64,
}

impl NoiseAveragedBackend {
    /// Builds a backend with a shared inverse temperature, transverse scale,
    /// and noise amplitude for every qubit.
    pub fn new(beta: f64, gamma: f64, eta: f64) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "inverse temperature must be positive, got {beta}"
            )));
        }
        if !gamma.is_finite() || gamma < 0.0 || !eta.is_finite() || eta < 0.0 {
            return Err(Error::InvalidArgument(
                "transverse scale and noise amplitude must be finite and non-negative".into(),
            ));
        }
        Ok(Self { beta, gamma, eta })
    }

    fn target_distribution(&self, model: &IsingModel) -> Result<DiscreteDistribution> {
        if model.fields().next().is_some() {
            return Err(Error::InvalidModel(
                "noise-averaged backend accepts field-free models only".into(),
            ));
        }
        let n = model.n_sites();
        let j_in = model.max_abs_param();
        let couplings = model
            .couplings()
            .map(|((a, b), v)| {
                let i = model.site_position(a).expect("model sites are consistent");
                let j = model.site_position(b).expect("model sites are consistent");
                let weight = if j_in == 0.0 { 0.0 } else { v / j_in };
                (i, j, weight)
            })
            .collect();
        let spec = QuantumChainSpec::new(
            n,
            couplings,
            j_in,
            vec![self.gamma; n],
            vec![self.eta; n],
            self.beta,
        )?;
        noise_averaged_distribution(&spec)
    }
}

impl SamplerBackend for NoiseAveragedBackend {
    fn id(&self) -> &str {
        "noise-averaged-chain"
    }

    fn capacity(&self) -> usize {
        QUANTUM_CAP
    }

    fn sample(&self, request: &SampleRequest) -> Result<SampleSet> {
        check_capacity(self, &request.model)?;
        let dist = self.target_distribution(&request.model)?;
        let configs = draw_indexed_samples(&dist, request.num_samples, request.seed);
        Ok(single_batch_set(self.id(), request, configs))
    }
}
