//! Backend drawing i.i.d. samples from the exact Gibbs distribution of the
//! requested model.

use super::{check_capacity, draw_indexed_samples, single_batch_set, SampleRequest, SampleSet, SamplerBackend};
use crate::error::Result;
use crate::ising::ENUMERATION_CAP;

/// Samples the requested model's Gibbs law at unit inverse temperature; any
/// temperature scaling is expected to be folded into the model parameters.
#[derive(Debug, Clone, Default)]
pub struct ExactGibbsBackend;

impl SamplerBackend for ExactGibbsBackend {
    fn id(&self) -> &str {
        "exact-gibbs"
    }

    fn capacity(&self) -> usize {
        ENUMERATION_CAP
    }

    fn sample(&self, request: &SampleRequest) -> Result<SampleSet> {
        check_capacity(self, &request.model)?;
        let dist = request.model.enumerate_gibbs(1.0)?;
        let configs = draw_indexed_samples(&dist, request.num_samples, request.seed);
        Ok(single_batch_set(self.id(), request, configs))
    }
}
