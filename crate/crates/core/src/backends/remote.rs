//! Remote annealer client with record/replay fixtures keyed by request hash.
//! Live submission is compiled in only with the `live-remote` feature and
//! reads its endpoint and token from the environment.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{check_capacity, single_batch_set, SampleRequest, SampleSet, SamplerBackend};
use crate::error::{Error, Result};
use crate::ising::{IsingModel, SpinConfig, ENUMERATION_CAP};

/// Hardware programming ranges checked before any request leaves the client.
const MAX_COUPLING_MAGNITUDE: f64 = 1.0;
const MAX_FIELD_MAGNITUDE: f64 = 2.0;

/// Environment variable naming the live endpoint URL.
pub const ENDPOINT_ENV: &str = "REMOTE_SAMPLER_URL";
/// Environment variable holding the live bearer token.
pub const TOKEN_ENV: &str = "REMOTE_SAMPLER_TOKEN";

/// The serialized request sent to (or replayed against) the sampling service.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireRequest {
    pub model: IsingModel,
    pub num_reads: usize,
    pub anneal_time_us: f64,
    pub seed: Option<u64>,
}

/// The serialized response: one spin array per read plus timing metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireResponse {
    pub samples: Vec<Vec<i8>>,
    pub timing: WireTiming,
}

/// Timing metadata echoed by the service.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireTiming {
    pub total_us: f64,
}

/// Hex SHA-256 of the canonical request JSON; fixture files are named by it.
pub fn request_hash(request: &WireRequest) -> String {
    let canonical = serde_json::to_string(request).expect("wire requests serialize");
    let digest = Sha256::digest(canonical.as_bytes());
    digest.iter().map(|byte| format!("{byte:02x}")).collect()
}

/// Writes a response fixture for a request into `dir`, returning its path.
pub fn store_fixture(
    dir: impl AsRef<Path>,
    request: &WireRequest,
    response: &WireResponse,
) -> Result<PathBuf> {
    let path = dir.as_ref().join(format!("{}.json", request_hash(request)));
    std::fs::write(&path, serde_json::to_string_pretty(response)?)?;
    Ok(path)
}

/// How the remote backend resolves requests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RemoteMode {
    /// Serve stored fixtures only; unknown requests fail with a fixture miss.
    Replay,
    /// Submit live, then store the response as a fixture for later replay.
    Record,
    /// Submit live without recording.
    Live,
}

/// Client for an external sampling service speaking the wire format above.
#[derive(Debug, Clone)]
pub struct RemoteBackend {
    mode: RemoteMode,
    fixture_dir: PathBuf,
}

impl RemoteBackend {
    /// Builds a client that resolves requests per `mode` against fixtures
    /// stored in `fixture_dir`.
    pub fn new(mode: RemoteMode, fixture_dir: impl Into<PathBuf>) -> Self {
        Self { mode, fixture_dir: fixture_dir.into() }
    }

    fn check_hardware_ranges(model: &IsingModel) -> Result<()> {
        for ((a, b), value) in model.couplings() {
            if value.abs() > MAX_COUPLING_MAGNITUDE {
                return Err(Error::InvalidModel(format!(
                    "coupling ({a}, {b}) = {value} exceeds the programmable range [-1, 1]"
                )));
            }
        }
        for (a, value) in model.fields() {
            if value.abs() > MAX_FIELD_MAGNITUDE {
                return Err(Error::InvalidModel(format!(
                    "field {a} = {value} exceeds the programmable range [-2, 2]"
                )));
            }
        }
        Ok(())
    }

    fn parse_anneal_time_us(label: &str) -> Result<f64> {
        let digits = label.strip_suffix("us").unwrap_or(label);
        match digits.trim().parse::<f64>() {
            Ok(value) if value > 0.0 && value.is_finite() => Ok(value),
            _ => Err(Error::UnknownAnnealLabel(label.to_string())),
        }
    }

    fn load_fixture(&self, hash: &str) -> Result<WireResponse> {
        let path = self.fixture_dir.join(format!("{hash}.json"));
        let text = match std::fs::read_to_string(&path) {
            Ok(text) => text,
            Err(err) if err.kind() == std::io::ErrorKind::NotFound => {
                return Err(Error::FixtureMiss(hash.to_string()))
            }
            Err(err) => return Err(err.into()),
        };
        serde_json::from_str(&text)
            .map_err(|err| Error::MalformedResponse(format!("fixture {hash}: {err}")))
    }

    fn decode(&self, request: &SampleRequest, response: WireResponse) -> Result<SampleSet> {
        let n = request.model.n_sites();
        if response.samples.len() != request.num_samples {
            return Err(Error::MalformedResponse(format!(
                "expected {} reads, got {}",
                request.num_samples,
                response.samples.len()
            )));
        }
        let mut configs = Vec::with_capacity(response.samples.len());
        for (row, spins) in response.samples.iter().enumerate() {
            if spins.len() != n {
                return Err(Error::MalformedResponse(format!(
                    "read {row} has {} spins, expected {n}",
                    spins.len()
                )));
            }
            let config = SpinConfig::from_spins(spins)
                .map_err(|_| Error::MalformedResponse(format!("read {row} has non-spin values")))?;
            configs.push(config);
        }
        Ok(single_batch_set(self.id(), request, configs))
    }

    #[cfg(feature = "live-remote")]
    fn live_submit(&self, wire: &WireRequest) -> Result<WireResponse> {
        let url = std::env::var(ENDPOINT_ENV)
            .map_err(|_| Error::Transport(format!("{ENDPOINT_ENV} is not set")))?;
        let token = std::env::var(TOKEN_ENV).unwrap_or_default();
        let client = reqwest::blocking::Client::new();
        let mut builder = client.post(url).json(wire);
        if !token.is_empty() {
            builder = builder.bearer_auth(token);
        }
        let response = builder.send().map_err(|err| Error::Transport(err.to_string()))?;
        let status = response.status();
        if !status.is_success() {
            return Err(Error::Transport(format!("endpoint returned {status}")));
        }
        response
            .json::<WireResponse>()
            .map_err(|err| Error::MalformedResponse(err.to_string()))
    }

    #[cfg(not(feature = "live-remote"))]
    fn live_submit(&self, _wire: &WireRequest) -> Result<WireResponse> {
        Err(Error::Transport(
            "live submission requires building with the live-remote feature".into(),
        ))
    }
}

impl SamplerBackend for RemoteBackend {
    fn id(&self) -> &str {
        match self.mode {
            RemoteMode::Replay => "remote-replay",
            RemoteMode::Record => "remote-record",
            RemoteMode::Live => "remote-live",
        }
    }

    fn capacity(&self) -> usize {
        ENUMERATION_CAP
    }

    fn sample(&self, request: &SampleRequest) -> Result<SampleSet> {
        check_capacity(self, &request.model)?;
        Self::check_hardware_ranges(&request.model)?;
        let wire = WireRequest {
            model: request.model.clone(),
            num_reads: request.num_samples,
            anneal_time_us: Self::parse_anneal_time_us(&request.anneal_time_label)?,
            seed: Some(request.seed),
        };
        let response = match self.mode {
            RemoteMode::Replay => self.load_fixture(&request_hash(&wire))?,
            RemoteMode::Record => {
                let response = self.live_submit(&wire)?;
                store_fixture(&self.fixture_dir, &wire, &response)?;
                response
            }
            RemoteMode::Live => self.live_submit(&wire)?,
        };
        self.decode(request, response)
    }
}
