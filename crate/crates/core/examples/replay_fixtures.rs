//! Stores a canned response for a sampling request and replays it through the
//! remote backend, the offline path used when no sampling service is
//! reachable. Requests are keyed by a hash of their canonical JSON, so a
//! replayed run must match the recorded one exactly.
//!
//! Run with `cargo run --example replay_fixtures`.

use isinglab::backends::{
    request_hash, store_fixture, RemoteBackend, RemoteMode, WireRequest, WireResponse, WireTiming,
};
use isinglab::{IsingModel, Result, SampleRequest, SamplerBackend};

fn main() -> Result<()> {
    let dir = tempfile::tempdir().expect("temp dir");
    let model = IsingModel::chain(3, 0.5)?;
    let request = SampleRequest::new(model.clone(), "5us", 3, 7)?;

    let wire = WireRequest {
        model,
        num_reads: request.num_samples,
        anneal_time_us: 5.0,
        seed: Some(request.seed),
    };
    let response = WireResponse {
        samples: vec![vec![1, 1, 1], vec![-1, -1, -1], vec![1, -1, 1]],
        timing: WireTiming { total_us: 812.5 },
    };
    let path = store_fixture(dir.path(), &wire, &response)?;
    println!("stored fixture {} at {}", request_hash(&wire), path.display());

    let backend = RemoteBackend::new(RemoteMode::Replay, dir.path());
    let set = backend.sample(&request)?;
    println!("replayed {} reads:", set.len());
    for config in &set.configs {
        println!("  {:?}", config.spins());
    }

    // A request the fixture store has never seen fails loudly with its hash.
    let unseen = SampleRequest::new(IsingModel::chain(3, 0.5)?, "5us", 3, 8)?;
    match backend.sample(&unseen) {
        Err(error) => println!("\nunseen request: {error}"),
        Ok(_) => unreachable!("no fixture exists for this request"),
    }
    Ok(())
}
