//! Monte Carlo simulation of the extrinsic message-passing decoder.

mod decoder;
mod graph;
mod pq;

pub use decoder::{
    random_codeword, simulate_hdd, simulate_hdd_with, HddDecoder, IterationStats, SimMetadata, SimOptions, SimTrace,
    SimVerdict, SlotRule, Transmission,
};
pub use graph::{sample_coupled_graph, sample_uncoupled_graph, TannerGraph};
pub use pq::{empirical_pq, EmpiricalPq};

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Generator for `(seed, stream)`; independent streams share one seed.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
