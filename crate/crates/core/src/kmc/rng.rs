//! Reproducible per-replica random streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type ReplicaRng = ChaCha8Rng;

/// Independent stream for replica `replica` under `master_seed`: the seed
/// selects the key, the replica index selects the ChaCha stream.
pub fn replica_rng(master_seed: u64, replica: u64) -> ReplicaRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(replica);
    rng
}
