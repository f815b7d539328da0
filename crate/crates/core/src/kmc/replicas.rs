//! Parallel replica driver with order-independent results.

use rayon::prelude::*;

use crate::kmc::rng::{replica_rng, ReplicaRng};

/// Runs `job(replica, rng)` for `replica in 0..count`, each with its own
/// stream derived from `master_seed`. Results come back in replica order
/// regardless of scheduling.
pub fn run_replicas<R, F>(count: usize, master_seed: u64, job: F) -> Vec<R>
where
    R: Send,
    F: Fn(u64, &mut ReplicaRng) -> R + Sync,
{
    (0..count as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(master_seed, r);
            job(r, &mut rng)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn independent_of_thread_count() {
        let job = |r: u64, rng: &mut ReplicaRng| (r, rng.random::<u64>());
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run_replicas(64, 17, job));
        let four = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| run_replicas(64, 17, job));
        assert_eq!(one, four);
        assert!(one.iter().enumerate().all(|(i, (r, _))| *r == i as u64));
    }
}
