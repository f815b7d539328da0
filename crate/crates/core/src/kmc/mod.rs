//! Kinetic Monte Carlo for the accelerated slow-boundary exclusion process.

mod active_set;
mod export;
mod observer;
mod profile;
mod rate_index;
mod replicas;
mod rng;
mod simulator;

pub use active_set::ActiveBonds;
pub use export::{
    read_snapshots_binary, write_snapshots_binary, write_trajectory_csv, SnapshotFile,
    SNAPSHOT_MAGIC, SNAPSHOT_VERSION,
};
pub use observer::{changed_sites, BoundaryEvents, Observer, ObserverSet, ParticleCount, SiteTimeAverage};
pub use profile::{empirical_density_profile, DensityEstimate};
pub use rate_index::RateIndex;
pub use replicas::run_replicas;
pub use rng::{replica_rng, ReplicaRng};
pub use simulator::{run_trajectory, LoggedEvent, RunOptions, Selection, TrajectoryRecord};
