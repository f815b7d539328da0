//! Equilibrium fluctuation statistics built on simulator output.

mod covariance;
mod field;
mod gaussianity;
mod martingale;
mod replacement;
mod stats;

pub use covariance::{covariance_estimator, FluctuationSeries};
pub use field::{compressibility, fluctuation_field, gamma_term, predicted_qv, SiteWeights};
pub use gaussianity::{
    initial_gaussianity, CharacteristicCheck, GaussianityReport, CHARACTERISTIC_POINTS,
    MIN_GAUSSIANITY_REPLICAS,
};
pub use martingale::{dynkin_martingale, FieldObserver, MartingaleObserver, MartingalePath, MartingaleSeries};
pub use replacement::{occupation_observable, replacement_moment, OccupationIntegral};
pub use stats::{covariance_jackknife, mean_estimate, weighted_slope, Estimate};
