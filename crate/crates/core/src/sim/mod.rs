//! Monte Carlo harness: seeded trials, SNR sweeps with early stopping, Wilson
//! intervals and CSV output.

pub mod config;
pub mod output;
pub mod profile;
pub mod stats;
pub mod sweep;
pub mod trials;

pub use config::{ConfigError, FadingPlan, GaussianPlan, ScenarioKind, SimConfig};
pub use output::{write_csv, CSV_HEADER};
pub use stats::WilsonInterval;
pub use sweep::{sweep_fading, sweep_gaussian, ErrorRateCurve, RatePoint};
pub use trials::{run_fading_trial, run_gaussian_trial, trial_rng, FadingDecoder, TrialRecord};
