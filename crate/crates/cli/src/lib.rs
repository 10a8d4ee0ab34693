//! Monte Carlo experiments for covert two-hop relaying: configuration,
//! seeded ergodic-rate sweeps, figure presets and CSV output.

pub mod config;
pub mod error;
pub mod experiment;
pub mod output;
pub mod presets;

pub use config::{ExperimentConfig, Scheme, Selection, Sweep, SweepVar, WillieModel};
pub use error::{CliError, Result};
pub use experiment::{ergodic_rate, run_sweep, simulate_trial, SweepResult, TrialOutcome};
pub use output::{emit_csv, write_csv};
pub use presets::{preset_series, run_preset, Preset};
