//! Synthetic experiments with known ground truth.

pub mod archive;
pub mod knight;
pub mod noise;
pub mod underdog;

pub use archive::{random_game, synthetic_archive, synthetic_rating_games, ArchiveConfig};
pub use knight::{
    draw_knight_imbalance, generate, run_knight_experiment, DeltaSource, KnightExperimentConfig, KnightReport, KnightSample,
    OutOfRange, CLAMP_WARNING_FRACTION,
};
pub use noise::{elo_noise_se, implied_k, simulate_rating_error, EloNoise, EloNoiseParams, ImpliedK, NoiseError};
pub use underdog::{underdog_calibration, UnderdogBin, UnderdogTable};
