//! Piece values in Elo-like units from chess game archives.
//!
//! The pipeline replays games ([`pgn`]), draws snapshot positions
//! ([`snapshot`]), fits logistic regressions of the outcome on material
//! imbalance and rating difference ([`glm`]) and corrects the fits for noise
//! in the published ratings ([`simex`]). [`lab`] holds ground-truth Monte
//! Carlo generators and rating-noise formulas, [`selfplay`] drives engine
//! matches, and [`report`] turns fits into tables.

pub mod config;
pub mod features;
pub mod glm;
pub mod lab;
pub mod pgn;
pub mod report;
pub mod selfplay;
pub mod simex;
pub mod snapshot;
pub mod stats;

pub use piecevalue_rules as rules;

/// Logit slope of a one-point rating difference: `ln(10) / 400`.
pub const ELO_LOGIT: f64 = std::f64::consts::LN_10 / 400.0;
