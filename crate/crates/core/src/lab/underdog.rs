//! How often the lower-rated player wins, against the logistic rating law.

use serde::Serialize;

use crate::pgn::GameRecord;
use crate::stats;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnderdogBin {
    /// Inclusive lower and exclusive upper edge of the rating deficit.
    pub lo: f64,
    pub hi: f64,
    pub games: usize,
    pub median_deficit: f64,
    /// Underdog's mean score, draws counting half.
    pub empirical: f64,
    /// Standard error of `empirical`.
    pub empirical_se: f64,
    pub theoretical: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnderdogTable {
    pub bin_width: f64,
    pub bins: Vec<UnderdogBin>,
    /// Bins between the first and last populated bin that had no games.
    pub empty_bins_dropped: usize,
}

/// Underdog's score under the logistic law at a rating deficit of `deficit` points.
pub fn theoretical_underdog(deficit: f64) -> f64 {
    1.0 / (1.0 + 10f64.powf(deficit / 400.0))
}

/// Bins games by the underdog's rating deficit in steps of `bin_width` points.
/// The underdog is the lower-rated player, black when ratings are equal.
pub fn underdog_calibration<'a, I: IntoIterator<Item = &'a GameRecord>>(records: I, bin_width: f64) -> UnderdogTable {
    assert!(bin_width > 0.0, "bin width must be positive");
    let mut bins: Vec<Vec<(f64, f64)>> = Vec::new();
    for r in records {
        let d = r.delta_rating();
        let (deficit, score) = if d >= 0.0 {
            (d, 1.0 - r.white_score())
        } else {
            (-d, r.white_score())
        };
        let b = (deficit / bin_width) as usize;
        if bins.len() <= b {
            bins.resize_with(b + 1, Vec::new);
        }
        bins[b].push((deficit, score));
    }
    let mut out = Vec::new();
    let mut empty = 0;
    for (i, games) in bins.into_iter().enumerate() {
        if games.is_empty() {
            empty += 1;
            continue;
        }
        let n = games.len() as f64;
        let deficits: Vec<f64> = games.iter().map(|g| g.0).collect();
        let scores: Vec<f64> = games.iter().map(|g| g.1).collect();
        let empirical = stats::mean(&scores);
        let spread = if games.len() > 1 { stats::variance(&scores) } else { 0.0 };
        let median_deficit = stats::median(&deficits);
        out.push(UnderdogBin {
            lo: i as f64 * bin_width,
            hi: (i + 1) as f64 * bin_width,
            games: games.len(),
            median_deficit,
            empirical,
            empirical_se: (spread / n).sqrt(),
            theoretical: theoretical_underdog(median_deficit),
        });
    }
    if empty > 0 {
        log::info!("{empty} empty underdog bins dropped");
    }
    UnderdogTable {
        bin_width,
        bins: out,
        empty_bins_dropped: empty,
    }
}
