//! Rating-noise model for an Elo-style update rule.
//!
//! With true ability difference `Δa` and published difference `Δr = Δa + ε`,
//! each game moves `Δr` by `2k(y − g(Δr))`. Linearised, `ε` follows an AR(1)
//! process whose stationary variance is `kσ²/(g′(1 − kg′))`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pgn::GameRecord;
use crate::ELO_LOGIT;

/// Games where `|y − g(Δr)|` is below this are skipped when backing out `k`.
pub const MIN_SURPRISE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NoiseError {
    #[error("update process is not stationary at k = {k} (k·g′ = {kg:.4}); need k < 1/c = {:.2}", 1.0 / ELO_LOGIT)]
    NonStationary { k: f64, kg: f64 },
    #[error("invalid parameters: {0}")]
    Invalid(String),
}

/// Expected score at rating difference `delta`.
pub fn expected_score(delta: f64) -> f64 {
    crate::glm::logistic(ELO_LOGIT * delta)
}

/// Derivative of [`expected_score`].
pub fn expected_score_slope(delta: f64) -> f64 {
    let g = expected_score(delta);
    ELO_LOGIT * g * (1.0 - g)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EloNoiseParams {
    /// Update step, rating points per unit of surprise.
    pub k: f64,
    /// True ability difference, rating points.
    pub delta_a: f64,
    /// Draw probability.
    pub p_draw: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EloNoise {
    pub g: f64,
    pub g_prime: f64,
    /// Variance of a single game's score.
    pub score_variance: f64,
    pub variance: f64,
    pub se: f64,
}

impl EloNoiseParams {
    pub fn validate(&self) -> Result<(), NoiseError> {
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(NoiseError::Invalid(format!("k must be positive, got {}", self.k)));
        }
        if !self.delta_a.is_finite() {
            return Err(NoiseError::Invalid("non-finite ability difference".into()));
        }
        if !(0.0..=1.0).contains(&self.p_draw) {
            return Err(NoiseError::Invalid(format!("draw probability {} outside [0, 1]", self.p_draw)));
        }
        let g = expected_score(self.delta_a);
        if self.p_draw > 2.0 * g.min(1.0 - g) {
            return Err(NoiseError::Invalid(format!(
                "draw probability {} too large for expected score {g:.4}",
                self.p_draw
            )));
        }
        Ok(())
    }

    /// Per-game score probabilities `(win, draw, loss)` with mean `g(Δa)`.
    pub fn score_distribution(&self) -> (f64, f64, f64) {
        let g = expected_score(self.delta_a);
        let win = g - self.p_draw / 2.0;
        (win, self.p_draw, 1.0 - win - self.p_draw)
    }
}

/// Stationary standard error of the published rating difference.
///
/// Raises [`NoiseError::NonStationary`] when `k·g′ ≥ 1` and also whenever
/// `k ≥ 1/c`, the bound that guarantees stationarity at every `Δa`.
pub fn elo_noise_se(params: &EloNoiseParams) -> Result<EloNoise, NoiseError> {
    params.validate()?;
    let g = expected_score(params.delta_a);
    let g_prime = expected_score_slope(params.delta_a);
    let kg = params.k * g_prime;
    if kg >= 1.0 || params.k * ELO_LOGIT >= 1.0 {
        return Err(NoiseError::NonStationary { k: params.k, kg });
    }
    let score_variance = g * (1.0 - g) - params.p_draw / 4.0;
    let variance = params.k * score_variance / (g_prime * (1.0 - kg));
    Ok(EloNoise {
        g,
        g_prime,
        score_variance,
        variance,
        se: variance.sqrt(),
    })
}

/// Simulates the nonlinear update rule for `steps` games, starting at the
/// truth, and returns the sample standard deviation of `Δr − Δa` after
/// discarding `burn_in` steps.
pub fn simulate_rating_error(params: &EloNoiseParams, steps: usize, burn_in: usize, seed: u64) -> Result<f64, NoiseError> {
    params.validate()?;
    let (win, draw, _) = params.score_distribution();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dr = params.delta_a;
    let (mut n, mut mean, mut m2) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..steps + burn_in {
        let u: f64 = rng.random();
        let y = if u < win {
            1.0
        } else if u < win + draw {
            0.5
        } else {
            0.0
        };
        dr += 2.0 * params.k * (y - expected_score(dr));
        if i >= burn_in {
            let e = dr - params.delta_a;
            n += 1.0;
            let d = e - mean;
            mean += d / n;
            m2 += d * (e - mean);
        }
    }
    Ok((m2 / (n - 1.0)).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImpliedK {
    /// Per-game values, sorted.
    pub values: Vec<f64>,
    pub median: f64,
    /// Games skipped because the outcome matched expectation too closely.
    pub near_zero: u64,
    /// Games without rating-change tags.
    pub missing: u64,
}

impl ImpliedK {
    /// Histogram of the values over `bins` equal-width bins in `[lo, hi)`,
    /// as (bin centre, density).
    pub fn density(&self, lo: f64, hi: f64, bins: usize) -> Vec<(f64, f64)> {
        let width = (hi - lo) / bins as f64;
        let mut counts = vec![0u64; bins];
        for v in &self.values {
            if *v >= lo && *v < hi {
                let b = (((v - lo) / width) as usize).min(bins - 1);
                counts[b] += 1;
            }
        }
        let total = self.values.len().max(1) as f64;
        counts
            .iter()
            .enumerate()
            .map(|(i, c)| (lo + (i as f64 + 0.5) * width, *c as f64 / (total * width)))
            .collect()
    }
}

/// Backs out the update step of each game from its rating changes.
///
/// With both changes recorded, the rating difference moved by `white − black`
/// and `k = (white − black) / (2(y − g(Δr)))`; with only white's change,
/// `k = white / (y − g(Δr))`.
pub fn implied_k<'a, I: IntoIterator<Item = &'a GameRecord>>(records: I) -> ImpliedK {
    let mut values = Vec::new();
    let (mut near_zero, mut missing) = (0, 0);
    for r in records {
        let surprise = r.white_score() - expected_score(r.delta_rating());
        let moved = match (r.white_rating_diff, r.black_rating_diff) {
            (Some(w), Some(b)) => f64::from(w - b) / 2.0,
            (Some(w), None) => f64::from(w),
            _ => {
                missing += 1;
                continue;
            }
        };
        if surprise.abs() < MIN_SURPRISE {
            near_zero += 1;
            continue;
        }
        values.push(moved / surprise);
    }
    values.sort_by(f64::total_cmp);
    let median = crate::stats::median_sorted(&values);
    ImpliedK {
        values,
        median,
        near_zero,
        missing,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_closed_form() {
        let k = 30.0;
        let out = elo_noise_se(&EloNoiseParams {
            k,
            delta_a: 0.0,
            p_draw: 0.0,
        })
        .unwrap();
        let c = ELO_LOGIT;
        let expect = (k * 0.25 / ((c / 4.0) * (1.0 - k * c / 4.0))).sqrt();
        assert!((out.se - expect).abs() < 1e-12);
        assert_eq!(out.g, 0.5);
    }

    #[test]
    fn stationarity_bound() {
        let bound = 1.0 / ELO_LOGIT;
        assert!((bound - 173.72).abs() < 0.005);
        let at = |k| {
            elo_noise_se(&EloNoiseParams {
                k,
                delta_a: 0.0,
                p_draw: 0.0,
            })
        };
        assert!(at(bound - 0.01).is_ok());
        assert!(matches!(at(bound), Err(NoiseError::NonStationary { .. })));
        assert!(matches!(at(1000.0), Err(NoiseError::NonStationary { .. })));
    }

    #[test]
    fn draw_probability_bounds() {
        let p = EloNoiseParams {
            k: 20.0,
            delta_a: 0.0,
            p_draw: 1.0,
        };
        assert!(elo_noise_se(&p).is_ok());
        let p = EloNoiseParams {
            delta_a: 400.0,
            p_draw: 0.5,
            ..p
        };
        assert!(matches!(elo_noise_se(&p), Err(NoiseError::Invalid(_))));
    }
}
