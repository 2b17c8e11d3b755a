//! Knight Monte Carlo: a known rating effect, white advantage and knight value,
//! with noisy ratings, run through SIMEX and calibration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Normal, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::glm::{logistic, Design, Quote};
use crate::simex::{self, CalibratedFit, SimexCurve, SimexError, SimexSettings, DEFAULT_REPLICATES};
use crate::stats;
use crate::ELO_LOGIT;

/// Fraction of clamped binomial probabilities above which a warning is raised.
pub const CLAMP_WARNING_FRACTION: f64 = 0.001;
const CHUNK: usize = 4096;

/// Where true rating differences come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaSource {
    /// Resample observed differences (rating points) with replacement.
    Empirical(Vec<f64>),
    Gaussian { mean: f64, sd: f64 },
}

impl DeltaSource {
    fn variance(&self) -> f64 {
        match self {
            DeltaSource::Empirical(v) => stats::variance(v),
            DeltaSource::Gaussian { sd, .. } => sd * sd,
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            DeltaSource::Empirical(v) => v[rng.random_range(0..v.len())],
            DeltaSource::Gaussian { mean, sd } => mean + sd * rng.sample::<f64, _>(StandardNormal),
        }
    }
}

/// What to do with a game whose knight probability `(c/2)·Δs` is outside `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutOfRange {
    /// Clamp the probability and keep the game.
    #[default]
    Clamp,
    /// Leave the game out of the sample.
    Drop,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnightExperimentConfig {
    pub n_games: usize,
    /// Logit coefficients of the generating model.
    pub beta_w: f64,
    pub beta_n: f64,
    pub beta_s: f64,
    /// Noise on the observed rating differences, rating points.
    pub sigma0: f64,
    /// Extra-noise grid for the sweep.
    pub grid: Vec<f64>,
    pub replicates: usize,
    /// Multiplier turning sampled differences into true ones. `None` picks the
    /// value that makes observed differences match the source's spread.
    pub shrink: Option<f64>,
    pub source: DeltaSource,
    pub out_of_range: OutOfRange,
    pub seed: u64,
}

impl Default for KnightExperimentConfig {
    fn default() -> KnightExperimentConfig {
        KnightExperimentConfig {
            n_games: 500_000,
            beta_w: 15.0 * ELO_LOGIT,
            beta_n: 45.0 * ELO_LOGIT,
            beta_s: ELO_LOGIT,
            sigma0: 58.0,
            grid: simex::default_grid(58.0),
            replicates: DEFAULT_REPLICATES,
            shrink: None,
            source: DeltaSource::Gaussian { mean: 0.0, sd: 200.0 },
            out_of_range: OutOfRange::Clamp,
            seed: 0,
        }
    }
}

impl KnightExperimentConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.n_games == 0 {
            return Err("n_games must be positive".into());
        }
        if !(self.sigma0 >= 0.0) || self.grid.iter().any(|s| !(*s >= 0.0)) {
            return Err("noise levels must be non-negative".into());
        }
        if let DeltaSource::Empirical(v) = &self.source {
            if v.len() < 2 {
                return Err("empirical source needs at least two differences".into());
            }
        }
        Ok(())
    }

    pub fn effective_shrink(&self) -> f64 {
        self.shrink
            .unwrap_or_else(|| (1.0 - self.sigma0.powi(2) / self.source.variance()).max(0.0).sqrt())
    }
}

/// One simulated data set.
#[derive(Debug, Clone)]
pub struct KnightSample {
    /// Columns `white_adv`, `delta_rating` (observed, rescaled), `knight`.
    pub design: Design,
    pub true_delta: Vec<f64>,
    pub delta_knights: Vec<i32>,
    /// Games drawn, including any dropped.
    pub drawn: usize,
    /// Games whose binomial probability fell outside `[0, 1]`.
    pub clamped: usize,
}

impl KnightSample {
    pub fn clamp_fraction(&self) -> f64 {
        self.clamped as f64 / self.drawn as f64
    }
}

/// Knight imbalance `−2 + Binomial(4, clamp((c/2)·Δs, 0, 1))`; the flag marks clamping.
pub fn draw_knight_imbalance(delta_s: f64, rng: &mut ChaCha8Rng) -> (i32, bool) {
    let raw = 0.5 * ELO_LOGIT * delta_s;
    let p = raw.clamp(0.0, 1.0);
    let k = Binomial::new(4, p).expect("probability in [0, 1]").sample(rng);
    (k as i32 - 2, p != raw)
}

/// Draws the games. Each chunk of games has its own RNG stream.
pub fn generate(config: &KnightExperimentConfig) -> KnightSample {
    let shrink = config.effective_shrink();
    let noise = Normal::new(0.0, config.sigma0.max(0.0)).expect("finite sd");
    let chunks: Vec<Vec<(f64, f64, i32, f64, bool)>> = (0..config.n_games.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(c as u64);
            let len = CHUNK.min(config.n_games - c * CHUNK);
            (0..len)
                .map(|_| {
                    let truth = shrink * config.source.sample(&mut rng);
                    let (dn, clamped) = draw_knight_imbalance(truth, &mut rng);
                    let eta = config.beta_w + config.beta_s * truth + config.beta_n * f64::from(dn);
                    let y = if rng.random::<f64>() < logistic(eta) { 1.0 } else { 0.0 };
                    let observed = truth + noise.sample(&mut rng);
                    (truth, observed, dn, y, clamped)
                })
                .collect()
        })
        .collect();
    let mut design = Design::new(
        vec!["white_adv".into(), "delta_rating".into(), "knight".into()],
        vec![Quote::Elo, Quote::Ratio, Quote::Elo],
    );
    let mut true_delta = Vec::with_capacity(config.n_games);
    let mut delta_knights = Vec::with_capacity(config.n_games);
    let mut clamped = 0;
    for (truth, observed, dn, y, c) in chunks.into_iter().flatten() {
        clamped += usize::from(c);
        if c && config.out_of_range == OutOfRange::Drop {
            continue;
        }
        design
            .push(&[1.0, ELO_LOGIT * observed, f64::from(dn)], y)
            .expect("outcome is 0 or 1");
        true_delta.push(truth);
        delta_knights.push(dn);
    }
    KnightSample {
        design,
        true_delta,
        delta_knights,
        drawn: config.n_games,
        clamped,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct KnightReport {
    pub curve: SimexCurve,
    pub calibrated: CalibratedFit,
    /// Truth in quoted units (ratio for the rating term, Elo otherwise).
    pub truth: Vec<(String, f64)>,
    pub clamp_fraction: f64,
    pub warnings: Vec<String>,
}

pub fn run_knight_experiment(config: &KnightExperimentConfig) -> Result<KnightReport, SimexError> {
    let sample = generate(config);
    let mut warnings = Vec::new();
    let frac = sample.clamp_fraction();
    if frac > CLAMP_WARNING_FRACTION {
        let msg = format!(
            "{:.2}% of knight binomial probabilities fell outside [0, 1] ({:?})",
            100.0 * frac,
            config.out_of_range
        );
        log::warn!("{msg}");
        warnings.push(msg);
    }
    let settings = SimexSettings {
        sigma0: config.sigma0,
        grid: config.grid.clone(),
        replicates: config.replicates,
        seed: config.seed.wrapping_add(1),
    };
    let curve = simex::simex_sweep(&sample.design, "delta_rating", &settings)?;
    let calibrated = simex::calibrate(&curve, config.sigma0)?;
    Ok(KnightReport {
        curve,
        calibrated,
        truth: vec![
            ("white_adv".into(), config.beta_w / ELO_LOGIT),
            ("delta_rating".into(), config.beta_s / ELO_LOGIT),
            ("knight".into(), config.beta_n / ELO_LOGIT),
        ],
        clamp_fraction: frac,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn imbalance_range_and_clamping() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in [-500.0, -1.0, 0.0, 100.0, 400.0] {
            let (dn, clamped) = draw_knight_imbalance(d, &mut rng);
            assert!((-2..=2).contains(&dn));
            assert_eq!(clamped, !(0.0..=2.0 / ELO_LOGIT).contains(&d));
        }
        assert_eq!(draw_knight_imbalance(-10.0, &mut rng).0, -2);
        assert_eq!(draw_knight_imbalance(1000.0, &mut rng).0, 2);
    }

    #[test]
    fn shrink_matches_spread() {
        let c = KnightExperimentConfig {
            source: DeltaSource::Gaussian { mean: 0.0, sd: 200.0 },
            sigma0: 58.0,
            ..KnightExperimentConfig::default()
        };
        let s = c.effective_shrink();
        assert!(((s * 200.0).powi(2) + 58.0f64.powi(2) - 200.0f64.powi(2)).abs() < 1e-9);
    }
}
