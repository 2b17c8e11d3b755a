//! Simulation extrapolation for noisy rating differences.
//!
//! [`simex_sweep`] adds extra Gaussian noise to the rating column and refits;
//! [`calibrate`] extrapolates the resulting curve back to zero noise;
//! [`estimate_sigma0`] matches the curve against Monte Carlo fits to find the
//! noise already present; [`bootstrap`] resamples games around the whole
//! procedure.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::glm::{self, Design, GlmError, Quote, RegressionFit};
use crate::stats;
use crate::ELO_LOGIT;

/// Default number of replicates per grid point.
pub const DEFAULT_REPLICATES: usize = 21;
/// Condition number above which a calibration regression is refused.
pub const MAX_CONDITION: f64 = 1e12;
/// Fewest curve points a calibration may use.
pub const MIN_POINTS: usize = 5;

#[derive(Debug, Error)]
pub enum SimexError {
    #[error("design has no column named {0:?}")]
    MissingTerm(String),
    #[error("noise grid must be non-empty, finite, non-negative and strictly increasing")]
    BadGrid,
    #[error("every grid point failed")]
    AllPointsFailed,
    #[error("{have} curve points with total noise at least {sigma0}, need {MIN_POINTS}")]
    InsufficientPoints { have: usize, sigma0: f64 },
    #[error("calibration design for {term} is ill-conditioned (condition number {condition:.3e})")]
    IllConditioned { term: String, condition: f64 },
    #[error("calibration produced a non-finite value for {0}")]
    NonFinite(String),
    #[error("no candidate noise levels")]
    NoCandidates,
    #[error("objective is flat across candidates (relative range {0:.4})")]
    FlatObjective(f64),
    #[error("bootstrap needs at least 2 replicates")]
    TooFewReplicates,
    #[error(transparent)]
    Glm(#[from] GlmError),
}

/// Extra-noise standard deviations: zero followed by 11 geometric steps from
/// `σ₀/4` to `3σ₀`. A non-positive `σ₀` gives a grid from 5 to 180 points.
pub fn default_grid(sigma0: f64) -> Vec<f64> {
    let scale = if sigma0 > 0.0 { sigma0 } else { 60.0 };
    let (lo, hi) = (scale / 4.0, 3.0 * scale);
    let mut grid = vec![0.0];
    grid.extend((0..11).map(|i| lo * (hi / lo).powf(f64::from(i) / 10.0)));
    grid
}

/// Upper bound on the number of geometric grid points.
pub const MAX_GRID_POINTS: u32 = 1000;

/// Parses `default`, `geom:LO:HI:N` (zero plus N geometric points) or a comma list.
pub fn parse_grid(spec: &str, sigma0: f64) -> Result<Vec<f64>, String> {
    let spec = spec.trim();
    if spec == "default" {
        return Ok(default_grid(sigma0));
    }
    if let Some(rest) = spec.strip_prefix("geom:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected geom:LO:HI:N, got {spec:?}"));
        }
        let lo: f64 = parts[0].parse().map_err(|_| format!("bad grid start {:?}", parts[0]))?;
        let hi: f64 = parts[1].parse().map_err(|_| format!("bad grid end {:?}", parts[1]))?;
        let n: u32 = parts[2].parse().map_err(|_| format!("bad grid size {:?}", parts[2]))?;
        if !(lo > 0.0 && hi > lo && hi.is_finite() && (2..=MAX_GRID_POINTS).contains(&n)) {
            return Err(format!("need 0 < LO < HI and 2 <= N <= {MAX_GRID_POINTS} in {spec:?}"));
        }
        let mut grid = vec![0.0];
        grid.extend((0..n).map(|i| lo * (hi / lo).powf(f64::from(i) / f64::from(n - 1))));
        validate_grid(&grid).map_err(|e| e.to_string())?;
        return Ok(grid);
    }
    let grid: Vec<f64> = spec
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| format!("bad grid value {s:?}")))
        .collect::<Result<_, _>>()?;
    validate_grid(&grid).map_err(|e| e.to_string())?;
    Ok(grid)
}

fn validate_grid(grid: &[f64]) -> Result<(), SimexError> {
    let ok = !grid.is_empty()
        && grid.iter().all(|s| s.is_finite() && *s >= 0.0)
        && grid.windows(2).all(|w| w[0] < w[1]);
    if ok {
        Ok(())
    } else {
        Err(SimexError::BadGrid)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimexSettings {
    /// Noise already present in the rating differences, rating points.
    pub sigma0: f64,
    /// Extra-noise standard deviations, rating points.
    pub grid: Vec<f64>,
    pub replicates: usize,
    pub seed: u64,
}

impl SimexSettings {
    pub fn new(sigma0: f64, seed: u64) -> SimexSettings {
        SimexSettings {
            sigma0,
            grid: default_grid(sigma0),
            replicates: DEFAULT_REPLICATES,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimexPoint {
    pub sigma_z: f64,
    /// `√(σ₀² + σ_z²)`.
    pub sigma_total: f64,
    /// Coordinate-wise median over successful replicates.
    pub fit: RegressionFit,
    pub replicates_ok: usize,
    pub replicates_failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimexCurve {
    pub sigma0: f64,
    pub rating_term: String,
    pub replicates: usize,
    pub seed: u64,
    pub points: Vec<SimexPoint>,
    /// Grid points where every replicate failed, with the last error.
    pub dropped: Vec<(f64, String)>,
}

impl SimexCurve {
    pub fn terms(&self) -> &[String] {
        &self.points[0].fit.terms
    }

    /// Values of one term along the curve, as (σ-total, coefficient).
    pub fn series(&self, term: &str) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .filter_map(|p| p.fit.coefficient(term).map(|c| (p.sigma_total, c)))
            .collect()
    }
}

/// RNG for grid point `sigma_index`, replicate `replicate`.
pub fn replicate_rng(seed: u64, sigma_index: usize, replicate: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((sigma_index as u64) << 32) | replicate as u64);
    rng
}

fn median_fit(fits: &[RegressionFit]) -> RegressionFit {
    let first = &fits[0];
    let coord = |f: &dyn Fn(&RegressionFit) -> f64| stats::median(&fits.iter().map(f).collect::<Vec<_>>());
    let coefficients = (0..first.terms.len())
        .map(|j| coord(&|fit: &RegressionFit| fit.coefficients[j]))
        .collect();
    RegressionFit {
        terms: first.terms.clone(),
        quotes: first.quotes.clone(),
        coefficients,
        standard_errors: None,
        n_games: first.n_games,
        n_pseudo_observations: first.n_pseudo_observations,
        log_likelihood: coord(&|fit: &RegressionFit| fit.log_likelihood),
        converged: fits.iter().all(|f| f.converged),
        iterations: fits.iter().map(|f| f.iterations).max().unwrap_or(0),
    }
}

/// Fits `design` with Gaussian noise of standard deviation `sigma_z` rating
/// points added to the rating column. `base` holds that column in rating points.
/// `start` holds logit coefficients to begin IRLS from.
fn noisy_fit(
    design: &Design,
    col: usize,
    base: &[f64],
    sigma_z: f64,
    start: &[f64],
    rng: &mut ChaCha8Rng,
) -> Result<RegressionFit, GlmError> {
    if sigma_z == 0.0 {
        return glm::fit(design);
    }
    let noisy: Vec<f64> = base
        .iter()
        .map(|b| ELO_LOGIT * (b + sigma_z * rng.sample::<f64, _>(StandardNormal)))
        .collect();
    let mut d = design.clone();
    d.set_column(col, &noisy);
    glm::fit_from(&d, start)
}

/// Refits `design` over the noise grid. The rating column must hold rating
/// differences rescaled by `ln(10)/400`, as built by [`Design::from_rows`].
pub fn simex_sweep(design: &Design, rating_term: &str, settings: &SimexSettings) -> Result<SimexCurve, SimexError> {
    validate_grid(&settings.grid)?;
    let col = design
        .column_index(rating_term)
        .ok_or_else(|| SimexError::MissingTerm(rating_term.to_string()))?;
    let base: Vec<f64> = design.column(col).iter().map(|v| v / ELO_LOGIT).collect();
    // Noisy refits start from the noise-free fit; they converge to the same optimum.
    let start = glm::fit(design)
        .map(|f| f.logit_coefficients())
        .unwrap_or_else(|_| vec![0.0; design.n_terms()]);
    let reps = settings.replicates.max(1);
    let jobs: Vec<(usize, usize)> = settings
        .grid
        .iter()
        .enumerate()
        .flat_map(|(i, s)| (0..if *s == 0.0 { 1 } else { reps }).map(move |r| (i, r)))
        .collect();
    let results: Vec<(usize, Result<RegressionFit, GlmError>)> = jobs
        .par_iter()
        .map(|&(i, r)| {
            let mut rng = replicate_rng(settings.seed, i, r);
            (i, noisy_fit(design, col, &base, settings.grid[i], &start, &mut rng))
        })
        .collect();
    let mut points = Vec::new();
    let mut dropped = Vec::new();
    for (i, &sigma_z) in settings.grid.iter().enumerate() {
        let mut ok = Vec::new();
        let mut failed = 0;
        let mut last_error = String::new();
        for (_, r) in results.iter().filter(|(j, _)| *j == i) {
            match r {
                Ok(fit) => ok.push(fit.clone()),
                Err(e) => {
                    failed += 1;
                    last_error = e.to_string();
                }
            }
        }
        if ok.is_empty() {
            log::warn!("simex point sigma_z={sigma_z} dropped: {last_error}");
            dropped.push((sigma_z, last_error));
            continue;
        }
        points.push(SimexPoint {
            sigma_z,
            sigma_total: settings.sigma0.hypot(sigma_z),
            fit: median_fit(&ok),
            replicates_ok: ok.len(),
            replicates_failed: failed,
        });
    }
    if points.is_empty() {
        return Err(SimexError::AllPointsFailed);
    }
    Ok(SimexCurve {
        sigma0: settings.sigma0,
        rating_term: rating_term.to_string(),
        replicates: reps,
        seed: settings.seed,
        points,
        dropped,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationDiagnostics {
    pub term: String,
    /// Coefficients of the calibration regression, in the scaled abscissa.
    pub coefficients: Vec<f64>,
    pub residuals: Vec<f64>,
    pub r_squared: f64,
    pub condition: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibratedFit {
    pub terms: Vec<String>,
    pub quotes: Vec<Quote>,
    /// Zero-noise estimates in quoted units.
    pub coefficients: Vec<f64>,
    pub sigma0: f64,
    /// σ-total of every curve point used.
    pub sigma_used: Vec<f64>,
    /// Abscissas are divided by this before forming powers.
    pub sigma_scale: f64,
    pub diagnostics: Vec<CalibrationDiagnostics>,
}

impl CalibratedFit {
    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.terms
            .iter()
            .position(|t| t == name)
            .map(|i| self.coefficients[i])
    }
}

fn checked_ls(term: &str, x: &[f64], p: usize, y: &[f64]) -> Result<stats::LeastSquares, SimexError> {
    let ls = stats::least_squares(x, p, y).ok_or_else(|| SimexError::NonFinite(term.to_string()))?;
    if !(ls.condition <= MAX_CONDITION) {
        return Err(SimexError::IllConditioned {
            term: term.to_string(),
            condition: ls.condition,
        });
    }
    Ok(ls)
}

/// Extrapolates a curve to zero noise.
///
/// The rating coefficient comes from regressing `1/β̂_s` on `{1, σ², σ⁴, σ⁶}`
/// (zero-noise value `1/b₀`); every other term from regressing `β̂_j` on
/// `{1, σ²β̂_s}` (zero-noise value the intercept). Only points with
/// σ-total ≥ `sigma0` are used. σ is divided by the largest σ used before
/// forming powers, which leaves the intercepts unchanged.
pub fn calibrate(curve: &SimexCurve, sigma0: f64) -> Result<CalibratedFit, SimexError> {
    let used: Vec<&SimexPoint> = curve
        .points
        .iter()
        .filter(|p| p.sigma_total >= sigma0 - 1e-9 * sigma0.abs().max(1.0))
        .collect();
    if used.len() < MIN_POINTS {
        return Err(SimexError::InsufficientPoints {
            have: used.len(),
            sigma0,
        });
    }
    let terms = curve.terms().to_vec();
    let rating = terms
        .iter()
        .position(|t| *t == curve.rating_term)
        .ok_or_else(|| SimexError::MissingTerm(curve.rating_term.clone()))?;
    let scale = used.iter().map(|p| p.sigma_total).fold(0.0, f64::max).max(1.0);
    let s2: Vec<f64> = used.iter().map(|p| (p.sigma_total / scale).powi(2)).collect();
    let beta_s: Vec<f64> = used.iter().map(|p| p.fit.coefficients[rating]).collect();

    let mut coefficients = vec![0.0; terms.len()];
    let mut diagnostics = Vec::with_capacity(terms.len());

    let x: Vec<f64> = s2.iter().flat_map(|v| [1.0, *v, v * v, v * v * v]).collect();
    let inv: Vec<f64> = beta_s.iter().map(|b| 1.0 / b).collect();
    let ls = checked_ls(&terms[rating], &x, 4, &inv)?;
    coefficients[rating] = 1.0 / ls.coefficients[0];
    diagnostics.push(CalibrationDiagnostics {
        term: terms[rating].clone(),
        coefficients: ls.coefficients,
        residuals: ls.residuals,
        r_squared: ls.r_squared,
        condition: ls.condition,
    });

    let x: Vec<f64> = s2.iter().zip(&beta_s).flat_map(|(v, b)| [1.0, v * b]).collect();
    for (j, term) in terms.iter().enumerate() {
        if j == rating {
            continue;
        }
        let y: Vec<f64> = used.iter().map(|p| p.fit.coefficients[j]).collect();
        let ls = checked_ls(term, &x, 2, &y)?;
        coefficients[j] = ls.coefficients[0];
        diagnostics.push(CalibrationDiagnostics {
            term: term.clone(),
            coefficients: ls.coefficients,
            residuals: ls.residuals,
            r_squared: ls.r_squared,
            condition: ls.condition,
        });
    }
    if let Some(j) = coefficients.iter().position(|c| !c.is_finite()) {
        return Err(SimexError::NonFinite(terms[j].clone()));
    }
    Ok(CalibratedFit {
        quotes: curve.points[0].fit.quotes.clone(),
        terms,
        coefficients,
        sigma0,
        sigma_used: used.iter().map(|p| p.sigma_total).collect(),
        sigma_scale: scale,
        diagnostics,
    })
}

/// Matched Monte Carlo settings for [`estimate_sigma0`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    /// Extra-noise grid shared by the SIMEX and Monte Carlo fits.
    pub grid: Vec<f64>,
    pub replicates: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sigma0Estimate {
    pub sigma0: f64,
    pub candidates: Vec<f64>,
    /// Squared distance between the curves at each candidate.
    pub objective: Vec<f64>,
    /// Rating ratio of the SIMEX fits at each grid point.
    pub simex_ratio: Vec<f64>,
}

/// Estimates the noise already present in observed rating differences.
///
/// `deltas` are observed differences in rating points and `outcomes` the
/// first player's scores. For each candidate σ₀ the observed differences are
/// shrunk by `√(1 − σ₀²/var)` to stand in for true differences, outcomes are
/// drawn from the logistic rating law, and rating-only fits are made at total
/// noise `√(σ₀² + σ_z²)` for every σ_z in the grid. The candidate whose
/// Monte Carlo ratios best match the SIMEX ratios of the real data wins.
/// Candidates share random numbers so the objective is smooth in σ₀.
pub fn estimate_sigma0(deltas: &[f64], outcomes: &[f64], candidates: &[f64], mc: &McConfig) -> Result<Sigma0Estimate, SimexError> {
    if candidates.is_empty() {
        return Err(SimexError::NoCandidates);
    }
    validate_grid(&mc.grid)?;
    let n = deltas.len();
    let rating_only = |x: &[f64], y: &[f64]| -> Result<Design, GlmError> {
        let mut d = Design::new(vec!["white_adv".into(), "delta_rating".into()], vec![Quote::Elo, Quote::Ratio]);
        for (dx, o) in x.iter().zip(y) {
            d.push(&[1.0, ELO_LOGIT * dx], *o)?;
        }
        Ok(d)
    };
    let real = rating_only(deltas, outcomes)?;
    let settings = SimexSettings {
        sigma0: 0.0,
        grid: mc.grid.clone(),
        replicates: mc.replicates,
        seed: mc.seed,
    };
    let curve = simex_sweep(&real, "delta_rating", &settings)?;
    if !curve.dropped.is_empty() {
        return Err(SimexError::AllPointsFailed);
    }
    let simex_ratio: Vec<f64> = curve.points.iter().map(|p| p.fit.coefficients[1]).collect();

    let var = stats::variance(deltas);
    let mut base_rng = ChaCha8Rng::seed_from_u64(mc.seed ^ 0x5eed_0f_5160);
    let uniforms: Vec<f64> = (0..n).map(|_| base_rng.random()).collect();
    let reps = mc.replicates.max(1);
    let normals: Vec<Vec<f64>> = (0..reps)
        .map(|_| (0..n).map(|_| base_rng.sample(StandardNormal)).collect())
        .collect();

    let objective: Vec<f64> = candidates
        .par_iter()
        .map(|&c| -> Result<f64, SimexError> {
            let shrink = (1.0 - c * c / var).max(0.0).sqrt();
            let truth: Vec<f64> = deltas.iter().map(|d| shrink * d).collect();
            let y: Vec<f64> = truth
                .iter()
                .zip(&uniforms)
                .map(|(t, u)| if *u < glm::logistic(ELO_LOGIT * t) { 1.0 } else { 0.0 })
                .collect();
            let mut total = 0.0;
            for (i, sz) in mc.grid.iter().enumerate() {
                let sigma = c.hypot(*sz);
                let fits: Vec<f64> = normals
                    .iter()
                    .map(|z| {
                        let obs: Vec<f64> = truth.iter().zip(z).map(|(t, e)| t + sigma * e).collect();
                        glm::fit(&rating_only(&obs, &y)?).map(|f| f.coefficients[1])
                    })
                    .collect::<Result<_, GlmError>>()?;
                total += (stats::median(&fits) - simex_ratio[i]).powi(2);
            }
            Ok(total)
        })
        .collect::<Result<_, _>>()?;

    let (best, _) = objective
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("candidates non-empty");
    let hi = objective.iter().copied().fold(f64::MIN, f64::max);
    let lo = objective[best];
    if candidates.len() > 1 && hi > 0.0 && (hi - lo) / hi < 0.01 {
        return Err(SimexError::FlatObjective((hi - lo) / hi));
    }
    Ok(Sigma0Estimate {
        sigma0: candidates[best],
        candidates: candidates.to_vec(),
        objective,
        simex_ratio,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub term: String,
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapResult {
    pub terms: Vec<String>,
    /// One row of zero-noise coefficients per successful replicate, in replicate order.
    pub replicates: Vec<Vec<f64>>,
    /// Failed replicates with their errors.
    pub failures: Vec<(usize, String)>,
    /// 2.5% and 97.5% percentile intervals over the successful replicates.
    pub intervals: Vec<Interval>,
}

/// Percentile bootstrap of the SIMEX and calibration pipeline, resampling games.
pub fn bootstrap(design: &Design, rating_term: &str, settings: &SimexSettings, b: usize, seed: u64) -> Result<BootstrapResult, SimexError> {
    if b < 2 {
        return Err(SimexError::TooFewReplicates);
    }
    let point = calibrate(&simex_sweep(design, rating_term, settings)?, settings.sigma0)?;
    let n = design.n_games();
    let outcomes: Vec<Result<Vec<f64>, String>> = (0..b)
        .into_par_iter()
        .map(|rep| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(rep as u64);
            let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            let resampled = design.resample(&idx);
            let s = SimexSettings {
                seed: rng.random(),
                ..settings.clone()
            };
            simex_sweep(&resampled, rating_term, &s)
                .and_then(|c| calibrate(&c, settings.sigma0))
                .map(|f| f.coefficients)
                .map_err(|e| e.to_string())
        })
        .collect();
    let mut replicates = Vec::new();
    let mut failures = Vec::new();
    for (i, o) in outcomes.into_iter().enumerate() {
        match o {
            Ok(v) => replicates.push(v),
            Err(e) => failures.push((i, e)),
        }
    }
    let intervals = point
        .terms
        .iter()
        .enumerate()
        .map(|(j, term)| {
            let mut col: Vec<f64> = replicates.iter().map(|r| r[j]).collect();
            col.sort_by(f64::total_cmp);
            let (lower, upper) = stats::outward_interval(&col, 0.025, 0.975);
            Interval {
                term: term.clone(),
                estimate: point.coefficients[j],
                lower,
                upper,
            }
        })
        .collect();
    Ok(BootstrapResult {
        terms: point.terms,
        replicates,
        failures,
        intervals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_shape() {
        let g = default_grid(58.0);
        assert_eq!(g.len(), 12);
        assert_eq!(g[0], 0.0);
        assert!((g[1] - 14.5).abs() < 1e-12);
        assert!((g[11] - 174.0).abs() < 1e-9);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(parse_grid("0, 10,20", 58.0).unwrap(), vec![0.0, 10.0, 20.0]);
        assert!(parse_grid("10,5", 58.0).is_err());
        assert_eq!(parse_grid("geom:10:40:3", 0.0).unwrap(), vec![0.0, 10.0, 20.0, 40.0]);
        assert!(parse_grid("geom:1:2:4000000000", 0.0).is_err());
        assert!(parse_grid("geom:1e-300:1e308:5", 0.0).is_err());
        assert!(parse_grid("geom:1:inf:5", 0.0).is_err());
    }

    fn model_curve(beta: &[f64], c: f64, sigma0: f64) -> SimexCurve {
        // Rating coefficient beta0/(1 + c σ²); other terms shift linearly in σ²β_s.
        let points = default_grid(sigma0)
            .into_iter()
            .map(|sz| {
                let s = sigma0.hypot(sz);
                let bs = beta[0] / (1.0 + c * s * s);
                let coefficients = vec![bs, beta[1] - 0.002 * s * s * bs, beta[2] + 0.001 * s * s * bs];
                SimexPoint {
                    sigma_z: sz,
                    sigma_total: s,
                    fit: RegressionFit {
                        terms: vec!["delta_rating".into(), "white_adv".into(), "knight".into()],
                        quotes: vec![Quote::Ratio, Quote::Elo, Quote::Elo],
                        coefficients,
                        standard_errors: None,
                        n_games: 1,
                        n_pseudo_observations: 2,
                        log_likelihood: 0.0,
                        converged: true,
                        iterations: 1,
                    },
                    replicates_ok: 1,
                    replicates_failed: 0,
                }
            })
            .collect();
        SimexCurve {
            sigma0,
            rating_term: "delta_rating".into(),
            replicates: 1,
            seed: 0,
            points,
            dropped: vec![],
        }
    }

    #[test]
    fn model_matched_curve_is_recovered() {
        let curve = model_curve(&[1.0, 15.0, 45.0], 1.0 / 120.0f64.powi(2), 58.0);
        let cal = calibrate(&curve, 58.0).unwrap();
        for (got, want) in cal.coefficients.iter().zip([1.0, 15.0, 45.0]) {
            assert!((got - want).abs() < 1e-8, "{got} vs {want}");
        }
        assert!(cal.sigma_used.iter().all(|s| *s >= 58.0));
    }

    #[test]
    fn too_few_points() {
        let mut curve = model_curve(&[1.0, 0.0, 0.0], 1e-4, 58.0);
        curve.points.truncate(4);
        assert!(matches!(
            calibrate(&curve, 58.0),
            Err(SimexError::InsufficientPoints { have: 4, .. })
        ));
    }
}
