//! Binomial logistic regression fit by iteratively reweighted least squares.
//!
//! Each game is encoded as two coin flips: a win is two successes, a loss two
//! failures and a draw one of each. Both flips share the game's linear
//! predictor, so the game is fit as a binomial observation with two trials.
//! Coefficients are quoted in Elo-like units (logit coefficient divided by
//! `ln(10)/400`), except ratio-quoted columns such as the pre-rescaled rating
//! difference, whose ideal coefficient is 1.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::{FeatureRow, Term};
use crate::ELO_LOGIT;

pub const MAX_ITERATIONS: usize = 100;
pub const COEF_TOLERANCE: f64 = 1e-10;
/// Logit coefficients beyond this magnitude indicate (quasi-)separation.
pub const SEPARATION_BOUND: f64 = 50.0;
const MAX_HALVINGS: usize = 40;
const RANK_TOLERANCE: f64 = 1e-9;

/// How a coefficient is quoted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quote {
    /// Logit coefficient divided by `ln(10)/400`.
    Elo,
    /// Logit coefficient as is.
    Ratio,
}

impl Quote {
    pub fn from_logit(self, b: f64) -> f64 {
        match self {
            Quote::Elo => b / ELO_LOGIT,
            Quote::Ratio => b,
        }
    }

    pub fn to_logit(self, v: f64) -> f64 {
        match self {
            Quote::Elo => v * ELO_LOGIT,
            Quote::Ratio => v,
        }
    }
}

#[derive(Debug, Error)]
pub enum GlmError {
    #[error("no observations")]
    Empty,
    #[error("row {row} lacks term {term}")]
    MissingTerm { row: usize, term: String },
    #[error("outcome {0} is not one of 0, 0.5, 1")]
    BadOutcome(f64),
    #[error("design is rank deficient; collinear terms: {}", terms.join(", "))]
    RankDeficient { terms: Vec<String> },
    #[error("IRLS did not converge in {} iterations", fit.iterations)]
    NotConverged { fit: Box<RegressionFit> },
    #[error("quasi-separation: a logit coefficient exceeded {SEPARATION_BOUND}")]
    QuasiSeparated { fit: Box<RegressionFit> },
    #[error("non-finite value in the design or during iteration")]
    NonFinite,
}

/// Design matrix plus binomial responses (successes out of two flips per game).
#[derive(Debug, Clone)]
pub struct Design {
    names: Vec<String>,
    quotes: Vec<Quote>,
    x: Vec<f64>,
    successes: Vec<f64>,
}

impl Design {
    pub fn new(names: Vec<String>, quotes: Vec<Quote>) -> Design {
        assert_eq!(names.len(), quotes.len());
        Design {
            names,
            quotes,
            x: Vec::new(),
            successes: Vec::new(),
        }
    }

    /// Builds the design for `terms` over feature rows. The rating term is
    /// ratio-quoted, everything else Elo-quoted.
    pub fn from_rows(rows: &[FeatureRow], terms: &[Term]) -> Result<Design, GlmError> {
        let names = terms.iter().map(|t| t.name().to_string()).collect();
        let quotes = terms
            .iter()
            .map(|t| match t {
                Term::DeltaRating => Quote::Ratio,
                _ => Quote::Elo,
            })
            .collect();
        let mut d = Design::new(names, quotes);
        d.x.reserve(rows.len() * terms.len());
        d.successes.reserve(rows.len());
        let mut buf = Vec::with_capacity(terms.len());
        for (i, r) in rows.iter().enumerate() {
            buf.clear();
            for t in terms {
                buf.push(t.value(r).ok_or_else(|| GlmError::MissingTerm {
                    row: i,
                    term: t.name().to_string(),
                })?);
            }
            d.push(&buf, r.outcome)?;
        }
        Ok(d)
    }

    /// Appends one game. `outcome` is 1 (win), 0.5 (draw) or 0 (loss) for the first player.
    pub fn push(&mut self, x: &[f64], outcome: f64) -> Result<(), GlmError> {
        assert_eq!(x.len(), self.names.len(), "row width");
        if outcome != 0.0 && outcome != 0.5 && outcome != 1.0 {
            return Err(GlmError::BadOutcome(outcome));
        }
        self.x.extend_from_slice(x);
        self.successes.push(2.0 * outcome);
        Ok(())
    }

    pub fn n_games(&self) -> usize {
        self.successes.len()
    }

    pub fn n_terms(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn quotes(&self) -> &[Quote] {
        &self.quotes
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let p = self.n_terms();
        &self.x[i * p..(i + 1) * p]
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Overwrites one column.
    pub fn set_column(&mut self, col: usize, values: &[f64]) {
        let p = self.n_terms();
        assert_eq!(values.len(), self.n_games());
        for (i, v) in values.iter().enumerate() {
            self.x[i * p + col] = *v;
        }
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        let p = self.n_terms();
        (0..self.n_games()).map(|i| self.x[i * p + col]).collect()
    }

    /// Game outcomes (1, 0.5, 0).
    pub fn outcomes(&self) -> impl Iterator<Item = f64> + '_ {
        self.successes.iter().map(|s| s / 2.0)
    }

    /// A design holding the listed games, with repeats.
    pub fn resample(&self, indices: &[usize]) -> Design {
        let p = self.n_terms();
        let mut d = Design::new(self.names.clone(), self.quotes.clone());
        d.x.reserve(indices.len() * p);
        for &i in indices {
            d.x.extend_from_slice(self.row(i));
            d.successes.push(self.successes[i]);
        }
        d
    }

    /// Terms that are linear combinations of earlier ones (unweighted Gram matrix).
    pub fn collinear_terms(&self) -> Vec<String> {
        let p = self.n_terms();
        let mut gram = DMatrix::<f64>::zeros(p, p);
        for i in 0..self.n_games() {
            let r = self.row(i);
            for a in 0..p {
                for b in a..p {
                    gram[(a, b)] += r[a] * r[b];
                }
            }
        }
        for a in 0..p {
            for b in 0..a {
                gram[(a, b)] = gram[(b, a)];
            }
        }
        // Scale to unit diagonal so the tolerance is relative.
        let scale: Vec<f64> = (0..p).map(|j| gram[(j, j)].sqrt()).collect();
        let mut bad = Vec::new();
        let mut kept: Vec<usize> = Vec::new();
        for j in 0..p {
            if scale[j] == 0.0 {
                bad.push(self.names[j].clone());
                continue;
            }
            let mut candidate = kept.clone();
            candidate.push(j);
            let k = candidate.len();
            let sub = DMatrix::from_fn(k, k, |a, b| {
                let (ca, cb) = (candidate[a], candidate[b]);
                gram[(ca, cb)] / (scale[ca] * scale[cb])
            });
            let ok = sub
                .cholesky()
                .map(|c| {
                    let l = c.l();
                    l[(k - 1, k - 1)].powi(2) > RANK_TOLERANCE
                })
                .unwrap_or(false);
            if ok {
                kept.push(j);
            } else {
                bad.push(self.names[j].clone());
            }
        }
        bad
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    pub terms: Vec<String>,
    pub quotes: Vec<Quote>,
    /// Quoted coefficients (see [`Quote`]).
    pub coefficients: Vec<f64>,
    /// Classical standard errors in quoted units. These treat the two flips
    /// per game as independent and are therefore too small by about `sqrt(2)`.
    pub standard_errors: Option<Vec<f64>>,
    pub n_games: usize,
    pub n_pseudo_observations: usize,
    pub log_likelihood: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl RegressionFit {
    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.terms
            .iter()
            .position(|t| t == name)
            .map(|i| self.coefficients[i])
    }

    pub fn standard_error(&self, name: &str) -> Option<f64> {
        let i = self.terms.iter().position(|t| t == name)?;
        self.standard_errors.as_ref().map(|s| s[i])
    }

    pub fn logit_coefficients(&self) -> Vec<f64> {
        self.coefficients
            .iter()
            .zip(&self.quotes)
            .map(|(v, q)| q.to_logit(*v))
            .collect()
    }

    /// Win probability for a design row (same column order and scaling as the fit).
    pub fn predict_probability(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.terms.len());
        let eta: f64 = self
            .logit_coefficients()
            .iter()
            .zip(x)
            .map(|(b, v)| b * v)
            .sum();
        logistic(eta)
    }

    /// Win probability for a feature row, for fits built from [`Term`]s.
    pub fn predict_row(&self, row: &FeatureRow) -> Option<f64> {
        let mut x = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let term: Term = t.parse().ok()?;
            x.push(term.value(row)?);
        }
        Some(self.predict_probability(&x))
    }
}

pub fn logistic(eta: f64) -> f64 {
    if eta >= 0.0 {
        1.0 / (1.0 + (-eta).exp())
    } else {
        let e = eta.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^eta)` without overflow.
fn softplus(eta: f64) -> f64 {
    if eta > 0.0 {
        eta + (-eta).exp().ln_1p()
    } else {
        eta.exp().ln_1p()
    }
}

/// Log-likelihood of the pseudo-observations at logit coefficients `beta`.
pub fn log_likelihood(design: &Design, beta: &[f64]) -> f64 {
    let p = design.n_terms();
    let mut ll = 0.0;
    for (i, &s) in design.successes.iter().enumerate() {
        let r = &design.x[i * p..(i + 1) * p];
        let eta: f64 = r.iter().zip(beta).map(|(a, b)| a * b).sum();
        ll += s * eta - 2.0 * softplus(eta);
    }
    ll
}

/// Score vector (gradient of the log-likelihood) at logit coefficients `beta`.
pub fn score(design: &Design, beta: &[f64]) -> Vec<f64> {
    let p = design.n_terms();
    let mut g = vec![0.0; p];
    for (i, &s) in design.successes.iter().enumerate() {
        let r = &design.x[i * p..(i + 1) * p];
        let eta: f64 = r.iter().zip(beta).map(|(a, b)| a * b).sum();
        let resid = s - 2.0 * logistic(eta);
        for (gj, xj) in g.iter_mut().zip(r) {
            *gj += resid * xj;
        }
    }
    g
}

/// Gradient and Fisher information in one pass.
fn score_and_information(design: &Design, beta: &[f64]) -> (DVector<f64>, DMatrix<f64>, f64) {
    let p = design.n_terms();
    let mut g = vec![0.0; p];
    let mut h = vec![0.0; p * p];
    let mut ll = 0.0;
    for (r, &s) in design.x.chunks_exact(p).zip(&design.successes) {
        let eta: f64 = r.iter().zip(beta).map(|(a, b)| a * b).sum();
        // One exponential serves the mean and the log-partition term.
        let e = (-eta.abs()).exp();
        let mu = if eta >= 0.0 { 1.0 / (1.0 + e) } else { e / (1.0 + e) };
        let w = 2.0 * mu * (1.0 - mu);
        let resid = s - 2.0 * mu;
        ll += s * eta - 2.0 * (eta.max(0.0) + e.ln_1p());
        for a in 0..p {
            g[a] += resid * r[a];
            let wa = w * r[a];
            let row = &mut h[a * p..(a + 1) * p];
            for b in a..p {
                row[b] += wa * r[b];
            }
        }
    }
    let h = DMatrix::from_fn(p, p, |a, b| if a <= b { h[a * p + b] } else { h[b * p + a] });
    (DVector::from_vec(g), h, ll)
}

fn finish(
    design: &Design,
    beta: &[f64],
    info: Option<&DMatrix<f64>>,
    ll: f64,
    converged: bool,
    iterations: usize,
) -> RegressionFit {
    let standard_errors = info.and_then(|h| h.clone().try_inverse()).map(|inv| {
        (0..beta.len())
            .map(|j| design.quotes[j].from_logit(inv[(j, j)].max(0.0).sqrt()))
            .collect()
    });
    RegressionFit {
        terms: design.names.clone(),
        quotes: design.quotes.clone(),
        coefficients: beta
            .iter()
            .zip(&design.quotes)
            .map(|(b, q)| q.from_logit(*b))
            .collect(),
        standard_errors,
        n_games: design.n_games(),
        n_pseudo_observations: 2 * design.n_games(),
        log_likelihood: ll,
        converged,
        iterations,
    }
}

/// Maximum-likelihood fit, starting from zero coefficients.
pub fn fit(design: &Design) -> Result<RegressionFit, GlmError> {
    fit_from(design, &vec![0.0; design.n_terms()])
}

/// Maximum-likelihood fit starting from logit coefficients `start`.
pub fn fit_from(design: &Design, start: &[f64]) -> Result<RegressionFit, GlmError> {
    assert_eq!(start.len(), design.n_terms(), "start width");
    if design.n_games() == 0 {
        return Err(GlmError::Empty);
    }
    if design.x.iter().any(|v| !v.is_finite()) {
        return Err(GlmError::NonFinite);
    }
    let collinear = design.collinear_terms();
    if !collinear.is_empty() {
        return Err(GlmError::RankDeficient { terms: collinear });
    }
    let mut beta = start.to_vec();
    let (mut g, mut h, mut ll) = score_and_information(design, &beta);
    for iter in 1..=MAX_ITERATIONS {
        let step = match h.clone().cholesky() {
            Some(c) => c.solve(&g),
            None => match h.clone().lu().solve(&g) {
                Some(s) => s,
                None => {
                    let fit = finish(design, &beta, None, ll, false, iter);
                    return Err(GlmError::QuasiSeparated { fit: Box::new(fit) });
                }
            },
        };
        if step.iter().any(|v| !v.is_finite()) {
            return Err(GlmError::NonFinite);
        }
        // Step halving keeps the log-likelihood non-decreasing.
        let mut scale = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let trial: Vec<f64> = beta
                .iter()
                .zip(step.iter())
                .map(|(b, s)| b + scale * s)
                .collect();
            let next = score_and_information(design, &trial);
            if next.2 >= ll - 1e-12 * ll.abs().max(1.0) {
                accepted = Some((trial, next));
                break;
            }
            scale *= 0.5;
        }
        let Some((trial, (g2, h2, ll2))) = accepted else {
            // No ascent direction left: we are at the optimum to working precision.
            return Ok(finish(design, &beta, Some(&h), ll, true, iter));
        };
        let max_change = beta
            .iter()
            .zip(&trial)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        beta = trial;
        g = g2;
        h = h2;
        ll = ll2;
        if beta.iter().any(|b| b.abs() > SEPARATION_BOUND) {
            let fit = finish(design, &beta, Some(&h), ll, false, iter);
            return Err(GlmError::QuasiSeparated { fit: Box::new(fit) });
        }
        if max_change < COEF_TOLERANCE {
            return Ok(finish(design, &beta, Some(&h), ll, true, iter));
        }
    }
    let fit = finish(design, &beta, Some(&h), ll, false, MAX_ITERATIONS);
    Err(GlmError::NotConverged { fit: Box::new(fit) })
}

/// Fits the listed terms over feature rows.
pub fn fit_logistic(rows: &[FeatureRow], terms: &[Term]) -> Result<RegressionFit, GlmError> {
    fit(&Design::from_rows(rows, terms)?)
}
