//! Classical Fisher information of the interferometer's outcome distribution.
//!
//! For the measured distribution p(m|φ) the classical Fisher information is
//!
//! ```text
//! F(φ) = Σ_m (dp_m/dφ)² / p_m,
//! ```
//!
//! the variance of the score statistic s(m) = d/dφ ln p(m|φ). It bounds the
//! variance of any unbiased estimator through the Cramér–Rao inequality
//! Var(φ̂) ≥ 1/(N·F) over N independent measurements. Derivatives are taken by
//! central finite differences on the simulator's exact probabilities, so the
//! only error is the O(h²) truncation of the difference quotient. Outcomes
//! with probability below [`PROBABILITY_FLOOR`] are excluded from 1/p terms;
//! in the exact limit they contribute nothing.

use crate::ramsey::{ModelError, OutcomeDistribution, RamseyModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Outcomes with probability below this floor are excluded from 1/p terms.
pub const PROBABILITY_FLOOR: f64 = 1e-12;

/// Recommended finite-difference half-step (radians).
pub const DEFAULT_DERIVATIVE_STEP: f64 = 1e-5;

/// Half-width (radians) of the likelihood search grid used by
/// [`sampled_estimator_variance`].
pub const ESTIMATOR_GRID_HALF_WIDTH: f64 = 0.5;

/// Number of points in the likelihood search grid used by
/// [`sampled_estimator_variance`].
pub const ESTIMATOR_GRID_POINTS: usize = 2001;

/// Errors from Fisher-information computations.
#[derive(Debug, Error)]
pub enum FisherError {
    /// Finite-difference half-step was zero, negative, or non-finite.
    #[error("derivative half-step must be positive and finite, got {step}")]
    BadStep {
        /// The offending step value.
        step: f64,
    },
    /// A Cramér–Rao bound was requested for non-positive Fisher information.
    #[error("Fisher information {fisher} is not positive; the parameter is not locally identifiable")]
    Unidentifiable {
        /// The offending Fisher information.
        fisher: f64,
    },
    /// Zero measurements cannot bound an estimator variance.
    #[error("measurement count must be at least 1")]
    ZeroMeasurements,
    /// Monte-Carlo settings were degenerate.
    #[error("{what}")]
    BadMonteCarlo {
        /// Description of the offending setting.
        what: &'static str,
    },
    /// Underlying circuit error (non-finite phase, register bounds).
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Fisher information at a single phase value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherResult {
    /// Phase the information was evaluated at (radians).
    pub phi: f64,
    /// Classical Fisher information, non-negative.
    pub fisher: f64,
    /// Finite-difference half-step used for the probability derivatives.
    pub derivative_step: f64,
}

/// Score statistic for one outcome: s(m) = d/dφ ln p(m|φ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreSample {
    /// Outcome statistic m = (#1s − #0s).
    pub m: i32,
    /// Score value (dp_m/dφ)/p_m.
    pub score: f64,
}

/// Spread of the maximum-likelihood-style estimator over repeated
/// finite-shot experiments, produced by [`sampled_estimator_variance`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorSpread {
    /// Mean of the per-repetition estimates (radians).
    pub mean: f64,
    /// Unbiased sample variance of the per-repetition estimates.
    pub variance: f64,
}

fn check_step(h: f64) -> Result<(), FisherError> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(FisherError::BadStep { step: h })
    }
}

/// Central-difference derivatives (p(m|φ+h) − p(m|φ−h)) / (2h), one entry per
/// outcome in ascending m order.
///
/// `h` must be positive and finite; values at or below 1e-3 keep the O(h²)
/// truncation error negligible against the tolerances used in this crate.
pub fn prob_derivatives(model: &RamseyModel, phi: f64, h: f64) -> Result<Vec<f64>, FisherError> {
    check_step(h)?;
    let encoded = model.encoded_state();
    let plus = model.distribution_from_encoded(&encoded, phi + h)?;
    let minus = model.distribution_from_encoded(&encoded, phi - h)?;
    Ok(plus
        .as_slice()
        .iter()
        .zip(minus.as_slice())
        .map(|(p, q)| (p - q) / (2.0 * h))
        .collect())
}

/// Classical Fisher information F(φ) = Σ_m (dp_m/dφ)²/p_m, with outcomes below
/// [`PROBABILITY_FLOOR`] excluded from the sum.
pub fn fisher_information(
    model: &RamseyModel,
    phi: f64,
    h: f64,
) -> Result<FisherResult, FisherError> {
    let derivs = prob_derivatives(model, phi, h)?;
    let dist = crate::ramsey::outcome_distribution(model, phi)?;
    let fisher: f64 = dist
        .as_slice()
        .iter()
        .zip(&derivs)
        .filter(|(p, _)| **p >= PROBABILITY_FLOOR)
        .map(|(p, d)| d * d / p)
        .sum();
    Ok(FisherResult { phi, fisher, derivative_step: h })
}

/// Score statistic s(m) = (dp_m/dφ)/p_m for every outcome whose probability is
/// at least [`PROBABILITY_FLOOR`]; below-floor outcomes are omitted.
pub fn score(model: &RamseyModel, phi: f64, h: f64) -> Result<Vec<ScoreSample>, FisherError> {
    let derivs = prob_derivatives(model, phi, h)?;
    let dist = crate::ramsey::outcome_distribution(model, phi)?;
    Ok(dist
        .iter()
        .zip(&derivs)
        .filter(|((_, p), _)| *p >= PROBABILITY_FLOOR)
        .map(|((m, p), d)| ScoreSample { m, score: d / p })
        .collect())
}

/// Cramér–Rao bound 1/(N·F) on the variance of an unbiased estimator over
/// `n_measurements` independent measurements.
///
/// Fails when `fisher` is not strictly positive (the parameter is not locally
/// identifiable from the distribution) or when `n_measurements` is zero.
pub fn cramer_rao_bound(fisher: f64, n_measurements: usize) -> Result<f64, FisherError> {
    if n_measurements == 0 {
        return Err(FisherError::ZeroMeasurements);
    }
    if fisher <= 0.0 || !fisher.is_finite() {
        return Err(FisherError::Unidentifiable { fisher });
    }
    Ok(1.0 / (n_measurements as f64 * fisher))
}

/// Draw one multinomial sample of `shots` outcomes from `dist` and return the
/// per-outcome counts (indexed like `dist.as_slice()`).
fn sample_counts(dist: &OutcomeDistribution, shots: usize, rng: &mut ChaCha8Rng) -> Vec<u64> {
    let probs = dist.as_slice();
    let mut counts = vec![0u64; probs.len()];
    for _ in 0..shots {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut chosen = probs.len() - 1;
        for (k, p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                chosen = k;
                break;
            }
        }
        counts[chosen] += 1;
    }
    counts
}

/// Variance of a maximum-likelihood-style estimator over repeated finite-shot
/// experiments, for comparison against the Cramér–Rao bound.
///
/// Each repetition draws `shots` outcomes from p(m|φ) and estimates the phase
/// by maximising the multinomial log-likelihood Σ_m count_m·ln p(m|φ′) over a
/// uniform grid of [`ESTIMATOR_GRID_POINTS`] candidate phases spanning
/// φ ± [`ESTIMATOR_GRID_HALF_WIDTH`]. The grid pitch (5·10⁻⁴ rad) is far below
/// the shot-noise scale of the experiments this supports, so quantisation does
/// not distort the variance. All randomness derives from `seed`; equal inputs
/// give bitwise-equal results.
pub fn sampled_estimator_variance(
    model: &RamseyModel,
    phi: f64,
    shots: usize,
    repetitions: usize,
    seed: u64,
) -> Result<EstimatorSpread, FisherError> {
    if shots == 0 {
        return Err(FisherError::BadMonteCarlo { what: "shots must be at least 1" });
    }
    if repetitions < 2 {
        return Err(FisherError::BadMonteCarlo {
            what: "variance needs at least 2 repetitions",
        });
    }
    let encoded = model.encoded_state();
    let truth = model.distribution_from_encoded(&encoded, phi)?;

    // Log-likelihood table over the candidate grid, one row per grid phase.
    let step = 2.0 * ESTIMATOR_GRID_HALF_WIDTH / (ESTIMATOR_GRID_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..ESTIMATOR_GRID_POINTS)
        .map(|i| phi - ESTIMATOR_GRID_HALF_WIDTH + i as f64 * step)
        .collect();
    let mut log_probs = Vec::with_capacity(grid.len());
    for &candidate in &grid {
        let dist = model.distribution_from_encoded(&encoded, candidate)?;
        log_probs.push(
            dist.as_slice()
                .iter()
                .map(|p| p.max(PROBABILITY_FLOOR).ln())
                .collect::<Vec<f64>>(),
        );
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut estimates = Vec::with_capacity(repetitions);
    for _ in 0..repetitions {
        let counts = sample_counts(&truth, shots, &mut rng);
        let mut best = (f64::NEG_INFINITY, 0usize);
        for (i, row) in log_probs.iter().enumerate() {
            let ll: f64 = row.iter().zip(&counts).map(|(lp, c)| *c as f64 * lp).sum();
            if ll > best.0 {
                best = (ll, i);
            }
        }
        estimates.push(grid[best.1]);
    }

    let n = estimates.len() as f64;
    let mean = estimates.iter().sum::<f64>() / n;
    let variance = estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(EstimatorSpread { mean, variance })
}
