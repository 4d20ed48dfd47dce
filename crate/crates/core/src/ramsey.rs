//! Variational Ramsey interferometer: encoder block, phase imprint, decoder
//! block, and the measurement statistic used for phase estimation.
//!
//! A model holds two trainable blocks. Each block is `depth` layers; one
//! layer applies RotY then RotZ to every qubit and finishes with the CNOT
//! chain `0→1, 1→2, ...`. Within a layer, `angles[2q]` is the RotY angle and
//! `angles[2q + 1]` the RotZ angle of qubit `q`; blocks consume their angle
//! vector layer by layer.
//!
//! Between the blocks, the unknown phase `φ` is imprinted as RotZ(φ) on every
//! qubit, so a basis state of Hamming weight `w` picks up `e^{-iφ(n/2 - w)}`.
//!
//! Measuring all qubits yields the statistic `m = (#1s) - (#0s)`, taking the
//! `n + 1` values `{-n, -n+2, ..., n}`. The scalar estimator is `φ̂(m) = a·m`
//! with trainable gain `a`.

use crate::state::{GateSpec, StateError, StateVector};
use thiserror::Error;

/// Errors from model construction and circuit evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    /// Angle vector length does not equal `depth × layer_width(n)`.
    #[error("block expects {expected} angles ({depth} layers × width {width}), got {got}")]
    AngleCount { expected: usize, got: usize, depth: usize, width: usize },
    /// An angle, phase, or gain was NaN or infinite.
    #[error("{what} must be finite")]
    NonFinite { what: &'static str },
    /// Outcome outside `{-n, -n+2, ..., n}`.
    #[error("outcome m={m} is not reachable on {n_qubits} qubits")]
    InvalidOutcome { m: i32, n_qubits: usize },
    /// Underlying register error (size bounds, bad targets).
    #[error(transparent)]
    State(#[from] StateError),
}

/// Trainable angles per layer: RotY + RotZ on each of `n` qubits.
pub fn layer_width(n_qubits: usize) -> usize {
    2 * n_qubits
}

/// A parameterized Ramsey interferometer with scalar readout gain.
#[derive(Debug, Clone, PartialEq)]
pub struct RamseyModel {
    n_qubits: usize,
    ec_depth: usize,
    dc_depth: usize,
    theta_ec: Vec<f64>,
    theta_dc: Vec<f64>,
    a: f64,
}

impl RamseyModel {
    /// Builds a model, checking angle-vector lengths and finiteness.
    pub fn new(
        n_qubits: usize,
        ec_depth: usize,
        dc_depth: usize,
        theta_ec: Vec<f64>,
        theta_dc: Vec<f64>,
        a: f64,
    ) -> Result<Self, ModelError> {
        // Probe register construction early so size errors surface here.
        StateVector::zero(n_qubits)?;
        let width = layer_width(n_qubits);
        for (depth, angles) in [(ec_depth, &theta_ec), (dc_depth, &theta_dc)] {
            let expected = depth * width;
            if angles.len() != expected {
                return Err(ModelError::AngleCount { expected, got: angles.len(), depth, width });
            }
            if angles.iter().any(|a| !a.is_finite()) {
                return Err(ModelError::NonFinite { what: "block angle" });
            }
        }
        if !a.is_finite() {
            return Err(ModelError::NonFinite { what: "estimator gain" });
        }
        Ok(Self { n_qubits, ec_depth, dc_depth, theta_ec, theta_dc, a })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn ec_depth(&self) -> usize {
        self.ec_depth
    }

    pub fn dc_depth(&self) -> usize {
        self.dc_depth
    }

    pub fn theta_ec(&self) -> &[f64] {
        &self.theta_ec
    }

    pub fn theta_dc(&self) -> &[f64] {
        &self.theta_dc
    }

    /// Readout gain of the estimator `φ̂(m) = a·m`.
    pub fn gain(&self) -> f64 {
        self.a
    }

    /// Number of trainable angles across both blocks (gain excluded).
    pub fn angle_count(&self) -> usize {
        self.theta_ec.len() + self.theta_dc.len()
    }

    /// Copy of the model with flat angle index `i` shifted by `delta`.
    ///
    /// Indices `0..theta_ec.len()` address the encoder block, the rest the
    /// decoder block; this is the hook gradient code uses for angle shifts.
    pub fn with_shifted_angle(&self, index: usize, delta: f64) -> Self {
        let mut next = self.clone();
        if index < next.theta_ec.len() {
            next.theta_ec[index] += delta;
        } else {
            let j = index - next.theta_ec.len();
            next.theta_dc[j] += delta;
        }
        next
    }

    /// Applies one descent step: angles and gain move by the given deltas.
    pub fn apply_step(&mut self, angle_deltas: &[f64], a_delta: f64) -> Result<(), ModelError> {
        if angle_deltas.len() != self.angle_count() {
            return Err(ModelError::AngleCount {
                expected: self.angle_count(),
                got: angle_deltas.len(),
                depth: self.ec_depth + self.dc_depth,
                width: layer_width(self.n_qubits),
            });
        }
        let split = self.theta_ec.len();
        for (t, d) in self.theta_ec.iter_mut().zip(&angle_deltas[..split]) {
            *t += d;
        }
        for (t, d) in self.theta_dc.iter_mut().zip(&angle_deltas[split..]) {
            *t += d;
        }
        self.a += a_delta;
        Ok(())
    }

    /// State after the encoder block on `|0...0>`; φ-independent, so callers
    /// evaluating many phases compute it once.
    pub fn encoded_state(&self) -> StateVector {
        let mut st = StateVector::zero(self.n_qubits).expect("validated at construction");
        block_mut(&mut st, &self.theta_ec, self.ec_depth).expect("validated at construction");
        st
    }

    /// Outcome distribution for a given phase, reusing a precomputed encoder
    /// state (must come from `self.encoded_state()`).
    pub(crate) fn distribution_from_encoded(
        &self,
        encoded: &StateVector,
        phi: f64,
    ) -> Result<OutcomeDistribution, ModelError> {
        if !phi.is_finite() {
            return Err(ModelError::NonFinite { what: "phase" });
        }
        let mut st = encoded.clone();
        for q in 0..self.n_qubits {
            st.apply_mut(&GateSpec::rot_z(q, phi))?;
        }
        block_mut(&mut st, &self.theta_dc, self.dc_depth)?;
        let mut probs = vec![0.0; self.n_qubits + 1];
        for (k, amp) in st.amplitudes().iter().enumerate() {
            probs[k.count_ones() as usize] += amp.norm_sqr();
        }
        Ok(OutcomeDistribution { n_qubits: self.n_qubits, probs })
    }
}

/// In-place layer application shared by the public block routine and the
/// model's hot path.
fn block_mut(state: &mut StateVector, angles: &[f64], depth: usize) -> Result<(), ModelError> {
    let n = state.n_qubits();
    let width = layer_width(n);
    let expected = depth * width;
    if angles.len() != expected {
        return Err(ModelError::AngleCount { expected, got: angles.len(), depth, width });
    }
    if angles.iter().any(|a| !a.is_finite()) {
        return Err(ModelError::NonFinite { what: "block angle" });
    }
    for layer in angles.chunks_exact(width.max(1)).take(depth) {
        for q in 0..n {
            state.apply_mut(&GateSpec::rot_y(q, layer[2 * q]))?;
            state.apply_mut(&GateSpec::rot_z(q, layer[2 * q + 1]))?;
        }
        for q in 0..n.saturating_sub(1) {
            state.apply_mut(&GateSpec::cnot(q, q + 1))?;
        }
    }
    Ok(())
}

/// Applies `depth` variational layers to a state.
///
/// `angles` must hold exactly `depth × layer_width(n)` finite values, laid
/// out layer-major as described in the module docs.
pub fn apply_variational_block(
    state: &StateVector,
    angles: &[f64],
    depth: usize,
) -> Result<StateVector, ModelError> {
    let mut next = state.clone();
    block_mut(&mut next, angles, depth)?;
    Ok(next)
}

/// Imprints the unknown phase: RotZ(φ) on every qubit.
pub fn apply_phase_imprint(state: &StateVector, phi: f64) -> Result<StateVector, ModelError> {
    if !phi.is_finite() {
        return Err(ModelError::NonFinite { what: "phase" });
    }
    let mut next = state.clone();
    for q in 0..state.n_qubits() {
        next.apply_mut(&GateSpec::rot_z(q, phi))?;
    }
    Ok(next)
}

/// Probabilities of the statistic `m = (#1s) - (#0s)` over the `n + 1`
/// reachable values, ascending from `-n` to `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    n_qubits: usize,
    /// Index `w` holds the probability of Hamming weight `w`, i.e. of
    /// `m = 2w - n`.
    probs: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// The reachable outcomes `-n, -n+2, ..., n` in ascending order.
    pub fn m_values(&self) -> Vec<i32> {
        let n = self.n_qubits as i32;
        (0..=n).map(|w| 2 * w - n).collect()
    }

    /// Probability of outcome `m`, or `None` if `m` is unreachable.
    pub fn prob_of_m(&self, m: i32) -> Option<f64> {
        let w = weight_of_outcome(m, self.n_qubits)?;
        Some(self.probs[w])
    }

    /// `(m, probability)` pairs in ascending `m`.
    pub fn iter(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        let n = self.n_qubits as i32;
        self.probs.iter().enumerate().map(move |(w, &p)| (2 * w as i32 - n, p))
    }

    /// Probabilities indexed by Hamming weight (`m = 2w - n`).
    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }
}

/// Hamming weight for outcome `m` on `n` qubits; `None` when `m` has the
/// wrong parity or magnitude.
fn weight_of_outcome(m: i32, n_qubits: usize) -> Option<usize> {
    let n = n_qubits as i32;
    if m.abs() > n || (m + n) % 2 != 0 {
        return None;
    }
    Some(((m + n) / 2) as usize)
}

/// The statistic `m = (#1s) - (#0s)` of a bitstring; `None` if any character
/// is not `0`/`1`.
pub fn m_statistic(bits: &str) -> Option<i32> {
    let mut m = 0i32;
    for b in bits.bytes() {
        match b {
            b'0' => m -= 1,
            b'1' => m += 1,
            _ => return None,
        }
    }
    Some(m)
}

/// Exact outcome distribution of the full interferometer at phase `phi`.
pub fn outcome_distribution(model: &RamseyModel, phi: f64) -> Result<OutcomeDistribution, ModelError> {
    model.distribution_from_encoded(&model.encoded_state(), phi)
}

/// The scalar estimate `φ̂(m) = a·m`; rejects unreachable outcomes.
pub fn estimate(model: &RamseyModel, m: i32) -> Result<f64, ModelError> {
    if weight_of_outcome(m, model.n_qubits).is_none() {
        return Err(ModelError::InvalidOutcome { m, n_qubits: model.n_qubits });
    }
    Ok(model.a * m as f64)
}

/// Mean-squared error of the estimator at a single phase:
/// `Σ_m (a·m - φ)² p(m|φ)`.
pub fn mse_at_phi(model: &RamseyModel, phi: f64) -> Result<f64, ModelError> {
    let dist = outcome_distribution(model, phi)?;
    Ok(mse_from_distribution(model.gain(), &dist, phi))
}

/// MSE from an already-computed distribution; shared with the training loop.
pub(crate) fn mse_from_distribution(gain: f64, dist: &OutcomeDistribution, phi: f64) -> f64 {
    dist.iter()
        .map(|(m, p)| {
            let err = gain * m as f64 - phi;
            err * err * p
        })
        .sum()
}
