//! Dense statevector simulation for registers of 1 to 10 qubits.
//!
//! A register of `n` qubits stores all `2^n` complex amplitudes. Amplitude
//! index `k` encodes the basis state whose qubit `i` equals bit `i` of `k`,
//! i.e. qubit 0 is the least-significant bit. Rendered bitstrings put qubit
//! `n-1` leftmost, so on two qubits index 2 renders as `"10"`.
//!
//! Rotation gates follow the half-angle convention `R_P(θ) = exp(-iθP/2)`:
//!
//! ```text
//! RotX(θ) = [[cos θ/2, -i sin θ/2], [-i sin θ/2, cos θ/2]]
//! RotY(θ) = [[cos θ/2,   -sin θ/2], [sin θ/2,    cos θ/2]]
//! RotZ(θ) = diag(e^{-iθ/2}, e^{+iθ/2})
//! ```
//!
//! Every operation returns a new state; [`StateVector::apply_mut`] is the
//! documented in-place variant for hot loops that own their state.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Largest register the dense backend accepts (`2^10` amplitudes).
pub const MAX_QUBITS: usize = 10;

/// Errors from register construction, gate validation, and measurement.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    /// Register size outside `1..=MAX_QUBITS`.
    #[error("qubit count {n_qubits} outside supported range 1..={MAX_QUBITS}")]
    QubitCount { n_qubits: usize },
    /// Gate addressed a qubit the register does not have.
    #[error("target qubit {target} out of range for {n_qubits}-qubit register")]
    TargetOutOfRange { target: usize, n_qubits: usize },
    /// Two-qubit gate addressed the same qubit twice.
    #[error("control and target must differ (both {qubit})")]
    DuplicateTargets { qubit: usize },
    /// Rotation gate constructed without an angle.
    #[error("{kind:?} gate requires an angle")]
    MissingAngle { kind: GateKind },
    /// Non-rotation gate constructed with an angle.
    #[error("{kind:?} gate takes no angle")]
    UnexpectedAngle { kind: GateKind },
    /// Rotation angle was NaN or infinite.
    #[error("{kind:?} gate angle must be finite")]
    NonFiniteAngle { kind: GateKind },
    /// Binary operation over registers of different sizes.
    #[error("register size mismatch: {left} vs {right} qubits")]
    DimensionMismatch { left: usize, right: usize },
    /// Sampling requires at least one shot.
    #[error("shot count must be at least 1")]
    ZeroShots,
}

/// The gate alphabet understood by the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateKind {
    Hadamard,
    PauliX,
    RotX,
    RotY,
    RotZ,
    Cnot,
}

/// A gate instance: kind, optional angle, and the qubits it acts on.
///
/// Fields are public so callers (and tests) can describe any gate, including
/// invalid ones; validation happens when the gate is applied. For `Cnot`,
/// `targets[0]` is the control and `targets[1]` the target.
#[derive(Debug, Clone, PartialEq)]
pub struct GateSpec {
    pub kind: GateKind,
    pub angle: Option<f64>,
    pub targets: Vec<usize>,
}

impl GateSpec {
    pub fn hadamard(target: usize) -> Self {
        Self { kind: GateKind::Hadamard, angle: None, targets: vec![target] }
    }

    pub fn pauli_x(target: usize) -> Self {
        Self { kind: GateKind::PauliX, angle: None, targets: vec![target] }
    }

    pub fn rot_x(target: usize, angle: f64) -> Self {
        Self { kind: GateKind::RotX, angle: Some(angle), targets: vec![target] }
    }

    pub fn rot_y(target: usize, angle: f64) -> Self {
        Self { kind: GateKind::RotY, angle: Some(angle), targets: vec![target] }
    }

    pub fn rot_z(target: usize, angle: f64) -> Self {
        Self { kind: GateKind::RotZ, angle: Some(angle), targets: vec![target] }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self { kind: GateKind::Cnot, angle: None, targets: vec![control, target] }
    }

    /// The gate's unitary matrix, row-major.
    ///
    /// Single-qubit gates return a 2x2 matrix. `Cnot` returns a 4x4 matrix in
    /// the local basis where bit 0 is the control and bit 1 the target.
    /// Fails with the same validation errors as application.
    pub fn matrix(&self) -> Result<Vec<Complex64>, StateError> {
        self.validate_shape()?;
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Ok(match self.kind {
            GateKind::Hadamard => {
                let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                vec![h, h, h, -h]
            }
            GateKind::PauliX => vec![zero, one, one, zero],
            GateKind::RotX => {
                let half = self.angle.expect("validated") / 2.0;
                let c = Complex64::new(half.cos(), 0.0);
                let s = Complex64::new(0.0, -half.sin());
                vec![c, s, s, c]
            }
            GateKind::RotY => {
                let half = self.angle.expect("validated") / 2.0;
                let c = Complex64::new(half.cos(), 0.0);
                let s = Complex64::new(half.sin(), 0.0);
                vec![c, -s, s, c]
            }
            GateKind::RotZ => {
                let half = self.angle.expect("validated") / 2.0;
                let lo = Complex64::from_polar(1.0, -half);
                let hi = Complex64::from_polar(1.0, half);
                vec![lo, zero, zero, hi]
            }
            // Local index = (target_bit << 1) | control_bit: control set
            // swaps the target pair (rows 1 and 3).
            GateKind::Cnot => vec![
                one, zero, zero, zero,
                zero, zero, zero, one,
                zero, zero, one, zero,
                zero, one, zero, zero,
            ],
        })
    }

    /// Checks angle presence and target multiplicity, not register bounds.
    fn validate_shape(&self) -> Result<(), StateError> {
        let rotation = matches!(self.kind, GateKind::RotX | GateKind::RotY | GateKind::RotZ);
        match (rotation, self.angle) {
            (true, None) => return Err(StateError::MissingAngle { kind: self.kind }),
            (false, Some(_)) => return Err(StateError::UnexpectedAngle { kind: self.kind }),
            (true, Some(a)) if !a.is_finite() => {
                return Err(StateError::NonFiniteAngle { kind: self.kind })
            }
            _ => {}
        }
        if self.kind == GateKind::Cnot && self.targets.len() == 2 && self.targets[0] == self.targets[1]
        {
            return Err(StateError::DuplicateTargets { qubit: self.targets[0] });
        }
        Ok(())
    }
}

/// Exact probabilities of every measurement outcome of a register.
///
/// Conceptually a map from n-bit strings to probabilities; stored densely and
/// iterated in index order. Probabilities are non-negative and sum to 1
/// within accumulated rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct BitstringDistribution {
    n_qubits: usize,
    probs: Vec<f64>,
}

impl BitstringDistribution {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Probability of basis index `k` (bit `i` of `k` = qubit `i`).
    pub fn prob_of_index(&self, index: usize) -> f64 {
        self.probs[index]
    }

    /// Probability of a rendered bitstring such as `"01"`; `None` if the
    /// string is not `n` characters of `0`/`1`.
    pub fn prob(&self, bits: &str) -> Option<f64> {
        if bits.len() != self.n_qubits || !bits.bytes().all(|b| b == b'0' || b == b'1') {
            return None;
        }
        let index = usize::from_str_radix(bits, 2).ok()?;
        Some(self.probs[index])
    }

    /// `(bitstring, probability)` pairs in basis-index order.
    pub fn iter(&self) -> impl Iterator<Item = (String, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(|(k, &p)| (format_bitstring(k, self.n_qubits), p))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }
}

/// Renders basis index `k` with qubit `n-1` leftmost and qubit 0 rightmost.
pub fn format_bitstring(index: usize, n_qubits: usize) -> String {
    (0..n_qubits)
        .rev()
        .map(|q| if (index >> q) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Dense state of an `n`-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The all-zeros computational basis state `|0...0>`.
    pub fn zero(n_qubits: usize) -> Result<Self, StateError> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(StateError::QubitCount { n_qubits });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Euclidean norm; 1 within rounding for any gate-evolved state.
    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Applies a gate, returning the evolved state and leaving `self` intact.
    pub fn apply_gate(&self, gate: &GateSpec) -> Result<Self, StateError> {
        let mut next = self.clone();
        next.apply_mut(gate)?;
        Ok(next)
    }

    /// In-place gate application for callers that own their state; identical
    /// semantics to [`StateVector::apply_gate`]. On error the state is
    /// unchanged.
    pub fn apply_mut(&mut self, gate: &GateSpec) -> Result<(), StateError> {
        gate.validate_shape()?;
        for &t in &gate.targets {
            if t >= self.n_qubits {
                return Err(StateError::TargetOutOfRange { target: t, n_qubits: self.n_qubits });
            }
        }
        match gate.kind {
            GateKind::Cnot => self.apply_cnot(gate.targets[0], gate.targets[1]),
            _ => {
                let m = gate.matrix().expect("shape validated");
                self.apply_single(gate.targets[0], [m[0], m[1], m[2], m[3]]);
            }
        }
        Ok(())
    }

    /// Multiplies the 2x2 matrix `u` (row-major) into qubit `target`.
    fn apply_single(&mut self, target: usize, u: [Complex64; 4]) {
        let step = 1 << target;
        let len = self.amps.len();
        let mut base = 0;
        while base < len {
            for off in 0..step {
                let j = base + off; // target bit clear
                let k = j + step; // target bit set
                let a = self.amps[j];
                let b = self.amps[k];
                self.amps[j] = u[0] * a + u[1] * b;
                self.amps[k] = u[2] * a + u[3] * b;
            }
            base += step << 1;
        }
    }

    /// Swaps the target-bit pair on every index whose control bit is set.
    fn apply_cnot(&mut self, control: usize, target: usize) {
        let cmask = 1 << control;
        let tmask = 1 << target;
        for i in 0..self.amps.len() {
            if i & cmask != 0 && i & tmask == 0 {
                self.amps.swap(i, i | tmask);
            }
        }
    }

    /// Exact outcome probabilities `|amp|^2` for all `2^n` bitstrings.
    pub fn measurement_distribution(&self) -> BitstringDistribution {
        BitstringDistribution {
            n_qubits: self.n_qubits,
            probs: self.amps.iter().map(|a| a.norm_sqr()).collect(),
        }
    }

    /// Draws `shots` bitstrings from the measurement distribution.
    ///
    /// Deterministic for a given `(state, shots, seed)` triple.
    pub fn sample_bitstrings(&self, shots: usize, seed: u64) -> Result<Vec<String>, StateError> {
        if shots == 0 {
            return Err(StateError::ZeroShots);
        }
        let probs = self.measurement_distribution();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(shots);
        for _ in 0..shots {
            let u: f64 = rng.gen();
            let mut acc = 0.0;
            let mut chosen = probs.as_slice().len() - 1;
            for (k, &p) in probs.as_slice().iter().enumerate() {
                acc += p;
                if u < acc {
                    chosen = k;
                    break;
                }
            }
            out.push(format_bitstring(chosen, self.n_qubits));
        }
        Ok(out)
    }

    /// `<self|other>` with conjugation on `self`.
    pub fn inner_product(&self, other: &Self) -> Result<Complex64, StateError> {
        if self.n_qubits != other.n_qubits {
            return Err(StateError::DimensionMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }
}
