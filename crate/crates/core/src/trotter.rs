//! Hamiltonian time evolution: exact exponentials, first-order product
//! formulas, and Schatten-∞ error measurement.
//!
//! Exact evolution uses the Hermitian eigendecomposition H = V·diag(λ)·V†, so
//!
//! ```text
//! U(t) = e^{−iHt} = V·diag(e^{−iλ_j t})·V†        (ħ = 1)
//! ```
//!
//! computed by cyclic complex Jacobi sweeps (dimensions are at most
//! [`MAX_DIM`], where this is exact to tolerance and dependency-free). The
//! first-order product formula splits H = Σ_j H_j into
//!
//! ```text
//! e^{−iHt} ≈ (Π_j e^{−iH_j·t/steps})^steps,
//! ```
//!
//! whose accuracy is measured — not bounded — by the Schatten-∞ norm (largest
//! singular value) of the difference from the exact unitary. The quoted
//! analytic bound ‖H‖²T³/3·(T/N)^{2k−1} is reproduced verbatim by
//! [`paper_error_bound`] for reporting alongside the measured error; it is a
//! reporting artifact only and the measured error is not asserted against it.

use num_complex::Complex64;
use thiserror::Error;

/// Largest supported matrix dimension (6 qubits).
pub const MAX_DIM: usize = 64;

/// Hermiticity tolerance for operator construction.
const HERMITICITY_TOL: f64 = 1e-12;

/// Maximum Jacobi sweeps; cyclic Jacobi on Hermitian input converges
/// quadratically and needs far fewer at these dimensions.
const MAX_SWEEPS: usize = 64;

/// Errors from evolution and norm computations.
#[derive(Debug, Error)]
pub enum TrotterError {
    /// Dimension is zero, not a power of two, or above [`MAX_DIM`].
    #[error("matrix dimension {dim} must be a power of two between 1 and {MAX_DIM}")]
    BadDimension {
        /// The offending dimension.
        dim: usize,
    },
    /// Entry buffer length does not match the declared dimensions.
    #[error("expected {expected} entries for a {rows}×{cols} matrix, got {got}")]
    EntryCount {
        /// Declared row count.
        rows: usize,
        /// Declared column count.
        cols: usize,
        /// Required buffer length.
        expected: usize,
        /// Actual buffer length.
        got: usize,
    },
    /// A matrix entry was NaN or infinite.
    #[error("matrix entries must be finite")]
    NonFiniteEntry,
    /// Operator is not equal to its conjugate transpose.
    #[error("matrix is not Hermitian: entry ({row},{col}) deviates from the conjugate of ({col},{row}) by {deviation:e}")]
    NotHermitian {
        /// Row of the offending entry.
        row: usize,
        /// Column of the offending entry.
        col: usize,
        /// Magnitude of the Hermiticity violation.
        deviation: f64,
    },
    /// A matrix failed the unitarity check.
    #[error("matrix is not unitary: max |U†U − I| entry is {deviation:e}")]
    NotUnitary {
        /// Largest deviation of U†U from the identity.
        deviation: f64,
    },
    /// Pauli term list was empty.
    #[error("at least one Hamiltonian term is required")]
    EmptyTerms,
    /// A Pauli string was empty.
    #[error("Pauli strings must be non-empty")]
    EmptyString,
    /// Pauli strings in one term list differ in length.
    #[error("Pauli strings must all have the same length: term 0 has {expected}, term {term} has {got}")]
    InconsistentLengths {
        /// Index of the offending term.
        term: usize,
        /// Length of the first term's string.
        expected: usize,
        /// Length of the offending term's string.
        got: usize,
    },
    /// A Pauli string contained a character other than I, X, Y, Z.
    #[error("invalid Pauli character '{found}' in term {term} (expected I, X, Y, or Z)")]
    BadPauliChar {
        /// Index of the offending term.
        term: usize,
        /// The offending character.
        found: char,
    },
    /// A term coefficient was NaN or infinite.
    #[error("coefficient of term {term} must be finite")]
    NonFiniteCoefficient {
        /// Index of the offending term.
        term: usize,
    },
    /// Zero Trotter steps requested.
    #[error("step count must be at least 1")]
    ZeroSteps,
    /// Two matrices in one operation have different dimensions.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch {
        /// Dimension of the left operand.
        left: usize,
        /// Dimension of the right operand.
        right: usize,
    },
    /// A quantity that must be positive and finite was not.
    #[error("{what} must be positive and finite")]
    NonPositive {
        /// Name of the offending quantity.
        what: &'static str,
    },
    /// The Jacobi eigensolver failed to converge (should not occur for
    /// Hermitian input within the supported dimensions).
    #[error("eigensolver failed to converge in {MAX_SWEEPS} sweeps")]
    NoConvergence,
}

fn check_square(dim: usize, entries: &[Complex64]) -> Result<(), TrotterError> {
    if dim == 0 || !dim.is_power_of_two() || dim > MAX_DIM {
        return Err(TrotterError::BadDimension { dim });
    }
    if entries.len() != dim * dim {
        return Err(TrotterError::EntryCount {
            rows: dim,
            cols: dim,
            expected: dim * dim,
            got: entries.len(),
        });
    }
    if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(TrotterError::NonFiniteEntry);
    }
    Ok(())
}

/// Dense Hermitian matrix in energy units (ħ = 1), row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    dim: usize,
    entries: Vec<Complex64>,
}

impl HermitianOperator {
    /// Builds an operator from row-major entries, validating that the
    /// dimension is a power of two at most [`MAX_DIM`] and that the matrix
    /// equals its conjugate transpose within 1e-12.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self, TrotterError> {
        check_square(dim, &entries)?;
        for row in 0..dim {
            for col in row..dim {
                let deviation = (entries[row * dim + col]
                    - entries[col * dim + row].conj())
                .norm();
                if deviation > HERMITICITY_TOL {
                    return Err(TrotterError::NotHermitian { row, col, deviation });
                }
            }
        }
        Ok(Self { dim, entries })
    }

    /// Matrix dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Entry at (`row`, `col`).
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }
}

/// Dense unitary matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl UnitaryMatrix {
    /// Builds a unitary from row-major entries, validating U†U = I within 1e-9.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self, TrotterError> {
        check_square(dim, &entries)?;
        let candidate = Self { dim, entries };
        let deviation = candidate.unitarity_deviation();
        if deviation > 1e-9 {
            return Err(TrotterError::NotUnitary { deviation });
        }
        Ok(candidate)
    }

    fn from_parts(dim: usize, entries: Vec<Complex64>) -> Self {
        Self { dim, entries }
    }

    /// Identity matrix of the given dimension.
    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for k in 0..dim {
            entries[k * dim + k] = Complex64::new(1.0, 0.0);
        }
        Self { dim, entries }
    }

    /// Matrix dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Entry at (`row`, `col`).
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    /// Matrix product `self · other`.
    pub fn multiply(&self, other: &UnitaryMatrix) -> Result<UnitaryMatrix, TrotterError> {
        if self.dim != other.dim {
            return Err(TrotterError::DimensionMismatch { left: self.dim, right: other.dim });
        }
        Ok(Self::from_parts(self.dim, matmul(&self.entries, &other.entries, self.dim)))
    }

    /// Largest entrywise deviation of U†U from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += self.entries[k * n + i].conj() * self.entries[k * n + j];
                }
                let target = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
                worst = worst.max((acc - target).norm());
            }
        }
        worst
    }
}

/// One weighted Pauli string, e.g. 0.5·"XZI".
///
/// String positions follow bitstring rendering: the leftmost character acts on
/// the highest-indexed qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    /// Real weight of the Pauli string.
    pub coefficient: f64,
    /// Pauli string over I, X, Y, Z.
    pub string: String,
}

impl PauliTerm {
    /// Convenience constructor.
    pub fn new(coefficient: f64, string: impl Into<String>) -> Self {
        Self { coefficient, string: string.into() }
    }
}

fn pauli_matrix(ch: char) -> Option<[Complex64; 4]> {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match ch {
        'I' => Some([l, o, o, l]),
        'X' => Some([o, l, l, o]),
        'Y' => Some([o, -i, i, o]),
        'Z' => Some([l, o, o, -l]),
        _ => None,
    }
}

fn kron(a: &[Complex64], a_dim: usize, b: &[Complex64], b_dim: usize) -> Vec<Complex64> {
    let dim = a_dim * b_dim;
    let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
    for ia in 0..a_dim {
        for ja in 0..a_dim {
            let scale = a[ia * a_dim + ja];
            for ib in 0..b_dim {
                for jb in 0..b_dim {
                    out[(ia * b_dim + ib) * dim + (ja * b_dim + jb)] =
                        scale * b[ib * b_dim + jb];
                }
            }
        }
    }
    out
}

fn validate_terms(terms: &[PauliTerm]) -> Result<usize, TrotterError> {
    let first = terms.first().ok_or(TrotterError::EmptyTerms)?;
    let n_qubits = first.string.chars().count();
    if n_qubits == 0 {
        return Err(TrotterError::EmptyString);
    }
    for (index, term) in terms.iter().enumerate() {
        let len = term.string.chars().count();
        if len != n_qubits {
            return Err(TrotterError::InconsistentLengths {
                term: index,
                expected: n_qubits,
                got: len,
            });
        }
        if !term.coefficient.is_finite() {
            return Err(TrotterError::NonFiniteCoefficient { term: index });
        }
        if let Some(found) = term.string.chars().find(|c| pauli_matrix(*c).is_none()) {
            return Err(TrotterError::BadPauliChar { term: index, found });
        }
    }
    let dim = 1usize << n_qubits;
    if dim > MAX_DIM {
        return Err(TrotterError::BadDimension { dim });
    }
    Ok(dim)
}

fn term_matrix(term: &PauliTerm, dim: usize) -> Vec<Complex64> {
    let mut matrix = vec![Complex64::new(term.coefficient, 0.0)];
    let mut built = 1usize;
    for ch in term.string.chars() {
        let factor = pauli_matrix(ch).expect("validated");
        matrix = kron(&matrix, built, &factor, 2);
        built *= 2;
    }
    debug_assert_eq!(built, dim);
    matrix
}

/// Builds Σ_j c_j·P_j as a dense Hermitian operator.
///
/// All strings must share one length n with 2^n ≤ [`MAX_DIM`]; the leftmost
/// character of each string acts on the highest-indexed qubit.
pub fn pauli_sum(terms: &[PauliTerm]) -> Result<HermitianOperator, TrotterError> {
    let dim = validate_terms(terms)?;
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    for term in terms {
        for (slot, value) in entries.iter_mut().zip(term_matrix(term, dim)) {
            *slot += value;
        }
    }
    HermitianOperator::new(dim, entries)
}

fn matmul(a: &[Complex64], b: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik.re == 0.0 && aik.im == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}

fn frobenius_norm(entries: &[Complex64]) -> f64 {
    entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi sweeps.
/// Returns eigenvalues and the column-major-equivalent eigenvector matrix V
/// (row-major storage; column k is eigenvector k) with A = V·diag(λ)·V†.
fn eigendecompose(
    dim: usize,
    entries: &[Complex64],
) -> Result<(Vec<f64>, Vec<Complex64>), TrotterError> {
    let n = dim;
    let mut a = entries.to_vec();
    let mut v = UnitaryMatrix::identity(n).entries.clone();
    let tol = HERMITICITY_TOL * frobenius_norm(entries).max(1.0);

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += 2.0 * a[p * n + q].norm_sqr();
            }
        }
        if off.sqrt() <= tol {
            let eigenvalues = (0..n).map(|k| a[k * n + k].re).collect();
            return Ok((eigenvalues, v));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                // Phase that makes the pivot real, then a standard real
                // Jacobi rotation on the (p,q) block.
                let phase = apq / r;
                let tau = (a[q * n + q].re - a[p * n + p].re) / (2.0 * r);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    tau.signum() / (tau.abs() + (tau * tau + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let sp = s * phase;
                let spc = s * phase.conj();
                // Column update A ← A·J, shared by the eigenvector matrix.
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - spc * akq;
                    a[k * n + q] = sp * akp + c * akq;
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - spc * vkq;
                    v[k * n + q] = sp * vkp + c * vkq;
                }
                // Row update A ← J†·A.
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - sp * aqk;
                    a[q * n + k] = spc * apk + c * aqk;
                }
                // The rotation zeroes the pivot analytically.
                a[p * n + q] = Complex64::new(0.0, 0.0);
                a[q * n + p] = Complex64::new(0.0, 0.0);
            }
        }
    }
    Err(TrotterError::NoConvergence)
}

/// Exact time evolution U(t) = e^{−iHt} via the eigendecomposition
/// U = V·diag(e^{−iλ_j t})·V†.
pub fn exact_evolution(hamiltonian: &HermitianOperator, t: f64) -> Result<UnitaryMatrix, TrotterError> {
    if !t.is_finite() {
        return Err(TrotterError::NonPositive { what: "evolution time" });
    }
    let n = hamiltonian.dim;
    let (eigenvalues, v) = eigendecompose(n, &hamiltonian.entries)?;
    let phases: Vec<Complex64> =
        eigenvalues.iter().map(|lambda| Complex64::from_polar(1.0, -lambda * t)).collect();
    // U = (V·D)·V†, assembled without forming V† explicitly.
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for k in 0..n {
            let scaled = v[i * n + k] * phases[k];
            for j in 0..n {
                out[i * n + j] += scaled * v[j * n + k].conj();
            }
        }
    }
    Ok(UnitaryMatrix::from_parts(n, out))
}

/// First-order product formula (Π_j e^{−iH_j·t/steps})^steps, with the term
/// product taken in list order on each step.
pub fn trotter_first_order(
    terms: &[PauliTerm],
    t: f64,
    steps: usize,
) -> Result<UnitaryMatrix, TrotterError> {
    if steps == 0 {
        return Err(TrotterError::ZeroSteps);
    }
    let dim = validate_terms(terms)?;
    if !t.is_finite() {
        return Err(TrotterError::NonPositive { what: "evolution time" });
    }
    let dt = t / steps as f64;
    let mut step_unitary = UnitaryMatrix::identity(dim);
    for term in terms {
        let h_j = pauli_sum(std::slice::from_ref(term))?;
        step_unitary = step_unitary.multiply(&exact_evolution(&h_j, dt)?)?;
    }
    let mut result = UnitaryMatrix::identity(dim);
    for _ in 0..steps {
        result = result.multiply(&step_unitary)?;
    }
    Ok(result)
}

/// Schatten-∞ norm (largest singular value) of a dense `rows`×`cols` matrix,
/// computed exactly from the eigenvalues of M†M (dimensions at most
/// [`MAX_DIM`]).
pub fn schatten_inf_norm(
    entries: &[Complex64],
    rows: usize,
    cols: usize,
) -> Result<f64, TrotterError> {
    if rows == 0 || cols == 0 || rows > MAX_DIM || cols > MAX_DIM {
        return Err(TrotterError::BadDimension { dim: rows.max(cols) });
    }
    if entries.len() != rows * cols {
        return Err(TrotterError::EntryCount {
            rows,
            cols,
            expected: rows * cols,
            got: entries.len(),
        });
    }
    if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(TrotterError::NonFiniteEntry);
    }
    // Gram matrix G = M†M, assembled Hermitian by construction.
    let mut gram = vec![Complex64::new(0.0, 0.0); cols * cols];
    for i in 0..cols {
        for j in i..cols {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..rows {
                acc += entries[k * cols + i].conj() * entries[k * cols + j];
            }
            gram[i * cols + j] = acc;
            gram[j * cols + i] = acc.conj();
        }
    }
    let (eigenvalues, _) = eigendecompose(cols, &gram)?;
    let largest = eigenvalues.into_iter().fold(0.0f64, f64::max);
    Ok(largest.max(0.0).sqrt())
}

/// Schatten-∞ norm of the difference between an exact and an approximate
/// evolution operator.
pub fn simulation_error(
    exact: &UnitaryMatrix,
    approx: &UnitaryMatrix,
) -> Result<f64, TrotterError> {
    if exact.dim != approx.dim {
        return Err(TrotterError::DimensionMismatch { left: exact.dim, right: approx.dim });
    }
    let diff: Vec<Complex64> =
        exact.entries.iter().zip(&approx.entries).map(|(a, b)| a - b).collect();
    schatten_inf_norm(&diff, exact.dim, exact.dim)
}

/// The quoted analytic error bound ‖H‖²·T³/3 · (T/n_blocks)^{2k−1}, evaluated
/// verbatim as a reporting artifact.
///
/// The expression is not a valid bound on the measured first-order error (its
/// time and block scaling disagree with the standard Lie product formula
/// analysis), so callers report it next to the measured error rather than
/// asserting against it.
pub fn paper_error_bound(
    h_norm: f64,
    total_time: f64,
    n_blocks: usize,
    order: usize,
) -> Result<f64, TrotterError> {
    if h_norm <= 0.0 || !h_norm.is_finite() {
        return Err(TrotterError::NonPositive { what: "Hamiltonian norm" });
    }
    if total_time <= 0.0 || !total_time.is_finite() {
        return Err(TrotterError::NonPositive { what: "total time" });
    }
    if n_blocks == 0 {
        return Err(TrotterError::NonPositive { what: "block count" });
    }
    if order == 0 {
        return Err(TrotterError::NonPositive { what: "formula order" });
    }
    let exponent = (2 * order - 1) as i32;
    Ok(h_norm * h_norm * total_time.powi(3) / 3.0
        * (total_time / n_blocks as f64).powi(exponent))
}

/// Splitting of a total evolution time into equal blocks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeBlockPlan {
    /// Total evolution time T.
    pub total_time: f64,
    /// Number of equal blocks the time is split into.
    pub n_blocks: usize,
    /// Product-formula order parameter k (only k = 1 has an implemented
    /// product formula; larger k enters [`paper_error_bound`] numerically).
    pub order: usize,
}

impl TimeBlockPlan {
    /// Validates T > 0 finite, n_blocks ≥ 1, order ≥ 1.
    pub fn new(total_time: f64, n_blocks: usize, order: usize) -> Result<Self, TrotterError> {
        if total_time <= 0.0 || !total_time.is_finite() {
            return Err(TrotterError::NonPositive { what: "total time" });
        }
        if n_blocks == 0 {
            return Err(TrotterError::NonPositive { what: "block count" });
        }
        if order == 0 {
            return Err(TrotterError::NonPositive { what: "formula order" });
        }
        Ok(Self { total_time, n_blocks, order })
    }

    /// Per-block time δt = T / n_blocks.
    pub fn dt(&self) -> f64 {
        self.total_time / self.n_blocks as f64
    }
}
