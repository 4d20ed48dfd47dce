//! From-scratch single-layer LSTM baseline with backpropagation through time.
//!
//! The forecaster maps a sliding window of scalars to the next value:
//! window → LSTM(hidden = 32) → dense(1). Each step of the standard cell is
//!
//! ```text
//! i = σ(W_i x + U_i h + b_i)      f = σ(W_f x + U_f h + b_f)
//! g = tanh(W_g x + U_g h + b_g)   o = σ(W_o x + U_o h + b_o)
//! c ← f∘c + i∘g                   h ← o∘tanh(c)
//! ```
//!
//! with hidden and cell state starting at zero and the gate blocks stored in
//! [i, f, g, o] order. Training is plain mini-batch gradient descent on the
//! mean squared error of normalized targets, with gradients from full BPTT
//! over the window. The series is z-scored with statistics of the
//! chronological 90% training slice, and only windows whose target falls in
//! that slice are trained on. All randomness (weight initialisation, epoch
//! shuffles) derives from one seed.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Hidden width of the reference forecaster.
pub const LSTM_HIDDEN: usize = 32;

/// Default input window length.
pub const DEFAULT_WINDOW: usize = 120;

/// Errors from dataset preparation and training.
#[derive(Debug, Error)]
pub enum LstmError {
    /// Hidden width zero cannot form a cell.
    #[error("hidden width must be at least 1")]
    ZeroHidden,
    /// Window length zero cannot form inputs.
    #[error("window length must be at least 1")]
    ZeroWindow,
    /// Series has no room for a single window plus target.
    #[error("series of length {len} is too short for window {window} (needs at least window + 1 values)")]
    SeriesTooShort {
        /// Observed series length.
        len: usize,
        /// Requested window length.
        window: usize,
    },
    /// The training slice is constant, so z-scoring is undefined.
    #[error("training slice has zero variance; z-score normalization is undefined")]
    DegenerateSeries,
    /// No window's target falls inside the training slice.
    #[error("no training windows: every target falls outside the 90% training slice")]
    EmptyTrainingSet,
    /// Flat parameter vector has the wrong length.
    #[error("expected {expected} parameters for hidden width {hidden}, got {got}")]
    ParamCount {
        /// Hidden width the vector was checked against.
        hidden: usize,
        /// Required parameter count.
        expected: usize,
        /// Supplied parameter count.
        got: usize,
    },
    /// A training setting was degenerate.
    #[error("{what}")]
    BadConfig {
        /// Description of the offending setting.
        what: &'static str,
    },
    /// Training produced a non-finite loss.
    #[error("loss became non-finite in epoch {epoch}; lower the learning rate")]
    NonFiniteLoss {
        /// 1-based epoch in which the loss degenerated.
        epoch: usize,
    },
}

/// Sliding-window dataset with the normalization used to z-score it.
#[derive(Debug, Clone)]
pub struct WindowedDataset {
    window: usize,
    windows: Vec<(Vec<f64>, f64)>,
    train_count: usize,
    mean: f64,
    std: f64,
}

impl WindowedDataset {
    /// Window length of every input.
    pub fn window(&self) -> usize {
        self.window
    }

    /// All (input, target) windows in chronological order.
    pub fn windows(&self) -> &[(Vec<f64>, f64)] {
        &self.windows
    }

    /// Number of leading windows whose target lies in the training slice;
    /// training touches only these.
    pub fn train_count(&self) -> usize {
        self.train_count
    }

    /// (mean, standard deviation) of the training slice, used for z-scoring.
    pub fn normalization(&self) -> (f64, f64) {
        (self.mean, self.std)
    }

    /// Maps a raw series value to its z-score.
    pub fn normalize(&self, x: f64) -> f64 {
        (x - self.mean) / self.std
    }

    /// Maps a z-score back to the raw series scale.
    pub fn denormalize(&self, z: f64) -> f64 {
        z * self.std + self.mean
    }
}

/// Builds sliding windows of `window` values with next-step targets.
///
/// The chronological first 90% of the series (index < ⌊0.9·len⌋) is the
/// training slice; its mean and standard deviation z-score the whole series
/// before windowing. A series of length L yields L − window windows.
pub fn make_windows(series: &[f64], window: usize) -> Result<WindowedDataset, LstmError> {
    if window == 0 {
        return Err(LstmError::ZeroWindow);
    }
    if series.len() <= window {
        return Err(LstmError::SeriesTooShort { len: series.len(), window });
    }
    let split = series.len() * 9 / 10;
    let train = &series[..split.max(1)];
    let mean = train.iter().sum::<f64>() / train.len() as f64;
    let variance = train.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / train.len() as f64;
    let std = variance.sqrt();
    if std == 0.0 || !std.is_finite() {
        return Err(LstmError::DegenerateSeries);
    }
    let normalized: Vec<f64> = series.iter().map(|x| (x - mean) / std).collect();
    let windows: Vec<(Vec<f64>, f64)> = (0..series.len() - window)
        .map(|i| (normalized[i..i + window].to_vec(), normalized[i + window]))
        .collect();
    let train_count = split.saturating_sub(window);
    Ok(WindowedDataset { window, windows, train_count, mean, std })
}

/// Single-layer LSTM with a dense scalar head. Parameters are stored flat in
/// the order: input weights (4h), recurrent weights (4h×h, row-major), gate
/// biases (4h), dense weights (h), dense bias (1).
#[derive(Debug, Clone, PartialEq)]
pub struct LstmModel {
    hidden: usize,
    params: Vec<f64>,
}

/// Trainable parameter count: 4·hidden·(input + hidden + 1) + (hidden + 1)
/// with scalar input.
pub fn param_count(hidden: usize) -> Result<usize, LstmError> {
    if hidden == 0 {
        return Err(LstmError::ZeroHidden);
    }
    Ok(4 * hidden * (1 + hidden + 1) + hidden + 1)
}

impl LstmModel {
    /// Initialises all weights and biases uniformly in ±1/√hidden from the
    /// given seed.
    pub fn init(hidden: usize, seed: u64) -> Result<Self, LstmError> {
        Self::init_with_rng(hidden, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    fn init_with_rng(hidden: usize, rng: &mut ChaCha8Rng) -> Result<Self, LstmError> {
        let count = param_count(hidden)?;
        let scale = 1.0 / (hidden as f64).sqrt();
        let params = (0..count).map(|_| rng.gen_range(-scale..scale)).collect();
        Ok(Self { hidden, params })
    }

    /// Rebuilds a model from a flat parameter vector (see the struct docs for
    /// the layout).
    pub fn from_flat(hidden: usize, params: Vec<f64>) -> Result<Self, LstmError> {
        let expected = param_count(hidden)?;
        if params.len() != expected {
            return Err(LstmError::ParamCount { hidden, expected, got: params.len() });
        }
        Ok(Self { hidden, params })
    }

    /// Hidden width.
    pub fn hidden(&self) -> usize {
        self.hidden
    }

    /// Flat view of all trainable parameters.
    pub fn params_flat(&self) -> &[f64] {
        &self.params
    }

    /// Total trainable parameter count.
    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    /// Copy with one flat-indexed parameter shifted by `delta`.
    pub fn with_param_shifted(&self, index: usize, delta: f64) -> Self {
        let mut params = self.params.clone();
        params[index] += delta;
        Self { hidden: self.hidden, params }
    }

    // Flat-layout offsets.
    fn off_u(&self) -> usize {
        4 * self.hidden
    }
    fn off_b(&self) -> usize {
        self.off_u() + 4 * self.hidden * self.hidden
    }
    fn off_out(&self) -> usize {
        self.off_b() + 4 * self.hidden
    }
    fn off_bias_out(&self) -> usize {
        self.off_out() + self.hidden
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Per-step activations recorded by the forward pass for BPTT.
struct StepTrace {
    x: f64,
    gates: Vec<f64>,     // [i, f, g, o] blocks, 4h values
    cell: Vec<f64>,      // c_t
    cell_tanh: Vec<f64>, // tanh(c_t)
    h_prev: Vec<f64>,    // h_{t−1}
}

fn run_forward(model: &LstmModel, window: &[f64], record: bool) -> (f64, Vec<StepTrace>) {
    let h_dim = model.hidden;
    let (off_u, off_b, off_out, off_bias) =
        (model.off_u(), model.off_b(), model.off_out(), model.off_bias_out());
    let p = &model.params;
    let mut h = vec![0.0; h_dim];
    let mut c = vec![0.0; h_dim];
    let mut traces = Vec::with_capacity(if record { window.len() } else { 0 });
    for &x in window {
        let mut gates = vec![0.0; 4 * h_dim];
        for (j, gate) in gates.iter_mut().enumerate() {
            let mut z = p[j] * x + p[off_b + j];
            let row = off_u + j * h_dim;
            for (k, hk) in h.iter().enumerate() {
                z += p[row + k] * hk;
            }
            *gate = if j < 2 * h_dim || j >= 3 * h_dim { sigmoid(z) } else { z.tanh() };
        }
        let h_prev = if record { h.clone() } else { Vec::new() };
        let mut cell_tanh = vec![0.0; h_dim];
        for (k, hk) in h.iter_mut().enumerate() {
            c[k] = gates[h_dim + k] * c[k] + gates[k] * gates[2 * h_dim + k];
            cell_tanh[k] = c[k].tanh();
            *hk = gates[3 * h_dim + k] * cell_tanh[k];
        }
        if record {
            traces.push(StepTrace { x, gates, cell: c.clone(), cell_tanh, h_prev });
        }
    }
    let mut y = p[off_bias];
    for (k, hk) in h.iter().enumerate() {
        y += p[off_out + k] * hk;
    }
    (y, traces)
}

/// Scalar prediction for one input window; hidden and cell states start at
/// zero.
pub fn forward(model: &LstmModel, window: &[f64]) -> f64 {
    run_forward(model, window, false).0
}

/// Squared-error loss (prediction − target)² for one window and its gradient
/// with respect to every parameter, computed by full backpropagation through
/// time. The gradient vector is flat-indexed like [`LstmModel::params_flat`].
pub fn window_gradients(model: &LstmModel, window: &[f64], target: f64) -> (f64, Vec<f64>) {
    let h_dim = model.hidden;
    let (off_u, off_b, off_out, off_bias) =
        (model.off_u(), model.off_b(), model.off_out(), model.off_bias_out());
    let p = &model.params;
    let (y, traces) = run_forward(model, window, true);
    let loss = (y - target).powi(2);
    let mut grad = vec![0.0; p.len()];

    let dy = 2.0 * (y - target);
    let last_h: Vec<f64> = match traces.last() {
        Some(trace) => (0..h_dim)
            .map(|k| trace.gates[3 * h_dim + k] * trace.cell_tanh[k])
            .collect(),
        None => vec![0.0; h_dim],
    };
    grad[off_bias] = dy;
    let mut dh = vec![0.0; h_dim];
    for k in 0..h_dim {
        grad[off_out + k] = dy * last_h[k];
        dh[k] = dy * p[off_out + k];
    }

    let mut dc = vec![0.0; h_dim];
    for (t, trace) in traces.iter().enumerate().rev() {
        let c_prev: &[f64] =
            if t == 0 { &[] } else { &traces[t - 1].cell };
        let mut dz = vec![0.0; 4 * h_dim];
        for k in 0..h_dim {
            let (i, f, g, o) = (
                trace.gates[k],
                trace.gates[h_dim + k],
                trace.gates[2 * h_dim + k],
                trace.gates[3 * h_dim + k],
            );
            let tanh_c = trace.cell_tanh[k];
            dz[3 * h_dim + k] = dh[k] * tanh_c * o * (1.0 - o);
            let dck = dc[k] + dh[k] * o * (1.0 - tanh_c * tanh_c);
            let prev = if t == 0 { 0.0 } else { c_prev[k] };
            dz[h_dim + k] = dck * prev * f * (1.0 - f);
            dz[k] = dck * g * i * (1.0 - i);
            dz[2 * h_dim + k] = dck * i * (1.0 - g * g);
            dc[k] = dck * f;
        }
        let mut dh_prev = vec![0.0; h_dim];
        for (j, dzj) in dz.iter().enumerate() {
            grad[j] += dzj * trace.x;
            grad[off_b + j] += dzj;
            let row = off_u + j * h_dim;
            for k in 0..h_dim {
                grad[row + k] += dzj * trace.h_prev[k];
                dh_prev[k] += p[row + k] * dzj;
            }
        }
        dh = dh_prev;
    }
    (loss, grad)
}

/// Trains the reference forecaster (hidden width [`LSTM_HIDDEN`]) by
/// mini-batch gradient descent on the dataset's training windows and returns
/// the per-epoch mean training loss, 1-based.
///
/// Weight initialisation and the per-epoch shuffle both derive from `seed`,
/// so equal inputs give bitwise-equal outputs. A learning rate of zero leaves
/// the model untouched and logs identical losses, which is useful for
/// plumbing checks.
pub fn train_lstm(
    dataset: &WindowedDataset,
    epochs: usize,
    batch: usize,
    lr: f64,
    seed: u64,
) -> Result<Vec<(usize, f64)>, LstmError> {
    if epochs == 0 {
        return Err(LstmError::BadConfig { what: "epochs must be at least 1" });
    }
    if batch == 0 {
        return Err(LstmError::BadConfig { what: "batch size must be at least 1" });
    }
    if !lr.is_finite() || lr < 0.0 {
        return Err(LstmError::BadConfig { what: "learning rate must be finite and non-negative" });
    }
    if dataset.train_count == 0 {
        return Err(LstmError::EmptyTrainingSet);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut model = LstmModel::init_with_rng(LSTM_HIDDEN, &mut rng)?;
    let mut order: Vec<usize> = (0..dataset.train_count).collect();
    let mut log = Vec::with_capacity(epochs);
    let mut window_losses = vec![0.0; dataset.train_count];
    for epoch in 1..=epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(batch) {
            let mut grad_sum = vec![0.0; model.param_count()];
            for &index in chunk {
                let (input, target) = &dataset.windows[index];
                let (loss, grad) = window_gradients(&model, input, *target);
                window_losses[index] = loss;
                for (sum, g) in grad_sum.iter_mut().zip(grad) {
                    *sum += g;
                }
            }
            let step = lr / chunk.len() as f64;
            for (param, g) in model.params.iter_mut().zip(&grad_sum) {
                *param -= step * g;
            }
        }
        // Summed in window order, not visit order, so the reported loss does
        // not depend on the shuffle when the parameters are unchanged.
        let mean_loss = window_losses.iter().sum::<f64>() / dataset.train_count as f64;
        if !mean_loss.is_finite() {
            return Err(LstmError::NonFiniteLoss { epoch });
        }
        log.push((epoch, mean_loss));
    }
    Ok(log)
}
