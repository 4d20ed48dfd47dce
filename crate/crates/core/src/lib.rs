//! Quantum-metrology toolkit for phase estimation on small qubit registers.
//!
//! The crate simulates variational Ramsey interferometers with a dense
//! statevector backend, trains them against a prior-weighted mean-squared
//! error, and provides the supporting analyses: classical Fisher information
//! with Cramér-Rao bounds, Trotter-Suzuki time-block error studies, normal
//! prior construction from time-series statistics, and a from-scratch LSTM
//! regression baseline for comparison.
//!
//! Modules are layered bottom-up:
//!
//! * [`state`] — dense statevector and gate kernels
//! * [`ramsey`] — encoder/decoder blocks, phase imprint, outcome statistic
//! * [`prior`] — CSV ingestion, series statistics, weighted phase grids
//! * [`train`] — parameter-shift gradient descent over the phase grid
//! * [`fisher`] — Fisher information, score, Cramér-Rao bounds
//! * [`trotter`] — product-formula evolution and Schatten-norm errors
//! * [`lstm`] — windowed LSTM baseline trained with BPTT
//!
//! All randomness flows through explicitly seeded ChaCha generators, so every
//! result in the crate is reproducible from its inputs.

pub mod fisher;
pub mod lstm;
pub mod prior;
pub mod ramsey;
pub mod state;
pub mod train;
pub mod trotter;
