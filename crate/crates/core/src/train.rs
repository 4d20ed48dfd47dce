//! Prior-weighted MSE training of Ramsey interferometer models.
//!
//! The loss is the prior-weighted average of the per-phase mean-squared
//! error over the grid:
//!
//! ```text
//! C(θ_Ec, θ_Dc, a) = Σ_x w_x · MSE(φ_x),
//! MSE(φ) = Σ_m (a·m - φ)² p(m|φ)
//! ```
//!
//! Angle gradients use the parameter-shift rule — each trainable angle
//! parameterizes exactly one half-angle Pauli rotation, so
//! `∂C/∂θ = (C(θ+π/2) - C(θ-π/2)) / 2` is exact. The gain gradient is
//! analytic: `∂C/∂a = Σ_x w_x Σ_m 2(a·m - φ_x)·m·p(m|φ_x)`. Descent is
//! plain constant-rate gradient descent.
//!
//! Training is deterministic given the config seed; sweep runs are
//! independent and execute in parallel, with results in config order.

use crate::prior::PhiGrid;
use crate::ramsey::{self, ModelError, RamseyModel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use std::f64::consts::FRAC_PI_2;
use thiserror::Error;

/// Errors from configuration validation and the descent loop.
#[derive(Debug, Error)]
pub enum TrainError {
    /// Invalid model shape or angle bookkeeping.
    #[error(transparent)]
    Model(#[from] ModelError),
    /// A config field is out of domain.
    #[error("invalid training config: {what}")]
    BadConfig { what: &'static str },
    /// A sweep needs at least one config.
    #[error("sweep requires at least one config")]
    EmptyConfigList,
    /// The loss or a parameter left the finite range; carries the iteration
    /// and the parameter snapshot at the point of failure.
    #[error("non-finite loss at iteration {iteration} (learning rate too large?)")]
    NonFiniteLoss { iteration: usize, snapshot: Box<RamseyModel> },
}

/// Hyperparameters of one training run.
///
/// `learning_rate` may be 0, which turns the run into a pure evaluation loop
/// (the logged loss never changes). `init_scale` is the standard deviation
/// of the seeded normal draw for initial angles; `a_init` seeds the readout
/// gain.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub iterations: usize,
    pub log_every: usize,
    pub seed: u64,
    pub init_scale: f64,
    pub a_init: f64,
}

impl TrainConfig {
    fn validate(&self) -> Result<(), TrainError> {
        if !self.learning_rate.is_finite() || self.learning_rate < 0.0 {
            return Err(TrainError::BadConfig { what: "learning_rate must be finite and >= 0" });
        }
        if self.iterations == 0 {
            return Err(TrainError::BadConfig { what: "iterations must be >= 1" });
        }
        if self.log_every == 0 {
            return Err(TrainError::BadConfig { what: "log_every must be >= 1" });
        }
        if !self.init_scale.is_finite() || self.init_scale < 0.0 {
            return Err(TrainError::BadConfig { what: "init_scale must be finite and >= 0" });
        }
        if !self.a_init.is_finite() {
            return Err(TrainError::BadConfig { what: "a_init must be finite" });
        }
        Ok(())
    }
}

/// Architecture of the models a sweep instantiates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelShape {
    pub n_qubits: usize,
    pub ec_depth: usize,
    pub dc_depth: usize,
}

/// The record of one training run.
#[derive(Debug, Clone)]
pub struct TrainingLog {
    /// `(iteration, loss)` pairs: iteration 0 holds the pre-training loss,
    /// then every `log_every`-th iteration and the final one.
    pub entries: Vec<(usize, f64)>,
    pub final_model: RamseyModel,
    /// `(φ, MSE(φ))` over the grid for the final model.
    pub mse_profile: Vec<(f64, f64)>,
}

impl TrainingLog {
    /// Loss before the first descent step.
    pub fn initial_loss(&self) -> f64 {
        self.entries[0].1
    }

    /// Loss after the last descent step.
    pub fn final_loss(&self) -> f64 {
        self.entries.last().expect("log never empty").1
    }
}

/// Draws a fresh model for the shape: angles ~ Normal(0, init_scale²) from
/// the config seed, gain = `a_init`.
pub fn init_model(shape: ModelShape, config: &TrainConfig) -> Result<RamseyModel, TrainError> {
    config.validate()?;
    let normal = Normal::new(0.0, config.init_scale)
        .map_err(|_| TrainError::BadConfig { what: "init_scale must be finite and >= 0" })?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let width = ramsey::layer_width(shape.n_qubits);
    let theta_ec: Vec<f64> = (0..shape.ec_depth * width).map(|_| normal.sample(&mut rng)).collect();
    let theta_dc: Vec<f64> = (0..shape.dc_depth * width).map(|_| normal.sample(&mut rng)).collect();
    Ok(RamseyModel::new(
        shape.n_qubits,
        shape.ec_depth,
        shape.dc_depth,
        theta_ec,
        theta_dc,
        config.a_init,
    )?)
}

/// Exact prior-weighted loss `Σ_x w_x · MSE(φ_x)` over the grid.
pub fn loss(model: &RamseyModel, grid: &PhiGrid) -> f64 {
    let encoded = model.encoded_state();
    grid.iter()
        .map(|(phi, w)| {
            let dist = model
                .distribution_from_encoded(&encoded, phi)
                .expect("grid phases and model parameters are finite");
            w * ramsey::mse_from_distribution(model.gain(), &dist, phi)
        })
        .sum()
}

/// Full gradient: parameter-shift partials for every block angle (encoder
/// block first, then decoder) and the analytic gain partial.
pub fn gradient(model: &RamseyModel, grid: &PhiGrid) -> (Vec<f64>, f64) {
    let angle_grads: Vec<f64> = (0..model.angle_count())
        .into_par_iter()
        .map(|i| {
            let plus = loss(&model.with_shifted_angle(i, FRAC_PI_2), grid);
            let minus = loss(&model.with_shifted_angle(i, -FRAC_PI_2), grid);
            (plus - minus) / 2.0
        })
        .collect();

    let encoded = model.encoded_state();
    let a = model.gain();
    let mut a_grad = 0.0;
    for (phi, w) in grid.iter() {
        let dist = model
            .distribution_from_encoded(&encoded, phi)
            .expect("grid phases and model parameters are finite");
        let inner: f64 = dist
            .iter()
            .map(|(m, p)| {
                let m = m as f64;
                2.0 * (a * m - phi) * m * p
            })
            .sum();
        a_grad += w * inner;
    }
    (angle_grads, a_grad)
}

/// Runs constant-rate gradient descent, logging the loss at iteration 0,
/// every `log_every`-th iteration, and the final iteration.
///
/// Aborts with a parameter snapshot if the loss or any parameter leaves the
/// finite range.
pub fn train(
    model: RamseyModel,
    grid: &PhiGrid,
    config: &TrainConfig,
) -> Result<TrainingLog, TrainError> {
    config.validate()?;
    let mut model = model;
    let initial = loss(&model, grid);
    if !initial.is_finite() {
        return Err(TrainError::NonFiniteLoss { iteration: 0, snapshot: Box::new(model) });
    }
    let mut entries = vec![(0, initial)];
    for iteration in 1..=config.iterations {
        let (angle_grads, a_grad) = gradient(&model, grid);
        let deltas: Vec<f64> = angle_grads.iter().map(|g| -config.learning_rate * g).collect();
        model.apply_step(&deltas, -config.learning_rate * a_grad)?;

        let params_finite = model.theta_ec().iter().chain(model.theta_dc()).all(|t| t.is_finite())
            && model.gain().is_finite();
        let current = if params_finite { loss(&model, grid) } else { f64::NAN };
        if !current.is_finite() {
            return Err(TrainError::NonFiniteLoss { iteration, snapshot: Box::new(model) });
        }
        if iteration % config.log_every == 0 || iteration == config.iterations {
            entries.push((iteration, current));
        }
    }
    let profile = mse_profile(&model, grid);
    Ok(TrainingLog { entries, final_model: model, mse_profile: profile })
}

/// Independent seeded runs over one model shape, in config order. A failed
/// run reports its error without aborting the others.
pub fn sweep(
    shape: ModelShape,
    grid: &PhiGrid,
    configs: &[TrainConfig],
) -> Result<Vec<Result<TrainingLog, TrainError>>, TrainError> {
    if configs.is_empty() {
        return Err(TrainError::EmptyConfigList);
    }
    Ok(configs
        .par_iter()
        .map(|config| train(init_model(shape, config)?, grid, config))
        .collect())
}

/// `(φ_x, MSE(φ_x))` for every grid node — the data behind the MSE-vs-φ
/// figures. The weighted sum of this profile is exactly [`loss`].
pub fn mse_profile(model: &RamseyModel, grid: &PhiGrid) -> Vec<(f64, f64)> {
    let encoded = model.encoded_state();
    grid.phis()
        .iter()
        .map(|&phi| {
            let dist = model
                .distribution_from_encoded(&encoded, phi)
                .expect("grid phases and model parameters are finite");
            (phi, ramsey::mse_from_distribution(model.gain(), &dist, phi))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prior::build_grid;

    const MU: f64 = 9.640437;
    const VAR: f64 = 17.934056159;

    fn reference_grid() -> PhiGrid {
        build_grid(MU, VAR, 100).unwrap()
    }

    fn zero_model(n: usize, a: f64) -> RamseyModel {
        let w = ramsey::layer_width(n);
        RamseyModel::new(n, 3, 3, vec![0.0; 3 * w], vec![0.0; 3 * w], a).unwrap()
    }

    fn random_model(n: usize, seed: u64) -> RamseyModel {
        init_model(
            ModelShape { n_qubits: n, ec_depth: 3, dc_depth: 3 },
            &TrainConfig {
                learning_rate: 0.03,
                iterations: 1,
                log_every: 10,
                seed,
                init_scale: 0.8,
                a_init: MU / n as f64,
            },
        )
        .unwrap()
    }

    // ---- loss ----

    #[test]
    fn degenerate_zero_angle_loss_matches_direct_summation() {
        // Zero angles pin the outcome at m = -2, so the loss collapses to
        // Σ w (-2a - φ)², summed here directly as the oracle.
        let grid = reference_grid();
        for a in [0.0, 0.7, -4.8] {
            let model = zero_model(2, a);
            let oracle: f64 =
                grid.iter().map(|(phi, w)| w * (-2.0 * a - phi) * (-2.0 * a - phi)).sum();
            assert!((loss(&model, &grid) - oracle).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_gain_loss_matches_pinned_oracle_value() {
        // Σ w φ² on this grid, frozen from an independent evaluation.
        let grid = reference_grid();
        let l = loss(&zero_model(2, 0.0), &grid);
        assert!((l - 93.26885516584012).abs() < 1e-9, "loss {l}");
    }

    #[test]
    fn loss_is_nonnegative_for_random_models() {
        let grid = reference_grid();
        for seed in 0..5 {
            assert!(loss(&random_model(2, seed), &grid) >= 0.0);
        }
    }

    #[test]
    fn loss_equals_weighted_sum_of_pointwise_mse() {
        let grid = reference_grid();
        let model = random_model(2, 11);
        let weighted: f64 = grid
            .iter()
            .map(|(phi, w)| w * ramsey::mse_at_phi(&model, phi).unwrap())
            .sum();
        assert!((loss(&model, &grid) - weighted).abs() < 1e-12);
    }

    // ---- gradient ----

    /// Central finite differences over every parameter as the oracle.
    fn fd_gradient(model: &RamseyModel, grid: &PhiGrid, h: f64) -> (Vec<f64>, f64) {
        let angles: Vec<f64> = (0..model.angle_count())
            .map(|i| {
                let plus = loss(&model.with_shifted_angle(i, h), grid);
                let minus = loss(&model.with_shifted_angle(i, -h), grid);
                (plus - minus) / (2.0 * h)
            })
            .collect();
        let mut up = model.clone();
        up.apply_step(&vec![0.0; model.angle_count()], h).unwrap();
        let mut down = model.clone();
        down.apply_step(&vec![0.0; model.angle_count()], -h).unwrap();
        let a = (loss(&up, grid) - loss(&down, grid)) / (2.0 * h);
        (angles, a)
    }

    fn assert_rel_close(got: f64, want: f64, tol: f64) {
        let scale = got.abs().max(want.abs()).max(1.0);
        assert!(
            (got - want).abs() <= tol * scale,
            "mismatch: {got} vs {want} (rel tol {tol})"
        );
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let grid = reference_grid();
        for seed in [3, 17, 29] {
            let model = random_model(2, seed);
            let (ga, gaa) = gradient(&model, &grid);
            let (fa, faa) = fd_gradient(&model, &grid, 1e-6);
            for (g, f) in ga.iter().zip(&fa) {
                assert_rel_close(*g, *f, 1e-6);
            }
            assert_rel_close(gaa, faa, 1e-6);
        }
    }

    #[test]
    fn zero_angle_gain_gradient_matches_closed_form() {
        let grid = reference_grid();
        let a = 0.9;
        let model = zero_model(2, a);
        let oracle: f64 =
            grid.iter().map(|(phi, w)| w * 2.0 * (-2.0 * a - phi) * -2.0).sum();
        let (_, a_grad) = gradient(&model, &grid);
        assert!((a_grad - oracle).abs() < 1e-10);
    }

    #[test]
    fn gradient_vanishes_at_constructed_minimum() {
        // Depth-0 single qubit: the outcome is pinned at m = -1, so
        // C(a) = Σ w (-a - φ)² is exactly quadratic with minimum a* = -Σ w φ.
        let grid = reference_grid();
        let a_star: f64 = -grid.iter().map(|(phi, w)| w * phi).sum::<f64>();
        let model = RamseyModel::new(1, 0, 0, vec![], vec![], a_star).unwrap();
        let (angle_grads, a_grad) = gradient(&model, &grid);
        assert!(angle_grads.is_empty());
        assert!(a_grad.abs() < 1e-8, "gradient {a_grad} at the minimum");
    }

    // ---- training loop ----

    fn quick_config(lr: f64, iters: usize, seed: u64) -> TrainConfig {
        TrainConfig {
            learning_rate: lr,
            iterations: iters,
            log_every: 10,
            seed,
            init_scale: 0.1,
            a_init: MU / 2.0,
        }
    }

    #[test]
    fn zero_learning_rate_freezes_the_loss() {
        let grid = reference_grid();
        let config = quick_config(0.0, 12, 5);
        let model = init_model(ModelShape { n_qubits: 2, ec_depth: 3, dc_depth: 3 }, &config).unwrap();
        let log = train(model, &grid, &config).unwrap();
        let first = log.initial_loss();
        for (_, l) in &log.entries {
            assert_eq!(*l, first);
        }
    }

    #[test]
    fn log_cadence_is_every_tenth_plus_final() {
        let grid = reference_grid();
        let config = quick_config(0.01, 25, 1);
        let model = init_model(ModelShape { n_qubits: 1, ec_depth: 1, dc_depth: 1 }, &config).unwrap();
        let log = train(model, &grid, &config).unwrap();
        let iters: Vec<usize> = log.entries.iter().map(|(i, _)| *i).collect();
        assert_eq!(iters, vec![0, 10, 20, 25]);
        assert!(log.entries.iter().all(|(_, l)| l.is_finite()));
    }

    #[test]
    fn small_learning_rate_never_increases_loss() {
        let grid = reference_grid();
        for seed in [2, 8] {
            let config = TrainConfig { init_scale: 0.8, ..quick_config(1e-4, 50, seed) };
            let model =
                init_model(ModelShape { n_qubits: 2, ec_depth: 3, dc_depth: 3 }, &config).unwrap();
            let mut model = model;
            let mut prev = loss(&model, &grid);
            for _ in 0..50 {
                let (ga, gaa) = gradient(&model, &grid);
                let deltas: Vec<f64> = ga.iter().map(|g| -config.learning_rate * g).collect();
                model.apply_step(&deltas, -config.learning_rate * gaa).unwrap();
                let cur = loss(&model, &grid);
                assert!(cur <= prev + 1e-12, "loss rose {prev} -> {cur}");
                prev = cur;
            }
        }
    }

    #[test]
    fn training_is_bitwise_deterministic() {
        let grid = reference_grid();
        let config = quick_config(0.03, 20, 9);
        let shape = ModelShape { n_qubits: 2, ec_depth: 3, dc_depth: 3 };
        let a = train(init_model(shape, &config).unwrap(), &grid, &config).unwrap();
        let b = train(init_model(shape, &config).unwrap(), &grid, &config).unwrap();
        assert_eq!(a.entries, b.entries);
        assert_eq!(a.final_model, b.final_model);
    }

    #[test]
    fn runaway_learning_rate_aborts_with_snapshot() {
        let grid = reference_grid();
        let config = quick_config(1e160, 5, 3);
        let model = init_model(ModelShape { n_qubits: 2, ec_depth: 3, dc_depth: 3 }, &config).unwrap();
        match train(model, &grid, &config) {
            Err(TrainError::NonFiniteLoss { iteration, snapshot }) => {
                assert_eq!(iteration, 1);
                assert_eq!(snapshot.n_qubits(), 2);
            }
            other => panic!("expected non-finite abort, got {other:?}"),
        }
    }

    #[test]
    fn config_validation_rejects_bad_fields() {
        let ok = quick_config(0.01, 10, 0);
        for (cfg, _what) in [
            (TrainConfig { learning_rate: -0.1, ..ok.clone() }, "lr"),
            (TrainConfig { learning_rate: f64::NAN, ..ok.clone() }, "lr"),
            (TrainConfig { iterations: 0, ..ok.clone() }, "iters"),
            (TrainConfig { log_every: 0, ..ok.clone() }, "log"),
            (TrainConfig { init_scale: -1.0, ..ok.clone() }, "scale"),
            (TrainConfig { a_init: f64::INFINITY, ..ok.clone() }, "a"),
        ] {
            assert!(matches!(
                init_model(ModelShape { n_qubits: 1, ec_depth: 1, dc_depth: 1 }, &cfg),
                Err(TrainError::BadConfig { .. })
            ));
        }
    }

    // ---- sweeps ----

    #[test]
    fn sweep_preserves_config_order_and_determinism() {
        let grid = reference_grid();
        let configs = vec![quick_config(0.01, 15, 4), quick_config(0.03, 15, 4)];
        let shape = ModelShape { n_qubits: 2, ec_depth: 3, dc_depth: 3 };
        let runs = sweep(shape, &grid, &configs).unwrap();
        assert_eq!(runs.len(), 2);
        let again = sweep(shape, &grid, &configs).unwrap();
        for (a, b) in runs.iter().zip(&again) {
            let (a, b) = (a.as_ref().unwrap(), b.as_ref().unwrap());
            assert_eq!(a.entries, b.entries);
        }
        // Same seed, different LR: same initial loss, different trajectories.
        let (r0, r1) = (runs[0].as_ref().unwrap(), runs[1].as_ref().unwrap());
        assert_eq!(r0.initial_loss(), r1.initial_loss());
        assert_ne!(r0.final_loss(), r1.final_loss());
    }

    #[test]
    fn sweep_reports_per_run_failures_without_aborting() {
        let grid = reference_grid();
        let configs = vec![quick_config(1e160, 3, 1), quick_config(0.01, 3, 1)];
        let shape = ModelShape { n_qubits: 2, ec_depth: 3, dc_depth: 3 };
        let runs = sweep(shape, &grid, &configs).unwrap();
        assert!(runs[0].is_err());
        assert!(runs[1].is_ok());
    }

    #[test]
    fn empty_sweep_is_rejected() {
        let grid = reference_grid();
        assert!(matches!(
            sweep(ModelShape { n_qubits: 2, ec_depth: 3, dc_depth: 3 }, &grid, &[]),
            Err(TrainError::EmptyConfigList)
        ));
    }

    // ---- profiles ----

    #[test]
    fn profile_covers_grid_with_nonnegative_values() {
        let grid = reference_grid();
        let profile = mse_profile(&random_model(2, 6), &grid);
        assert_eq!(profile.len(), 100);
        assert!(profile.iter().all(|(_, mse)| *mse >= 0.0));
        for ((phi, _), grid_phi) in profile.iter().zip(grid.phis()) {
            assert_eq!(phi, grid_phi);
        }
    }

    #[test]
    fn zero_model_profile_is_phi_squared() {
        let grid = reference_grid();
        let profile = mse_profile(&zero_model(2, 0.0), &grid);
        for (phi, mse) in profile {
            assert!((mse - phi * phi).abs() < 1e-12);
        }
    }

    #[test]
    fn weighted_profile_mean_reproduces_loss_exactly() {
        let grid = reference_grid();
        let model = random_model(2, 21);
        let profile = mse_profile(&model, &grid);
        let weighted: f64 =
            profile.iter().zip(grid.weights()).map(|((_, mse), w)| w * mse).sum();
        assert!((weighted - loss(&model, &grid)).abs() < 1e-10);
    }
}
