//! Acceptance gate: ten end-to-end checks, one test per criterion, each
//! printing a single `[PASS]`/`[FAIL]` line with its runtime.
//!
//! The tests run serially (shared lock) so the per-criterion runtime budgets
//! are measured without contention. Criteria 6 and 7 assert the stated loss
//! targets verbatim; see their failure messages for the measured optima and
//! the analytic lower bound of this estimator family.

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::{Mutex, MutexGuard};
use std::time::{Duration, Instant};

use qmetro::fisher::{self, DEFAULT_DERIVATIVE_STEP};
use qmetro::lstm;
use qmetro::prior;
use qmetro::ramsey::{self, RamseyModel};
use qmetro::state::{GateSpec, StateVector};
use qmetro::train::{self, ModelShape, TrainConfig};
use qmetro::trotter::{self, PauliTerm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Prior constants shared by the training criteria.
const MU: f64 = 9.640437;
const SIGMA_SQ: f64 = 17.934056159;
const PARTITIONS: usize = 100;
const ITERATIONS: usize = 150;
const SWEEP_SEEDS: u64 = 16;
const INIT_SCALE: f64 = 0.1;

static SERIAL: Mutex<()> = Mutex::new(());

/// Serializes the criteria so runtime budgets are measured uncontended. A
/// poisoned lock (an earlier criterion failed) is fine to reuse.
fn serial() -> MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

/// Prints the criterion's verdict line and panics on failure.
fn report(name: &str, budget: Option<Duration>, start: Instant, mut failures: Vec<String>) {
    let elapsed = start.elapsed();
    if let Some(budget) = budget {
        if elapsed > budget {
            failures.push(format!(
                "runtime {:.2} s exceeds the {:.0} s budget",
                elapsed.as_secs_f64(),
                budget.as_secs_f64()
            ));
        }
    }
    if failures.is_empty() {
        println!("[PASS] {name} ({:.2} s)", elapsed.as_secs_f64());
    } else {
        let line =
            format!("[FAIL] {name} ({:.2} s): {}", elapsed.as_secs_f64(), failures.join("; "));
        println!("{line}");
        panic!("{line}");
    }
}

fn reference_grid() -> prior::PhiGrid {
    prior::build_grid(MU, SIGMA_SQ, PARTITIONS).expect("reference grid")
}

fn random_model(
    rng: &mut ChaCha8Rng,
    qubits: usize,
    ec_depth: usize,
    dc_depth: usize,
    a: f64,
) -> RamseyModel {
    let width = ramsey::layer_width(qubits);
    let ec = (0..ec_depth * width).map(|_| rng.gen_range(-PI..PI)).collect();
    let dc = (0..dc_depth * width).map(|_| rng.gen_range(-PI..PI)).collect();
    RamseyModel::new(qubits, ec_depth, dc_depth, ec, dc, a).expect("random model")
}

/// One-qubit Ramsey probe: p(m = −1|φ) = sin²(φ/2), F ≡ 1.
fn single_qubit_probe() -> RamseyModel {
    RamseyModel::new(1, 1, 1, vec![FRAC_PI_2, 0.0], vec![FRAC_PI_2, 0.0], 1.0).unwrap()
}

/// Two-qubit GHZ-style probe: the imprint acts on |00⟩+|11⟩, so F = n² = 4.
fn ghz_probe() -> RamseyModel {
    RamseyModel::new(
        2,
        1,
        2,
        vec![FRAC_PI_2, 0.0, 0.0, 0.0],
        vec![0.0, 0.0, 0.0, 0.0, -FRAC_PI_2, 0.0, 0.0, 0.0],
        1.0,
    )
    .unwrap()
}

// ---- criterion 1: gate algebra ----

#[test]
fn criterion_01_gate_algebra() {
    let _guard = serial();
    let start = Instant::now();
    let mut failures = Vec::new();

    let bell = StateVector::zero(2)
        .unwrap()
        .apply_gate(&GateSpec::hadamard(0))
        .unwrap()
        .apply_gate(&GateSpec::cnot(0, 1))
        .unwrap();
    let dist = bell.measurement_distribution();
    for (bits, want) in [("00", 0.5), ("01", 0.0), ("10", 0.0), ("11", 0.5)] {
        let got = dist.prob(bits).unwrap();
        if (got - want).abs() > 1e-12 {
            failures.push(format!("Bell p({bits}) = {got}, want {want}"));
        }
    }

    let generic = StateVector::zero(2)
        .unwrap()
        .apply_gate(&GateSpec::rot_y(0, 0.7))
        .unwrap()
        .apply_gate(&GateSpec::rot_z(1, 0.4))
        .unwrap()
        .apply_gate(&GateSpec::rot_x(0, 1.1))
        .unwrap();
    let involutions = [
        ("H(0)", GateSpec::hadamard(0)),
        ("H(1)", GateSpec::hadamard(1)),
        ("X(0)", GateSpec::pauli_x(0)),
        ("X(1)", GateSpec::pauli_x(1)),
        ("CNOT(0,1)", GateSpec::cnot(0, 1)),
        ("CNOT(1,0)", GateSpec::cnot(1, 0)),
    ];
    for (label, gate) in involutions {
        let twice = generic.apply_gate(&gate).unwrap().apply_gate(&gate).unwrap();
        let deviation = generic
            .amplitudes()
            .iter()
            .zip(twice.amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        if deviation > 1e-12 {
            failures.push(format!("{label} applied twice deviates by {deviation:.2e}"));
        }
    }

    report("criterion 1: gate algebra", Some(Duration::from_secs(1)), start, failures);
}

// ---- criterion 2: gradient fidelity ----

#[test]
fn criterion_02_gradient_fidelity() {
    let _guard = serial();
    let start = Instant::now();
    let mut failures = Vec::new();

    let grid = reference_grid();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let h = 1e-6;
    for index in 0..20 {
        let gain = rng.gen_range(0.5..6.0);
        let model = random_model(&mut rng, 2, 3, 3, gain);
        let (angle_grads, gain_grad) = train::gradient(&model, &grid);

        let mut worst: f64 = 0.0;
        for (i, &analytic) in angle_grads.iter().enumerate() {
            let plus = train::loss(&model.with_shifted_angle(i, h), &grid);
            let minus = train::loss(&model.with_shifted_angle(i, -h), &grid);
            let fd = (plus - minus) / (2.0 * h);
            let scale = analytic.abs().max(fd.abs()).max(1.0);
            worst = worst.max((analytic - fd).abs() / scale);
        }
        let zeros = vec![0.0; model.angle_count()];
        let mut up = model.clone();
        up.apply_step(&zeros, h).unwrap();
        let mut down = model.clone();
        down.apply_step(&zeros, -h).unwrap();
        let fd_gain = (train::loss(&up, &grid) - train::loss(&down, &grid)) / (2.0 * h);
        let scale = gain_grad.abs().max(fd_gain.abs()).max(1.0);
        worst = worst.max((gain_grad - fd_gain).abs() / scale);

        if worst > 1e-6 {
            failures.push(format!("model {index}: worst relative deviation {worst:.2e} > 1e-6"));
        }
    }

    report("criterion 2: gradient fidelity", Some(Duration::from_secs(30)), start, failures);
}

// ---- criterion 3: Fisher identities ----

#[test]
fn criterion_03_fisher_identities() {
    let _guard = serial();
    let start = Instant::now();
    let mut failures = Vec::new();

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for index in 0..50 {
        let model = random_model(&mut rng, 2, 1, 1, 1.0);
        let phi = rng.gen_range(-PI..PI);
        let f = fisher::fisher_information(&model, phi, DEFAULT_DERIVATIVE_STEP).unwrap().fisher;
        let dist = ramsey::outcome_distribution(&model, phi).unwrap();
        let samples = fisher::score(&model, phi, DEFAULT_DERIVATIVE_STEP).unwrap();
        let mean: f64 = samples.iter().map(|s| dist.prob_of_m(s.m).unwrap() * s.score).sum();
        let second: f64 =
            samples.iter().map(|s| dist.prob_of_m(s.m).unwrap() * s.score * s.score).sum();
        let variance = second - mean * mean;
        if (f - variance).abs() > 1e-8 {
            failures.push(format!(
                "model {index}: F = {f} but Var(score) = {variance} (|Δ| = {:.2e})",
                (f - variance).abs()
            ));
        }
    }

    let f1 = fisher::fisher_information(&single_qubit_probe(), FRAC_PI_2, DEFAULT_DERIVATIVE_STEP)
        .unwrap()
        .fisher;
    if (f1 - 1.0).abs() > 1e-6 {
        failures.push(format!("single-qubit probe F(π/2) = {f1}, want 1"));
    }
    let f4 = fisher::fisher_information(&ghz_probe(), 0.9, DEFAULT_DERIVATIVE_STEP)
        .unwrap()
        .fisher;
    if (f4 - 4.0).abs() > 1e-6 {
        failures.push(format!("GHZ probe F = {f4}, want 4"));
    }

    report("criterion 3: Fisher identities", Some(Duration::from_secs(30)), start, failures);
}

// ---- criterion 4: estimator variance respects the bound ----

#[test]
fn criterion_04_estimator_variance_bound() {
    let _guard = serial();
    let start = Instant::now();
    let mut failures = Vec::new();

    let model = single_qubit_probe();
    let shots = 1000;
    let f = fisher::fisher_information(&model, FRAC_PI_2, DEFAULT_DERIVATIVE_STEP)
        .unwrap()
        .fisher;
    let bound = fisher::cramer_rao_bound(f, shots).unwrap();
    let spread = fisher::sampled_estimator_variance(&model, FRAC_PI_2, shots, 200, 424242).unwrap();
    if spread.variance < 0.9 * bound {
        failures.push(format!(
            "empirical variance {:.3e} fell below 0.9 × bound {bound:.3e}",
            spread.variance
        ));
    }

    report(
        "criterion 4: estimator variance vs bound",
        Some(Duration::from_secs(60)),
        start,
        failures,
    );
}

// ---- criterion 5: product-formula error scaling ----

#[test]
fn criterion_05_trotter_scaling() {
    let _guard = serial();
    let start = Instant::now();
    let mut failures = Vec::new();

    let terms = [PauliTerm::new(1.0, "X"), PauliTerm::new(1.0, "Z")];
    let hamiltonian = trotter::pauli_sum(&terms).unwrap();
    let exact = trotter::exact_evolution(&hamiltonian, 1.0).unwrap();
    if exact.unitarity_deviation() > 1e-9 {
        failures.push(format!("exact evolution unitarity {:.2e}", exact.unitarity_deviation()));
    }

    let steps = [1usize, 2, 4, 8, 16, 32];
    let mut points = Vec::new();
    for &s in &steps {
        let approx = trotter::trotter_first_order(&terms, 1.0, s).unwrap();
        if approx.unitarity_deviation() > 1e-9 {
            failures
                .push(format!("{s}-step output unitarity {:.2e}", approx.unitarity_deviation()));
        }
        let error = trotter::simulation_error(&exact, &approx).unwrap();
        points.push(((s as f64).ln(), error.ln()));
    }
    let n = points.len() as f64;
    let mean_x: f64 = points.iter().map(|(x, _)| x).sum::<f64>() / n;
    let mean_y: f64 = points.iter().map(|(_, y)| y).sum::<f64>() / n;
    let slope: f64 = points.iter().map(|(x, y)| (x - mean_x) * (y - mean_y)).sum::<f64>()
        / points.iter().map(|(x, _)| (x - mean_x) * (x - mean_x)).sum::<f64>();
    if (slope + 1.0).abs() > 0.15 {
        failures.push(format!("log-log error slope {slope:.4} outside −1 ± 0.15"));
    }

    let commuting = [PauliTerm::new(1.0, "XI"), PauliTerm::new(1.0, "IX")];
    let commuting_h = trotter::pauli_sum(&commuting).unwrap();
    let commuting_exact = trotter::exact_evolution(&commuting_h, 1.0).unwrap();
    let commuting_approx = trotter::trotter_first_order(&commuting, 1.0, 3).unwrap();
    if commuting_approx.unitarity_deviation() > 1e-9 {
        failures.push("commuting output lost unitarity".to_string());
    }
    let commuting_error =
        trotter::simulation_error(&commuting_exact, &commuting_approx).unwrap();
    if commuting_error > 1e-10 {
        failures.push(format!("commuting Hamiltonian error {commuting_error:.2e} > 1e-10"));
    }

    report("criterion 5: product-formula scaling", Some(Duration::from_secs(10)), start, failures);
}

// ---- criteria 6–7: training targets ----

/// Grid-weighted variance of the φ nodes: the analytic floor of the loss for
/// any estimator that maps every outcome onto at most one value inside the
/// grid's span (see the failure messages of criteria 6 and 7).
fn grid_variance(grid: &prior::PhiGrid) -> f64 {
    let mean: f64 = grid.iter().map(|(phi, w)| w * phi).sum();
    grid.iter().map(|(phi, w)| w * (phi - mean) * (phi - mean)).sum()
}

fn sweep_configs(lr: f64, a_init: f64) -> Vec<TrainConfig> {
    (0..SWEEP_SEEDS)
        .map(|seed| TrainConfig {
            learning_rate: lr,
            iterations: ITERATIONS,
            log_every: 10,
            seed,
            init_scale: INIT_SCALE,
            a_init,
        })
        .collect()
}

/// Runs one 16-seed sweep and returns (best final loss, worst final/initial
/// ratio), folding failed runs into `failures`.
fn run_sweep(
    shape: ModelShape,
    grid: &prior::PhiGrid,
    lr: f64,
    failures: &mut Vec<String>,
) -> (f64, f64) {
    let configs = sweep_configs(lr, MU / shape.n_qubits as f64);
    let results = train::sweep(shape, grid, &configs).expect("sweep setup");
    let mut best = f64::INFINITY;
    let mut worst_ratio: f64 = 0.0;
    for (config, result) in configs.iter().zip(results) {
        match result {
            Ok(log) => {
                best = best.min(log.final_loss());
                worst_ratio = worst_ratio.max(log.final_loss() / log.initial_loss());
            }
            Err(err) => failures.push(format!("seed {} at LR={lr} failed: {err}", config.seed)),
        }
    }
    (best, worst_ratio)
}

#[test]
fn criterion_06_two_qubit_training() {
    let _guard = serial();
    let start = Instant::now();
    let mut failures = Vec::new();

    let grid = reference_grid();
    let shape = ModelShape { n_qubits: 2, ec_depth: 3, dc_depth: 3 };
    let (best_03, ratio_03) = run_sweep(shape, &grid, 0.03, &mut failures);
    let (_, ratio_01) = run_sweep(shape, &grid, 0.01, &mut failures);

    let floor = grid_variance(&grid);
    if best_03 > 0.05 {
        failures.push(format!(
            "best final loss over 16 seeds at LR=0.03 is {best_03:.4}, above the 0.05 target; \
             with a linear estimator a·m whose levels are 2a apart, at most one level can lie \
             inside the 2-unit grid span, so the grid-weighted MSE of any parameter setting is \
             bounded below by the grid variance {floor:.6} — the target is unreachable for this \
             model family"
        ));
    }
    for (lr, ratio) in [(0.01, ratio_01), (0.03, ratio_03)] {
        if ratio > 0.25 {
            failures.push(format!(
                "worst final/initial loss ratio at LR={lr} is {ratio:.4}, above 0.25; the initial \
                 gain μ/n points the estimator at the zero-probability m=+n outcome, so the \
                 initial loss is ~370 and LR=0.03 descent plateaus near the {floor:.4} floor \
                 only for some seeds"
            ));
        }
    }

    report("criterion 6: two-qubit training", Some(Duration::from_secs(300)), start, failures);
}

#[test]
fn criterion_07_three_qubit_training() {
    let _guard = serial();
    let start = Instant::now();
    let mut failures = Vec::new();

    let grid = reference_grid();
    let shape = ModelShape { n_qubits: 3, ec_depth: 3, dc_depth: 3 };
    let (best, _) = run_sweep(shape, &grid, 0.01, &mut failures);

    let floor = grid_variance(&grid);
    if best > 0.3 {
        failures.push(format!(
            "best final loss over 16 seeds at LR=0.01 is {best:.4}, above the 0.3 target; the \
             grid variance {floor:.6} is a hard lower bound for a linear estimator whose level \
             spacing 2a exceeds the 2-unit grid span (three levels would need spacing ratio \
             ≤ 1.23, impossible for a, 3a), so the optimizer is already at the global optimum"
        ));
    }

    report("criterion 7: three-qubit training", Some(Duration::from_secs(600)), start, failures);
}

// ---- criterion 8: profile consistency ----

#[test]
fn criterion_08_mse_profile_consistency() {
    let _guard = serial();
    let start = Instant::now();
    let mut failures = Vec::new();

    let grid = reference_grid();
    let config = TrainConfig {
        learning_rate: 0.03,
        iterations: ITERATIONS,
        log_every: 10,
        seed: 0,
        init_scale: INIT_SCALE,
        a_init: MU / 2.0,
    };
    let shape = ModelShape { n_qubits: 2, ec_depth: 3, dc_depth: 3 };
    let model = train::init_model(shape, &config).unwrap();
    let log = train::train(model, &grid, &config).unwrap();

    if log.mse_profile.len() != PARTITIONS {
        failures.push(format!("profile has {} rows, want {PARTITIONS}", log.mse_profile.len()));
    }
    if let Some((phi, mse)) = log.mse_profile.iter().find(|(_, mse)| *mse < 0.0) {
        failures.push(format!("profile MSE at φ = {phi} is negative: {mse}"));
    }
    let weighted: f64 = grid
        .weights()
        .iter()
        .zip(&log.mse_profile)
        .map(|(w, (_, mse))| w * mse)
        .sum();
    if (weighted - log.final_loss()).abs() > 1e-10 {
        failures.push(format!(
            "weighted profile mean {weighted} differs from reported final loss {} by {:.2e}",
            log.final_loss(),
            (weighted - log.final_loss()).abs()
        ));
    }

    report("criterion 8: MSE profile consistency", None, start, failures);
}

// ---- criterion 9: recurrent baseline ----

#[test]
fn criterion_09_lstm_baseline() {
    let _guard = serial();
    let start = Instant::now();
    let mut failures = Vec::new();

    let count = lstm::param_count(32).unwrap();
    if count != 4385 {
        failures.push(format!("param_count(32) = {count}, want 4385"));
    }

    let model = lstm::LstmModel::init(3, 5).unwrap();
    let window = [0.3, -0.8, 1.4, 0.05, -0.6];
    let target = 0.45;
    let (_, grads) = lstm::window_gradients(&model, &window, target);
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for (index, &analytic) in grads.iter().enumerate() {
        let plus = lstm::forward(&model.with_param_shifted(index, h), &window) - target;
        let minus = lstm::forward(&model.with_param_shifted(index, -h), &window) - target;
        let fd = (plus * plus - minus * minus) / (2.0 * h);
        let scale = analytic.abs().max(fd.abs()).max(1e-6);
        worst = worst.max((analytic - fd).abs() / scale);
    }
    if worst > 1e-4 {
        failures.push(format!("worst BPTT-vs-FD relative deviation {worst:.2e} > 1e-4"));
    }

    let fixture = fixture_path("h2oc_sample_10k.csv");
    let series = prior::load_series(&fixture, "H2OC (mmol/mol)").unwrap();
    let dataset = lstm::make_windows(&series, 120).unwrap();
    let losses = lstm::train_lstm(&dataset, 10, 256, 0.01, 0).unwrap();
    let first = losses.first().unwrap().1;
    let last = losses.last().unwrap().1;
    if losses.len() != 10 {
        failures.push(format!("expected 10 epoch records, got {}", losses.len()));
    }
    if last >= first {
        failures.push(format!("epoch-10 loss {last:.4} did not improve on epoch-1 {first:.4}"));
    }

    report("criterion 9: recurrent baseline", Some(Duration::from_secs(300)), start, failures);
}

// ---- criterion 10: manifest replay determinism ----

fn fixture_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .canonicalize()
        .expect("fixture exists")
}

fn run_cli(args: &[&str]) {
    let output = Command::new(env!("CARGO_BIN_EXE_qmetro"))
        .args(args)
        .output()
        .expect("CLI binary runs");
    assert!(
        output.status.success(),
        "qmetro {args:?} exited with {:?}: {}",
        output.status.code(),
        String::from_utf8_lossy(&output.stderr)
    );
}

/// Byte-compares `name` under both directories, recording any mismatch.
fn compare_file(first: &Path, second: &Path, name: &str, failures: &mut Vec<String>) {
    let a = std::fs::read(first.join(name))
        .unwrap_or_else(|err| panic!("read {}/{name}: {err}", first.display()));
    let b = std::fs::read(second.join(name))
        .unwrap_or_else(|err| panic!("read {}/{name}: {err}", second.display()));
    if a != b {
        failures.push(format!("{name} differs between {} and replay", first.display()));
    }
}

#[test]
fn criterion_10_manifest_replay() {
    let _guard = serial();
    let start = Instant::now();
    let mut failures = Vec::new();

    let tmp = tempfile::tempdir().unwrap();
    let dir = |name: &str| tmp.path().join(name);
    let path = |p: PathBuf| p.display().to_string();
    let fixture = path(fixture_path("h2oc_sample_1k.csv"));

    // Training run whose prior is derived from a CSV: the manifest records
    // the resolved statistics, so the replay must not depend on the file.
    let a1 = dir("train");
    run_cli(&[
        "train-qnn", "--csv", &fixture, "--qubits", "2", "--iters", "20", "--seed", "5", "--out",
        &path(a1.clone()),
    ]);
    let b1 = dir("train-replay");
    run_cli(&["train-qnn", "--config", &path(a1.join("manifest.txt")), "--out", &path(b1.clone())]);
    compare_file(&a1, &b1, "loss_curve.csv", &mut failures);
    compare_file(&a1, &b1, "mse_profile.csv", &mut failures);

    // Sweep with a duplicated learning rate (distinct per-run seeds); both
    // the sweep manifest and each per-run manifest must replay bitwise.
    let a2 = dir("sweep");
    run_cli(&[
        "sweep-lr", "--lrs", "0.02,0.02", "--qubits", "2", "--iters", "10", "--seed", "3",
        "--mean", "9.640437", "--variance", "17.934056159", "--out", &path(a2.clone()),
    ]);
    let b2 = dir("sweep-replay");
    run_cli(&["sweep-lr", "--config", &path(a2.join("manifest.txt")), "--out", &path(b2.clone())]);
    compare_file(&a2, &b2, "summary.csv", &mut failures);
    for run in ["run-00", "run-01"] {
        compare_file(&a2.join(run), &b2.join(run), "loss_curve.csv", &mut failures);
        compare_file(&a2.join(run), &b2.join(run), "mse_profile.csv", &mut failures);
    }
    let c2 = dir("sweep-run01-replay");
    run_cli(&[
        "train-qnn", "--config", &path(a2.join("run-01/manifest.txt")), "--out", &path(c2.clone()),
    ]);
    compare_file(&a2.join("run-01"), &c2, "loss_curve.csv", &mut failures);
    compare_file(&a2.join("run-01"), &c2, "mse_profile.csv", &mut failures);

    // Fisher table with the Monte-Carlo column driven by the recorded seed.
    let a3 = dir("fisher");
    run_cli(&[
        "fisher", "--points", "6", "--shots", "200", "--seed", "11", "--out", &path(a3.clone()),
    ]);
    let b3 = dir("fisher-replay");
    run_cli(&["fisher", "--config", &path(a3.join("manifest.txt")), "--out", &path(b3.clone())]);
    compare_file(&a3, &b3, "fisher.csv", &mut failures);

    // Product-formula error table.
    let a4 = dir("trotter");
    run_cli(&["trotter", "--steps", "1,2,4", "--out", &path(a4.clone())]);
    let b4 = dir("trotter-replay");
    run_cli(&["trotter", "--config", &path(a4.join("manifest.txt")), "--out", &path(b4.clone())]);
    compare_file(&a4, &b4, "trotter.csv", &mut failures);

    // Recurrent baseline training curve.
    let a5 = dir("lstm");
    run_cli(&[
        "train-lstm", "--csv", &fixture, "--window", "15", "--epochs", "2", "--batch", "128",
        "--seed", "9", "--out", &path(a5.clone()),
    ]);
    let b5 = dir("lstm-replay");
    run_cli(&[
        "train-lstm", "--config", &path(a5.join("manifest.txt")), "--out", &path(b5.clone()),
    ]);
    compare_file(&a5, &b5, "lstm_loss.csv", &mut failures);

    report("criterion 10: manifest replay determinism", None, start, failures);
}
