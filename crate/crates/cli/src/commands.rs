//! Implementations of the six subcommands.
//!
//! Each command resolves its settings (flag > config file > default), does
//! its work, writes UTF-8 CSV files with headers into the output directory,
//! and finishes by writing a `manifest.txt` there with the fully resolved
//! configuration. Losses on stdout carry four decimal places; values in CSV
//! files use the shortest round-trippable decimal form so a replayed run
//! reproduces them bitwise.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::path::{Path, PathBuf};

use qmetro::lstm::{self, LstmError};
use qmetro::prior::{self, PriorError};
use qmetro::ramsey::{self, RamseyModel};
use qmetro::train::{self, ModelShape, TrainConfig, TrainError, TrainingLog};
use qmetro::trotter::{self, PauliTerm};
use qmetro::fisher;

use crate::config::{parse_list, write_manifest_map, Resolver};
use crate::{
    CliError, FisherArgs, IngestArgs, SweepLrArgs, TrainLstmArgs, TrainQnnArgs, TrotterArgs,
};

/// Column the bundled fixtures use; matches the humidity column of the
/// weather data set the defaults are tuned for.
const DEFAULT_COLUMN: &str = "H2OC (mmol/mol)";

/// Fixed repetition count for the sampled-estimator variance column.
const VARIANCE_REPETITIONS: usize = 200;

fn runtime(err: impl Into<anyhow::Error>) -> CliError {
    CliError::Runtime(err.into())
}

/// Creates the output directory (and parents) if missing.
fn prepare_out(out: &str) -> Result<PathBuf, CliError> {
    let path = PathBuf::from(out);
    std::fs::create_dir_all(&path).map_err(|err| {
        CliError::Runtime(anyhow::anyhow!("cannot create output directory {out}: {err}"))
    })?;
    Ok(path)
}

/// Shortest decimal form that parses back to the identical float.
fn fmt(value: f64) -> String {
    format!("{value}")
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let fail = |err: csv::Error| {
        CliError::Runtime(anyhow::anyhow!("cannot write {}: {err}", path.display()))
    };
    let mut writer = csv::Writer::from_path(path).map_err(fail)?;
    writer.write_record(header).map_err(fail)?;
    for row in rows {
        writer.write_record(row).map_err(fail)?;
    }
    writer
        .flush()
        .map_err(|err| CliError::Runtime(anyhow::anyhow!("cannot write {}: {err}", path.display())))
}

/// Flag-value errors become usage errors; data and descent failures are
/// runtime errors.
fn map_train_err(err: TrainError) -> CliError {
    match err {
        TrainError::BadConfig { .. } | TrainError::EmptyConfigList => {
            CliError::usage(err.to_string())
        }
        other => CliError::Runtime(other.into()),
    }
}

/// Grid construction fails only on out-of-domain settings.
fn map_grid_err(err: PriorError) -> CliError {
    CliError::usage(err.to_string())
}

/// Resolves the prior's mean and variance: explicit values win, otherwise
/// they are derived from the CSV and recorded so replays skip the file.
fn resolve_prior(
    resolver: &mut Resolver,
    csv: Option<String>,
    column: Option<String>,
    mean: Option<f64>,
    variance: Option<f64>,
) -> Result<(f64, f64), CliError> {
    let mean_opt = resolver.optional("mean", mean)?;
    let variance_opt = resolver.optional("variance", variance)?;
    let csv_opt = resolver.optional("csv", csv)?;
    match (mean_opt, variance_opt) {
        (Some(m), Some(v)) => Ok((m, v)),
        (None, None) => {
            let Some(path) = csv_opt else {
                return Err(CliError::usage(
                    "provide either --csv or both --mean and --variance",
                ));
            };
            let column = resolver.value("column", column, DEFAULT_COLUMN.to_string())?;
            let series = prior::load_series(&path, &column).map_err(runtime)?;
            let stats = prior::stats(&series).map_err(runtime)?;
            resolver.record("mean", stats.mean);
            resolver.record("variance", stats.variance);
            Ok((stats.mean, stats.variance))
        }
        _ => Err(CliError::usage("--mean and --variance must be given together")),
    }
}

fn validate_qubits(qubits: usize) -> Result<(), CliError> {
    if !(1..=6).contains(&qubits) {
        return Err(CliError::usage(format!("qubits must be between 1 and 6, got {qubits}")));
    }
    Ok(())
}

/// Checks the shared descent settings before any data file is touched, so a
/// bad flag is a usage error even when the data would also fail to load.
fn validate_descent_settings(
    iters: usize,
    init_scale: f64,
    partitions: usize,
) -> Result<(), CliError> {
    if iters == 0 {
        return Err(CliError::usage("iters must be at least 1"));
    }
    if !init_scale.is_finite() || init_scale < 0.0 {
        return Err(CliError::usage(format!(
            "init_scale must be finite and >= 0, got {init_scale}"
        )));
    }
    if partitions < 2 {
        return Err(CliError::usage(format!("partitions must be at least 2, got {partitions}")));
    }
    Ok(())
}

fn validate_learning_rate(lr: f64) -> Result<(), CliError> {
    if !lr.is_finite() || lr < 0.0 {
        return Err(CliError::usage(format!("learning rate must be finite and >= 0, got {lr}")));
    }
    Ok(())
}

fn write_training_outputs(dir: &Path, log: &TrainingLog) -> Result<(), CliError> {
    let curve: Vec<Vec<String>> =
        log.entries.iter().map(|&(iter, loss)| vec![iter.to_string(), fmt(loss)]).collect();
    write_csv(&dir.join("loss_curve.csv"), &["iter", "loss"], &curve)?;
    let profile: Vec<Vec<String>> =
        log.mse_profile.iter().map(|&(phi, mse)| vec![fmt(phi), fmt(mse)]).collect();
    write_csv(&dir.join("mse_profile.csv"), &["phi", "mse"], &profile)
}

// ---- ingest ----

pub fn cmd_ingest(args: IngestArgs) -> Result<(), CliError> {
    let mut resolver = Resolver::new(args.common.config.as_deref(), "ingest")?;
    let out = resolver.value("out", args.common.out, "runs/ingest".to_string())?;
    let csv = resolver.required("csv", args.csv)?;
    let column = resolver.value("column", args.column, DEFAULT_COLUMN.to_string())?;
    let json = resolver.value("json", args.json.then_some(true), false)?;
    resolver.record("seed", 0);

    let series = prior::load_series(&csv, &column).map_err(runtime)?;
    let stats = prior::stats(&series).map_err(runtime)?;

    if json {
        let record = serde_json::json!({
            "mean": stats.mean,
            "variance": stats.variance,
            "count": stats.count,
        });
        println!("{record}");
    } else {
        println!("mean: {}", fmt(stats.mean));
        println!("variance: {}", fmt(stats.variance));
        println!("count: {}", stats.count);
    }

    let out_dir = prepare_out(&out)?;
    resolver.write_manifest("ingest", &out_dir)
}

// ---- train-qnn ----

pub fn cmd_train_qnn(args: TrainQnnArgs) -> Result<(), CliError> {
    let mut resolver = Resolver::new(args.common.config.as_deref(), "train-qnn")?;
    let out = resolver.value("out", args.common.out, "runs/train-qnn".to_string())?;
    let qubits = resolver.value("qubits", args.qubits, 2)?;
    validate_qubits(qubits)?;
    let ec_depth = resolver.value("ec_depth", args.ec_depth, 3)?;
    let dc_depth = resolver.value("dc_depth", args.dc_depth, 3)?;
    let partitions = resolver.value("partitions", args.partitions, 100)?;
    let lr = resolver.value("lr", args.lr, 0.01)?;
    let iters = resolver.value("iters", args.iters, 150)?;
    let seed = resolver.value("seed", args.seed, 0u64)?;
    let init_scale = resolver.value("init_scale", args.init_scale, 0.1)?;
    validate_learning_rate(lr)?;
    validate_descent_settings(iters, init_scale, partitions)?;
    let (mean, variance) =
        resolve_prior(&mut resolver, args.csv, args.column, args.mean, args.variance)?;
    let a_init = resolver.value("a_init", args.a_init, mean / qubits as f64)?;
    let log_every = resolver.value("log_every", None, 10)?;

    let grid = prior::build_grid(mean, variance, partitions).map_err(map_grid_err)?;
    let config = TrainConfig { learning_rate: lr, iterations: iters, log_every, seed, init_scale, a_init };
    let shape = ModelShape { n_qubits: qubits, ec_depth, dc_depth };
    let model = train::init_model(shape, &config).map_err(map_train_err)?;
    let log = train::train(model, &grid, &config).map_err(map_train_err)?;

    for &(iter, loss) in &log.entries {
        if iter >= 1 {
            println!("iter: {iter} loss: {loss:.4}");
        }
    }

    let out_dir = prepare_out(&out)?;
    write_training_outputs(&out_dir, &log)?;
    resolver.write_manifest("train-qnn", &out_dir)
}

// ---- sweep-lr ----

pub fn cmd_sweep_lr(args: SweepLrArgs) -> Result<(), CliError> {
    let mut resolver = Resolver::new(args.common.config.as_deref(), "sweep-lr")?;
    let out = resolver.value("out", args.common.out, "runs/sweep-lr".to_string())?;
    let lrs_raw = resolver.value("lrs", args.lrs, "0.01,0.02,0.03,0.04".to_string())?;
    let qubits_raw = resolver.value("qubits", args.qubits, "2,3".to_string())?;
    let ec_depth = resolver.value("ec_depth", args.ec_depth, 3)?;
    let dc_depth = resolver.value("dc_depth", args.dc_depth, 3)?;
    let partitions = resolver.value("partitions", args.partitions, 100)?;
    let iters = resolver.value("iters", args.iters, 150)?;
    let base_seed = resolver.value("seed", args.seed, 0u64)?;
    let init_scale = resolver.value("init_scale", args.init_scale, 0.1)?;

    let lrs: Vec<f64> = parse_list("lrs", &lrs_raw)?;
    if lrs.is_empty() {
        return Err(CliError::usage("lrs needs at least one entry"));
    }
    for &lr in &lrs {
        validate_learning_rate(lr)?;
    }
    let qubit_list: Vec<usize> = parse_list("qubits", &qubits_raw)?;
    if qubit_list.is_empty() {
        return Err(CliError::usage("qubits needs at least one entry"));
    }
    for &q in &qubit_list {
        validate_qubits(q)?;
    }
    validate_descent_settings(iters, init_scale, partitions)?;

    let (mean, variance) =
        resolve_prior(&mut resolver, args.csv, args.column, args.mean, args.variance)?;
    let log_every = resolver.value("log_every", None, 10)?;

    let grid = prior::build_grid(mean, variance, partitions).map_err(map_grid_err)?;
    let out_dir = prepare_out(&out)?;

    let mut summary: Vec<Vec<String>> = Vec::new();
    let mut first_failure: Option<CliError> = None;
    let mut run_index = 0usize;
    for &qubits in &qubit_list {
        let shape = ModelShape { n_qubits: qubits, ec_depth, dc_depth };
        let a_init = mean / qubits as f64;
        let configs: Vec<TrainConfig> = lrs
            .iter()
            .enumerate()
            .map(|(offset, &lr)| TrainConfig {
                learning_rate: lr,
                iterations: iters,
                log_every,
                seed: base_seed.wrapping_add((run_index + offset) as u64),
                init_scale,
                a_init,
            })
            .collect();
        let results = train::sweep(shape, &grid, &configs).map_err(map_train_err)?;
        for (config, result) in configs.iter().zip(results) {
            let name = format!("run-{run_index:02}");
            run_index += 1;
            match result {
                Ok(log) => {
                    let run_dir = prepare_out(&out_dir.join(&name).display().to_string())?;
                    write_training_outputs(&run_dir, &log)?;
                    let mut map = BTreeMap::new();
                    map.insert("qubits".to_string(), qubits.to_string());
                    map.insert("ec_depth".to_string(), ec_depth.to_string());
                    map.insert("dc_depth".to_string(), dc_depth.to_string());
                    map.insert("partitions".to_string(), partitions.to_string());
                    map.insert("lr".to_string(), fmt(config.learning_rate));
                    map.insert("iters".to_string(), iters.to_string());
                    map.insert("seed".to_string(), config.seed.to_string());
                    map.insert("init_scale".to_string(), fmt(init_scale));
                    map.insert("a_init".to_string(), fmt(a_init));
                    map.insert("mean".to_string(), fmt(mean));
                    map.insert("variance".to_string(), fmt(variance));
                    map.insert("log_every".to_string(), log_every.to_string());
                    write_manifest_map(map, "train-qnn", &run_dir)?;
                    println!(
                        "{name} qubits: {qubits} lr: {} seed: {} final loss: {:.4}",
                        fmt(config.learning_rate),
                        config.seed,
                        log.final_loss()
                    );
                    summary.push(vec![
                        name,
                        qubits.to_string(),
                        fmt(config.learning_rate),
                        config.seed.to_string(),
                        fmt(log.initial_loss()),
                        fmt(log.final_loss()),
                    ]);
                }
                Err(err) => {
                    eprintln!("{name} (qubits={qubits}, lr={}) failed: {err}", config.learning_rate);
                    if first_failure.is_none() {
                        first_failure = Some(CliError::Runtime(anyhow::anyhow!(
                            "{name} (qubits={qubits}, lr={}) failed: {err}",
                            config.learning_rate
                        )));
                    }
                }
            }
        }
    }

    write_csv(
        &out_dir.join("summary.csv"),
        &["run", "qubits", "lr", "seed", "initial_loss", "final_loss"],
        &summary,
    )?;
    resolver.write_manifest("sweep-lr", &out_dir)?;
    match first_failure {
        Some(err) => Err(err),
        None => Ok(()),
    }
}

// ---- fisher ----

fn ramsey_1q_model() -> Result<RamseyModel, CliError> {
    RamseyModel::new(1, 1, 1, vec![FRAC_PI_2, 0.0], vec![FRAC_PI_2, 0.0], 1.0).map_err(runtime)
}

fn zero_angle_model(qubits: usize) -> Result<RamseyModel, CliError> {
    let width = ramsey::layer_width(qubits);
    RamseyModel::new(qubits, 1, 1, vec![0.0; width], vec![0.0; width], 1.0).map_err(runtime)
}

pub fn cmd_fisher(args: FisherArgs) -> Result<(), CliError> {
    let mut resolver = Resolver::new(args.common.config.as_deref(), "fisher")?;
    let out = resolver.value("out", args.common.out, "runs/fisher".to_string())?;
    let preset = resolver.value("preset", args.preset, "ramsey-1q".to_string())?;
    let phi_min = resolver.value("phi_min", args.phi_min, 0.0)?;
    let phi_max = resolver.value("phi_max", args.phi_max, PI)?;
    let points = resolver.value("points", args.points, 50)?;
    let step = resolver.value("step", args.step, 1e-5)?;
    let measurements = resolver.value("measurements", args.measurements, 1000usize)?;
    let shots = resolver.optional("shots", args.shots)?;
    let seed = resolver.value("seed", args.seed, 0u64)?;

    if !phi_min.is_finite() || !phi_max.is_finite() || phi_max <= phi_min {
        return Err(CliError::usage(format!(
            "phase range [{phi_min}, {phi_max}] must be finite with phi_max > phi_min"
        )));
    }
    if points == 0 {
        return Err(CliError::usage("points must be at least 1"));
    }
    if step <= 0.0 || !step.is_finite() {
        return Err(CliError::usage(format!("step must be positive and finite, got {step}")));
    }
    if measurements == 0 {
        return Err(CliError::usage("measurements must be at least 1"));
    }
    if shots == Some(0) {
        return Err(CliError::usage("shots must be at least 1"));
    }

    let model = match preset.as_str() {
        "ramsey-1q" => {
            let qubits = resolver.value("qubits", args.qubits, 1)?;
            if qubits != 1 {
                return Err(CliError::usage("preset ramsey-1q is single-qubit; drop --qubits"));
            }
            ramsey_1q_model()?
        }
        "zero" => {
            let qubits = resolver.value("qubits", args.qubits, 2)?;
            validate_qubits(qubits)?;
            zero_angle_model(qubits)?
        }
        other => {
            return Err(CliError::usage(format!(
                "unknown preset {other:?}; expected ramsey-1q or zero"
            )));
        }
    };
    if shots.is_some() {
        resolver.record("repetitions", VARIANCE_REPETITIONS);
    }

    let mut header = vec!["phi", "fisher", "crb"];
    if shots.is_some() {
        header.push("mc_variance");
    }
    // The central difference cannot resolve information below the square of
    // its own rounding noise, ~ε/(2h) per outcome. Inverting such a value
    // would amplify pure rounding error, so the bound is flagged undefined.
    let noise = f64::EPSILON / (2.0 * step);
    let resolution = 100.0 * (model.n_qubits() + 1) as f64 * noise * noise;
    let pitch = (phi_max - phi_min) / points as f64;
    let mut rows = Vec::with_capacity(points);
    for index in 0..points {
        let phi = phi_min + (index as f64 + 0.5) * pitch;
        let result = fisher::fisher_information(&model, phi, step).map_err(|err| match err {
            fisher::FisherError::BadStep { .. } => CliError::usage(err.to_string()),
            other => CliError::Runtime(other.into()),
        })?;
        let crb = if result.fisher < resolution {
            "undefined".to_string()
        } else {
            match fisher::cramer_rao_bound(result.fisher, measurements) {
                Ok(bound) => fmt(bound),
                Err(fisher::FisherError::Unidentifiable { .. }) => "undefined".to_string(),
                Err(other) => return Err(CliError::Runtime(other.into())),
            }
        };
        let mut row = vec![fmt(phi), fmt(result.fisher), crb];
        if let Some(per_row_shots) = shots {
            let spread = fisher::sampled_estimator_variance(
                &model,
                phi,
                per_row_shots,
                VARIANCE_REPETITIONS,
                seed.wrapping_add(index as u64),
            )
            .map_err(|err| match err {
                fisher::FisherError::BadMonteCarlo { .. } => CliError::usage(err.to_string()),
                other => CliError::Runtime(other.into()),
            })?;
            row.push(fmt(spread.variance));
        }
        rows.push(row);
    }

    let out_dir = prepare_out(&out)?;
    write_csv(&out_dir.join("fisher.csv"), &header, &rows)?;
    println!("fisher: {points} rows -> {}", out_dir.join("fisher.csv").display());
    resolver.write_manifest("fisher", &out_dir)
}

// ---- trotter ----

/// Parses a Hamiltonian written as `X+Z`, `0.5*XX+1.5*ZI`, …: components
/// separated by `+`, each an optional `coefficient*` followed by a Pauli
/// string over I, X, Y, Z.
fn parse_hamiltonian(spec: &str) -> Result<Vec<PauliTerm>, CliError> {
    let mut terms = Vec::new();
    for component in spec.split('+') {
        let component = component.trim();
        if component.is_empty() {
            return Err(CliError::usage(format!(
                "hamiltonian {spec:?} has an empty component"
            )));
        }
        let (coefficient, string) = match component.split_once('*') {
            Some((coeff, string)) => {
                let coefficient: f64 = coeff.trim().parse().map_err(|_| {
                    CliError::usage(format!(
                        "hamiltonian coefficient {:?} is not a number",
                        coeff.trim()
                    ))
                })?;
                (coefficient, string.trim())
            }
            None => (1.0, component),
        };
        terms.push(PauliTerm::new(coefficient, string));
    }
    Ok(terms)
}

pub fn cmd_trotter(args: TrotterArgs) -> Result<(), CliError> {
    let mut resolver = Resolver::new(args.common.config.as_deref(), "trotter")?;
    let out = resolver.value("out", args.common.out, "runs/trotter".to_string())?;
    let hamiltonian = resolver.value("hamiltonian", args.hamiltonian, "X+Z".to_string())?;
    let time = resolver.value("time", args.time, 1.0)?;
    let steps_raw = resolver.value("steps", args.steps, "1,2,4,8,16,32".to_string())?;
    let order = resolver.value("order", args.order, 1usize)?;
    resolver.record("seed", 0);

    if !time.is_finite() || time <= 0.0 {
        return Err(CliError::usage(format!("time must be positive and finite, got {time}")));
    }
    if order != 1 {
        return Err(CliError::usage(format!(
            "only the first-order product formula is implemented, got order {order}"
        )));
    }
    let steps_list: Vec<usize> = parse_list("steps", &steps_raw)?;
    if steps_list.is_empty() {
        return Err(CliError::usage("steps needs at least one entry"));
    }
    if let Some(&zero) = steps_list.iter().find(|&&s| s == 0) {
        return Err(CliError::usage(format!("step counts must be at least 1, got {zero}")));
    }

    let terms = parse_hamiltonian(&hamiltonian)?;
    // Structural problems with the Pauli strings are invocation mistakes.
    let operator = trotter::pauli_sum(&terms).map_err(|err| CliError::usage(err.to_string()))?;
    let dim = operator.dim();
    let h_norm = trotter::schatten_inf_norm(operator.entries(), dim, dim).map_err(runtime)?;
    let exact = trotter::exact_evolution(&operator, time).map_err(runtime)?;

    let mut rows = Vec::with_capacity(steps_list.len());
    for &steps in &steps_list {
        let approx = trotter::trotter_first_order(&terms, time, steps).map_err(runtime)?;
        let error = trotter::simulation_error(&exact, &approx).map_err(runtime)?;
        let bound = trotter::paper_error_bound(h_norm, time, steps, order).map_err(runtime)?;
        println!("steps: {steps} error: {error:.6e} paper_bound: {bound:.6e}");
        rows.push(vec![steps.to_string(), fmt(error), fmt(bound)]);
    }

    let out_dir = prepare_out(&out)?;
    write_csv(&out_dir.join("trotter.csv"), &["steps", "error", "paper_bound"], &rows)?;
    resolver.write_manifest("trotter", &out_dir)
}

// ---- train-lstm ----

pub fn cmd_train_lstm(args: TrainLstmArgs) -> Result<(), CliError> {
    let mut resolver = Resolver::new(args.common.config.as_deref(), "train-lstm")?;
    let out = resolver.value("out", args.common.out, "runs/train-lstm".to_string())?;
    let csv = resolver.required("csv", args.csv)?;
    let column = resolver.value("column", args.column, DEFAULT_COLUMN.to_string())?;
    let window = resolver.value("window", args.window, 120usize)?;
    let epochs = resolver.value("epochs", args.epochs, 10usize)?;
    let batch = resolver.value("batch", args.batch, 256usize)?;
    let lr = resolver.value("lr", args.lr, 0.01)?;
    let seed = resolver.value("seed", args.seed, 0u64)?;

    if window == 0 {
        return Err(CliError::usage("window must be at least 1"));
    }
    if epochs == 0 {
        return Err(CliError::usage("epochs must be at least 1"));
    }
    if batch == 0 {
        return Err(CliError::usage("batch must be at least 1"));
    }
    validate_learning_rate(lr)?;

    let map_lstm_err = |err: LstmError| match err {
        LstmError::BadConfig { .. } | LstmError::ZeroWindow => CliError::usage(err.to_string()),
        other => CliError::Runtime(other.into()),
    };

    let series = prior::load_series(&csv, &column).map_err(runtime)?;
    let dataset = lstm::make_windows(&series, window).map_err(map_lstm_err)?;
    let losses = lstm::train_lstm(&dataset, epochs, batch, lr, seed).map_err(map_lstm_err)?;

    for &(epoch, loss) in &losses {
        println!("epoch: {epoch} loss: {loss:.4}");
    }

    let out_dir = prepare_out(&out)?;
    let rows: Vec<Vec<String>> =
        losses.iter().map(|&(epoch, loss)| vec![epoch.to_string(), fmt(loss)]).collect();
    write_csv(&out_dir.join("lstm_loss.csv"), &["epoch", "loss"], &rows)?;
    resolver.write_manifest("train-lstm", &out_dir)
}
