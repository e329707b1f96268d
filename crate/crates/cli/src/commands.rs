//! The four pipeline commands: `solve` (VQE stage), `sweep` (reweighting
//! stage), `oracle` (exact reference), and `validate` (property suite).

use std::path::{Path, PathBuf};
use std::time::Instant;

use thermavg_core::ansatz::{build_ansatz, mixing_family, AnsatzSpec, MixingSpec};
use thermavg_core::checks::{run_all, CheckConfig, Fault};
use thermavg_core::pauli::{
    build_tfi, exact_solve, exact_thermal_average, PauliSum, MAX_DENSE_QUBITS,
};
use thermavg_core::qsim::EvalMode;
use thermavg_core::reweight::{beta_sweep, estimate_spectrum, truncation_reference};
use thermavg_core::vqe::{c_min, minimize, CostContext, OptimizerConfig};

use crate::config::{ObservableChoice, RunConfig};
use crate::error::CliError;
use crate::output::{csv_text, fmt17, write_file, RunSummary};

fn build_model(cfg: &RunConfig) -> Result<PauliSum, CliError> {
    Ok(build_tfi(cfg.q_s, cfg.coupling, cfg.field, cfg.periodic)?)
}

fn build_mixing(cfg: &RunConfig) -> Result<MixingSpec, CliError> {
    Ok(mixing_family(cfg.mixing_family_kind(), 1usize << cfg.q_a)?)
}

fn build_observable(cfg: &RunConfig, hamiltonian: &PauliSum) -> Result<PauliSum, CliError> {
    match &cfg.observable {
        ObservableChoice::Energy => Ok(hamiltonian.clone()),
        ObservableChoice::File(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Io(format!("cannot read observable {}: {e}", path.display()))
            })?;
            let obs = PauliSum::parse_text(&text).map_err(|e| {
                CliError::Config(format!("observable {}: {e}", path.display()))
            })?;
            if obs.num_qubits() != cfg.q_s {
                return Err(CliError::Config(format!(
                    "observable {} acts on {} qubits, model has {}",
                    path.display(),
                    obs.num_qubits(),
                    cfg.q_s
                )));
            }
            Ok(obs)
        }
    }
}

fn eval_mode(cfg: &RunConfig) -> EvalMode {
    if cfg.is_shot_mode() {
        EvalMode::Shots { shots: cfg.shots, seed: cfg.seed }
    } else {
        EvalMode::Exact
    }
}

fn optimizer_config(cfg: &RunConfig) -> OptimizerConfig {
    OptimizerConfig {
        method: cfg.opt_method(),
        max_iterations: cfg.max_iterations,
        learning_rate: cfg.learning_rate,
        learning_rate_final: cfg.learning_rate_final,
        tolerance: cfg.tolerance,
        seed: cfg.seed,
        restarts: cfg.restarts,
        spsa_perturbation: 0.1,
    }
}

fn oracle_enabled(cfg: &RunConfig) -> bool {
    cfg.q_s <= MAX_DENSE_QUBITS
}

/// Run the variational stage and persist θ*, the optimizer trace, and the
/// run summary.
pub fn cmd_solve(cfg: &RunConfig, trace_stdout: bool) -> Result<(), CliError> {
    cfg.validate()?;
    let hamiltonian = build_model(cfg)?;
    let mixing = build_mixing(cfg)?;
    let ansatz = build_ansatz(&AnsatzSpec::new(cfg.q_s, cfg.layers)?);
    let ctx = CostContext::new(
        hamiltonian.clone(),
        mixing.clone(),
        &ansatz,
        cfg.q_a,
        cfg.q_s,
        eval_mode(cfg),
    )?;

    let start = Instant::now();
    let result = minimize(&ctx, &optimizer_config(cfg))?;
    let solve_seconds = start.elapsed().as_secs_f64();

    let mut summary = RunSummary::new("solve");
    summary.result("best_cost", fmt17(result.best_cost));
    summary.result("converged", result.converged.to_string());
    summary.result("iterations_used", result.iterations_used.to_string());
    if oracle_enabled(cfg) {
        let solution = exact_solve(&hamiltonian)?;
        let floor = c_min(&mixing, &solution)?;
        summary.result("c_min", fmt17(floor));
        summary.result("cost_gap", fmt17(result.best_cost - floor));
    }
    summary.timing("solve", solve_seconds);

    let theta_path = cfg.out.join("theta_star.txt");
    let theta_text: String =
        result.best_params.iter().map(|t| format!("{}\n", fmt17(*t))).collect();
    write_file(&theta_path, &theta_text)?;
    summary.file(&theta_path);

    let trace_path = cfg.out.join("trace.csv");
    let rows: Vec<Vec<Option<String>>> = result
        .trace
        .iter()
        .map(|p| {
            vec![
                Some(p.iteration.to_string()),
                Some(fmt17(p.cost)),
                p.grad_norm.is_finite().then(|| fmt17(p.grad_norm)),
            ]
        })
        .collect();
    write_file(&trace_path, &csv_text("iteration,cost,grad_norm", &rows))?;
    summary.file(&trace_path);

    if trace_stdout {
        for p in result.trace.iter().step_by(50) {
            println!("iter {:>6}  cost {:+.12e}", p.iteration, p.cost);
        }
    }

    let summary_path = summary.write(cfg)?;
    println!(
        "solve: best_cost = {:.12e} ({} iterations, converged = {}) -> {}",
        result.best_cost,
        result.iterations_used,
        result.converged,
        summary_path.display()
    );
    Ok(())
}

fn read_theta(path: &Path, expected: usize) -> Result<Vec<f64>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read angles {}: {e}", path.display())))?;
    let mut values = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| {
            CliError::Config(format!(
                "angle file {} line {}: invalid number {line:?}",
                path.display(),
                idx + 1
            ))
        })?;
        values.push(v);
    }
    if values.len() != expected {
        return Err(CliError::Config(format!(
            "angle file {} holds {} parameters, ansatz needs {expected}",
            path.display(),
            values.len()
        )));
    }
    Ok(values)
}

/// Prepare the state once from persisted θ*, estimate the spectrum, run the
/// β sweep, and write `spectrum.csv` and `curve.csv`.
pub fn cmd_sweep(cfg: &RunConfig, theta_path: Option<&Path>) -> Result<(), CliError> {
    cfg.validate()?;
    let hamiltonian = build_model(cfg)?;
    let mixing = build_mixing(cfg)?;
    let ansatz = build_ansatz(&AnsatzSpec::new(cfg.q_s, cfg.layers)?);
    let observable = build_observable(cfg, &hamiltonian)?;
    let mode = eval_mode(cfg);

    let default_theta = cfg.out.join("theta_star.txt");
    let theta_path = theta_path.unwrap_or(&default_theta);
    let theta = read_theta(theta_path, ansatz.num_params())?;

    let start = Instant::now();
    let state =
        thermavg_core::ansatz::prepare_full_state(&mixing, &ansatz, &theta, cfg.q_a, cfg.q_s)?;
    let spectrum = estimate_spectrum(&state, &mixing, &hamiltonian, mode)?;
    let spectrum_seconds = start.elapsed().as_secs_f64();

    let oracle = if oracle_enabled(cfg) { Some(exact_solve(&hamiltonian)?) } else { None };

    let spectrum_rows: Vec<Vec<Option<String>>> = spectrum
        .energies()
        .iter()
        .enumerate()
        .map(|(k, e)| {
            vec![
                Some(k.to_string()),
                Some(fmt17(*e)),
                oracle.as_ref().map(|o| fmt17(o.eigenvalues()[k])),
            ]
        })
        .collect();
    let spectrum_path = cfg.out.join("spectrum.csv");
    write_file(&spectrum_path, &csv_text("k,E_est,E_exact", &spectrum_rows))?;

    let betas = cfg.beta_grid();
    let start = Instant::now();
    let curve = beta_sweep(&state, &mixing, &spectrum, &observable, &betas, mode)?;
    let sweep_seconds = start.elapsed().as_secs_f64();

    let k_levels = mixing.k();
    let mut curve_rows: Vec<Vec<Option<String>>> = Vec::with_capacity(curve.points().len());
    for point in curve.points() {
        let (exact, reference) = if oracle.is_some() {
            (
                Some(exact_thermal_average(&hamiltonian, &observable, point.beta)?),
                Some(truncation_reference(&hamiltonian, &observable, k_levels, point.beta)?),
            )
        } else {
            (None, None)
        };
        curve_rows.push(vec![
            Some(fmt17(point.beta)),
            Some(fmt17(point.value)),
            point.stat_error.map(fmt17),
            exact.map(fmt17),
            reference.map(fmt17),
            exact.map(|x| fmt17((point.value - x).abs())),
        ]);
    }
    let curve_path = cfg.out.join("curve.csv");
    write_file(
        &curve_path,
        &csv_text("beta,estimate,stat_error,exact,truncation_reference,abs_err", &curve_rows),
    )?;

    let mut summary = RunSummary::new("sweep");
    summary.result("theta_file", theta_path.display().to_string());
    summary.result(
        "spectrum_estimate",
        spectrum.energies().iter().map(|e| fmt17(*e)).collect::<Vec<_>>().join(" "),
    );
    if let Some(o) = &oracle {
        let worst = spectrum
            .energies()
            .iter()
            .zip(o.eigenvalues())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        summary.result("max_spectrum_error", fmt17(worst));
    }
    summary.timing("spectrum", spectrum_seconds);
    summary.timing("sweep", sweep_seconds);
    summary.file(&spectrum_path);
    summary.file(&curve_path);
    let summary_path = summary.write(cfg)?;
    println!(
        "sweep: {} beta points -> {}, {}, {}",
        curve.points().len(),
        spectrum_path.display(),
        curve_path.display(),
        summary_path.display()
    );
    Ok(())
}

/// Write the exact spectrum and the exact thermal curve of the configured
/// observable.
pub fn cmd_oracle(cfg: &RunConfig) -> Result<(), CliError> {
    cfg.validate()?;
    let hamiltonian = build_model(cfg)?;
    let observable = build_observable(cfg, &hamiltonian)?;
    let start = Instant::now();
    let solution = exact_solve(&hamiltonian)?;

    let spectrum_rows: Vec<Vec<Option<String>>> = solution
        .eigenvalues()
        .iter()
        .enumerate()
        .map(|(k, e)| vec![Some(k.to_string()), Some(fmt17(*e))])
        .collect();
    let spectrum_path = cfg.out.join("oracle_spectrum.csv");
    write_file(&spectrum_path, &csv_text("k,energy", &spectrum_rows))?;

    let curve_rows: Vec<Vec<Option<String>>> = cfg
        .beta_grid()
        .iter()
        .map(|&beta| {
            Ok(vec![
                Some(fmt17(beta)),
                Some(fmt17(exact_thermal_average(&hamiltonian, &observable, beta)?)),
            ])
        })
        .collect::<Result<_, CliError>>()?;
    let curve_path = cfg.out.join("oracle_curve.csv");
    write_file(&curve_path, &csv_text("beta,value", &curve_rows))?;

    let mut summary = RunSummary::new("oracle");
    summary.result("ground_energy", fmt17(solution.eigenvalues()[0]));
    summary.timing("oracle", start.elapsed().as_secs_f64());
    summary.file(&spectrum_path);
    summary.file(&curve_path);
    let summary_path = summary.write(cfg)?;
    println!(
        "oracle: spectrum and curve -> {}, {}, {}",
        spectrum_path.display(),
        curve_path.display(),
        summary_path.display()
    );
    Ok(())
}

/// Run the property suite and report one pass/fail line per check.
pub fn cmd_validate(quick: bool, fault: Option<&str>, seed: Option<u64>) -> Result<(), CliError> {
    let fault = match fault {
        None => None,
        Some(name) => Some(Fault::parse(name).ok_or_else(|| {
            CliError::Config(format!("unknown fault injection {name:?} (available: gradient)"))
        })?),
    };
    let check_cfg = CheckConfig {
        quick,
        fault,
        seed: seed.unwrap_or(CheckConfig::default().seed),
    };
    let start = Instant::now();
    let checks = run_all(&check_cfg)?;
    let mut failures = 0;
    for check in &checks {
        println!(
            "[{}] {:<32} deviation {:>12.4e}  threshold {:>9.1e}",
            if check.passed { "PASS" } else { "FAIL" },
            check.name,
            check.deviation,
            check.threshold
        );
        if !check.passed {
            failures += 1;
        }
    }
    println!(
        "validate: {}/{} checks passed in {:.1}s",
        checks.len() - failures,
        checks.len(),
        start.elapsed().as_secs_f64()
    );
    if failures > 0 {
        return Err(CliError::Validation(format!("{failures} property checks failed")));
    }
    Ok(())
}

/// Resolve the effective configuration for a command invocation.
pub fn resolve_config(
    config_path: Option<&Path>,
    overrides: &[(String, String)],
    out: Option<&Path>,
    seed: Option<u64>,
) -> Result<RunConfig, CliError> {
    let mut cfg = match config_path {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    for (key, value) in overrides {
        cfg.set(key, value, "command line")?;
    }
    if let Some(dir) = out {
        cfg.out = PathBuf::from(dir);
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}
