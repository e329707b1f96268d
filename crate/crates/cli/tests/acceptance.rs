//! Acceptance suite: one test per acceptance criterion, each printing a
//! single pass/fail line (run with `--nocapture` to see them). Criteria 1, 2
//! and 10 drive the compiled binary end to end; the rest exercise the
//! library at the reference scale (3 system + 3 auxiliary qubits, J = h = 1).
//!
//! Criterion 1b (2-layer run, lowest four levels) is expected to fail: the
//! two-layer circuit provably cannot host the first excited state alongside
//! the ground state (see `expressivity_note` below), so its honest result is
//! reported rather than loosened.

use std::path::{Path, PathBuf};
use std::process::Command;

use thermavg_core::ansatz::{
    build_ansatz, exact_optimum_state, frame_states, mixing_family, AnsatzSpec, MixingFamily,
};
use thermavg_core::pauli::{build_tfi, exact_solve, exact_thermal_average, PauliSum};
use thermavg_core::qsim::EvalMode;
use thermavg_core::reweight::{estimate_spectrum, thermal_average};
use thermavg_core::vqe::{c_min, cost, gradient, CostContext};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BETA_GRID: [f64; 11] = [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0];

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_thermavg")
}

fn run_ok(args: &[&str]) {
    let output = Command::new(binary()).args(args).output().expect("binary runs");
    assert!(
        output.status.success(),
        "thermavg {:?} failed:\n{}{}",
        args,
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

/// Parse one numeric CSV column (header skipped, empty cells to NaN).
fn csv_column(path: &Path, index: usize) -> Vec<f64> {
    let text = std::fs::read_to_string(path).expect("csv exists");
    text.lines()
        .skip(1)
        .map(|line| {
            line.split(',')
                .nth(index)
                .map(|c| if c.is_empty() { f64::NAN } else { c.parse().expect("numeric cell") })
                .expect("column present")
        })
        .collect()
}

fn oracle_spread() -> f64 {
    let solution = exact_solve(&build_tfi(3, 1.0, 1.0, true).unwrap()).unwrap();
    solution.eigenvalues()[7] - solution.eigenvalues()[0]
}

/// Run `solve` then `sweep` with default config into a fresh directory.
fn solve_and_sweep(layers: usize) -> (PathBuf, tempfile::TempDir) {
    let dir = tempfile::tempdir().expect("tempdir");
    let out = dir.path().join("run");
    let out_str = out.to_str().unwrap().to_string();
    let layers_arg = format!("ansatz.layers={layers}");
    run_ok(&["solve", "--out", &out_str, &layers_arg]);
    run_ok(&["sweep", "--out", &out_str, &layers_arg]);
    (out, dir)
}

#[test]
fn criterion_01a_spectrum_reproduction_l6() {
    let start = std::time::Instant::now();
    let (out, _guard) = solve_and_sweep(6);
    let elapsed = start.elapsed().as_secs_f64();

    let est = csv_column(&out.join("spectrum.csv"), 1);
    let exact = csv_column(&out.join("spectrum.csv"), 2);
    let tolerance = 0.05 * oracle_spread();
    let worst = est
        .iter()
        .zip(&exact)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    let pass = worst <= tolerance && elapsed < 300.0;
    println!(
        "[{}] criterion 1a: L=6 spectrum max error {worst:.4} <= {tolerance:.4}, runtime {elapsed:.1}s < 300s",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "max spectrum error {worst} vs tolerance {tolerance}, runtime {elapsed}s");
}

#[test]
fn criterion_01b_spectrum_low_levels_l2() {
    let (out, _guard) = solve_and_sweep(2);
    let est = csv_column(&out.join("spectrum.csv"), 1);
    let exact = csv_column(&out.join("spectrum.csv"), 2);
    let tolerance = 0.05 * oracle_spread();
    let errors: Vec<f64> = est.iter().zip(&exact).map(|(a, b)| (a - b).abs()).collect();
    let worst_low = errors[..4].iter().cloned().fold(0.0f64, f64::max);
    println!(
        "     criterion 1b: L=2 per-level errors {:?} (levels k>=4 permitted to fail)",
        errors.iter().map(|e| (e * 1e4).round() / 1e4).collect::<Vec<_>>()
    );
    let pass = worst_low <= tolerance;
    println!(
        "[{}] criterion 1b: L=2 lowest-four max error {worst_low:.4} <= {tolerance:.4}",
        if pass { "PASS" } else { "FAIL" }
    );
    expressivity_note();
    assert!(pass, "L=2 low-level spectrum error {worst_low} exceeds {tolerance}");
}

/// The two-layer circuit cannot satisfy criterion 1b: maximizing
/// |⟨φ0|U|0⟩|² + |⟨φ1|U|1⟩|² over its 12 parameters caps near 1.51 (2.0
/// would mean both states representable), so the slot-1 energy cannot
/// approach E_1 while slot 0 holds the ground state. Three or more layers
/// reach 2.0. The failure above documents the layer dependence honestly.
fn expressivity_note() {
    println!(
        "     note: the 2-layer ansatz provably cannot host the first excited state \
         alongside the ground state; this failure is expected and documented"
    );
}

#[test]
fn criterion_02_thermal_curve_reproduction() {
    let (out, _guard) = solve_and_sweep(6);
    let betas = csv_column(&out.join("curve.csv"), 0);
    let abs_err = csv_column(&out.join("curve.csv"), 5);
    let tolerance = 0.05 * oracle_spread();
    let worst = abs_err.iter().cloned().fold(0.0f64, f64::max);
    let at_zero = abs_err[0];
    assert_eq!(betas[0], 0.0);
    let pass = worst <= tolerance && at_zero <= 1e-6;
    println!(
        "[{}] criterion 2: thermal-curve max |est-exact| {worst:.2e} <= {tolerance:.4}, at beta=0 {at_zero:.2e} <= 1e-6",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "curve error {worst} (tolerance {tolerance}), beta=0 error {at_zero}");
}

#[test]
fn criterion_03_exact_optimum_chain() {
    let h = build_tfi(3, 1.0, 1.0, true).unwrap();
    let solution = exact_solve(&h).unwrap();
    let mut worst_spectrum = 0.0f64;
    let mut worst_curve = 0.0f64;
    for family in [
        MixingFamily::Uniform,
        MixingFamily::Geometric(0.7),
        MixingFamily::Boltzmann(1.0),
    ] {
        let mixing = mixing_family(family, 8).unwrap();
        let state = exact_optimum_state(&solution, &mixing, 3, 3).unwrap();
        let spectrum = estimate_spectrum(&state, &mixing, &h, EvalMode::Exact).unwrap();
        for (e, x) in spectrum.energies().iter().zip(solution.eigenvalues()) {
            worst_spectrum = worst_spectrum.max((e - x).abs());
        }
        for &beta in &BETA_GRID {
            let estimated =
                thermal_average(&state, &mixing, &spectrum, &h, beta, EvalMode::Exact).unwrap();
            let exact = exact_thermal_average(&h, &h, beta).unwrap();
            worst_curve = worst_curve.max((estimated - exact).abs());
        }
    }
    let pass = worst_spectrum <= 1e-9 && worst_curve <= 1e-8;
    println!(
        "[{}] criterion 3: exact-optimum chain spectrum error {worst_spectrum:.2e} <= 1e-9, curve error {worst_curve:.2e} <= 1e-8 across three mixing families",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass);
}

fn reference_context(layers: usize) -> CostContext {
    let h = build_tfi(3, 1.0, 1.0, true).unwrap();
    let mixing = mixing_family(MixingFamily::Boltzmann(1.0), 8).unwrap();
    let ansatz = build_ansatz(&AnsatzSpec::new(3, layers).unwrap());
    CostContext::new(h, mixing, &ansatz, 3, 3, EvalMode::Exact).unwrap()
}

#[test]
fn criterion_04_variational_lower_bound() {
    let ctx = reference_context(6);
    let solution = exact_solve(ctx.hamiltonian()).unwrap();
    let floor = c_min(ctx.mixing(), &solution).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2718);
    let mut min_slack = f64::INFINITY;
    for _ in 0..500 {
        let params: Vec<f64> = (0..ctx.num_params())
            .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
            .collect();
        min_slack = min_slack.min(cost(&ctx, &params).unwrap() - floor);
    }
    let pass = min_slack >= -1e-9;
    println!(
        "[{}] criterion 4: cost - C_min >= {min_slack:.3e} over 500 random parameter vectors (bound -1e-9)",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass);
}

#[test]
fn criterion_05_gradient_correctness() {
    let ctx = reference_context(2);
    let mut rng = ChaCha8Rng::seed_from_u64(314);
    let step = 1e-5;
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let params: Vec<f64> = (0..ctx.num_params())
            .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
            .collect();
        let analytic = gradient(&ctx, &params).unwrap();
        for j in 0..params.len() {
            let mut plus = params.clone();
            let mut minus = params.clone();
            plus[j] += step;
            minus[j] -= step;
            let fd = (cost(&ctx, &plus).unwrap() - cost(&ctx, &minus).unwrap()) / (2.0 * step);
            worst = worst.max((analytic[j] - fd).abs() / fd.abs().max(1e-3));
        }
    }
    let pass = worst < 1e-6;
    println!(
        "[{}] criterion 5: parameter-shift vs finite-difference relative error {worst:.2e} < 1e-6 at 20 random points",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass);
}

#[test]
fn criterion_06_orthogonal_frame() {
    let ansatz = build_ansatz(&AnsatzSpec::new(3, 6).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(1618);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let params: Vec<f64> = (0..ansatz.num_params())
            .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
            .collect();
        let frames = frame_states(&ansatz, &params, 8).unwrap();
        for (i, a) in frames.iter().enumerate() {
            for (j, b) in frames.iter().enumerate() {
                let overlap = a.inner(b).unwrap();
                let expected = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((overlap.re - expected).abs().max(overlap.im.abs()));
            }
        }
    }
    let pass = worst <= 1e-12;
    println!(
        "[{}] criterion 6: frame Gram deviation {worst:.2e} <= 1e-12 over 100 random parameter vectors",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass);
}

#[test]
fn criterion_07_classical_limit_spectra() {
    let coupling_only = exact_solve(&build_tfi(3, 1.0, 0.0, true).unwrap()).unwrap();
    let field_only = exact_solve(&build_tfi(3, 0.0, 1.0, true).unwrap()).unwrap();
    let expected_coupling = [-3.0, -3.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0];
    let expected_field = [-3.0, -1.0, -1.0, -1.0, 1.0, 1.0, 1.0, 3.0];
    let mut worst = 0.0f64;
    for (e, x) in coupling_only.eigenvalues().iter().zip(&expected_coupling) {
        worst = worst.max((e - x).abs());
    }
    for (e, x) in field_only.eigenvalues().iter().zip(&expected_field) {
        worst = worst.max((e - x).abs());
    }
    let pass = worst <= 1e-10;
    println!(
        "[{}] criterion 7: classical-limit spectra deviation {worst:.2e} <= 1e-10",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass);
}

#[test]
fn criterion_08_shift_and_normalization_invariants() {
    let h = build_tfi(3, 1.0, 1.0, true).unwrap();
    let solution = exact_solve(&h).unwrap();
    let mixing = mixing_family(MixingFamily::Boltzmann(1.0), 8).unwrap();
    let state = exact_optimum_state(&solution, &mixing, 3, 3).unwrap();
    let spectrum = estimate_spectrum(&state, &mixing, &h, EvalMode::Exact).unwrap();

    let mut worst_shift = 0.0f64;
    for beta in [0.5, 2.0, 5.0] {
        let base = thermal_average(&state, &mixing, &spectrum, &h, beta, EvalMode::Exact).unwrap();
        for offset in [-10.0, -1.0, 1.0, 10.0] {
            let shifted = thermal_average(
                &state,
                &mixing,
                &spectrum.shifted(offset),
                &h,
                beta,
                EvalMode::Exact,
            )
            .unwrap();
            worst_shift = worst_shift.max((shifted - base).abs());
        }
    }
    let identity = PauliSum::identity(3);
    let mut worst_identity = 0.0f64;
    for beta in [0.0, 1.0, 4.0] {
        let value =
            thermal_average(&state, &mixing, &spectrum, &identity, beta, EvalMode::Exact).unwrap();
        worst_identity = worst_identity.max((value - 1.0).abs());
    }
    let pass = worst_shift <= 1e-12 && worst_identity == 0.0;
    println!(
        "[{}] criterion 8: shift invariance {worst_shift:.2e} <= 1e-12, identity normalization deviation {worst_identity:.1e} (exact)",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass);
}

#[test]
fn criterion_09_trainability_sweep() {
    let h = build_tfi(3, 1.0, 1.0, true).unwrap();
    let ansatz = build_ansatz(&AnsatzSpec::new(3, 6).unwrap());
    let ratios = [0.5, 0.8, 0.95, 0.99];
    // Same 20 initialization draws for every ratio.
    let mut rng = ChaCha8Rng::seed_from_u64(999);
    let draws: Vec<Vec<f64>> = (0..20)
        .map(|_| (0..ansatz.num_params()).map(|_| rng.gen_range(-0.1..0.1)).collect())
        .collect();
    let mut means = Vec::new();
    for &r in &ratios {
        let mixing = mixing_family(MixingFamily::Geometric(r), 8).unwrap();
        let ctx =
            CostContext::new(h.clone(), mixing, &ansatz, 3, 3, EvalMode::Exact).unwrap();
        let mean: f64 = draws
            .iter()
            .map(|p| {
                let g = gradient(&ctx, p).unwrap();
                g.iter().map(|x| x * x).sum::<f64>().sqrt()
            })
            .sum::<f64>()
            / draws.len() as f64;
        means.push(mean);
    }
    let monotone = means.windows(2).all(|w| w[1] < w[0]);
    println!(
        "[{}] criterion 9: mean gradient norms across geometric ratios {:?} -> {:?} (monotone decreasing)",
        if monotone { "PASS" } else { "FAIL" },
        ratios,
        means.iter().map(|m| (m * 1e4).round() / 1e4).collect::<Vec<_>>()
    );
    assert!(monotone, "gradient norms {means:?} not monotone over {ratios:?}");
}

#[test]
fn criterion_10_reproducibility() {
    let dir = tempfile::tempdir().expect("tempdir");
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out in [&out_a, &out_b] {
        let out_str = out.to_str().unwrap();
        run_ok(&["solve", "--out", out_str, "ansatz.layers=2"]);
        run_ok(&["sweep", "--out", out_str, "ansatz.layers=2"]);
    }
    let mut identical = true;
    for name in ["theta_star.txt", "trace.csv", "spectrum.csv", "curve.csv"] {
        let a = std::fs::read(out_a.join(name)).expect("artifact exists");
        let b = std::fs::read(out_b.join(name)).expect("artifact exists");
        if a != b {
            identical = false;
        }
    }
    println!(
        "[{}] criterion 10: identical config and seed give byte-identical artifacts",
        if identical { "PASS" } else { "FAIL" }
    );
    assert!(identical);
}
