//! Runnable property suite mirroring the library's documented invariants.
//!
//! Every check reports its measured worst-case deviation against a fixed
//! threshold, so the same functions back both the `validate` CLI command and
//! the integration tests. All randomness is seeded; a passing suite stays
//! passing.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ansatz::{
    assemble_branch_state, build_ansatz, build_mixing_circuit, exact_optimum_state, frame_states,
    mixing_family, AnsatzSpec, MixingFamily, MixingSpec,
};
use crate::error::Result;
use crate::pauli::{
    build_tfi, diag_circ, exact_solve, exact_thermal_average, to_dense, Pauli, PauliString,
    PauliSum,
};
use crate::qsim::{Circuit, EvalMode, Gate, StateVector};
use crate::reweight::{
    beta_sweep, estimate_spectrum, thermal_average, truncation_reference, SpectrumEstimate,
};
use crate::vqe::{c_min, cost, gradient, minimize, CostContext, OptMethod, OptimizerConfig};

/// Outcome of one property check.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    /// Worst observed deviation, in the units of the threshold.
    pub deviation: f64,
    pub threshold: f64,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn from_deviation(name: &'static str, deviation: f64, threshold: f64, detail: String) -> Check {
        Check { name, deviation, threshold, passed: deviation <= threshold, detail }
    }
}

/// Deliberate fault injections for harness self-tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Flip the sign of the analytic gradient inside the gradient check.
    GradientSignFlip,
}

impl Fault {
    pub fn parse(name: &str) -> Option<Fault> {
        match name {
            "gradient" => Some(Fault::GradientSignFlip),
            _ => None,
        }
    }
}

/// Suite configuration.
#[derive(Debug, Clone, Copy)]
pub struct CheckConfig {
    /// Subsample repetition counts for a fast run.
    pub quick: bool,
    pub fault: Option<Fault>,
    pub seed: u64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig { quick: false, fault: None, seed: 7777 }
    }
}

impl CheckConfig {
    fn reps(&self, full: usize, quick: usize) -> usize {
        if self.quick {
            quick
        } else {
            full
        }
    }
}

/// Run the full property suite.
pub fn run_all(cfg: &CheckConfig) -> Result<Vec<Check>> {
    Ok(vec![
        norm_preservation(cfg)?,
        unitarity_roundtrip(cfg)?,
        born_consistency(cfg)?,
        projector_completeness(cfg)?,
        diagcirc_roundtrip(cfg)?,
        oracle_consistency(cfg)?,
        thermal_limits(cfg)?,
        degeneracy_detection(cfg)?,
        orthogonal_frame(cfg)?,
        mixing_fidelity(cfg)?,
        state_assembly(cfg)?,
        phase_freedom(cfg)?,
        variational_lower_bound(cfg)?,
        gradient_exactness(cfg)?,
        shot_unbiasedness(cfg)?,
        monotone_best(cfg)?,
        degenerate_cost_equality(cfg)?,
        gamma_invariance(cfg)?,
        shift_invariance(cfg)?,
        identity_normalization(cfg)?,
        beta_infinity_limit(cfg)?,
        consistency_chain(cfg)?,
    ])
}

fn random_circuit(rng: &mut ChaCha8Rng, num_qubits: usize, gates: usize) -> Circuit {
    let mut circuit = Circuit::new(num_qubits, 0);
    for _ in 0..gates {
        let target = rng.gen_range(0..num_qubits);
        let gate = match rng.gen_range(0..7) {
            0 => Gate::x(target),
            1 => Gate::h(target),
            2 => Gate::s_adjoint_h(target),
            3 => Gate::rx(target, rng.gen_range(0.0..std::f64::consts::TAU)),
            4 => Gate::ry(target, rng.gen_range(0.0..std::f64::consts::TAU)),
            5 => Gate::rz(target, rng.gen_range(0.0..std::f64::consts::TAU)),
            _ => {
                if num_qubits < 2 {
                    Gate::h(target)
                } else {
                    let mut control = rng.gen_range(0..num_qubits);
                    while control == target {
                        control = rng.gen_range(0..num_qubits);
                    }
                    Gate::cnot(control, target)
                }
            }
        };
        circuit.push(gate).expect("generated gate is valid");
    }
    circuit
}

fn random_state(rng: &mut ChaCha8Rng, num_qubits: usize) -> Result<StateVector> {
    let mut state = StateVector::zero(num_qubits)?;
    let circuit = random_circuit(rng, num_qubits, 6 * num_qubits);
    state.run_circuit(&circuit, &[])?;
    Ok(state)
}

fn random_pauli_sum(rng: &mut ChaCha8Rng, num_qubits: usize, max_terms: usize) -> PauliSum {
    let mut sum = PauliSum::new(num_qubits);
    let terms = rng.gen_range(1..=max_terms);
    for _ in 0..terms {
        let axes: Vec<Pauli> = (0..num_qubits)
            .map(|_| match rng.gen_range(0..4) {
                0 => Pauli::I,
                1 => Pauli::X,
                2 => Pauli::Y,
                _ => Pauli::Z,
            })
            .collect();
        sum.add(rng.gen_range(-2.0..2.0), PauliString::new(axes))
            .expect("term width matches");
    }
    if sum.num_terms() == 0 {
        sum.add(1.0, PauliString::identity(num_qubits)).expect("identity term");
    }
    sum
}

fn norm_preservation(cfg: &CheckConfig) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let reps = cfg.reps(1000, 100);
    let mut worst: f64 = 0.0;
    for _ in 0..reps {
        let mut state = StateVector::zero(4)?;
        let circuit = random_circuit(&mut rng, 4, 40);
        state.run_circuit(&circuit, &[])?;
        worst = worst.max((state.norm() - 1.0).abs());
    }
    Ok(Check::from_deviation(
        "qsim/norm-preservation",
        worst,
        1e-10,
        format!("{reps} random circuits on 4 qubits"),
    ))
}

fn unitarity_roundtrip(cfg: &CheckConfig) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
    let reps = cfg.reps(200, 40);
    let mut worst: f64 = 0.0;
    for _ in 0..reps {
        let state = random_state(&mut rng, 3)?;
        let angle = rng.gen_range(0.0..std::f64::consts::TAU);
        let q = rng.gen_range(0..3);
        let other = (q + 1 + rng.gen_range(0..2)) % 3;
        let pairs: Vec<(Gate, Gate)> = vec![
            (Gate::rx(q, angle), Gate::rx(q, -angle)),
            (Gate::ry(q, angle), Gate::ry(q, -angle)),
            (Gate::rz(q, angle), Gate::rz(q, -angle)),
            (Gate::x(q), Gate::x(q)),
            (Gate::h(q), Gate::h(q)),
            (Gate::cnot(other, q), Gate::cnot(other, q)),
        ];
        for (fwd, back) in pairs {
            let mut round = state.clone();
            round.apply_gate(&fwd, &[])?;
            round.apply_gate(&back, &[])?;
            let dev = round
                .amplitudes()
                .iter()
                .zip(state.amplitudes())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0f64, f64::max);
            worst = worst.max(dev);
        }
    }
    Ok(Check::from_deviation(
        "qsim/unitarity-roundtrip",
        worst,
        1e-12,
        format!("{reps} gate/inverse pairs on random 3-qubit states"),
    ))
}

fn born_consistency(cfg: &CheckConfig) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(2));
    let state = random_state(&mut rng, 3)?;
    let shots: u64 = if cfg.quick { 100_000 } else { 1_000_000 };
    let counts = state.sample_counts(&Circuit::new(3, 0), shots, cfg.seed.wrapping_add(3))?;
    let mut worst: f64 = 0.0;
    for (idx, amp) in state.amplitudes().iter().enumerate() {
        let p = amp.norm_sqr();
        let observed = counts.get(&idx).copied().unwrap_or(0) as f64;
        if p > 1e-12 && p < 1.0 {
            let sigma = (shots as f64 * p * (1.0 - p)).sqrt();
            worst = worst.max((observed - shots as f64 * p).abs() / sigma);
        } else if p <= 1e-12 && observed > 0.0 {
            worst = f64::INFINITY;
        }
    }
    Ok(Check::from_deviation(
        "qsim/born-consistency",
        worst,
        5.0,
        format!("{shots} shots against squared amplitudes, in binomial sigmas"),
    ))
}

fn projector_completeness(cfg: &CheckConfig) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(4));
    let reps = cfg.reps(100, 20);
    let mut worst: f64 = 0.0;
    for _ in 0..reps {
        let state = random_state(&mut rng, 6)?;
        let total: f64 = (0..8)
            .map(|k| state.aux_branch_probability(3, k))
            .collect::<Result<Vec<_>>>()?
            .iter()
            .sum();
        worst = worst.max((total - 1.0).abs());
    }
    Ok(Check::from_deviation(
        "qsim/projector-completeness",
        worst,
        1e-10,
        format!("{reps} random 6-qubit states, 8 auxiliary branches"),
    ))
}

fn diagcirc_roundtrip(cfg: &CheckConfig) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(5));
    let reps = cfg.reps(200, 40);
    let mut worst: f64 = 0.0;
    for _ in 0..reps {
        let n = rng.gen_range(1..=5);
        let sum = random_pauli_sum(&mut rng, n, 8);
        worst = worst.max(diagcirc_reassembly_error(&sum)?);
    }
    Ok(Check::from_deviation(
        "pauli/diagcirc-roundtrip",
        worst,
        1e-12,
        format!("{reps} random Pauli sums on up to 5 qubits"),
    ))
}

/// Entrywise error of Σ_m S_m† Λ_m S_m against the dense observable.
pub fn diagcirc_reassembly_error(obs: &PauliSum) -> Result<f64> {
    let n = obs.num_qubits();
    let dim = 1usize << n;
    let settings = diag_circ(obs)?;
    let mut reassembled = DMatrix::<Complex64>::zeros(dim, dim);
    for setting in &settings {
        // Columns of S as statevectors.
        let mut s_matrix = DMatrix::<Complex64>::zeros(dim, dim);
        for col in 0..dim {
            let mut basis = StateVector::basis(n, col)?;
            basis.run_circuit(setting.basis_change(), &[])?;
            for row in 0..dim {
                s_matrix[(row, col)] = basis.amplitudes()[row];
            }
        }
        let lambda = DMatrix::<Complex64>::from_fn(dim, dim, |r, c| {
            if r == c {
                Complex64::new(setting.diagonal_value(r), 0.0)
            } else {
                Complex64::ZERO
            }
        });
        reassembled += s_matrix.adjoint() * lambda * &s_matrix;
    }
    let dense = to_dense(obs)?;
    Ok((reassembled - dense).iter().map(|c| c.norm()).fold(0.0, f64::max))
}

fn oracle_consistency(cfg: &CheckConfig) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(6));
    let reps = cfg.reps(100, 20);
    let mut worst: f64 = 0.0;
    for _ in 0..reps {
        let sum = random_pauli_sum(&mut rng, 3, 8);
        let dense = to_dense(&sum)?;
        let state = random_state(&mut rng, 3)?;
        let via_strings: f64 = sum
            .terms()
            .iter()
            .map(|(c, s)| Ok(c * state.expval_pauli_string(s, 0)?))
            .collect::<Result<Vec<_>>>()?
            .iter()
            .sum();
        let amps = nalgebra::DVector::from_column_slice(state.amplitudes());
        let quadratic = amps.dotc(&(&dense * &amps)).re;
        worst = worst.max((via_strings - quadratic).abs());
    }
    Ok(Check::from_deviation(
        "pauli/oracle-consistency",
        worst,
        1e-10,
        format!("{reps} random 3-qubit sums, Pauli-term sum vs dense quadratic form"),
    ))
}

fn thermal_limits(_cfg: &CheckConfig) -> Result<Check> {
    let h = build_tfi(3, 1.0, 1.0, true)?;
    let tr_over_dim = 0.0; // every Pauli term is traceless
    let at_zero = exact_thermal_average(&h, &h, 0.0)?;
    let mut worst = (at_zero - tr_over_dim).abs();
    let mut previous = f64::INFINITY;
    for i in 0..=20 {
        let beta = 0.25 * i as f64;
        let value = exact_thermal_average(&h, &h, beta)?;
        if value > previous {
            worst = worst.max(value - previous);
        }
        previous = value;
    }
    Ok(Check::from_deviation(
        "pauli/thermal-limits",
        worst,
        1e-12,
        "β=0 average equals Tr H/2^q; ⟨H⟩(β) non-increasing on grid".into(),
    ))
}

fn degeneracy_detection(_cfg: &CheckConfig) -> Result<Check> {
    let solution = exact_solve(&build_tfi(3, 1.0, 0.0, true)?)?;
    let expected = [-3.0, -3.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0];
    let worst = solution
        .eigenvalues()
        .iter()
        .zip(&expected)
        .map(|(e, x)| (e - x).abs())
        .fold(0.0f64, f64::max);
    Ok(Check::from_deviation(
        "pauli/degeneracy-detection",
        worst,
        1e-10,
        "classical-limit spectrum {−3×2, +1×6}".into(),
    ))
}

fn orthogonal_frame(cfg: &CheckConfig) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(7));
    let reps = cfg.reps(100, 20);
    let ansatz = build_ansatz(&AnsatzSpec::new(3, 2)?);
    let mut worst: f64 = 0.0;
    for _ in 0..reps {
        let params: Vec<f64> = (0..ansatz.num_params())
            .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
            .collect();
        let frames = frame_states(&ansatz, &params, 8)?;
        for (i, a) in frames.iter().enumerate() {
            for (j, b) in frames.iter().enumerate() {
                let overlap = a.inner(b)?;
                let expected = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((overlap - Complex64::new(expected, 0.0)).norm());
            }
        }
    }
    Ok(Check::from_deviation(
        "ansatz/orthogonal-frame",
        worst,
        1e-12,
        format!("Gram matrix vs identity over {reps} random θ"),
    ))
}

fn mixing_fidelity(cfg: &CheckConfig) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(8));
    let reps = cfg.reps(100, 20);
    let mut worst: f64 = 0.0;
    for _ in 0..reps {
        let q_aux = rng.gen_range(1..=3);
        let k = 1usize << q_aux;
        let mut raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
        raw.sort_by(|a, b| b.total_cmp(a));
        let mix = MixingSpec::new(&raw)?;
        let circuit = build_mixing_circuit(&mix, q_aux)?;
        let mut state = StateVector::zero(q_aux)?;
        state.run_circuit(&circuit, &[])?;
        for (idx, amp) in state.amplitudes().iter().enumerate() {
            worst = worst.max((amp.norm_sqr() - mix.weight(idx)).abs());
        }
    }
    Ok(Check::from_deviation(
        "ansatz/mixing-fidelity",
        worst,
        1e-12,
        format!("{reps} random mixing specs, branch probabilities vs γ²"),
    ))
}

fn state_assembly(cfg: &CheckConfig) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(9));
    let reps = cfg.reps(50, 10);
    let ansatz = build_ansatz(&AnsatzSpec::new(3, 2)?);
    let mix = mixing_family(MixingFamily::Boltzmann(1.0), 8)?;
    let mut worst: f64 = 0.0;
    for _ in 0..reps {
        let params: Vec<f64> = (0..ansatz.num_params())
            .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
            .collect();
        let prepared = crate::ansatz::prepare_full_state(&mix, &ansatz, &params, 3, 3)?;
        let frames = frame_states(&ansatz, &params, 8)?;
        for k in 0..8usize {
            for s in 0..8usize {
                let expected = mix.gammas()[k] * frames[k].amplitudes()[s];
                let got = prepared.amplitudes()[k * 8 + s];
                worst = worst.max((got - expected).norm());
            }
        }
    }
    Ok(Check::from_deviation(
        "ansatz/state-assembly",
        worst,
        1e-10,
        format!("prepared state vs explicit Σ γ_k|k⟩⊗|ψ_k⟩ over {reps} random θ"),
    ))
}

fn phase_freedom(cfg: &CheckConfig) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(10));
    let solution = exact_solve(&build_tfi(3, 1.0, 1.0, true)?)?;
    let mix = mixing_family(MixingFamily::Geometric(0.6), 8)?;
    let plain: Vec<Complex64> =
        mix.gammas().iter().map(|g| Complex64::new(*g, 0.0)).collect();
    let phased: Vec<Complex64> = mix
        .gammas()
        .iter()
        .map(|g| Complex64::from_polar(*g, rng.gen_range(0.0..std::f64::consts::TAU)))
        .collect();
    let base = assemble_branch_state(&plain, solution.eigenvectors(), 3, 3)?;
    let twisted = assemble_branch_state(&phased, solution.eigenvectors(), 3, 3)?;
    let rho_a = base.reduced_density_matrix_sys(3)?;
    let rho_b = twisted.reduced_density_matrix_sys(3)?;
    let worst = (rho_a - rho_b).iter().map(|c| c.norm()).fold(0.0, f64::max);
    Ok(Check::from_deviation(
        "ansatz/phase-freedom",
        worst,
        1e-12,
        "reduced density matrix invariant under unit phases on γ_k".into(),
    ))
}

fn tfi_context(mode: EvalMode, layers: usize) -> Result<(CostContext, f64)> {
    let h = build_tfi(3, 1.0, 1.0, true)?;
    let mix = mixing_family(MixingFamily::Boltzmann(1.0), 8)?;
    let ansatz = build_ansatz(&AnsatzSpec::new(3, layers)?);
    let solution = exact_solve(&h)?;
    let floor = c_min(&mix, &solution)?;
    Ok((CostContext::new(h, mix, &ansatz, 3, 3, mode)?, floor))
}

fn variational_lower_bound(cfg: &CheckConfig) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(11));
    let reps = cfg.reps(500, 100);
    let (ctx, floor) = tfi_context(EvalMode::Exact, 2)?;
    let mut min_slack = f64::INFINITY;
    for _ in 0..reps {
        let params: Vec<f64> = (0..ctx.num_params())
            .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
            .collect();
        min_slack = min_slack.min(cost(&ctx, &params)? - floor);
    }
    // deviation is how far below C_min the worst sample dipped.
    let deviation = (-min_slack).max(0.0);
    Ok(Check::from_deviation(
        "vqe/variational-lower-bound",
        deviation,
        1e-9,
        format!("cost ≥ C_min over {reps} random θ (worst slack {min_slack:.3e})"),
    ))
}

fn gradient_exactness(cfg: &CheckConfig) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(12));
    let reps = cfg.reps(20, 5);
    let (ctx, _) = tfi_context(EvalMode::Exact, 2)?;
    let step = 1e-5;
    let mut worst: f64 = 0.0;
    for _ in 0..reps {
        let params: Vec<f64> = (0..ctx.num_params())
            .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
            .collect();
        let mut analytic = gradient(&ctx, &params)?;
        if cfg.fault == Some(Fault::GradientSignFlip) {
            for g in &mut analytic {
                *g = -*g;
            }
        }
        for j in 0..params.len() {
            let mut plus = params.clone();
            let mut minus = params.clone();
            plus[j] += step;
            minus[j] -= step;
            let fd = (cost(&ctx, &plus)? - cost(&ctx, &minus)?) / (2.0 * step);
            let scale = fd.abs().max(1e-3);
            worst = worst.max((analytic[j] - fd).abs() / scale);
        }
    }
    Ok(Check::from_deviation(
        "vqe/gradient-exactness",
        worst,
        1e-6,
        format!("parameter shift vs central differences at {reps} random points"),
    ))
}

fn shot_unbiasedness(cfg: &CheckConfig) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(13));
    let seeds = cfg.reps(200, 50);
    let shots = 4096;
    let (exact_ctx, _) = tfi_context(EvalMode::Exact, 2)?;
    let params: Vec<f64> = (0..exact_ctx.num_params())
        .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
        .collect();
    let truth = cost(&exact_ctx, &params)?;
    let mut samples = Vec::with_capacity(seeds);
    for s in 0..seeds {
        let (ctx, _) = tfi_context(EvalMode::Shots { shots, seed: cfg.seed.wrapping_add(s as u64) }, 2)?;
        samples.push(cost(&ctx, &params)?);
    }
    let mean = samples.iter().sum::<f64>() / seeds as f64;
    let var =
        samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (seeds as f64 - 1.0);
    let se = (var / seeds as f64).sqrt();
    let deviation = (mean - truth).abs() / se.max(1e-12);
    Ok(Check::from_deviation(
        "vqe/shot-unbiasedness",
        deviation,
        3.0,
        format!("{seeds} seeds at {shots} shots; |mean − exact| in standard errors"),
    ))
}

fn monotone_best(cfg: &CheckConfig) -> Result<Check> {
    let (ctx, _) = tfi_context(EvalMode::Exact, 1)?;
    let opt = OptimizerConfig {
        method: OptMethod::GradientAdaptive,
        max_iterations: if cfg.quick { 40 } else { 120 },
        restarts: 1,
        seed: cfg.seed,
        ..OptimizerConfig::default()
    };
    let result = minimize(&ctx, &opt)?;
    let mut trail = Vec::with_capacity(result.cost_history.len());
    let mut best = f64::INFINITY;
    for &c in &result.cost_history {
        best = best.min(c);
        trail.push(best);
    }
    let worst_rise = trail
        .windows(2)
        .map(|w| (w[1] - w[0]).max(0.0))
        .fold(0.0f64, f64::max);
    let min_cost = result.cost_history.iter().copied().fold(f64::INFINITY, f64::min);
    let deviation = worst_rise.max((result.best_cost - min_cost).abs());
    Ok(Check::from_deviation(
        "vqe/monotone-best",
        deviation,
        1e-12,
        "running minimum non-increasing; best_cost equals min of history".into(),
    ))
}

fn degenerate_cost_equality(cfg: &CheckConfig) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(14));
    let h = build_tfi(3, 1.0, 0.0, true)?;
    let solution = exact_solve(&h)?;
    let mix = mixing_family(MixingFamily::Boltzmann(0.8), 8)?;
    let dense = to_dense(&h)?;

    // Frame A: oracle eigenvectors as-is. Frame B: random rotations applied
    // inside each degenerate block (here {0,1} at −3 and {2..7} at +1).
    let frame_cost = |vectors: &DMatrix<Complex64>| -> f64 {
        (0..8)
            .map(|k| {
                let col = vectors.column(k);
                let quad = col.dotc(&(&dense * col.clone_owned())).re;
                mix.weight(k) * quad
            })
            .sum()
    };
    let base_cost = frame_cost(solution.eigenvectors());

    let mut rotated = solution.eigenvectors().clone();
    for block in [(0usize, 2usize), (2, 8)] {
        let width = block.1 - block.0;
        let rotation = random_orthogonal(&mut rng, width);
        let sub = rotated.columns(block.0, width).into_owned();
        let mixed = sub * rotation.map(|x| Complex64::new(x, 0.0));
        for (offset, col) in (block.0..block.1).enumerate() {
            rotated.set_column(col, &mixed.column(offset));
        }
    }
    let rotated_cost = frame_cost(&rotated);
    Ok(Check::from_deviation(
        "vqe/degenerate-cost-equality",
        (base_cost - rotated_cost).abs(),
        1e-9,
        "block-rotated degenerate frames attain the same cost".into(),
    ))
}

fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    // Gram-Schmidt on a random Gaussian-ish matrix.
    let mut m = DMatrix::<f64>::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    for c in 0..n {
        for prev in 0..c {
            let proj = m.column(c).dot(&m.column(prev));
            let adjusted = m.column(c) - m.column(prev) * proj;
            m.set_column(c, &adjusted);
        }
        let norm = m.column(c).norm();
        let normalized = m.column(c) / norm;
        m.set_column(c, &normalized);
    }
    m
}

const SWEEP_BETAS: [f64; 5] = [0.2, 0.5, 1.0, 2.0, 5.0];

fn gamma_invariance(_cfg: &CheckConfig) -> Result<Check> {
    let h = build_tfi(3, 1.0, 1.0, true)?;
    let solution = exact_solve(&h)?;
    let families = [
        mixing_family(MixingFamily::Uniform, 8)?,
        mixing_family(MixingFamily::Geometric(0.7), 8)?,
        mixing_family(MixingFamily::Boltzmann(1.0), 8)?,
    ];
    let mut values = vec![Vec::new(); SWEEP_BETAS.len()];
    for mix in &families {
        let state = exact_optimum_state(&solution, mix, 3, 3)?;
        let spectrum = estimate_spectrum(&state, mix, &h, EvalMode::Exact)?;
        for (i, &beta) in SWEEP_BETAS.iter().enumerate() {
            values[i].push(thermal_average(&state, mix, &spectrum, &h, beta, EvalMode::Exact)?);
        }
    }
    let mut worst: f64 = 0.0;
    for row in &values {
        let lo = row.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        worst = worst.max(hi - lo);
    }
    Ok(Check::from_deviation(
        "reweight/gamma-invariance",
        worst,
        1e-9,
        "thermal averages agree across mixing families at the exact optimum".into(),
    ))
}

fn exact_chain() -> Result<(PauliSum, MixingSpec, StateVector, SpectrumEstimate)> {
    let h = build_tfi(3, 1.0, 1.0, true)?;
    let mix = mixing_family(MixingFamily::Boltzmann(1.0), 8)?;
    let solution = exact_solve(&h)?;
    let state = exact_optimum_state(&solution, &mix, 3, 3)?;
    let spectrum = estimate_spectrum(&state, &mix, &h, EvalMode::Exact)?;
    Ok((h, mix, state, spectrum))
}

fn shift_invariance(_cfg: &CheckConfig) -> Result<Check> {
    let (h, mix, state, spectrum) = exact_chain()?;
    let mut worst: f64 = 0.0;
    for beta in [0.5, 2.0] {
        let base = thermal_average(&state, &mix, &spectrum, &h, beta, EvalMode::Exact)?;
        for offset in [-10.0, -1.0, 1.0, 10.0] {
            let shifted =
                thermal_average(&state, &mix, &spectrum.shifted(offset), &h, beta, EvalMode::Exact)?;
            worst = worst.max((shifted - base).abs());
        }
    }
    Ok(Check::from_deviation(
        "reweight/shift-invariance",
        worst,
        1e-12,
        "thermal average invariant under uniform energy shifts ±1, ±10".into(),
    ))
}

fn identity_normalization(_cfg: &CheckConfig) -> Result<Check> {
    let (_, mix, state, spectrum) = exact_chain()?;
    let identity = PauliSum::identity(3);
    let mut worst: f64 = 0.0;
    for beta in [0.0, 1.0, 5.0, 30.0] {
        let value = thermal_average(&state, &mix, &spectrum, &identity, beta, EvalMode::Exact)?;
        worst = worst.max((value - 1.0).abs());
    }
    Ok(Check::from_deviation(
        "reweight/identity-normalization",
        worst,
        0.0,
        "thermal average of the identity is exactly 1".into(),
    ))
}

fn beta_infinity_limit(_cfg: &CheckConfig) -> Result<Check> {
    let (h, mix, state, spectrum) = exact_chain()?;
    let solution = exact_solve(&h)?;
    let diag = solution.diagonal_expectations(&h)?;
    let block = solution.ground_block();
    let width = block.len() as f64;
    let ground_value: f64 = diag[block].iter().sum::<f64>() / width;
    let value = thermal_average(&state, &mix, &spectrum, &h, 50.0, EvalMode::Exact)?;
    Ok(Check::from_deviation(
        "reweight/beta-infinity-limit",
        (value - ground_value).abs(),
        1e-6,
        "β=50 thermal average vs oracle ground level".into(),
    ))
}

fn consistency_chain(_cfg: &CheckConfig) -> Result<Check> {
    let (h, mix, state, spectrum) = exact_chain()?;
    let betas: Vec<f64> = (0..=10).map(|i| 0.5 * i as f64).collect();
    let curve = beta_sweep(&state, &mix, &spectrum, &h, &betas, EvalMode::Exact)?;
    let mut worst: f64 = 0.0;
    for point in curve.points() {
        let reference = truncation_reference(&h, &h, 8, point.beta)?;
        worst = worst.max((point.value - reference).abs());
    }
    Ok(Check::from_deviation(
        "reweight/consistency-chain",
        worst,
        1e-8,
        "measured chain vs K=D truncation reference across the β grid".into(),
    ))
}
