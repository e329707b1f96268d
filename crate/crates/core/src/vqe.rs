//! The variational stage: evaluation of the weighted cost functional
//! C(θ) = Σ_k γ_k² ⟨k|U†(θ) H₀ U(θ)|k⟩ = ⟨Ψ_γ(θ)| 1 ⊗ H₀ |Ψ_γ(θ)⟩,
//! analytic parameter-shift gradients, and the minimization loop.
//!
//! The cost is evaluated with one full-register expectation per measurement
//! setting of the Hamiltonian's diagonalizing decomposition, not with K
//! separate branch evaluations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::FRAC_PI_2;

use crate::ansatz::{full_circuit, MixingSpec};
use crate::error::{Error, Result};
use crate::pauli::{diag_circ, ExactSolution, MeasurementSetting, PauliSum};
use crate::qsim::{Circuit, EvalMode, GateKind, StateVector};

/// Everything needed to evaluate the cost at a parameter vector.
#[derive(Debug, Clone)]
pub struct CostContext {
    hamiltonian: PauliSum,
    mixing: MixingSpec,
    q_aux: usize,
    q_sys: usize,
    mode: EvalMode,
    circuit: Circuit,
    settings: Vec<MeasurementSetting>,
}

impl CostContext {
    pub fn new(
        hamiltonian: PauliSum,
        mixing: MixingSpec,
        ansatz: &Circuit,
        q_aux: usize,
        q_sys: usize,
        mode: EvalMode,
    ) -> Result<Self> {
        if hamiltonian.num_qubits() != q_sys {
            return Err(Error::Shape(format!(
                "Hamiltonian on {} qubits, system register has {q_sys}",
                hamiltonian.num_qubits()
            )));
        }
        if q_aux > q_sys {
            return Err(Error::Shape(format!(
                "auxiliary register ({q_aux}) larger than system ({q_sys})"
            )));
        }
        if mixing.k() != 1usize << q_aux {
            return Err(Error::Shape(format!(
                "mixing K={} does not fill {q_aux} auxiliary qubits",
                mixing.k()
            )));
        }
        let circuit = full_circuit(&mixing, ansatz, q_aux, q_sys)?;
        let settings = diag_circ(&hamiltonian)?;
        Ok(CostContext { hamiltonian, mixing, q_aux, q_sys, mode, circuit, settings })
    }

    pub fn hamiltonian(&self) -> &PauliSum {
        &self.hamiltonian
    }

    pub fn mixing(&self) -> &MixingSpec {
        &self.mixing
    }

    pub fn q_aux(&self) -> usize {
        self.q_aux
    }

    pub fn q_sys(&self) -> usize {
        self.q_sys
    }

    pub fn mode(&self) -> EvalMode {
        self.mode
    }

    pub fn num_params(&self) -> usize {
        self.circuit.num_params()
    }

    /// Same context with the evaluation seed replaced (no-op in exact mode).
    pub fn with_seed(&self, seed: u64) -> CostContext {
        let mut ctx = self.clone();
        ctx.mode = self.mode.with_seed(seed);
        ctx
    }

    /// Prepared state at the given parameters.
    pub fn prepare(&self, params: &[f64]) -> Result<StateVector> {
        let mut state = StateVector::zero(self.q_aux + self.q_sys)?;
        state.run_circuit(&self.circuit, params)?;
        Ok(state)
    }
}

/// Evaluate the cost functional. Exact mode is deterministic; shot mode is
/// an unbiased estimator, deterministic for a fixed context seed.
pub fn cost(ctx: &CostContext, params: &[f64]) -> Result<f64> {
    let state = ctx.prepare(params)?;
    expectation_from_settings(&state, &ctx.settings, ctx.q_sys, ctx.mode)
}

/// ⟨state| 1_aux ⊗ O |state⟩ accumulated one measurement setting at a time,
/// the diagonal part evaluated on the rotated state (or its sampled counts).
pub(crate) fn expectation_from_settings(
    state: &StateVector,
    settings: &[MeasurementSetting],
    q_sys: usize,
    mode: EvalMode,
) -> Result<f64> {
    let sys_mask = (1usize << q_sys) - 1;
    let mut total = 0.0;
    for (m, setting) in settings.iter().enumerate() {
        let mut rotated = state.clone();
        let mut basis_change = Circuit::new(state.num_qubits(), 0);
        basis_change.append_shifted(setting.basis_change(), 0)?;
        rotated.run_circuit(&basis_change, &[])?;
        match mode {
            EvalMode::Exact => {
                for (n, amp) in rotated.amplitudes().iter().enumerate() {
                    let p = amp.norm_sqr();
                    if p > 0.0 {
                        total += p * setting.diagonal_value(n & sys_mask);
                    }
                }
            }
            EvalMode::Shots { shots, seed } => {
                let counts =
                    rotated.sample_counts(&Circuit::new(state.num_qubits(), 0), shots, mix_seed(seed, m as u64))?;
                for (n, c) in counts {
                    total += (c as f64 / shots as f64) * setting.diagonal_value(n & sys_mask);
                }
            }
        }
    }
    Ok(total)
}

/// Derive an independent per-setting stream from a base seed.
pub(crate) fn mix_seed(seed: u64, stream: u64) -> u64 {
    // splitmix64 step over seed + stream.
    let mut z = seed
        .wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Analytic gradient by the parameter-shift rule: component j is
/// [C(θ + π/2 ê_j) − C(θ − π/2 ê_j)] / 2. Exact in exact mode for the
/// rotation gates used here.
pub fn gradient(ctx: &CostContext, params: &[f64]) -> Result<Vec<f64>> {
    if params.len() != ctx.num_params() {
        return Err(Error::Shape(format!(
            "{} parameters against a circuit with {}",
            params.len(),
            ctx.num_params()
        )));
    }
    for gate in ctx.circuit.gates() {
        if gate.angle.is_some() && !matches!(gate.kind, GateKind::RotX | GateKind::RotY | GateKind::RotZ)
        {
            return Err(Error::UnsupportedGate(format!("{:?}", gate.kind)));
        }
    }
    (0..params.len())
        .into_par_iter()
        .map(|j| {
            let mut plus = params.to_vec();
            let mut minus = params.to_vec();
            plus[j] += FRAC_PI_2;
            minus[j] -= FRAC_PI_2;
            Ok((cost(ctx, &plus)? - cost(ctx, &minus)?) / 2.0)
        })
        .collect()
}

/// The ideal cost minimum Σ_{k<K} γ_k² E_k for a non-increasing mixing and
/// the oracle spectrum.
pub fn c_min(mixing: &MixingSpec, spectrum: &ExactSolution) -> Result<f64> {
    if mixing.k() > spectrum.dim() {
        return Err(Error::Shape(format!(
            "K={} exceeds spectrum size {}",
            mixing.k(),
            spectrum.dim()
        )));
    }
    Ok(mixing
        .gammas()
        .iter()
        .zip(spectrum.eigenvalues())
        .map(|(g, e)| g * g * e)
        .sum())
}

/// Optimization method.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptMethod {
    /// Adaptive-moment gradient descent on parameter-shift gradients
    /// (the exact-mode default).
    GradientAdaptive,
    /// Simultaneous-perturbation stochastic approximation
    /// (the shot-mode default).
    PerturbationStochastic,
}

/// Settings of the minimization loop.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub method: OptMethod,
    pub max_iterations: usize,
    /// Initial learning rate; decays geometrically to `learning_rate_final`
    /// across `max_iterations`.
    pub learning_rate: f64,
    pub learning_rate_final: f64,
    /// Convergence tolerance in cost units: the loop stops once the best
    /// cost improves by less than this over a 50-iteration window, or (for
    /// the gradient method) the gradient norm falls below it.
    pub tolerance: f64,
    pub seed: u64,
    pub restarts: usize,
    /// SPSA perturbation magnitude c₀.
    pub spsa_perturbation: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            method: OptMethod::GradientAdaptive,
            max_iterations: 10_000,
            learning_rate: 0.03,
            learning_rate_final: 1e-3,
            tolerance: 1e-7,
            seed: 42,
            restarts: 3,
            spsa_perturbation: 0.1,
        }
    }
}

impl OptimizerConfig {
    fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::Argument("max_iterations must be at least 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Argument("tolerance must be positive".into()));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::Argument("learning rate must be positive".into()));
        }
        if self.restarts == 0 {
            return Err(Error::Argument("restarts must be at least 1".into()));
        }
        Ok(())
    }

    fn learning_rate_at(&self, iteration: usize) -> f64 {
        if self.learning_rate_final <= 0.0 || self.learning_rate_final >= self.learning_rate {
            return self.learning_rate;
        }
        let t = iteration as f64 / self.max_iterations.max(1) as f64;
        self.learning_rate * (self.learning_rate_final / self.learning_rate).powf(t)
    }
}

/// One recorded optimizer iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub iteration: usize,
    pub cost: f64,
    pub grad_norm: f64,
}

/// Outcome of a minimization run (the best restart).
#[derive(Debug, Clone)]
pub struct OptResult {
    pub best_params: Vec<f64>,
    pub best_cost: f64,
    pub cost_history: Vec<f64>,
    pub converged: bool,
    pub iterations_used: usize,
    /// Per-iteration (cost, gradient-norm) trace of the winning restart.
    pub trace: Vec<TracePoint>,
}

/// Minimize the cost functional; best of `restarts` independently seeded
/// runs, deterministic for a fixed configuration.
pub fn minimize(ctx: &CostContext, opt: &OptimizerConfig) -> Result<OptResult> {
    opt.validate()?;
    let runs: Vec<Result<OptResult>> = (0..opt.restarts)
        .into_par_iter()
        .map(|r| single_run(ctx, opt, opt.seed.wrapping_add(r as u64)))
        .collect();
    let mut best: Option<OptResult> = None;
    for run in runs {
        let run = run?;
        let replace = match &best {
            None => true,
            Some(b) => run.best_cost < b.best_cost,
        };
        if replace {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

const PLATEAU_WINDOW: usize = 50;

fn single_run(ctx: &CostContext, opt: &OptimizerConfig, seed: u64) -> Result<OptResult> {
    let n = ctx.num_params();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.1..0.1)).collect();

    // Separate evaluation stream so shot-mode evaluations stay independent
    // across iterations while remaining reproducible.
    let mut eval_counter: u64 = 0;
    let eval_ctx = |counter: &mut u64| -> CostContext {
        *counter += 1;
        ctx.with_seed(mix_seed(seed, *counter))
    };

    let c0 = cost(&eval_ctx(&mut eval_counter), &params)?;
    let mut history = vec![c0];
    let mut best_cost = c0;
    let mut best_params = params.clone();
    let mut best_trail = vec![c0];
    let mut trace = vec![TracePoint { iteration: 0, cost: c0, grad_norm: f64::NAN }];
    let mut converged = false;
    let mut iterations_used = 0;

    // Adam moments.
    let mut m = vec![0.0; n];
    let mut v = vec![0.0; n];
    let (beta1, beta2, eps) = (0.9, 0.999, 1e-8);

    for t in 1..=opt.max_iterations {
        iterations_used = t;
        let lr = opt.learning_rate_at(t - 1);
        let grad_norm;
        match opt.method {
            OptMethod::GradientAdaptive => {
                let g = gradient(&eval_ctx(&mut eval_counter), &params)?;
                grad_norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
                for j in 0..n {
                    m[j] = beta1 * m[j] + (1.0 - beta1) * g[j];
                    v[j] = beta2 * v[j] + (1.0 - beta2) * g[j] * g[j];
                    let m_hat = m[j] / (1.0 - beta1.powi(t as i32));
                    let v_hat = v[j] / (1.0 - beta2.powi(t as i32));
                    params[j] -= lr * m_hat / (v_hat.sqrt() + eps);
                }
            }
            OptMethod::PerturbationStochastic => {
                let ck = opt.spsa_perturbation / (t as f64).powf(0.101);
                let ak = lr / (t as f64 + 0.1 * opt.max_iterations as f64).powf(0.602);
                let delta: Vec<f64> =
                    (0..n).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect();
                let plus: Vec<f64> =
                    params.iter().zip(&delta).map(|(p, d)| p + ck * d).collect();
                let minus: Vec<f64> =
                    params.iter().zip(&delta).map(|(p, d)| p - ck * d).collect();
                let y_plus = cost(&eval_ctx(&mut eval_counter), &plus)?;
                let y_minus = cost(&eval_ctx(&mut eval_counter), &minus)?;
                let scale = (y_plus - y_minus) / (2.0 * ck);
                let g: Vec<f64> = delta.iter().map(|d| scale / d).collect();
                grad_norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
                for j in 0..n {
                    params[j] -= ak * g[j];
                }
            }
        }
        let c = cost(&eval_ctx(&mut eval_counter), &params)?;
        history.push(c);
        if c < best_cost {
            best_cost = c;
            best_params = params.clone();
        }
        best_trail.push(best_cost);
        trace.push(TracePoint { iteration: t, cost: c, grad_norm });

        if opt.method == OptMethod::GradientAdaptive && grad_norm < opt.tolerance {
            converged = true;
            break;
        }
        if t >= PLATEAU_WINDOW {
            let then = best_trail[t - PLATEAU_WINDOW];
            if then - best_cost < opt.tolerance {
                converged = true;
                break;
            }
        }
    }

    Ok(OptResult { best_params, best_cost, cost_history: history, converged, iterations_used, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{build_ansatz, exact_optimum_state, mixing_family, AnsatzSpec, MixingFamily};
    use crate::pauli::{build_tfi, exact_solve, PauliString};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tfi_ctx(layers: usize, mode: EvalMode) -> CostContext {
        let h = build_tfi(3, 1.0, 1.0, true).unwrap();
        let mix = mixing_family(MixingFamily::Boltzmann(1.0), 8).unwrap();
        let ansatz = build_ansatz(&AnsatzSpec::new(3, layers).unwrap());
        CostContext::new(h, mix, &ansatz, 3, 3, mode).unwrap()
    }

    #[test]
    fn diagonal_hamiltonian_uniform_mixing_cost_is_zero() {
        // H = −ΣZ is diagonal; the zero-angle frame is a basis permutation,
        // so uniform mixing averages the full traceless spectrum.
        let h = build_tfi(3, 0.0, 1.0, true).unwrap();
        let mix = mixing_family(MixingFamily::Uniform, 8).unwrap();
        let ansatz = build_ansatz(&AnsatzSpec::new(3, 1).unwrap());
        let ctx = CostContext::new(h, mix, &ansatz, 3, 3, EvalMode::Exact).unwrap();
        let value = cost(&ctx, &vec![0.0; ctx.num_params()]).unwrap();
        assert!(value.abs() < 1e-12);
    }

    #[test]
    fn cost_at_exact_optimum_matches_c_min() {
        let h = build_tfi(3, 1.0, 1.0, true).unwrap();
        let solution = exact_solve(&h).unwrap();
        let mix = mixing_family(MixingFamily::Boltzmann(1.0), 8).unwrap();
        let state = exact_optimum_state(&solution, &mix, 3, 3).unwrap();
        let settings = diag_circ(&h).unwrap();
        let value = expectation_from_settings(&state, &settings, 3, EvalMode::Exact).unwrap();
        let floor = c_min(&mix, &solution).unwrap();
        assert!((value - floor).abs() < 1e-10, "value {value}, floor {floor}");
    }

    #[test]
    fn c_min_closed_forms() {
        let h = build_tfi(3, 1.0, 1.0, true).unwrap();
        let solution = exact_solve(&h).unwrap();
        let uniform = mixing_family(MixingFamily::Uniform, 8).unwrap();
        // Uniform mixing over the complete spectrum averages to Tr H / 2^q = 0.
        assert!(c_min(&uniform, &solution).unwrap().abs() < 1e-12);
        let pure = crate::ansatz::MixingSpec::new(&[1.0]).unwrap();
        assert!((c_min(&pure, &solution).unwrap() - solution.eigenvalues()[0]).abs() < 1e-9);
        let boltz = mixing_family(MixingFamily::Boltzmann(1.0), 8).unwrap();
        let expected: f64 = boltz
            .weights()
            .iter()
            .zip(solution.eigenvalues())
            .map(|(w, e)| w * e)
            .sum();
        assert!((c_min(&boltz, &solution).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn gradient_vanishes_on_constant_landscape() {
        let mut identity = PauliSum::new(2);
        identity.add(2.5, PauliString::identity(2)).unwrap();
        let mix = mixing_family(MixingFamily::Uniform, 2).unwrap();
        let ansatz = build_ansatz(&AnsatzSpec::new(2, 1).unwrap());
        let ctx = CostContext::new(identity, mix, &ansatz, 1, 2, EvalMode::Exact).unwrap();
        let g = gradient(&ctx, &vec![0.4; ctx.num_params()]).unwrap();
        assert!(g.iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let ctx = tfi_ctx(2, EvalMode::Exact);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let params: Vec<f64> = (0..ctx.num_params())
            .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
            .collect();
        let analytic = gradient(&ctx, &params).unwrap();
        let step = 1e-5;
        for j in 0..params.len() {
            let mut plus = params.clone();
            let mut minus = params.clone();
            plus[j] += step;
            minus[j] -= step;
            let fd = (cost(&ctx, &plus).unwrap() - cost(&ctx, &minus).unwrap()) / (2.0 * step);
            let scale = fd.abs().max(1e-3);
            assert!(
                (analytic[j] - fd).abs() / scale < 1e-6,
                "component {j}: analytic {} vs fd {fd}",
                analytic[j]
            );
        }
    }

    #[test]
    fn random_costs_respect_variational_floor() {
        let ctx = tfi_ctx(2, EvalMode::Exact);
        let solution = exact_solve(ctx.hamiltonian()).unwrap();
        let floor = c_min(ctx.mixing(), &solution).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let params: Vec<f64> = (0..ctx.num_params())
                .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
                .collect();
            assert!(cost(&ctx, &params).unwrap() >= floor - 1e-9);
        }
    }

    #[test]
    fn single_qubit_ground_state_vqe() {
        let mut h = PauliSum::new(1);
        h.add(1.0, PauliString::parse("Z").unwrap()).unwrap();
        let mix = crate::ansatz::MixingSpec::new(&[1.0]).unwrap();
        let ansatz = build_ansatz(&AnsatzSpec::new(1, 1).unwrap());
        let ctx = CostContext::new(h, mix, &ansatz, 0, 1, EvalMode::Exact).unwrap();
        let opt = OptimizerConfig { restarts: 1, ..Default::default() };
        let result = minimize(&ctx, &opt).unwrap();
        assert!((result.best_cost + 1.0).abs() < 1e-6, "best {}", result.best_cost);
    }

    #[test]
    fn shot_mode_cost_is_seed_deterministic() {
        let ctx = tfi_ctx(1, EvalMode::Shots { shots: 512, seed: 99 });
        let params = vec![0.2; ctx.num_params()];
        let a = cost(&ctx, &params).unwrap();
        let b = cost(&ctx, &params).unwrap();
        assert_eq!(a, b);
        let c = cost(&ctx.with_seed(100), &params).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn minimize_is_deterministic_and_tracks_best() {
        let ctx = tfi_ctx(1, EvalMode::Exact);
        let opt = OptimizerConfig { max_iterations: 80, restarts: 3, ..Default::default() };
        let first = minimize(&ctx, &opt).unwrap();
        let second = minimize(&ctx, &opt).unwrap();
        assert_eq!(first.best_params, second.best_params);
        assert_eq!(first.best_cost, second.best_cost);
        let min_hist = first.cost_history.iter().copied().fold(f64::INFINITY, f64::min);
        assert!((first.best_cost - min_hist).abs() < 1e-12);
        assert!(first.best_cost <= first.cost_history[0]);
    }

    #[test]
    fn more_restarts_never_hurt() {
        let ctx = tfi_ctx(1, EvalMode::Exact);
        let one = minimize(
            &ctx,
            &OptimizerConfig { max_iterations: 60, restarts: 1, ..Default::default() },
        )
        .unwrap();
        let five = minimize(
            &ctx,
            &OptimizerConfig { max_iterations: 60, restarts: 5, ..Default::default() },
        )
        .unwrap();
        assert!(five.best_cost <= one.best_cost + 1e-12);
    }

    #[test]
    fn spsa_improves_shot_mode_cost() {
        let ctx = tfi_ctx(1, EvalMode::Shots { shots: 2048, seed: 5 });
        let opt = OptimizerConfig {
            method: OptMethod::PerturbationStochastic,
            max_iterations: 150,
            restarts: 1,
            learning_rate: 0.3,
            ..Default::default()
        };
        let result = minimize(&ctx, &opt).unwrap();
        assert!(result.best_cost < result.cost_history[0]);
    }

    #[test]
    fn concentrated_mixing_recovers_ground_state() {
        // Nearly all weight on branch 0: the run reduces to ground-state
        // VQE and the branch-0 system state matches the oracle eigenvector.
        let h = build_tfi(3, 1.0, 1.0, true).unwrap();
        let solution = exact_solve(&h).unwrap();
        let mut raw = vec![0.0; 8];
        raw[0] = 1.0;
        let mix = crate::ansatz::MixingSpec::new(&raw).unwrap();
        let ansatz = build_ansatz(&AnsatzSpec::new(3, 4).unwrap());
        let ctx = CostContext::new(h, mix.clone(), &ansatz, 3, 3, EvalMode::Exact).unwrap();
        let result = minimize(&ctx, &OptimizerConfig::default()).unwrap();
        assert!(
            (result.best_cost - solution.eigenvalues()[0]).abs() < 1e-4,
            "best {} vs E0 {}",
            result.best_cost,
            solution.eigenvalues()[0]
        );
        let state = ctx.prepare(&result.best_params).unwrap();
        let ground = solution.eigenvector(0);
        let mut overlap = num_complex::Complex64::new(0.0, 0.0);
        let weight = state.aux_branch_probability(3, 0).unwrap();
        for s in 0..8 {
            overlap += ground[s].conj() * state.amplitudes()[s];
        }
        let fidelity = overlap.norm_sqr() / weight;
        assert!(fidelity > 0.99, "branch-0 fidelity {fidelity}");
    }

    #[test]
    fn layered_vqe_reaches_c_min() {
        // The paper-scale run: 6 layers, Boltzmann mixing, best of 3 restarts.
        let ctx = tfi_ctx(6, EvalMode::Exact);
        let solution = exact_solve(ctx.hamiltonian()).unwrap();
        let floor = c_min(ctx.mixing(), &solution).unwrap();
        let result = minimize(&ctx, &OptimizerConfig::default()).unwrap();
        assert!(
            result.best_cost - floor < 1e-3,
            "best {} vs C_min {floor}",
            result.best_cost
        );
        assert!(result.best_cost >= floor - 1e-9);
    }
}
