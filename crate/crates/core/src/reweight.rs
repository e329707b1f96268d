//! The reweighting stage: estimate the spectrum vector from the prepared
//! state, build branch reweighting weights e^{−βE_k}/γ_k², and evaluate
//! thermal averages as the ratio ⟨F[O]⟩/⟨F[1]⟩ over a β grid.
//!
//! All β points reuse one set of branch measurements per measurement
//! setting; in shot mode the statistical error comes from a delete-one
//! jackknife over contiguous shot blocks.

use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::ansatz::MixingSpec;
use crate::error::{Error, Result};
use crate::pauli::{diag_circ, exact_solve, MeasurementSetting, PauliSum};
use crate::qsim::{sample_into, Circuit, EvalMode, StateVector};
use crate::vqe::mix_seed;

/// Number of jackknife blocks used for shot-mode statistical errors.
pub const JACKKNIFE_BLOCKS: usize = 20;

/// Mixing weights below this are treated as singular at estimation time.
const SINGULAR_WEIGHT: f64 = 1e-24;

/// Estimated energies of the K auxiliary branches.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumEstimate {
    energies: Vec<f64>,
}

impl SpectrumEstimate {
    /// Wrap externally computed branch energies (all finite).
    pub fn new(energies: Vec<f64>) -> Result<Self> {
        if energies.is_empty() || energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::Data("spectrum estimate must be non-empty and finite".into()));
        }
        Ok(SpectrumEstimate { energies })
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn k(&self) -> usize {
        self.energies.len()
    }

    /// Same estimate with a constant added to every energy (the thermal
    /// average is invariant under this shift).
    pub fn shifted(&self, offset: f64) -> SpectrumEstimate {
        SpectrumEstimate { energies: self.energies.iter().map(|e| e + offset).collect() }
    }
}

/// Branch weights e^{−β(E_k − min E)}/γ_k² at one β.
#[derive(Debug, Clone, PartialEq)]
pub struct ReweightingWeights {
    beta: f64,
    weights: Vec<f64>,
}

impl ReweightingWeights {
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// One evaluated temperature point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub beta: f64,
    pub value: f64,
    pub stat_error: Option<f64>,
}

/// Thermal averages over a β grid, with statistical errors in shot mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalCurve {
    points: Vec<CurvePoint>,
}

impl ThermalCurve {
    pub fn points(&self) -> &[CurvePoint] {
        &self.points
    }
}

/// Branch-resolved measurement record: per measurement setting m and branch
/// k, the accumulated diagonal value ⟨|k⟩⟨k| ⊗ Λ_m⟩ and branch probability.
/// Exact mode holds the exact expectations; shot mode holds per-block sums.
#[derive(Debug, Clone)]
pub(crate) struct BranchMeasurement {
    /// [setting][branch] value sums (exact expectations, or λ sums over shots).
    total_values: Vec<Vec<f64>>,
    /// [setting][branch] probability sums (exact, or hit counts).
    total_probs: Vec<Vec<f64>>,
    /// Per-setting normalization: 1 in exact mode, the shot count otherwise.
    total_weight: f64,
    /// Contiguous shot blocks for jackknife (empty in exact mode).
    blocks: Vec<BlockSums>,
}

#[derive(Debug, Clone)]
struct BlockSums {
    values: Vec<Vec<f64>>,
    probs: Vec<Vec<f64>>,
    weight: f64,
}

impl BranchMeasurement {
    fn num_settings(&self) -> usize {
        self.total_values.len()
    }

    /// Mean branch value Σ_m ⟨|k⟩⟨k| ⊗ Λ_m⟩ and mean branch probability,
    /// excluding block `skip` when given.
    fn branch_estimates(&self, skip: Option<usize>) -> (Vec<f64>, Vec<f64>) {
        let m_count = self.num_settings();
        let k_count = self.total_values[0].len();
        let mut values = vec![0.0; k_count];
        let mut probs = vec![0.0; k_count];
        let weight = match skip {
            None => self.total_weight,
            Some(b) => self.total_weight - self.blocks[b].weight,
        };
        for m in 0..m_count {
            for k in 0..k_count {
                let mut v = self.total_values[m][k];
                let mut p = self.total_probs[m][k];
                if let Some(b) = skip {
                    v -= self.blocks[b].values[m][k];
                    p -= self.blocks[b].probs[m][k];
                }
                values[k] += v / weight;
                probs[k] += p / weight / m_count as f64;
            }
        }
        (values, probs)
    }
}

/// Measure all branch-resolved quantities of `observable` on `state`, one
/// pass per measurement setting.
pub(crate) fn measure_branches(
    state: &StateVector,
    observable: &PauliSum,
    q_aux: usize,
    mode: EvalMode,
) -> Result<BranchMeasurement> {
    let q_sys = observable.num_qubits();
    if q_sys + q_aux != state.num_qubits() {
        return Err(Error::Shape(format!(
            "observable on {q_sys} qubits plus {q_aux} auxiliary differs from state on {}",
            state.num_qubits()
        )));
    }
    let settings = diag_circ(observable)?;
    let k_count = 1usize << q_aux;
    let sys_mask = (1usize << q_sys) - 1;

    match mode {
        EvalMode::Exact => {
            let mut total_values = vec![vec![0.0; k_count]; settings.len()];
            let mut total_probs = vec![vec![0.0; k_count]; settings.len()];
            for (m, setting) in settings.iter().enumerate() {
                let rotated = rotate_for_setting(state, setting)?;
                for (n, amp) in rotated.amplitudes().iter().enumerate() {
                    let p = amp.norm_sqr();
                    if p > 0.0 {
                        let k = n >> q_sys;
                        total_values[m][k] += p * setting.diagonal_value(n & sys_mask);
                        total_probs[m][k] += p;
                    }
                }
            }
            Ok(BranchMeasurement { total_values, total_probs, total_weight: 1.0, blocks: Vec::new() })
        }
        EvalMode::Shots { shots, seed } => {
            let num_blocks = JACKKNIFE_BLOCKS.min(shots as usize).max(1);
            let mut total_values = vec![vec![0.0; k_count]; settings.len()];
            let mut total_probs = vec![vec![0.0; k_count]; settings.len()];
            let mut blocks: Vec<BlockSums> = (0..num_blocks)
                .map(|b| BlockSums {
                    values: vec![vec![0.0; k_count]; settings.len()],
                    probs: vec![vec![0.0; k_count]; settings.len()],
                    weight: block_len(shots, num_blocks, b) as f64,
                })
                .collect();
            for (m, setting) in settings.iter().enumerate() {
                let rotated = rotate_for_setting(state, setting)?;
                let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, m as u64));
                let mut drawn: u64 = 0;
                let mut block = 0usize;
                let mut left = block_len(shots, num_blocks, 0);
                sample_into(&rotated, shots, &mut rng, |n| {
                    if left == 0 {
                        block += 1;
                        left = block_len(shots, num_blocks, block);
                    }
                    let k = n >> q_sys;
                    let lam = setting.diagonal_value(n & sys_mask);
                    total_values[m][k] += lam;
                    total_probs[m][k] += 1.0;
                    blocks[block].values[m][k] += lam;
                    blocks[block].probs[m][k] += 1.0;
                    drawn += 1;
                    left -= 1;
                });
                debug_assert_eq!(drawn, shots);
            }
            Ok(BranchMeasurement {
                total_values,
                total_probs,
                total_weight: shots as f64,
                blocks,
            })
        }
    }
}

fn block_len(shots: u64, num_blocks: usize, block: usize) -> u64 {
    let base = shots / num_blocks as u64;
    let extra = shots % num_blocks as u64;
    base + u64::from((block as u64) < extra)
}

fn rotate_for_setting(state: &StateVector, setting: &MeasurementSetting) -> Result<StateVector> {
    let mut basis_change = Circuit::new(state.num_qubits(), 0);
    basis_change.append_shifted(setting.basis_change(), 0)?;
    let mut rotated = state.clone();
    rotated.run_circuit(&basis_change, &[])?;
    Ok(rotated)
}

/// Estimate the spectrum vector: E_k = ⟨|k⟩⟨k| ⊗ H⟩ / γ_k², one pass per
/// measurement setting of H. On the exact-optimum state this reproduces the
/// oracle's first K eigenvalues.
pub fn estimate_spectrum(
    state: &StateVector,
    mixing: &MixingSpec,
    hamiltonian: &PauliSum,
    mode: EvalMode,
) -> Result<SpectrumEstimate> {
    check_singular(mixing)?;
    let measurement = measure_branches(state, hamiltonian, mixing.q_aux(), mode)?;
    let (values, _) = measurement.branch_estimates(None);
    let energies: Vec<f64> = values
        .iter()
        .zip(mixing.weights())
        .map(|(v, w)| v / w)
        .collect();
    SpectrumEstimate::new(energies)
}

fn check_singular(mixing: &MixingSpec) -> Result<()> {
    for (k, g) in mixing.gammas().iter().enumerate() {
        if g * g < SINGULAR_WEIGHT {
            return Err(Error::SingularMixing(format!(
                "branch {k} weight {} is below the positivity floor",
                g * g
            )));
        }
    }
    Ok(())
}

/// The branch reweighting weights e^{−β(E_k − min_j E_j)} / γ_k².
///
/// The minimum energy is subtracted inside the exponent; the thermal-average
/// ratio is invariant under this shift and it prevents overflow at large β.
pub fn reweighting_weights(
    spectrum: &SpectrumEstimate,
    mixing: &MixingSpec,
    beta: f64,
) -> Result<ReweightingWeights> {
    if !(beta >= 0.0) {
        return Err(Error::Argument(format!("beta must be non-negative, got {beta}")));
    }
    if spectrum.k() != mixing.k() {
        return Err(Error::Shape(format!(
            "spectrum over {} levels, mixing over {}",
            spectrum.k(),
            mixing.k()
        )));
    }
    check_singular(mixing)?;
    let e_min = spectrum.energies().iter().copied().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = spectrum
        .energies()
        .iter()
        .zip(mixing.weights())
        .map(|(e, w)| (-(beta) * (e - e_min)).exp() / w)
        .collect();
    Ok(ReweightingWeights { beta, weights })
}

/// Thermal average of `observable` at inverse temperature `beta` on the
/// prepared state: the ratio Σ_k a_k ⟨|k⟩⟨k| ⊗ O⟩ / Σ_k a_k w_k.
pub fn thermal_average(
    state: &StateVector,
    mixing: &MixingSpec,
    spectrum: &SpectrumEstimate,
    observable: &PauliSum,
    beta: f64,
    mode: EvalMode,
) -> Result<f64> {
    let measurement = measure_branches(state, observable, mixing.q_aux(), mode)?;
    let weights = reweighting_weights(spectrum, mixing, beta)?;
    ratio_estimate(&measurement, &weights, None)
}

fn ratio_estimate(
    measurement: &BranchMeasurement,
    weights: &ReweightingWeights,
    skip: Option<usize>,
) -> Result<f64> {
    let (values, probs) = measurement.branch_estimates(skip);
    if values.len() != weights.weights.len() {
        return Err(Error::Shape(format!(
            "{} measured branches against {} weights",
            values.len(),
            weights.weights.len()
        )));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for ((a, v), p) in weights.weights.iter().zip(&values).zip(&probs) {
        num += a * v;
        den += a * p;
    }
    if den.abs() < 1e-300 {
        return Err(Error::Underflow(format!(
            "functional normalization underflowed at beta {}",
            weights.beta
        )));
    }
    Ok(num / den)
}

/// Evaluate the thermal average at every β of a strictly increasing grid,
/// reusing a single set of branch measurements for all temperatures. Shot
/// mode attaches a jackknife statistical error to every point.
pub fn beta_sweep(
    state: &StateVector,
    mixing: &MixingSpec,
    spectrum: &SpectrumEstimate,
    observable: &PauliSum,
    betas: &[f64],
    mode: EvalMode,
) -> Result<ThermalCurve> {
    if betas.is_empty() {
        return Err(Error::Argument("beta grid must be non-empty".into()));
    }
    if betas[0] < 0.0 || betas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Argument(
            "beta grid must be non-negative and strictly increasing".into(),
        ));
    }
    let measurement = measure_branches(state, observable, mixing.q_aux(), mode)?;
    let mut points = Vec::with_capacity(betas.len());
    for &beta in betas {
        let weights = reweighting_weights(spectrum, mixing, beta)?;
        let value = ratio_estimate(&measurement, &weights, None)?;
        let stat_error = if measurement.blocks.is_empty() {
            None
        } else {
            Some(jackknife_error(&measurement, &weights)?)
        };
        points.push(CurvePoint { beta, value, stat_error });
    }
    Ok(ThermalCurve { points })
}

/// Delete-one-block jackknife standard error of the ratio estimator.
fn jackknife_error(
    measurement: &BranchMeasurement,
    weights: &ReweightingWeights,
) -> Result<f64> {
    let b = measurement.blocks.len();
    let mut loo = Vec::with_capacity(b);
    for skip in 0..b {
        loo.push(ratio_estimate(measurement, weights, Some(skip))?);
    }
    let mean = loo.iter().sum::<f64>() / b as f64;
    let ss: f64 = loo.iter().map(|t| (t - mean) * (t - mean)).sum();
    Ok(((b as f64 - 1.0) / b as f64 * ss).sqrt())
}

/// The best value attainable at truncation K: the K-level Gibbs sum over
/// oracle eigenpairs. Separates truncation error from optimization error.
pub fn truncation_reference(
    hamiltonian: &PauliSum,
    observable: &PauliSum,
    k: usize,
    beta: f64,
) -> Result<f64> {
    if !(beta >= 0.0) {
        return Err(Error::Argument(format!("beta must be non-negative, got {beta}")));
    }
    let dim = 1usize << hamiltonian.num_qubits();
    if k == 0 || k > dim {
        return Err(Error::Size(format!("truncation K={k} outside 1..={dim}")));
    }
    let solution = exact_solve(hamiltonian)?;
    let diag = solution.diagonal_expectations(observable)?;
    let e0 = solution.eigenvalues()[0];
    let mut num = 0.0;
    let mut den = 0.0;
    for idx in 0..k {
        let w = (-(beta) * (solution.eigenvalues()[idx] - e0)).exp();
        num += w * diag[idx];
        den += w;
    }
    Ok(num / den)
}
