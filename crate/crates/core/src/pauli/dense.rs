use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{Pauli, PauliSum};
use crate::error::{Error, Result};

/// Largest register for which dense matrices and eigensolutions are built.
pub const MAX_DENSE_QUBITS: usize = 12;

/// Relative scale used to group numerically degenerate eigenvalues.
const DEGENERACY_TOL: f64 = 1e-8;

fn check_dense_guard(num_qubits: usize) -> Result<()> {
    if num_qubits > MAX_DENSE_QUBITS {
        return Err(Error::Size(format!(
            "dense operations limited to {MAX_DENSE_QUBITS} qubits, got {num_qubits}"
        )));
    }
    Ok(())
}

/// Expand a Pauli sum into its dense 2^n × 2^n matrix.
pub fn to_dense(obs: &PauliSum) -> Result<DMatrix<Complex64>> {
    check_dense_guard(obs.num_qubits())?;
    let dim = 1usize << obs.num_qubits();
    let mut matrix = DMatrix::<Complex64>::zeros(dim, dim);
    for (coeff, string) in obs.terms() {
        let mut x_mask = 0usize;
        let mut y_mask = 0usize;
        let mut z_mask = 0usize;
        for (q, axis) in string.axes().iter().enumerate() {
            let bit = 1usize << q;
            match axis {
                Pauli::I => {}
                Pauli::X => x_mask |= bit,
                Pauli::Y => {
                    x_mask |= bit;
                    y_mask |= bit;
                }
                Pauli::Z => z_mask |= bit,
            }
        }
        let num_y = y_mask.count_ones();
        for col in 0..dim {
            let y_ones = (col & y_mask).count_ones();
            let z_ones = (col & z_mask).count_ones() + y_ones;
            let mut phase = if z_ones % 2 == 0 { Complex64::ONE } else { -Complex64::ONE };
            phase *= Complex64::I.powu(num_y);
            matrix[(col ^ x_mask, col)] += coeff * phase;
        }
    }
    Ok(matrix)
}

/// All eigenpairs of a Hermitian Pauli sum, eigenvalues ascending.
///
/// Within a numerically degenerate block, eigenvectors are ordered by the
/// index of their largest-magnitude computational-basis amplitude (ties by
/// lower index) and each column's phase is fixed so that amplitude is real
/// positive. This pins a deterministic reference frame; physics is invariant
/// under reordering inside a block.
#[derive(Debug, Clone)]
pub struct ExactSolution {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<Complex64>,
}

impl ExactSolution {
    /// Non-decreasing eigenvalues.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Unitary matrix whose column `k` is the eigenvector of `eigenvalues()[k]`.
    pub fn eigenvectors(&self) -> &DMatrix<Complex64> {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Eigenvector `k` as an owned column.
    pub fn eigenvector(&self, k: usize) -> DVector<Complex64> {
        self.eigenvectors.column(k).into_owned()
    }

    /// ⟨φ_k|O|φ_k⟩ for every eigenvector.
    pub fn diagonal_expectations(&self, observable: &PauliSum) -> Result<Vec<f64>> {
        let dense = to_dense(observable)?;
        if dense.nrows() != self.dim() {
            return Err(Error::Shape(format!(
                "observable dimension {} against spectrum dimension {}",
                dense.nrows(),
                self.dim()
            )));
        }
        let product = &dense * &self.eigenvectors;
        Ok((0..self.dim())
            .map(|k| self.eigenvectors.column(k).dotc(&product.column(k)).re)
            .collect())
    }

    /// Indices of the eigenvalues numerically degenerate with the ground level.
    pub fn ground_block(&self) -> std::ops::Range<usize> {
        let scale = degeneracy_scale(&self.eigenvalues);
        let e0 = self.eigenvalues[0];
        let end = self
            .eigenvalues
            .iter()
            .position(|e| e - e0 > scale)
            .unwrap_or(self.eigenvalues.len());
        0..end
    }
}

fn degeneracy_scale(eigenvalues: &[f64]) -> f64 {
    let spread = eigenvalues.last().unwrap_or(&0.0) - eigenvalues.first().unwrap_or(&0.0);
    DEGENERACY_TOL * spread.max(1.0)
}

/// Dense eigendecomposition of a Hermitian Pauli sum.
///
/// Uses the real-symmetric path when the sum contains no Y axes (the matrix
/// is then real in the computational basis), the complex Hermitian path
/// otherwise.
pub fn exact_solve(obs: &PauliSum) -> Result<ExactSolution> {
    check_dense_guard(obs.num_qubits())?;
    let dim = 1usize << obs.num_qubits();
    let (mut eigenvalues, mut eigenvectors): (Vec<f64>, DMatrix<Complex64>) = if !obs.contains_y() {
        let dense = to_dense(obs)?;
        let real = DMatrix::<f64>::from_fn(dim, dim, |r, c| dense[(r, c)].re);
        let eig = real.symmetric_eigen();
        let vecs = DMatrix::<Complex64>::from_fn(dim, dim, |r, c| {
            Complex64::new(eig.eigenvectors[(r, c)], 0.0)
        });
        (eig.eigenvalues.iter().copied().collect(), vecs)
    } else {
        let dense = to_dense(obs)?;
        let eig = dense.symmetric_eigen();
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
    };

    // Ascending eigenvalue order.
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eigenvalues[a].total_cmp(&eigenvalues[b]));
    let sorted_vals: Vec<f64> = order.iter().map(|&i| eigenvalues[i]).collect();
    let mut sorted_vecs = DMatrix::<Complex64>::zeros(dim, dim);
    for (new, &old) in order.iter().enumerate() {
        sorted_vecs.set_column(new, &eigenvectors.column(old));
    }
    eigenvalues = sorted_vals;
    eigenvectors = sorted_vecs;

    // Deterministic order and phase inside degenerate blocks.
    let scale = degeneracy_scale(&eigenvalues);
    let mut start = 0;
    while start < dim {
        let mut end = start + 1;
        while end < dim && eigenvalues[end] - eigenvalues[end - 1] <= scale {
            end += 1;
        }
        if end - start > 1 {
            let mut block: Vec<usize> = (start..end).collect();
            block.sort_by_key(|&c| peak_index(&eigenvectors, c));
            let reordered: Vec<DVector<Complex64>> =
                block.iter().map(|&c| eigenvectors.column(c).into_owned()).collect();
            for (offset, col) in reordered.into_iter().enumerate() {
                eigenvectors.set_column(start + offset, &col);
            }
        }
        start = end;
    }
    for c in 0..dim {
        fix_column_phase(&mut eigenvectors, c);
    }

    Ok(ExactSolution { eigenvalues, eigenvectors })
}

fn peak_index(vecs: &DMatrix<Complex64>, col: usize) -> usize {
    let mut best = 0;
    let mut best_mag = 0.0;
    for (r, v) in vecs.column(col).iter().enumerate() {
        let m = v.norm_sqr();
        if m > best_mag {
            best_mag = m;
            best = r;
        }
    }
    best
}

fn fix_column_phase(vecs: &mut DMatrix<Complex64>, col: usize) {
    let peak = peak_index(vecs, col);
    let v = vecs[(peak, col)];
    if v.norm() > 0.0 {
        let phase = v / v.norm();
        let correction = phase.conj();
        for r in 0..vecs.nrows() {
            vecs[(r, col)] *= correction;
        }
    }
}

/// Gibbs average Tr[O e^{−βH}] / Tr[e^{−βH}] from the dense oracle,
/// with the ground energy subtracted in the exponents for stability.
pub fn exact_thermal_average(hamiltonian: &PauliSum, observable: &PauliSum, beta: f64) -> Result<f64> {
    if beta < 0.0 {
        return Err(Error::Argument(format!("beta must be non-negative, got {beta}")));
    }
    if hamiltonian.num_qubits() != observable.num_qubits() {
        return Err(Error::Shape(format!(
            "Hamiltonian on {} qubits, observable on {}",
            hamiltonian.num_qubits(),
            observable.num_qubits()
        )));
    }
    let solution = exact_solve(hamiltonian)?;
    let diag = solution.diagonal_expectations(observable)?;
    let e0 = solution.eigenvalues()[0];
    let mut num = 0.0;
    let mut den = 0.0;
    for (e, d) in solution.eigenvalues().iter().zip(&diag) {
        let w = (-(beta) * (e - e0)).exp();
        num += w * d;
        den += w;
    }
    Ok(num / den)
}
