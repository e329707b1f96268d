use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use super::circuit::Circuit;
use super::gate::{Gate, GateKind};
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString, PauliSum};

/// Largest register the dense simulator will allocate.
pub const MAX_QUBITS: usize = 24;

/// Largest register for which a dense reduced density matrix is produced.
pub const MAX_DENSITY_QUBITS: usize = 14;

/// Dense statevector over `num_qubits` qubits.
///
/// Qubit 0 is the least-significant bit of the basis index. When the register
/// is split into a system block and an auxiliary block, the system occupies
/// the low-order qubits and the auxiliary the high-order ones, so the
/// amplitudes of auxiliary branch `k` form the contiguous slice
/// `[k * 2^q_sys, (k+1) * 2^q_sys)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The all-zeros computational basis state |0...0⟩.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        Self::basis(num_qubits, 0)
    }

    /// The computational basis state with the given index.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        if num_qubits < 1 || num_qubits > MAX_QUBITS {
            return Err(Error::Size(format!(
                "num_qubits must be in 1..={MAX_QUBITS}, got {num_qubits}"
            )));
        }
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::Index(format!(
                "basis index {index} outside dimension {dim}"
            )));
        }
        let mut amps = vec![Complex64::ZERO; dim];
        amps[index] = Complex64::ONE;
        Ok(StateVector { num_qubits, amps })
    }

    /// Build a state from raw amplitudes; the length must be a power of two
    /// and the vector must be normalized to 1 within 1e-8.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if dim < 2 || !dim.is_power_of_two() || dim > (1 << MAX_QUBITS) {
            return Err(Error::Shape(format!(
                "amplitude vector length {dim} is not a supported power of two"
            )));
        }
        let state = StateVector { num_qubits: dim.trailing_zeros() as usize, amps };
        let n = state.norm();
        if (n - 1.0).abs() > 1e-8 {
            return Err(Error::Data(format!("amplitude vector has norm {n}, expected 1")));
        }
        Ok(state)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::Shape(format!(
                "inner product between {} and {} qubits",
                self.num_qubits, other.num_qubits
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Apply a single gate in place, resolving its angle from `params`.
    pub fn apply_gate(&mut self, gate: &Gate, params: &[f64]) -> Result<()> {
        gate.validate(self.num_qubits, params.len())?;
        let t = 1usize << gate.target;
        match gate.kind {
            GateKind::PauliX => self.for_pairs(t, |a, b| (b, a)),
            GateKind::Hadamard => {
                let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
                self.for_pairs(t, |a, b| (s * (a + b), s * (a - b)));
            }
            GateKind::SAdjointH => {
                // H·S† = 1/sqrt(2) [[1, -i], [1, i]]
                let s = FRAC_1_SQRT_2;
                let i = Complex64::I;
                self.for_pairs(t, |a, b| (s * (a - i * b), s * (a + i * b)));
            }
            GateKind::RotX => {
                let half = gate.resolve_angle(params)? / 2.0;
                let c = Complex64::new(half.cos(), 0.0);
                let ms = Complex64::new(0.0, -half.sin());
                self.for_pairs(t, |a, b| (c * a + ms * b, ms * a + c * b));
            }
            GateKind::RotY => {
                let half = gate.resolve_angle(params)? / 2.0;
                let c = Complex64::new(half.cos(), 0.0);
                let s = Complex64::new(half.sin(), 0.0);
                self.for_pairs(t, |a, b| (c * a - s * b, s * a + c * b));
            }
            GateKind::RotZ => {
                let half = gate.resolve_angle(params)? / 2.0;
                let p0 = Complex64::from_polar(1.0, -half);
                let p1 = Complex64::from_polar(1.0, half);
                for (i, amp) in self.amps.iter_mut().enumerate() {
                    *amp *= if i & t == 0 { p0 } else { p1 };
                }
            }
            GateKind::Cnot => {
                let c = 1usize << gate.control.expect("validated control");
                for i in 0..self.amps.len() {
                    if i & c != 0 && i & t == 0 {
                        self.amps.swap(i, i | t);
                    }
                }
            }
        }
        Ok(())
    }

    /// Run every gate of a circuit in order.
    pub fn run_circuit(&mut self, circuit: &Circuit, params: &[f64]) -> Result<()> {
        if circuit.num_qubits() != self.num_qubits {
            return Err(Error::Shape(format!(
                "circuit over {} qubits applied to a {}-qubit state",
                circuit.num_qubits(),
                self.num_qubits
            )));
        }
        if params.len() != circuit.num_params() {
            return Err(Error::Shape(format!(
                "circuit declares {} parameters, got {}",
                circuit.num_params(),
                params.len()
            )));
        }
        for gate in circuit.gates() {
            self.apply_gate(gate, params)?;
        }
        Ok(())
    }

    /// Apply `f` to every amplitude pair (index with target bit 0, bit 1).
    fn for_pairs(&mut self, t: usize, f: impl Fn(Complex64, Complex64) -> (Complex64, Complex64)) {
        for i in 0..self.amps.len() {
            if i & t == 0 {
                let j = i | t;
                let (a, b) = (self.amps[i], self.amps[j]);
                let (na, nb) = f(a, b);
                self.amps[i] = na;
                self.amps[j] = nb;
            }
        }
    }

    /// ⟨Ψ| 1 ⊗ P ⊗ 1 |Ψ⟩ for a Pauli string acting on the qubit block
    /// starting at `sys_offset`.
    pub fn expval_pauli_string(&self, string: &PauliString, sys_offset: usize) -> Result<f64> {
        if sys_offset + string.len() > self.num_qubits {
            return Err(Error::Shape(format!(
                "Pauli string of length {} at offset {sys_offset} exceeds {} qubits",
                string.len(),
                self.num_qubits
            )));
        }
        let mut x_mask = 0usize;
        let mut y_mask = 0usize;
        let mut z_mask = 0usize;
        for (q, axis) in string.axes().iter().enumerate() {
            let bit = 1usize << (sys_offset + q);
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
        let mut total = Complex64::ZERO;
        for (n, amp) in self.amps.iter().enumerate() {
            if amp == &Complex64::ZERO {
                continue;
            }
            // P|n⟩ = phase(n) |n ^ x_mask⟩
            let flipped = n ^ x_mask;
            // Y contributes i for bit 0, -i for bit 1; Z contributes -1 for bit 1.
            let y_ones = (n & y_mask).count_ones();
            let z_ones = (n & z_mask).count_ones() + y_ones;
            let mut phase = if z_ones % 2 == 0 { Complex64::ONE } else { -Complex64::ONE };
            phase *= Complex64::I.powu(num_y);
            total += self.amps[flipped].conj() * phase * amp;
        }
        Ok(total.re)
    }

    /// ⟨Ψ| (|k⟩⟨k|_aux ⊗ O) |Ψ⟩ where the auxiliary register is the
    /// high-order block and O acts on the low-order system block.
    pub fn projected_expval(&self, aux_index: usize, observable: &PauliSum) -> Result<f64> {
        let q_sys = observable.num_qubits();
        if q_sys > self.num_qubits {
            return Err(Error::Shape(format!(
                "observable on {q_sys} qubits against a {}-qubit state",
                self.num_qubits
            )));
        }
        let q_aux = self.num_qubits - q_sys;
        if aux_index >= (1usize << q_aux) {
            return Err(Error::Index(format!(
                "auxiliary index {aux_index} outside 2^{q_aux} branches"
            )));
        }
        let dim_sys = 1usize << q_sys;
        let base = aux_index * dim_sys;
        let branch = &self.amps[base..base + dim_sys];
        let mut total = 0.0;
        for (coeff, string) in observable.terms() {
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
            let mut term = Complex64::ZERO;
            for (s, amp) in branch.iter().enumerate() {
                if amp == &Complex64::ZERO {
                    continue;
                }
                let y_ones = (s & y_mask).count_ones();
                let z_ones = (s & z_mask).count_ones() + y_ones;
                let mut phase = if z_ones % 2 == 0 { Complex64::ONE } else { -Complex64::ONE };
                phase *= Complex64::I.powu(num_y);
                term += branch[s ^ x_mask].conj() * phase * amp;
            }
            total += coeff * term.re;
        }
        Ok(total)
    }

    /// Probability of finding the auxiliary register (the qubits above
    /// `sys_qubits`) in the basis state `aux_index`.
    pub fn aux_branch_probability(&self, sys_qubits: usize, aux_index: usize) -> Result<f64> {
        if sys_qubits > self.num_qubits {
            return Err(Error::Shape(format!(
                "system block of {sys_qubits} qubits against a {}-qubit state",
                self.num_qubits
            )));
        }
        let q_aux = self.num_qubits - sys_qubits;
        if aux_index >= (1usize << q_aux) {
            return Err(Error::Index(format!(
                "auxiliary index {aux_index} outside 2^{q_aux} branches"
            )));
        }
        let dim_sys = 1usize << sys_qubits;
        let base = aux_index * dim_sys;
        Ok(self.amps[base..base + dim_sys]
            .iter()
            .map(|a| a.norm_sqr())
            .sum())
    }

    /// Sample measurement outcomes in the basis reached through
    /// `basis_change`. Identical seeds give identical count maps.
    pub fn sample_counts(
        &self,
        basis_change: &Circuit,
        shots: u64,
        seed: u64,
    ) -> Result<BTreeMap<usize, u64>> {
        if shots == 0 {
            return Err(Error::Argument("shots must be at least 1".into()));
        }
        let mut rotated = self.clone();
        rotated.run_circuit(basis_change, &[])?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts = BTreeMap::new();
        sample_into(&rotated, shots, &mut rng, |idx| {
            *counts.entry(idx).or_insert(0u64) += 1;
        });
        Ok(counts)
    }

    /// Tr_aux |Ψ⟩⟨Ψ| over the high-order auxiliary block, leaving the
    /// low-order `sys_qubits` system block.
    pub fn reduced_density_matrix_sys(&self, sys_qubits: usize) -> Result<DMatrix<Complex64>> {
        if self.num_qubits > MAX_DENSITY_QUBITS {
            return Err(Error::Size(format!(
                "reduced density matrix limited to {MAX_DENSITY_QUBITS} total qubits, state has {}",
                self.num_qubits
            )));
        }
        if sys_qubits > self.num_qubits {
            return Err(Error::Shape(format!(
                "system block of {sys_qubits} qubits against a {}-qubit state",
                self.num_qubits
            )));
        }
        let dim_sys = 1usize << sys_qubits;
        let branches = 1usize << (self.num_qubits - sys_qubits);
        let mut rho = DMatrix::<Complex64>::zeros(dim_sys, dim_sys);
        for k in 0..branches {
            let base = k * dim_sys;
            for row in 0..dim_sys {
                let a = self.amps[base + row];
                if a == Complex64::ZERO {
                    continue;
                }
                for col in 0..dim_sys {
                    rho[(row, col)] += a * self.amps[base + col].conj();
                }
            }
        }
        Ok(rho)
    }
}

/// Draw `shots` basis indices from the Born distribution of `state`,
/// invoking `record` once per draw. The cumulative table is built once.
pub(crate) fn sample_into(
    state: &StateVector,
    shots: u64,
    rng: &mut ChaCha8Rng,
    mut record: impl FnMut(usize),
) {
    let mut cumulative = Vec::with_capacity(state.dim());
    let mut acc = 0.0;
    for a in state.amplitudes() {
        acc += a.norm_sqr();
        cumulative.push(acc);
    }
    let total = acc;
    for _ in 0..shots {
        let r = rng.gen::<f64>() * total;
        let idx = cumulative.partition_point(|&c| c <= r).min(state.dim() - 1);
        record(idx);
    }
}
