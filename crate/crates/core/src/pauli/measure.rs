use super::{Pauli, PauliSum};
use crate::error::Result;
use crate::qsim::{Circuit, Gate};

/// One measurement circuit of a diagonalizing decomposition: a single-qubit
/// basis-change layer S and the diagonal remainder Λ = S O_group S†,
/// expressed as weighted Z-masks over the rotated computational basis.
#[derive(Debug, Clone)]
pub struct MeasurementSetting {
    basis_change: Circuit,
    diagonal: Vec<(f64, usize)>,
}

impl MeasurementSetting {
    /// Circuit rotating the measured register into the setting's eigenbasis.
    pub fn basis_change(&self) -> &Circuit {
        &self.basis_change
    }

    /// (coefficient, z_mask) pairs of the diagonal operator.
    pub fn diagonal(&self) -> &[(f64, usize)] {
        &self.diagonal
    }

    /// Eigenvalue of the diagonal operator on rotated basis state `basis`.
    pub fn diagonal_value(&self, basis: usize) -> f64 {
        self.diagonal
            .iter()
            .map(|&(coeff, mask)| {
                if (basis & mask).count_ones() % 2 == 0 {
                    coeff
                } else {
                    -coeff
                }
            })
            .sum()
    }
}

/// Decompose an observable into measurement settings, one per qubit-wise
/// commuting group of its terms (greedy first-fit over terms in order).
///
/// Each basis change uses only single-qubit gates: Hadamard where the group
/// axis is X, the Y-basis rotation where it is Y, nothing for Z or identity.
pub fn diag_circ(obs: &PauliSum) -> Result<Vec<MeasurementSetting>> {
    struct Group {
        axes: Vec<Pauli>,
        terms: Vec<(f64, usize)>,
    }

    let n = obs.num_qubits();
    let mut groups: Vec<Group> = Vec::new();
    for (coeff, string) in obs.terms() {
        let slot = groups.iter_mut().find(|g| {
            string
                .axes()
                .iter()
                .zip(&g.axes)
                .all(|(a, b)| *a == Pauli::I || *b == Pauli::I || a == b)
        });
        let entry = (*coeff, string.support_mask());
        match slot {
            Some(group) => {
                for (merged, axis) in group.axes.iter_mut().zip(string.axes()) {
                    if *merged == Pauli::I {
                        *merged = *axis;
                    }
                }
                group.terms.push(entry);
            }
            None => groups.push(Group { axes: string.axes().to_vec(), terms: vec![entry] }),
        }
    }

    let mut settings = Vec::with_capacity(groups.len());
    for group in groups {
        let mut circuit = Circuit::new(n, 0);
        for (q, axis) in group.axes.iter().enumerate() {
            match axis {
                Pauli::X => circuit.push(Gate::h(q))?,
                Pauli::Y => circuit.push(Gate::s_adjoint_h(q))?,
                Pauli::I | Pauli::Z => {}
            }
        }
        settings.push(MeasurementSetting { basis_change: circuit, diagonal: group.terms });
    }
    Ok(settings)
}
