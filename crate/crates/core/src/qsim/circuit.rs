use super::gate::Gate;
use crate::error::{Error, Result};

/// An ordered gate sequence over a fixed register, with a declared number of
/// free parameters.
///
/// Gates are validated on insertion, so a constructed circuit always satisfies
/// its own index and slot invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    num_params: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_qubits: usize, num_params: usize) -> Self {
        Circuit { num_qubits, num_params, gates: Vec::new() }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_params(&self) -> usize {
        self.num_params
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    /// Append a gate after validating it against this circuit's register and
    /// parameter count.
    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.num_qubits, self.num_params)?;
        self.gates.push(gate);
        Ok(())
    }

    /// Append all gates of `other`, with qubit indices shifted by `offset`.
    ///
    /// Parameter slots are kept as-is: the appended gates read from the same
    /// parameter vector as the host circuit.
    pub fn append_shifted(&mut self, other: &Circuit, offset: usize) -> Result<()> {
        if offset + other.num_qubits > self.num_qubits {
            return Err(Error::Shape(format!(
                "cannot embed a {}-qubit circuit at offset {offset} into {} qubits",
                other.num_qubits, self.num_qubits
            )));
        }
        if other.num_params > self.num_params {
            return Err(Error::Shape(format!(
                "embedded circuit declares {} parameters, host has {}",
                other.num_params, self.num_params
            )));
        }
        for g in &other.gates {
            self.push(g.shifted(offset))?;
        }
        Ok(())
    }
}
