use crate::error::{Error, Result};

/// Where a rotation gate takes its angle from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AngleSource {
    /// Index into the parameter vector supplied at execution time.
    Slot(usize),
    /// Fixed angle in radians, baked into the circuit.
    Fixed(f64),
}

/// Supported gate kinds.
///
/// `SAdjointH` is the fused single-qubit unitary H·S† that maps the Pauli-Y
/// eigenbasis onto the computational basis, so Y observables can be measured
/// with a single basis-change layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateKind {
    PauliX,
    Hadamard,
    SAdjointH,
    RotX,
    RotY,
    RotZ,
    Cnot,
}

impl GateKind {
    /// True for the single-parameter rotation kinds.
    pub fn is_parametric(self) -> bool {
        matches!(self, GateKind::RotX | GateKind::RotY | GateKind::RotZ)
    }
}

/// A single gate instance: kind, target, optional control, optional angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub target: usize,
    pub control: Option<usize>,
    pub angle: Option<AngleSource>,
}

impl Gate {
    pub fn x(target: usize) -> Self {
        Gate { kind: GateKind::PauliX, target, control: None, angle: None }
    }

    pub fn h(target: usize) -> Self {
        Gate { kind: GateKind::Hadamard, target, control: None, angle: None }
    }

    /// Basis change for measuring Pauli-Y: the unitary H·S†.
    pub fn s_adjoint_h(target: usize) -> Self {
        Gate { kind: GateKind::SAdjointH, target, control: None, angle: None }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Gate { kind: GateKind::Cnot, target, control: Some(control), angle: None }
    }

    pub fn rx(target: usize, angle: f64) -> Self {
        Gate { kind: GateKind::RotX, target, control: None, angle: Some(AngleSource::Fixed(angle)) }
    }

    pub fn ry(target: usize, angle: f64) -> Self {
        Gate { kind: GateKind::RotY, target, control: None, angle: Some(AngleSource::Fixed(angle)) }
    }

    pub fn rz(target: usize, angle: f64) -> Self {
        Gate { kind: GateKind::RotZ, target, control: None, angle: Some(AngleSource::Fixed(angle)) }
    }

    pub fn rx_slot(target: usize, slot: usize) -> Self {
        Gate { kind: GateKind::RotX, target, control: None, angle: Some(AngleSource::Slot(slot)) }
    }

    pub fn ry_slot(target: usize, slot: usize) -> Self {
        Gate { kind: GateKind::RotY, target, control: None, angle: Some(AngleSource::Slot(slot)) }
    }

    pub fn rz_slot(target: usize, slot: usize) -> Self {
        Gate { kind: GateKind::RotZ, target, control: None, angle: Some(AngleSource::Slot(slot)) }
    }

    /// Resolve the angle for this gate against a parameter vector.
    pub fn resolve_angle(&self, params: &[f64]) -> Result<f64> {
        match self.angle {
            Some(AngleSource::Fixed(a)) => Ok(a),
            Some(AngleSource::Slot(i)) => params.get(i).copied().ok_or_else(|| {
                Error::Parameter(format!(
                    "gate references parameter slot {i} but only {} parameters were given",
                    params.len()
                ))
            }),
            None => Err(Error::Parameter(format!(
                "gate {:?} carries no angle source",
                self.kind
            ))),
        }
    }

    /// Validate qubit indices and the angle-source arity against a register size
    /// and a parameter count.
    pub(crate) fn validate(&self, num_qubits: usize, num_params: usize) -> Result<()> {
        if self.target >= num_qubits {
            return Err(Error::Index(format!(
                "gate target {} outside register of {num_qubits} qubits",
                self.target
            )));
        }
        if let Some(c) = self.control {
            if c >= num_qubits {
                return Err(Error::Index(format!(
                    "gate control {c} outside register of {num_qubits} qubits"
                )));
            }
            if c == self.target {
                return Err(Error::Index(format!(
                    "gate control and target coincide on qubit {c}"
                )));
            }
        }
        match (self.kind.is_parametric(), self.angle) {
            (true, None) => {
                return Err(Error::Parameter(format!(
                    "parametric gate {:?} has no angle source",
                    self.kind
                )))
            }
            (false, Some(_)) => {
                return Err(Error::Parameter(format!(
                    "non-parametric gate {:?} carries an angle source",
                    self.kind
                )))
            }
            _ => {}
        }
        if let Some(AngleSource::Slot(i)) = self.angle {
            if i >= num_params {
                return Err(Error::Parameter(format!(
                    "angle slot {i} outside parameter vector of length {num_params}"
                )));
            }
        }
        Ok(())
    }

    /// Same gate with all qubit indices shifted up by `offset`.
    pub(crate) fn shifted(&self, offset: usize) -> Gate {
        Gate {
            kind: self.kind,
            target: self.target + offset,
            control: self.control.map(|c| c + offset),
            angle: self.angle,
        }
    }
}
