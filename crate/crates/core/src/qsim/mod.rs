//! Dense statevector simulation: state allocation, bitmask gate kernels,
//! circuit execution, expectation values, auxiliary-branch projections, and
//! seeded shot sampling.
//!
//! Gate kernels update amplitude pairs in place; no general matrix products
//! are formed on the execution path. All randomness flows through explicit
//! seeds so runs are bit-reproducible.

mod circuit;
mod gate;
mod state;

pub use circuit::Circuit;
pub use gate::{AngleSource, Gate, GateKind};
pub use state::{StateVector, MAX_DENSITY_QUBITS, MAX_QUBITS};

pub(crate) use state::sample_into;

/// How expectation values are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    /// Deterministic expectation values from the full statevector.
    Exact,
    /// Estimates from finite sampled measurement counts.
    Shots { shots: u64, seed: u64 },
}

impl EvalMode {
    pub fn is_exact(&self) -> bool {
        matches!(self, EvalMode::Exact)
    }

    /// Same mode with the sampling seed replaced (no-op in exact mode).
    pub fn with_seed(&self, seed: u64) -> EvalMode {
        match *self {
            EvalMode::Exact => EvalMode::Exact,
            EvalMode::Shots { shots, .. } => EvalMode::Shots { shots, seed },
        }
    }
}
