//! Hermitian observables as weighted Pauli strings: construction,
//! canonicalization, the transverse-field Ising model, measurement
//! decomposition into diagonal settings, and the dense diagonalization
//! oracle used for verification.

mod dense;
mod measure;

pub use dense::{exact_solve, exact_thermal_average, to_dense, ExactSolution, MAX_DENSE_QUBITS};
pub use measure::{diag_circ, MeasurementSetting};

use crate::error::{Error, Result};

/// Coefficients smaller than this are dropped during canonicalization.
pub const COEFF_EPS: f64 = 1e-14;

/// Single-qubit Pauli axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn from_char(c: char) -> Option<Pauli> {
        match c.to_ascii_uppercase() {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    fn to_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// A tensor product of Pauli axes over a fixed register.
///
/// `axes()[q]` is the operator on qubit `q`; in the text form (`"XXI"`)
/// the leftmost character is qubit 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    axes: Vec<Pauli>,
}

impl PauliString {
    pub fn new(axes: Vec<Pauli>) -> Self {
        PauliString { axes }
    }

    /// All-identity string on `n` qubits.
    pub fn identity(n: usize) -> Self {
        PauliString { axes: vec![Pauli::I; n] }
    }

    /// Single non-identity axis on one qubit of an `n`-qubit register.
    pub fn single(n: usize, qubit: usize, axis: Pauli) -> Result<Self> {
        if qubit >= n {
            return Err(Error::Index(format!("qubit {qubit} outside register of {n}")));
        }
        let mut axes = vec![Pauli::I; n];
        axes[qubit] = axis;
        Ok(PauliString { axes })
    }

    /// Parse from text such as `"XXI"`; leftmost character is qubit 0.
    pub fn parse(text: &str) -> Result<Self> {
        let axes: Option<Vec<Pauli>> = text.chars().map(Pauli::from_char).collect();
        axes.map(|axes| PauliString { axes }).ok_or_else(|| {
            Error::Data(format!("invalid Pauli axes string {text:?} (expected [IXYZ]+)"))
        })
    }

    pub fn axes(&self) -> &[Pauli] {
        &self.axes
    }

    pub fn len(&self) -> usize {
        self.axes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axes.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.axes.iter().all(|a| *a == Pauli::I)
    }

    /// Bit mask of qubits carrying a non-identity axis.
    pub fn support_mask(&self) -> usize {
        self.axes
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != Pauli::I)
            .fold(0usize, |m, (q, _)| m | (1 << q))
    }

    pub fn contains_y(&self) -> bool {
        self.axes.iter().any(|a| *a == Pauli::Y)
    }
}

impl std::fmt::Display for PauliString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for a in &self.axes {
            write!(f, "{}", a.to_char())?;
        }
        Ok(())
    }
}

/// A real-weighted sum of Pauli strings over a common register.
///
/// Construction canonicalizes: duplicate strings are merged by summing
/// coefficients (into the first occurrence) and terms with |coefficient|
/// below [`COEFF_EPS`] are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    num_qubits: usize,
    terms: Vec<(f64, PauliString)>,
}

impl PauliSum {
    pub fn new(num_qubits: usize) -> Self {
        PauliSum { num_qubits, terms: Vec::new() }
    }

    /// The identity observable (coefficient 1 on the all-I string).
    pub fn identity(num_qubits: usize) -> Self {
        let mut sum = PauliSum::new(num_qubits);
        sum.add(1.0, PauliString::identity(num_qubits)).expect("identity term");
        sum
    }

    pub fn from_terms(num_qubits: usize, terms: Vec<(f64, PauliString)>) -> Result<Self> {
        let mut sum = PauliSum::new(num_qubits);
        for (c, s) in terms {
            sum.add(c, s)?;
        }
        Ok(sum)
    }

    /// Add a term, merging with an existing identical string.
    pub fn add(&mut self, coeff: f64, string: PauliString) -> Result<()> {
        if string.len() != self.num_qubits {
            return Err(Error::Shape(format!(
                "term on {} qubits added to a {}-qubit sum",
                string.len(),
                self.num_qubits
            )));
        }
        if !coeff.is_finite() {
            return Err(Error::Data(format!("non-finite coefficient {coeff}")));
        }
        if let Some(pos) = self.terms.iter().position(|(_, s)| *s == string) {
            self.terms[pos].0 += coeff;
            if self.terms[pos].0.abs() < COEFF_EPS {
                self.terms.remove(pos);
            }
        } else if coeff.abs() >= COEFF_EPS {
            self.terms.push((coeff, string));
        }
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn contains_y(&self) -> bool {
        self.terms.iter().any(|(_, s)| s.contains_y())
    }

    /// Parse the plain-text observable format: one `<coefficient> <axes>`
    /// pair per line, `#` starting a comment, blank lines ignored.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut terms: Vec<(f64, PauliString)> = Vec::new();
        let mut width: Option<usize> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let coeff_text = parts.next().ok_or(Error::Parse {
                line: line_no,
                msg: "missing coefficient".into(),
            })?;
            let axes_text = parts.next().ok_or(Error::Parse {
                line: line_no,
                msg: "missing axes string".into(),
            })?;
            if parts.next().is_some() {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "expected exactly `<coefficient> <axes>`".into(),
                });
            }
            let coeff: f64 = coeff_text.parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("invalid coefficient {coeff_text:?}"),
            })?;
            let string = PauliString::parse(axes_text).map_err(|e| Error::Parse {
                line: line_no,
                msg: e.to_string(),
            })?;
            match width {
                None => width = Some(string.len()),
                Some(w) if w != string.len() => {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("axes length {} differs from earlier {w}", string.len()),
                    })
                }
                _ => {}
            }
            terms.push((coeff, string));
        }
        let width = width.ok_or(Error::Parse { line: 0, msg: "no terms found".into() })?;
        PauliSum::from_terms(width, terms)
    }
}

/// The one-dimensional transverse-field Ising Hamiltonian
/// −J Σ X_i X_{i+1} − h Σ Z_i, with periodic or open bonds.
pub fn build_tfi(q_sys: usize, coupling: f64, field: f64, periodic: bool) -> Result<PauliSum> {
    if q_sys < 2 {
        return Err(Error::Argument(format!("TFI chain needs at least 2 sites, got {q_sys}")));
    }
    let mut sum = PauliSum::new(q_sys);
    let bonds = if periodic { q_sys } else { q_sys - 1 };
    for i in 0..bonds {
        let j = (i + 1) % q_sys;
        let mut axes = vec![Pauli::I; q_sys];
        axes[i] = Pauli::X;
        axes[j] = Pauli::X;
        sum.add(-coupling, PauliString::new(axes))?;
    }
    for i in 0..q_sys {
        sum.add(-field, PauliString::single(q_sys, i, Pauli::Z)?)?;
    }
    Ok(sum)
}
