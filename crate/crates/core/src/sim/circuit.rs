use serde::{Deserialize, Serialize};

use super::gate::Gate;
use super::state::check_qubits;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// Ordered gate list on a fixed register.
///
/// `stretch` scales the duration of every gate and, through
/// [`NoiseModel`](super::NoiseModel), the per-gate error probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    stretch: f64,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        Ok(Self {
            n_qubits,
            gates: Vec::new(),
            stretch: 1.0,
        })
    }

    pub fn from_gates(n_qubits: usize, gates: impl IntoIterator<Item = Gate>) -> Result<Self> {
        let mut c = Self::new(n_qubits)?;
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    /// Appends every gate of `other` after the gates of `self`.
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::QubitCountMismatch {
                expected: self.n_qubits,
                found: other.n_qubits,
            });
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(())
    }

    pub fn then(mut self, other: &Circuit) -> Result<Self> {
        self.append(other)?;
        Ok(self)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn stretch(&self) -> f64 {
        self.stretch
    }

    pub fn with_stretch(mut self, stretch: f64) -> Result<Self> {
        if !(stretch.is_finite() && stretch > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "stretch factor must be positive, got {stretch}"
            )));
        }
        self.stretch = stretch;
        Ok(self)
    }

    /// Reversed gate order with every gate inverted. The stretch tag is kept.
    pub fn adjoint(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
            stretch: self.stretch,
        }
    }

    pub fn count_two_qubit(&self) -> usize {
        self.gates.iter().filter(|g| g.is_two_qubit()).count()
    }

    /// Dense unitary, built column by column from basis states.
    pub fn unitary(&self) -> CMatrix {
        let dim = 1usize << self.n_qubits;
        let columns: Vec<_> = (0..dim)
            .map(|j| {
                let mut amps = vec![num_complex::Complex64::new(0.0, 0.0); dim];
                amps[j] = num_complex::Complex64::new(1.0, 0.0);
                for g in &self.gates {
                    g.kernel().apply(&mut amps, 0, false);
                }
                amps
            })
            .collect();
        CMatrix::from_columns(&columns).expect("square by construction")
    }
}
