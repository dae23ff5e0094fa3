use super::density::DensityMatrix;
use super::sampling::Probabilities;
use super::state::{check_qubits, StateVector};
use crate::error::{Error, Result};

/// Anything that yields a distribution over computational basis strings.
pub trait BornRule {
    fn n_qubits(&self) -> usize;
    fn born_probabilities(&self) -> Probabilities;
}

impl BornRule for StateVector {
    fn n_qubits(&self) -> usize {
        StateVector::n_qubits(self)
    }

    fn born_probabilities(&self) -> Probabilities {
        self.probabilities()
    }
}

impl BornRule for DensityMatrix {
    fn n_qubits(&self) -> usize {
        DensityMatrix::n_qubits(self)
    }

    fn born_probabilities(&self) -> Probabilities {
        self.probabilities()
    }
}

/// Diagonal observable `Σ_z f(z)|z⟩⟨z|`.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    n_qubits: usize,
    diagonal: Vec<f64>,
}

impl Observable {
    pub fn from_diagonal(diagonal: Vec<f64>) -> Result<Self> {
        let len = diagonal.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "diagonal length {len} is not a power of two"
            )));
        }
        if diagonal.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "observable entries must be finite".into(),
            ));
        }
        let n_qubits = len.trailing_zeros() as usize;
        check_qubits(n_qubits)?;
        Ok(Self { n_qubits, diagonal })
    }

    /// Boolean function observable from a ±1 truth table.
    pub fn from_boolean(table: &[i8]) -> Result<Self> {
        if table.iter().any(|&v| v != 1 && v != -1) {
            return Err(Error::InvalidParameter(
                "truth table entries must be ±1".into(),
            ));
        }
        Self::from_diagonal(table.iter().map(|&v| v as f64).collect())
    }

    /// `Π_{q ∈ qubits} Z_q`.
    pub fn z_string(n_qubits: usize, qubits: &[usize]) -> Result<Self> {
        check_qubits(n_qubits)?;
        let mut mask = 0usize;
        for &q in qubits {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange { index: q, n_qubits });
            }
            mask |= 1 << q;
        }
        let diagonal = (0..1usize << n_qubits)
            .map(|z| {
                if (z & mask).count_ones().is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                }
            })
            .collect();
        Ok(Self { n_qubits, diagonal })
    }

    /// Parity of all bits, `Z⊗…⊗Z`.
    pub fn parity(n_qubits: usize) -> Result<Self> {
        Self::z_string(n_qubits, &(0..n_qubits).collect::<Vec<_>>())
    }

    /// `|0…0⟩⟨0…0|`.
    pub fn zero_projector(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        let mut diagonal = vec![0.0; 1 << n_qubits];
        diagonal[0] = 1.0;
        Ok(Self { n_qubits, diagonal })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn is_boolean(&self) -> bool {
        self.diagonal.iter().all(|&v| v == 1.0 || v == -1.0)
    }

    /// ±1 truth table, if the observable is boolean.
    pub fn truth_table(&self) -> Option<Vec<i8>> {
        self.is_boolean()
            .then(|| self.diagonal.iter().map(|&v| v as i8).collect())
    }

    pub fn expectation<S: BornRule + ?Sized>(&self, state: &S) -> Result<f64> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::QubitCountMismatch {
                expected: self.n_qubits,
                found: state.n_qubits(),
            });
        }
        self.expectation_of(&state.born_probabilities())
    }

    /// `Σ_z f(z) p(z)` for any weight vector, quasi-probabilities included.
    pub fn expectation_of(&self, dist: &Probabilities) -> Result<f64> {
        self.expectation_of_slice(dist.as_slice())
    }

    pub fn expectation_of_slice(&self, weights: &[f64]) -> Result<f64> {
        if weights.len() != self.diagonal.len() {
            return Err(Error::DimensionMismatch {
                expected: self.diagonal.len(),
                found: weights.len(),
            });
        }
        Ok(self.diagonal.iter().zip(weights).map(|(f, p)| f * p).sum())
    }
}
