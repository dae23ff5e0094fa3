use num_complex::Complex64;

use super::circuit::Circuit;
use super::noise::NoiseModel;
use super::sampling::Probabilities;
use super::state::{check_qubits, StateVector};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, CMatrix};

/// Mixed state stored as `vec(ρ)`, entry `(r, c)` at index `(r << n) | c`.
///
/// Row indices occupy the high `n` bits, so a gate acts on rows through its
/// kernel shifted by `n` and on columns through the conjugate kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    entries: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Ok(Self::from_pure(&StateVector::zero(n_qubits)?))
    }

    pub fn from_pure(state: &StateVector) -> Self {
        let amps = state.amplitudes();
        let mut entries = Vec::with_capacity(amps.len() * amps.len());
        for r in amps {
            for c in amps {
                entries.push(r * c.conj());
            }
        }
        Self {
            n_qubits: state.n_qubits(),
            entries,
        }
    }

    /// Builds a density matrix from a dense row-major matrix.
    pub fn from_matrix(m: &CMatrix) -> Result<Self> {
        let dim = m.dim();
        if !dim.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "dimension {dim} is not a power of two"
            )));
        }
        let n_qubits = dim.trailing_zeros() as usize;
        check_qubits(n_qubits)?;
        Ok(Self {
            n_qubits,
            entries: m.as_slice().to_vec(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row << self.n_qubits) | col]
    }

    pub fn to_matrix(&self) -> CMatrix {
        CMatrix::from_row_major(self.dim(), self.entries.clone()).expect("square by construction")
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    /// Largest `|ρ_rc − conj(ρ_cr)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for r in 0..d {
            for c in r..d {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(&self.to_matrix())
    }

    /// Diagonal of ρ.
    pub fn probabilities(&self) -> Probabilities {
        Probabilities::from_vec_unchecked((0..self.dim()).map(|i| self.get(i, i).re).collect())
    }

    /// Runs `circuit` gate by gate, each gate followed by the depolarizing
    /// channel of `noise` at the circuit's stretch.
    pub fn evolve(&self, circuit: &Circuit, noise: &NoiseModel) -> Result<Self> {
        if circuit.n_qubits() != self.n_qubits {
            return Err(Error::QubitCountMismatch {
                expected: self.n_qubits,
                found: circuit.n_qubits(),
            });
        }
        let mut out = self.clone();
        let n = self.n_qubits;
        for gate in circuit.gates() {
            let k = gate.kernel();
            k.apply(&mut out.entries, n, false);
            k.apply(&mut out.entries, 0, true);
            let p = noise.effective(gate, circuit.stretch());
            if p > 0.0 {
                out.depolarize(&gate.support().as_vec(), p);
            }
        }
        Ok(out)
    }

    /// `ρ → (1−p)ρ + p · (I/d ⊗ tr_S ρ)` for the qubit set `S`.
    pub fn depolarize(&mut self, support: &[usize], p: f64) {
        let n = self.n_qubits;
        let dim = self.dim();
        let mask: usize = support.iter().map(|q| 1usize << q).sum();
        let d = 1usize << support.len();
        // every assignment of the support bits, as a mask within `mask`
        let spreads: Vec<usize> = (0..d)
            .map(|k| {
                support
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| k >> j & 1 == 1)
                    .map(|(_, q)| 1usize << q)
                    .sum()
            })
            .collect();
        let keep = 1.0 - p;
        let share = p / d as f64;
        for r in 0..dim {
            for c in 0..dim {
                let (rs, cs) = (r & mask, c & mask);
                if rs != cs {
                    self.entries[(r << n) | c] *= keep;
                } else if rs == 0 {
                    let total: Complex64 = spreads
                        .iter()
                        .map(|s| self.entries[((r | s) << n) | (c | s)])
                        .sum();
                    for s in &spreads {
                        let idx = ((r | s) << n) | (c | s);
                        self.entries[idx] = self.entries[idx] * keep + total * share;
                    }
                }
            }
        }
    }
}
