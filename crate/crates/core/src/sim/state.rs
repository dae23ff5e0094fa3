use num_complex::Complex64;

use super::circuit::Circuit;
use super::gate::Gate;
use super::sampling::Probabilities;
use super::MAX_QUBITS;
use crate::error::{Error, Result};

const NORM_TOL: f64 = 1e-10;

/// Pure state of an `n`-qubit register. Qubit 0 is the least significant bit
/// of the basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

pub(crate) fn check_qubits(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 {
        return Err(Error::InvalidParameter(
            "register needs at least one qubit".into(),
        ));
    }
    if n_qubits > MAX_QUBITS {
        return Err(Error::TooManyQubits(n_qubits));
    }
    Ok(())
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: index,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// Wraps an amplitude vector; its length must be a power of two and its
    /// norm one within `1e-10`.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "amplitude count {len} is not a power of two"
            )));
        }
        let n_qubits = len.trailing_zeros() as usize;
        check_qubits(n_qubits)?;
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm_sqr));
        }
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
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

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        gate.kernel().apply(&mut self.amps, 0, false);
        Ok(())
    }

    /// Applies the gates of `circuit` in order.
    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.n_qubits() != self.n_qubits {
            return Err(Error::QubitCountMismatch {
                expected: self.n_qubits,
                found: circuit.n_qubits(),
            });
        }
        // gates were validated when pushed onto the circuit
        for gate in circuit.gates() {
            gate.kernel().apply(&mut self.amps, 0, false);
        }
        Ok(())
    }

    /// Functional form of [`apply_circuit`](Self::apply_circuit).
    pub fn evolved(&self, circuit: &Circuit) -> Result<Self> {
        let mut out = self.clone();
        out.apply_circuit(circuit)?;
        Ok(out)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// `self ⊗ other` with `self` on the low qubits `0..n_self`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        check_qubits(self.n_qubits + other.n_qubits)?;
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for b in &other.amps {
            for a in &self.amps {
                amps.push(a * b);
            }
        }
        Ok(Self {
            n_qubits: self.n_qubits + other.n_qubits,
            amps,
        })
    }

    /// Born-rule distribution over basis strings.
    pub fn probabilities(&self) -> Probabilities {
        Probabilities::from_vec_unchecked(self.amps.iter().map(|a| a.norm_sqr()).collect())
    }

    /// Equality up to a global phase: `1 - |⟨a|b⟩| ≤ tol`.
    pub fn approx_eq_up_to_phase(&self, other: &Self, tol: f64) -> bool {
        match self.inner(other) {
            Ok(ip) => (1.0 - ip.norm()).abs() <= tol,
            Err(_) => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_amplitudes() {
        let c = |r| Complex64::new(r, 0.0);
        assert!(matches!(
            StateVector::from_amplitudes(vec![c(1.0), c(1.0)]),
            Err(Error::NotNormalized(_))
        ));
        assert!(StateVector::from_amplitudes(vec![c(1.0), c(0.0), c(0.0)]).is_err());
        assert!(matches!(
            StateVector::zero(21),
            Err(Error::TooManyQubits(21))
        ));
    }

    #[test]
    fn tensor_places_first_factor_low() {
        let one = StateVector::basis(1, 1).unwrap();
        let zero = StateVector::zero(1).unwrap();
        let t = one.tensor(&zero).unwrap();
        assert_eq!(t.amplitudes()[1], Complex64::new(1.0, 0.0));
    }
}
