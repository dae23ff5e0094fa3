//! Hardware-efficient variational circuit `W(θ)`: local Y/Z rotation layers
//! interleaved with CZ entanglers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::featuremap::default_edges;
use crate::sim::{Circuit, Gate};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    pub n_qubits: usize,
    pub depth: usize,
    pub edges: Vec<(usize, usize)>,
}

/// Which angle of a local rotation pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Y = 0,
    Z = 1,
}

impl AnsatzSpec {
    pub fn new(n_qubits: usize, depth: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let spec = Self {
            n_qubits,
            depth,
            edges,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Default entangler graph; a single edge for two qubits.
    pub fn with_default_edges(n_qubits: usize, depth: usize) -> Self {
        Self {
            n_qubits,
            depth,
            edges: default_edges(n_qubits),
        }
    }

    pub fn validate(&self) -> Result<()> {
        Circuit::new(self.n_qubits)?;
        for &(a, b) in &self.edges {
            Gate::cz(a, b).validate(self.n_qubits)?;
        }
        Ok(())
    }

    /// `2n(l+1)`.
    pub fn parameter_count(&self) -> usize {
        parameter_count(self.n_qubits, self.depth)
    }

    /// Position of `θ[layer][qubit][axis]`.
    pub fn index(&self, layer: usize, qubit: usize, axis: Axis) -> usize {
        (layer * self.n_qubits + qubit) * 2 + axis as usize
    }

    /// Layer `t` (for `t = 0..=l`) applies `exp(iθ_z Z/2) exp(iθ_y Y/2)` on
    /// each qubit, emitted as `RY(−θ_y)` then `RZ(−θ_z)`; a CZ layer over
    /// the edges follows every local layer except the last.
    pub fn circuit(&self, theta: &[f64]) -> Result<Circuit> {
        self.validate()?;
        if theta.len() != self.parameter_count() {
            return Err(Error::DimensionMismatch {
                expected: self.parameter_count(),
                found: theta.len(),
            });
        }
        let mut c = Circuit::new(self.n_qubits)?;
        for layer in 0..=self.depth {
            for q in 0..self.n_qubits {
                c.push(Gate::ry(q, -theta[self.index(layer, q, Axis::Y)]))?;
                c.push(Gate::rz(q, -theta[self.index(layer, q, Axis::Z)]))?;
            }
            if layer < self.depth {
                for &(a, b) in &self.edges {
                    c.push(Gate::cz(a, b))?;
                }
            }
        }
        Ok(c)
    }
}

pub fn parameter_count(n_qubits: usize, depth: usize) -> usize {
    2 * n_qubits * (depth + 1)
}
