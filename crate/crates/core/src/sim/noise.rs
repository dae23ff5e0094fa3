use serde::{Deserialize, Serialize};

use super::gate::Gate;
use crate::error::{Error, Result};

/// Gate-level depolarizing noise. Each gate is followed by a depolarizing
/// channel on its support, with probability `p1` (one qubit) or `p2`
/// (two qubits) multiplied by the circuit stretch and capped at 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub p1: f64,
    pub p2: f64,
}

impl NoiseModel {
    pub fn new(p1: f64, p2: f64) -> Result<Self> {
        for p in [p1, p2] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParameter(format!(
                    "depolarizing probability {p} outside [0, 1]"
                )));
            }
        }
        Ok(Self { p1, p2 })
    }

    pub fn noiseless() -> Self {
        Self { p1: 0.0, p2: 0.0 }
    }

    pub fn is_noiseless(&self) -> bool {
        self.p1 == 0.0 && self.p2 == 0.0
    }

    pub fn effective(&self, gate: &Gate, stretch: f64) -> f64 {
        let p = if gate.is_two_qubit() {
            self.p2
        } else {
            self.p1
        };
        (p * stretch).min(1.0)
    }
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::noiseless()
    }
}
