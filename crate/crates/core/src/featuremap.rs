//! Data-encoding circuits `|Φ(x)⟩ = (U_Φ(x) H^⊗n)^r |0⟩^n` with diagonal
//! `U_Φ(x) = exp(i Σ_S φ_S(x) Π_{i∈S} Z_i)` over singletons and edges.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{Circuit, Gate, StateVector};

/// Name of the built-in rule `φ_i = x_i`, `φ_ij = (π − x_i)(π − x_j)`.
pub const ZZ_DEFAULT_RULE: &str = "zz-default";
/// Name of the rule with `φ_i = x_i` and all pair terms zero.
pub const SINGLE_ONLY_RULE: &str = "single-only";

/// Coefficients of one datum.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSet {
    pub phi_single: Vec<f64>,
    /// Same order as `FeatureMapSpec::edges`.
    pub phi_pair: Vec<f64>,
}

/// Maps `(x, edges)` to the coefficient set.
pub type CoefficientRule = fn(&[f64], &[(usize, usize)]) -> CoefficientSet;

fn zz_default_rule(x: &[f64], edges: &[(usize, usize)]) -> CoefficientSet {
    CoefficientSet {
        phi_single: x.to_vec(),
        phi_pair: edges
            .iter()
            .map(|&(i, j)| (PI - x[i]) * (PI - x[j]))
            .collect(),
    }
}

fn single_only_rule(x: &[f64], edges: &[(usize, usize)]) -> CoefficientSet {
    CoefficientSet {
        phi_single: x.to_vec(),
        phi_pair: vec![0.0; edges.len()],
    }
}

/// Looks up a coefficient rule by name.
pub fn lookup_rule(name: &str) -> Option<CoefficientRule> {
    match name {
        ZZ_DEFAULT_RULE => Some(zz_default_rule),
        SINGLE_ONLY_RULE => Some(single_only_rule),
        _ => None,
    }
}

pub fn rule_names() -> &'static [&'static str] {
    &[ZZ_DEFAULT_RULE, SINGLE_ONLY_RULE]
}

/// `φ_i = x_i`, `φ_ij = (π − x_i)(π − x_j)` on the given edges.
pub fn default_coefficients(x: &[f64], edges: &[(usize, usize)]) -> CoefficientSet {
    zz_default_rule(x, edges)
}

/// All pairs for up to three qubits, a line `0-1-…-(n−1)` beyond.
pub fn default_edges(n_qubits: usize) -> Vec<(usize, usize)> {
    if n_qubits <= 3 {
        let mut edges = Vec::new();
        for i in 0..n_qubits {
            for j in i + 1..n_qubits {
                edges.push((i, j));
            }
        }
        edges
    } else {
        (0..n_qubits - 1).map(|i| (i, i + 1)).collect()
    }
}

/// RZ angle realizing `exp(iφZ)` under `RZ(θ) = exp(−iθZ/2)`.
pub fn phase_to_rz(phi: f64) -> f64 {
    -2.0 * phi
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureMapSpec {
    pub n_qubits: usize,
    pub edges: Vec<(usize, usize)>,
    pub repetitions: usize,
    pub rule: String,
}

impl FeatureMapSpec {
    pub fn new(
        n_qubits: usize,
        edges: Vec<(usize, usize)>,
        repetitions: usize,
        rule: &str,
    ) -> Result<Self> {
        let spec = Self {
            n_qubits,
            edges,
            repetitions,
            rule: rule.to_string(),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Two repetitions, default edges, default rule.
    pub fn zz_default(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            edges: default_edges(n_qubits),
            repetitions: 2,
            rule: ZZ_DEFAULT_RULE.to_string(),
        }
    }

    /// Same as [`zz_default`](Self::zz_default) with one repetition.
    pub fn single_layer(n_qubits: usize) -> Self {
        Self {
            repetitions: 1,
            ..Self::zz_default(n_qubits)
        }
    }

    pub fn validate(&self) -> Result<()> {
        crate::sim::Circuit::new(self.n_qubits)?;
        if self.repetitions == 0 {
            return Err(Error::InvalidParameter(
                "repetitions must be at least 1".into(),
            ));
        }
        for &(a, b) in &self.edges {
            for q in [a, b] {
                if q >= self.n_qubits {
                    return Err(Error::QubitOutOfRange {
                        index: q,
                        n_qubits: self.n_qubits,
                    });
                }
            }
            if a == b {
                return Err(Error::RepeatedQubit(a));
            }
        }
        if lookup_rule(&self.rule).is_none() {
            return Err(Error::InvalidParameter(format!(
                "unknown coefficient rule '{}'",
                self.rule
            )));
        }
        Ok(())
    }

    /// Data dimension expected by the rule.
    pub fn data_dim(&self) -> usize {
        self.n_qubits
    }

    pub fn coefficients(&self, x: &[f64]) -> Result<CoefficientSet> {
        let rule = lookup_rule(&self.rule).ok_or_else(|| {
            Error::InvalidParameter(format!("unknown coefficient rule '{}'", self.rule))
        })?;
        if x.len() != self.data_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.data_dim(),
                found: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite data coordinate".into()));
        }
        Ok(rule(x, &self.edges))
    }

    /// One diagonal block `U_Φ(x)` with precomputed coefficients.
    pub fn diagonal_gates(&self, coeffs: &CoefficientSet) -> Vec<Gate> {
        let mut gates = Vec::with_capacity(self.n_qubits + self.edges.len());
        for (q, &phi) in coeffs.phi_single.iter().enumerate() {
            gates.push(Gate::rz(q, phase_to_rz(phi)));
        }
        for (&(a, b), &phi) in self.edges.iter().zip(&coeffs.phi_pair) {
            gates.push(Gate::zz_phase(a, b, phi));
        }
        gates
    }

    /// `repetitions × [H layer; diagonal block]`.
    pub fn circuit(&self, x: &[f64]) -> Result<Circuit> {
        self.validate()?;
        let coeffs = self.coefficients(x)?;
        let diagonal = self.diagonal_gates(&coeffs);
        let mut c = Circuit::new(self.n_qubits)?;
        for _ in 0..self.repetitions {
            for q in 0..self.n_qubits {
                c.push(Gate::h(q))?;
            }
            for g in &diagonal {
                c.push(*g)?;
            }
        }
        Ok(c)
    }

    /// `|Φ(x)⟩`.
    pub fn state(&self, x: &[f64]) -> Result<StateVector> {
        let mut s = StateVector::zero(self.n_qubits)?;
        s.apply_circuit(&self.circuit(x)?)?;
        Ok(s)
    }
}

/// `⊗_i RZ(α_i) RY(β_i) RZ(γ_i) |0⟩` for Euler triples `(α, β, γ)`.
pub fn product_feature_state(angles: &[[f64; 3]]) -> Result<StateVector> {
    let n = angles.len();
    let mut c = Circuit::new(n)?;
    for (q, &[alpha, beta, gamma]) in angles.iter().enumerate() {
        c.push(Gate::rz(q, gamma))?;
        c.push(Gate::ry(q, beta))?;
        c.push(Gate::rz(q, alpha))?;
    }
    let mut s = StateVector::zero(n)?;
    s.apply_circuit(&c)?;
    Ok(s)
}
