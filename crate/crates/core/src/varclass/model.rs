use serde::{Deserialize, Serialize};

use crate::ansatz::AnsatzSpec;
use crate::error::{Error, Result};
use crate::featuremap::FeatureMapSpec;
use crate::mitigation::{mitigated_expectation, EvalMode, StretchPair};
use crate::rng::stream_rng;
use crate::sim::{sample_shots, Circuit, NoiseModel, Observable, StateVector};

/// How label probabilities are obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProbMode {
    /// Born probabilities.
    Exact,
    /// Frequencies from `shots` samples of stream `stream` under `seed`.
    Shots { shots: u64, seed: u64, stream: u64 },
}

/// Depolarizing noise applied while evaluating the classifier, optionally
/// with zero-noise extrapolation of `⟨f⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSettings {
    pub model: NoiseModel,
    pub mitigate: bool,
    pub pair: StretchPair,
}

/// Raw and (when requested) extrapolated `p₊` of one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisyProbability {
    pub raw: f64,
    pub mitigated: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariationalModel {
    pub feature: FeatureMapSpec,
    pub ansatz: AnsatzSpec,
    pub theta: Vec<f64>,
    pub bias: f64,
    pub f: Observable,
}

impl VariationalModel {
    pub fn new(
        feature: FeatureMapSpec,
        ansatz: AnsatzSpec,
        theta: Vec<f64>,
        bias: f64,
        f: Observable,
    ) -> Result<Self> {
        let m = Self {
            feature,
            ansatz,
            theta,
            bias,
            f,
        };
        m.validate()?;
        Ok(m)
    }

    /// Parity observable and zero bias.
    pub fn with_parity(
        feature: FeatureMapSpec,
        ansatz: AnsatzSpec,
        theta: Vec<f64>,
    ) -> Result<Self> {
        let f = Observable::parity(feature.n_qubits)?;
        Self::new(feature, ansatz, theta, 0.0, f)
    }

    pub fn validate(&self) -> Result<()> {
        self.feature.validate()?;
        self.ansatz.validate()?;
        let n = self.feature.n_qubits;
        for found in [self.ansatz.n_qubits, self.f.n_qubits()] {
            if found != n {
                return Err(Error::QubitCountMismatch { expected: n, found });
            }
        }
        if self.theta.len() != self.ansatz.parameter_count() {
            return Err(Error::DimensionMismatch {
                expected: self.ansatz.parameter_count(),
                found: self.theta.len(),
            });
        }
        if self.theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidParameter("non-finite parameter".into()));
        }
        if !(-1.0..=1.0).contains(&self.bias) {
            return Err(Error::InvalidParameter(format!(
                "bias {} outside [-1, 1]",
                self.bias
            )));
        }
        if !self.f.is_boolean() {
            return Err(Error::InvalidParameter("f must take values ±1".into()));
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.feature.n_qubits
    }

    pub fn w_circuit(&self) -> Result<Circuit> {
        self.ansatz.circuit(&self.theta)
    }

    /// Feature circuit followed by `W(θ)`.
    pub fn full_circuit(&self, x: &[f64]) -> Result<Circuit> {
        self.feature.circuit(x)?.then(&self.w_circuit()?)
    }

    /// `p₊ = Σ_z p(z)(1 + f(z))/2`.
    pub fn p_plus_of(&self, weights: &[f64]) -> Result<f64> {
        Ok(0.5 * (1.0 + self.f.expectation_of_slice(weights)?))
    }

    /// `(p₊, p₋)` given the prepared feature state `|Φ(x)⟩`.
    pub fn label_probabilities_for_state(
        &self,
        phi: &StateVector,
        w: &Circuit,
        mode: ProbMode,
    ) -> Result<(f64, f64)> {
        let out = phi.evolved(w)?;
        let dist = out.probabilities();
        match mode {
            ProbMode::Exact => {
                let plus = self.p_plus_of(dist.as_slice())?;
                Ok((plus, 1.0 - plus))
            }
            ProbMode::Shots {
                shots,
                seed,
                stream,
            } => {
                let mut rng = stream_rng(seed, stream);
                let counts = sample_shots(&dist, shots, &mut rng)?;
                let hits: u64 = counts
                    .as_slice()
                    .iter()
                    .zip(self.f.diagonal())
                    .filter(|(_, &f)| f > 0.0)
                    .map(|(c, _)| c)
                    .sum();
                Ok((
                    hits as f64 / shots as f64,
                    (shots - hits) as f64 / shots as f64,
                ))
            }
        }
    }

    pub fn label_probabilities(&self, x: &[f64], mode: ProbMode) -> Result<(f64, f64)> {
        let phi = self.feature.state(x)?;
        self.label_probabilities_for_state(&phi, &self.w_circuit()?, mode)
    }

    /// `p₊` under depolarizing noise, evaluated on the density matrix.
    pub fn noisy_p_plus(&self, x: &[f64], noise: &NoiseSettings) -> Result<NoisyProbability> {
        let circuit = self.full_circuit(x)?;
        let report = mitigated_expectation(
            &circuit,
            &self.f,
            &noise.model,
            &noise.pair,
            EvalMode::ExactDensity,
            None,
        )?;
        let to_p = |e: f64| (0.5 * (1.0 + e)).clamp(0.0, 1.0);
        Ok(NoisyProbability {
            raw: to_p(report.raw_c1),
            mitigated: noise.mitigate.then(|| to_p(report.extrapolated)),
        })
    }

    pub fn to_file(&self, training: Option<serde_json::Value>) -> ModelFile {
        ModelFile {
            feature_map: self.feature.clone(),
            ansatz: self.ansatz.clone(),
            theta: self.theta.clone(),
            bias: self.bias,
            f_truth_table: self.f.truth_table().expect("validated boolean"),
            training,
        }
    }

    pub fn from_file(file: &ModelFile) -> Result<Self> {
        Self::new(
            file.feature_map.clone(),
            file.ansatz.clone(),
            file.theta.clone(),
            file.bias,
            Observable::from_boolean(&file.f_truth_table)?,
        )
    }
}

/// JSON layout of a trained variational model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub feature_map: FeatureMapSpec,
    pub ansatz: AnsatzSpec,
    pub theta: Vec<f64>,
    pub bias: f64,
    pub f_truth_table: Vec<i8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub training: Option<serde_json::Value>,
}
