use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::featuremap::FeatureMapSpec;
use crate::mitigation::{mitigated_expectation, EvalMode, StretchPair};
use crate::rng::stream_rng;
use crate::sim::{sample_shots, Circuit, Gate, NoiseModel, Observable, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelEstimator {
    Exact,
    /// Frequency of `0^n` after `U_Φ(x)` then `U_Φ(z)†`.
    Shots,
    SwapTest,
    /// Uniform bitstring sampling, single-repetition maps only.
    Classical,
}

impl KernelEstimator {
    pub fn name(&self) -> &'static str {
        match self {
            KernelEstimator::Exact => "exact",
            KernelEstimator::Shots => "shots",
            KernelEstimator::SwapTest => "swap_test",
            KernelEstimator::Classical => "classical",
        }
    }
}

/// Estimator choice with its sampling and noise parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSettings {
    pub estimator: KernelEstimator,
    pub shots: u64,
    pub seed: u64,
    /// Depolarizing noise on the overlap circuit (exact and shots only).
    pub noise: Option<NoiseModel>,
    /// Zero-noise extrapolation of the noisy overlap.
    pub mitigate: Option<StretchPair>,
}

impl KernelSettings {
    pub fn exact() -> Self {
        Self {
            estimator: KernelEstimator::Exact,
            shots: 0,
            seed: 0,
            noise: None,
            mitigate: None,
        }
    }

    pub fn sampled(estimator: KernelEstimator, shots: u64, seed: u64) -> Self {
        Self {
            estimator,
            shots,
            seed,
            noise: None,
            mitigate: None,
        }
    }

    /// One kernel entry using random stream `stream`.
    pub fn evaluate(
        &self,
        spec: &FeatureMapSpec,
        x: &[f64],
        z: &[f64],
        stream: u64,
    ) -> Result<f64> {
        if self.estimator != KernelEstimator::Exact && self.shots == 0 {
            return Err(Error::InvalidParameter(
                "sampled estimators need shots ≥ 1".into(),
            ));
        }
        if let Some(noise) = self.noise {
            let mode = match self.estimator {
                KernelEstimator::Exact => EvalMode::ExactDensity,
                KernelEstimator::Shots => EvalMode::Shots {
                    shots: self.shots,
                    seed: self.seed,
                    stream,
                },
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "noise is only modelled for the direct overlap circuit, not {}",
                        other.name()
                    )))
                }
            };
            return kernel_noisy(spec, x, z, &noise, self.mitigate.as_ref(), mode);
        }
        match self.estimator {
            KernelEstimator::Exact => kernel_exact(spec, x, z),
            KernelEstimator::Shots => kernel_sampled(spec, x, z, self.shots, self.seed, stream),
            KernelEstimator::SwapTest => {
                kernel_swap_test(spec, x, z, self.shots, self.seed, stream)
            }
            KernelEstimator::Classical => {
                kernel_classical_single_layer(spec, x, z, self.shots, self.seed, stream)
            }
        }
    }
}

/// `|⟨Φ(x)|Φ(z)⟩|²`.
pub fn kernel_exact(spec: &FeatureMapSpec, x: &[f64], z: &[f64]) -> Result<f64> {
    spec.state(x)?.fidelity(&spec.state(z)?)
}

/// `U_Φ(z)† U_Φ(x)`, whose all-zero amplitude on `|0^n⟩` is `⟨Φ(z)|Φ(x)⟩`.
pub fn overlap_circuit(spec: &FeatureMapSpec, x: &[f64], z: &[f64]) -> Result<Circuit> {
    spec.circuit(x)?.then(&spec.circuit(z)?.adjoint())
}

pub fn kernel_sampled(
    spec: &FeatureMapSpec,
    x: &[f64],
    z: &[f64],
    shots: u64,
    seed: u64,
    stream: u64,
) -> Result<f64> {
    let circuit = overlap_circuit(spec, x, z)?;
    let out = StateVector::zero(spec.n_qubits)?.evolved(&circuit)?;
    let mut rng = stream_rng(seed, stream);
    let counts = sample_shots(&out.probabilities(), shots, &mut rng)?;
    Ok(counts.frequency(0))
}

/// Noisy overlap `⟨0|ρ|0⟩`, raw at stretch 1 or extrapolated. Mitigated
/// values are returned unclipped and may be slightly negative.
pub fn kernel_noisy(
    spec: &FeatureMapSpec,
    x: &[f64],
    z: &[f64],
    noise: &NoiseModel,
    mitigate: Option<&StretchPair>,
    mode: EvalMode,
) -> Result<f64> {
    let circuit = overlap_circuit(spec, x, z)?;
    let obs = Observable::zero_projector(spec.n_qubits)?;
    let pair = mitigate.copied().unwrap_or_default();
    let report = mitigated_expectation(&circuit, &obs, noise, &pair, mode, None)?;
    Ok(if mitigate.is_some() {
        report.extrapolated
    } else {
        report.raw_c1
    })
}

/// Swap-test circuit on `2n` qubits: register A (qubits `0..n`) holds
/// `|Φ(x)⟩`, register B (`n..2n`) holds `|Φ(z)⟩`, then `CNOT(A_k → B_k)`
/// and `H` on every A qubit.
pub fn swap_test_circuit(spec: &FeatureMapSpec, x: &[f64], z: &[f64]) -> Result<Circuit> {
    let n = spec.n_qubits;
    let mut c = Circuit::new(2 * n)?;
    for g in spec.circuit(x)?.gates() {
        c.push(*g)?;
    }
    for g in spec.circuit(z)?.gates() {
        c.push(shift_gate(g, n))?;
    }
    for k in 0..n {
        c.push(Gate::cnot(k, n + k))?;
    }
    for k in 0..n {
        c.push(Gate::h(k))?;
    }
    Ok(c)
}

fn shift_gate(g: &Gate, by: usize) -> Gate {
    match *g {
        Gate::H { qubit } => Gate::h(qubit + by),
        Gate::X { qubit } => Gate::x(qubit + by),
        Gate::Ry { qubit, angle } => Gate::ry(qubit + by, angle),
        Gate::Rz { qubit, angle } => Gate::rz(qubit + by, angle),
        Gate::Cz { a, b } => Gate::cz(a + by, b + by),
        Gate::Cnot { control, target } => Gate::cnot(control + by, target + by),
        Gate::ZzPhase { a, b, angle } => Gate::zz_phase(a + by, b + by, angle),
    }
}

/// `(−1)^{s·t}` for the outcome `(s, t)` of the swap test.
fn swap_parity(outcome: usize, n: usize) -> f64 {
    let mask = (1usize << n) - 1;
    let s = outcome & mask;
    let t = (outcome >> n) & mask;
    if (s & t).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Exact mean of `(−1)^{s·t}` over the swap-test output distribution.
pub fn swap_test_expectation(spec: &FeatureMapSpec, x: &[f64], z: &[f64]) -> Result<f64> {
    let n = spec.n_qubits;
    let out = StateVector::zero(2 * n)?.evolved(&swap_test_circuit(spec, x, z)?)?;
    Ok(out
        .probabilities()
        .as_slice()
        .iter()
        .enumerate()
        .map(|(o, p)| p * swap_parity(o, n))
        .sum())
}

pub fn kernel_swap_test(
    spec: &FeatureMapSpec,
    x: &[f64],
    z: &[f64],
    shots: u64,
    seed: u64,
    stream: u64,
) -> Result<f64> {
    let n = spec.n_qubits;
    let out = StateVector::zero(2 * n)?.evolved(&swap_test_circuit(spec, x, z)?)?;
    let mut rng = stream_rng(seed, stream);
    let counts = sample_shots(&out.probabilities(), shots, &mut rng)?;
    let total: f64 = counts
        .as_slice()
        .iter()
        .enumerate()
        .map(|(o, &c)| c as f64 * swap_parity(o, n))
        .sum();
    Ok(total / shots as f64)
}

/// `|mean_w exp(i Σ_S (φ_S(x) − φ_S(z)) Π_{i∈S} (−1)^{w_i})|²` over `R`
/// uniform bitstrings `w`.
pub fn kernel_classical_single_layer(
    spec: &FeatureMapSpec,
    x: &[f64],
    z: &[f64],
    shots: u64,
    seed: u64,
    stream: u64,
) -> Result<f64> {
    if spec.repetitions != 1 {
        return Err(Error::InvalidParameter(format!(
            "classical estimator needs a single-repetition map, got {}",
            spec.repetitions
        )));
    }
    if shots == 0 {
        return Err(Error::InvalidParameter(
            "shot count must be at least 1".into(),
        ));
    }
    let cx = spec.coefficients(x)?;
    let cz = spec.coefficients(z)?;
    let d_single: Vec<f64> = cx
        .phi_single
        .iter()
        .zip(&cz.phi_single)
        .map(|(a, b)| a - b)
        .collect();
    let d_pair: Vec<f64> = cx
        .phi_pair
        .iter()
        .zip(&cz.phi_pair)
        .map(|(a, b)| a - b)
        .collect();
    let n = spec.n_qubits;
    let mut rng = stream_rng(seed, stream);
    let mut sum = Complex64::new(0.0, 0.0);
    for _ in 0..shots {
        let w: u64 = rng.random::<u64>() & ((1u64 << n) - 1);
        let sign = |q: usize| if w >> q & 1 == 1 { -1.0 } else { 1.0 };
        let mut phase = 0.0;
        for (q, d) in d_single.iter().enumerate() {
            phase += d * sign(q);
        }
        for (&(a, b), d) in spec.edges.iter().zip(&d_pair) {
            phase += d * sign(a) * sign(b);
        }
        sum += Complex64::from_polar(1.0, phase);
    }
    Ok((sum / shots as f64).norm_sqr())
}
