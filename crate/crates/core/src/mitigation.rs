//! First-order zero-noise extrapolation and readout-error correction.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::solve;
use crate::sim::{sample_shots, Circuit, DensityMatrix, NoiseModel, Observable, Probabilities};

/// Two stretch factors `c1 < c2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StretchPair {
    pub c1: f64,
    pub c2: f64,
}

impl StretchPair {
    pub fn new(c1: f64, c2: f64) -> Result<Self> {
        if !(c1.is_finite() && c2.is_finite() && c1 > 0.0 && c1 < c2) {
            return Err(Error::InvalidParameter(format!(
                "stretch factors need 0 < c1 < c2, got ({c1}, {c2})"
            )));
        }
        Ok(Self { c1, c2 })
    }
}

impl Default for StretchPair {
    fn default() -> Self {
        Self { c1: 1.0, c2: 1.5 }
    }
}

/// Intercept of the line through `(c1, e1)` and `(c2, e2)`.
pub fn richardson_extrapolate(e1: f64, e2: f64, pair: &StretchPair) -> f64 {
    (pair.c2 * e1 - pair.c1 * e2) / (pair.c2 - pair.c1)
}

/// Same as [`richardson_extrapolate`] with unchecked factors.
pub fn richardson(e1: f64, e2: f64, c1: f64, c2: f64) -> Result<f64> {
    if c1 == c2 {
        return Err(Error::InvalidParameter(
            "stretch factors must differ".into(),
        ));
    }
    Ok((c2 * e1 - c1 * e2) / (c2 - c1))
}

/// How each stretched circuit is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EvalMode {
    ExactDensity,
    /// `shots` samples of each stretch's diagonal, from independent streams.
    Shots {
        shots: u64,
        seed: u64,
        stream: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MitigationReport {
    pub raw_c1: f64,
    pub raw_c2: f64,
    pub extrapolated: f64,
}

impl MitigationReport {
    pub const CSV_HEADER: &'static str = "raw_c1,raw_c2,extrapolated";

    pub fn csv_row(&self) -> String {
        format!("{},{},{}", self.raw_c1, self.raw_c2, self.extrapolated)
    }
}

/// Outcome distribution of `circuit` from `|0…0⟩` under `noise` at stretch `c`.
pub fn noisy_distribution(circuit: &Circuit, noise: &NoiseModel, c: f64) -> Result<Probabilities> {
    let stretched = circuit.clone().with_stretch(c)?;
    let rho = DensityMatrix::zero(circuit.n_qubits())?.evolve(&stretched, noise)?;
    Ok(rho.probabilities())
}

/// Evaluates `obs` at both stretches and extrapolates to zero noise.
///
/// With `readout` set, each stretch's distribution is first passed through
/// the readout error `A` and then corrected with `A⁻¹`, so correction
/// always precedes extrapolation.
pub fn mitigated_expectation(
    circuit: &Circuit,
    obs: &Observable,
    noise: &NoiseModel,
    pair: &StretchPair,
    mode: EvalMode,
    readout: Option<&ReadoutMatrix>,
) -> Result<MitigationReport> {
    let mut raw = [0.0; 2];
    for (k, &c) in [pair.c1, pair.c2].iter().enumerate() {
        let dist = noisy_distribution(circuit, noise, c)?;
        let observed = match readout {
            Some(a) => a.apply(dist.as_slice())?,
            None => dist.into_vec(),
        };
        let observed = match mode {
            EvalMode::ExactDensity => observed,
            EvalMode::Shots {
                shots,
                seed,
                stream,
            } => {
                let mut rng = crate::rng::stream_rng(seed, crate::rng::stream_id(stream, k as u64));
                sample_frequencies(&observed, shots, &mut rng)?
            }
        };
        let corrected = match readout {
            Some(a) => a.correct(&observed)?,
            None => observed,
        };
        raw[k] = obs.expectation_of_slice(&corrected)?;
    }
    Ok(MitigationReport {
        raw_c1: raw[0],
        raw_c2: raw[1],
        extrapolated: richardson_extrapolate(raw[0], raw[1], pair),
    })
}

fn sample_frequencies<R: Rng + ?Sized>(dist: &[f64], shots: u64, rng: &mut R) -> Result<Vec<f64>> {
    let p = Probabilities::new(clip_to_simplex(dist))?;
    Ok(sample_shots(&p, shots, rng)?.frequencies())
}

/// Clips negative entries to zero and rescales to unit mass.
pub fn clip_to_simplex(v: &[f64]) -> Vec<f64> {
    let clipped: Vec<f64> = v.iter().map(|x| x.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if total > 0.0 {
        clipped.iter().map(|x| x / total).collect()
    } else {
        vec![1.0 / v.len() as f64; v.len()]
    }
}

/// `A[i][j] = P(measure i | prepared j)`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReadoutMatrix {
    pub n_qubits: usize,
    pub a: Vec<f64>,
}

impl ReadoutMatrix {
    pub fn identity(n_qubits: usize) -> Self {
        let d = 1 << n_qubits;
        let mut a = vec![0.0; d * d];
        for i in 0..d {
            a[i * d + i] = 1.0;
        }
        Self { n_qubits, a }
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn get(&self, measured: usize, prepared: usize) -> f64 {
        self.a[measured * self.dim() + prepared]
    }

    /// Independent symmetric bit flips with probability `flips[q]` on qubit `q`.
    pub fn from_qubit_flips(flips: &[f64]) -> Result<Self> {
        if flips.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidParameter(
                "flip probability outside [0, 1]".into(),
            ));
        }
        let n = flips.len();
        let d = 1usize << n;
        let mut a = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                a[i * d + j] = flips
                    .iter()
                    .enumerate()
                    .map(|(q, &p)| if (i ^ j) >> q & 1 == 1 { p } else { 1.0 - p })
                    .product();
            }
        }
        Ok(Self { n_qubits: n, a })
    }

    /// `A·p`.
    pub fn apply(&self, p: &[f64]) -> Result<Vec<f64>> {
        let d = self.dim();
        if p.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: p.len(),
            });
        }
        Ok((0..d)
            .map(|i| (0..d).map(|j| self.a[i * d + j] * p[j]).sum())
            .collect())
    }

    /// `A⁻¹·dist`. Entries may be negative.
    pub fn correct(&self, dist: &[f64]) -> Result<Vec<f64>> {
        correct_readout(dist, self)
    }
}

/// Column `j` is the empirical outcome distribution of preparation `j`.
pub fn calibrate_readout(counts: &[Vec<u64>], shots: u64) -> Result<ReadoutMatrix> {
    let d = counts.len();
    if d < 2 || !d.is_power_of_two() {
        return Err(Error::InvalidParameter(format!(
            "need one count vector per basis state, got {d}"
        )));
    }
    if shots == 0 {
        return Err(Error::InvalidParameter(
            "shot count must be at least 1".into(),
        ));
    }
    let mut a = vec![0.0; d * d];
    for (j, col) in counts.iter().enumerate() {
        if col.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: col.len(),
            });
        }
        let total: u64 = col.iter().sum();
        if total != shots {
            return Err(Error::InvalidParameter(format!(
                "counts for preparation {j} sum to {total}, expected {shots}"
            )));
        }
        for (i, &c) in col.iter().enumerate() {
            a[i * d + j] = c as f64 / shots as f64;
        }
    }
    Ok(ReadoutMatrix {
        n_qubits: d.trailing_zeros() as usize,
        a,
    })
}

pub fn correct_readout(dist: &[f64], a: &ReadoutMatrix) -> Result<Vec<f64>> {
    if dist.len() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: dist.len(),
        });
    }
    solve(&a.a, dist)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extrapolation_examples() {
        let p = StretchPair::default();
        assert!((richardson_extrapolate(0.8, 0.7, &p) - 1.0).abs() < 1e-12);
        assert!((richardson_extrapolate(0.4, 0.4, &p) - 0.4).abs() < 1e-15);
        assert!(richardson(1.0, 2.0, 1.5, 1.5).is_err());
        assert!(StretchPair::new(1.5, 1.5).is_err());
    }

    #[test]
    fn two_by_two_correction() {
        let a = ReadoutMatrix::from_qubit_flips(&[0.05]).unwrap();
        let fixed = a.correct(&[0.95, 0.05]).unwrap();
        assert!((fixed[0] - 1.0).abs() < 1e-12 && fixed[1].abs() < 1e-12);
    }

    #[test]
    fn calibration_rejects_wrong_totals() {
        assert!(calibrate_readout(&[vec![10, 0], vec![0, 9]], 10).is_err());
        let a = calibrate_readout(&[vec![10, 0], vec![0, 10]], 10).unwrap();
        assert_eq!(a, ReadoutMatrix::identity(1));
    }

    #[test]
    fn simplex_clip() {
        assert_eq!(clip_to_simplex(&[1.2, -0.2]), vec![1.0, 0.0]);
    }
}
