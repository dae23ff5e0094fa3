//! Separable labeled datasets from a hidden Haar-random rotation and the
//! parity observable, with a margin gap Δ.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::featuremap::FeatureMapSpec;
use crate::linalg::CMatrix;
use crate::rng::stream_rng;
use crate::sim::{Observable, StateVector};

/// Default rejection-sampling budget.
pub const DEFAULT_ATTEMPT_CAP: u64 = 1_000_000;

/// Stream of the seed that draws the hidden unitary.
pub const UNITARY_STREAM: u64 = 0;
/// Stream of the seed that draws training points.
pub const TRAINING_STREAM: u64 = 1;
/// First stream used for independent test draws.
pub const TEST_STREAM_BASE: u64 = 2;

/// Haar-distributed element of `U(dim)`: QR of a complex Gaussian matrix
/// with the phases of `R`'s diagonal moved into `Q`.
pub fn haar_random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let mut cols: Vec<Vec<Complex64>> = (0..dim)
        .map(|_| {
            (0..dim)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(rng);
                    let im: f64 = StandardNormal.sample(rng);
                    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
                })
                .collect()
        })
        .collect();
    // modified Gram-Schmidt; r_kk is real positive here, so the phase fix
    // of Q·diag(r_kk/|r_kk|) is already applied by normalizing each column
    for k in 0..dim {
        let (done, rest) = cols.split_at_mut(k);
        let col = &mut rest[0];
        for prev in done.iter() {
            let proj: Complex64 = prev.iter().zip(col.iter()).map(|(p, c)| p.conj() * c).sum();
            for (c, p) in col.iter_mut().zip(prev) {
                *c -= proj * p;
            }
        }
        let norm = col.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        for v in col.iter_mut() {
            *v /= norm;
        }
    }
    CMatrix::from_columns(&cols).expect("square by construction")
}

/// Rescales a unitary by `det^{−1/dim}` so the determinant becomes one.
pub fn to_special_unitary(u: &CMatrix) -> CMatrix {
    let det = u.determinant();
    let phase = Complex64::from_polar(1.0, -det.arg() / u.dim() as f64);
    u.scale(phase)
}

/// Hidden rotation of the labeling observable.
#[derive(Debug, Clone, PartialEq)]
pub struct HiddenUnitary(pub CMatrix);

impl HiddenUnitary {
    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    /// Row-major `[re, im]` pairs.
    pub fn to_pairs(&self) -> Vec<[f64; 2]> {
        self.0.as_slice().iter().map(|z| [z.re, z.im]).collect()
    }

    pub fn from_pairs(pairs: &[[f64; 2]]) -> Result<Self> {
        let dim = (pairs.len() as f64).sqrt().round() as usize;
        let data = pairs.iter().map(|p| Complex64::new(p[0], p[1])).collect();
        Ok(Self(CMatrix::from_row_major(dim, data)?))
    }
}

/// Haar-random `SU(2^n_qubits)` element drawn from stream 0 of `seed`.
pub fn haar_random_special(n_qubits: usize, seed: u64) -> HiddenUnitary {
    let mut rng = stream_rng(seed, UNITARY_STREAM);
    HiddenUnitary(to_special_unitary(&haar_random_unitary(
        1 << n_qubits,
        &mut rng,
    )))
}

/// Haar-random `SU(4)` element drawn from stream 0 of `seed`.
pub fn haar_random_su4(seed: u64) -> HiddenUnitary {
    haar_random_special(2, seed)
}

/// `⟨Φ(x)|V† f V|Φ(x)⟩` with `f` the parity of all qubits.
pub fn labeling_value(x: &[f64], v: &HiddenUnitary, spec: &FeatureMapSpec) -> Result<f64> {
    let phi = spec.state(x)?;
    if v.0.dim() != phi.dim() {
        return Err(Error::DimensionMismatch {
            expected: phi.dim(),
            found: v.0.dim(),
        });
    }
    let rotated = StateVector::from_amplitudes(v.0.mul_vec(phi.amplitudes()))?;
    Observable::parity(spec.n_qubits)?.expectation(&rotated)
}

/// `Some(+1)` if `e ≥ Δ`, `Some(−1)` if `e ≤ −Δ`, `None` otherwise.
/// An exact zero is always discarded, including at `Δ = 0`.
pub fn label_from_value(e: f64, delta: f64) -> Option<i8> {
    if e == 0.0 {
        None
    } else if e >= delta {
        Some(1)
    } else if e <= -delta {
        Some(-1)
    } else {
        None
    }
}

pub fn label_point(
    x: &[f64],
    v: &HiddenUnitary,
    delta: f64,
    spec: &FeatureMapSpec,
) -> Result<Option<i8>> {
    Ok(label_from_value(labeling_value(x, v, spec)?, delta))
}

/// Uniform draw on `(0, 2π]^d`.
pub fn uniform_point<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    (0..d)
        .map(|_| {
            let u: f64 = rng.random();
            2.0 * PI * (1.0 - u)
        })
        .collect()
}

/// Labeled points with exactly `per_label` of each class, rejection sampled
/// from stream `stream` of `seed`.
pub fn sample_labeled_points(
    v: &HiddenUnitary,
    spec: &FeatureMapSpec,
    delta: f64,
    per_label: usize,
    seed: u64,
    stream: u64,
    attempt_cap: u64,
) -> Result<(Vec<Vec<f64>>, Vec<i8>, u64)> {
    if per_label == 0 {
        return Err(Error::InvalidParameter(
            "per_label must be at least 1".into(),
        ));
    }
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "gap {delta} must be non-negative"
        )));
    }
    let mut rng = stream_rng(seed, stream);
    let (mut plus, mut minus) = (Vec::new(), Vec::new());
    let mut attempts = 0u64;
    while plus.len() < per_label || minus.len() < per_label {
        if attempts >= attempt_cap {
            return Err(Error::AttemptCapExceeded {
                attempts,
                accepted_plus: plus.len(),
                accepted_minus: minus.len(),
            });
        }
        attempts += 1;
        let x = uniform_point(spec.data_dim(), &mut rng);
        match label_point(&x, v, delta, spec)? {
            Some(1) if plus.len() < per_label => plus.push(x),
            Some(-1) if minus.len() < per_label => minus.push(x),
            _ => {}
        }
    }
    // interleave so any prefix stays roughly balanced
    let mut points = Vec::with_capacity(2 * per_label);
    let mut labels = Vec::with_capacity(2 * per_label);
    for (p, m) in plus.into_iter().zip(minus) {
        points.push(p);
        labels.push(1);
        points.push(m);
        labels.push(-1);
    }
    Ok((points, labels, attempts))
}

/// Generation metadata stored next to the data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub sampling: String,
    pub unitary_stream: u64,
    pub point_stream: u64,
    pub attempts: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub n_qubits: usize,
    pub delta: f64,
    pub seed: u64,
    pub per_label: usize,
    pub v: HiddenUnitary,
    pub feature_map: FeatureMapSpec,
    pub points: Vec<Vec<f64>>,
    pub labels: Vec<i8>,
    pub provenance: Provenance,
}

/// Hidden unitary from stream 0 and points from stream 1 of `seed`.
pub fn generate_dataset(
    seed: u64,
    per_label: usize,
    delta: f64,
    spec: &FeatureMapSpec,
) -> Result<Dataset> {
    generate_dataset_with_cap(seed, per_label, delta, spec, DEFAULT_ATTEMPT_CAP)
}

pub fn generate_dataset_with_cap(
    seed: u64,
    per_label: usize,
    delta: f64,
    spec: &FeatureMapSpec,
    attempt_cap: u64,
) -> Result<Dataset> {
    spec.validate()?;
    let v = haar_random_special(spec.n_qubits, seed);
    let (points, labels, attempts) = sample_labeled_points(
        &v,
        spec,
        delta,
        per_label,
        seed,
        TRAINING_STREAM,
        attempt_cap,
    )?;
    Ok(Dataset {
        n_qubits: spec.n_qubits,
        delta,
        seed,
        per_label,
        v,
        feature_map: spec.clone(),
        points,
        labels,
        provenance: Provenance {
            sampling: "uniform (0, 2pi]^d".into(),
            unitary_stream: UNITARY_STREAM,
            point_stream: TRAINING_STREAM,
            attempts,
        },
    })
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Fresh points labeled by the same hidden unitary. Draw `k` uses
    /// stream `TEST_STREAM_BASE + k` of the dataset seed.
    pub fn test_draw(&self, k: u64, per_label: usize) -> Result<Dataset> {
        let stream = TEST_STREAM_BASE + k;
        let (points, labels, attempts) = sample_labeled_points(
            &self.v,
            &self.feature_map,
            self.delta,
            per_label,
            self.seed,
            stream,
            DEFAULT_ATTEMPT_CAP,
        )?;
        Ok(Dataset {
            per_label,
            points,
            labels,
            provenance: Provenance {
                point_stream: stream,
                attempts,
                ..self.provenance.clone()
            },
            ..self.clone()
        })
    }

    /// Smallest `|e|` over stored points, recomputed.
    pub fn min_margin(&self) -> Result<f64> {
        let mut m = f64::INFINITY;
        for x in &self.points {
            m = m.min(labeling_value(x, &self.v, &self.feature_map)?.abs());
        }
        Ok(m)
    }

    pub fn count_label(&self, label: i8) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    fn check(&self) -> Result<()> {
        if self.points.len() != self.labels.len() {
            return Err(Error::DimensionMismatch {
                expected: self.points.len(),
                found: self.labels.len(),
            });
        }
        for x in &self.points {
            if x.len() != self.feature_map.data_dim() {
                return Err(Error::DimensionMismatch {
                    expected: self.feature_map.data_dim(),
                    found: x.len(),
                });
            }
            if x.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidParameter("non-finite coordinate".into()));
            }
            if x.iter().any(|&c| c <= 0.0 || c > 2.0 * PI) {
                return Err(Error::InvalidParameter(
                    "coordinate outside (0, 2pi]".into(),
                ));
            }
        }
        if self.labels.iter().any(|&l| l != 1 && l != -1) {
            return Err(Error::InvalidParameter("labels must be ±1".into()));
        }
        Ok(())
    }

    fn to_file(&self) -> DatasetFile {
        DatasetFile {
            n_qubits: self.n_qubits,
            delta: self.delta,
            seed: self.seed,
            per_label: self.per_label,
            v: self.v.to_pairs(),
            points: self.points.clone(),
            labels: self.labels.clone(),
            feature_map: self.feature_map.clone(),
            meta: self.provenance.clone(),
            checksum: None,
        }
    }

    /// Pretty JSON with a trailing newline and an embedded checksum.
    pub fn to_json(&self) -> Result<String> {
        self.check()?;
        let mut file = self.to_file();
        file.checksum = Some(file.digest()?);
        let mut s = serde_json::to_string_pretty(&file)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mut file: DatasetFile = serde_json::from_str(text)?;
        let stored = file.checksum.take();
        if let Some(stored) = stored {
            let computed = file.digest()?;
            if stored != computed {
                return Err(Error::ChecksumMismatch { stored, computed });
            }
        }
        let ds = Dataset {
            n_qubits: file.n_qubits,
            delta: file.delta,
            seed: file.seed,
            per_label: file.per_label,
            v: HiddenUnitary::from_pairs(&file.v)?,
            feature_map: file.feature_map,
            points: file.points,
            labels: file.labels,
            provenance: file.meta,
        };
        ds.feature_map.validate()?;
        if ds.feature_map.n_qubits != ds.n_qubits || ds.v.0.dim() != 1 << ds.n_qubits {
            return Err(Error::QubitCountMismatch {
                expected: ds.n_qubits,
                found: ds.feature_map.n_qubits,
            });
        }
        ds.check()?;
        Ok(ds)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct DatasetFile {
    n_qubits: usize,
    delta: f64,
    seed: u64,
    per_label: usize,
    #[serde(rename = "V")]
    v: Vec<[f64; 2]>,
    points: Vec<Vec<f64>>,
    labels: Vec<i8>,
    feature_map: FeatureMapSpec,
    meta: Provenance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    checksum: Option<String>,
}

impl DatasetFile {
    /// sha256 of the compact serialization without the checksum field.
    fn digest(&self) -> Result<String> {
        debug_assert!(self.checksum.is_none());
        let compact = serde_json::to_vec(self)?;
        Ok(hex::encode(Sha256::digest(&compact)))
    }
}

pub fn save_dataset(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, ds.to_json()?)?;
    Ok(())
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    Dataset::from_json(&std::fs::read_to_string(path)?)
}
