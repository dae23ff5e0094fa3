use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::estimators::KernelSettings;
use crate::error::{Error, Result};
use crate::featuremap::FeatureMapSpec;
use crate::linalg::{max_asymmetry, symmetric_eigen, SymmetricEigen};

/// Symmetric Gram matrix of kernel estimates, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelMatrix {
    pub size: usize,
    pub entries: Vec<f64>,
    pub settings: KernelSettings,
}

impl KernelMatrix {
    pub fn from_entries(size: usize, entries: Vec<f64>, settings: KernelSettings) -> Result<Self> {
        if entries.len() != size * size {
            return Err(Error::DimensionMismatch {
                expected: size * size,
                found: entries.len(),
            });
        }
        let asym = max_asymmetry(&entries, size);
        if asym > 1e-12 {
            return Err(Error::NotSymmetric(asym));
        }
        Ok(Self {
            size,
            entries,
            settings,
        })
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.size + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.size..(i + 1) * self.size]
    }

    pub fn eigen(&self) -> Result<SymmetricEigen> {
        symmetric_eigen(&self.entries, self.size)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigen()?.values[0])
    }

    /// Largest `|self − other|` entry and the row holding it.
    pub fn max_deviation(&self, other: &KernelMatrix) -> Result<(f64, usize)> {
        if self.size != other.size {
            return Err(Error::DimensionMismatch {
                expected: self.size,
                found: other.size,
            });
        }
        let mut best = (0.0, 0);
        for (k, (a, b)) in self.entries.iter().zip(&other.entries).enumerate() {
            let d = (a - b).abs();
            if d > best.0 {
                best = (d, k / self.size);
            }
        }
        Ok(best)
    }

    /// `#`-prefixed provenance header followed by row-major values.
    pub fn to_csv(&self, extra_header: &[String]) -> String {
        let s = &self.settings;
        let mut out = format!(
            "# estimator={} shots={} seed={} size={}\n",
            s.estimator.name(),
            s.shots,
            s.seed,
            self.size
        );
        if let Some(noise) = s.noise {
            out.push_str(&format!("# noise p1={} p2={}\n", noise.p1, noise.p2));
        }
        if let Some(pair) = s.mitigate {
            out.push_str(&format!("# mitigation c1={} c2={}\n", pair.c1, pair.c2));
        }
        for line in extra_header {
            out.push_str(&format!("# {line}\n"));
        }
        for i in 0..self.size {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Number of independent estimates for `t` points.
pub fn estimation_count(t: usize) -> usize {
    t * t.saturating_sub(1) / 2
}

/// Upper-triangle estimates mirrored into a symmetric matrix with unit
/// diagonal. Entry `(i, j)` uses stream `i·t + j`, so results do not depend
/// on scheduling.
pub fn kernel_matrix(
    spec: &FeatureMapSpec,
    points: &[Vec<f64>],
    settings: &KernelSettings,
) -> Result<KernelMatrix> {
    let t = points.len();
    if t < 2 {
        return Err(Error::InvalidParameter(
            "kernel matrix needs at least two points".into(),
        ));
    }
    let pairs: Vec<(usize, usize)> = (0..t)
        .flat_map(|i| (i + 1..t).map(move |j| (i, j)))
        .collect();
    let values = pairs
        .par_iter()
        .map(|&(i, j)| settings.evaluate(spec, &points[i], &points[j], (i * t + j) as u64))
        .collect::<Result<Vec<f64>>>()?;
    let mut entries = vec![0.0; t * t];
    for i in 0..t {
        entries[i * t + i] = 1.0;
    }
    for (&(i, j), v) in pairs.iter().zip(values) {
        entries[i * t + j] = v;
        entries[j * t + i] = v;
    }
    Ok(KernelMatrix {
        size: t,
        entries,
        settings: *settings,
    })
}
