use crate::error::{Error, Result};
use crate::linalg::{max_asymmetry, symmetric_eigen};

#[derive(Debug, Clone, PartialEq)]
pub struct PsdProjection {
    pub matrix: Vec<f64>,
    /// `Σ |λ|` over the negative eigenvalues of the input.
    pub negative_weight: f64,
    pub input_min_eigenvalue: f64,
}

/// Clips negative eigenvalues of a symmetric matrix to zero.
pub fn psd_project(a: &[f64], n: usize) -> Result<PsdProjection> {
    if a.len() != n * n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            found: a.len(),
        });
    }
    let asym = max_asymmetry(a, n);
    if asym > 1e-9 {
        return Err(Error::NotSymmetric(asym));
    }
    let eig = symmetric_eigen(a, n)?;
    let negative_weight = eig.values.iter().filter(|&&v| v < 0.0).map(|v| -v).sum();
    let clipped: Vec<f64> = eig.values.iter().map(|v| v.max(0.0)).collect();
    let matrix = if negative_weight > 0.0 {
        eig.reconstruct_with(&clipped)
    } else {
        a.to_vec()
    };
    Ok(PsdProjection {
        matrix,
        negative_weight,
        input_min_eigenvalue: eig.values.first().copied().unwrap_or(0.0),
    })
}
