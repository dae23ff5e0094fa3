use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::estimators::{kernel_exact, KernelSettings};
use super::smo::{solve_dual, DualSolution, SmoOptions};
use crate::error::{Error, Result};
use crate::featuremap::FeatureMapSpec;
use crate::rng::stream_id;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasEstimate {
    pub b: f64,
    pub free_support_vectors: usize,
    /// No free support vector existed; `b` is the midpoint of the interval
    /// allowed by the KKT conditions.
    pub fallback: bool,
}

/// Bias from the free support vectors `0 < α_i < C`, averaging
/// `y_i − Σ_j y_j α_j K_ji`.
pub fn compute_bias(alpha: &[f64], k: &[f64], y: &[i8], c: f64) -> Result<BiasEstimate> {
    let t = y.len();
    if alpha.len() != t || k.len() != t * t {
        return Err(Error::DimensionMismatch {
            expected: t,
            found: alpha.len(),
        });
    }
    let g: Vec<f64> = (0..t)
        .map(|i| {
            let s: f64 = (0..t).map(|j| y[j] as f64 * alpha[j] * k[j * t + i]).sum();
            y[i] as f64 - s
        })
        .collect();
    let free: Vec<usize> = (0..t).filter(|&i| alpha[i] > 0.0 && alpha[i] < c).collect();
    if !free.is_empty() {
        let b = free.iter().map(|&i| g[i]).sum::<f64>() / free.len() as f64;
        return Ok(BiasEstimate {
            b,
            free_support_vectors: free.len(),
            fallback: false,
        });
    }
    let (mut lower, mut upper) = (f64::NEG_INFINITY, f64::INFINITY);
    for i in 0..t {
        let at_zero = alpha[i] <= 0.0;
        match (y[i], at_zero) {
            (1, true) | (-1, false) => lower = lower.max(g[i]),
            _ => upper = upper.min(g[i]),
        }
    }
    let b = match (lower.is_finite(), upper.is_finite()) {
        (true, true) => 0.5 * (lower + upper),
        (true, false) => lower,
        (false, true) => upper,
        (false, false) => 0.0,
    };
    Ok(BiasEstimate {
        b,
        free_support_vectors: 0,
        fallback: true,
    })
}

/// Trained kernel classifier; only support vectors are kept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub feature_map: FeatureMapSpec,
    pub support_points: Vec<Vec<f64>>,
    pub support_labels: Vec<i8>,
    pub alpha: Vec<f64>,
    /// Positions of the support vectors in the training set.
    pub support_indices: Vec<usize>,
    pub bias: f64,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmTraining {
    pub model: SvmModel,
    pub dual: DualSolution,
    pub bias: BiasEstimate,
}

/// Solves the dual on a precomputed Gram matrix and keeps `α_i > 0`.
pub fn train_svm(
    spec: &FeatureMapSpec,
    points: &[Vec<f64>],
    labels: &[i8],
    k: &[f64],
    c: f64,
    opts: &SmoOptions,
) -> Result<SvmTraining> {
    if points.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: points.len(),
            found: labels.len(),
        });
    }
    let dual = solve_dual(k, labels, c, opts)?;
    let bias = compute_bias(&dual.alpha, k, labels, c)?;
    let support_indices: Vec<usize> = (0..labels.len()).filter(|&i| dual.alpha[i] > 0.0).collect();
    let model = SvmModel {
        feature_map: spec.clone(),
        support_points: support_indices.iter().map(|&i| points[i].clone()).collect(),
        support_labels: support_indices.iter().map(|&i| labels[i]).collect(),
        alpha: support_indices.iter().map(|&i| dual.alpha[i]).collect(),
        support_indices,
        bias: bias.b,
        c,
    };
    Ok(SvmTraining { model, dual, bias })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub label: i8,
    /// `Σ y_i α_i K(x_i, s) + b`.
    pub value: f64,
    /// The value was exactly zero and mapped to `−1`.
    pub zero: bool,
}

impl SvmModel {
    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    /// `Σ_i α_i y_i`.
    pub fn equality_residual(&self) -> f64 {
        self.alpha
            .iter()
            .zip(&self.support_labels)
            .map(|(a, &y)| a * y as f64)
            .sum()
    }

    /// Support-vector table: coordinates, α, y, then the bias row.
    pub fn support_table(&self) -> String {
        let d = self.support_points.first().map_or(0, |p| p.len());
        let mut out = String::new();
        for k in 0..d {
            out.push_str(&format!("x{},", k + 1));
        }
        out.push_str("alpha,y\n");
        for ((x, a), y) in self
            .support_points
            .iter()
            .zip(&self.alpha)
            .zip(&self.support_labels)
        {
            for c in x {
                out.push_str(&format!("{c:.4},"));
            }
            out.push_str(&format!("{a:.4},{y}\n"));
        }
        out.push_str(&format!("bias = {:.4}\n", self.bias));
        out
    }

    /// Kernel evaluated against each support vector with stream
    /// `stream_id(stream, k)` for support vector `k`.
    pub fn decision_value(&self, s: &[f64], settings: &KernelSettings, stream: u64) -> Result<f64> {
        let mut v = self.bias;
        for (k, ((x, a), &y)) in self
            .support_points
            .iter()
            .zip(&self.alpha)
            .zip(&self.support_labels)
            .enumerate()
        {
            let kv = settings.evaluate(&self.feature_map, x, s, stream_id(stream, k as u64))?;
            v += y as f64 * a * kv;
        }
        Ok(v)
    }
}

pub fn svm_classify(
    model: &SvmModel,
    s: &[f64],
    settings: &KernelSettings,
    stream: u64,
) -> Result<Decision> {
    let value = model.decision_value(s, settings, stream)?;
    Ok(Decision {
        label: if value > 0.0 { 1 } else { -1 },
        value,
        zero: value == 0.0,
    })
}

/// Point `p` uses stream `p` of `settings.seed`.
pub fn svm_classify_batch(
    model: &SvmModel,
    points: &[Vec<f64>],
    settings: &KernelSettings,
) -> Result<Vec<Decision>> {
    points
        .par_iter()
        .enumerate()
        .map(|(p, s)| svm_classify(model, s, settings, p as u64))
        .collect()
}

pub fn success_rate(decisions: &[Decision], truth: &[i8]) -> Option<f64> {
    if decisions.is_empty() || decisions.len() != truth.len() {
        return None;
    }
    let hits = decisions
        .iter()
        .zip(truth)
        .filter(|(d, &y)| d.label == y)
        .count();
    Some(hits as f64 / decisions.len() as f64)
}

fn cross_form(a: &SvmModel, b: &SvmModel) -> Result<f64> {
    let mut s = 0.0;
    for ((xa, aa), &ya) in a.support_points.iter().zip(&a.alpha).zip(&a.support_labels) {
        for ((xb, ab), &yb) in b.support_points.iter().zip(&b.alpha).zip(&b.support_labels) {
            s += ya as f64 * yb as f64 * aa * ab * kernel_exact(&a.feature_map, xa, xb)?;
        }
    }
    Ok(s)
}

/// `⟨w_a, w_b⟩ / (‖w_a‖ ‖w_b‖)` with exact kernels.
pub fn hyperplane_overlap(a: &SvmModel, b: &SvmModel) -> Result<f64> {
    if a.feature_map != b.feature_map {
        return Err(Error::InvalidParameter(
            "models use different feature maps".into(),
        ));
    }
    let na = cross_form(a, a)?;
    let nb = cross_form(b, b)?;
    if na <= 0.0 || nb <= 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok((cross_form(a, b)? / (na.sqrt() * nb.sqrt())).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bias_fallback_midpoint() {
        // both multipliers at zero: y=+1 gives a lower bound of 1,
        // y=−1 an upper bound of −1
        let b = compute_bias(&[0.0, 0.0], &[1.0, 0.0, 0.0, 1.0], &[1, -1], 5.0).unwrap();
        assert!(b.fallback);
        assert_eq!(b.b, 0.0);
    }
}
