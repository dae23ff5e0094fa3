use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{max_asymmetry, symmetric_eigen};

/// Default box bound.
pub const DEFAULT_C: f64 = 1000.0;
const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoOptions {
    /// Stop once the maximal KKT violation `m − M` drops below this.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SmoOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-6,
            max_iterations: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualSolution {
    pub alpha: Vec<f64>,
    /// `L_D(α) = Σα_i − ½ ΣΣ y_i y_j α_i α_j K_ij`.
    pub objective: f64,
    pub iterations: usize,
    /// `m − M` at exit.
    pub kkt_residual: f64,
    pub converged: bool,
    /// The kernel had an eigenvalue below `−1e-9`.
    pub non_psd: bool,
    /// `L_D` after every accepted step.
    pub objective_trace: Vec<f64>,
}

/// `L_D` from scratch.
pub fn dual_objective(k: &[f64], y: &[i8], alpha: &[f64]) -> f64 {
    let t = y.len();
    let mut quad = 0.0;
    for i in 0..t {
        if alpha[i] == 0.0 {
            continue;
        }
        for j in 0..t {
            quad += y[i] as f64 * y[j] as f64 * alpha[i] * alpha[j] * k[i * t + j];
        }
    }
    alpha.iter().sum::<f64>() - 0.5 * quad
}

/// Maximizes `L_D` subject to `Σ α_i y_i = 0`, `0 ≤ α_i ≤ C` by sequential
/// minimal optimization with maximal-violating-pair selection.
pub fn solve_dual(k: &[f64], y: &[i8], c: f64, opts: &SmoOptions) -> Result<DualSolution> {
    let t = y.len();
    if t == 0 {
        return Err(Error::EmptyTrainingSet);
    }
    if k.len() != t * t {
        return Err(Error::DimensionMismatch {
            expected: t * t,
            found: k.len(),
        });
    }
    if y.iter().any(|&v| v != 1 && v != -1) {
        return Err(Error::InvalidParameter("labels must be ±1".into()));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "box bound C = {c} must be positive"
        )));
    }
    let asym = max_asymmetry(k, t);
    if asym > 1e-9 {
        return Err(Error::NotSymmetric(asym));
    }
    let non_psd = symmetric_eigen(k, t)?.values[0] < -1e-9;

    let yf: Vec<f64> = y.iter().map(|&v| v as f64).collect();
    let q = |i: usize, j: usize| yf[i] * yf[j] * k[i * t + j];
    let mut alpha = vec![0.0; t];
    // G = Qα − e
    let mut grad = vec![-1.0; t];
    let objective_of = |alpha: &[f64], grad: &[f64]| {
        0.5 * alpha
            .iter()
            .zip(grad)
            .map(|(a, g)| a * (1.0 - g))
            .sum::<f64>()
    };
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut residual;
    loop {
        // i maximizes −y_t G_t over I_up, j minimizes it over I_low
        let (mut gmax, mut imax) = (f64::NEG_INFINITY, usize::MAX);
        let (mut gmin, mut jmin) = (f64::INFINITY, usize::MAX);
        for s in 0..t {
            let v = -yf[s] * grad[s];
            let up = (y[s] == 1 && alpha[s] < c) || (y[s] == -1 && alpha[s] > 0.0);
            let low = (y[s] == -1 && alpha[s] < c) || (y[s] == 1 && alpha[s] > 0.0);
            if up && v > gmax {
                gmax = v;
                imax = s;
            }
            if low && v < gmin {
                gmin = v;
                jmin = s;
            }
        }
        residual = if imax == usize::MAX || jmin == usize::MAX {
            0.0
        } else {
            gmax - gmin
        };
        if residual < opts.tolerance || iterations >= opts.max_iterations {
            break;
        }
        iterations += 1;
        let (i, j) = (imax, jmin);
        let (old_i, old_j) = (alpha[i], alpha[j]);
        if y[i] != y[j] {
            let quad = (q(i, i) + q(j, j) + 2.0 * q(i, j)).max(TAU);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let quad = (q(i, i) + q(j, j) - 2.0 * q(i, j)).max(TAU);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for (s, g) in grad.iter_mut().enumerate() {
            *g += q(s, i) * di + q(s, j) * dj;
        }
        trace.push(objective_of(&alpha, &grad));
    }

    Ok(DualSolution {
        objective: objective_of(&alpha, &grad),
        alpha,
        iterations,
        kkt_residual: residual,
        converged: residual < opts.tolerance,
        non_psd,
        objective_trace: trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_labels_force_zero() {
        let k = [1.0, 0.3, 0.3, 1.0];
        let s = solve_dual(&k, &[1, 1], 10.0, &SmoOptions::default()).unwrap();
        assert_eq!(s.alpha, vec![0.0, 0.0]);
        assert_eq!(s.objective, 0.0);
        assert!(s.converged);
    }

    #[test]
    fn iteration_cap_is_flagged() {
        let k = [1.0, 0.0, 0.0, 1.0];
        let opts = SmoOptions {
            max_iterations: 0,
            ..SmoOptions::default()
        };
        let s = solve_dual(&k, &[1, -1], 10.0, &opts).unwrap();
        assert!(!s.converged);
    }
}
