use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream_rng, StreamRng};

const PERTURBATION_STREAM: u64 = 0;
const CALIBRATION_STREAM: u64 = 1;

/// Gain sequences `a_k = a/(k+1+A)^α`, `c_k = c/(k+1)^γ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpsaConfig {
    pub iterations: usize,
    /// Calibrated from probe gradients at `θ₀` when absent.
    pub a: Option<f64>,
    pub c: f64,
    /// Defaults to `0.1 · iterations`.
    #[serde(rename = "A")]
    pub big_a: Option<f64>,
    pub alpha: f64,
    pub gamma: f64,
    pub seed: u64,
    /// Size of the first step per coordinate targeted by calibration.
    pub target_step: f64,
    pub calibration_probes: usize,
}

impl Default for SpsaConfig {
    fn default() -> Self {
        Self {
            iterations: 250,
            a: None,
            c: 0.1,
            big_a: None,
            alpha: 0.602,
            gamma: 0.101,
            seed: 0,
            target_step: 0.1,
            calibration_probes: 10,
        }
    }
}

impl SpsaConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.to_string()));
        if !(self.c.is_finite() && self.c > 0.0) {
            return bad("SPSA c must be positive");
        }
        if let Some(a) = self.a {
            if !(a.is_finite() && a > 0.0) {
                return bad("SPSA a must be positive");
            }
        }
        if let Some(big_a) = self.big_a {
            if !(big_a.is_finite() && big_a >= 0.0) {
                return bad("SPSA A must be non-negative");
            }
        }
        for v in [self.alpha, self.gamma] {
            if !(v > 0.0 && v <= 1.0) {
                return bad("SPSA alpha and gamma must lie in (0, 1]");
            }
        }
        if !(self.target_step.is_finite() && self.target_step > 0.0) {
            return bad("SPSA target step must be positive");
        }
        Ok(())
    }

    pub fn stability_constant(&self) -> f64 {
        self.big_a.unwrap_or(0.1 * self.iterations as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpsaResult {
    /// Best parameters among `θ₀` and every iterate.
    pub theta: Vec<f64>,
    pub best_value: f64,
    /// `f(θ₀)` followed by `f(θ_k)` after each update.
    pub trace: Vec<f64>,
    /// `θ₀` followed by every iterate.
    pub theta_trace: Vec<Vec<f64>>,
    pub a: f64,
    pub big_a: f64,
    pub evaluations: u64,
}

fn rademacher(rng: &mut StreamRng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
        .collect()
}

fn shifted(theta: &[f64], delta: &[f64], s: f64) -> Vec<f64> {
    theta.iter().zip(delta).map(|(t, d)| t + s * d).collect()
}

struct Counter<F> {
    objective: F,
    evaluations: u64,
    iteration: usize,
}

impl<F: FnMut(&[f64], u64) -> Result<f64>> Counter<F> {
    fn eval(&mut self, theta: &[f64]) -> Result<f64> {
        let v = (self.objective)(theta, self.evaluations)?;
        self.evaluations += 1;
        if !v.is_finite() {
            return Err(Error::NonFiniteObjective {
                iteration: self.iteration,
                value: v,
            });
        }
        Ok(v)
    }
}

/// Two-sided SPSA with Rademacher perturbations.
///
/// `objective` receives the parameters and a running evaluation index, which
/// callers use to key their own random streams.
pub fn spsa_minimize<F>(objective: F, theta0: &[f64], cfg: &SpsaConfig) -> Result<SpsaResult>
where
    F: FnMut(&[f64], u64) -> Result<f64>,
{
    cfg.validate()?;
    let n = theta0.len();
    let big_a = cfg.stability_constant();
    let mut f = Counter {
        objective,
        evaluations: 0,
        iteration: 0,
    };

    let mut theta = theta0.to_vec();
    let f0 = f.eval(&theta)?;
    let mut trace = vec![f0];
    let mut theta_trace = vec![theta.clone()];
    let (mut best, mut best_value) = (theta.clone(), f0);

    let a = match cfg.a {
        Some(a) => a,
        None if cfg.iterations == 0 => 0.0,
        None => {
            let mut rng = stream_rng(cfg.seed, CALIBRATION_STREAM);
            let mut total = 0.0;
            let probes = cfg.calibration_probes.max(1);
            for _ in 0..probes {
                let delta = rademacher(&mut rng, n);
                let plus = f.eval(&shifted(&theta, &delta, cfg.c))?;
                let minus = f.eval(&shifted(&theta, &delta, -cfg.c))?;
                total += (plus - minus).abs() / (2.0 * cfg.c);
            }
            let mean = total / probes as f64;
            let scale = cfg.target_step * (big_a + 1.0).powf(cfg.alpha);
            if mean > 0.0 && mean.is_finite() {
                scale / mean
            } else {
                scale
            }
        }
    };

    let mut rng = stream_rng(cfg.seed, PERTURBATION_STREAM);
    for k in 0..cfg.iterations {
        f.iteration = k + 1;
        let ak = a / (k as f64 + 1.0 + big_a).powf(cfg.alpha);
        let ck = cfg.c / (k as f64 + 1.0).powf(cfg.gamma);
        let delta = rademacher(&mut rng, n);
        let plus = f.eval(&shifted(&theta, &delta, ck))?;
        let minus = f.eval(&shifted(&theta, &delta, -ck))?;
        let g = (plus - minus) / (2.0 * ck);
        for (t, d) in theta.iter_mut().zip(&delta) {
            *t -= ak * g * d;
        }
        let value = f.eval(&theta)?;
        trace.push(value);
        theta_trace.push(theta.clone());
        if value < best_value {
            best_value = value;
            best.clone_from(&theta);
        }
    }

    Ok(SpsaResult {
        theta: best,
        best_value,
        trace,
        theta_trace,
        a,
        big_a,
        evaluations: f.evaluations,
    })
}
