use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::model::{NoiseSettings, ProbMode, VariationalModel};
use super::risk::{decide, misclass_probability, risk_from_states};
use super::spsa::{spsa_minimize, SpsaConfig};
use crate::error::{Error, Result};
use crate::rng::{stream_id, stream_rng};
use crate::sim::StateVector;

/// Default number of shots assumed inside the sigmoid cost.
pub const DEFAULT_COST_SHOTS: u64 = 200;
/// Default number of shots used to estimate `p̂` in shot-mode training.
pub const DEFAULT_MEASURE_SHOTS: u64 = 2000;
/// Default number of shots per point at classification time.
pub const DEFAULT_CLASSIFY_SHOTS: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrainMode {
    Exact,
    Shots,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub spsa: SpsaConfig,
    pub mode: TrainMode,
    /// `R` inside the sigmoid risk.
    pub cost_shots: u64,
    /// Shots drawn per point and evaluation in shot mode.
    pub measure_shots: u64,
    pub noise: Option<NoiseSettings>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            spsa: SpsaConfig::default(),
            mode: TrainMode::Exact,
            cost_shots: DEFAULT_COST_SHOTS,
            measure_shots: DEFAULT_MEASURE_SHOTS,
            noise: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    /// Risk of `θ₀` and of every iterate. Under noise this is the raw risk.
    pub risk_trace: Vec<f64>,
    /// Extrapolated risk per iterate when mitigation is enabled.
    pub mitigated_trace: Option<Vec<f64>>,
    pub final_risk: f64,
    pub theta: Vec<f64>,
    pub bias: f64,
    pub cost_shots: u64,
    pub measure_shots: u64,
    pub a: f64,
    pub big_a: f64,
    pub evaluations: u64,
}

impl TrainReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iteration,risk");
        if self.mitigated_trace.is_some() {
            out.push_str(",mitigated_risk");
        }
        out.push('\n');
        for (k, r) in self.risk_trace.iter().enumerate() {
            out.push_str(&format!("{k},{r}"));
            if let Some(m) = &self.mitigated_trace {
                out.push_str(&format!(",{}", m[k]));
            }
            out.push('\n');
        }
        out
    }
}

/// `θ₀` uniform on `(−π, π]` per coordinate.
pub fn initial_theta(count: usize, seed: u64, stream: u64) -> Vec<f64> {
    let mut rng = stream_rng(seed, stream);
    (0..count)
        .map(|_| {
            let u: f64 = rng.random();
            PI - 2.0 * PI * u
        })
        .collect()
}

fn noisy_risk(
    model: &VariationalModel,
    points: &[Vec<f64>],
    labels: &[i8],
    cost_shots: u64,
    noise: &NoiseSettings,
) -> Result<(f64, Option<f64>)> {
    let per_point = points
        .par_iter()
        .zip(labels)
        .map(|(x, &y)| {
            let p = model.noisy_p_plus(x, noise)?;
            let p_y = |plus: f64| if y > 0 { plus } else { 1.0 - plus };
            let raw = misclass_probability(p_y(p.raw), cost_shots, model.bias, y);
            let mit = p
                .mitigated
                .map(|m| misclass_probability(p_y(m), cost_shots, model.bias, y));
            Ok((raw, mit))
        })
        .collect::<Result<Vec<_>>>()?;
    let n = per_point.len() as f64;
    let raw = per_point.iter().map(|p| p.0).sum::<f64>() / n;
    let mit = noise
        .mitigate
        .then(|| per_point.iter().map(|p| p.1.unwrap_or(0.0)).sum::<f64>() / n);
    Ok((raw, mit))
}

/// Minimizes the empirical risk over `θ` with the bias held fixed.
///
/// Exact mode uses Born probabilities; shot mode samples `measure_shots`
/// per point from stream `(evaluation, point)` of `spsa.seed`. With noise,
/// the objective is the extrapolated risk if mitigation is on and the raw
/// noisy risk otherwise.
pub fn train(
    model0: &VariationalModel,
    points: &[Vec<f64>],
    labels: &[i8],
    cfg: &TrainConfig,
) -> Result<(VariationalModel, TrainReport)> {
    model0.validate()?;
    if points.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    if points.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: points.len(),
            found: labels.len(),
        });
    }
    let states: Vec<StateVector> = points
        .iter()
        .map(|x| model0.feature.state(x))
        .collect::<Result<_>>()?;

    let with_theta = |theta: &[f64]| VariationalModel {
        theta: theta.to_vec(),
        ..model0.clone()
    };
    let objective = |theta: &[f64], eval: u64| -> Result<f64> {
        let m = with_theta(theta);
        match (&cfg.noise, cfg.mode) {
            (Some(noise), _) => {
                let (raw, mit) = noisy_risk(&m, points, labels, cfg.cost_shots, noise)?;
                Ok(mit.unwrap_or(raw))
            }
            (None, TrainMode::Exact) => {
                risk_from_states(&m, &states, labels, cfg.cost_shots, ProbMode::Exact)
            }
            (None, TrainMode::Shots) => risk_from_states(
                &m,
                &states,
                labels,
                cfg.cost_shots,
                ProbMode::Shots {
                    shots: cfg.measure_shots,
                    seed: cfg.spsa.seed,
                    stream: eval,
                },
            ),
        }
    };
    let result = spsa_minimize(objective, &model0.theta, &cfg.spsa)?;

    let (risk_trace, mitigated_trace) = match &cfg.noise {
        Some(noise) if noise.mitigate => {
            let mut raw = Vec::with_capacity(result.theta_trace.len());
            for theta in &result.theta_trace {
                raw.push(noisy_risk(&with_theta(theta), points, labels, cfg.cost_shots, noise)?.0);
            }
            (raw, Some(result.trace.clone()))
        }
        _ => (result.trace.clone(), None),
    };

    let trained = with_theta(&result.theta);
    let report = TrainReport {
        risk_trace,
        mitigated_trace,
        final_risk: result.best_value,
        theta: result.theta.clone(),
        bias: trained.bias,
        cost_shots: cfg.cost_shots,
        measure_shots: cfg.measure_shots,
        a: result.a,
        big_a: result.big_a,
        evaluations: result.evaluations,
    };
    Ok((trained, report))
}

/// Grid search of `b ∈ [−1, 1]` minimizing training errors under [`decide`]
/// with exact probabilities; ties go to the smallest `|b|`.
pub fn refine_bias(
    model: &VariationalModel,
    points: &[Vec<f64>],
    labels: &[i8],
    steps: usize,
) -> Result<VariationalModel> {
    if points.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let w = model.w_circuit()?;
    let p_plus: Vec<f64> = points
        .iter()
        .map(|x| {
            Ok(model
                .label_probabilities_for_state(&model.feature.state(x)?, &w, ProbMode::Exact)?
                .0)
        })
        .collect::<Result<_>>()?;
    let steps = steps.max(1);
    let mut best = (usize::MAX, f64::INFINITY);
    for k in 0..=steps {
        let b = -1.0 + 2.0 * k as f64 / steps as f64;
        let errors = p_plus
            .iter()
            .zip(labels)
            .filter(|(&p, &y)| decide(p, b) != y)
            .count();
        if errors < best.0 || (errors == best.0 && b.abs() < best.1.abs()) {
            best = (errors, b);
        }
    }
    Ok(VariationalModel {
        bias: best.1,
        ..model.clone()
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub labels: Vec<i8>,
    pub p_plus: Vec<f64>,
    /// Fraction of correct labels; `None` without reference labels or points.
    pub success: Option<f64>,
}

/// Decision rule applied to every point. In shot mode point `i` uses stream
/// `stream_id(stream, i)`.
pub fn classify(
    model: &VariationalModel,
    points: &[Vec<f64>],
    truth: Option<&[i8]>,
    mode: ProbMode,
) -> Result<Classification> {
    let w = model.w_circuit()?;
    let p_plus = points
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            let phi = model.feature.state(x)?;
            let mode = match mode {
                ProbMode::Shots {
                    shots,
                    seed,
                    stream,
                } => ProbMode::Shots {
                    shots,
                    seed,
                    stream: stream_id(stream, i as u64),
                },
                m => m,
            };
            Ok(model.label_probabilities_for_state(&phi, &w, mode)?.0)
        })
        .collect::<Result<Vec<f64>>>()?;
    let labels: Vec<i8> = p_plus.iter().map(|&p| decide(p, model.bias)).collect();
    let success = match truth {
        Some(t) if !points.is_empty() => {
            if t.len() != labels.len() {
                return Err(Error::DimensionMismatch {
                    expected: labels.len(),
                    found: t.len(),
                });
            }
            let hits = labels.iter().zip(t).filter(|(a, b)| a == b).count();
            Some(hits as f64 / labels.len() as f64)
        }
        _ => None,
    };
    Ok(Classification {
        labels,
        p_plus,
        success,
    })
}
