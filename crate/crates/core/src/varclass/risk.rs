use rayon::prelude::*;

use super::model::{ProbMode, VariationalModel};
use crate::error::{Error, Result};
use crate::rng::stream_id;
use crate::sim::StateVector;

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `+1` iff `2p₊ − 1 + b > 0`; a zero score maps to `−1`.
pub fn decide(p_plus: f64, b: f64) -> i8 {
    if 2.0 * p_plus - 1.0 + b > 0.0 {
        1
    } else {
        -1
    }
}

/// Sigmoid approximation of the chance that `R` shots put the majority on
/// the wrong label:
/// `sig(√R (½ − (p − yb/2)) / √(2p(1−p)))`, with `p` clamped to
/// `[1/(4R), 1 − 1/(4R)]` inside the square root only.
pub fn misclass_probability(p_y: f64, shots: u64, b: f64, y: i8) -> f64 {
    let r = shots.max(1) as f64;
    let lo = 1.0 / (4.0 * r);
    let pc = p_y.clamp(lo, 1.0 - lo);
    let yb = y as f64 * b;
    sigmoid(r.sqrt() * (0.5 - (p_y - yb / 2.0)) / (2.0 * pc * (1.0 - pc)).sqrt())
}

/// `P(r ≤ ⌊R(1 + b)/2⌋)` for `r ~ Binomial(R, p)`, where `b` is the signed
/// bias `y·b`. Summed in log space.
pub fn binomial_misclass_exact(p: f64, shots: u64, b: f64) -> f64 {
    let r = shots;
    let threshold = (r as f64 * (1.0 + b) / 2.0).floor();
    if threshold < 0.0 {
        return 0.0;
    }
    let jmax = (threshold as u64).min(r);
    if p <= 0.0 {
        return 1.0;
    }
    if p >= 1.0 {
        return if jmax == r { 1.0 } else { 0.0 };
    }
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    let mut log_terms = Vec::with_capacity(jmax as usize + 1);
    let mut lt = r as f64 * lq;
    log_terms.push(lt);
    for j in 1..=jmax {
        lt += ((r - j + 1) as f64 / j as f64).ln() + lp - lq;
        log_terms.push(lt);
    }
    let m = log_terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = log_terms.iter().map(|t| (t - m).exp()).sum();
    (m + s.ln()).exp().min(1.0)
}

/// Mean of [`misclass_probability`] at the true labels.
pub fn empirical_risk(
    model: &VariationalModel,
    points: &[Vec<f64>],
    labels: &[i8],
    cost_shots: u64,
    mode: ProbMode,
) -> Result<f64> {
    let states = points
        .iter()
        .map(|x| model.feature.state(x))
        .collect::<Result<Vec<_>>>()?;
    risk_from_states(model, &states, labels, cost_shots, mode)
}

/// Risk with the feature states already prepared. In shot mode point `i`
/// samples from stream `stream_id(stream, i)`.
pub fn risk_from_states(
    model: &VariationalModel,
    states: &[StateVector],
    labels: &[i8],
    cost_shots: u64,
    mode: ProbMode,
) -> Result<f64> {
    if states.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    if states.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: states.len(),
            found: labels.len(),
        });
    }
    let w = model.w_circuit()?;
    let per_point = states
        .par_iter()
        .zip(labels)
        .enumerate()
        .map(|(i, (phi, &y))| {
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
            let (plus, minus) = model.label_probabilities_for_state(phi, &w, mode)?;
            let p_y = if y > 0 { plus } else { minus };
            Ok(misclass_probability(p_y, cost_shots, model.bias, y))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(per_point.iter().sum::<f64>() / per_point.len() as f64)
}

/// `sig(√R (max_{c'≠c} n_{c'} − n_c) / √(2(R − n_c)n_c))` with `n_c` clamped
/// to `[1/4, R − 1/4]` inside the square root.
///
/// The count difference is used as-is, without dividing by `R`.
pub fn multi_label_cost(counts: &[u64], true_class: usize, shots: u64) -> Result<f64> {
    if counts.len() < 2 {
        return Err(Error::InvalidParameter("need at least two classes".into()));
    }
    if true_class >= counts.len() {
        return Err(Error::InvalidParameter(format!(
            "class {true_class} out of range for {} classes",
            counts.len()
        )));
    }
    let total: u64 = counts.iter().sum();
    if total != shots || shots == 0 {
        return Err(Error::InvalidParameter(format!(
            "counts sum to {total}, expected {shots}"
        )));
    }
    let r = shots as f64;
    let n_c = counts[true_class] as f64;
    let best_other = counts
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != true_class)
        .map(|(_, &n)| n)
        .max()
        .expect("two or more classes") as f64;
    let nc = n_c.clamp(0.25, r - 0.25);
    Ok(sigmoid(
        r.sqrt() * (best_other - n_c) / (2.0 * (r - nc) * nc).sqrt(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decide_examples() {
        assert_eq!(decide(0.7, 0.0), 1);
        assert_eq!(decide(0.45, 0.2), 1);
        assert_eq!(decide(0.5, 0.0), -1);
    }

    #[test]
    fn misclass_examples() {
        assert_eq!(misclass_probability(0.5, 200, 0.0, 1), 0.5);
        assert!(misclass_probability(1.0, 200, 0.0, 1) < 1e-3);
        let v = misclass_probability(0.8, 200, 0.0, 1);
        assert!((v - sigmoid(-7.5)).abs() < 1e-12);
    }

    #[test]
    fn exact_cdf_edges() {
        assert_eq!(binomial_misclass_exact(1.0, 200, 0.0), 0.0);
        assert!((binomial_misclass_exact(0.5, 201, 0.0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn multi_label_examples() {
        assert!(multi_label_cost(&[100, 0, 0], 0, 100).unwrap() < 1e-3);
        assert_eq!(multi_label_cost(&[10, 10, 10], 1, 30).unwrap(), 0.5);
        let v = multi_label_cost(&[50, 30, 20], 0, 100).unwrap();
        assert!((v - sigmoid(-200.0 / 5000f64.sqrt())).abs() < 1e-12);
        assert!((v - 0.0558).abs() < 1e-3);
        assert!(multi_label_cost(&[50, 30, 20], 0, 99).is_err());
    }
}
