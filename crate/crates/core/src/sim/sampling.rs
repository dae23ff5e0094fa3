use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};

/// Probability of each computational basis string, indexed by the integer
/// value of the string.
#[derive(Debug, Clone, PartialEq)]
pub struct Probabilities(Vec<f64>);

impl Probabilities {
    /// Validates entries (finite, not below `-1e-12`) and the total
    /// (within `1e-9` of one).
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|p| !p.is_finite() || *p < -1e-12) {
            return Err(Error::InvalidParameter(
                "probabilities must be finite and non-negative".into(),
            ));
        }
        let total: f64 = values.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::NotADistribution(total));
        }
        Ok(Self(values))
    }

    pub(crate) fn from_vec_unchecked(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, outcome: usize) -> f64 {
        self.0[outcome]
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

/// Shot counts per basis string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counts {
    counts: Vec<u64>,
    shots: u64,
}

impl Counts {
    pub fn from_counts(counts: Vec<u64>) -> Self {
        let shots = counts.iter().sum();
        Self { counts, shots }
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn get(&self, outcome: usize) -> u64 {
        self.counts[outcome]
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.counts
    }

    pub fn frequency(&self, outcome: usize) -> f64 {
        self.counts[outcome] as f64 / self.shots as f64
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|&c| c as f64 / self.shots as f64)
            .collect()
    }
}

/// Draws `shots` independent measurement outcomes from `dist`.
///
/// Outcomes are tallied as a multinomial built from conditional binomials,
/// so the cost is linear in the number of outcomes rather than in `shots`.
pub fn sample_shots<R: Rng + ?Sized>(
    dist: &Probabilities,
    shots: u64,
    rng: &mut R,
) -> Result<Counts> {
    if shots == 0 {
        return Err(Error::InvalidParameter(
            "shot count must be at least 1".into(),
        ));
    }
    let checked = Probabilities::new(dist.0.clone())?;
    let p: Vec<f64> = checked.0.iter().map(|v| v.max(0.0)).collect();

    // suffix[k] = Σ_{j ≥ k} p_j, accumulated backwards so the last non-zero
    // outcome always receives conditional probability exactly one.
    let mut suffix = vec![0.0; p.len() + 1];
    for k in (0..p.len()).rev() {
        suffix[k] = suffix[k + 1] + p[k];
    }

    let mut counts = vec![0u64; p.len()];
    let mut remaining = shots;
    for k in 0..p.len() {
        if remaining == 0 || suffix[k] <= 0.0 {
            break;
        }
        let q = (p[k] / suffix[k]).clamp(0.0, 1.0);
        let draw = if q >= 1.0 {
            remaining
        } else if q <= 0.0 {
            0
        } else {
            Binomial::new(remaining, q)
                .expect("q in (0, 1)")
                .sample(rng)
        };
        counts[k] = draw;
        remaining -= draw;
    }
    debug_assert_eq!(remaining, 0);
    Ok(Counts { counts, shots })
}
