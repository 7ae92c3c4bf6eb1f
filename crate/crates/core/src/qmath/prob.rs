use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SUM_TOL: f64 = 1e-10;

/// A finite distribution over labelled outcomes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityVector {
    probs: Vec<f64>,
    labels: Vec<String>,
}

impl ProbabilityVector {
    pub fn new(probs: Vec<f64>, labels: Vec<String>) -> Result<Self> {
        if probs.len() != labels.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} probabilities for {} labels",
                probs.len(),
                labels.len()
            )));
        }
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty alphabet".into()));
        }
        if let Some(bad) = probs.iter().find(|p| !(**p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidDistribution(format!("entry {bad} is not a probability")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidDistribution(format!("entries sum to {sum}")));
        }
        Ok(Self { probs, labels })
    }

    /// Labels `"0"`, `"1"`, ... in order.
    pub fn indexed(probs: Vec<f64>) -> Result<Self> {
        let labels = (0..probs.len()).map(|i| i.to_string()).collect();
        Self::new(probs, labels)
    }

    /// Two outcomes `"heads"` (probability `bias`) and `"tails"`.
    pub fn bernoulli(bias: f64) -> Result<Self> {
        Self::new(vec![bias, 1.0 - bias], vec!["heads".into(), "tails".into()])
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn same_alphabet(&self, other: &Self) -> bool {
        self.labels == other.labels
    }
}

/// Kullback–Leibler divergence `Σ q log(q/p)` in nats.
pub fn kl_divergence(q: &ProbabilityVector, p: &ProbabilityVector) -> Result<f64> {
    if !q.same_alphabet(p) {
        return Err(Error::LabelMismatch);
    }
    Ok(kl_raw(q.probs(), p.probs()))
}

pub(crate) fn kl_raw(q: &[f64], p: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&qi, &pi) in q.iter().zip(p) {
        if qi <= 0.0 {
            continue;
        }
        if pi <= 0.0 {
            return f64::INFINITY;
        }
        acc += qi * (qi / pi).ln();
    }
    acc
}
