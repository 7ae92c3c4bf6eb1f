use crate::error::{invalid, Error, Result};
use crate::qmath::{kl_divergence, ProbabilityVector};

/// Pre/post-change outcome distributions and their log-likelihood ratios
/// `z(x) = ln q(x)/p(x)`.
///
/// An outcome impossible after the change (`q = 0 < p`) maps to `−∞`, one
/// impossible before it (`p = 0 < q`) to `+∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct LikelihoodModel {
    p: ProbabilityVector,
    q: ProbabilityVector,
    z: Vec<f64>,
}

impl LikelihoodModel {
    pub fn new(p: ProbabilityVector, q: ProbabilityVector) -> Result<Self> {
        if !p.same_alphabet(&q) {
            return Err(Error::LabelMismatch);
        }
        let z = p
            .probs()
            .iter()
            .zip(q.probs())
            .map(|(&pi, &qi)| match (pi > 0.0, qi > 0.0) {
                (true, true) => (qi / pi).ln(),
                (true, false) => f64::NEG_INFINITY,
                (false, true) => f64::INFINITY,
                (false, false) => 0.0,
            })
            .collect();
        Ok(Self { p, q, z })
    }

    /// Two-outcome model, `heads` with probability `p_bias` before and
    /// `q_bias` after the change.
    pub fn bernoulli(p_bias: f64, q_bias: f64) -> Result<Self> {
        for (name, b) in [("p", p_bias), ("q", q_bias)] {
            if !(0.0..=1.0).contains(&b) {
                return Err(invalid(name, format!("bias {b} is outside [0, 1]")));
            }
        }
        Self::new(ProbabilityVector::bernoulli(p_bias)?, ProbabilityVector::bernoulli(q_bias)?)
    }

    pub fn p(&self) -> &ProbabilityVector {
        &self.p
    }

    pub fn q(&self) -> &ProbabilityVector {
        &self.q
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    /// `D(q‖p)`, the post-change drift of the statistic.
    pub fn drift(&self) -> f64 {
        kl_divergence(&self.q, &self.p).expect("alphabets checked at construction")
    }

    /// `E_{truth}[z] = D(truth‖p) − D(truth‖q)`, the drift when the stream
    /// actually follows `truth`.
    pub fn drift_under(&self, truth: &ProbabilityVector) -> Result<f64> {
        if !truth.same_alphabet(&self.p) {
            return Err(Error::LabelMismatch);
        }
        let mut acc = 0.0;
        for (&t, &z) in truth.probs().iter().zip(&self.z) {
            if t > 0.0 {
                acc += t * z;
            }
        }
        Ok(acc)
    }
}

/// `z(outcome)`.
pub fn llr_increment(model: &LikelihoodModel, outcome: usize) -> Result<f64> {
    model.z.get(outcome).copied().ok_or(Error::UnknownOutcome(outcome))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_distributions_give_zero() {
        let m = LikelihoodModel::bernoulli(0.3, 0.3).unwrap();
        assert_eq!(m.z(), [0.0, 0.0]);
    }

    #[test]
    fn bernoulli_increment() {
        let m = LikelihoodModel::bernoulli(0.2, 0.25).unwrap();
        assert!((llr_increment(&m, 0).unwrap() - 1.25f64.ln()).abs() < 1e-15);
        assert!((llr_increment(&m, 0).unwrap() - 0.22314).abs() < 1e-5);
        assert!(matches!(llr_increment(&m, 2), Err(Error::UnknownOutcome(2))));
    }

    #[test]
    fn impossible_outcomes() {
        let m = LikelihoodModel::bernoulli(0.5, 0.0).unwrap();
        assert_eq!(llr_increment(&m, 0).unwrap(), f64::NEG_INFINITY);
        let m = LikelihoodModel::bernoulli(0.0, 0.5).unwrap();
        assert_eq!(llr_increment(&m, 0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn drift_is_mean_increment_under_q() {
        let m = LikelihoodModel::new(
            ProbabilityVector::indexed(vec![0.1, 0.2, 0.7]).unwrap(),
            ProbabilityVector::indexed(vec![0.3, 0.3, 0.4]).unwrap(),
        )
        .unwrap();
        assert!((m.drift_under(m.q()).unwrap() - m.drift()).abs() < 1e-12);
        assert!(m.drift_under(m.p()).unwrap() < 0.0);
    }

    #[test]
    fn alphabet_mismatch() {
        let p = ProbabilityVector::bernoulli(0.3).unwrap();
        let q = ProbabilityVector::indexed(vec![0.3, 0.7]).unwrap();
        assert!(matches!(LikelihoodModel::new(p, q), Err(Error::LabelMismatch)));
    }
}
