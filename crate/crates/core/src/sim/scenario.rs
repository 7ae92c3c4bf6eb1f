use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::LikelihoodModel;
use crate::error::{invalid, Result};
use crate::qmath::ProbabilityVector;

/// Where the source switches from `ρ` to `σ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChangePoint {
    Never,
    /// The first `n` blocks are pre-change.
    Block(u64),
    /// The first `n` copies are pre-change; `n` need not be a multiple of `l`.
    Copy(u64),
}

/// Treatment of the block that contains both pre- and post-change copies.
/// Both variants draw it from the pre-change distribution and charge one
/// extra block of delay.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StraddlePolicy {
    #[default]
    Pre,
    SkipBlock,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChangePointScenario {
    pub model: LikelihoodModel,
    pub l: u32,
    pub change: ChangePoint,
    pub straddle_policy: StraddlePolicy,
}

impl ChangePointScenario {
    pub fn new(model: LikelihoodModel, l: u32, change: ChangePoint) -> Result<Self> {
        if l == 0 {
            return Err(invalid("l", "block length must be positive"));
        }
        Ok(Self { model, l, change, straddle_policy: StraddlePolicy::Pre })
    }

    /// Number of leading blocks drawn from `p`, `None` for no change.
    pub fn pre_change_blocks(&self) -> Option<u64> {
        match self.change {
            ChangePoint::Never => None,
            ChangePoint::Block(n) => Some(n),
            ChangePoint::Copy(n) => Some(n.div_ceil(self.l as u64)),
        }
    }

    /// Whether the change falls strictly inside a block.
    pub fn straddles(&self) -> bool {
        matches!(self.change, ChangePoint::Copy(n) if n % self.l as u64 != 0)
    }
}

/// Draws outcome indices from `p` or `q`.
#[derive(Debug, Clone)]
pub(crate) struct OutcomeSampler {
    pre: WeightedIndex<f64>,
    post: WeightedIndex<f64>,
}

impl OutcomeSampler {
    pub(crate) fn new(model: &LikelihoodModel) -> Result<Self> {
        Ok(Self { pre: weighted(model.p())?, post: weighted(model.q())? })
    }

    pub(crate) fn pre(&self, rng: &mut impl Rng) -> usize {
        self.pre.sample(rng)
    }

    pub(crate) fn post(&self, rng: &mut impl Rng) -> usize {
        self.post.sample(rng)
    }
}

pub(crate) fn weighted(dist: &ProbabilityVector) -> Result<WeightedIndex<f64>> {
    WeightedIndex::new(dist.probs()).map_err(|e| invalid("distribution", e.to_string()))
}

/// Unbounded outcome stream of a scenario, one outcome per block.
pub struct OutcomeStream<R> {
    sampler: OutcomeSampler,
    pre_blocks: Option<u64>,
    emitted: u64,
    rng: R,
}

impl<R: Rng> Iterator for OutcomeStream<R> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        let pre = self.pre_blocks.is_none_or(|n| self.emitted < n);
        self.emitted += 1;
        Some(if pre { self.sampler.pre(&mut self.rng) } else { self.sampler.post(&mut self.rng) })
    }
}

pub(crate) fn stream_with<R: Rng>(scenario: &ChangePointScenario, rng: R) -> Result<OutcomeStream<R>> {
    Ok(OutcomeStream {
        sampler: OutcomeSampler::new(&scenario.model)?,
        pre_blocks: scenario.pre_change_blocks(),
        emitted: 0,
        rng,
    })
}

/// Deterministic outcome stream for `seed`.
pub fn sample_stream(scenario: &ChangePointScenario, seed: u64) -> Result<OutcomeStream<ChaCha8Rng>> {
    stream_with(scenario, ChaCha8Rng::seed_from_u64(seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(change: ChangePoint) -> ChangePointScenario {
        ChangePointScenario::new(LikelihoodModel::bernoulli(0.2, 0.6).unwrap(), 5, change).unwrap()
    }

    #[test]
    fn never_draws_from_p() {
        let n = 100_000;
        let heads = sample_stream(&scenario(ChangePoint::Never), 7).unwrap().take(n).filter(|&o| o == 0).count();
        let se = (0.2f64 * 0.8 / n as f64).sqrt();
        assert!((heads as f64 / n as f64 - 0.2).abs() < 3.0 * se);
    }

    #[test]
    fn change_at_zero_draws_from_q() {
        let n = 100_000;
        let heads = sample_stream(&scenario(ChangePoint::Block(0)), 7).unwrap().take(n).filter(|&o| o == 0).count();
        let se = (0.6f64 * 0.4 / n as f64).sqrt();
        assert!((heads as f64 / n as f64 - 0.6).abs() < 3.0 * se);
    }

    #[test]
    fn same_seed_same_stream() {
        let a: Vec<usize> = sample_stream(&scenario(ChangePoint::Block(30)), 11).unwrap().take(1000).collect();
        let b: Vec<usize> = sample_stream(&scenario(ChangePoint::Block(30)), 11).unwrap().take(1000).collect();
        let c: Vec<usize> = sample_stream(&scenario(ChangePoint::Block(30)), 12).unwrap().take(1000).collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn straddling_block_is_pre_change() {
        let s = scenario(ChangePoint::Copy(12));
        assert_eq!(s.pre_change_blocks(), Some(3));
        assert!(s.straddles());
        let aligned = scenario(ChangePoint::Copy(10));
        assert_eq!(aligned.pre_change_blocks(), Some(2));
        assert!(!aligned.straddles());
    }

    #[test]
    fn deterministic_change_switches_exactly() {
        let model = LikelihoodModel::bernoulli(1.0, 0.0).unwrap();
        let s = ChangePointScenario::new(model, 1, ChangePoint::Block(4)).unwrap();
        let out: Vec<usize> = sample_stream(&s, 0).unwrap().take(8).collect();
        assert_eq!(out, [0, 0, 0, 0, 1, 1, 1, 1]);
    }
}
