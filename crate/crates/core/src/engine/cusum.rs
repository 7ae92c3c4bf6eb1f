use crate::error::{invalid, Result};

use super::model::{llr_increment, LikelihoodModel};

/// Running CUSUM statistic `w_n = max(w_{n−1} + z_n, 0)` after `n` steps.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CusumState {
    pub w: f64,
    pub n: u64,
}

/// Alarm threshold `h > 0` in nats.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StoppingRule {
    h: f64,
}

impl StoppingRule {
    pub fn new(h: f64) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(invalid("h", format!("threshold {h} must be positive and finite")));
        }
        Ok(Self { h })
    }

    pub fn h(&self) -> f64 {
        self.h
    }
}

/// Outcome of a detector run. `t` counts engine steps (blocks); when
/// `censored`, `t` is the cap and `overshoot` is NaN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopResult {
    pub t: u64,
    pub overshoot: f64,
    pub censored: bool,
}

impl StopResult {
    pub(crate) fn censored(cap: u64) -> Self {
        Self { t: cap, overshoot: f64::NAN, censored: true }
    }
}

pub fn cusum_update(state: CusumState, z: f64) -> CusumState {
    let w = state.w + z;
    CusumState { w: if w > 0.0 { w } else { 0.0 }, n: state.n + 1 }
}

pub(crate) fn check_cap(cap: u64) -> Result<()> {
    if cap == 0 {
        return Err(invalid("cap", "must be positive"));
    }
    Ok(())
}

/// CUSUM stopping time: first `n ≥ 1` with `w_n ≥ h`. A stream that ends
/// or reaches `cap` steps first gives a censored result.
pub fn run_until_stop(
    stream: impl IntoIterator<Item = usize>,
    model: &LikelihoodModel,
    rule: &StoppingRule,
    cap: u64,
) -> Result<StopResult> {
    check_cap(cap)?;
    let mut state = CusumState::default();
    for outcome in stream.into_iter().take(cap as usize) {
        state = cusum_update(state, llr_increment(model, outcome)?);
        if state.w >= rule.h {
            return Ok(StopResult { t: state.n, overshoot: state.w - rule.h, censored: false });
        }
    }
    Ok(StopResult::censored(cap))
}

/// First passage of the unreflected sum `Z_1^n = Σ_{i≤n} z_i` over `h`.
///
/// This is the stopping time started at the first step; it bounds the CUSUM
/// alarm time from above and satisfies Wald's identity
/// `E[Z_1^T] = E[T]·E[z]` exactly.
pub fn first_passage(
    stream: impl IntoIterator<Item = usize>,
    model: &LikelihoodModel,
    rule: &StoppingRule,
    cap: u64,
) -> Result<StopResult> {
    check_cap(cap)?;
    let mut sum = 0.0;
    for (n, outcome) in stream.into_iter().take(cap as usize).enumerate() {
        sum += llr_increment(model, outcome)?;
        if sum == f64::NEG_INFINITY {
            break;
        }
        if sum >= rule.h {
            return Ok(StopResult { t: n as u64 + 1, overshoot: sum - rule.h, censored: false });
        }
    }
    Ok(StopResult::censored(cap))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_z(zs: &[f64], h: f64) -> Option<u64> {
        let mut s = CusumState::default();
        for &z in zs {
            s = cusum_update(s, z);
            if s.w >= h {
                return Some(s.n);
            }
        }
        None
    }

    #[test]
    fn negative_stream_stays_at_zero() {
        let mut s = CusumState::default();
        for _ in 0..10 {
            s = cusum_update(s, -0.3);
            assert_eq!(s.w, 0.0);
        }
        assert_eq!(s.n, 10);
    }

    #[test]
    fn hand_evaluated_sequence() {
        let mut s = CusumState::default();
        let mut ws = Vec::new();
        for z in [1.0, -0.5, 2.0] {
            s = cusum_update(s, z);
            ws.push(s.w);
        }
        assert_eq!(ws, [1.0, 0.5, 2.5]);
    }

    #[test]
    fn constant_drift_alarm_step() {
        for (c, h) in [(0.5f64, 3.0), (0.7, 3.0), (1.0, 0.1), (0.25, 6.0)] {
            let want = (h / c).ceil() as u64;
            assert_eq!(run_z(&vec![c; 100], h), Some(want));
        }
    }

    #[test]
    fn negative_infinity_resets() {
        let s = cusum_update(CusumState { w: 4.0, n: 3 }, f64::NEG_INFINITY);
        assert_eq!(s, CusumState { w: 0.0, n: 4 });
    }

    #[test]
    fn zero_drift_is_censored() {
        let m = LikelihoodModel::bernoulli(0.4, 0.4).unwrap();
        let rule = StoppingRule::new(1.0).unwrap();
        let res = run_until_stop(std::iter::repeat(0), &m, &rule, 1000).unwrap();
        assert!(res.censored && res.t == 1000 && res.overshoot.is_nan());
    }

    #[test]
    fn stop_result_invariant() {
        let m = LikelihoodModel::bernoulli(0.2, 0.6).unwrap();
        let rule = StoppingRule::new(2.0).unwrap();
        let stream = [0, 1, 0, 0, 1, 0, 0, 0];
        let res = run_until_stop(stream, &m, &rule, 100).unwrap();
        let mut s = CusumState::default();
        for &o in &stream[..res.t as usize] {
            s = cusum_update(s, m.z()[o]);
        }
        assert!(!res.censored);
        assert!((s.w - (rule.h() + res.overshoot)).abs() < 1e-15);
    }

    #[test]
    fn first_passage_is_not_reflected() {
        let m = LikelihoodModel::bernoulli(0.2, 0.6).unwrap();
        let rule = StoppingRule::new(1.5).unwrap();
        // two tails then heads: CUSUM forgets the tails, the plain sum does not
        let stream = [1, 1, 0, 0, 0, 0];
        let cusum = run_until_stop(stream, &m, &rule, 100).unwrap();
        let plain = first_passage(stream, &m, &rule, 100).unwrap();
        assert!(cusum.t < plain.t);
    }

    #[test]
    fn rejects_bad_rules() {
        assert!(StoppingRule::new(0.0).is_err());
        assert!(StoppingRule::new(f64::NAN).is_err());
        let m = LikelihoodModel::bernoulli(0.2, 0.6).unwrap();
        assert!(run_until_stop([0], &m, &StoppingRule::new(1.0).unwrap(), 0).is_err());
    }
}
