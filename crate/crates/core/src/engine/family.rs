use crate::error::{invalid, Error, Result};
use crate::qmath::ProbabilityVector;

use super::cusum::{check_cap, cusum_update, CusumState, StopResult, StoppingRule};
use super::model::{llr_increment, LikelihoodModel};

/// One CUSUM statistic per candidate post-change distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyState {
    pub per_sigma: Vec<CusumState>,
}

impl FamilyState {
    pub fn new(size: usize) -> Self {
        Self { per_sigma: vec![CusumState::default(); size] }
    }

    /// `max_σ w_σ`.
    pub fn statistic(&self) -> f64 {
        self.per_sigma.iter().map(|s| s.w).fold(0.0, f64::max)
    }

    pub fn alarm(&self, rule: &StoppingRule) -> bool {
        self.per_sigma.iter().any(|s| s.w >= rule.h())
    }
}

/// Checks that every model shares the pre-change distribution.
pub fn check_family(models: &[LikelihoodModel]) -> Result<()> {
    let Some(first) = models.first() else {
        return Err(invalid("family", "needs at least one member"));
    };
    for m in &models[1..] {
        if !m.p().same_alphabet(first.p()) {
            return Err(Error::LabelMismatch);
        }
        if m.p() != first.p() {
            return Err(invalid("family", "members must share the pre-change distribution"));
        }
    }
    Ok(())
}

pub fn family_update(state: &FamilyState, models: &[LikelihoodModel], outcome: usize) -> Result<FamilyState> {
    if state.per_sigma.len() != models.len() {
        return Err(Error::DimensionMismatch(state.per_sigma.len(), models.len()));
    }
    let per_sigma = state
        .per_sigma
        .iter()
        .zip(models)
        .map(|(s, m)| Ok(cusum_update(*s, llr_increment(m, outcome)?)))
        .collect::<Result<_>>()?;
    Ok(FamilyState { per_sigma })
}

/// Alarm of a family detector together with every member's statistic at
/// the alarm step (`h + overshoot_σ`; may be below `h` for members that did
/// not trigger).
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyStop {
    pub result: StopResult,
    pub statistics: Vec<f64>,
}

/// Parallel CUSUM statistics; alarm as soon as any reaches `h`. The
/// reported overshoot is that of the largest statistic.
pub fn run_family_until_stop(
    stream: impl IntoIterator<Item = usize>,
    models: &[LikelihoodModel],
    rule: &StoppingRule,
    cap: u64,
) -> Result<FamilyStop> {
    check_family(models)?;
    check_cap(cap)?;
    let mut state = FamilyState::new(models.len());
    for (n, outcome) in stream.into_iter().take(cap as usize).enumerate() {
        state = family_update(&state, models, outcome)?;
        if state.alarm(rule) {
            return Ok(FamilyStop {
                result: StopResult { t: n as u64 + 1, overshoot: state.statistic() - rule.h(), censored: false },
                statistics: state.per_sigma.iter().map(|s| s.w).collect(),
            });
        }
    }
    Ok(FamilyStop { result: StopResult::censored(cap), statistics: state.per_sigma.iter().map(|s| s.w).collect() })
}

/// First passage of the family's unreflected sums: stop at the first `n`
/// where some `Z_1^n(σ) ≥ h`. `statistics` holds every `Z_1^T(σ)`.
pub fn family_first_passage(
    stream: impl IntoIterator<Item = usize>,
    models: &[LikelihoodModel],
    rule: &StoppingRule,
    cap: u64,
) -> Result<FamilyStop> {
    check_family(models)?;
    check_cap(cap)?;
    let mut sums = vec![0.0; models.len()];
    for (n, outcome) in stream.into_iter().take(cap as usize).enumerate() {
        for (s, m) in sums.iter_mut().zip(models) {
            *s += llr_increment(m, outcome)?;
        }
        let top = sums.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if top == f64::NEG_INFINITY {
            break;
        }
        if top >= rule.h() {
            return Ok(FamilyStop {
                result: StopResult { t: n as u64 + 1, overshoot: top - rule.h(), censored: false },
                statistics: sums,
            });
        }
    }
    Ok(FamilyStop { result: StopResult::censored(cap), statistics: sums })
}

/// `h = ln T_FA + ln |S|`, which keeps the family's mean false-alarm time
/// at least `t_fa_target`.
pub fn threshold_for_family(t_fa_target: f64, family_size: usize) -> Result<StoppingRule> {
    if !(t_fa_target > 1.0) || !t_fa_target.is_finite() {
        return Err(invalid("t_fa_target", format!("{t_fa_target} must exceed 1")));
    }
    if family_size == 0 {
        return Err(invalid("family_size", "must be at least 1"));
    }
    StoppingRule::new(t_fa_target.ln() + (family_size as f64).ln())
}

/// Wald's first-order delay `h / E[z]` in engine steps, overshoot ignored.
///
/// With `post_truth = None` the stream is assumed to follow the model's `q`
/// and the denominator is `D(q‖p)`; otherwise it is
/// `D(q'‖p) − D(q'‖q)`, which must be positive.
pub fn wald_delay_prediction(h: f64, model: &LikelihoodModel, post_truth: Option<&ProbabilityVector>) -> Result<f64> {
    let drift = match post_truth {
        Some(t) => model.drift_under(t)?,
        None => model.drift(),
    };
    if !(drift > 0.0) {
        return Err(Error::Undetectable(drift));
    }
    Ok(h / drift)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::run_until_stop;

    fn bern(p: f64, q: f64) -> LikelihoodModel {
        LikelihoodModel::bernoulli(p, q).unwrap()
    }

    #[test]
    fn singleton_matches_cusum() {
        let m = bern(0.2, 0.6);
        let rule = StoppingRule::new(3.0).unwrap();
        let stream: Vec<usize> = (0..500).map(|i| ((i * 7919) % 11 < 4) as usize).collect();
        let single = run_until_stop(stream.iter().copied(), &m, &rule, 1000).unwrap();
        let fam = run_family_until_stop(stream.iter().copied(), &[m], &rule, 1000).unwrap();
        assert_eq!(single, fam.result);
    }

    #[test]
    fn duplicated_member_is_singleton() {
        let m = bern(0.2, 0.5);
        let rule = StoppingRule::new(2.0).unwrap();
        let stream = [1, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 0];
        let a = run_family_until_stop(stream, std::slice::from_ref(&m), &rule, 100).unwrap();
        let b = run_family_until_stop(stream, &[m.clone(), m], &rule, 100).unwrap();
        assert_eq!(a.result, b.result);
    }

    #[test]
    fn family_dominates_members() {
        let models = [bern(0.2, 0.4), bern(0.2, 0.7)];
        let rule = StoppingRule::new(2.5).unwrap();
        let stream: Vec<usize> = (0..400).map(|i| ((i * 31) % 7 < 2) as usize).collect();
        let fam = run_family_until_stop(stream.iter().copied(), &models, &rule, 400).unwrap();
        for m in &models {
            let single = run_until_stop(stream.iter().copied(), m, &rule, 400).unwrap();
            assert!(fam.result.t <= single.t);
        }
    }

    #[test]
    fn alarm_flag() {
        let models = [bern(0.2, 0.4), bern(0.2, 0.9)];
        let rule = StoppingRule::new(1.0).unwrap();
        let mut s = FamilyState::new(2);
        s = family_update(&s, &models, 0).unwrap();
        assert_eq!(s.alarm(&rule), s.per_sigma.iter().any(|c| c.w >= 1.0));
        assert!(family_update(&s, &models[..1], 0).is_err());
    }

    #[test]
    fn rejects_mixed_pre_change() {
        assert!(check_family(&[bern(0.2, 0.4), bern(0.3, 0.4)]).is_err());
        assert!(check_family(&[]).is_err());
    }

    #[test]
    fn thresholds() {
        let e6 = 6f64.exp();
        assert!((threshold_for_family(e6, 1).unwrap().h() - 6.0).abs() < 1e-12);
        assert!((threshold_for_family(e6, 4).unwrap().h() - (6.0 + 4f64.ln())).abs() < 1e-12);
        assert!(threshold_for_family(0.5, 1).is_err());
        assert!(threshold_for_family(10.0, 0).is_err());
    }

    #[test]
    fn wald_predictions() {
        let m = bern(0.2, 0.25);
        let d = m.drift();
        assert!((d - 0.007381996975374).abs() < 1e-14);
        assert!((wald_delay_prediction(6.0, &m, None).unwrap() - 812.788).abs() < 1e-3);
        assert_eq!(wald_delay_prediction(6.0, &m, Some(m.q())).unwrap(), wald_delay_prediction(6.0, &m, None).unwrap());
        // q' = p gives D(p‖p) − D(p‖q) < 0
        assert!(matches!(wald_delay_prediction(6.0, &m, Some(m.p())), Err(Error::Undetectable(_))));
    }

    #[test]
    fn balanced_truth_is_undetectable() {
        // q' with D(q'‖p) = D(q'‖q): the midpoint in log-odds
        let m = bern(0.2, 0.8);
        let truth = ProbabilityVector::bernoulli(0.5).unwrap();
        assert!(matches!(wald_delay_prediction(6.0, &m, Some(&truth)), Err(Error::Undetectable(d)) if d.abs() < 1e-15));
    }
}
