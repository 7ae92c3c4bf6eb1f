use serde::{Deserialize, Serialize};

use crate::engine::{
    family_first_passage, run_family_until_stop, threshold_for_family, LikelihoodModel, StopResult, StoppingRule,
};
use crate::error::{invalid, Error, Result};
use crate::povm::{hayashi_measurement, optimize_angles, outcome_distribution, OutcomePair};
use crate::qmath::ProbabilityVector;
use crate::schur::{block_state, rotated_block_state, CanonicalPair};

use super::estimate::{
    estimate_false_alarm_time, estimate_worst_delay, run_trials, wald_delay_copies, MonteCarloEstimate, SimSettings,
};
use super::rng::{trial_rng, Purpose};
use super::scenario::{stream_with, ChangePoint, ChangePointScenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasurementKind {
    Hayashi,
    Optimized,
}

/// One threshold of a delay/false-alarm curve, in copies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TradeoffPoint {
    pub l: u32,
    pub h: f64,
    pub t_fa_est: MonteCarloEstimate,
    pub delay_est: MonteCarloEstimate,
    pub overshoot_est: MonteCarloEstimate,
    /// `l·(h + ŝ)/D(q‖p)` with the measured mean overshoot `ŝ`.
    pub predicted_delay: f64,
}

/// Block-level outcome model of a canonical pair under a block measurement.
pub fn block_outcomes(pair: &CanonicalPair, l: u32, kind: MeasurementKind) -> Result<OutcomePair> {
    let pre = block_state(pair.r0, l)?;
    let post = rotated_block_state(pair.r1, pair.theta, l)?;
    let meas = match kind {
        MeasurementKind::Hayashi => hayashi_measurement(l)?,
        MeasurementKind::Optimized => optimize_angles(&pre, &post)?,
    };
    outcome_distribution(&pre, &post, &meas)
}

pub fn block_model(pair: &CanonicalPair, l: u32, kind: MeasurementKind) -> Result<LikelihoodModel> {
    let out = block_outcomes(pair, l, kind)?;
    LikelihoodModel::new(out.p, out.q)
}

fn check_h_list(h_list: &[f64]) -> Result<Vec<StoppingRule>> {
    if h_list.is_empty() {
        return Err(invalid("h_list", "needs at least one threshold"));
    }
    h_list.iter().map(|&h| StoppingRule::new(h)).collect()
}

/// False-alarm and delay estimates of an outcome model for each threshold.
/// Every threshold reuses the same per-trial seeds.
pub fn tradeoff_from_model(
    model: &LikelihoodModel,
    l: u32,
    h_list: &[f64],
    settings: &SimSettings,
) -> Result<Vec<TradeoffPoint>> {
    let rules = check_h_list(h_list)?;
    if !(model.drift() > 0.0) {
        return Err(Error::NoChange);
    }
    let never = ChangePointScenario::new(model.clone(), l, ChangePoint::Never)?;
    let change = ChangePointScenario::new(model.clone(), l, ChangePoint::Block(0))?;
    rules
        .iter()
        .map(|rule| {
            let t_fa_est = estimate_false_alarm_time(&never, rule, settings)?;
            let delay = estimate_worst_delay(&change, rule, settings)?;
            let predicted_delay = wald_delay_copies(rule.h(), delay.overshoot.mean, model, l)?;
            Ok(TradeoffPoint {
                l,
                h: rule.h(),
                t_fa_est,
                delay_est: delay.delay,
                overshoot_est: delay.overshoot,
                predicted_delay,
            })
        })
        .collect()
}

/// Delay/false-alarm curve of QUSUM on a canonical pair with `l`-copy blocks.
pub fn tradeoff_curve(
    pair: &CanonicalPair,
    l: u32,
    kind: MeasurementKind,
    h_list: &[f64],
    settings: &SimSettings,
) -> Result<Vec<TradeoffPoint>> {
    check_h_list(h_list)?;
    tradeoff_from_model(&block_model(pair, l, kind)?, l, h_list, settings)
}

/// Delay of the family detector when the stream follows one particular
/// post-change distribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyTruthPoint {
    pub truth: String,
    /// Copies.
    pub delay_est: MonteCarloEstimate,
    /// Family member with the largest drift under this truth; its Wald
    /// identity gives the prediction.
    pub reference_member: usize,
    /// `Z^{T}(σ_ref) − h` averaged over non-censored runs (may be negative
    /// when another member triggered).
    pub overshoot_est: MonteCarloEstimate,
    /// `l·(h + ŝ)/max_σ (D(q'‖p) − D(q'‖q_σ))`.
    pub predicted_delay: f64,
    /// `l·h/max_σ (D(q'‖p) − D(q'‖q_σ))`.
    pub first_order_delay: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyReport {
    pub l: u32,
    pub h: f64,
    pub t_fa_target: f64,
    /// Copies.
    pub t_fa_est: MonteCarloEstimate,
    pub per_truth: Vec<FamilyTruthPoint>,
    /// Largest per-truth mean delay.
    pub worst_delay: f64,
}

/// Family detector over `models` (shared `p`) with `h = ln T_FA + ln |S|`.
/// `truths` are labelled post-change distributions over the same alphabet.
pub fn family_tradeoff_from_models(
    models: &[LikelihoodModel],
    truths: &[(String, ProbabilityVector)],
    l: u32,
    t_fa_target: f64,
    settings: &SimSettings,
) -> Result<FamilyReport> {
    let rule = threshold_for_family(t_fa_target, models.len())?;
    crate::engine::check_family(models)?;
    let p = models[0].p().clone();
    let never = ChangePointScenario::new(models[0].clone(), l, ChangePoint::Never)?;
    let fa_runs: Vec<StopResult> = run_trials(settings, |i| {
        let stream = stream_with(&never, trial_rng(settings.seed, Purpose::FalseAlarm, i))?;
        Ok(run_family_until_stop(stream, models, &rule, settings.cap)?.result)
    })?;
    let fa_times: Vec<f64> = fa_runs.iter().map(|r| r.t as f64 * l as f64).collect();
    let t_fa_est = MonteCarloEstimate::from_samples(&fa_times, fa_runs.iter().filter(|r| r.censored).count() as u64);

    let mut per_truth = Vec::new();
    for (name, truth) in truths {
        let drifts = models.iter().map(|m| m.drift_under(truth)).collect::<Result<Vec<f64>>>()?;
        let (reference, &drift) =
            drifts
                .iter()
                .enumerate()
                .fold((0, &f64::NEG_INFINITY), |best, cur| if *cur.1 > *best.1 { cur } else { best });
        if !(drift > 0.0) {
            return Err(Error::Undetectable(drift));
        }
        let sampler =
            ChangePointScenario::new(LikelihoodModel::new(p.clone(), truth.clone())?, l, ChangePoint::Block(0))?;
        let runs = run_trials(settings, |i| {
            let stream = stream_with(&sampler, trial_rng(settings.seed, Purpose::Delay, i))?;
            family_first_passage(stream, models, &rule, settings.cap)
        })?;
        let times: Vec<f64> = runs.iter().map(|r| r.result.t as f64 * l as f64).collect();
        let censored = runs.iter().filter(|r| r.result.censored).count() as u64;
        let overshoots: Vec<f64> =
            runs.iter().filter(|r| !r.result.censored).map(|r| r.statistics[reference] - rule.h()).collect();
        let overshoot_est = MonteCarloEstimate::from_samples(&overshoots, 0);
        per_truth.push(FamilyTruthPoint {
            truth: name.clone(),
            delay_est: MonteCarloEstimate::from_samples(&times, censored),
            reference_member: reference,
            predicted_delay: l as f64 * (rule.h() + overshoot_est.mean) / drift,
            first_order_delay: l as f64 * rule.h() / drift,
            overshoot_est,
        });
    }
    let worst_delay = per_truth.iter().map(|t| t.delay_est.mean).fold(f64::NEG_INFINITY, f64::max);
    Ok(FamilyReport { l, h: rule.h(), t_fa_target, t_fa_est, per_truth, worst_delay })
}

/// Family detector for canonical-frame post-change states `(r1, θ)` sharing
/// `ρ = (I + r0 σ_z)/2`, measured with the σ-independent Hayashi measurement.
pub fn family_tradeoff(
    r0: f64,
    family: &[(f64, f64)],
    truths: &[(f64, f64)],
    l: u32,
    t_fa_target: f64,
    settings: &SimSettings,
) -> Result<FamilyReport> {
    if family.is_empty() {
        return Err(invalid("family", "needs at least one member"));
    }
    let outcome =
        |&(r1, theta): &(f64, f64)| block_outcomes(&CanonicalPair::new(r0, r1, theta)?, l, MeasurementKind::Hayashi);
    let models = family
        .iter()
        .map(|m| {
            let o = outcome(m)?;
            LikelihoodModel::new(o.p, o.q)
        })
        .collect::<Result<Vec<_>>>()?;
    let truths =
        truths.iter().map(|t| Ok((format!("r1={},theta={}", t.0, t.1), outcome(t)?.q))).collect::<Result<Vec<_>>>()?;
    family_tradeoff_from_models(&models, &truths, l, t_fa_target, settings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::DEFAULT_CAP;
    use std::f64::consts::PI;

    #[test]
    fn equal_pair_is_an_error() {
        let pair = CanonicalPair::new(0.5, 0.5, 0.0).unwrap();
        let s = SimSettings::new(10, 100, 0).unwrap();
        assert!(matches!(tradeoff_curve(&pair, 1, MeasurementKind::Hayashi, &[2.0], &s), Err(Error::NoChange)));
        assert!(
            tradeoff_curve(&CanonicalPair::new(0.5, 0.9, 0.0).unwrap(), 1, MeasurementKind::Hayashi, &[], &s).is_err()
        );
    }

    #[test]
    fn curve_points_are_in_copies() {
        let pair = CanonicalPair::new(0.9, 0.9, PI / 4.0).unwrap();
        let s = SimSettings::new(200, DEFAULT_CAP, 4).unwrap();
        let pts = tradeoff_curve(&pair, 3, MeasurementKind::Optimized, &[2.0, 4.0], &s).unwrap();
        for p in &pts {
            assert_eq!(p.l, 3);
            let blocks = p.delay_est.mean * 200.0 / 3.0;
            assert!((blocks - blocks.round()).abs() < 1e-6);
        }
        assert!(pts[0].delay_est.mean <= pts[1].delay_est.mean);
    }

    #[test]
    fn singleton_family_matches_curve() {
        let s = SimSettings::new(300, DEFAULT_CAP, 8).unwrap();
        let model = LikelihoodModel::bernoulli(0.2, 0.6).unwrap();
        let target = 3f64.exp();
        let fam = family_tradeoff_from_models(
            std::slice::from_ref(&model),
            &[("q".into(), model.q().clone())],
            1,
            target,
            &s,
        )
        .unwrap();
        let curve = tradeoff_from_model(&model, 1, &[3.0], &s).unwrap();
        assert!((fam.h - 3.0).abs() < 1e-12);
        assert_eq!(fam.t_fa_est.mean, curve[0].t_fa_est.mean);
        assert_eq!(fam.per_truth[0].delay_est.mean, curve[0].delay_est.mean);
    }
}
