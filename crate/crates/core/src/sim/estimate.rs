use rayon::prelude::*;
use serde::Serialize;

use crate::engine::{first_passage, run_until_stop, LikelihoodModel, StopResult, StoppingRule};
use crate::error::{invalid, Error, Result};

use super::rng::{trial_rng, Purpose};
use super::scenario::{stream_with, ChangePoint, ChangePointScenario};

/// Default run-length cap in engine steps.
pub const DEFAULT_CAP: u64 = 10_000_000;

/// Trial count, per-run cap (engine steps) and master seed of an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SimSettings {
    pub trials: u64,
    pub cap: u64,
    pub seed: u64,
}

impl SimSettings {
    pub fn new(trials: u64, cap: u64, seed: u64) -> Result<Self> {
        if trials == 0 {
            return Err(invalid("trials", "must be at least 1"));
        }
        if cap == 0 {
            return Err(invalid("cap", "must be positive"));
        }
        Ok(Self { trials, cap, seed })
    }
}

/// Sample mean with its standard error. When `censored_fraction > 0` the
/// censored runs entered at the cap and `mean` is a lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: u64,
    pub censored_fraction: f64,
}

impl MonteCarloEstimate {
    /// Mean and standard error of `values`, summed in order.
    pub fn from_samples(values: &[f64], censored: u64) -> Self {
        let n = values.len();
        if n == 0 {
            return Self { mean: f64::NAN, std_error: f64::NAN, trials: 0, censored_fraction: 0.0 };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = if n > 1 { values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64 } else { 0.0 };
        Self {
            mean,
            std_error: (var / n as f64).sqrt(),
            trials: n as u64,
            censored_fraction: censored as f64 / n as f64,
        }
    }

    pub fn is_censored(&self) -> bool {
        self.censored_fraction > 0.0
    }
}

/// Runs `trial` for every index in parallel and returns results in index
/// order, independent of the thread count.
pub(crate) fn run_trials<T: Send>(settings: &SimSettings, trial: impl Fn(u64) -> Result<T> + Sync) -> Result<Vec<T>> {
    (0..settings.trials).into_par_iter().map(&trial).collect()
}

/// Mean false-alarm time in copies (`alarm step × l`) of the CUSUM detector
/// on a stream that never changes.
pub fn estimate_false_alarm_time(
    scenario: &ChangePointScenario,
    rule: &StoppingRule,
    settings: &SimSettings,
) -> Result<MonteCarloEstimate> {
    if scenario.change != ChangePoint::Never {
        return Err(invalid("change", "false-alarm estimation needs a scenario without change"));
    }
    let runs = run_trials(settings, |i| {
        let stream = stream_with(scenario, trial_rng(settings.seed, Purpose::FalseAlarm, i))?;
        run_until_stop(stream, &scenario.model, rule, settings.cap)
    })?;
    Ok(summarize(&runs, scenario.l as f64, 0.0).0)
}

/// Delay estimate with the mean overshoot of the alarming runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DelayEstimate {
    /// Copies: `T_1 × l`, plus `l` when the change straddles a block.
    pub delay: MonteCarloEstimate,
    /// Overshoot `Z_1^{T_1} − h` over non-censored runs.
    pub overshoot: MonteCarloEstimate,
}

fn summarize(runs: &[StopResult], l: f64, penalty: f64) -> (MonteCarloEstimate, MonteCarloEstimate) {
    let times: Vec<f64> = runs.iter().map(|r| r.t as f64 * l + penalty).collect();
    let censored = runs.iter().filter(|r| r.censored).count() as u64;
    let overshoots: Vec<f64> = runs.iter().filter(|r| !r.censored).map(|r| r.overshoot).collect();
    (MonteCarloEstimate::from_samples(&times, censored), MonteCarloEstimate::from_samples(&overshoots, 0))
}

/// Estimates the worst-case mean delay through its upper bound `E_0[T_1]`:
/// the unreflected log-likelihood sum started at the change on a purely
/// post-change stream. The scenario's change point only decides the
/// straddle penalty.
pub fn estimate_worst_delay(
    scenario: &ChangePointScenario,
    rule: &StoppingRule,
    settings: &SimSettings,
) -> Result<DelayEstimate> {
    let drift = scenario.model.drift();
    if !(drift > 0.0) {
        return Err(Error::Undetectable(drift));
    }
    let post = ChangePointScenario { change: ChangePoint::Block(0), ..scenario.clone() };
    let runs = run_trials(settings, |i| {
        let stream = stream_with(&post, trial_rng(settings.seed, Purpose::Delay, i))?;
        first_passage(stream, &scenario.model, rule, settings.cap)
    })?;
    let l = scenario.l as f64;
    let penalty = if scenario.straddles() { l } else { 0.0 };
    let (delay, overshoot) = summarize(&runs, l, penalty);
    Ok(DelayEstimate { delay, overshoot })
}

/// Wald's identity with overshoot, `(h + ŝ)/D(q‖p)`, in copies.
pub fn wald_delay_copies(h: f64, mean_overshoot: f64, model: &LikelihoodModel, l: u32) -> Result<f64> {
    let d = model.drift();
    if !(d > 0.0) {
        return Err(Error::Undetectable(d));
    }
    Ok(l as f64 * (h + mean_overshoot) / d)
}
