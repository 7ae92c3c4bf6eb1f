use serde::Serialize;

use crate::engine::{cusum_update, llr_increment, CusumState, LikelihoodModel};
use crate::error::Result;

use super::estimate::{run_trials, MonteCarloEstimate, SimSettings};
use super::rng::{trial_rng, Purpose};
use super::scenario::{stream_with, ChangePoint, ChangePointScenario};

/// Log-likelihood sum `Z_1^n` and CUSUM statistic `w_n` after step `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    pub n: u64,
    pub z_sum: f64,
    pub w: f64,
}

/// First `steps` points of trial `trial`'s path under `scenario`.
pub fn trajectory(scenario: &ChangePointScenario, steps: u64, seed: u64, trial: u64) -> Result<Vec<TrajectoryPoint>> {
    let stream = stream_with(scenario, trial_rng(seed, Purpose::Trajectory, trial))?;
    let mut out = Vec::with_capacity(steps as usize);
    let mut sum = 0.0;
    let mut state = CusumState::default();
    for outcome in stream.take(steps as usize) {
        let z = llr_increment(&scenario.model, outcome)?;
        sum += z;
        state = cusum_update(state, z);
        out.push(TrajectoryPoint { n: state.n, z_sum: sum, w: state.w });
    }
    Ok(out)
}

/// Empirical drift of `Z_1^n` before and after a change at step `nu`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeReport {
    pub nu: u64,
    pub post_steps: u64,
    /// `Z_1^ν / ν` across trajectories; expected `−D(p‖q)`.
    pub pre_slope: MonteCarloEstimate,
    /// `(Z_1^{ν+M} − Z_1^ν)/M`; expected `D(q‖p)`.
    pub post_slope: MonteCarloEstimate,
}

/// Pre/post-change slopes over `settings.trials` independent trajectories.
pub fn trajectory_slopes(
    model: &LikelihoodModel,
    nu: u64,
    post_steps: u64,
    settings: &SimSettings,
) -> Result<SlopeReport> {
    let scenario = ChangePointScenario::new(model.clone(), 1, ChangePoint::Block(nu))?;
    let pairs = run_trials(settings, |i| {
        let stream = stream_with(&scenario, trial_rng(settings.seed, Purpose::Trajectory, i))?;
        let (mut pre, mut post) = (0.0, 0.0);
        for (n, outcome) in stream.take((nu + post_steps) as usize).enumerate() {
            let z = llr_increment(model, outcome)?;
            if (n as u64) < nu {
                pre += z;
            } else {
                post += z;
            }
        }
        Ok((pre / nu.max(1) as f64, post / post_steps.max(1) as f64))
    })?;
    let pre: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let post: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    Ok(SlopeReport {
        nu,
        post_steps,
        pre_slope: MonteCarloEstimate::from_samples(&pre, 0),
        post_slope: MonteCarloEstimate::from_samples(&post, 0),
    })
}
