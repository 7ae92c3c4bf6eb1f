use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

use crate::engine::LikelihoodModel;
use crate::error::Error;
use crate::povm::{
    hayashi_measurement, measured_rate, optimize_angles, sufficient_block_length, variational_measured_entropy,
};
use crate::qmath::{
    max_relative_entropy, quantum_relative_entropy, renyi_relative_entropy, sandwiched_renyi, support_contained,
    DensityMatrix,
};
use crate::schur::{block_state, rotated_block_state, CanonicalPair};
use crate::sim::{
    block_model, family_tradeoff, tradeoff_from_model, trajectory, trajectory_slopes, ChangePoint, ChangePointScenario,
    MeasurementKind, MonteCarloEstimate, SimSettings,
};

use super::config::{ConfigError, Measurement, ScenarioConfig, Source};
use super::{CliError, RunOutput};

pub const BLOCK_RATE_HEADER: &str =
    "l,rate_hayashi,rate_optimized,rate_variational,quantum_relative_entropy,hayashi_lower_bound";

pub const SIMULATE_HEADER: &str =
    "scenario_id,l,h,t_fa_mean,t_fa_se,delay_mean,delay_se,overshoot_mean,predicted_delay,censored_fraction";

pub const UNDETECTABLE_NOTE: &str = "change detectable without false alarms";

fn states(cfg: &ScenarioConfig) -> Result<(DensityMatrix, DensityMatrix), CliError> {
    Ok(match cfg.source {
        Source::Qubit => CanonicalPair::new(cfg.r0, cfg.r1, cfg.theta)?.states(),
        Source::Bernoulli => (
            DensityMatrix::diagonal(&[cfg.p_bias, 1.0 - cfg.p_bias])?,
            DensityMatrix::diagonal(&[cfg.q_bias, 1.0 - cfg.q_bias])?,
        ),
    })
}

fn canonical_pair(cfg: &ScenarioConfig) -> Result<CanonicalPair, CliError> {
    match cfg.source {
        Source::Qubit => Ok(CanonicalPair::new(cfg.r0, cfg.r1, cfg.theta)?),
        Source::Bernoulli => {
            let (rho, sigma) = states(cfg)?;
            Ok(CanonicalPair::from_states(&rho, &sigma)?)
        }
    }
}

fn csv_bytes<T: Serialize>(rows: &[T], header: Option<&str>) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new().has_headers(header.is_none()).from_writer(Vec::new());
    if let Some(h) = header {
        w.write_record(h.split(','))?;
    }
    for row in rows {
        w.serialize(row)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.into_error()))
}

fn json_bytes(value: &Value) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("JSON values serialize");
    out.push(b'\n');
    out
}

#[derive(Serialize)]
struct DivergenceRow {
    quantity: &'static str,
    parameter: Option<f64>,
    value: f64,
    unit: &'static str,
}

fn infinite_on_violation(r: crate::Result<f64>) -> crate::Result<f64> {
    match r {
        Err(Error::SupportViolation) => Ok(f64::INFINITY),
        other => other,
    }
}

/// Divergences of the configured pair and the sufficient block length for
/// each requested `ε`.
pub fn divergences(cfg: &ScenarioConfig) -> Result<RunOutput, CliError> {
    let (rho, sigma) = states(cfg)?;
    let mut rows = Vec::new();
    let d = quantum_relative_entropy(&sigma, &rho)?;
    rows.push(DivergenceRow { quantity: "relative_entropy", parameter: None, value: d, unit: "nats" });
    rows.push(DivergenceRow {
        quantity: "max_relative_entropy",
        parameter: None,
        value: max_relative_entropy(&sigma, &rho)?,
        unit: "bits",
    });
    for alpha in [0.5, 1.5] {
        rows.push(DivergenceRow {
            quantity: "renyi",
            parameter: Some(alpha),
            value: infinite_on_violation(renyi_relative_entropy(&sigma, &rho, alpha))?,
            unit: "nats",
        });
    }
    for &alpha in &cfg.alpha {
        rows.push(DivergenceRow {
            quantity: "sandwiched_renyi",
            parameter: Some(alpha),
            value: infinite_on_violation(sandwiched_renyi(&sigma, &rho, alpha))?,
            unit: "nats",
        });
    }
    let contained = support_contained(&sigma, &rho)?;
    for &eps in &cfg.eps {
        let value = match sufficient_block_length(&rho, &sigma, eps) {
            Ok(l) => l as f64,
            Err(Error::SupportViolation) => f64::NAN,
            Err(Error::NoChange) => f64::INFINITY,
            Err(e) => return Err(e.into()),
        };
        rows.push(DivergenceRow { quantity: "sufficient_block_length", parameter: Some(eps), value, unit: "copies" });
    }
    let note = (!contained).then_some(UNDETECTABLE_NOTE);

    let mut stdout = String::new();
    for r in &rows {
        let param = r.parameter.map(|p| format!("({p})")).unwrap_or_default();
        let _ = writeln!(stdout, "{:<26} {:>12} {}", format!("{}{param}", r.quantity), r.value, r.unit);
    }
    if let Some(n) = note {
        let _ = writeln!(stdout, "note: supp σ is not inside supp ρ; {n}");
    }
    let summary = json!({ "config": cfg.to_json(), "support_contained": contained, "note": note, "rows": rows });
    Ok(RunOutput {
        files: vec![
            ("divergences.csv".into(), csv_bytes(&rows, None)?),
            ("divergences.json".into(), json_bytes(&summary)),
        ],
        stdout,
    })
}

#[derive(Serialize)]
struct BlockRateRow {
    l: u32,
    rate_hayashi: f64,
    rate_optimized: f64,
    rate_variational: Option<f64>,
    quantum_relative_entropy: f64,
    hayashi_lower_bound: f64,
}

fn variational_rate(cfg: &ScenarioConfig, pair: &CanonicalPair, l: u32) -> Result<Option<f64>, CliError> {
    if l > cfg.variational_max_l || pair.r0 >= 1.0 || pair.r1 >= 1.0 {
        return Ok(None);
    }
    let pre = block_state(pair.r0, l)?;
    let post = rotated_block_state(pair.r1, pair.theta, l)?;
    match variational_measured_entropy(&pre, &post) {
        Ok(res) => Ok(Some(res.value)),
        Err(e @ Error::NotConverged { .. }) => Err(CliError::NotConverged(format!("l = {l}: {e}"))),
        Err(e) => Err(e.into()),
    }
}

/// Per-copy measured rates of the block measurements for each `l`.
pub fn block_rate(cfg: &ScenarioConfig) -> Result<RunOutput, CliError> {
    let pair = canonical_pair(cfg)?;
    let (rho, sigma) = pair.states();
    let d = quantum_relative_entropy(&sigma, &rho)?;
    let mut rows = Vec::new();
    for &l in &cfg.l_list {
        let pre = block_state(pair.r0, l)?;
        let post = rotated_block_state(pair.r1, pair.theta, l)?;
        rows.push(BlockRateRow {
            l,
            rate_hayashi: measured_rate(&pre, &post, &hayashi_measurement(l)?)?,
            rate_optimized: measured_rate(&pre, &post, &optimize_angles(&pre, &post)?)?,
            rate_variational: variational_rate(cfg, &pair, l)?,
            quantum_relative_entropy: d,
            hayashi_lower_bound: d - ((l + 1) as f64).ln() / l as f64,
        });
    }
    let mut stdout = String::new();
    let _ = writeln!(stdout, "{}", BLOCK_RATE_HEADER.replace(',', "\t"));
    for r in &rows {
        let var = r.rate_variational.map(|v| format!("{v:.9}")).unwrap_or_else(|| "-".into());
        let _ = writeln!(
            stdout,
            "{}\t{:.9}\t{:.9}\t{var}\t{:.9}\t{:.9}",
            r.l, r.rate_hayashi, r.rate_optimized, r.quantum_relative_entropy, r.hayashi_lower_bound
        );
    }
    Ok(RunOutput { files: vec![("block_rate.csv".into(), csv_bytes(&rows, Some(BLOCK_RATE_HEADER))?)], stdout })
}

#[derive(Debug, Clone, Serialize)]
struct SimulateRow {
    scenario_id: String,
    l: u32,
    h: f64,
    t_fa_mean: f64,
    t_fa_se: f64,
    delay_mean: f64,
    delay_se: f64,
    overshoot_mean: f64,
    predicted_delay: f64,
    censored_fraction: f64,
}

#[derive(Serialize)]
struct TrajectoryRow<'a> {
    scenario_id: &'a str,
    trajectory: u64,
    n: u64,
    z_sum: f64,
    w: f64,
    after_change: bool,
}

fn measurement_kind(m: Measurement) -> MeasurementKind {
    match m {
        Measurement::Hayashi => MeasurementKind::Hayashi,
        Measurement::Optimized | Measurement::VariationalReport => MeasurementKind::Optimized,
    }
}

fn scenario_id(cfg: &ScenarioConfig, l: u32) -> String {
    match cfg.source {
        Source::Bernoulli => "bernoulli".into(),
        Source::Qubit => {
            let kind = match measurement_kind(cfg.measurement) {
                MeasurementKind::Hayashi => "hayashi",
                MeasurementKind::Optimized => "optimized",
            };
            format!("qubit-{kind}-l{l}")
        }
    }
}

fn sim_model(cfg: &ScenarioConfig, l: u32) -> Result<LikelihoodModel, CliError> {
    Ok(match cfg.source {
        Source::Bernoulli => LikelihoodModel::bernoulli(cfg.p_bias, cfg.q_bias)?,
        Source::Qubit => block_model(&canonical_pair(cfg)?, l, measurement_kind(cfg.measurement))?,
    })
}

fn worst_censoring(estimates: &[MonteCarloEstimate]) -> f64 {
    estimates.iter().map(|e| e.censored_fraction).fold(0.0, f64::max)
}

/// Delay/false-alarm estimates per block length and threshold, plus the
/// family detector when alternatives are configured.
pub fn simulate(cfg: &ScenarioConfig) -> Result<RunOutput, CliError> {
    if cfg.h_list.is_empty() {
        return Err(
            ConfigError { location: "field `h_list`".into(), message: "needs at least one threshold".into() }.into()
        );
    }
    if !cfg.family.is_empty() && cfg.source != Source::Qubit {
        return Err(ConfigError { location: "field `family`".into(), message: "needs `source = qubit`".into() }.into());
    }
    let settings = SimSettings::new(cfg.trials, cfg.cap, cfg.seed)?;
    let mut rows = Vec::new();
    let mut points = Vec::new();
    let mut censoring = 0.0f64;
    let mut traj_rows = Vec::new();
    let ids: Vec<(u32, String)> = cfg.sim_l_list().into_iter().map(|l| (l, scenario_id(cfg, l))).collect();
    for (l, id) in &ids {
        let model = sim_model(cfg, *l)?;
        for pt in tradeoff_from_model(&model, *l, &cfg.h_list, &settings)? {
            censoring = censoring.max(worst_censoring(&[pt.t_fa_est, pt.delay_est]));
            rows.push(SimulateRow {
                scenario_id: id.clone(),
                l: *l,
                h: pt.h,
                t_fa_mean: pt.t_fa_est.mean,
                t_fa_se: pt.t_fa_est.std_error,
                delay_mean: pt.delay_est.mean,
                delay_se: pt.delay_est.std_error,
                overshoot_mean: pt.overshoot_est.mean,
                predicted_delay: pt.predicted_delay,
                censored_fraction: pt.t_fa_est.censored_fraction.max(pt.delay_est.censored_fraction),
            });
            points.push(json!({ "scenario_id": id, "point": pt }));
        }
        if cfg.trajectories > 0 {
            let scenario = ChangePointScenario::new(model.clone(), *l, ChangePoint::Block(cfg.nu))?;
            for k in 0..cfg.trajectories {
                for pt in trajectory(&scenario, cfg.trajectory_steps, cfg.seed, k)? {
                    traj_rows.push((id.clone(), k, pt));
                }
            }
        }
    }

    let mut family_reports = Vec::new();
    if !cfg.family.is_empty() {
        for &l in &cfg.l_list {
            for &h in &cfg.h_list {
                let report = family_tradeoff(cfg.r0, &cfg.family, &cfg.family, l, h.exp(), &settings)?;
                censoring = censoring.max(report.t_fa_est.censored_fraction);
                for (i, truth) in report.per_truth.iter().enumerate() {
                    censoring = censoring.max(truth.delay_est.censored_fraction);
                    rows.push(SimulateRow {
                        scenario_id: format!("family-l{l}-truth{i}"),
                        l,
                        h: report.h,
                        t_fa_mean: report.t_fa_est.mean,
                        t_fa_se: report.t_fa_est.std_error,
                        delay_mean: truth.delay_est.mean,
                        delay_se: truth.delay_est.std_error,
                        overshoot_mean: truth.overshoot_est.mean,
                        predicted_delay: truth.predicted_delay,
                        censored_fraction: report.t_fa_est.censored_fraction.max(truth.delay_est.censored_fraction),
                    });
                }
                family_reports.push(report);
            }
        }
    }

    let mut variational = Vec::new();
    if cfg.measurement == Measurement::VariationalReport && cfg.source == Source::Qubit {
        let pair = canonical_pair(cfg)?;
        for &l in &cfg.l_list {
            variational.push(json!({ "l": l, "rate": variational_rate(cfg, &pair, l)? }));
        }
    }

    let summary = json!({
        "config": cfg.to_json(),
        "rows": rows,
        "points": points,
        "family": family_reports,
        "variational": variational,
        "max_censored_fraction_observed": censoring,
    });
    let mut files = vec![
        ("simulate.csv".into(), csv_bytes(&rows, Some(SIMULATE_HEADER))?),
        ("simulate.json".into(), json_bytes(&summary)),
    ];
    if !traj_rows.is_empty() {
        let rows: Vec<TrajectoryRow> = traj_rows
            .iter()
            .map(|(id, k, pt)| TrajectoryRow {
                scenario_id: id,
                trajectory: *k,
                n: pt.n,
                z_sum: pt.z_sum,
                w: pt.w,
                after_change: pt.n > cfg.nu,
            })
            .collect();
        files.push(("trajectories.csv".into(), csv_bytes(&rows, None)?));
    }

    let mut stdout = String::new();
    let _ = writeln!(stdout, "{}", SIMULATE_HEADER.replace(',', "\t"));
    for r in &rows {
        let _ = writeln!(
            stdout,
            "{}\t{}\t{}\t{:.4}\t{:.4}\t{:.4}\t{:.4}\t{:.4}\t{:.4}\t{}",
            r.scenario_id,
            r.l,
            r.h,
            r.t_fa_mean,
            r.t_fa_se,
            r.delay_mean,
            r.delay_se,
            r.overshoot_mean,
            r.predicted_delay,
            r.censored_fraction
        );
    }
    let output = RunOutput { files, stdout };
    if censoring > cfg.max_censored_fraction {
        return Err(CliError::Censored {
            message: format!(
                "censored fraction {censoring} exceeds max_censored_fraction {}",
                cfg.max_censored_fraction
            ),
            partial: Box::new(output),
        });
    }
    Ok(output)
}

#[derive(Serialize)]
struct DemoRow {
    trajectory: u64,
    n: u64,
    z_sum: f64,
    w: f64,
    trend: f64,
    after_change: bool,
}

/// Log-likelihood and CUSUM paths of the configured source with a change
/// after `nu` steps, with the mean-trend line and measured slopes.
pub fn classical_demo(cfg: &ScenarioConfig) -> Result<RunOutput, CliError> {
    let l = cfg.sim_l_list()[0];
    let model = sim_model(cfg, l)?;
    let d_qp = model.drift();
    let d_pq = LikelihoodModel::new(model.q().clone(), model.p().clone())?.drift();
    let nu = cfg.nu;
    let trend = |n: u64| if n <= nu { -d_pq * n as f64 } else { -d_pq * nu as f64 + d_qp * (n - nu) as f64 };

    let scenario = ChangePointScenario::new(model.clone(), l, ChangePoint::Block(nu))?;
    let mut rows = Vec::new();
    for k in 0..cfg.trajectories {
        for pt in trajectory(&scenario, nu + cfg.post_steps, cfg.seed, k)? {
            rows.push(DemoRow {
                trajectory: k,
                n: pt.n,
                z_sum: pt.z_sum,
                w: pt.w,
                trend: trend(pt.n),
                after_change: pt.n > nu,
            });
        }
    }
    let settings = SimSettings::new(cfg.trials, cfg.cap, cfg.seed)?;
    let slopes = trajectory_slopes(&model, nu, cfg.post_steps, &settings)?;
    let summary = json!({
        "config": cfg.to_json(),
        "nu": nu,
        "l": l,
        "d_pre": d_pq,
        "d_post": d_qp,
        "expected_pre_slope": -d_pq,
        "expected_post_slope": d_qp,
        "slopes": slopes,
    });
    let mut stdout = String::new();
    let _ = writeln!(stdout, "change point nu = {nu}");
    let _ = writeln!(
        stdout,
        "pre-change slope  {:.7} ± {:.7} (expected {:.7})",
        slopes.pre_slope.mean, slopes.pre_slope.std_error, -d_pq
    );
    let _ = writeln!(
        stdout,
        "post-change slope {:.7} ± {:.7} (expected {:.7})",
        slopes.post_slope.mean, slopes.post_slope.std_error, d_qp
    );
    Ok(RunOutput {
        files: vec![
            ("classical_demo.csv".into(), csv_bytes(&rows, None)?),
            ("classical_demo.json".into(), json_bytes(&summary)),
        ],
        stdout,
    })
}
