//! Seeded Monte Carlo estimation of false-alarm times, detection delays and
//! their tradeoff.
//!
//! Trial `i` of a run with master seed `s` draws from a ChaCha8 generator
//! keyed by `s` with stream number `i`; trials execute in parallel and are
//! reduced in index order, so results are bit-identical for any thread count.

mod estimate;
mod rng;
mod scenario;
mod tradeoff;
mod trajectory;

pub use estimate::{
    estimate_false_alarm_time, estimate_worst_delay, wald_delay_copies, DelayEstimate, MonteCarloEstimate, SimSettings,
    DEFAULT_CAP,
};
pub use scenario::{sample_stream, ChangePoint, ChangePointScenario, OutcomeStream, StraddlePolicy};
pub use tradeoff::{
    block_model, block_outcomes, family_tradeoff, family_tradeoff_from_models, tradeoff_curve, tradeoff_from_model,
    FamilyReport, FamilyTruthPoint, MeasurementKind, TradeoffPoint,
};
pub use trajectory::{trajectory, trajectory_slopes, SlopeReport, TrajectoryPoint};
