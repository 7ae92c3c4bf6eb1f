//! CUSUM detector: log-likelihood increments, the reflected statistic, and
//! stopping rules for single and multiple post-change hypotheses.

mod cusum;
mod family;
mod model;

pub use cusum::{cusum_update, first_passage, run_until_stop, CusumState, StopResult, StoppingRule};
pub use family::{
    check_family, family_first_passage, family_update, run_family_until_stop, threshold_for_family,
    wald_delay_prediction, FamilyState, FamilyStop,
};
pub use model::{llr_increment, LikelihoodModel};
