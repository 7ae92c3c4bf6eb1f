//! Block measurements on `l`-copy groups and the measured relative entropy
//! they achieve.

mod block_length;
mod measurement;
mod oracle;
mod search;
mod variational;

pub use block_length::{sufficient_block_length, sufficient_block_length_from};
pub use measurement::{
    hayashi_measurement, measured_rate, optimize_angles, outcome_distribution, BlockMeasurement, OutcomePair,
};
pub use oracle::grid_oracle_single_copy;
pub use variational::{
    variational_measured_entropy, variational_measured_entropy_with, VariationalOptions, VariationalResult,
};
