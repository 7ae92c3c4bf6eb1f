//! Angular-momentum block decomposition of i.i.d. qubit streams and the
//! Wigner rotations that relate the pre- and post-change blocks.

pub(crate) mod angular;
mod block;
mod canonical;
mod lgamma;
mod oracle;
mod wigner;

pub use angular::{spin_operators, SpinOperators};
pub use block::{
    block_state, multiplicity, rotated_block_state, Block, BlockDecomposition, BlockDecompositionJson, BlockJson,
    BlockLabel, MAX_COPIES,
};
pub use canonical::CanonicalPair;
pub use oracle::{brute_force_decompose, schur_basis, SchurIrrep, MAX_ORACLE_COPIES};
pub use wigner::{wigner_d, WignerD};
