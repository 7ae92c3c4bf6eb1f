//! Hermitian operator algebra and state divergences.

mod divergence;
mod frechet;
mod operator;
mod prob;
mod spectral;

pub use divergence::{
    bits_to_nats, hypothesis_testing_relative_entropy, max_relative_entropy, nats_to_bits, neyman_pearson_test,
    quantum_relative_entropy, renyi_relative_entropy, sandwiched_renyi, support_contained, NeymanPearsonTest,
};
pub use frechet::{exp_divided_difference, frechet_derivative, log_divided_difference};
pub use operator::{DensityMatrix, HermitianOperator, OperatorJson};
pub(crate) use prob::kl_raw;
pub use prob::{kl_divergence, ProbabilityVector};
pub use spectral::{spectral_decompose, SpectralDecomposition};

pub type C64 = nalgebra::Complex<f64>;

/// Element-wise Hermiticity tolerance.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Eigenvalues at or below this are treated as kernel.
pub const SUPPORT_CUTOFF: f64 = 1e-12;
