//! Fréchet derivatives of spectral matrix functions (Daleckii–Krein).
//!
//! For `H = V diag(λ) V†` and a scalar function `f`, the derivative of
//! `X ↦ f(H)` in direction `X` is `V (Γ ∘ V†XV) V†` with `Γ_ik` the first
//! divided difference `f[λ_i, λ_k]`. `Γ` is real and symmetric, so the same
//! map is its own adjoint under the trace inner product.

use nalgebra::{Complex, DMatrix};

use super::spectral::SpectralDecomposition;
use super::C64;

/// `(e^a − e^b)/(a − b)`, evaluated without cancellation.
pub fn exp_divided_difference(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    let d = hi - lo;
    if d < 1e-10 {
        // e^m (1 + d²/24) around the midpoint
        let m = 0.5 * (hi + lo);
        return m.exp() * (1.0 + d * d / 24.0);
    }
    lo.exp() * d.exp_m1() / d
}

/// `(log a − log b)/(a − b)` for positive `a`, `b`.
pub fn log_divided_difference(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    let d = hi - lo;
    if d <= 1e-12 * hi {
        return 2.0 / (hi + lo);
    }
    if d < 0.5 * hi {
        (d / lo).ln_1p() / d
    } else {
        (hi.ln() - lo.ln()) / d
    }
}

/// Directional derivative of the spectral function at `spec` along `x`.
pub fn frechet_derivative(
    spec: &SpectralDecomposition,
    divided: impl Fn(f64, f64) -> f64,
    x: &DMatrix<C64>,
) -> DMatrix<C64> {
    let mut inner = spec.to_eigenbasis(x);
    let lam = &spec.eigenvalues;
    for i in 0..lam.len() {
        for k in 0..lam.len() {
            inner[(i, k)] *= Complex::new(divided(lam[i], lam[k]), 0.0);
        }
    }
    spec.from_eigenbasis(&inner)
}
