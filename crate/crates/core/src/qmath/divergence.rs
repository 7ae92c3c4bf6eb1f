//! Quantum and classical divergences. All values are in nats except
//! [`max_relative_entropy`], which reports bits to match the `σ ≤ 2^λ ρ`
//! definition.

use nalgebra::{Complex, DMatrix};

use crate::error::{invalid, Error, Result};

use super::operator::{DensityMatrix, HermitianOperator};
use super::spectral::SpectralDecomposition;
use super::{C64, SUPPORT_CUTOFF};

/// Largest tolerated squared weight of a σ eigenvector outside supp ρ.
const LEAK_TOL: f64 = 1e-10;

fn check_dims(sigma: &DensityMatrix, rho: &DensityMatrix) -> Result<()> {
    if sigma.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(sigma.dim(), rho.dim()));
    }
    Ok(())
}

fn support_projector(spec: &SpectralDecomposition) -> DMatrix<C64> {
    spec.projector(|x| x > SUPPORT_CUTOFF)
}

fn contained(sigma_spec: &SpectralDecomposition, rho_spec: &SpectralDecomposition) -> bool {
    let n = sigma_spec.dim();
    let outside = DMatrix::<C64>::identity(n, n) - support_projector(rho_spec);
    sigma_spec.eigenvalues.iter().enumerate().filter(|(_, &mu)| mu > SUPPORT_CUTOFF).all(|(k, _)| {
        let v = sigma_spec.eigenvectors.column(k);
        (v.adjoint() * &outside * v)[(0, 0)].re <= LEAK_TOL
    })
}

/// Whether supp σ ⊆ supp ρ, with eigenvalues ≤ 1e-12 treated as kernel.
pub fn support_contained(sigma: &DensityMatrix, rho: &DensityMatrix) -> Result<bool> {
    check_dims(sigma, rho)?;
    Ok(contained(&sigma.op().spectral(), &rho.op().spectral()))
}

/// `D(σ‖ρ) = tr[σ(log σ − log ρ)]`; `+∞` when the support condition fails.
pub fn quantum_relative_entropy(sigma: &DensityMatrix, rho: &DensityMatrix) -> Result<f64> {
    check_dims(sigma, rho)?;
    let ss = sigma.op().spectral();
    let rs = rho.op().spectral();
    if !contained(&ss, &rs) {
        return Ok(f64::INFINITY);
    }
    let neg_entropy: f64 = ss.eigenvalues.iter().filter(|&&mu| mu > SUPPORT_CUTOFF).map(|&mu| mu * mu.ln()).sum();
    let weights = rs.expectations(sigma.matrix());
    let cross: f64 = rs
        .eigenvalues
        .iter()
        .zip(weights.iter())
        .filter(|(&lambda, _)| lambda > SUPPORT_CUTOFF)
        .map(|(&lambda, &w)| w * lambda.ln())
        .sum();
    Ok(neg_entropy - cross)
}

/// `ρ^{power}` restricted to supp ρ (zero on the kernel).
fn support_power(spec: &SpectralDecomposition, power: f64) -> DMatrix<C64> {
    spec.apply(|x| (x > SUPPORT_CUTOFF).then(|| x.powf(power)))
}

/// `D_max(σ‖ρ) = log2 λ_max(ρ^{-1/2} σ ρ^{-1/2})`, in bits.
pub fn max_relative_entropy(sigma: &DensityMatrix, rho: &DensityMatrix) -> Result<f64> {
    check_dims(sigma, rho)?;
    let ss = sigma.op().spectral();
    let rs = rho.op().spectral();
    if !contained(&ss, &rs) {
        return Ok(f64::INFINITY);
    }
    let inv_sqrt = support_power(&rs, -0.5);
    let m = HermitianOperator::from_matrix_unchecked(&inv_sqrt * sigma.matrix() * &inv_sqrt);
    let top = m.spectral().eigenvalues[0];
    Ok(top.log2())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(invalid("alpha", format!("{alpha} must be a positive real")));
    }
    if alpha == 1.0 {
        return Err(invalid("alpha", "alpha = 1 is the relative entropy; use quantum_relative_entropy"));
    }
    Ok(())
}

fn trace_product(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a * b).trace().re
}

/// Petz–Rényi divergence `D_α = log tr[σ^α ρ^{1−α}] / (α − 1)`.
pub fn renyi_relative_entropy(sigma: &DensityMatrix, rho: &DensityMatrix, alpha: f64) -> Result<f64> {
    check_dims(sigma, rho)?;
    check_alpha(alpha)?;
    let ss = sigma.op().spectral();
    let rs = rho.op().spectral();
    if alpha > 1.0 && !contained(&ss, &rs) {
        return Err(Error::SupportViolation);
    }
    let q = trace_product(&support_power(&ss, alpha), &support_power(&rs, 1.0 - alpha));
    if q <= 0.0 {
        // only reachable for α < 1 with orthogonal supports
        return Ok(f64::INFINITY);
    }
    Ok(q.ln() / (alpha - 1.0))
}

/// Sandwiched Rényi divergence
/// `D̃_α = log tr[(ρ^{γ} σ ρ^{γ})^α] / (α − 1)` with `γ = (1−α)/(2α)`.
pub fn sandwiched_renyi(sigma: &DensityMatrix, rho: &DensityMatrix, alpha: f64) -> Result<f64> {
    check_dims(sigma, rho)?;
    check_alpha(alpha)?;
    let ss = sigma.op().spectral();
    let rs = rho.op().spectral();
    if alpha > 1.0 && !contained(&ss, &rs) {
        return Err(Error::SupportViolation);
    }
    let gamma = (1.0 - alpha) / (2.0 * alpha);
    let side = support_power(&rs, gamma);
    let inner = HermitianOperator::from_matrix_unchecked(&side * sigma.matrix() * &side);
    let q: f64 = inner.spectral().eigenvalues.iter().filter(|&&x| x > 0.0).map(|&x| x.powf(alpha)).sum();
    if q <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(q.ln() / (alpha - 1.0))
}

/// The optimal test of a hypothesis-testing relative entropy evaluation.
#[derive(Debug, Clone)]
pub struct NeymanPearsonTest {
    /// `0 ≤ E ≤ I` with `tr[Eσ] = 1 − ε`.
    pub test: DMatrix<C64>,
    /// Lagrange multiplier `t` of the pencil `σ − tρ` at the optimum.
    pub multiplier: f64,
    /// `min tr[Eρ]`.
    pub type_two_error: f64,
}

/// `D_h^ε(σ‖ρ) = −log min{tr[Eρ] : tr[Eσ] ≥ 1 − ε, 0 ≤ E ≤ I}`, in nats.
pub fn hypothesis_testing_relative_entropy(sigma: &DensityMatrix, rho: &DensityMatrix, eps: f64) -> Result<f64> {
    let np = neyman_pearson_test(sigma, rho, eps)?;
    Ok(-np.type_two_error.ln())
}

/// Builds the optimal test from positive eigenprojectors of `σ − tρ`.
///
/// `t ↦ tr[P₊(σ − tρ) σ]` is non-increasing; it jumps at the generalized
/// eigenvalues of the pencil `(σ, ρ)` and moves continuously in between.
/// The breakpoints bracket the crossing of `1 − ε`; bisection pins `t`, and
/// the final test mixes the projectors on either side of the crossing so the
/// constraint holds with equality.
pub fn neyman_pearson_test(sigma: &DensityMatrix, rho: &DensityMatrix, eps: f64) -> Result<NeymanPearsonTest> {
    check_dims(sigma, rho)?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid("eps", format!("{eps} is outside (0, 1)")));
    }
    let ss = sigma.op().spectral();
    let rs = rho.op().spectral();
    if !contained(&ss, &rs) {
        return Err(Error::SupportViolation);
    }
    let target = 1.0 - eps;
    let s = sigma.matrix();
    let r = rho.matrix();

    let positive_part = |t: f64| -> DMatrix<C64> {
        let pencil = HermitianOperator::from_matrix_unchecked(s - r * Complex::new(t, 0.0));
        let spec = pencil.spectral();
        let scale = 1.0 + t;
        spec.projector(|x| x > 1e-14 * scale)
    };
    let mass = |p: &DMatrix<C64>| trace_product(p, s);

    // generalized eigenvalues on supp ρ, largest first
    let inv_sqrt = support_power(&rs, -0.5);
    let whitened = HermitianOperator::from_matrix_unchecked(&inv_sqrt * s * &inv_sqrt);
    let mut breakpoints: Vec<f64> =
        whitened.spectral().eigenvalues.into_iter().filter(|&x| x > SUPPORT_CUTOFF).collect();
    breakpoints.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * b.abs().max(1.0));

    // walk down from the top breakpoint until the mass just above it reaches the target
    let mut hi = breakpoints.first().copied().unwrap_or(0.0) * (1.0 + 1e-9) + 1e-12;
    let mut lo = 0.0;
    for &b in &breakpoints {
        let below = b * (1.0 - 1e-12);
        if mass(&positive_part(below)) >= target {
            lo = below;
            break;
        }
        hi = below;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mass(&positive_part(mid)) >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let p_lo = positive_part(lo);
    let p_hi = positive_part(hi);
    let m_lo = mass(&p_lo);
    let m_hi = mass(&p_hi);
    let c = if m_lo - m_hi > 0.0 { ((target - m_hi) / (m_lo - m_hi)).clamp(0.0, 1.0) } else { 1.0 };
    let mut test = &p_lo * Complex::new(c, 0.0) + &p_hi * Complex::new(1.0 - c, 0.0);
    // lo = 0 leaves the support projector of σ; scale down to meet the constraint exactly
    let m = mass(&test);
    if m > target {
        test *= Complex::new(target / m, 0.0);
    }
    let beta = trace_product(&test, r);
    Ok(NeymanPearsonTest { test, multiplier: 0.5 * (lo + hi), type_two_error: beta })
}

pub fn nats_to_bits(x: f64) -> f64 {
    x / std::f64::consts::LN_2
}

pub fn bits_to_nats(x: f64) -> f64 {
    x * std::f64::consts::LN_2
}
