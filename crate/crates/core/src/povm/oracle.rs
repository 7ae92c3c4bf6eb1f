use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::qmath::{kl_raw, DensityMatrix};

use super::search::golden_max;

fn norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Orthonormal pair spanning a plane that contains both vectors.
fn plane_basis(a: [f64; 3], b: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let unit = |v: [f64; 3]| {
        let n = norm(v);
        [v[0] / n, v[1] / n, v[2] / n]
    };
    let e1 = if norm(a) > 1e-14 {
        unit(a)
    } else if norm(b) > 1e-14 {
        unit(b)
    } else {
        [0.0, 0.0, 1.0]
    };
    let other = if norm(a) > 1e-14 { b } else { [1.0, 0.0, 0.0] };
    let along = dot(other, e1);
    let perp = [other[0] - along * e1[0], other[1] - along * e1[1], other[2] - along * e1[2]];
    let e2 = if norm(perp) > 1e-14 {
        unit(perp)
    } else {
        // collinear: any direction orthogonal to e1
        let pick = if e1[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let along = dot(pick, e1);
        unit([pick[0] - along * e1[0], pick[1] - along * e1[1], pick[2] - along * e1[2]])
    };
    (e1, e2)
}

/// Classical KL of the two-outcome projective measurement along `n`.
pub(crate) fn axis_kl(rho: [f64; 3], sigma: [f64; 3], n: [f64; 3]) -> f64 {
    let (a, b) = (dot(rho, n), dot(sigma, n));
    kl_raw(&[(1.0 + b) / 2.0, (1.0 - b) / 2.0], &[(1.0 + a) / 2.0, (1.0 - a) / 2.0])
}

/// Best single-copy rank-1 projective measurement, found by sweeping the
/// measurement axis over `grid_size` angles in `[0, π)` within the plane of
/// the two Bloch vectors and refining the best point by golden section.
pub fn grid_oracle_single_copy(rho: &DensityMatrix, sigma: &DensityMatrix, grid_size: usize) -> Result<f64> {
    if rho.dim() != 2 || sigma.dim() != 2 {
        return Err(Error::DimensionMismatch(rho.dim().max(sigma.dim()), 2));
    }
    if grid_size < 3 {
        return Err(invalid("grid_size", "need at least 3 grid points"));
    }
    let (a, b) = (rho.bloch_vector()?, sigma.bloch_vector()?);
    let (e1, e2) = plane_basis(a, b);
    let f = |phi: f64| {
        let (s, c) = phi.sin_cos();
        axis_kl(a, b, [c * e1[0] + s * e2[0], c * e1[1] + s * e2[1], c * e1[2] + s * e2[2]])
    };
    let step = PI / grid_size as f64;
    let mut best = (0.0, f(0.0));
    for k in 1..grid_size {
        let v = f(k as f64 * step);
        if v > best.1 {
            best = (k as f64 * step, v);
        }
    }
    if best.1.is_infinite() {
        return Ok(best.1);
    }
    let (_, refined) = golden_max(&f, best.0 - step, best.0 + step, 1e-10);
    Ok(best.1.max(refined))
}
