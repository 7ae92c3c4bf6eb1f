use crate::error::{invalid, Result};
use crate::qmath::DensityMatrix;

/// A pre/post-change qubit pair in the frame where `ρ` is z-diagonal and
/// `σ` is `ρ`-like with Bloch length `r1`, rotated about the x axis by `theta`:
/// `ρ = (I + r0 σ_z)/2`, `σ = e^{−iθσ_x/2} (I + r1 σ_z)/2 e^{iθσ_x/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalPair {
    pub r0: f64,
    pub r1: f64,
    pub theta: f64,
}

impl CanonicalPair {
    pub fn new(r0: f64, r1: f64, theta: f64) -> Result<Self> {
        for (name, r) in [("r0", r0), ("r1", r1)] {
            if !(0.0..=1.0).contains(&r) {
                return Err(invalid(name, format!("{r} is outside [0, 1]")));
            }
        }
        if !theta.is_finite() {
            return Err(invalid("theta", "must be finite"));
        }
        Ok(Self { r0, r1, theta })
    }

    /// `(ρ, σ)`.
    pub fn states(&self) -> (DensityMatrix, DensityMatrix) {
        let rho = DensityMatrix::qubit_bloch([0.0, 0.0, self.r0]).expect("validated Bloch length");
        let (s, c) = self.theta.sin_cos();
        let sigma = DensityMatrix::qubit_bloch([0.0, -self.r1 * s, self.r1 * c]).expect("validated Bloch length");
        (rho, sigma)
    }

    /// Canonical parameters of an arbitrary qubit pair: Bloch lengths and
    /// the angle in `[0, π]` between the two Bloch vectors. A maximally mixed
    /// `ρ` or `σ` gives `theta = 0`.
    pub fn from_states(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<Self> {
        let a = rho.bloch_vector()?;
        let b = sigma.bloch_vector()?;
        let norm = |v: [f64; 3]| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        let (r0, r1) = (norm(a).min(1.0), norm(b).min(1.0));
        let theta = if r0 < 1e-15 || r1 < 1e-15 {
            0.0
        } else {
            let cross = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
            let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
            norm(cross).atan2(dot)
        };
        Self::new(r0, r1, theta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::{quantum_relative_entropy, DensityMatrix};

    #[test]
    fn bloch_vectors() {
        let (rho, sigma) = CanonicalPair::new(0.9, 0.7, 0.5).unwrap().states();
        let a = rho.bloch_vector().unwrap();
        let b = sigma.bloch_vector().unwrap();
        assert!(a[0].abs() < 1e-15 && a[1].abs() < 1e-15 && (a[2] - 0.9).abs() < 1e-15);
        assert!((b[1] + 0.7 * 0.5f64.sin()).abs() < 1e-15);
        assert!((b[2] - 0.7 * 0.5f64.cos()).abs() < 1e-15);
    }

    #[test]
    fn from_states_preserves_divergence() {
        let rho = DensityMatrix::qubit_bloch([0.3, -0.4, 0.5]).unwrap();
        let sigma = DensityMatrix::qubit_bloch([-0.2, 0.6, 0.1]).unwrap();
        let pair = CanonicalPair::from_states(&rho, &sigma).unwrap();
        let (cr, cs) = pair.states();
        let d0 = quantum_relative_entropy(&sigma, &rho).unwrap();
        let d1 = quantum_relative_entropy(&cs, &cr).unwrap();
        assert!((d0 - d1).abs() < 1e-12);
        assert!((0.0..=std::f64::consts::PI).contains(&pair.theta));
    }

    #[test]
    fn round_trip() {
        let pair = CanonicalPair::new(0.6, 0.8, 1.1).unwrap();
        let (rho, sigma) = pair.states();
        let back = CanonicalPair::from_states(&rho, &sigma).unwrap();
        assert!((back.r0 - 0.6).abs() < 1e-14 && (back.r1 - 0.8).abs() < 1e-14 && (back.theta - 1.1).abs() < 1e-14);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(CanonicalPair::new(1.1, 0.5, 0.0).is_err());
        assert!(CanonicalPair::new(0.5, 0.5, f64::INFINITY).is_err());
    }
}
