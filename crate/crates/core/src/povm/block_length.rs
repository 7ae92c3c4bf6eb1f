use crate::error::{invalid, Error, Result};
use crate::qmath::{quantum_relative_entropy, renyi_relative_entropy, support_contained, DensityMatrix};

/// Whether `l` satisfies the sufficient condition
/// `(1−ε/2)D − (1−ε/2)·4√2(D_{3/2}+2)·ln(2/ε)/√l − (1−ε)·ln2/l ≥ (1−ε)D`.
fn satisfies(d: f64, d32: f64, eps: f64, l: u64) -> bool {
    let lf = l as f64;
    let lhs = (1.0 - eps / 2.0) * d
        - (1.0 - eps / 2.0) * (4.0 * 2f64.sqrt() * (d32 + 2.0) / lf.sqrt()) * (2.0 / eps).ln()
        - (1.0 - eps) * std::f64::consts::LN_2 / lf;
    lhs >= (1.0 - eps) * d
}

/// Block length from the hypothesis-testing bound after which block
/// measurements are guaranteed to reach a `(1−ε)` fraction of `D(σ‖ρ)` per
/// copy. Sufficient, usually far from the true minimum.
pub fn sufficient_block_length(rho: &DensityMatrix, sigma: &DensityMatrix, eps: f64) -> Result<u64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid("eps", format!("{eps} is outside (0, 1)")));
    }
    if !support_contained(sigma, rho)? {
        return Err(Error::SupportViolation);
    }
    let d = quantum_relative_entropy(sigma, rho)?;
    if !(d > 0.0) {
        return Err(Error::NoChange);
    }
    let d32 = renyi_relative_entropy(sigma, rho, 1.5)?;
    sufficient_block_length_from(d, d32, eps)
}

/// [`sufficient_block_length`] from precomputed `D` and `D_{3/2}` (nats).
pub fn sufficient_block_length_from(d: f64, d32: f64, eps: f64) -> Result<u64> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::NoChange);
    }
    if !d32.is_finite() || d32 < 0.0 {
        return Err(invalid("d32", format!("{d32} is not a finite divergence")));
    }
    let mut hi: u64 = 1;
    while !satisfies(d, d32, eps, hi) {
        if hi > u64::MAX / 4 {
            return Err(invalid("eps", "bound exceeds 64-bit block lengths"));
        }
        hi *= 2;
    }
    let mut lo = hi / 2;
    // invariant: lo fails (or is 0), hi satisfies
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if satisfies(d, d32, eps, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schur::CanonicalPair;
    use std::f64::consts::PI;

    #[test]
    fn monotone_in_eps() {
        let (rho, sigma) = CanonicalPair::new(0.9, 0.9, PI / 4.0).unwrap().states();
        let mut last = u64::MAX;
        for eps in [0.05, 0.1, 0.2, 0.4, 0.8] {
            let l = sufficient_block_length(&rho, &sigma, eps).unwrap();
            assert!(l <= last);
            last = l;
        }
    }

    #[test]
    fn monotone_in_renyi() {
        let a = sufficient_block_length_from(0.5, 0.6, 0.1).unwrap();
        let b = sufficient_block_length_from(0.5, 1.6, 0.1).unwrap();
        assert!(b >= a);
    }

    #[test]
    fn minimal() {
        let l = sufficient_block_length_from(0.5, 0.6, 0.1).unwrap();
        assert!(satisfies(0.5, 0.6, 0.1, l) && !satisfies(0.5, 0.6, 0.1, l - 1));
    }

    #[test]
    fn canonical_regression() {
        let (rho, sigma) = CanonicalPair::new(0.9, 0.9, PI / 4.0).unwrap().states();
        let l = sufficient_block_length(&rho, &sigma, 0.1).unwrap();
        assert_eq!(l, CANONICAL_EPS_01);
    }

    const CANONICAL_EPS_01: u64 = 5_240_465;

    #[test]
    fn errors() {
        let rho = DensityMatrix::maximally_mixed(2);
        assert!(matches!(sufficient_block_length(&rho, &rho, 0.1), Err(Error::NoChange)));
        assert!(sufficient_block_length(&rho, &rho, 0.0).is_err());
        let pure = DensityMatrix::diagonal(&[1.0, 0.0]).unwrap();
        let other = DensityMatrix::diagonal(&[0.0, 1.0]).unwrap();
        assert!(matches!(sufficient_block_length(&pure, &other, 0.1), Err(Error::SupportViolation)));
    }
}
