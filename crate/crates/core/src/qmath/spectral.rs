use nalgebra::{Complex, DMatrix, DVector};

use super::operator::HermitianOperator;
use super::C64;

/// Eigen-decomposition of a Hermitian operator.
///
/// Eigenvalues are sorted in descending order; each eigenvector column is
/// rephased so its first component of modulus above `PHASE_TOL` is real and
/// positive. For a given input the output is bit-stable.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<C64>,
}

const PHASE_TOL: f64 = 1e-10;

pub fn spectral_decompose(op: &HermitianOperator) -> SpectralDecomposition {
    let n = op.dim();
    let eig = op.matrix().clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    // stable sort keeps the solver's order among exact ties
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let mut values = Vec::with_capacity(n);
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        values.push(eig.eigenvalues[src]);
        let v = eig.eigenvectors.column(src);
        let phase =
            v.iter().find(|c| c.norm() > PHASE_TOL).map(|c| c.conj() / c.norm()).unwrap_or(Complex::new(1.0, 0.0));
        for row in 0..n {
            vectors[(row, col)] = v[row] * phase;
        }
    }
    SpectralDecomposition { eigenvalues: values, eigenvectors: vectors }
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `Σ f(λ_k) v_k v_k†`, skipping eigenvalues for which `f` returns `None`.
    pub fn apply(&self, f: impl Fn(f64) -> Option<f64>) -> DMatrix<C64> {
        let n = self.dim();
        let mut out = DMatrix::zeros(n, n);
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            if let Some(fx) = f(lambda) {
                let v = self.eigenvectors.column(k);
                out += (v * v.adjoint()) * Complex::new(fx, 0.0);
            }
        }
        out
    }

    pub fn reconstruct(&self) -> DMatrix<C64> {
        self.apply(Some)
    }

    /// Projector onto the span of eigenvectors whose eigenvalue satisfies `keep`.
    pub fn projector(&self, keep: impl Fn(f64) -> bool) -> DMatrix<C64> {
        self.apply(|x| keep(x).then_some(1.0))
    }

    /// Diagonal of `V† X V`: expectation values of `x` in each eigenvector.
    pub fn expectations(&self, x: &DMatrix<C64>) -> DVector<f64> {
        let n = self.dim();
        DVector::from_fn(n, |k, _| {
            let v = self.eigenvectors.column(k);
            (v.adjoint() * x * v)[(0, 0)].re
        })
    }

    /// `V† X V` in the eigenbasis.
    pub fn to_eigenbasis(&self, x: &DMatrix<C64>) -> DMatrix<C64> {
        self.eigenvectors.adjoint() * x * &self.eigenvectors
    }

    pub fn from_eigenbasis(&self, x: &DMatrix<C64>) -> DMatrix<C64> {
        &self.eigenvectors * x * self.eigenvectors.adjoint()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pauli_x() -> HermitianOperator {
        let z = Complex::new(0.0, 0.0);
        let o = Complex::new(1.0, 0.0);
        HermitianOperator::new(DMatrix::from_row_slice(2, 2, &[z, o, o, z])).unwrap()
    }

    #[test]
    fn identity_eigenvalues() {
        let s = spectral_decompose(&HermitianOperator::identity(2));
        assert_eq!(s.eigenvalues, vec![1.0, 1.0]);
    }

    #[test]
    fn diagonal_is_sorted() {
        let s = spectral_decompose(&HermitianOperator::from_real_diagonal(&[0.1, 0.9]));
        assert_eq!(s.eigenvalues, vec![0.9, 0.1]);
        assert!((s.eigenvectors[(1, 0)].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pauli_x_eigenpairs() {
        let s = spectral_decompose(&pauli_x());
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((s.eigenvalues[1] + 1.0).abs() < 1e-14);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        // first component real positive, so (1, 1)/√2 and (1, -1)/√2
        assert!((s.eigenvectors[(0, 0)] - Complex::new(h, 0.0)).norm() < 1e-14);
        assert!((s.eigenvectors[(1, 0)] - Complex::new(h, 0.0)).norm() < 1e-14);
        assert!((s.eigenvectors[(0, 1)] - Complex::new(h, 0.0)).norm() < 1e-14);
        assert!((s.eigenvectors[(1, 1)] - Complex::new(-h, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn deterministic_output() {
        let a = spectral_decompose(&pauli_x());
        let b = spectral_decompose(&pauli_x());
        assert_eq!(a.eigenvalues, b.eigenvalues);
        assert_eq!(a.eigenvectors, b.eigenvectors);
    }
}
