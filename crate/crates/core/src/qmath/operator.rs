use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

use super::spectral::{spectral_decompose, SpectralDecomposition};
use super::{C64, HERMITIAN_TOL, SUPPORT_CUTOFF};

/// A square complex matrix equal to its conjugate transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    mat: DMatrix<C64>,
}

/// Wire form `{ "dim": n, "re": [...], "im": [...] }`, row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorJson {
    pub dim: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl HermitianOperator {
    /// Validates Hermiticity element-wise at 1e-12 and symmetrizes away the residue.
    pub fn new(mat: DMatrix<C64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch(mat.nrows(), mat.ncols()));
        }
        if mat.nrows() == 0 {
            return Err(invalid("dim", "operator must have positive dimension"));
        }
        let mut dev = 0.0f64;
        for i in 0..mat.nrows() {
            for k in i..mat.ncols() {
                let d = mat[(i, k)] - mat[(k, i)].conj();
                if !d.re.is_finite() || !d.im.is_finite() {
                    return Err(Error::NotHermitian(f64::INFINITY));
                }
                dev = dev.max(d.re.abs()).max(d.im.abs());
            }
        }
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self::from_matrix_unchecked(mat))
    }

    /// Symmetrizes `mat` without checking how far from Hermitian it was.
    pub(crate) fn from_matrix_unchecked(mat: DMatrix<C64>) -> Self {
        let sym = (&mat + mat.adjoint()) * Complex::new(0.5, 0.0);
        Self { mat: sym }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut mat = DMatrix::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            mat[(i, i)] = Complex::new(d, 0.0);
        }
        Self { mat }
    }

    pub fn identity(dim: usize) -> Self {
        Self { mat: DMatrix::identity(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.mat[(i, i)].re).sum()
    }

    pub fn spectral(&self) -> SpectralDecomposition {
        spectral_decompose(self)
    }

    /// Congruence `U · self · U†`.
    pub fn conjugate_by(&self, unitary: &DMatrix<C64>) -> Self {
        Self::from_matrix_unchecked(unitary * &self.mat * unitary.adjoint())
    }

    /// Largest element-wise absolute difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.mat.iter().zip(other.mat.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> OperatorJson {
        let n = self.dim();
        let mut re = Vec::with_capacity(n * n);
        let mut im = Vec::with_capacity(n * n);
        for i in 0..n {
            for k in 0..n {
                re.push(self.mat[(i, k)].re);
                im.push(self.mat[(i, k)].im);
            }
        }
        OperatorJson { dim: n, re, im }
    }

    pub fn from_json(json: &OperatorJson) -> Result<Self> {
        let n = json.dim;
        let len = n.checked_mul(n).ok_or_else(|| invalid("dim", "dimension overflows"))?;
        if json.re.len() != len || json.im.len() != len {
            return Err(invalid(
                "re/im",
                format!("expected {len} entries each, got {} and {}", json.re.len(), json.im.len()),
            ));
        }
        let mat = DMatrix::from_fn(n, n, |i, k| Complex::new(json.re[i * n + k], json.im[i * n + k]));
        Self::new(mat)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("operator JSON is always serializable")
    }

    pub fn parse_json(text: &str) -> Result<Self> {
        let json: OperatorJson = serde_json::from_str(text)?;
        Self::from_json(&json)
    }
}

/// Positive semidefinite, unit-trace operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    op: HermitianOperator,
}

impl DensityMatrix {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let tr = op.trace();
        if !((tr - 1.0).abs() <= SUPPORT_CUTOFF) {
            return Err(Error::InvalidTrace(tr));
        }
        let spec = op.spectral();
        let min = spec.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -SUPPORT_CUTOFF {
            return Err(Error::NotPositive(min));
        }
        Ok(Self { op })
    }

    pub fn from_matrix(mat: DMatrix<C64>) -> Result<Self> {
        Self::new(HermitianOperator::new(mat)?)
    }

    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        Self::new(HermitianOperator::from_real_diagonal(probs))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let v = 1.0 / dim as f64;
        Self { op: HermitianOperator::from_real_diagonal(&vec![v; dim]) }
    }

    /// Qubit state `(I + x σx + y σy + z σz) / 2`.
    pub fn qubit_bloch(bloch: [f64; 3]) -> Result<Self> {
        let [x, y, z] = bloch;
        let len = (x * x + y * y + z * z).sqrt();
        if !len.is_finite() || len > 1.0 + 1e-12 {
            return Err(invalid("bloch", format!("length {len} exceeds 1")));
        }
        let mat = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex::new((1.0 + z) / 2.0, 0.0),
                Complex::new(x / 2.0, -y / 2.0),
                Complex::new(x / 2.0, y / 2.0),
                Complex::new((1.0 - z) / 2.0, 0.0),
            ],
        );
        Self::from_matrix(mat)
    }

    /// Bloch vector of a qubit state.
    pub fn bloch_vector(&self) -> Result<[f64; 3]> {
        if self.dim() != 2 {
            return Err(Error::DimensionMismatch(self.dim(), 2));
        }
        let m = self.op.matrix();
        Ok([2.0 * m[(0, 1)].re, -2.0 * m[(0, 1)].im, (m[(0, 0)] - m[(1, 1)]).re])
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        self.op.matrix()
    }

    /// `l`-fold tensor power. Dimension grows as dim^l; intended for small oracles.
    pub fn tensor_power(&self, l: u32) -> DMatrix<C64> {
        let mut acc = DMatrix::from_element(1, 1, Complex::new(1.0, 0.0));
        for _ in 0..l {
            acc = acc.kronecker(self.matrix());
        }
        acc
    }
}
