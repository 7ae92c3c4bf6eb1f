use std::collections::BTreeMap;

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{invalid, Error, Result};
use crate::qmath::{exp_divided_difference, frechet_derivative, HermitianOperator, C64};
use crate::schur::{BlockDecomposition, BlockLabel};

/// Solution of `sup_{ω>0} tr[σ log ω] − tr[ρ ω] + 1` over block-diagonal `ω`.
#[derive(Debug, Clone)]
pub struct VariationalResult {
    /// Per-copy value, `D_M(σ^{⊗l}‖ρ^{⊗l})/l`, in nats.
    pub value: f64,
    /// Direct sum of one `ω_j` per block label, ascending `2j`.
    pub omega: HermitianOperator,
    pub iterations: usize,
    /// Largest weighted block gradient norm at termination.
    pub grad_norm: f64,
}

#[derive(Debug, Clone)]
pub struct VariationalOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Starting `log ω_j` per block, relative to the block scale
    /// `e^{s_σ − s_ρ}`. Blocks not listed start at zero (`ω_j ∝ I`).
    pub initial_log_omega: BTreeMap<BlockLabel, HermitianOperator>,
}

impl Default for VariationalOptions {
    fn default() -> Self {
        Self { tolerance: 1e-8, max_iterations: 10_000, initial_log_omega: BTreeMap::new() }
    }
}

const HESSIAN_STEP: f64 = 1e-5;
const ARMIJO: f64 = 1e-4;
const DECREMENT_TOL: f64 = 1e-14;

fn c(x: f64) -> C64 {
    Complex::new(x, 0.0)
}

/// Orthonormal basis of n×n Hermitian matrices under `Re tr[A†B]`.
fn hermitian_basis(n: usize) -> Vec<DMatrix<C64>> {
    let mut out = Vec::with_capacity(n * n);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..n {
        let mut e = DMatrix::zeros(n, n);
        e[(i, i)] = c(1.0);
        out.push(e);
    }
    for i in 0..n {
        for k in i + 1..n {
            let mut re = DMatrix::zeros(n, n);
            re[(i, k)] = c(s);
            re[(k, i)] = c(s);
            out.push(re);
            let mut im = DMatrix::zeros(n, n);
            im[(i, k)] = Complex::new(0.0, s);
            im[(k, i)] = Complex::new(0.0, -s);
            out.push(im);
        }
    }
    out
}

fn inner(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

fn hermitian(m: DMatrix<C64>) -> HermitianOperator {
    HermitianOperator::from_matrix_unchecked(m)
}

/// One block of the concave program in `H = log ω`:
/// `g(H) = tr[S H] − tr[R e^H]`.
struct BlockProblem<'a> {
    s: &'a DMatrix<C64>,
    r: &'a DMatrix<C64>,
}

impl BlockProblem<'_> {
    fn objective(&self, h: &DMatrix<C64>) -> f64 {
        let spec = hermitian(h.clone()).spectral();
        let linear: f64 = (0..h.nrows()).map(|i| (self.s.row(i) * h.column(i))[(0, 0)].re).sum();
        let weights = spec.expectations(self.r);
        let exp_term: f64 = spec.eigenvalues.iter().zip(weights.iter()).map(|(&x, &w)| x.exp() * w).sum();
        let v = linear - exp_term;
        if v.is_finite() {
            v
        } else {
            f64::NEG_INFINITY
        }
    }

    /// `S − Dexp_H*(R)`; the Fréchet derivative of exp is self-adjoint.
    fn gradient(&self, h: &DMatrix<C64>) -> DMatrix<C64> {
        let spec = hermitian(h.clone()).spectral();
        let g = self.s - frechet_derivative(&spec, exp_divided_difference, self.r);
        (&g + g.adjoint()) * c(0.5)
    }

    fn solve(&self, mut h: DMatrix<C64>, weight: f64, opts: &VariationalOptions) -> (DMatrix<C64>, f64, usize, bool) {
        let n = h.nrows();
        let basis = hermitian_basis(n);
        let m = basis.len();
        let mut iterations = 0;
        loop {
            let grad = self.gradient(&h);
            let g = DVector::from_iterator(m, basis.iter().map(|b| inner(b, &grad)));
            let gnorm = weight * g.norm();
            if gnorm <= opts.tolerance {
                return (h, gnorm, iterations, true);
            }
            if iterations >= opts.max_iterations {
                return (h, gnorm, iterations, false);
            }
            // negated Hessian by central differences of the gradient
            let mut hess = DMatrix::<f64>::zeros(m, m);
            for (k, b) in basis.iter().enumerate() {
                let step = b * c(HESSIAN_STEP);
                let d = (self.gradient(&(&h + &step)) - self.gradient(&(&h - &step))) * c(0.5 / HESSIAN_STEP);
                for (i, bb) in basis.iter().enumerate() {
                    hess[(i, k)] = -inner(bb, &d);
                }
            }
            let hess = (&hess + hess.transpose()) * 0.5;
            let scale = hess.amax().max(f64::MIN_POSITIVE);
            let mut shift = 0.0;
            let chol = loop {
                let shifted = &hess + DMatrix::identity(m, m) * shift;
                if let Some(ch) = shifted.cholesky() {
                    break ch;
                }
                shift = if shift == 0.0 { 1e-10 * scale } else { 2.0 * shift };
            };
            let coeff = chol.solve(&g);
            let dir = basis.iter().zip(coeff.iter()).fold(DMatrix::zeros(n, n), |acc, (b, &x)| acc + b * c(x));
            let slope = coeff.dot(&g);
            // g·(−∇²)⁻¹g is twice the ascent left in the quadratic model
            if weight * slope <= DECREMENT_TOL {
                return (h, gnorm, iterations, true);
            }
            let f0 = self.objective(&h);
            let mut t = 1.0;
            let accepted = loop {
                let candidate = &h + &dir * c(t);
                let f = self.objective(&candidate);
                if f >= f0 + ARMIJO * t * slope {
                    break Some(candidate);
                }
                t *= 0.5;
                if t < 1e-20 {
                    break None;
                }
            };
            iterations += 1;
            match accepted {
                Some(next) => h = (&next + next.adjoint()) * c(0.5),
                None => return (h, gnorm, iterations, false),
            }
        }
    }
}

/// Measured relative entropy of the `l`-copy pair from the variational
/// formula, starting from `ω = I`.
pub fn variational_measured_entropy(pre: &BlockDecomposition, post: &BlockDecomposition) -> Result<VariationalResult> {
    variational_measured_entropy_with(pre, post, &VariationalOptions::default())
}

/// Variational measured relative entropy with explicit solver options.
///
/// Each block is solved in `H_j = log ω_j` by damped Newton steps with the
/// block scales factored out, so the problem stays well scaled at large `l`.
/// Returns [`Error::NotConverged`] with the best value reached if any block
/// misses the tolerance.
pub fn variational_measured_entropy_with(
    pre: &BlockDecomposition,
    post: &BlockDecomposition,
    opts: &VariationalOptions,
) -> Result<VariationalResult> {
    if pre.l != post.l {
        return Err(Error::BlockLengthMismatch(pre.l, post.l));
    }
    if pre.blocks.keys().ne(post.blocks.keys()) {
        return Err(invalid("post", "block labels differ from the pre-change decomposition"));
    }
    let mut total = 1.0;
    let mut iterations = 0;
    let mut worst = 0.0f64;
    let mut converged = true;
    let mut omegas = Vec::new();
    for (label, pb) in &pre.blocks {
        let qb = &post.blocks[label];
        if !pb.log_scale.is_finite() || !qb.log_scale.is_finite() {
            return Err(invalid("pre", "variational solver needs non-vanishing blocks (Bloch lengths below 1)"));
        }
        let min_eig = pb.operator.spectral().eigenvalues.last().copied().unwrap_or(0.0);
        if !(min_eig > 0.0) {
            return Err(invalid("pre", "pre-change blocks must be positive definite"));
        }
        let n = label.dim();
        let h0 = match opts.initial_log_omega.get(label) {
            Some(h) if h.dim() == n => h.matrix().clone(),
            Some(h) => return Err(Error::DimensionMismatch(h.dim(), n)),
            None => DMatrix::zeros(n, n),
        };
        let problem = BlockProblem { s: qb.operator.matrix(), r: pb.operator.matrix() };
        let weight = (qb.multiplicity as f64).ln() + qb.log_scale;
        let weight = weight.exp();
        let (h, gnorm, its, ok) = problem.solve(h0, weight, opts);
        iterations += its;
        worst = worst.max(gnorm);
        converged &= ok;
        let shift = qb.log_scale - pb.log_scale;
        total += weight * (problem.objective(&h) + shift * qb.operator.trace());
        omegas.push(hermitian(h).spectral().apply(|x| Some((x + shift).exp())));
    }
    let value = total / pre.l as f64;
    if !converged {
        return Err(Error::NotConverged { value, grad_norm: worst, iterations });
    }
    let dim: usize = omegas.iter().map(|o| o.nrows()).sum();
    let mut omega = DMatrix::zeros(dim, dim);
    let mut at = 0;
    for o in &omegas {
        omega.view_mut((at, at), (o.nrows(), o.nrows())).copy_from(o);
        at += o.nrows();
    }
    Ok(VariationalResult { value, omega: hermitian(omega), iterations, grad_norm: worst })
}
