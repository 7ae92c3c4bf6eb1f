use std::collections::BTreeMap;

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{invalid, Error, Result};
use crate::qmath::{DensityMatrix, HermitianOperator, C64};

use super::block::{multiplicity, Block, BlockDecomposition, BlockLabel};

/// Largest copy count the brute-force oracle accepts.
pub const MAX_ORACLE_COPIES: u32 = 6;

/// One irreducible representation found in the `2^l`-dimensional space:
/// every copy is a list of `2j+1` vectors `|j,m⟩`, descending `m`.
#[derive(Debug, Clone)]
pub struct SchurIrrep {
    pub label: BlockLabel,
    pub copies: Vec<Vec<DVector<C64>>>,
}

fn hamming(x: usize) -> u32 {
    x.count_ones()
}

/// Total raising operator `Σ_k σ⁺_k` on `l` qubits, with `|0⟩` as spin up.
fn total_raising(l: u32) -> DMatrix<C64> {
    let n = 1usize << l;
    let mut out = DMatrix::zeros(n, n);
    for col in 0..n {
        for k in 0..l {
            let bit = 1usize << k;
            if col & bit != 0 {
                out[(col & !bit, col)] = Complex::new(1.0, 0.0);
            }
        }
    }
    out
}

/// Orthonormal `|j,m⟩` bases for every irreducible representation in
/// `l` qubits, built from highest-weight vectors (kernel of `J₊` inside the
/// `J_z = j` eigenspace) and repeated application of `J₋`.
pub fn schur_basis(l: u32) -> Result<Vec<SchurIrrep>> {
    if l == 0 || l > MAX_ORACLE_COPIES {
        return Err(invalid("l", format!("brute-force oracle supports 1..={MAX_ORACLE_COPIES}, got {l}")));
    }
    let n = 1usize << l;
    let raise = total_raising(l);
    let lower = raise.adjoint();
    let mut out = Vec::new();
    for label in BlockLabel::all(l) {
        let ones = (l - label.two_j()) / 2;
        let support: Vec<usize> = (0..n).filter(|&x| hamming(x) == ones).collect();
        // J₊ restricted to the weight space, as a map into the full space
        let restricted = DMatrix::from_fn(n, support.len(), |row, c| raise[(row, support[c])]);
        let gram = HermitianOperator::new(restricted.adjoint() * &restricted)?;
        let spec = gram.spectral();
        let mut copies = Vec::new();
        for (k, &lam) in spec.eigenvalues.iter().enumerate() {
            if lam > 1e-9 {
                continue;
            }
            let mut top = DVector::zeros(n);
            for (c, &x) in support.iter().enumerate() {
                top[x] = spec.eigenvectors[(c, k)];
            }
            let j = label.j();
            let mut states = vec![top];
            for a in 1..label.dim() {
                let m = j - (a - 1) as f64;
                let norm = (j * (j + 1.0) - m * (m - 1.0)).sqrt();
                let next = &lower * &states[a - 1] / Complex::new(norm, 0.0);
                states.push(next);
            }
            copies.push(states);
        }
        let want = multiplicity(l, label.two_j())?;
        if copies.len() as u128 != want {
            return Err(invalid(
                "l",
                format!("found {} highest weights for 2j={}, expected {want}", copies.len(), label.two_j()),
            ));
        }
        out.push(SchurIrrep { label, copies });
    }
    Ok(out)
}

/// Reference block decomposition of `single^{⊗l}` from the explicit
/// `2^l`-dimensional tensor power, projected onto the first copy of each
/// irreducible representation. Blocks carry `log_scale = 0`.
pub fn brute_force_decompose(single: &DensityMatrix, l: u32) -> Result<BlockDecomposition> {
    if single.dim() != 2 {
        return Err(Error::DimensionMismatch(single.dim(), 2));
    }
    let basis = schur_basis(l)?;
    let full = single.tensor_power(l);
    let mut blocks = BTreeMap::new();
    for irrep in basis {
        let vecs = &irrep.copies[0];
        let d = vecs.len();
        let mat = DMatrix::from_fn(d, d, |a, b| (vecs[a].adjoint() * &full * &vecs[b])[(0, 0)]);
        blocks.insert(
            irrep.label,
            Block {
                operator: HermitianOperator::from_matrix_unchecked(mat),
                log_scale: 0.0,
                multiplicity: irrep.copies.len() as u128,
            },
        );
    }
    let [_, y, z] = single.bloch_vector()?;
    let r = single.bloch_vector().map(|b| (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt())?;
    Ok(BlockDecomposition { l, r, theta: (-y).atan2(z), blocks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schur::block::{block_state, rotated_block_state};
    use crate::schur::CanonicalPair;

    #[test]
    fn basis_is_orthonormal_and_complete() {
        for l in 1..=MAX_ORACLE_COPIES {
            let all: Vec<DVector<C64>> =
                schur_basis(l).unwrap().into_iter().flat_map(|i| i.copies.into_iter().flatten()).collect();
            assert_eq!(all.len(), 1 << l);
            for (a, u) in all.iter().enumerate() {
                for (b, v) in all.iter().enumerate() {
                    let ip = (u.adjoint() * v)[(0, 0)];
                    let want = if a == b { 1.0 } else { 0.0 };
                    assert!((ip - Complex::new(want, 0.0)).norm() < 1e-10, "l={l}");
                }
            }
        }
    }

    #[test]
    fn single_copy_is_the_input() {
        let s = CanonicalPair::new(0.8, 0.6, 0.9).unwrap().states().1;
        let dec = brute_force_decompose(&s, 1).unwrap();
        let b = &dec.blocks[&BlockLabel(1)];
        assert!((b.operator.matrix() - s.matrix()).iter().all(|c| c.norm() < 1e-14));
    }

    #[test]
    fn multiplicities_for_three_copies() {
        let dec = brute_force_decompose(&DensityMatrix::maximally_mixed(2), 3).unwrap();
        assert_eq!(dec.blocks[&BlockLabel(3)].multiplicity, 1);
        assert_eq!(dec.blocks[&BlockLabel(1)].multiplicity, 2);
    }

    #[test]
    fn matches_block_state_two_copies() {
        let rho = CanonicalPair::new(0.9, 0.9, 0.0).unwrap().states().0;
        let oracle = brute_force_decompose(&rho, 2).unwrap();
        assert!(block_state(0.9, 2).unwrap().max_block_diff(&oracle) < 1e-12);
    }

    #[test]
    fn matches_rotated_block_state() {
        let cases = [(0.3, 0.4), (0.9, 2.5), (0.55, -1.2), (0.99, 3.1), (0.0, 0.7), (1.0, 1.0)];
        for l in 1..=4 {
            for &(r, theta) in &cases {
                let sigma = CanonicalPair::new(0.5, r, theta).unwrap().states().1;
                let oracle = brute_force_decompose(&sigma, l).unwrap();
                let fast = rotated_block_state(r, theta, l).unwrap();
                let err = fast.max_block_diff(&oracle);
                assert!(err < 1e-10, "l={l} r={r} theta={theta}: {err}");
            }
        }
    }

    #[test]
    fn rejects_large_l() {
        assert!(brute_force_decompose(&DensityMatrix::maximally_mixed(2), 7).is_err());
    }
}
