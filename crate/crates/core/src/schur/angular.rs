use nalgebra::{Complex, DMatrix};

use crate::qmath::C64;

/// Angular momentum operators of spin `j = two_j / 2` in the `|j,m⟩` basis,
/// ordered by descending `m`, with Condon–Shortley (real, positive) ladder
/// matrix elements.
pub struct SpinOperators {
    pub jx: DMatrix<C64>,
    pub jy: DMatrix<C64>,
    pub jz: DMatrix<C64>,
    pub j_plus: DMatrix<C64>,
}

pub fn spin_operators(two_j: u32) -> SpinOperators {
    let n = two_j as usize + 1;
    let j = two_j as f64 / 2.0;
    let m_of = |a: usize| j - a as f64;
    let mut j_plus = DMatrix::<C64>::zeros(n, n);
    for a in 1..n {
        let m = m_of(a);
        j_plus[(a - 1, a)] = Complex::new((j * (j + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
    }
    let j_minus = j_plus.adjoint();
    let jx = (&j_plus + &j_minus) * Complex::new(0.5, 0.0);
    let jy = (&j_plus - &j_minus) * Complex::new(0.0, -0.5);
    let jz = DMatrix::from_fn(n, n, |a, b| if a == b { Complex::new(m_of(a), 0.0) } else { Complex::new(0.0, 0.0) });
    SpinOperators { jx, jy, jz, j_plus }
}
