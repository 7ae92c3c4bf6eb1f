use nalgebra::{Complex, DMatrix};

use crate::qmath::C64;

use super::lgamma::ln_factorial;

/// Largest half-angle at which the explicit sum is evaluated directly.
/// Larger angles are halved until below this and the matrix is squared back.
const DIRECT_ANGLE: f64 = 0.06;

/// Wigner small-d matrix `d^j(θ) = e^{−iθJ_y}` in the `|j,m⟩` basis with
/// rows and columns ordered by descending `m` (index 0 is `m = j`).
///
/// The x-axis rotation used by block measurements differs from it only by
/// diagonal phases, `⟨m'|e^{−iθJ_x}|m⟩ = i^{m'−m} d^j_{m'm}(θ)`; see
/// [`WignerD::x_rotation`].
#[derive(Debug, Clone, PartialEq)]
pub struct WignerD {
    pub two_j: u32,
    pub theta: f64,
    pub entries: DMatrix<f64>,
}

impl WignerD {
    pub fn dim(&self) -> usize {
        self.two_j as usize + 1
    }

    /// `e^{−iθJ_x}` as a complex unitary.
    pub fn x_rotation(&self) -> DMatrix<C64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |a, b| {
            // m' − m = b − a for descending ordering
            let phase = match (b as i64 - a as i64).rem_euclid(4) {
                0 => Complex::new(1.0, 0.0),
                1 => Complex::new(0.0, 1.0),
                2 => Complex::new(-1.0, 0.0),
                _ => Complex::new(0.0, -1.0),
            };
            phase * self.entries[(a, b)]
        })
    }
}

/// Builds `d^j(θ)` from Wigner's explicit sum.
///
/// Terms are accumulated as `sign · exp(log-magnitude)` with log-factorials.
/// The alternating sum cancels badly near θ = π/2 for large j, so the angle
/// is halved `k` times to below 0.06 rad, where the sum is well conditioned,
/// and the result is squared `k` times (`d(2θ) = d(θ)²`).
pub fn wigner_d(two_j: u32, theta: f64) -> WignerD {
    let n = two_j as usize + 1;
    let entries = if theta == 0.0 {
        DMatrix::identity(n, n)
    } else {
        let mut halvings = 0;
        let mut angle = theta;
        while angle.abs() > DIRECT_ANGLE {
            angle *= 0.5;
            halvings += 1;
        }
        let mut d = explicit_sum(two_j, angle);
        for _ in 0..halvings {
            d = &d * &d;
        }
        d
    };
    WignerD { two_j, theta, entries }
}

fn explicit_sum(two_j: u32, theta: f64) -> DMatrix<f64> {
    let tj = two_j as i64;
    let n = two_j as usize + 1;
    let (s, c) = (0.5 * theta).sin_cos();
    let (ln_c, ln_s) = (c.abs().ln(), s.abs().ln());
    let mut out = DMatrix::zeros(n, n);
    for a in 0..n {
        // 2m' = tj − 2a, so j + m' = tj − a and j − m' = a
        let j_plus_mp = tj - a as i64;
        let j_minus_mp = a as i64;
        for b in 0..n {
            let j_plus_m = tj - b as i64;
            let j_minus_m = b as i64;
            let mp_minus_m = j_plus_mp - j_plus_m;
            let pref = 0.5
                * (ln_factorial(j_plus_mp)
                    + ln_factorial(j_minus_mp)
                    + ln_factorial(j_plus_m)
                    + ln_factorial(j_minus_m));
            let lo = 0.max(-mp_minus_m);
            let hi = j_plus_m.min(j_minus_mp);
            let mut acc = 0.0;
            for k in lo..=hi {
                let cos_pow = j_plus_m + j_minus_mp - 2 * k;
                let sin_pow = mp_minus_m + 2 * k;
                if (c == 0.0 && cos_pow > 0) || (s == 0.0 && sin_pow > 0) {
                    continue;
                }
                let mut ln_mag = pref
                    - ln_factorial(j_plus_m - k)
                    - ln_factorial(k)
                    - ln_factorial(mp_minus_m + k)
                    - ln_factorial(j_minus_mp - k);
                if cos_pow > 0 {
                    ln_mag += cos_pow as f64 * ln_c;
                }
                if sin_pow > 0 {
                    ln_mag += sin_pow as f64 * ln_s;
                }
                let mut negative = (mp_minus_m + k).rem_euclid(2) == 1;
                if c < 0.0 && cos_pow % 2 == 1 {
                    negative = !negative;
                }
                if s < 0.0 && sin_pow % 2 == 1 {
                    negative = !negative;
                }
                let term = ln_mag.exp();
                acc += if negative { -term } else { term };
            }
            out[(a, b)] = acc;
        }
    }
    out
}
