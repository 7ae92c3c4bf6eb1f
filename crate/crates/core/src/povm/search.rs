use std::f64::consts::PI;

const GRID_POINTS: usize = 64;
const ANGLE_TOL: f64 = 1e-8;

/// Golden-section search for a maximum of `f` on `[a, b]`.
pub(crate) fn golden_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Maximizes a π-periodic function over `[0, π)`: a 64-point grid followed by
/// golden-section refinement around the best grid point. Ties between grid
/// points go to the smallest angle, and the refined point replaces the grid
/// point only if strictly better.
pub(crate) fn maximize_periodic(f: impl Fn(f64) -> f64) -> (f64, f64) {
    let step = PI / GRID_POINTS as f64;
    let mut best = (0.0, f(0.0));
    for k in 1..GRID_POINTS {
        let x = k as f64 * step;
        let v = f(x);
        if v > best.1 {
            best = (x, v);
        }
    }
    let (x, v) = golden_max(&f, best.0 - step, best.0 + step, ANGLE_TOL);
    if v > best.1 {
        (x.rem_euclid(PI), v)
    } else {
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_interior_maximum() {
        let (x, v) = maximize_periodic(|x| (2.0 * (x - 1.234)).cos());
        assert!((x - 1.234).abs() < 1e-7);
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wraps_near_zero() {
        let (x, _) = maximize_periodic(|x| (2.0 * (x + 0.01)).cos());
        assert!((x - (PI - 0.01)).abs() < 1e-7, "{x}");
    }

    #[test]
    fn constant_prefers_zero() {
        assert_eq!(maximize_periodic(|_| 3.0), (0.0, 3.0));
    }
}
