use std::sync::OnceLock;

const TABLE_LEN: usize = 1025;

fn table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        // compensated running sum of ln k
        let mut out = Vec::with_capacity(TABLE_LEN);
        let (mut sum, mut carry) = (0.0f64, 0.0f64);
        out.push(0.0);
        for k in 1..TABLE_LEN {
            let y = (k as f64).ln() - carry;
            let t = sum + y;
            carry = (t - sum) - y;
            sum = t;
            out.push(sum);
        }
        out
    })
}

/// `ln(n!)` for `n ≥ 0`.
pub(crate) fn ln_factorial(n: i64) -> f64 {
    debug_assert!(n >= 0);
    let n = n as usize;
    if n < TABLE_LEN {
        return table()[n];
    }
    // Stirling series, accurate to double precision well before n = 1024
    let x = n as f64 + 1.0;
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x) - 1.0 / (360.0 * x.powi(3))
        + 1.0 / (1260.0 * x.powi(5))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_factorials() {
        assert_eq!(ln_factorial(0), 0.0);
        assert_eq!(ln_factorial(1), 0.0);
        assert!((ln_factorial(5) - 120f64.ln()).abs() < 1e-15);
        let f20: f64 = (1..=20).map(|k| k as f64).product();
        assert!((ln_factorial(20) - f20.ln()).abs() < 1e-13);
    }

    #[test]
    fn stirling_joins_table() {
        let t = ln_factorial(1024);
        let s = ln_factorial(1023) + 1024f64.ln();
        assert!((t - s).abs() / t < 1e-14);
    }
}
