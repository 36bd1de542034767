//! Cancellation-free building blocks for the closed-form expressions.

use num_complex::Complex64 as C64;

const SERIES_RADIUS: f64 = 2.0;
const SERIES_TERMS: usize = 40;

/// `e^z − 1` without loss of precision for small `|z|`.
pub fn expm1(z: C64) -> C64 {
    if z.norm() < 0.5 {
        phi(1, z) * z
    } else {
        z.exp() - 1.0
    }
}

/// `φ_k(z) = Σ_{j≥0} z^j / (j+k)!`, so that `φ_0 = e^z`,
/// `φ_1 = (e^z − 1)/z`, `φ_2 = (e^z − 1 − z)/z²`, and so on.
pub fn phi(k: usize, z: C64) -> C64 {
    if z.norm() < SERIES_RADIUS {
        let mut inv_fact = 1.0;
        for j in 2..=k {
            inv_fact /= j as f64;
        }
        let mut term = C64::new(inv_fact, 0.0);
        let mut sum = term;
        for j in 1..SERIES_TERMS {
            term = term * z / (j + k) as f64;
            sum += term;
        }
        sum
    } else {
        let mut val = z.exp();
        let mut inv_fact = 1.0;
        for j in 1..=k {
            val = (val - inv_fact) / z;
            inv_fact /= j as f64;
        }
        val
    }
}

/// `1 − sin(x)/x`.
pub fn one_minus_sinc(x: f64) -> f64 {
    if x.abs() < 0.5 {
        // x²/3! − x⁴/5! + ...
        let x2 = x * x;
        let mut term = x2 / 6.0;
        let mut sum = term;
        for j in 1..12 {
            term *= -x2 / (((2 * j + 2) * (2 * j + 3)) as f64);
            sum += term;
        }
        sum
    } else {
        1.0 - x.sin() / x
    }
}
