//! Special functions used by the log-normalizers and interval masses.
//!
//! `erf`, `erfc` and `ln_gamma` come from `libm` (accurate to about one ulp;
//! the Lanczos-based error function in `statrs` is off by ~3e-11, too coarse
//! for 1e-10 oracle work). `digamma` comes from `statrs`. The trigamma
//! function and the multivariate variants are assembled here.

use std::f64::consts::PI;

pub use libm::{erf, erfc};
pub use statrs::function::gamma::digamma;

/// log Γ(x).
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// Trigamma ψ'(x) for x > 0: upward recurrence to x ≥ 12, then the asymptotic series.
pub fn trigamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let mut x = x;
    let mut acc = 0.0;
    while x < 12.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // Bernoulli-number coefficients B_{2k}
    let series = inv2
        * (1.0 / 6.0
            - inv2 * (1.0 / 30.0 - inv2 * (1.0 / 42.0 - inv2 * (1.0 / 30.0 - inv2 * 5.0 / 66.0))));
    acc + inv + 0.5 * inv2 + inv * series
}

/// log Γ_d(a) = d(d−1)/4 · log π + Σ_{j=1..d} log Γ(a − (j−1)/2).
pub fn ln_multigamma(d: usize, a: f64) -> f64 {
    let df = d as f64;
    let mut s = df * (df - 1.0) / 4.0 * PI.ln();
    for j in 0..d {
        s += ln_gamma(a - j as f64 / 2.0);
    }
    s
}

/// ψ_d(a) = Σ_{j=1..d} ψ(a − (j−1)/2), the derivative of `ln_multigamma` in `a`.
pub fn multidigamma(d: usize, a: f64) -> f64 {
    (0..d).map(|j| digamma(a - j as f64 / 2.0)).sum()
}

/// Derivative of [`multidigamma`] in `a`.
pub fn multitrigamma(d: usize, a: f64) -> f64 {
    (0..d).map(|j| trigamma(a - j as f64 / 2.0)).sum()
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Mass of the standard normal on [a, b], evaluated on the side of the
/// origin that avoids cancellation.
pub fn normal_interval_mass(a: f64, b: f64) -> f64 {
    if a >= b {
        return 0.0;
    }
    let s = std::f64::consts::SQRT_2;
    let mass = if a >= 0.0 {
        0.5 * (erfc(a / s) - erfc(b / s))
    } else if b <= 0.0 {
        0.5 * (erfc(-b / s) - erfc(-a / s))
    } else {
        1.0 - 0.5 * erfc(-a / s) - 0.5 * erfc(b / s)
    };
    mass.clamp(0.0, 1.0)
}

/// log(Σ exp(xᵢ)), stable for large or very negative entries.
pub fn log_sum_exp(xs: impl IntoIterator<Item = f64>) -> f64 {
    let xs: Vec<f64> = xs.into_iter().collect();
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY || !m.is_finite() {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trigamma_known_values() {
        // ψ'(1) = π²/6, ψ'(1/2) = π²/2
        assert!((trigamma(1.0) - PI * PI / 6.0).abs() < 1e-13);
        assert!((trigamma(0.5) - PI * PI / 2.0).abs() < 1e-12);
        assert!((trigamma(10.0) - 0.105_166_335_681_685_5).abs() < 1e-13);
    }

    #[test]
    fn trigamma_matches_digamma_difference() {
        for &x in &[0.3, 1.7, 4.2, 12.5, 80.0] {
            let h = 1e-5;
            let fd = (digamma(x + h) - digamma(x - h)) / (2.0 * h);
            assert!((fd - trigamma(x)).abs() < 1e-7 * trigamma(x).max(1.0), "x={x}");
        }
    }

    #[test]
    fn multigamma_reduces_to_ln_gamma() {
        assert!((ln_multigamma(1, 2.5) - ln_gamma(2.5)).abs() < 1e-15);
        // Γ_2(a) = √π Γ(a) Γ(a − 1/2)
        let a = 3.2;
        let expect = 0.5 * PI.ln() + ln_gamma(a) + ln_gamma(a - 0.5);
        assert!((ln_multigamma(2, a) - expect).abs() < 1e-13);
    }

    #[test]
    fn normal_masses() {
        assert!((normal_interval_mass(0.0, f64::INFINITY) - 0.5).abs() < 1e-15);
        assert!((normal_interval_mass(f64::NEG_INFINITY, f64::INFINITY) - 1.0).abs() < 1e-15);
        let m = normal_interval_mass(-1.0, 1.0);
        assert!((m - 0.682_689_492_137_085_9).abs() < 1e-14);
        // far tail keeps relative precision
        let t = normal_interval_mass(10.0, 11.0);
        assert!(t > 7.6e-24 && t < 7.7e-24);
    }

    #[test]
    fn lse_stable() {
        assert!((log_sum_exp([0.0, 0.0]) - 2f64.ln()).abs() < 1e-15);
        assert!((log_sum_exp([1000.0, 1000.0]) - (1000.0 + 2f64.ln())).abs() < 1e-12);
        assert_eq!(log_sum_exp(Vec::<f64>::new()), f64::NEG_INFINITY);
    }
}
