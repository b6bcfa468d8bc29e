//! Conic and affine exponential families and their Legendre calculus.
//!
//! Every density has the canonical form `p(x; θ) = exp(⟨θ, t(x)⟩ − F(θ))`
//! with zero carrier term. Natural parameters are flat coordinate vectors:
//!
//! | family        | coordinates                                           | Θ                          |
//! |---------------|-------------------------------------------------------|----------------------------|
//! | categorical   | θᵢ = log(pᵢ/p₀), i = 1..m                             | ℝᵐ                         |
//! | bernoulli     | θ = log(p₁/p₀)                                        | ℝ                          |
//! | gaussian      | v = Σ⁻¹μ, then the packed lower triangle of M = −½Σ⁻¹ | M negative definite        |
//! | laplace       | θ = −1/σ                                              | θ < 0                      |
//! | wishart       | packed lower triangle of θ¹ = −½S⁻¹, then θ² = (n−d−1)/2 | θ¹ negative definite, θ² > −1 |
//!
//! Gradients are the true partial derivatives in these coordinates, so an
//! off-diagonal packed entry carries twice the corresponding matrix moment.
//! See [`crate::linalg`] for the packing order.

mod source;

pub use source::{DistributionJson, SourceParameter};

use crate::error::{Error, Result};
use crate::linalg::{
    dim_from_packed, pack_dual, pack_lower, packed_len, spd_condition, unpack_dual, unpack_lower,
    Matrix, SpdFactor, Vector,
};
use crate::special::{ln_multigamma, log_sum_exp, multidigamma, multitrigamma};
use std::f64::consts::PI;
use std::fmt;

/// Largest accepted condition number of the Gaussian precision matrix.
pub const MAX_CONDITION: f64 = 1e12;

const WISHART_NEWTON_MAX_ITER: usize = 200;
const WISHART_NEWTON_TOL: f64 = 1e-10;

/// One of the five supported exponential families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Categorical over m + 1 outcomes.
    Categorical { m: usize },
    Bernoulli,
    /// Multivariate normal in dimension d.
    Gaussian { d: usize },
    /// Zero-centered Laplace.
    Laplace,
    /// Wishart over d×d positive-definite matrices.
    Wishart { d: usize },
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Categorical { m } => write!(f, "categorical(m={m})"),
            Family::Bernoulli => write!(f, "bernoulli"),
            Family::Gaussian { d } => write!(f, "gaussian(d={d})"),
            Family::Laplace => write!(f, "laplace"),
            Family::Wishart { d } => write!(f, "wishart(d={d})"),
        }
    }
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Categorical { .. } => "categorical",
            Family::Bernoulli => "bernoulli",
            Family::Gaussian { .. } => "gaussian",
            Family::Laplace => "laplace",
            Family::Wishart { .. } => "wishart",
        }
    }

    /// Number of natural coordinates.
    pub fn dim(&self) -> usize {
        match *self {
            Family::Categorical { m } => m,
            Family::Bernoulli | Family::Laplace => 1,
            Family::Gaussian { d } => d + packed_len(d),
            Family::Wishart { d } => packed_len(d) + 1,
        }
    }

    /// Recovers the family from its name and a coordinate count.
    pub fn from_name_and_dim(name: &str, n: usize) -> Result<Family> {
        let bad = || Error::InvalidArgument(format!("{n} coordinates do not fit family {name}"));
        let fam = match name {
            "categorical" if n >= 1 => Family::Categorical { m: n },
            "bernoulli" if n == 1 => Family::Bernoulli,
            "laplace" if n == 1 => Family::Laplace,
            "gaussian" => {
                let d = (1..=n).find(|&d| d + packed_len(d) == n).ok_or_else(bad)?;
                Family::Gaussian { d }
            }
            "wishart" if n >= 2 => {
                let d = dim_from_packed(n - 1).filter(|&d| d >= 1).ok_or_else(bad)?;
                Family::Wishart { d }
            }
            "categorical" | "bernoulli" | "laplace" | "wishart" => return Err(bad()),
            other => return Err(Error::InvalidArgument(format!("unknown family '{other}'"))),
        };
        Ok(fam)
    }

    /// True for families whose support is the real line (interval machinery applies).
    pub fn is_univariate_continuous(&self) -> bool {
        matches!(self, Family::Gaussian { d: 1 } | Family::Laplace)
    }

    /// Natural space is all of ℝⁿ.
    pub fn is_affine(&self) -> bool {
        matches!(self, Family::Categorical { .. } | Family::Bernoulli)
    }

    /// Length of a support point as accepted by [`Family::log_density`].
    pub fn support_dim(&self) -> usize {
        match *self {
            Family::Categorical { .. } | Family::Bernoulli | Family::Laplace => 1,
            Family::Gaussian { d } => d,
            Family::Wishart { d } => packed_len(d),
        }
    }

    /// Builds a natural parameter, checking length and domain.
    pub fn parameter(&self, coords: Vec<f64>) -> Result<NaturalParameter> {
        if coords.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: coords.len(),
            });
        }
        if let Some(detail) = self.domain_violation(&coords) {
            return Err(Error::OutOfDomain {
                family: self.name(),
                detail,
            });
        }
        Ok(NaturalParameter {
            family: *self,
            coords,
        })
    }

    pub fn in_domain(&self, coords: &[f64]) -> bool {
        coords.len() == self.dim() && self.domain_violation(coords).is_none()
    }

    /// Reason why `coords` is outside the open natural parameter space, if it is.
    fn domain_violation(&self, c: &[f64]) -> Option<String> {
        if let Some(i) = c.iter().position(|x| !x.is_finite()) {
            return Some(format!("coordinate {i} is not finite ({})", c[i]));
        }
        match *self {
            Family::Categorical { .. } | Family::Bernoulli => None,
            Family::Laplace => (c[0] >= 0.0).then(|| format!("θ = {} must be negative", c[0])),
            Family::Gaussian { d } => {
                let precision = unpack_lower(&c[d..], d) * -2.0;
                spd_violation(&precision, "−2M", true)
            }
            Family::Wishart { d } => {
                let k = packed_len(d);
                let neg = unpack_lower(&c[..k], d) * -1.0;
                if let Some(v) = spd_violation(&neg, "−θ¹", false) {
                    return Some(v);
                }
                (c[k] <= -1.0).then(|| format!("θ² = {} must exceed −1 (n > d − 1)", c[k]))
            }
        }
    }

    fn check(&self, theta: &NaturalParameter) -> Result<()> {
        if theta.family != *self {
            return Err(Error::FamilyMismatch {
                left: self.to_string(),
                right: theta.family.to_string(),
            });
        }
        Ok(())
    }

    /// Log-normalizer F(θ).
    pub fn log_normalizer(&self, theta: &NaturalParameter) -> Result<f64> {
        self.check(theta)?;
        let c = &theta.coords;
        Ok(match *self {
            Family::Categorical { .. } | Family::Bernoulli => {
                log_sum_exp(std::iter::once(0.0).chain(c.iter().copied()))
            }
            Family::Laplace => (-2.0 / c[0]).ln(),
            Family::Gaussian { d } => {
                let g = GaussianView::new(d, c)?;
                let df = d as f64;
                0.5 * df * (2.0 * PI).ln() - 0.5 * g.precision.log_det + 0.5 * g.v.dot(&g.mean)
            }
            Family::Wishart { d } => {
                let w = WishartView::new(d, c)?;
                -w.a * w.neg_theta1.log_det + ln_multigamma(d, w.a)
            }
        })
    }

    /// Gradient ∇F(θ), i.e. the expectation parameters E[t(x)].
    pub fn grad_log_normalizer(&self, theta: &NaturalParameter) -> Result<Vec<f64>> {
        self.check(theta)?;
        let c = &theta.coords;
        Ok(match *self {
            Family::Categorical { .. } | Family::Bernoulli => {
                let f = log_sum_exp(std::iter::once(0.0).chain(c.iter().copied()));
                c.iter().map(|t| (t - f).exp()).collect()
            }
            Family::Laplace => vec![-1.0 / c[0]],
            Family::Gaussian { d } => {
                let g = GaussianView::new(d, c)?;
                let second = g.covariance() + &g.mean * g.mean.transpose();
                let mut out: Vec<f64> = g.mean.iter().copied().collect();
                out.extend(pack_dual(&second));
                out
            }
            Family::Wishart { d } => {
                let w = WishartView::new(d, c)?;
                let mean = w.neg_theta1.inverse() * w.a;
                let mut out = pack_dual(&mean);
                out.push(-w.neg_theta1.log_det + multidigamma(d, w.a));
                out
            }
        })
    }

    /// Hessian ∇²F(θ). Analytic for the discrete families and Laplace,
    /// central differences of the analytic gradient otherwise.
    pub fn hessian_log_normalizer(&self, theta: &NaturalParameter) -> Result<Matrix> {
        let n = self.dim();
        match *self {
            Family::Categorical { .. } | Family::Bernoulli => {
                let eta = self.grad_log_normalizer(theta)?;
                let mut h = Matrix::zeros(n, n);
                for i in 0..n {
                    for j in 0..n {
                        h[(i, j)] = if i == j { eta[i] } else { 0.0 } - eta[i] * eta[j];
                    }
                }
                Ok(h)
            }
            Family::Laplace => {
                self.check(theta)?;
                let t = theta.coords[0];
                Ok(Matrix::from_element(1, 1, 1.0 / (t * t)))
            }
            Family::Gaussian { .. } | Family::Wishart { .. } => {
                let mut h = Matrix::zeros(n, n);
                for j in 0..n {
                    let step = 1e-6 * (1.0 + theta.coords[j].abs());
                    let mut plus = theta.coords.clone();
                    let mut minus = theta.coords.clone();
                    plus[j] += step;
                    minus[j] -= step;
                    let gp = self.grad_log_normalizer(&self.parameter(plus)?)?;
                    let gm = self.grad_log_normalizer(&self.parameter(minus)?)?;
                    for i in 0..n {
                        h[(i, j)] = (gp[i] - gm[i]) / (2.0 * step);
                    }
                }
                Ok((&h + h.transpose()) * 0.5)
            }
        }
    }

    /// Inverse gradient (∇F)⁻¹(η): the natural parameter with expectation `eta`.
    pub fn inv_grad_log_normalizer(&self, eta: &[f64]) -> Result<NaturalParameter> {
        if eta.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: eta.len(),
            });
        }
        let invalid = |detail: String| Error::InvalidExpectation {
            family: self.name(),
            detail,
        };
        if eta.iter().any(|x| !x.is_finite()) {
            return Err(invalid("non-finite entry".into()));
        }
        let coords = match *self {
            Family::Categorical { .. } | Family::Bernoulli => {
                let total: f64 = eta.iter().sum();
                let p0 = 1.0 - total;
                if eta.iter().any(|&e| e <= 0.0) || p0 <= 0.0 {
                    return Err(invalid(format!(
                        "probabilities must lie in the open simplex (sum {total})"
                    )));
                }
                eta.iter().map(|e| (e / p0).ln()).collect()
            }
            Family::Laplace => {
                if eta[0] <= 0.0 {
                    return Err(invalid(format!("E|x| = {} must be positive", eta[0])));
                }
                vec![-1.0 / eta[0]]
            }
            Family::Gaussian { d } => {
                let mean = Vector::from_column_slice(&eta[..d]);
                let second = unpack_dual(&eta[d..], d);
                let cov = second - &mean * mean.transpose();
                let f = SpdFactor::new(&cov)
                    .map_err(|e| invalid(format!("implied covariance: {e}")))?;
                let precision = f.inverse();
                let v = &precision * &mean;
                let mut out: Vec<f64> = v.iter().copied().collect();
                out.extend(pack_lower(&(precision * -0.5)));
                out
            }
            Family::Wishart { d } => wishart_inverse_gradient(d, eta).map_err(invalid)?,
        };
        self.parameter(coords)
    }

    /// Sufficient statistic t(x) at a support point.
    pub fn sufficient_statistic(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.support_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.support_dim(),
                got: x.len(),
            });
        }
        let outside = || Error::InvalidArgument(format!("{x:?} is outside the support of {self}"));
        Ok(match *self {
            Family::Categorical { m } => {
                let k = category_index(x[0], m).ok_or_else(outside)?;
                let mut t = vec![0.0; m];
                if k > 0 {
                    t[k - 1] = 1.0;
                }
                t
            }
            Family::Bernoulli => {
                let k = category_index(x[0], 1).ok_or_else(outside)?;
                vec![k as f64]
            }
            Family::Laplace => vec![x[0].abs()],
            Family::Gaussian { d } => {
                let xv = Vector::from_column_slice(x);
                let mut t = x.to_vec();
                t.extend(pack_dual(&(&xv * xv.transpose())));
                debug_assert_eq!(t.len(), self.dim());
                let _ = d;
                t
            }
            Family::Wishart { d } => {
                let m = unpack_lower(x, d);
                let f = SpdFactor::new(&m).map_err(|_| outside())?;
                let mut t = pack_dual(&m);
                t.push(f.log_det);
                t
            }
        })
    }

    /// log p(x; θ).
    pub fn log_density(&self, theta: &NaturalParameter, x: &[f64]) -> Result<f64> {
        let t = self.sufficient_statistic(x)?;
        let f = self.log_normalizer(theta)?;
        let dot: f64 = theta.coords.iter().zip(&t).map(|(a, b)| a * b).sum();
        Ok(dot - f)
    }

    /// p(x; θ) with respect to the Lebesgue or counting measure.
    pub fn density_at(&self, theta: &NaturalParameter, x: &[f64]) -> Result<f64> {
        Ok(self.log_density(theta, x)?.exp())
    }
}

fn category_index(x: f64, m: usize) -> Option<usize> {
    (x >= 0.0 && x.fract() == 0.0 && x <= m as f64).then_some(x as usize)
}

fn spd_violation(m: &Matrix, name: &str, check_condition: bool) -> Option<String> {
    if !crate::linalg::is_symmetric(m, 1e-12) {
        return Some(format!("{name} is not symmetric"));
    }
    if let Err(e) = SpdFactor::new(m) {
        return Some(format!("{name} is {e}"));
    }
    if check_condition {
        let cond = spd_condition(m);
        if cond > MAX_CONDITION {
            return Some(format!("{name} has condition number {cond:e} above {MAX_CONDITION:e}"));
        }
    }
    None
}

struct GaussianView {
    v: Vector,
    precision: SpdFactor,
    mean: Vector,
}

impl GaussianView {
    fn new(d: usize, c: &[f64]) -> Result<Self> {
        let precision_m = unpack_lower(&c[d..], d) * -2.0;
        let precision = SpdFactor::new(&precision_m).map_err(|e| Error::OutOfDomain {
            family: "gaussian",
            detail: format!("−2M is {e}"),
        })?;
        let v = Vector::from_column_slice(&c[..d]);
        let mean = precision.solve(&v);
        Ok(GaussianView { v, precision, mean })
    }

    fn covariance(&self) -> Matrix {
        self.precision.inverse()
    }
}

struct WishartView {
    neg_theta1: SpdFactor,
    a: f64,
}

impl WishartView {
    fn new(d: usize, c: &[f64]) -> Result<Self> {
        let k = packed_len(d);
        let neg = unpack_lower(&c[..k], d) * -1.0;
        let neg_theta1 = SpdFactor::new(&neg).map_err(|e| Error::OutOfDomain {
            family: "wishart",
            detail: format!("−θ¹ is {e}"),
        })?;
        if c[k] <= -1.0 {
            return Err(Error::OutOfDomain {
                family: "wishart",
                detail: format!("θ² = {} must exceed −1", c[k]),
            });
        }
        Ok(WishartView {
            neg_theta1,
            a: c[k] + (d as f64 + 1.0) / 2.0,
        })
    }
}

/// Inverse gradient for the Wishart family.
///
/// With a = θ² + (d+1)/2 the gradient is (a·(−θ¹)⁻¹, ψ_d(a) − log|−θ¹|).
/// Eliminating θ¹ leaves the scalar equation ψ_d(a) − d·log a = η² − log|E[X]|,
/// whose left side increases strictly from −∞ to 0 on a > (d−1)/2. It is
/// solved by a damped Newton iteration kept inside a shrinking bracket.
fn wishart_inverse_gradient(d: usize, eta: &[f64]) -> std::result::Result<Vec<f64>, String> {
    let k = packed_len(d);
    let mean = unpack_dual(&eta[..k], d);
    let mean_f = SpdFactor::new(&mean).map_err(|e| format!("E[X] is {e}"))?;
    let df = d as f64;
    let target = eta[k] - mean_f.log_det;
    if target >= 0.0 {
        return Err(format!(
            "E[log|X|] − log|E[X]| = {target} must be negative (Jensen)"
        ));
    }
    let h = |a: f64| multidigamma(d, a) - df * a.ln() - target;
    let lower_limit = (df - 1.0) / 2.0;
    // bracket [lo, hi] with h(lo) < 0 < h(hi)
    let mut lo = lower_limit + 1e-300_f64.max(1e-12 * (1.0 + lower_limit));
    let mut hi = (lower_limit + 1.0).max(1.0);
    while h(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e300 {
            return Err("no root for the shape parameter".into());
        }
    }
    let mut a = 0.5 * (lo + hi);
    let mut settled = false;
    for _ in 0..WISHART_NEWTON_MAX_ITER {
        let r = h(a);
        if r == 0.0 {
            settled = true;
            break;
        }
        if r < 0.0 {
            lo = a;
        } else {
            hi = a;
        }
        let slope = multitrigamma(d, a) - df / a;
        let mut next = a - r / slope;
        // damping: fall back to bisection when Newton leaves the bracket
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let step = (next - a).abs();
        a = next;
        if step <= 4.0 * f64::EPSILON * a {
            settled = true;
            break;
        }
    }
    let residual = h(a).abs();
    if !settled || residual > WISHART_NEWTON_TOL {
        return Err(format!(
            "Newton solve for the shape parameter did not converge (residual {residual:e})"
        ));
    }
    let theta1 = mean_f.inverse() * (-a);
    let mut out = pack_lower(&theta1);
    out.push(a - (df + 1.0) / 2.0);
    Ok(out)
}

/// A point θ of a family's natural parameter space.
#[derive(Debug, Clone, PartialEq)]
pub struct NaturalParameter {
    family: Family,
    coords: Vec<f64>,
}

impl NaturalParameter {
    pub fn new(family: Family, coords: Vec<f64>) -> Result<Self> {
        family.parameter(coords)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    pub fn log_normalizer(&self) -> Result<f64> {
        self.family.log_normalizer(self)
    }

    pub fn grad_log_normalizer(&self) -> Result<Vec<f64>> {
        self.family.grad_log_normalizer(self)
    }

    pub fn log_density(&self, x: &[f64]) -> Result<f64> {
        self.family.log_density(self, x)
    }

    pub fn density_at(&self, x: &[f64]) -> Result<f64> {
        self.family.density_at(self, x)
    }

    /// λθ, domain-checked.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        self.family
            .parameter(self.coords.iter().map(|c| lambda * c).collect())
    }

    /// aθ_p + bθ_q, domain-checked.
    pub fn combine(a: f64, p: &Self, b: f64, q: &Self) -> Result<Self> {
        if p.family != q.family {
            return Err(Error::FamilyMismatch {
                left: p.family.to_string(),
                right: q.family.to_string(),
            });
        }
        p.family.parameter(
            p.coords
                .iter()
                .zip(&q.coords)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        )
    }

    /// ∫ p(x; θ)^γ dx = exp(F(γθ) − γF(θ)).
    pub fn power_integral(&self, gamma: f64) -> Result<f64> {
        if !(gamma > 0.0) {
            return Err(Error::InvalidExponent(format!("power γ = {gamma} must be positive")));
        }
        let scaled = self.scaled(gamma)?;
        Ok((scaled.log_normalizer()? - gamma * self.log_normalizer()?).exp())
    }

    /// Natural parameter θ/α of the escort distribution ∝ p^{1/α}.
    pub fn escort(&self, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::InvalidExponent(format!("escort exponent α = {alpha} must be positive")));
        }
        self.scaled(1.0 / alpha)
    }

    /// Max-norm distance between coordinate vectors.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::ln_gamma;

    fn bern(t: f64) -> NaturalParameter {
        Family::Bernoulli.parameter(vec![t]).unwrap()
    }

    #[test]
    fn trivial_log_normalizers() {
        assert!((bern(0.0).log_normalizer().unwrap() - 2f64.ln()).abs() < 1e-15);
        let cat = Family::Categorical { m: 2 }.parameter(vec![0.0, 0.0]).unwrap();
        assert!((cat.log_normalizer().unwrap() - 3f64.ln()).abs() < 1e-15);
        let lap = Family::Laplace.parameter(vec![-1.0]).unwrap();
        assert!((lap.log_normalizer().unwrap() - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn wishart_d1_log_normalizer() {
        let w = Family::Wishart { d: 1 }.parameter(vec![-0.5, 0.5]).unwrap();
        let expect = 1.5 * 2f64.ln() + ln_gamma(1.5);
        assert!((w.log_normalizer().unwrap() - expect).abs() < 1e-14);
        assert!((w.log_normalizer().unwrap() - 0.918_938_533_204_672_7).abs() < 1e-12);
    }

    #[test]
    fn trivial_gradients() {
        assert!((bern(0.0).grad_log_normalizer().unwrap()[0] - 0.5).abs() < 1e-15);
        let lap = Family::Laplace.parameter(vec![-1.0]).unwrap();
        assert_eq!(lap.grad_log_normalizer().unwrap(), vec![1.0]);
    }

    #[test]
    fn trivial_inverse_gradients() {
        let t = Family::Bernoulli.inv_grad_log_normalizer(&[0.5]).unwrap();
        assert!(t.coords()[0].abs() < 1e-15);
        let c = Family::Categorical { m: 2 }
            .inv_grad_log_normalizer(&[1.0 / 3.0, 1.0 / 3.0])
            .unwrap();
        assert!(c.coords().iter().all(|x| x.abs() < 1e-15));
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(
            Family::Laplace.parameter(vec![0.0]),
            Err(Error::OutOfDomain { family: "laplace", .. })
        ));
        assert!(Family::Gaussian { d: 1 }.parameter(vec![0.0, 0.5]).is_err());
        assert!(Family::Wishart { d: 1 }.parameter(vec![-0.5, -1.0]).is_err());
        assert!(Family::Wishart { d: 1 }.parameter(vec![-0.5, -0.9]).is_ok());
        assert!(matches!(
            Family::Bernoulli.parameter(vec![0.0, 1.0]),
            Err(Error::DimensionMismatch { expected: 1, got: 2 })
        ));
        // ill-conditioned precision
        let err = Family::Gaussian { d: 2 }
            .parameter(vec![0.0, 0.0, -0.5, 0.0, -0.5e-13])
            .unwrap_err();
        assert!(err.to_string().contains("condition"));
        assert!(Family::Bernoulli.inv_grad_log_normalizer(&[1.0]).is_err());
        assert!(Family::Laplace.inv_grad_log_normalizer(&[-1.0]).is_err());
    }

    #[test]
    fn power_integral_trivial() {
        let b = bern(0.0);
        assert!((b.power_integral(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((b.power_integral(2.0).unwrap() - 0.5).abs() < 1e-15);
        let g = Family::Gaussian { d: 1 }.parameter(vec![0.0, -0.5]).unwrap();
        assert!((g.power_integral(2.0).unwrap() - 0.5 / PI.sqrt()).abs() < 1e-15);
        assert!(b.power_integral(0.0).is_err());
    }

    #[test]
    fn escort_examples() {
        let b = bern(9f64.ln());
        let e = b.escort(2.0).unwrap();
        assert!((e.coords()[0] - 3f64.ln()).abs() < 1e-15);
        assert_eq!(b.escort(1.0).unwrap(), b);
        // direct normalization of p^{1/2}: (√0.1, √0.9) / sum
        let (a, c) = (0.1f64.sqrt(), 0.9f64.sqrt());
        let p1 = c / (a + c);
        assert!((e.grad_log_normalizer().unwrap()[0] - p1).abs() < 1e-15);
        assert!((p1 - 0.75).abs() < 1e-15);
    }

    #[test]
    fn categorical_density_sums_to_one() {
        let f = Family::Categorical { m: 3 };
        let t = f.parameter(vec![0.3, -1.2, 2.0]).unwrap();
        let s: f64 = (0..=3).map(|k| t.density_at(&[k as f64]).unwrap()).sum();
        assert!((s - 1.0).abs() < 1e-15);
        assert!(t.density_at(&[4.0]).is_err());
        assert!(t.density_at(&[0.5]).is_err());
    }

    #[test]
    fn from_name_and_dim() {
        assert_eq!(Family::from_name_and_dim("gaussian", 2).unwrap(), Family::Gaussian { d: 1 });
        assert_eq!(Family::from_name_and_dim("gaussian", 5).unwrap(), Family::Gaussian { d: 2 });
        assert_eq!(Family::from_name_and_dim("wishart", 4).unwrap(), Family::Wishart { d: 2 });
        assert!(Family::from_name_and_dim("gaussian", 3).is_err());
        assert!(Family::from_name_and_dim("poisson", 1).is_err());
    }

    #[test]
    fn hessian_matches_gradient_differences() {
        let t = Family::Categorical { m: 2 }.parameter(vec![0.4, -0.3]).unwrap();
        let h = Family::Categorical { m: 2 }.hessian_log_normalizer(&t).unwrap();
        for j in 0..2 {
            let step = 1e-6;
            let mut a = t.coords().to_vec();
            let mut b = t.coords().to_vec();
            a[j] += step;
            b[j] -= step;
            let ga = Family::Categorical { m: 2 }.parameter(a).unwrap().grad_log_normalizer().unwrap();
            let gb = Family::Categorical { m: 2 }.parameter(b).unwrap().grad_log_normalizer().unwrap();
            for i in 0..2 {
                assert!(((ga[i] - gb[i]) / (2.0 * step) - h[(i, j)]).abs() < 1e-8);
            }
        }
    }
}
