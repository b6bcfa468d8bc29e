//! Definition-level divergences: exact sums on finite supports and adaptive
//! quadrature on the real line. Nothing here uses a log-normalizer, which
//! makes these routines an independent reference for the closed forms.
//!
//! Densities need not be normalized; every divergence is computed through
//! its projective form so rescaling either argument leaves it unchanged.

use crate::error::{Error, Result};
use crate::family::{Family, NaturalParameter};
use crate::quadrature::{integrate_with_breaks, QuadSettings};
use crate::special::log_sum_exp;
use std::fmt;
use std::sync::Arc;

pub use crate::quadrature::{integrate as quadrature, Quadrature};

/// Tolerance on 1/α + 1/β = 1.
pub const CONJUGACY_TOL: f64 = 1e-12;
/// Relative tolerance of the equality test p^α ∝ q^β.
pub const TIGHTNESS_TOL: f64 = 1e-8;

/// Which side of Hölder's inequality an exponent pair lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// α, β > 1: ∫pq ≤ ‖p‖_α ‖q‖_β.
    Forward,
    /// 0 < α < 1 (β < 0), or the mirrored case: the inequality reverses.
    Reverse,
}

/// Conjugate Hölder exponents, 1/α + 1/β = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjugatePair {
    alpha: f64,
    beta: f64,
}

impl ConjugatePair {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !alpha.is_finite() || !beta.is_finite() || alpha == 0.0 || beta == 0.0 {
            return Err(Error::InvalidExponent(format!("α = {alpha}, β = {beta} must be finite and nonzero")));
        }
        let gap = 1.0 / alpha + 1.0 / beta - 1.0;
        if gap.abs() > CONJUGACY_TOL {
            return Err(Error::InvalidExponent(format!(
                "1/α + 1/β = {} is not 1 (α = {alpha}, β = {beta})",
                1.0 + gap
            )));
        }
        if alpha * beta < 0.0 || alpha > 1.0 {
            Ok(ConjugatePair { alpha, beta })
        } else {
            Err(Error::InvalidExponent(format!("α = {alpha}, β = {beta} is not a conjugate pair")))
        }
    }

    /// Forward-regime pair (α, α/(α−1)); requires α > 1.
    pub fn forward(alpha: f64) -> Result<Self> {
        if !(alpha > 1.0) || !alpha.is_finite() {
            return Err(Error::InvalidExponent(format!("α = {alpha} must be a finite number > 1")));
        }
        Ok(ConjugatePair {
            alpha,
            beta: conjugate_exponent(alpha),
        })
    }

    /// Pair (α, α/(α−1)) in either regime; α ∉ {0, 1}.
    pub fn conjugate(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha == 0.0 || alpha == 1.0 {
            return Err(Error::InvalidExponent(format!("α = {alpha} has no finite conjugate")));
        }
        Ok(ConjugatePair {
            alpha,
            beta: conjugate_exponent(alpha),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// (β, α).
    pub fn swapped(&self) -> Self {
        ConjugatePair {
            alpha: self.beta,
            beta: self.alpha,
        }
    }

    pub fn regime(&self) -> Regime {
        if self.alpha > 1.0 && self.beta > 1.0 {
            Regime::Forward
        } else {
            Regime::Reverse
        }
    }

    fn require_forward(&self) -> Result<()> {
        match self.regime() {
            Regime::Forward => Ok(()),
            Regime::Reverse => Err(Error::InvalidExponent(format!(
                "α = {} lies in the reverse regime; this operation needs α > 1",
                self.alpha
            ))),
        }
    }
}

/// ᾱ = α/(α−1).
pub fn conjugate_exponent(alpha: f64) -> f64 {
    alpha / (alpha - 1.0)
}

/// Nonnegative weights over a finite support, not necessarily normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDensity {
    weights: Vec<f64>,
}

impl DiscreteDensity {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "discrete density entry {i} is {}; entries must be finite and ≥ 0",
                weights[i]
            )));
        }
        if !weights.iter().any(|w| *w > 0.0) {
            return Err(Error::InvalidArgument("discrete density has no positive entry".into()));
        }
        Ok(DiscreteDensity { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

type LogDensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A nonnegative function on an interval, given by its logarithm
/// (−∞ where it vanishes). Break points flag kinks and peaks for the
/// integrator; `sup` is the supremum when known.
#[derive(Clone)]
pub struct Density1D {
    log_eval: LogDensityFn,
    lo: f64,
    hi: f64,
    breaks: Vec<f64>,
    sup: Option<f64>,
}

impl fmt::Debug for Density1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Density1D")
            .field("support", &(self.lo, self.hi))
            .field("breaks", &self.breaks)
            .field("sup", &self.sup)
            .finish()
    }
}

impl Density1D {
    pub fn new(log_eval: impl Fn(f64) -> f64 + Send + Sync + 'static, lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(Error::InvalidArgument(format!("support [{lo}, {hi}] is empty")));
        }
        Ok(Density1D {
            log_eval: Arc::new(log_eval),
            lo,
            hi,
            breaks: Vec::new(),
            sup: None,
        })
    }

    pub fn with_breaks(mut self, breaks: impl IntoIterator<Item = f64>) -> Self {
        self.breaks.extend(breaks);
        self.breaks.sort_by(f64::total_cmp);
        self.breaks.dedup();
        self
    }

    pub fn with_sup(mut self, sup: f64) -> Self {
        self.sup = Some(sup);
        self
    }

    pub fn log_eval(&self, x: f64) -> f64 {
        if x < self.lo || x > self.hi {
            f64::NEG_INFINITY
        } else {
            (self.log_eval)(x)
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.log_eval(x).exp()
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn sup(&self) -> Option<f64> {
        self.sup
    }
}

/// Argument of the definition-level divergences.
#[derive(Debug, Clone)]
pub enum Density {
    Discrete(DiscreteDensity),
    Continuous(Density1D),
}

impl Density {
    pub fn discrete(weights: Vec<f64>) -> Result<Self> {
        Ok(Density::Discrete(DiscreteDensity::new(weights)?))
    }

    /// The density of a family member: the probability vector for
    /// categorical/Bernoulli, a function on ℝ (or (0, ∞)) for univariate
    /// Gaussian, Laplace and 1×1 Wishart.
    pub fn from_natural(theta: &NaturalParameter) -> Result<Self> {
        let fam = theta.family();
        match fam {
            Family::Categorical { m } => {
                let w = (0..=m)
                    .map(|k| theta.density_at(&[k as f64]))
                    .collect::<Result<Vec<_>>>()?;
                Density::discrete(w)
            }
            Family::Bernoulli => {
                let w = vec![theta.density_at(&[0.0])?, theta.density_at(&[1.0])?];
                Density::discrete(w)
            }
            Family::Gaussian { d: 1 } => {
                let c = theta.coords();
                let var = -0.5 / c[1];
                let mu = c[0] * var;
                let sd = var.sqrt();
                let th = theta.clone();
                let f = Density1D::new(
                    move |x| th.log_density(&[x]).unwrap_or(f64::NEG_INFINITY),
                    f64::NEG_INFINITY,
                    f64::INFINITY,
                )?
                .with_breaks(STD_OFFSETS.iter().map(|k| mu + k * sd))
                .with_sup(1.0 / (2.0 * std::f64::consts::PI * var).sqrt());
                Ok(Density::Continuous(f))
            }
            Family::Laplace => {
                let scale = -1.0 / theta.coords()[0];
                let th = theta.clone();
                let f = Density1D::new(
                    move |x| th.log_density(&[x]).unwrap_or(f64::NEG_INFINITY),
                    f64::NEG_INFINITY,
                    f64::INFINITY,
                )?
                .with_breaks(STD_OFFSETS.iter().map(|k| k * scale))
                .with_sup(0.5 / scale);
                Ok(Density::Continuous(f))
            }
            Family::Wishart { d: 1 } => {
                // p(x) ∝ x^{θ²} e^{θ¹ x} on (0, ∞)
                let c = theta.coords();
                let (t1, t2) = (c[0], c[1]);
                let rate = -t1;
                let shape = t2 + 1.0;
                let mean = shape / rate;
                let sd = shape.sqrt() / rate;
                let sup = if t2 > 0.0 {
                    let mode = t2 / rate;
                    Some(theta.density_at(&[mode])?)
                } else if t2 == 0.0 {
                    Some((-theta.log_normalizer()?).exp())
                } else {
                    None
                };
                let th = theta.clone();
                let mut f = Density1D::new(
                    move |x| {
                        if x > 0.0 {
                            th.log_density(&[x]).unwrap_or(f64::NEG_INFINITY)
                        } else {
                            f64::NEG_INFINITY
                        }
                    },
                    0.0,
                    f64::INFINITY,
                )?
                .with_breaks(
                    STD_OFFSETS
                        .iter()
                        .map(|k| mean + k * sd)
                        .filter(|x| *x > 0.0)
                        .chain([mean * 1e-3, mean * 1e-2, mean * 0.1]),
                );
                if let Some(s) = sup {
                    f = f.with_sup(s);
                }
                Ok(Density::Continuous(f))
            }
            other => Err(Error::InvalidArgument(format!(
                "the definition-level oracle handles finite supports and univariate densities, not {other}"
            ))),
        }
    }

    /// λ·p for λ > 0.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidArgument(format!("scale factor {lambda} must be positive")));
        }
        Ok(match self {
            Density::Discrete(d) => Density::discrete(d.weights.iter().map(|w| w * lambda).collect())?,
            Density::Continuous(c) => {
                let inner = c.log_eval.clone();
                let shift = lambda.ln();
                Density::Continuous(Density1D {
                    log_eval: Arc::new(move |x| inner(x) + shift),
                    lo: c.lo,
                    hi: c.hi,
                    breaks: c.breaks.clone(),
                    sup: c.sup.map(|s| s * lambda),
                })
            }
        })
    }

    /// Total mass ∫p.
    pub fn mass(&self) -> Result<f64> {
        Ok(log_integral(&[(self, 1.0)])?.exp())
    }

    /// sup p (the largest entry for discrete densities).
    pub fn sup(&self) -> Result<f64> {
        match self {
            Density::Discrete(d) => Ok(d.weights.iter().copied().fold(0.0, f64::max)),
            Density::Continuous(c) => c
                .sup
                .ok_or_else(|| Error::UnboundedDensity("density has no known finite supremum".into())),
        }
    }
}

const STD_OFFSETS: [f64; 11] = [-16.0, -8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0, 16.0];

/// log ∫ Π_k f_k^{e_k}. Factors with exponent 0 are ignored; a zero value
/// under a negative exponent is an error.
pub fn log_integral(factors: &[(&Density, f64)]) -> Result<f64> {
    let factors: Vec<(&Density, f64)> = factors.iter().copied().filter(|(_, e)| *e != 0.0).collect();
    if factors.is_empty() {
        return Err(Error::InvalidArgument("integrand has no factors".into()));
    }
    match factors[0].0 {
        Density::Discrete(first) => {
            let n = first.weights.len();
            let mut ws = Vec::with_capacity(factors.len());
            for (d, e) in &factors {
                match d {
                    Density::Discrete(dd) if dd.weights.len() == n => ws.push((&dd.weights, *e)),
                    Density::Discrete(dd) => {
                        return Err(Error::DimensionMismatch {
                            expected: n,
                            got: dd.weights.len(),
                        })
                    }
                    Density::Continuous(_) => {
                        return Err(Error::InvalidArgument("cannot mix discrete and continuous densities".into()))
                    }
                }
            }
            let mut terms = Vec::with_capacity(n);
            for i in 0..n {
                let mut s = 0.0;
                for (w, e) in &ws {
                    let x = w[i];
                    if x == 0.0 {
                        if *e < 0.0 {
                            return Err(Error::InvalidArgument(format!(
                                "entry {i} is zero but carries the negative exponent {e}"
                            )));
                        }
                        s = f64::NEG_INFINITY;
                        break;
                    }
                    s += e * x.ln();
                }
                terms.push(s);
            }
            let l = log_sum_exp(terms);
            if l == f64::NEG_INFINITY {
                return Err(Error::DegenerateIntegral("sum is zero".into()));
            }
            if !l.is_finite() {
                return Err(Error::DegenerateIntegral(format!("log-sum is {l}")));
            }
            Ok(l)
        }
        Density::Continuous(_) => {
            let mut cs = Vec::with_capacity(factors.len());
            for (d, e) in &factors {
                match d {
                    Density::Continuous(c) => cs.push((c, *e)),
                    Density::Discrete(_) => {
                        return Err(Error::InvalidArgument("cannot mix discrete and continuous densities".into()))
                    }
                }
            }
            let lo = cs.iter().map(|(c, _)| c.lo).fold(f64::NEG_INFINITY, f64::max);
            let hi = cs.iter().map(|(c, _)| c.hi).fold(f64::INFINITY, f64::min);
            if !(lo < hi) {
                return Err(Error::DegenerateIntegral("supports do not overlap".into()));
            }
            let mut breaks: Vec<f64> = cs.iter().flat_map(|(c, _)| c.breaks.iter().copied()).collect();
            breaks.sort_by(f64::total_cmp);
            breaks.dedup();
            let log_integrand = |x: f64| -> f64 {
                let mut s = 0.0;
                for (c, e) in &cs {
                    let l = c.log_eval(x);
                    if l == f64::NEG_INFINITY {
                        return if *e > 0.0 { f64::NEG_INFINITY } else { f64::INFINITY };
                    }
                    s += e * l;
                }
                s
            };
            // rescale by the largest value at the break points so that the
            // relative tolerance applies to a quantity of order one
            let shift = breaks
                .iter()
                .filter(|b| **b > lo && **b < hi)
                .map(|b| log_integrand(*b))
                .filter(|v| v.is_finite())
                .fold(f64::NEG_INFINITY, f64::max);
            let shift = if shift.is_finite() { shift } else { 0.0 };
            let q = integrate_with_breaks(
                |x| (log_integrand(x) - shift).exp(),
                lo,
                hi,
                &breaks,
                &QuadSettings::default(),
            )?;
            if !(q.value > 0.0) {
                return Err(Error::DegenerateIntegral(format!("integral evaluated to {}", q.value)));
            }
            Ok(q.value.ln() + shift)
        }
    }
}

/// Hölder pseudo-divergence −log(∫pq / (‖p‖_α ‖q‖_β)).
pub fn hpd_direct(p: &Density, q: &Density, pair: ConjugatePair) -> Result<f64> {
    pair.require_forward()?;
    let (a, b) = (pair.alpha(), pair.beta());
    let cross = log_integral(&[(p, 1.0), (q, 1.0)])?;
    let np = log_integral(&[(p, a)])?;
    let nq = log_integral(&[(q, b)])?;
    Ok(-cross + np / a + nq / b)
}

/// Proper Hölder divergence: the pseudo-divergence between p^γ and q^γ.
pub fn hd_direct(p: &Density, q: &Density, pair: ConjugatePair, gamma: f64) -> Result<f64> {
    pair.require_forward()?;
    check_gamma(gamma)?;
    let (a, b) = (pair.alpha(), pair.beta());
    let cross = log_integral(&[(p, gamma / a), (q, gamma / b)])?;
    let np = log_integral(&[(p, gamma)])?;
    let nq = log_integral(&[(q, gamma)])?;
    Ok(-cross + np / a + nq / b)
}

/// Cauchy–Schwarz divergence, written symmetrically so that swapping the
/// arguments gives a bit-identical result.
pub fn cs_direct(p: &Density, q: &Density) -> Result<f64> {
    let cross = log_integral(&[(p, 1.0), (q, 1.0)])?;
    let np = log_integral(&[(p, 2.0)])?;
    let nq = log_integral(&[(q, 2.0)])?;
    Ok(-(cross - 0.5 * (np + nq)))
}

/// Kullback–Leibler divergence of the normalized densities; +∞ when p puts
/// mass where q vanishes.
pub fn kl_direct(p: &Density, q: &Density) -> Result<f64> {
    match (p, q) {
        (Density::Discrete(dp), Density::Discrete(dq)) => {
            if dp.weights.len() != dq.weights.len() {
                return Err(Error::DimensionMismatch {
                    expected: dp.weights.len(),
                    got: dq.weights.len(),
                });
            }
            let sp: f64 = dp.weights.iter().sum();
            let sq: f64 = dq.weights.iter().sum();
            let mut kl = 0.0;
            for (x, y) in dp.weights.iter().zip(&dq.weights) {
                if *x == 0.0 {
                    continue;
                }
                if *y == 0.0 {
                    return Ok(f64::INFINITY);
                }
                let (x, y) = (x / sp, y / sq);
                kl += x * (x / y).ln();
            }
            Ok(kl.max(0.0))
        }
        (Density::Continuous(cp), Density::Continuous(cq)) => {
            let lp = p.mass()?.ln();
            let lq = q.mass()?.ln();
            let (lo, hi) = cp.support();
            let mut breaks = cp.breaks.clone();
            breaks.extend(&cq.breaks);
            let integrand = |x: f64| {
                let a = cp.log_eval(x) - lp;
                if a == f64::NEG_INFINITY {
                    return 0.0;
                }
                let b = cq.log_eval(x) - lq;
                if b == f64::NEG_INFINITY {
                    return f64::INFINITY;
                }
                a.exp() * (a - b)
            };
            let r = integrate_with_breaks(integrand, lo, hi, &breaks, &QuadSettings::default());
            match r {
                Ok(v) => Ok(v.value.max(0.0)),
                // the integrand is +∞ where q vanishes under p
                Err(Error::DegenerateIntegral(_)) => Ok(f64::INFINITY),
                Err(e) => Err(e),
            }
        }
        _ => Err(Error::InvalidArgument("cannot mix discrete and continuous densities".into())),
    }
}

/// Skew Bhattacharyya divergence −log ∫ p^λ q^{1−λ} (in projective form).
pub fn skew_bhattacharyya_direct(p: &Density, q: &Density, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidArgument(format!("skew λ = {lambda} must lie in (0, 1)")));
    }
    let cross = log_integral(&[(p, lambda), (q, 1.0 - lambda)])?;
    let np = log_integral(&[(p, 1.0)])?;
    let nq = log_integral(&[(q, 1.0)])?;
    Ok(-cross + lambda * np + (1.0 - lambda) * nq)
}

/// Endpoint of the exponent range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Limit {
    /// α → 1⁺ (β → ∞).
    AlphaToOne,
    /// α → ∞ (β → 1⁺).
    AlphaToInf,
}

/// Limit of the pseudo-divergence at either end of the exponent range:
/// the β- (resp. α-) norm becomes the supremum norm.
pub fn hpd_limit(p: &Density, q: &Density, which: Limit) -> Result<f64> {
    let cross = log_integral(&[(p, 1.0), (q, 1.0)])?;
    Ok(match which {
        Limit::AlphaToOne => -cross + p.mass()?.ln() + q.sup()?.ln(),
        Limit::AlphaToInf => -cross + p.sup()?.ln() + q.mass()?.ln(),
    })
}

/// Outcome of [`holder_inequality_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderCheck {
    /// ∫pq / (‖p‖_α ‖q‖_β): at most 1 in the forward regime, at least 1 in the reverse one.
    pub ratio: f64,
    pub regime: Regime,
    /// p^α ∝ q^β, the equality condition.
    pub tight: bool,
}

/// Evaluates both sides of Hölder's inequality (or its reverse).
pub fn holder_inequality_check(p: &Density, q: &Density, pair: ConjugatePair) -> Result<HolderCheck> {
    let (a, b) = (pair.alpha(), pair.beta());
    let cross = log_integral(&[(p, 1.0), (q, 1.0)])?;
    let np = log_integral(&[(p, a)])?;
    let nq = log_integral(&[(q, b)])?;
    let ratio = (cross - np / a - nq / b).exp();
    let tight = match (p, q) {
        (Density::Discrete(dp), Density::Discrete(dq)) => {
            proportional(dp.weights.iter().zip(&dq.weights).map(|(x, y)| (*x, *y)), a, b)
        }
        (Density::Continuous(cp), Density::Continuous(cq)) => {
            let (lo, hi) = (cp.lo.max(cq.lo), cp.hi.min(cq.hi));
            let probes = probe_points(lo, hi, cp.breaks.iter().chain(&cq.breaks).copied());
            proportional_log(probes.iter().map(|x| (cp.log_eval(*x), cq.log_eval(*x))), a, b)
        }
        _ => unreachable!("log_integral rejects mixed arguments"),
    };
    Ok(HolderCheck {
        ratio,
        regime: pair.regime(),
        tight,
    })
}

fn proportional(pairs: impl Iterator<Item = (f64, f64)>, a: f64, b: f64) -> bool {
    proportional_log(pairs.map(|(x, y)| (x.ln(), y.ln())), a, b)
}

/// α·log p − β·log q constant (within the tolerance) wherever either side is nonzero.
fn proportional_log(pairs: impl Iterator<Item = (f64, f64)>, a: f64, b: f64) -> bool {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (lp, lq) in pairs {
        let zp = lp == f64::NEG_INFINITY;
        let zq = lq == f64::NEG_INFINITY;
        match (zp, zq) {
            (true, true) => continue,
            (true, false) | (false, true) => return false,
            (false, false) => {
                let r = a * lp - b * lq;
                lo = lo.min(r);
                hi = hi.max(r);
            }
        }
    }
    // exp(hi − lo) − 1 ≤ tol, i.e. relative spread of the ratio p^α / q^β
    hi - lo <= TIGHTNESS_TOL.ln_1p()
}

fn probe_points(lo: f64, hi: f64, breaks: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut pts: Vec<f64> = breaks.filter(|x| *x > lo && *x < hi).collect();
    let (a, b) = match (lo.is_finite(), hi.is_finite()) {
        (true, true) => (lo, hi),
        (true, false) => (lo, lo + 20.0),
        (false, true) => (hi - 20.0, hi),
        (false, false) => (-10.0, 10.0),
    };
    pts.extend((1..64).map(|i| a + (b - a) * i as f64 / 64.0));
    pts
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidExponent(format!("γ = {gamma} must be a finite positive number")))
    }
}
