//! Closed-form Hölder divergences for families whose natural parameter
//! space is a cone or an affine space.
//!
//! Every formula is a signed sum of log-normalizer values at linear
//! combinations of θ_p and θ_q. Each combination is checked for domain
//! membership before F is evaluated, so a failure names the combination at
//! fault instead of surfacing as a NaN.

use crate::error::{Error, Result};
use crate::family::{Family, NaturalParameter, SourceParameter};
use crate::oracle::ConjugatePair;

/// Results in [−NOISE_FLOOR, 0) are rounding noise and reported as 0.
pub const NOISE_FLOOR: f64 = 1e-10;

/// F(aθ_p + bθ_q), with the combination checked against the domain first.
fn f_at(a: f64, p: &NaturalParameter, b: f64, q: &NaturalParameter, label: impl FnOnce() -> String) -> Result<f64> {
    let fam = same_family(p, q)?;
    let coords: Vec<f64> = p
        .coords()
        .iter()
        .zip(q.coords())
        .map(|(x, y)| a * x + b * y)
        .collect();
    match fam.parameter(coords) {
        Ok(theta) => theta.log_normalizer(),
        Err(Error::OutOfDomain { family, detail }) => Err(Error::CombinationOutOfDomain {
            family,
            combination: label(),
            detail,
        }),
        Err(e) => Err(e),
    }
}

/// F(aθ).
fn f_scaled(a: f64, p: &NaturalParameter, label: impl FnOnce() -> String) -> Result<f64> {
    f_at(a, p, 0.0, p, label)
}

fn same_family(p: &NaturalParameter, q: &NaturalParameter) -> Result<Family> {
    if p.family() != q.family() {
        return Err(Error::FamilyMismatch {
            left: p.family().to_string(),
            right: q.family().to_string(),
        });
    }
    Ok(p.family())
}

fn require_forward(pair: ConjugatePair) -> Result<(f64, f64)> {
    if pair.alpha() > 1.0 && pair.beta() > 1.0 {
        Ok((pair.alpha(), pair.beta()))
    } else {
        Err(Error::InvalidExponent(format!(
            "closed forms need α > 1, got α = {}",
            pair.alpha()
        )))
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidExponent(format!("γ = {gamma} must be a finite positive number")))
    }
}

/// Clamps floating-point noise below zero; larger negatives signal misuse.
fn nonnegative(v: f64) -> Result<f64> {
    if v >= 0.0 {
        Ok(v)
    } else if v >= -NOISE_FLOOR {
        Ok(0.0)
    } else if v.is_nan() {
        Err(Error::DegenerateIntegral("divergence evaluated to NaN".into()))
    } else {
        Err(Error::NegativeDivergence(v))
    }
}

/// (1/α)F(aθ_p) + (1/β)F(bθ_q) − F(cθ_p + dθ_q): the shape shared by the
/// pseudo-divergence and the proper divergence.
fn holder_kernel(
    p: &NaturalParameter,
    q: &NaturalParameter,
    alpha: f64,
    beta: f64,
    scales: [f64; 4],
) -> Result<f64> {
    let [a, b, c, d] = scales;
    let fp = f_scaled(a, p, || format!("{a}·θp"))?;
    let fq = f_scaled(b, q, || format!("{b}·θq"))?;
    let fm = f_at(c, p, d, q, || format!("{c}·θp + {d}·θq"))?;
    Ok(fp / alpha + fq / beta - fm)
}

fn hpd_raw(p: &NaturalParameter, q: &NaturalParameter, pair: ConjugatePair) -> Result<f64> {
    let (alpha, beta) = require_forward(pair)?;
    holder_kernel(p, q, alpha, beta, [alpha, beta, 1.0, 1.0])
}

fn hd_raw(p: &NaturalParameter, q: &NaturalParameter, pair: ConjugatePair, gamma: f64) -> Result<f64> {
    let (alpha, beta) = require_forward(pair)?;
    check_gamma(gamma)?;
    holder_kernel(p, q, alpha, beta, [gamma, gamma, gamma / alpha, gamma / beta])
}

/// Hölder pseudo-divergence (1/α)F(αθ_p) + (1/β)F(βθ_q) − F(θ_p + θ_q).
pub fn hpd_closed(p: &NaturalParameter, q: &NaturalParameter, pair: ConjugatePair) -> Result<f64> {
    nonnegative(hpd_raw(p, q, pair)?)
}

/// Proper Hölder divergence (1/α)F(γθ_p) + (1/β)F(γθ_q) − F(γθ_p/α + γθ_q/β).
pub fn hd_closed(p: &NaturalParameter, q: &NaturalParameter, pair: ConjugatePair, gamma: f64) -> Result<f64> {
    nonnegative(hd_raw(p, q, pair, gamma)?)
}

/// Cauchy–Schwarz divergence: the pseudo-divergence at α = 2, which is also
/// the proper divergence at α = γ = 2 (same arithmetic, hence bit-equal).
pub fn cs_closed(p: &NaturalParameter, q: &NaturalParameter) -> Result<f64> {
    nonnegative(holder_kernel(p, q, 2.0, 2.0, [2.0, 2.0, 1.0, 1.0])?)
}

/// Arithmetic mean of the pseudo-divergence in both directions.
pub fn sym_hpd_closed(p: &NaturalParameter, q: &NaturalParameter, pair: ConjugatePair) -> Result<f64> {
    let (alpha, beta) = require_forward(pair)?;
    let fpa = f_scaled(alpha, p, || format!("{alpha}·θp"))?;
    let fpb = f_scaled(beta, p, || format!("{beta}·θp"))?;
    let fqa = f_scaled(alpha, q, || format!("{alpha}·θq"))?;
    let fqb = f_scaled(beta, q, || format!("{beta}·θq"))?;
    let fm = f_at(1.0, p, 1.0, q, || "θp + θq".into())?;
    nonnegative(0.5 * ((fpa + fqa) / alpha + (fpb + fqb) / beta) - fm)
}

/// Arithmetic mean of the proper divergence in both directions; invariant
/// under α ↔ ᾱ.
pub fn sym_hd_closed(p: &NaturalParameter, q: &NaturalParameter, pair: ConjugatePair, gamma: f64) -> Result<f64> {
    let (alpha, beta) = require_forward(pair)?;
    check_gamma(gamma)?;
    let (s, t) = (gamma / alpha, gamma / beta);
    let fp = f_scaled(gamma, p, || format!("{gamma}·θp"))?;
    let fq = f_scaled(gamma, q, || format!("{gamma}·θq"))?;
    let m1 = f_at(s, p, t, q, || format!("{s}·θp + {t}·θq"))?;
    let m2 = f_at(t, p, s, q, || format!("{t}·θp + {s}·θq"))?;
    nonnegative(0.5 * ((fp + fq) - (m1 + m2)))
}

/// Skew Bhattacharyya divergence λF(θ_p) + (1−λ)F(θ_q) − F(λθ_p + (1−λ)θ_q).
pub fn skew_bhattacharyya_closed(p: &NaturalParameter, q: &NaturalParameter, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidArgument(format!("skew λ = {lambda} must lie in (0, 1)")));
    }
    same_family(p, q)?;
    let fm = f_at(lambda, p, 1.0 - lambda, q, || format!("{lambda}·θp + {}·θq", 1.0 - lambda))?;
    nonnegative(lambda * p.log_normalizer()? + (1.0 - lambda) * q.log_normalizer()? - fm)
}

/// Pseudo-divergence between the escorts θ_p/α and θ_q/β.
pub fn escort_divergence(p: &NaturalParameter, q: &NaturalParameter, pair: ConjugatePair) -> Result<f64> {
    let (alpha, beta) = require_forward(pair)?;
    hpd_closed(&p.escort(alpha)?, &q.escort(beta)?, pair)
}

/// Kullback–Leibler divergence F(θ_q) − F(θ_p) − ⟨θ_q − θ_p, ∇F(θ_p)⟩.
pub fn kl_closed(p: &NaturalParameter, q: &NaturalParameter) -> Result<f64> {
    same_family(p, q)?;
    let grad = p.grad_log_normalizer()?;
    let inner: f64 = q
        .coords()
        .iter()
        .zip(p.coords())
        .zip(&grad)
        .map(|((a, b), g)| (a - b) * g)
        .sum();
    nonnegative(q.log_normalizer()? - p.log_normalizer()? - inner)
}

/// Whether αθ_p − βθ_q lies in the natural parameter space. When it does,
/// p^α/q^β is proportional to a family member; the pseudo-divergence then
/// vanishes exactly when this combination is zero.
pub fn hpd_equality_membership(p: &NaturalParameter, q: &NaturalParameter, pair: ConjugatePair) -> Result<bool> {
    let fam = same_family(p, q)?;
    let coords: Vec<f64> = p
        .coords()
        .iter()
        .zip(q.coords())
        .map(|(x, y)| pair.alpha() * x - pair.beta() * y)
        .collect();
    Ok(fam.in_domain(&coords))
}

/// Both sides of an identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentitySides {
    pub lhs: f64,
    pub rhs: f64,
}

impl IdentitySides {
    pub fn gap(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

/// The two ways of turning the pseudo-divergence into a proper one by
/// moving an argument onto its zero-set partner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreAim {
    /// D_α(θ_p/(α−1) : θ_q) against D_{α,γ=β}(θ_p : θ_q).
    pub left: IdentitySides,
    /// D_α(θ_q : (α−1)θ_p) against D_{(β,α),γ=α}(θ_p : θ_q).
    pub right: IdentitySides,
}

pub fn pre_aim_check(p: &NaturalParameter, q: &NaturalParameter, pair: ConjugatePair) -> Result<PreAim> {
    let (alpha, beta) = require_forward(pair)?;
    let left = IdentitySides {
        lhs: hpd_raw(&p.scaled(1.0 / (alpha - 1.0))?, q, pair)?,
        rhs: hd_raw(p, q, pair, beta)?,
    };
    let right = IdentitySides {
        lhs: hpd_raw(q, &p.scaled(alpha - 1.0)?, pair)?,
        rhs: hd_raw(p, q, pair.swapped(), alpha)?,
    };
    Ok(PreAim { left, right })
}

/// The categorical distribution q ∝ c^{α−1}, the unique zero of
/// D_α(c : ·) on the probability simplex.
pub fn hpd_minimizer_categorical(c: &[f64], alpha: f64) -> Result<Vec<f64>> {
    ConjugatePair::forward(alpha)?;
    // validates the simplex point
    SourceParameter::Categorical { probs: c.to_vec() }.to_natural()?;
    let powered: Vec<f64> = c.iter().map(|x| x.powf(alpha - 1.0)).collect();
    let s: f64 = powered.iter().sum();
    Ok(powered.iter().map(|x| x / s).collect())
}

/// (1/α)(F(αθ₁) − F(αθ₂)) − (F(θ₁+θ) − F(θ₂+θ)), which equals
/// D_α(θ₁:θ) − D_α(θ₂:θ) and so vanishes exactly on the bisector
/// {θ : D_α(θ₁:θ) = D_α(θ₂:θ)}.
pub fn hpd_bisector_residual(
    t1: &NaturalParameter,
    t2: &NaturalParameter,
    theta: &NaturalParameter,
    alpha: f64,
) -> Result<f64> {
    ConjugatePair::forward(alpha)?;
    same_family(t1, theta)?;
    same_family(t2, theta)?;
    let f1 = f_scaled(alpha, t1, || format!("{alpha}·θ1"))?;
    let f2 = f_scaled(alpha, t2, || format!("{alpha}·θ2"))?;
    let s1 = f_at(1.0, t1, 1.0, theta, || "θ1 + θ".into())?;
    let s2 = f_at(1.0, t2, 1.0, theta, || "θ2 + θ".into())?;
    Ok((f1 - f2) / alpha - (s1 - s2))
}
