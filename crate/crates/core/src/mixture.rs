//! Univariate mixtures: the exact product integral ∫mm′, and lower/upper
//! bounds on ∫m^α from a partition of the line into elementary intervals
//! on which the dominant and the dominated weighted component are fixed.
//!
//! Crossing points of the weighted component densities are computed in
//! closed form (a quadratic for Gaussians, a linear equation in |x| for
//! zero-centred Laplace components). Between consecutive crossings every
//! pairwise order is constant, so the partition needs no tail truncation:
//! beyond the outermost crossing the order never changes again.

use crate::error::{Error, Result};
use crate::family::{DistributionJson, Family, NaturalParameter, SourceParameter};
use crate::oracle::{ConjugatePair, Density, Density1D};
use crate::special::{log_sum_exp, normal_interval_mass};
use serde::Deserialize;

/// Tolerance on Σw = 1.
pub const WEIGHT_TOL: f64 = 1e-12;

/// A finite mixture Σ w_i p(x; θ_i) of univariate Gaussian or Laplace components.
#[derive(Debug, Clone, PartialEq)]
pub struct Mixture {
    family: Family,
    weights: Vec<f64>,
    components: Vec<NaturalParameter>,
}

impl Mixture {
    pub fn new(weights: Vec<f64>, components: Vec<NaturalParameter>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidArgument("a mixture needs at least one component".into()));
        }
        if weights.len() != components.len() {
            return Err(Error::DimensionMismatch {
                expected: components.len(),
                got: weights.len(),
            });
        }
        let family = components[0].family();
        if !family.is_univariate_continuous() {
            return Err(Error::InvalidArgument(format!(
                "mixtures are supported for univariate Gaussian and Laplace components, not {family}"
            )));
        }
        if let Some(c) = components.iter().find(|c| c.family() != family) {
            return Err(Error::FamilyMismatch {
                left: family.to_string(),
                right: c.family().to_string(),
            });
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidArgument(format!("mixture weight {w} must be positive")));
        }
        let s: f64 = weights.iter().sum();
        if (s - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::InvalidArgument(format!("mixture weights sum to {s}, not 1")));
        }
        Ok(Mixture {
            family,
            weights,
            components,
        })
    }

    /// A one-component mixture.
    pub fn single(theta: NaturalParameter) -> Result<Self> {
        Mixture::new(vec![1.0], vec![theta])
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn components(&self) -> &[NaturalParameter] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// log w_i + log p(x; θ_i).
    fn weighted_log_density(&self, i: usize, x: f64) -> f64 {
        self.weights[i].ln() + self.components[i].log_density(&[x]).unwrap_or(f64::NEG_INFINITY)
    }

    pub fn log_density(&self, x: f64) -> f64 {
        log_sum_exp((0..self.len()).map(|i| self.weighted_log_density(i, x)))
    }

    /// The mixture density as an oracle argument, with break points at every
    /// component's landmarks and at all pairwise crossings.
    pub fn density(&self) -> Result<Density> {
        let mut breaks = crossings(self)?;
        for c in &self.components {
            if let Density::Continuous(d) = Density::from_natural(c)? {
                breaks.extend_from_slice(d.breaks());
            }
        }
        let me = self.clone();
        let d = Density1D::new(move |x| me.log_density(x), f64::NEG_INFINITY, f64::INFINITY)?.with_breaks(breaks);
        Ok(Density::Continuous(d))
    }

    /// Parses `{"family": ..., "weights": [...], "components": [...]}` where
    /// each component is either a full distribution object or just the
    /// family's `params` object.
    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            family: Option<String>,
            weights: Option<Vec<f64>>,
            components: Vec<serde_json::Value>,
        }
        let raw: Raw = serde_json::from_value(value.clone())
            .map_err(|e| Error::InvalidArgument(format!("mixture JSON: {e}")))?;
        let mut comps = Vec::with_capacity(raw.components.len());
        for (i, c) in raw.components.iter().enumerate() {
            let full = if c.get("family").is_some() {
                c.clone()
            } else {
                let fam = raw.family.as_deref().ok_or_else(|| {
                    Error::InvalidArgument(format!("component {i} has no family and the mixture names none"))
                })?;
                serde_json::json!({ "family": fam, "params": c })
            };
            let d: DistributionJson = serde_json::from_value(full)
                .map_err(|e| Error::InvalidArgument(format!("mixture component {i}: {e}")))?;
            comps.push(d.to_natural()?);
        }
        let k = comps.len();
        let weights = raw.weights.unwrap_or_else(|| vec![1.0 / k as f64; k]);
        Mixture::new(weights, comps)
    }
}

/// ∫_I p(x; θ) dx for a univariate Gaussian or Laplace θ.
pub fn component_interval_mass(theta: &NaturalParameter, lo: f64, hi: f64) -> Result<f64> {
    if !(lo <= hi) {
        return Err(Error::InvalidArgument(format!("interval [{lo}, {hi}] is empty")));
    }
    match theta.family() {
        Family::Gaussian { d: 1 } => {
            let (mu, sd) = gaussian_moments(theta);
            Ok(normal_interval_mass((lo - mu) / sd, (hi - mu) / sd))
        }
        Family::Laplace => {
            let s = -1.0 / theta.coords()[0];
            let m = if lo >= 0.0 {
                0.5 * ((-lo / s).exp() - (-hi / s).exp())
            } else if hi <= 0.0 {
                0.5 * ((hi / s).exp() - (lo / s).exp())
            } else {
                1.0 - 0.5 * (lo / s).exp() - 0.5 * (-hi / s).exp()
            };
            Ok(m.clamp(0.0, 1.0))
        }
        other => Err(Error::InvalidArgument(format!("interval masses need a univariate family, not {other}"))),
    }
}

fn gaussian_moments(theta: &NaturalParameter) -> (f64, f64) {
    let c = theta.coords();
    let var = -0.5 / c[1];
    (c[0] * var, var.sqrt())
}

/// Width of the region holding the bulk of a component, used to place the
/// optional uniform refinement cuts.
fn component_window(theta: &NaturalParameter) -> (f64, f64) {
    match theta.family() {
        Family::Gaussian { .. } => {
            let (mu, sd) = gaussian_moments(theta);
            (mu - 8.0 * sd, mu + 8.0 * sd)
        }
        _ => {
            let s = -1.0 / theta.coords()[0];
            (-8.0 * s, 8.0 * s)
        }
    }
}

/// All points where two weighted components have equal density.
fn crossings(m: &Mixture) -> Result<Vec<f64>> {
    let mut pts = Vec::new();
    for i in 0..m.len() {
        for j in (i + 1)..m.len() {
            pts.extend(pair_crossings(m, i, j)?);
        }
    }
    pts.retain(|x| x.is_finite());
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    Ok(pts)
}

fn pair_crossings(m: &Mixture, i: usize, j: usize) -> Result<Vec<f64>> {
    let (wi, wj) = (m.weights[i].ln(), m.weights[j].ln());
    let (ti, tj) = (&m.components[i], &m.components[j]);
    match m.family {
        Family::Gaussian { .. } => {
            // ℓ_i − ℓ_j = a x² + b x + c
            let (mi, si) = gaussian_moments(ti);
            let (mj, sj) = gaussian_moments(tj);
            let (vi, vj) = (si * si, sj * sj);
            let a = -0.5 / vi + 0.5 / vj;
            let b = mi / vi - mj / vj;
            let c = wi - wj - 0.5 * (vi / vj).ln() - 0.5 * mi * mi / vi + 0.5 * mj * mj / vj;
            Ok(quadratic_roots(a, b, c))
        }
        _ => {
            // ℓ_i − ℓ_j = c + d|x|
            let (si, sj) = (-1.0 / ti.coords()[0], -1.0 / tj.coords()[0]);
            let c = wi - wj - (si / sj).ln();
            let d = -1.0 / si + 1.0 / sj;
            if d == 0.0 {
                return Ok(Vec::new());
            }
            let r = -c / d;
            Ok(if r > 0.0 {
                vec![-r, r]
            } else if r == 0.0 {
                vec![0.0]
            } else {
                Vec::new()
            })
        }
    }
}

/// Real roots of a x² + b x + c, computed without cancellation.
fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        return Vec::new();
    }
    if a.abs() <= 1e-14 * scale {
        return if b != 0.0 { vec![-c / b] } else { Vec::new() };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    if q == 0.0 {
        return vec![0.0];
    }
    vec![q / a, c / q]
}

/// Controls the optional extra cuts of [`build_partition`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PartitionSettings {
    /// Number of equal pieces into which the central window (±8 standard
    /// deviations or scales around all components) is additionally cut;
    /// 0 keeps only the crossing points.
    pub resolution: usize,
}

/// One elementary interval with its dominant (δ) and dominated (ε) component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementaryInterval {
    pub lo: f64,
    pub hi: f64,
    pub delta: usize,
    pub epsilon: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElementaryPartition {
    /// Finite cut points, sorted.
    pub breakpoints: Vec<f64>,
    pub intervals: Vec<ElementaryInterval>,
}

/// Partitions ℝ so that argmax_i w_i p_i and argmin_i w_i p_i are constant
/// on each piece (verified at probe points inside each piece).
pub fn build_partition(m: &Mixture, settings: PartitionSettings) -> Result<ElementaryPartition> {
    let mut cuts = crossings(m)?;
    if settings.resolution > 0 {
        let lo = m
            .components
            .iter()
            .map(|c| component_window(c).0)
            .fold(f64::INFINITY, f64::min);
        let hi = m
            .components
            .iter()
            .map(|c| component_window(c).1)
            .fold(f64::NEG_INFINITY, f64::max);
        let n = settings.resolution;
        cuts.extend((0..=n).map(|i| lo + (hi - lo) * (i as f64 / n as f64)));
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
    }
    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(f64::NEG_INFINITY);
    edges.extend_from_slice(&cuts);
    edges.push(f64::INFINITY);

    let mut intervals = Vec::with_capacity(edges.len() - 1);
    for w in edges.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let probes = interval_probes(lo, hi);
        let (delta, epsilon) = extremes(m, probes[0]);
        for &x in &probes[1..] {
            let (d, e) = extremes(m, x);
            let same = |a: usize, b: usize| {
                a == b || m.weighted_log_density(a, x) == m.weighted_log_density(b, x)
            };
            if !same(d, delta) || !same(e, epsilon) {
                return Err(Error::Partition(format!(
                    "dominant or dominated component changes inside [{lo}, {hi}] (near x = {x})"
                )));
            }
        }
        intervals.push(ElementaryInterval {
            lo,
            hi,
            delta,
            epsilon,
        });
    }
    Ok(ElementaryPartition {
        breakpoints: cuts,
        intervals,
    })
}

fn interval_probes(lo: f64, hi: f64) -> [f64; 3] {
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => {
            let w = hi - lo;
            [lo + 0.25 * w, lo + 0.5 * w, lo + 0.75 * w]
        }
        (true, false) => {
            let s = lo.abs().max(1.0);
            [lo + 0.5 * s, lo + s, lo + 4.0 * s]
        }
        (false, true) => {
            let s = hi.abs().max(1.0);
            [hi - 4.0 * s, hi - s, hi - 0.5 * s]
        }
        (false, false) => [-1.0, 0.0, 1.0],
    }
}

/// (argmax, argmin) of the weighted log densities at x; ties go to the lowest index.
fn extremes(m: &Mixture, x: f64) -> (usize, usize) {
    let mut best = (0, m.weighted_log_density(0, x));
    let mut worst = best;
    for i in 1..m.len() {
        let v = m.weighted_log_density(i, x);
        if v > best.1 {
            best = (i, v);
        }
        if v < worst.1 {
            worst = (i, v);
        }
    }
    (best.0, worst.0)
}

/// Two-sided bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
}

/// ∫m^α ∈ [lower, upper] using, on each interval, w_ε p_ε ≤ w_i p_i ≤ w_δ p_δ.
pub fn power_integral_bounds(m: &Mixture, alpha: f64, partition: &ElementaryPartition) -> Result<Bounds> {
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Err(Error::InvalidExponent(format!("α = {alpha} must be a finite number > 1")));
    }
    // log of w_i^α ∫ p_i^α = α log w_i + F(αθ_i) − αF(θ_i); the mass of the
    // normalized member at αθ_i on each interval completes the term
    let mut log_scale = Vec::with_capacity(m.len());
    let mut powered = Vec::with_capacity(m.len());
    for (w, c) in m.weights.iter().zip(&m.components) {
        let scaled = c.scaled(alpha)?;
        log_scale.push(alpha * w.ln() + scaled.log_normalizer()? - alpha * c.log_normalizer()?);
        powered.push(scaled);
    }
    let log_k_alpha = alpha * (m.len() as f64).ln();
    let term = |i: usize, iv: &ElementaryInterval| -> Result<f64> {
        let mass = component_interval_mass(&powered[i], iv.lo, iv.hi)?;
        Ok((log_scale[i] + mass.ln()).exp())
    };
    let mut lower = 0.0;
    let mut upper = 0.0;
    for iv in &partition.intervals {
        let top = term(iv.delta, iv)?;
        let bottom = term(iv.epsilon, iv)?;
        lower += (log_k_alpha.exp() * bottom).max(top);
        upper += log_k_alpha.exp() * top;
    }
    Ok(Bounds { lower, upper })
}

/// ∫ m m′ = Σ_ij w_i w′_j exp(F(θ_i + θ′_j) − F(θ_i) − F(θ′_j)).
pub fn product_integral(m: &Mixture, n: &Mixture) -> Result<f64> {
    if m.family != n.family {
        return Err(Error::FamilyMismatch {
            left: m.family.to_string(),
            right: n.family.to_string(),
        });
    }
    let mut total = 0.0;
    for (wi, ti) in m.weights.iter().zip(&m.components) {
        let fi = ti.log_normalizer()?;
        for (wj, tj) in n.weights.iter().zip(&n.components) {
            let sum = NaturalParameter::combine(1.0, ti, 1.0, tj).map_err(|e| match e {
                Error::OutOfDomain { family, detail } => Error::CombinationOutOfDomain {
                    family,
                    combination: "θ_i + θ′_j".into(),
                    detail,
                },
                other => other,
            })?;
            total += wi * wj * (sum.log_normalizer()? - fi - tj.log_normalizer()?).exp();
        }
    }
    Ok(total)
}

/// Bounds on the Hölder pseudo-divergence between two mixtures, combining
/// the exact cross term with bounds on ∫m^α and ∫m′^β.
pub fn hpd_mixture_bounds(m: &Mixture, n: &Mixture, pair: ConjugatePair, settings: PartitionSettings) -> Result<Bounds> {
    let (alpha, beta) = (pair.alpha(), pair.beta());
    if !(alpha > 1.0 && beta > 1.0) {
        return Err(Error::InvalidExponent(format!("α = {alpha} must exceed 1")));
    }
    let cross = product_integral(m, n)?.ln();
    let bm = power_integral_bounds(m, alpha, &build_partition(m, settings)?)?;
    let bn = power_integral_bounds(n, beta, &build_partition(n, settings)?)?;
    Ok(Bounds {
        lower: -cross + bm.lower.ln() / alpha + bn.lower.ln() / beta,
        upper: -cross + bm.upper.ln() / alpha + bn.upper.ln() / beta,
    })
}

/// Convenience constructor for tests and examples: Σ w_i N(μ_i, σ_i²).
pub fn gaussian_mixture(weights: &[f64], means: &[f64], variances: &[f64]) -> Result<Mixture> {
    let comps = means
        .iter()
        .zip(variances)
        .map(|(m, v)| SourceParameter::normal(*m, *v).to_natural())
        .collect::<Result<Vec<_>>>()?;
    Mixture::new(weights.to_vec(), comps)
}

/// Σ w_i Laplace(0, s_i).
pub fn laplace_mixture(weights: &[f64], scales: &[f64]) -> Result<Mixture> {
    let comps = scales
        .iter()
        .map(|s| SourceParameter::Laplace { scale: *s }.to_natural())
        .collect::<Result<Vec<_>>>()?;
    Mixture::new(weights.to_vec(), comps)
}
