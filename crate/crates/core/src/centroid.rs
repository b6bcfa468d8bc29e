//! Hölder centroids of weighted sets of family members.
//!
//! Each objective splits into a convex and a concave part in the centroid's
//! natural parameter; the concave-convex procedure linearizes the concave
//! part and solves the convex part exactly through (∇F)⁻¹, which decreases
//! the objective monotonically.

use crate::closed_form::{hd_closed, hpd_closed, sym_hd_closed, sym_hpd_closed};
use crate::error::{Error, Result};
use crate::family::{Family, NaturalParameter};
use crate::linalg::Vector;
use crate::oracle::{conjugate_exponent, ConjugatePair};

pub const MAX_ITERATIONS: usize = 500;
/// Convergence threshold on the max-norm displacement of consecutive iterates.
pub const DISPLACEMENT_TOL: f64 = 1e-10;
/// Halvings toward the previous iterate when an update leaves the domain.
pub const MAX_BACKTRACK: usize = 30;
const INNER_MAX_ITERATIONS: usize = 100;
const INNER_TOL: f64 = 1e-10;

/// Positive weights (normalized on construction) over same-family parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSet {
    family: Family,
    thetas: Vec<NaturalParameter>,
    weights: Vec<f64>,
}

impl WeightedSet {
    pub fn new(thetas: Vec<NaturalParameter>, weights: Vec<f64>) -> Result<Self> {
        if thetas.is_empty() {
            return Err(Error::InvalidArgument("a weighted set needs at least one member".into()));
        }
        if thetas.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                expected: thetas.len(),
                got: weights.len(),
            });
        }
        let family = thetas[0].family();
        if let Some(t) = thetas.iter().find(|t| t.family() != family) {
            return Err(Error::FamilyMismatch {
                left: family.to_string(),
                right: t.family().to_string(),
            });
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidArgument(format!("weight {w} must be positive")));
        }
        let total: f64 = weights.iter().sum();
        let weights = weights.iter().map(|w| w / total).collect();
        Ok(WeightedSet {
            family,
            thetas,
            weights,
        })
    }

    pub fn uniform(thetas: Vec<NaturalParameter>) -> Result<Self> {
        let n = thetas.len();
        WeightedSet::new(thetas, vec![1.0; n])
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn thetas(&self) -> &[NaturalParameter] {
        &self.thetas
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }

    /// Σ w_i θ_i.
    pub fn barycenter(&self) -> Result<NaturalParameter> {
        let mut c = vec![0.0; self.family.dim()];
        for (t, w) in self.thetas.iter().zip(&self.weights) {
            for (ci, ti) in c.iter_mut().zip(t.coords()) {
                *ci += w * ti;
            }
        }
        self.family.parameter(c)
    }
}

/// Iterates and objective values of one CCCP run.
#[derive(Debug, Clone, PartialEq)]
pub struct CccpTrace {
    /// C⁰, C¹, ...
    pub iterates: Vec<NaturalParameter>,
    /// Objective at each iterate.
    pub energies: Vec<f64>,
    pub converged: bool,
    /// Number of updates performed.
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Centroid {
    pub centroid: NaturalParameter,
    pub trace: CccpTrace,
}

/// Stopping rules and starting point of a CCCP run.
#[derive(Debug, Clone, PartialEq)]
pub struct CccpOptions {
    pub max_iterations: usize,
    pub tolerance: f64,
    /// Starting point; the barycenter when absent.
    pub init: Option<NaturalParameter>,
    /// Stop as soon as the objective drops strictly below this value
    /// (used for partial, variational updates).
    pub stop_below: Option<f64>,
}

impl Default for CccpOptions {
    fn default() -> Self {
        CccpOptions {
            max_iterations: MAX_ITERATIONS,
            tolerance: DISPLACEMENT_TOL,
            init: None,
            stop_below: None,
        }
    }
}

fn sum_gradients(fam: Family, terms: impl Iterator<Item = (f64, Result<NaturalParameter>)>) -> Result<Vec<f64>> {
    let mut acc = vec![0.0; fam.dim()];
    for (w, theta) in terms {
        let g = theta?.grad_log_normalizer()?;
        for (a, gi) in acc.iter_mut().zip(g) {
            *a += w * gi;
        }
    }
    Ok(acc)
}

fn lin(a: f64, p: &NaturalParameter, b: f64, q: &NaturalParameter, what: &str) -> Result<NaturalParameter> {
    NaturalParameter::combine(a, p, b, q).map_err(|e| match e {
        Error::OutOfDomain { family, detail } => Error::CombinationOutOfDomain {
            family,
            combination: what.to_string(),
            detail,
        },
        other => other,
    })
}

/// Runs C ← update(C) from the options' starting point, backtracking
/// halfway toward the previous iterate whenever an update is rejected.
fn run_cccp(
    set: &WeightedSet,
    opts: &CccpOptions,
    update: impl Fn(&NaturalParameter) -> Result<NaturalParameter>,
    objective: impl Fn(&NaturalParameter) -> Result<f64>,
) -> Result<Centroid> {
    let fam = set.family;
    let mut current = match &opts.init {
        Some(c) if c.family() == fam => c.clone(),
        Some(c) => {
            return Err(Error::FamilyMismatch {
                left: fam.to_string(),
                right: c.family().to_string(),
            })
        }
        None => set.barycenter()?,
    };
    let mut energy = objective(&current)?;
    let mut trace = CccpTrace {
        iterates: vec![current.clone()],
        energies: vec![energy],
        converged: false,
        iterations: 0,
    };
    for _ in 0..opts.max_iterations {
        let proposal = update(&current);
        let (next, next_energy) = match proposal.and_then(|p| objective(&p).map(|e| (p, e))) {
            Ok(ok) => ok,
            Err(first) => backtrack(&current, &update, &objective, first)?,
        };
        let step = next.max_abs_diff(&current);
        trace.iterations += 1;
        trace.iterates.push(next.clone());
        trace.energies.push(next_energy);
        current = next;
        energy = next_energy;
        if step < opts.tolerance {
            trace.converged = true;
            break;
        }
        if opts.stop_below.is_some_and(|b| energy < b) {
            break;
        }
    }
    Ok(Centroid {
        centroid: current,
        trace,
    })
}

/// The update failed at `current`; retry from points halfway back along
/// the segment toward the proposal. When the proposal itself cannot be
/// formed, the first error is reported.
fn backtrack(
    current: &NaturalParameter,
    update: &impl Fn(&NaturalParameter) -> Result<NaturalParameter>,
    objective: &impl Fn(&NaturalParameter) -> Result<f64>,
    first: Error,
) -> Result<(NaturalParameter, f64)> {
    let fam = current.family();
    // the raw proposal coordinates, even when outside the domain
    let raw = match update(current) {
        Ok(p) => p.into_coords(),
        Err(_) => return Err(first),
    };
    let mut t = 0.5;
    for _ in 0..MAX_BACKTRACK {
        let coords: Vec<f64> = current
            .coords()
            .iter()
            .zip(&raw)
            .map(|(c, r)| c + t * (r - c))
            .collect();
        if let Ok(p) = fam.parameter(coords) {
            if let Ok(e) = objective(&p) {
                return Ok((p, e));
            }
        }
        t *= 0.5;
    }
    Err(first)
}

/// Right-sided proper-divergence centroid argmin_C Σ w_i D_{α,γ}(θ_i : C).
pub fn hd_centroid(set: &WeightedSet, alpha: f64, gamma: f64) -> Result<Centroid> {
    hd_centroid_with(set, alpha, gamma, &CccpOptions::default())
}

pub fn hd_centroid_with(set: &WeightedSet, alpha: f64, gamma: f64, opts: &CccpOptions) -> Result<Centroid> {
    let pair = ConjugatePair::forward(alpha)?;
    check_gamma(gamma)?;
    let beta = pair.beta();
    let fam = set.family;
    let update = |c: &NaturalParameter| -> Result<NaturalParameter> {
        let eta = sum_gradients(
            fam,
            set.thetas
                .iter()
                .zip(&set.weights)
                .map(|(t, w)| (*w, lin(gamma / alpha, t, gamma / beta, c, "(γ/α)θ_i + (γ/β)C"))),
        )?;
        fam.inv_grad_log_normalizer(&eta)?.scaled(1.0 / gamma)
    };
    let objective = |c: &NaturalParameter| weighted(set, |t| hd_closed(t, c, pair, gamma));
    run_cccp(set, opts, update, objective)
}

/// Right-sided pseudo-divergence centroid argmin_C Σ w_i D_α(θ_i : C).
pub fn hpd_centroid(set: &WeightedSet, alpha: f64) -> Result<Centroid> {
    hpd_centroid_with(set, alpha, &CccpOptions::default())
}

pub fn hpd_centroid_with(set: &WeightedSet, alpha: f64, opts: &CccpOptions) -> Result<Centroid> {
    let pair = ConjugatePair::forward(alpha)?;
    let beta = pair.beta();
    let fam = set.family;
    let update = |c: &NaturalParameter| -> Result<NaturalParameter> {
        let eta = sum_gradients(
            fam,
            set.thetas
                .iter()
                .zip(&set.weights)
                .map(|(t, w)| (*w, lin(1.0, t, 1.0, c, "θ_i + C"))),
        )?;
        fam.inv_grad_log_normalizer(&eta)?.scaled(1.0 / beta)
    };
    let objective = |c: &NaturalParameter| weighted(set, |t| hpd_closed(t, c, pair));
    run_cccp(set, opts, update, objective)
}

/// Left-sided centroid argmin_C Σ w_i D_{α,γ}(C : θ_i): by reference
/// duality, the right-sided centroid at ᾱ.
pub fn hd_centroid_left(set: &WeightedSet, alpha: f64, gamma: f64) -> Result<Centroid> {
    ConjugatePair::forward(alpha)?;
    hd_centroid(set, conjugate_exponent(alpha), gamma)
}

/// Left-sided pseudo-divergence centroid, the right-sided one at ᾱ.
pub fn hpd_centroid_left(set: &WeightedSet, alpha: f64) -> Result<Centroid> {
    ConjugatePair::forward(alpha)?;
    hpd_centroid(set, conjugate_exponent(alpha))
}

/// Centroid for the symmetrized proper divergence.
pub fn sym_hd_centroid(set: &WeightedSet, alpha: f64, gamma: f64) -> Result<Centroid> {
    sym_hd_centroid_with(set, alpha, gamma, &CccpOptions::default())
}

pub fn sym_hd_centroid_with(set: &WeightedSet, alpha: f64, gamma: f64, opts: &CccpOptions) -> Result<Centroid> {
    let pair = ConjugatePair::forward(alpha)?;
    check_gamma(gamma)?;
    let beta = pair.beta();
    let (s, t) = (gamma / alpha, gamma / beta);
    let fam = set.family;
    let update = |o: &NaturalParameter| -> Result<NaturalParameter> {
        let terms = set.thetas.iter().zip(&set.weights).flat_map(|(th, w)| {
            [
                (w / beta, lin(s, th, t, o, "(γ/α)θ_i + (γ/β)O")),
                (w / alpha, lin(t, th, s, o, "(γ/β)θ_i + (γ/α)O")),
            ]
        });
        let eta = sum_gradients(fam, terms)?;
        fam.inv_grad_log_normalizer(&eta)?.scaled(1.0 / gamma)
    };
    let objective = |o: &NaturalParameter| weighted(set, |th| sym_hd_closed(th, o, pair, gamma));
    run_cccp(set, opts, update, objective)
}

/// Centroid for the symmetrized pseudo-divergence. Each CCCP step solves
/// ½∇F(αO) + ½∇F(βO) = Σ w_i ∇F(θ_i + O^t) by damped Newton; at α = 2 this
/// is ∇F(2O) = ... and is solved in closed form.
pub fn sym_hpd_centroid(set: &WeightedSet, alpha: f64) -> Result<Centroid> {
    sym_hpd_centroid_with(set, alpha, &CccpOptions::default())
}

pub fn sym_hpd_centroid_with(set: &WeightedSet, alpha: f64, opts: &CccpOptions) -> Result<Centroid> {
    let pair = ConjugatePair::forward(alpha)?;
    let beta = pair.beta();
    let fam = set.family;
    let update = |o: &NaturalParameter| -> Result<NaturalParameter> {
        let target = sum_gradients(
            fam,
            set.thetas
                .iter()
                .zip(&set.weights)
                .map(|(t, w)| (*w, lin(1.0, t, 1.0, o, "θ_i + O"))),
        )?;
        if alpha == 2.0 {
            return fam.inv_grad_log_normalizer(&target)?.scaled(0.5);
        }
        solve_symmetric_map(fam, alpha, beta, &target, o)
    };
    let objective = |o: &NaturalParameter| weighted(set, |t| sym_hpd_closed(t, o, pair));
    run_cccp(set, opts, update, objective)
}

/// Solves G(O) = ½∇F(αO) + ½∇F(βO) = target, starting at `start`.
/// G is the gradient of a strictly convex function, so the Newton system
/// is symmetric positive definite; steps are halved until the residual
/// decreases and the iterate stays in the domain.
fn solve_symmetric_map(
    fam: Family,
    alpha: f64,
    beta: f64,
    target: &[f64],
    start: &NaturalParameter,
) -> Result<NaturalParameter> {
    let residual = |o: &NaturalParameter| -> Result<Vec<f64>> {
        let ga = o.scaled(alpha)?.grad_log_normalizer()?;
        let gb = o.scaled(beta)?.grad_log_normalizer()?;
        Ok(ga
            .iter()
            .zip(&gb)
            .zip(target)
            .map(|((a, b), t)| 0.5 * (a + b) - t)
            .collect())
    };
    let norm = |r: &[f64]| r.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let tol = INNER_TOL * target.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let mut o = start.clone();
    let mut r = residual(&o)?;
    for _ in 0..INNER_MAX_ITERATIONS {
        if norm(&r) <= tol {
            return Ok(o);
        }
        let ha = fam.hessian_log_normalizer(&o.scaled(alpha)?)?;
        let hb = fam.hessian_log_normalizer(&o.scaled(beta)?)?;
        let jac = ha * (0.5 * alpha) + hb * (0.5 * beta);
        let step = jac
            .lu()
            .solve(&Vector::from_column_slice(&r))
            .ok_or_else(|| Error::NonConvergence {
                what: "symmetric pseudo-divergence centroid inner solve (singular Jacobian)",
                iterations: 0,
                residual: norm(&r),
            })?;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..MAX_BACKTRACK {
            let coords: Vec<f64> = o.coords().iter().zip(step.iter()).map(|(x, s)| x - t * s).collect();
            if let Ok(cand) = fam.parameter(coords) {
                if let Ok(rc) = residual(&cand) {
                    if norm(&rc) < norm(&r) {
                        o = cand;
                        r = rc;
                        accepted = true;
                        break;
                    }
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if norm(&r) <= tol {
        return Ok(o);
    }
    Err(Error::NonConvergence {
        what: "symmetric pseudo-divergence centroid inner solve",
        iterations: INNER_MAX_ITERATIONS,
        residual: norm(&r),
    })
}

/// Σ w_i S_{α,γ}(θ_i : C), the spread of a set around C.
pub fn holder_information(set: &WeightedSet, alpha: f64, gamma: f64, centroid: &NaturalParameter) -> Result<f64> {
    let pair = ConjugatePair::forward(alpha)?;
    check_gamma(gamma)?;
    weighted(set, |t| sym_hd_closed(t, centroid, pair, gamma))
}

fn weighted(set: &WeightedSet, f: impl Fn(&NaturalParameter) -> Result<f64>) -> Result<f64> {
    let mut s = 0.0;
    for (t, w) in set.thetas.iter().zip(&set.weights) {
        s += w * f(t)?;
    }
    Ok(s)
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidExponent(format!("γ = {gamma} must be a finite positive number")))
    }
}
