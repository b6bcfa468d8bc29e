//! Divergence maps from a fixed reference over the 2-simplex of categorical
//! distributions and over the (μ, σ) half-plane of univariate Gaussians.

use rayon::prelude::*;

use crate::closed_form::{hd_closed, hpd_closed, kl_closed};
use crate::error::{Error, Result};
use crate::family::{NaturalParameter, SourceParameter};
use crate::oracle::{hd_direct, hpd_direct, kl_direct, ConjugatePair, Density};

pub const MIN_RESOLUTION: usize = 8;

/// Which divergences to tabulate: D_α(p_r : p) for every α in `alphas`,
/// D_{hd_alpha,γ}(p_r : p) for every γ in `gammas`, and KL(p_r : p).
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub alphas: Vec<f64>,
    pub gammas: Vec<f64>,
    pub hd_alpha: f64,
    /// Number of steps along each axis (so resolution + 1 points).
    pub resolution: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            alphas: vec![4.0, 2.0, 4.0 / 3.0],
            gammas: vec![0.5, 1.0, 2.0, 5.0, 10.0],
            hd_alpha: 2.0,
            resolution: 60,
        }
    }
}

impl GridSpec {
    fn validate(&self) -> Result<()> {
        if self.resolution < MIN_RESOLUTION {
            return Err(Error::InvalidArgument(format!(
                "resolution {} is below the minimum {MIN_RESOLUTION}",
                self.resolution
            )));
        }
        for &a in self.alphas.iter().chain([&self.hd_alpha]) {
            ConjugatePair::forward(a)?;
        }
        if let Some(g) = self.gammas.iter().find(|g| !(**g > 0.0 && g.is_finite())) {
            return Err(Error::InvalidExponent(format!("γ = {g} must be a finite positive number")));
        }
        Ok(())
    }

    fn value_columns(&self) -> Vec<String> {
        let mut cols: Vec<String> = self.alphas.iter().map(|a| format!("hpd_alpha={a}")).collect();
        cols.extend(self.gammas.iter().map(|g| format!("hd_alpha={}_gamma={g}", self.hd_alpha)));
        cols.push("kl".into());
        cols
    }
}

/// Rows of coordinates followed by divergence values, in a fixed order.
#[derive(Debug, Clone, PartialEq)]
pub struct GridTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl GridTable {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// First row minimizing the given column.
    pub fn argmin(&self, column: usize) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, r) in self.rows.iter().enumerate() {
            if best.is_none_or(|(_, v)| r[column] < v) {
                best = Some((i, r[column]));
            }
        }
        best.map(|(i, _)| i)
    }
}

/// Barycentric grid (i, j, R−i−j)/R over the probability 2-simplex. Cells
/// with a zero entry have no natural parameter, so they are evaluated by
/// the definition-level sums instead of the closed forms.
pub fn simplex_grid(reference: &[f64], spec: &GridSpec) -> Result<GridTable> {
    spec.validate()?;
    if reference.len() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: reference.len(),
        });
    }
    let reference_theta = SourceParameter::Categorical {
        probs: reference.to_vec(),
    }
    .to_natural()?;
    let reference_density = Density::discrete(reference.to_vec())?;
    let r = spec.resolution;
    let cells: Vec<[usize; 3]> = (0..=r).flat_map(|i| (0..=r - i).map(move |j| [i, j, r - i - j])).collect();
    let rows = cells
        .par_iter()
        .map(|cell| {
            let p: Vec<f64> = cell.iter().map(|c| *c as f64 / r as f64).collect();
            let mut row = p.clone();
            if cell.iter().all(|c| *c > 0) {
                let theta = SourceParameter::Categorical { probs: p }.to_natural()?;
                row.extend(closed_values(&reference_theta, &theta, spec)?);
            } else {
                let q = Density::discrete(p)?;
                row.extend(oracle_values(&reference_density, &q, spec)?);
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut columns = vec!["p0".to_string(), "p1".into(), "p2".into()];
    columns.extend(spec.value_columns());
    Ok(GridTable { columns, rows })
}

/// Rectangular (μ, σ) grid of univariate Gaussians against the reference
/// N(ref_mean, ref_sd²), all in closed form.
pub fn gaussian_grid(
    ref_mean: f64,
    ref_sd: f64,
    mu_range: (f64, f64),
    sigma_range: (f64, f64),
    spec: &GridSpec,
) -> Result<GridTable> {
    spec.validate()?;
    if !(mu_range.0 < mu_range.1) || !(0.0 < sigma_range.0 && sigma_range.0 < sigma_range.1) {
        return Err(Error::InvalidArgument(format!(
            "need μ range lo < hi and 0 < σ lo < σ hi, got {mu_range:?} and {sigma_range:?}"
        )));
    }
    if !(ref_sd > 0.0) {
        return Err(Error::InvalidSource {
            family: "gaussian",
            detail: format!("reference standard deviation {ref_sd} must be positive"),
        });
    }
    let reference = SourceParameter::normal(ref_mean, ref_sd * ref_sd).to_natural()?;
    let r = spec.resolution;
    let at = |range: (f64, f64), k: usize| range.0 + (range.1 - range.0) * k as f64 / r as f64;
    let cells: Vec<(f64, f64)> = (0..=r)
        .flat_map(|i| (0..=r).map(move |j| (i, j)))
        .map(|(i, j)| (at(mu_range, i), at(sigma_range, j)))
        .collect();
    let rows = cells
        .par_iter()
        .map(|&(mu, sigma)| {
            let theta = SourceParameter::normal(mu, sigma * sigma).to_natural()?;
            let mut row = vec![mu, sigma];
            row.extend(closed_values(&reference, &theta, spec)?);
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut columns = vec!["mu".to_string(), "sigma".into()];
    columns.extend(spec.value_columns());
    Ok(GridTable { columns, rows })
}

fn closed_values(reference: &NaturalParameter, p: &NaturalParameter, spec: &GridSpec) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for &a in &spec.alphas {
        out.push(hpd_closed(reference, p, ConjugatePair::forward(a)?)?);
    }
    let pair = ConjugatePair::forward(spec.hd_alpha)?;
    for &g in &spec.gammas {
        out.push(hd_closed(reference, p, pair, g)?);
    }
    out.push(kl_closed(reference, p)?);
    Ok(out)
}

fn oracle_values(reference: &Density, p: &Density, spec: &GridSpec) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for &a in &spec.alphas {
        out.push(hpd_direct(reference, p, ConjugatePair::forward(a)?)?);
    }
    let pair = ConjugatePair::forward(spec.hd_alpha)?;
    for &g in &spec.gammas {
        out.push(hd_direct(reference, p, pair, g)?);
    }
    out.push(kl_direct(reference, p)?);
    Ok(out)
}
