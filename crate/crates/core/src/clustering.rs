//! Variational k-means over distributions under the symmetric Hölder
//! divergence, plus the two-cluster toy generator of 2D Gaussians used to
//! measure clustering accuracy.

use rayon::prelude::*;

use crate::centroid::{sym_hd_centroid_with, CccpOptions, WeightedSet};
use crate::closed_form::sym_hd_closed;
use crate::error::{Error, Result};
use crate::family::{NaturalParameter, SourceParameter};
use crate::linalg::Matrix;
use crate::oracle::ConjugatePair;
use crate::sampling::Rng;

pub const MAX_ROUNDS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct ToyDatasetConfig {
    pub n: usize,
    pub seed: u64,
    pub centers: [[f64; 2]; 2],
    /// (shape, scale) of the variance along the radial direction.
    pub radial_prior: (f64, f64),
    /// (shape, scale) of the variance across it.
    pub tangential_prior: (f64, f64),
}

impl ToyDatasetConfig {
    pub fn new(n: usize, seed: u64) -> Self {
        ToyDatasetConfig {
            n,
            seed,
            centers: [[-2.0, 0.0], [2.0, 0.0]],
            radial_prior: (7.0, 0.01),
            tangential_prior: (7.0, 0.003),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToyDataset {
    pub gaussians: Vec<SourceParameter>,
    /// 0 for the first cluster, 1 for the second.
    pub true_labels: Vec<usize>,
}

impl ToyDataset {
    pub fn naturals(&self) -> Result<Vec<NaturalParameter>> {
        self.gaussians.iter().map(SourceParameter::to_natural).collect()
    }
}

pub fn generate_toy_dataset(config: &ToyDatasetConfig) -> Result<ToyDataset> {
    let mut rng = Rng::new(config.seed);
    generate_with(config, &mut rng)
}

/// The first ⌊n/2⌋ Gaussians belong to the first cluster. Each covariance
/// is R·diag(σ₁, σ₂)·Rᵀ with R's first column along μ − center.
fn generate_with(config: &ToyDatasetConfig, rng: &mut Rng) -> Result<ToyDataset> {
    if config.n < 2 {
        return Err(Error::InvalidArgument(format!("toy dataset needs n ≥ 2, got {}", config.n)));
    }
    let mut gaussians = Vec::with_capacity(config.n);
    let mut true_labels = Vec::with_capacity(config.n);
    for i in 0..config.n {
        let label = usize::from(i >= config.n / 2);
        let c = config.centers[label];
        let (offset, norm) = loop {
            let offset = [rng.standard_normal(), rng.standard_normal()];
            let norm = offset[0].hypot(offset[1]);
            if norm > 0.0 {
                break (offset, norm);
            }
        };
        let s1 = rng.gamma(config.radial_prior.0, config.radial_prior.1);
        let s2 = rng.gamma(config.tangential_prior.0, config.tangential_prior.1);
        let (u, v) = (offset[0] / norm, offset[1] / norm);
        let r = Matrix::from_row_slice(2, 2, &[u, -v, v, u]);
        let cov = &r * Matrix::from_diagonal(&crate::linalg::Vector::from_vec(vec![s1, s2])) * r.transpose();
        // symmetrize exactly; the product can differ in the last bit
        let off = 0.5 * (cov[(0, 1)] + cov[(1, 0)]);
        let cov = Matrix::from_row_slice(2, 2, &[cov[(0, 0)], off, off, cov[(1, 1)]]);
        gaussians.push(SourceParameter::Gaussian {
            mean: vec![c[0] + offset[0], c[1] + offset[1]],
            cov,
        });
        true_labels.push(label);
    }
    Ok(ToyDataset {
        gaussians,
        true_labels,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusteringState {
    pub centers: Vec<NaturalParameter>,
    /// Cluster index in 0..L for each point.
    pub labels: Vec<usize>,
    /// Σ_i S(p_i : O_{l_i}) at termination.
    pub energy: f64,
    /// Energy after every center update and every reassignment.
    pub energies: Vec<f64>,
    /// Completed rounds.
    pub iterations: usize,
    /// Labels stopped changing before the round limit.
    pub converged: bool,
}

/// Divergence and centroid solver driving the k-means loop.
pub(crate) trait ClusterGeometry {
    fn divergence(&self, p: &NaturalParameter, center: &NaturalParameter) -> Result<f64>;
    /// Center for `members` improving on `previous` if given.
    fn center(&self, members: WeightedSet, previous: Option<(&NaturalParameter, f64)>) -> Result<NaturalParameter>;
}

struct SymmetricHolder {
    pair: ConjugatePair,
    alpha: f64,
    gamma: f64,
}

impl ClusterGeometry for SymmetricHolder {
    fn divergence(&self, p: &NaturalParameter, center: &NaturalParameter) -> Result<f64> {
        sym_hd_closed(p, center, self.pair, self.gamma)
    }

    /// Variational update: CCCP runs only until the cluster's Hölder
    /// information drops below its value at the previous center. A new
    /// cluster has no previous center and takes one step from the barycenter.
    fn center(&self, members: WeightedSet, previous: Option<(&NaturalParameter, f64)>) -> Result<NaturalParameter> {
        let opts = match previous {
            Some((c, info)) => CccpOptions {
                init: Some(c.clone()),
                stop_below: Some(info),
                ..Default::default()
            },
            None => CccpOptions {
                stop_below: Some(f64::INFINITY),
                ..Default::default()
            },
        };
        let res = sym_hd_centroid_with(&members, self.alpha, self.gamma, &opts)?;
        match previous {
            Some((c, _)) if res.trace.energies.last() > res.trace.energies.first() => Ok(c.clone()),
            _ => Ok(res.centroid),
        }
    }
}

/// Hölder variational k-means with symmetric divergence S_{α,γ}.
pub fn kmeans(points: &[NaturalParameter], l: usize, alpha: f64, gamma: f64, seed: u64) -> Result<ClusteringState> {
    kmeans_with_rng(points, l, alpha, gamma, &mut Rng::new(seed))
}

pub fn kmeans_with_rng(
    points: &[NaturalParameter],
    l: usize,
    alpha: f64,
    gamma: f64,
    rng: &mut Rng,
) -> Result<ClusteringState> {
    let pair = ConjugatePair::forward(alpha)?;
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidExponent(format!("γ = {gamma} must be a finite positive number")));
    }
    let geometry = SymmetricHolder { pair, alpha, gamma };
    run_kmeans(&geometry, points, l, rng)
}

pub(crate) fn run_kmeans(
    geometry: &impl ClusterGeometry,
    points: &[NaturalParameter],
    l: usize,
    rng: &mut Rng,
) -> Result<ClusteringState> {
    if l == 0 {
        return Err(Error::InvalidArgument("need at least one cluster".into()));
    }
    if points.len() < l {
        return Err(Error::InvalidArgument(format!(
            "{} points cannot fill {l} clusters",
            points.len()
        )));
    }
    let mut labels: Vec<usize> = points.iter().map(|_| rng.below(l)).collect();
    let mut centers: Vec<Option<NaturalParameter>> = vec![None; l];
    let mut energies = Vec::new();
    let mut converged = false;
    let mut rounds = 0;
    while rounds < MAX_ROUNDS {
        rounds += 1;
        for (k, center) in centers.iter_mut().enumerate() {
            let members: Vec<NaturalParameter> = labels
                .iter()
                .zip(points)
                .filter(|(lab, _)| **lab == k)
                .map(|(_, p)| p.clone())
                .collect();
            if members.is_empty() {
                continue;
            }
            let previous = match center {
                Some(c) => {
                    let mut info = 0.0;
                    for p in &members {
                        info += geometry.divergence(p, c)?;
                    }
                    Some((c.clone(), info / members.len() as f64))
                }
                None => None,
            };
            let set = WeightedSet::uniform(members)?;
            *center = Some(geometry.center(set, previous.as_ref().map(|(c, e)| (c, *e)))?);
        }
        reseed_empty(geometry, points, &mut labels, &mut centers)?;
        let resolved: Vec<NaturalParameter> = centers.iter().map(|c| c.clone().expect("every cluster seeded")).collect();
        energies.push(total_energy(geometry, points, &labels, &resolved)?);

        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let mut best = (labels[i], f64::INFINITY);
            for (k, c) in resolved.iter().enumerate() {
                let d = geometry.divergence(p, c)?;
                if d < best.1 {
                    best = (k, d);
                }
            }
            if best.0 != labels[i] {
                labels[i] = best.0;
                changed = true;
            }
        }
        energies.push(total_energy(geometry, points, &labels, &resolved)?);
        if !changed {
            converged = true;
            break;
        }
    }
    let centers: Vec<NaturalParameter> = centers.into_iter().map(|c| c.expect("every cluster seeded")).collect();
    Ok(ClusteringState {
        energy: *energies.last().expect("at least one round"),
        centers,
        labels,
        energies,
        iterations: rounds,
        converged,
    })
}

/// An empty cluster takes the point farthest from its own center (among
/// clusters that can spare one) as both its center and sole member.
fn reseed_empty(
    geometry: &impl ClusterGeometry,
    points: &[NaturalParameter],
    labels: &mut [usize],
    centers: &mut [Option<NaturalParameter>],
) -> Result<()> {
    for k in 0..centers.len() {
        if labels.contains(&k) {
            continue;
        }
        let mut sizes = vec![0usize; centers.len()];
        for lab in labels.iter() {
            sizes[*lab] += 1;
        }
        let mut best: Option<(usize, f64)> = None;
        for (i, p) in points.iter().enumerate() {
            if sizes[labels[i]] < 2 {
                continue;
            }
            let c = centers[labels[i]].as_ref().expect("non-empty clusters have centers");
            let d = geometry.divergence(p, c)?;
            if best.is_none_or(|(_, bd)| d > bd) {
                best = Some((i, d));
            }
        }
        let (i, _) = best.expect("more points than clusters");
        labels[i] = k;
        centers[k] = Some(points[i].clone());
    }
    Ok(())
}

fn total_energy(
    geometry: &impl ClusterGeometry,
    points: &[NaturalParameter],
    labels: &[usize],
    centers: &[NaturalParameter],
) -> Result<f64> {
    let mut e = 0.0;
    for (p, lab) in points.iter().zip(labels) {
        e += geometry.divergence(p, &centers[*lab])?;
    }
    Ok(e)
}

/// Fraction of correctly clustered points for two clusters, maximized over
/// the two ways of naming the clusters.
pub fn accuracy(labels: &[usize], true_labels: &[usize]) -> Result<f64> {
    if labels.len() != true_labels.len() {
        return Err(Error::DimensionMismatch {
            expected: true_labels.len(),
            got: labels.len(),
        });
    }
    if labels.is_empty() {
        return Err(Error::InvalidArgument("no labels to compare".into()));
    }
    if let Some(bad) = labels.iter().chain(true_labels).find(|l| **l > 1) {
        return Err(Error::InvalidArgument(format!("label {bad} is not a two-cluster label")));
    }
    let hits = labels.iter().zip(true_labels).filter(|(a, b)| a == b).count() as f64;
    let frac = hits / labels.len() as f64;
    Ok(frac.max(1.0 - frac))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSummary {
    pub mean_accuracy: f64,
    /// Sample standard deviation across runs (zero for a single run).
    pub std_accuracy: f64,
    pub accuracies: Vec<f64>,
}

/// Repeats (fresh toy dataset, fresh k-means) `runs` times; run r draws
/// everything from stream r of `seed`, so results do not depend on the
/// thread schedule.
pub fn run_experiment(n: usize, alpha: f64, gamma: f64, runs: usize, seed: u64) -> Result<ExperimentSummary> {
    if runs == 0 {
        return Err(Error::InvalidArgument("runs must be at least 1".into()));
    }
    ConjugatePair::forward(alpha)?;
    let accuracies = (0..runs)
        .into_par_iter()
        .map(|run| {
            let mut rng = Rng::stream(seed, run as u64);
            let config = ToyDatasetConfig::new(n, seed);
            let data = generate_with(&config, &mut rng)?;
            let state = kmeans_with_rng(&data.naturals()?, 2, alpha, gamma, &mut rng)?;
            accuracy(&state.labels, &data.true_labels)
        })
        .collect::<Result<Vec<f64>>>()?;
    let m = accuracies.len() as f64;
    let mean = accuracies.iter().sum::<f64>() / m;
    let std = if accuracies.len() > 1 {
        (accuracies.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (m - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(ExperimentSummary {
        mean_accuracy: mean,
        std_accuracy: std,
        accuracies,
    })
}
