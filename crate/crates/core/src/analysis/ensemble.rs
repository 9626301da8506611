//! Statistics over an ensemble of sampled walks of one length.
//!
//! Walks are taken in the order given and cut into contiguous batches; the
//! standard error of a mean is the spread of the batch means. With chains
//! concatenated in order, one batch per chain gives between-chain errors.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{AnalysisError, SawError};
use crate::lattice::graph::{root_interval, RotationGraph};
use crate::lattice::hull::BoundaryMode;
use crate::saw::Walk;

use super::exact::{max_tube_ratio, SHELL_MAX};
use super::profile::{distances_to_set, excesses, profile_walk, ProfileOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
}

/// Mean of `values` with a batch-means standard error.
pub fn estimate(values: &[f64], batches: usize) -> Estimate {
    let n = values.len();
    if n == 0 {
        return Estimate { mean: f64::NAN, se: f64::NAN };
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let b = batches.clamp(1, n);
    if b < 2 {
        let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n.max(2) - 1) as f64;
        return Estimate { mean, se: (var / n as f64).sqrt() };
    }
    let size = n / b;
    let means: Vec<f64> = (0..b).map(|k| values[k * size..(k + 1) * size].iter().sum::<f64>() / size as f64).collect();
    let m = means.iter().sum::<f64>() / b as f64;
    let var = means.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (b - 1) as f64;
    Estimate { mean, se: (var / b as f64).sqrt() }
}

fn check_ensemble<V: Copy + Eq + std::hash::Hash + std::fmt::Debug>(walks: &[Walk<V>]) -> Result<usize, AnalysisError> {
    let n = walks.first().ok_or_else(|| AnalysisError::Invalid("empty ensemble".into()))?.vertices().len() - 1;
    if walks.iter().any(|w| w.vertices().len() != n + 1) {
        return Err(AnalysisError::Invalid("ensemble mixes walk lengths".into()));
    }
    Ok(n)
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let k = ((sorted.len() - 1) as f64 * q).round() as usize;
    sorted[k]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FractionStats {
    pub mean: Estimate,
    pub min: f64,
    pub q10: f64,
    pub median: f64,
    pub q90: f64,
}

fn fraction_stats(mut values: Vec<f64>, batches: usize) -> FractionStats {
    let mean = estimate(&values, batches);
    values.sort_by(f64::total_cmp);
    FractionStats { mean, min: values[0], q10: quantile(&values, 0.1), median: quantile(&values, 0.5), q90: quantile(&values, 0.9) }
}

/// Fractions of walk vertices on the hull boundary, and within distance `d`
/// of it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryStats {
    pub n: usize,
    pub walks: usize,
    pub tangent: FractionStats,
    pub exposed: FractionStats,
    /// `shell[d - 1]` for `d = 1..=SHELL_MAX`.
    pub shell: Vec<Estimate>,
}

impl BoundaryStats {
    pub fn fraction(&self, mode: BoundaryMode) -> &FractionStats {
        match mode {
            BoundaryMode::Tangent => &self.tangent,
            BoundaryMode::Exposed => &self.exposed,
        }
    }
}

pub fn hull_boundary_fraction<G: RotationGraph>(
    g: &G,
    walks: &[Walk<G::Vertex>],
    opts: &ProfileOptions,
    batches: usize,
) -> Result<BoundaryStats, AnalysisError> {
    let n = check_ensemble(walks)?;
    let opts = ProfileOptions { deviation_limit: None, ..*opts };
    let rows: Vec<(f64, f64, Vec<f64>)> = walks
        .par_iter()
        .map(|w| {
            let p = profile_walk(g, w, &opts)?;
            let k = (n + 1) as f64;
            let shells = (1..=SHELL_MAX).map(|d| p.shell_count(d) as f64 / k).collect();
            Ok((p.boundary_count(BoundaryMode::Tangent) as f64 / k, p.boundary_count(BoundaryMode::Exposed) as f64 / k, shells))
        })
        .collect::<Result<_, SawError>>()?;
    let tangent = fraction_stats(rows.iter().map(|r| r.0).collect(), batches);
    let exposed = fraction_stats(rows.iter().map(|r| r.1).collect(), batches);
    let shell = (0..SHELL_MAX as usize)
        .map(|d| estimate(&rows.iter().map(|r| r.2[d]).collect::<Vec<_>>(), batches))
        .collect();
    Ok(BoundaryStats { n, walks: walks.len(), tangent, exposed, shell })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItiCount {
    pub c: u32,
    /// `E|{i : 𝒜_i}|`.
    pub count: Estimate,
    /// The same divided by `n`.
    pub per_n: Estimate,
}

/// Per-walk displacement and excesses, shared by the cheap statistics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceSample {
    pub displacement: u32,
    pub excess: Vec<u32>,
}

pub fn distance_samples<G: RotationGraph>(g: &G, walks: &[Walk<G::Vertex>]) -> Result<Vec<DistanceSample>, AnalysisError> {
    check_ensemble(walks)?;
    Ok(walks
        .par_iter()
        .map(|w| Ok(DistanceSample { displacement: g.depth(w.end()), excess: excesses(g, w)? }))
        .collect::<Result<_, SawError>>()?)
}

pub fn iti_count_expectation(samples: &[DistanceSample], n: usize, cs: &[u32], batches: usize) -> Vec<ItiCount> {
    cs.iter()
        .map(|&c| {
            let counts: Vec<f64> = samples.iter().map(|s| s.excess.iter().filter(|&&e| e <= c).count() as f64).collect();
            let per: Vec<f64> = counts.iter().map(|x| x / n.max(1) as f64).collect();
            ItiCount { c, count: estimate(&counts, batches), per_n: estimate(&per, batches) }
        })
        .collect()
}

pub fn displacement_estimate(samples: &[DistanceSample], batches: usize) -> Estimate {
    let d: Vec<f64> = samples.iter().map(|s| s.displacement as f64).collect();
    estimate(&d, batches)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicAudit {
    pub c: u32,
    /// Pairs `(γ, i)` with `𝒜_i`.
    pub pairs: u64,
    /// Largest distance from such a `γ(i)` to the endpoint interval.
    pub rho: u32,
    /// Largest `|N_rho(I)| / d(γ(0), γ(n))` over the endpoints.
    pub tube_ratio: f64,
}

pub fn near_geodesic_audit<G: RotationGraph>(g: &G, walks: &[Walk<G::Vertex>], c: u32) -> Result<GeodesicAudit, AnalysisError> {
    check_ensemble(walks)?;
    let per: Vec<(u64, u32)> = walks
        .par_iter()
        .map(|w| {
            let ex = excesses(g, w)?;
            let targets: Vec<G::Vertex> =
                ex.iter().enumerate().filter(|(_, &e)| e <= c).map(|(k, _)| w.at(k + 1)).collect();
            if targets.is_empty() {
                return Ok((0, 0));
            }
            let found = distances_to_set(g, &root_interval(g, w.end()), targets.iter().copied());
            Ok((targets.len() as u64, targets.iter().map(|v| found[v]).max().unwrap_or(0)))
        })
        .collect::<Result<_, SawError>>()?;
    let rho = per.iter().map(|p| p.1).max().unwrap_or(0);
    let mut ends: Vec<G::Vertex> = walks.iter().map(|w| w.end()).collect();
    ends.sort_unstable();
    ends.dedup();
    Ok(GeodesicAudit { c, pairs: per.iter().map(|p| p.0).sum(), rho, tube_ratio: max_tube_ratio(g, &ends, rho) })
}

/// Least-squares line `y = slope x + intercept` with the classical standard
/// error of the slope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub points: usize,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    let m = xs.len();
    if m < 3 || ys.len() != m {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / m as f64;
    let my = ys.iter().sum::<f64>() / m as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let slope_se = (rss / (m - 2) as f64 / sxx).sqrt();
    Some(LinearFit { slope, intercept, slope_se, points: m })
}
