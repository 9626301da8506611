//! Comparison of graph distance with hyperbolic distance.

use serde::{Deserialize, Serialize};

use crate::error::LatticeError;
use crate::geom::{edge_length, hyp_dist};

use super::graph::RotationGraph;
use super::Lattice;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistortionReport {
    /// Pairs are taken inside this radius, where ball distances are true
    /// graph distances.
    pub pair_radius: u32,
    pub pairs: u64,
    /// Least-squares fit `graph ≈ slope * (hyp / ℓ) + intercept`.
    pub slope: f64,
    pub intercept: f64,
    /// Quasi-geodesic constants: `graph ≤ c * (hyp / ℓ) + k` for all pairs,
    /// with `c` the fitted slope.
    pub c: f64,
    pub k: f64,
    /// Largest `graph / (hyp / ℓ)`.
    pub max_ratio: f64,
    /// Smallest `graph - hyp / ℓ` (nonnegative: an edge spans exactly ℓ).
    pub min_excess: f64,
}

/// Fits graph distance against hyperbolic distance over all pairs of the
/// half-radius ball.
pub fn metric_distortion(lat: &Lattice) -> Result<DistortionReport, LatticeError> {
    let coords = lat.coords().ok_or(LatticeError::MissingCoordinates)?;
    let ell = edge_length();
    let pair_radius = lat.radius() / 2;
    let pts: Vec<u32> = (0..lat.len() as u32).filter(|&v| lat.depth(v) <= pair_radius).collect();
    let mut samples: Vec<(f64, f64)> = Vec::new();
    for (i, &u) in pts.iter().enumerate() {
        let du = lat.bfs(u);
        for &v in &pts[i + 1..] {
            let h = hyp_dist(&coords[u as usize], &coords[v as usize]) / ell;
            samples.push((h, du[v as usize] as f64));
        }
    }
    let n = samples.len() as f64;
    let (sx, sy) = samples.iter().fold((0.0, 0.0), |a, s| (a.0 + s.0, a.1 + s.1));
    let (mx, my) = (sx / n, sy / n);
    let (sxx, sxy) = samples
        .iter()
        .fold((0.0, 0.0), |a, s| (a.0 + (s.0 - mx) * (s.0 - mx), a.1 + (s.0 - mx) * (s.1 - my)));
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let k = samples.iter().map(|s| s.1 - slope * s.0).fold(f64::NEG_INFINITY, f64::max);
    let max_ratio = samples.iter().map(|s| s.1 / s.0).fold(0.0, f64::max);
    let min_excess = samples.iter().map(|s| s.1 - s.0).fold(f64::INFINITY, f64::min);
    Ok(DistortionReport {
        pair_radius,
        pairs: samples.len() as u64,
        slope,
        intercept,
        c: slope,
        k,
        max_ratio,
        min_excess,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::BuildMode;

    #[test]
    fn edges_span_one_edge_length() {
        let b = Lattice::build_ball(4, BuildMode::Geometric).unwrap();
        let c = b.coords().unwrap();
        for v in 0..b.len() as u32 {
            for w in b.neighbors(v).into_iter().flatten() {
                assert!((hyp_dist(&c[v as usize], &c[w as usize]) / edge_length() - 1.0).abs() < 1e-6);
            }
        }
        let r = metric_distortion(&b).unwrap();
        assert!(r.min_excess > -1e-9);
        assert!(r.c.is_finite() && r.c > 0.0);
    }

    #[test]
    fn needs_coordinates() {
        let b = Lattice::build_ball(2, BuildMode::Combinatorial).unwrap();
        assert_eq!(metric_distortion(&b), Err(LatticeError::MissingCoordinates));
    }
}
