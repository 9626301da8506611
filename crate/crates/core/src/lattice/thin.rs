//! Thin-triangle audit with geodesic intervals standing in for geodesics.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::LatticeError;

use super::graph::RotationGraph;
use super::Lattice;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThinnessReport {
    pub audit_radius: u32,
    pub delta: u32,
    /// Largest observed distance from a point of one side to the other two.
    pub max_thinness: u32,
    /// A triple `(u, v, x)` attaining it, the point being on `interval(u, v)`.
    pub worst_triple: (u32, u32, u32),
    pub triples: u64,
    pub pass: bool,
}

/// Over all triples `(u, v, x)` in the `audit_radius` ball: the largest
/// distance from a vertex of `interval(u, v)` to `interval(u, x) ∪ interval(x, v)`.
///
/// The ball must reach radius `2 * audit_radius + 1` so that every interval
/// and every short detour is present.
pub fn thinness_audit(lat: &Lattice, audit_radius: u32, delta: u32) -> Result<ThinnessReport, LatticeError> {
    let need = 2 * audit_radius + 1;
    if lat.radius() < need {
        return Err(LatticeError::RadiusOutOfRange { radius: lat.radius(), max: need });
    }
    let pts: Vec<u32> = (0..lat.len() as u32).filter(|&v| lat.depth(v) <= audit_radius).collect();
    let m = pts.len();
    let tables: Vec<Vec<u8>> = pts
        .par_iter()
        .map(|&u| lat.bfs(u).into_iter().map(|d| d.min(255) as u8).collect())
        .collect();
    let d = |a: usize, w: u32| tables[a][w as usize] as u32;
    let in_interval = |a: usize, b: usize, w: u32| d(a, w) + d(b, w) == d(a, pts[b]);
    // intervals[a][b] for a < b
    let intervals: Vec<Vec<Vec<u32>>> = (0..m)
        .into_par_iter()
        .map(|a| {
            (0..m)
                .map(|b| {
                    if b < a {
                        return Vec::new();
                    }
                    let total = d(a, pts[b]);
                    (0..lat.len() as u32).filter(|&w| d(a, w) <= total && d(a, w) + d(b, w) == total).collect()
                })
                .collect()
        })
        .collect();
    let side = |a: usize, b: usize| if a <= b { &intervals[a][b] } else { &intervals[b][a] };

    let per_a: Vec<(u32, (u32, u32, u32), u64)> = (0..m)
        .into_par_iter()
        .map(|a| {
            let mut best = (0u32, (pts[a], pts[a], pts[a]));
            let mut count = 0u64;
            for b in a..m {
                let base = &intervals[a][b];
                for x in 0..m {
                    count += 1;
                    for &w in base {
                        if in_interval(a, x, w) || in_interval(x, b, w) {
                            continue;
                        }
                        let near = lat
                            .neighbors(w)
                            .into_iter()
                            .flatten()
                            .any(|y| in_interval(a, x, y) || in_interval(x, b, y));
                        let dist = if near {
                            1
                        } else {
                            distance_to_sets(lat, w, side(a, x), side(x, b))
                        };
                        if dist > best.0 {
                            best = (dist, (pts[a], pts[b], pts[x]));
                        }
                    }
                }
            }
            (best.0, best.1, count)
        })
        .collect();
    let triples_half: u64 = per_a.iter().map(|t| t.2).sum();
    let (max_thinness, worst_triple) = per_a
        .iter()
        .fold((0, (0, 0, 0)), |acc, t| if t.0 > acc.0 { (t.0, t.1) } else { acc });
    // (u, v, x) and (v, u, x) test the same side
    let triples = 2 * triples_half - (m as u64) * (m as u64);
    Ok(ThinnessReport {
        audit_radius,
        delta,
        max_thinness,
        worst_triple,
        triples,
        pass: max_thinness <= delta,
    })
}

fn distance_to_sets(lat: &Lattice, w: u32, s1: &[u32], s2: &[u32]) -> u32 {
    let dw = lat.bfs(w);
    s1.iter().chain(s2).map(|&y| dw[y as usize]).min().unwrap_or(u32::MAX)
}
