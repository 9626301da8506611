//! Everything the analyses need to know about one walk, computed once.

use std::collections::VecDeque;

use rustc_hash::{FxHashMap, FxHashSet};

use crate::error::SawError;
use crate::lattice::auto::{tangent_slots, Automorphism, Evaluator};
use crate::lattice::graph::{bfs_within, distances_to_end, root_interval, RotationGraph};
use crate::lattice::hull::{walk_hull_set, BoundaryMode, HullMode};
use crate::saw::Walk;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProfileOptions {
    pub hull_mode: HullMode,
    /// Deviations from the geodesic are measured at indices with excess at
    /// most this value.
    pub deviation_limit: Option<u32>,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        ProfileOptions { hull_mode: HullMode::OneStep, deviation_limit: None }
    }
}

/// Per-walk measurements. Per-index vectors are indexed by `i - 1` for the
/// interior indices `0 < i < n`; per-vertex vectors by `j` for `0..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkProfile {
    pub n: usize,
    pub displacement: u32,
    pub hull_size: usize,
    /// `d(γ(0),γ(i)) + d(γ(i),γ(n)) - d(γ(0),γ(n))`.
    pub excess: Vec<u32>,
    /// Whether `R_i` moves the walk.
    pub acts: Vec<bool>,
    /// Excess of `R_i γ` at `i`.
    pub reflected_excess: Vec<u32>,
    /// Distance from `γ(i)` to the interval between the endpoints.
    pub deviation: Vec<Option<u32>>,
    pub tangent: Vec<bool>,
    pub exposed: Vec<bool>,
    /// Distance inside the hull to the exposed boundary.
    pub boundary_distance: Vec<u32>,
}

impl WalkProfile {
    /// `|{i : 𝒜_i}|` at constant `c`.
    pub fn iti_count(&self, c: u32) -> usize {
        self.excess.iter().filter(|&&e| e <= c).count()
    }

    pub fn boundary_count(&self, mode: BoundaryMode) -> usize {
        match mode {
            BoundaryMode::Tangent => self.tangent.iter().filter(|&&t| t).count(),
            BoundaryMode::Exposed => self.exposed.iter().filter(|&&t| t).count(),
        }
    }

    pub fn shell_count(&self, d: u32) -> usize {
        self.boundary_distance.iter().filter(|&&x| x <= d).count()
    }

    pub fn on_boundary(&self, j: usize, mode: BoundaryMode) -> bool {
        match mode {
            BoundaryMode::Tangent => self.tangent[j],
            BoundaryMode::Exposed => self.exposed[j],
        }
    }

    /// Indices where `R_i` acts but the reflected walk misses `𝒜_i`.
    pub fn defects(&self, c: u32) -> usize {
        self.acts.iter().zip(&self.reflected_excess).filter(|(&a, &e)| a && e > c).count()
    }
}

/// Excess at every interior index: only distances, no hull.
pub fn excesses<G: RotationGraph>(g: &G, walk: &Walk<G::Vertex>) -> Result<Vec<u32>, SawError> {
    let vs = walk.vertices();
    let to_end = distances_to_end(g, vs)?;
    let d0n = g.depth(walk.end());
    Ok((1..walk.steps()).map(|i| g.depth(vs[i]) + to_end[i] - d0n).collect())
}

pub fn profile_walk<G: RotationGraph>(
    g: &G,
    walk: &Walk<G::Vertex>,
    opts: &ProfileOptions,
) -> Result<WalkProfile, SawError> {
    let vs = walk.vertices();
    let n = walk.steps();
    let to_end = distances_to_end(g, vs)?;
    let d0n = g.depth(walk.end());
    let excess: Vec<u32> = (1..n).map(|i| g.depth(vs[i]) + to_end[i] - d0n).collect();

    let hull = walk_hull_set(g, vs, opts.hull_mode)?;
    let members: FxHashSet<G::Vertex> = hull.iter().copied().collect();
    let mut exposed_set = Vec::new();
    for &v in &hull {
        let nb = g.neighbors(v);
        if nb.iter().any(|w| w.is_none()) {
            return Err(crate::error::LatticeError::HullEscape { depth: g.depth(v), interior: g.depth(v) - 1 }.into());
        }
        if nb.iter().flatten().any(|w| !members.contains(w)) {
            exposed_set.push(v);
        }
    }
    let mut dist: FxHashMap<G::Vertex, u32> = exposed_set.iter().map(|&v| (v, 0)).collect();
    let mut queue: VecDeque<G::Vertex> = exposed_set.iter().copied().collect();
    while let Some(v) = queue.pop_front() {
        let d = dist[&v] + 1;
        for w in g.neighbors(v).into_iter().flatten() {
            if members.contains(&w) && !dist.contains_key(&w) {
                dist.insert(w, d);
                queue.push_back(w);
            }
        }
    }
    let boundary_distance: Vec<u32> = vs.iter().map(|v| dist.get(v).copied().unwrap_or(u32::MAX)).collect();
    let exposed: Vec<bool> = boundary_distance.iter().map(|&d| d == 0).collect();

    let mut tangent = vec![false; n + 1];
    let mut acts = vec![false; n.saturating_sub(1)];
    let mut reflected_excess = excess.clone();
    for j in 0..=n {
        // a tangent vertex must be exposed
        if !exposed[j] {
            continue;
        }
        let slots = tangent_slots(g, &hull, vs[j])?;
        let Some(k) = slots.iter().position(|&t| t) else { continue };
        tangent[j] = true;
        if j == 0 || j == n {
            continue;
        }
        acts[j - 1] = true;
        let end = Evaluator::new(g, Automorphism::reflection(vs[j], k)).image_path(&vs[j..])?;
        let d = g.depth(*end.last().expect("nonempty"));
        reflected_excess[j - 1] = g.depth(vs[j]) + to_end[j] - d;
    }

    let deviation = match opts.deviation_limit {
        None => vec![None; excess.len()],
        Some(limit) => {
            let targets: Vec<Option<G::Vertex>> =
                excess.iter().enumerate().map(|(k, &e)| (e <= limit).then_some(vs[k + 1])).collect();
            let found = distances_to_set(g, &root_interval(g, walk.end()), targets.iter().flatten().copied());
            targets.iter().map(|t| t.map(|v| found[&v])).collect()
        }
    };

    Ok(WalkProfile {
        n,
        displacement: d0n,
        hull_size: hull.len(),
        excess,
        acts,
        reflected_excess,
        deviation,
        tangent,
        exposed,
        boundary_distance,
    })
}

/// Distances from `set` to each target, by a breadth-first search that
/// stops once every target is reached.
pub fn distances_to_set<G: RotationGraph>(
    g: &G,
    set: &[G::Vertex],
    targets: impl IntoIterator<Item = G::Vertex>,
) -> FxHashMap<G::Vertex, u32> {
    let mut pending: FxHashSet<G::Vertex> = targets.into_iter().collect();
    let mut out = FxHashMap::default();
    let mut dist: FxHashMap<G::Vertex, u32> = FxHashMap::default();
    let mut queue = VecDeque::new();
    for &s in set {
        if dist.insert(s, 0).is_none() {
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        if pending.is_empty() {
            break;
        }
        let d = dist[&v];
        if pending.remove(&v) {
            out.insert(v, d);
        }
        for w in g.neighbors(v).into_iter().flatten() {
            if !dist.contains_key(&w) {
                dist.insert(w, d + 1);
                queue.push_back(w);
            }
        }
    }
    out
}

/// `|{v : d(v, I(root, end)) <= rho}|`.
pub fn tube_size<G: RotationGraph>(g: &G, end: G::Vertex, rho: u32) -> usize {
    bfs_within(g, root_interval(g, end), rho).len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::auto::tangent_slots_direct;
    use crate::lattice::hull::convex_hull;
    use crate::lattice::tiling::Tiling;
    use crate::lattice::{BuildMode, Lattice};
    use crate::saw::reflect::{collect_walks, reflect_at};

    #[test]
    fn one_step_walks_are_all_boundary() {
        let t = Tiling;
        for w in collect_walks(&t, 1, false).unwrap() {
            let p = profile_walk(&t, &w, &ProfileOptions::default()).unwrap();
            assert_eq!(p.boundary_count(BoundaryMode::Tangent), 2);
            assert_eq!(p.boundary_count(BoundaryMode::Exposed), 2);
            assert!(p.excess.is_empty());
        }
    }

    #[test]
    fn profile_matches_reflection_and_ball_hulls() {
        let t = Tiling;
        let b = Lattice::build_ball(9, BuildMode::Combinatorial).unwrap();
        let opts = ProfileOptions { deviation_limit: Some(8), ..Default::default() };
        let wt = collect_walks(&t, 4, true).unwrap();
        let wb = collect_walks(&b, 4, true).unwrap();
        for (x, y) in wt.iter().zip(&wb) {
            let p = profile_walk(&t, x, &opts).unwrap();
            assert_eq!(excesses(&t, x).unwrap(), p.excess);
            // ball version: breadth-first hull and direct tangency
            let h = convex_hull(&b, y.vertices(), HullMode::OneStep).unwrap();
            for (j, &v) in y.vertices().iter().enumerate() {
                let tan = h.exposed.binary_search(&v).is_ok()
                    && tangent_slots_direct(&b, &h.hull, v).unwrap().iter().any(|&s| s);
                assert_eq!(p.tangent[j], tan);
                assert_eq!(p.exposed[j], h.exposed.binary_search(&v).is_ok());
            }
            for i in 1..4 {
                let r = reflect_at(&t, x, i, None, HullMode::OneStep).unwrap();
                assert_eq!(r.mirror.is_some(), p.acts[i - 1]);
                let re = excesses(&t, &r.walk).unwrap()[i - 1];
                assert_eq!(re, p.reflected_excess[i - 1]);
                // deviation checked against a full distance table
                let d0 = b.bfs(0);
                let dn = b.bfs(y.end());
                let ie: Vec<u32> =
                    (0..b.len() as u32).filter(|&v| d0[v as usize] + dn[v as usize] == d0[y.end() as usize]).collect();
                let dv = b.bfs(y.at(i));
                let want = ie.iter().map(|&v| dv[v as usize]).min().unwrap();
                assert_eq!(p.deviation[i - 1], Some(want));
            }
        }
    }
}
