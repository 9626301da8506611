//! Graph convex hulls and their boundaries.

use std::collections::VecDeque;

use rustc_hash::{FxHashMap as HashMap, FxHashSet as HashSet};

use serde::{Deserialize, Serialize};

use crate::error::LatticeError;

use super::auto::tangent_slots;
use super::graph::{interval_along, route, RotationGraph};
use super::{interval_from_tables, Lattice};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HullMode {
    /// A together with every vertex on a geodesic between two members of A.
    #[default]
    OneStep,
    /// Repeat the one-step closure until nothing changes.
    Fixpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryMode {
    /// Members admitting a reflection that meets the hull only in themselves.
    #[default]
    Tangent,
    /// Members with a neighbour outside the hull.
    Exposed,
}

impl std::str::FromStr for HullMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "one-step" => Ok(HullMode::OneStep),
            "fixpoint" => Ok(HullMode::Fixpoint),
            other => Err(format!("unknown hull mode `{other}` (one-step|fixpoint)")),
        }
    }
}

impl std::str::FromStr for BoundaryMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tangent" => Ok(BoundaryMode::Tangent),
            "exposed" => Ok(BoundaryMode::Exposed),
            other => Err(format!("unknown boundary mode `{other}` (tangent|exposed)")),
        }
    }
}

/// A hull with its two boundaries. All vertex lists are sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HullReport<V> {
    pub source: Vec<V>,
    pub hull: Vec<V>,
    pub exposed: Vec<V>,
    pub tangent: Vec<V>,
    /// Graph distance from each hull member (same order as `hull`) to the
    /// exposed boundary.
    pub boundary_distance: Vec<u32>,
}

impl<V: Copy + Ord> HullReport<V> {
    pub fn contains(&self, v: V) -> bool {
        self.hull.binary_search(&v).is_ok()
    }

    pub fn boundary(&self, mode: BoundaryMode) -> &[V] {
        match mode {
            BoundaryMode::Tangent => &self.tangent,
            BoundaryMode::Exposed => &self.exposed,
        }
    }

    pub fn on_boundary(&self, v: V, mode: BoundaryMode) -> bool {
        self.boundary(mode).binary_search(&v).is_ok()
    }

    /// Hull members within distance `d` of the exposed boundary.
    pub fn shell(&self, d: u32) -> Vec<V> {
        self.hull
            .iter()
            .zip(&self.boundary_distance)
            .filter(|(_, &x)| x <= d)
            .map(|(&v, _)| v)
            .collect()
    }

    pub fn in_shell(&self, v: V, d: u32) -> bool {
        match self.hull.binary_search(&v) {
            Ok(i) => self.boundary_distance[i] <= d,
            Err(_) => false,
        }
    }
}

fn sorted_unique<V: Ord + Copy>(xs: impl IntoIterator<Item = V>) -> Vec<V> {
    let mut v: Vec<V> = xs.into_iter().collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// Hull in an explicit ball, with intervals read off breadth-first distance
/// tables. The hull must stay inside the interior of the ball.
pub fn convex_hull(lat: &Lattice, set: &[u32], mode: HullMode) -> Result<HullReport<u32>, LatticeError> {
    if set.is_empty() {
        return Err(LatticeError::Invalid("convex hull of an empty set".into()));
    }
    for &v in set {
        if !lat.contains(v) {
            return Err(LatticeError::UnknownVertex(v as u64));
        }
    }
    let source = sorted_unique(set.iter().copied());
    let mut hull = source.clone();
    loop {
        check_interior(lat, &hull)?;
        let tables: Vec<Vec<u32>> = hull.iter().map(|&u| lat.bfs(u)).collect();
        let mut next: HashSet<u32> = hull.iter().copied().collect();
        for a in 0..hull.len() {
            for b in a + 1..hull.len() {
                next.extend(interval_from_tables(&tables[a], &tables[b], hull[b]));
            }
        }
        let next = sorted_unique(next);
        let done = next.len() == hull.len();
        hull = next;
        if done || mode == HullMode::OneStep {
            break;
        }
    }
    check_interior(lat, &hull)?;
    boundaries(lat, source, hull)
}

fn check_interior(lat: &Lattice, hull: &[u32]) -> Result<(), LatticeError> {
    let deepest = hull.iter().map(|&v| lat.depth(v)).max().unwrap_or(0);
    if deepest > lat.interior_radius() {
        return Err(LatticeError::HullEscape { depth: deepest, interior: lat.interior_radius() });
    }
    Ok(())
}

/// Hull computed with transported intervals; works on any rotation graph
/// and costs time proportional to the interval sizes only.
pub fn hull_by_transport<G: RotationGraph>(
    g: &G,
    set: &[G::Vertex],
    mode: HullMode,
) -> Result<HullReport<G::Vertex>, LatticeError> {
    if set.is_empty() {
        return Err(LatticeError::Invalid("convex hull of an empty set".into()));
    }
    let source = sorted_unique(set.iter().copied());
    let hull = closure_by_transport(g, source.clone(), mode)?;
    boundaries(g, source, hull)
}

fn closure_by_transport<G: RotationGraph>(
    g: &G,
    mut hull: Vec<G::Vertex>,
    mode: HullMode,
) -> Result<Vec<G::Vertex>, LatticeError> {
    loop {
        let mut next: HashSet<G::Vertex> = hull.iter().copied().collect();
        for a in 0..hull.len() {
            for b in a + 1..hull.len() {
                next.extend(interval_along(g, &route(g, hull[a], hull[b]))?);
            }
        }
        let next = sorted_unique(next);
        let done = next.len() == hull.len();
        hull = next;
        if done || mode == HullMode::OneStep {
            return Ok(hull);
        }
    }
}

/// Hull of a walk's vertex set; intervals are transported along the walk
/// itself rather than through the root.
pub fn walk_hull<G: RotationGraph>(
    g: &G,
    walk: &[G::Vertex],
    mode: HullMode,
) -> Result<HullReport<G::Vertex>, LatticeError> {
    let source = sorted_unique(walk.iter().copied());
    let hull = walk_hull_set(g, walk, mode)?;
    boundaries(g, source, hull)
}

/// Sorted vertex set of the hull of a walk, without boundaries.
pub fn walk_hull_set<G: RotationGraph>(
    g: &G,
    walk: &[G::Vertex],
    mode: HullMode,
) -> Result<Vec<G::Vertex>, LatticeError> {
    let mut acc: HashSet<G::Vertex> = walk.iter().copied().collect();
    for a in 0..walk.len() {
        for b in a + 2..walk.len() {
            acc.extend(interval_along(g, &walk[a..=b])?);
        }
    }
    let hull = sorted_unique(acc);
    match mode {
        HullMode::OneStep => Ok(hull),
        HullMode::Fixpoint => closure_by_transport(g, hull, HullMode::Fixpoint),
    }
}

/// Boundary sets and shell distances of a finished hull.
pub fn boundaries<G: RotationGraph>(
    g: &G,
    source: Vec<G::Vertex>,
    hull: Vec<G::Vertex>,
) -> Result<HullReport<G::Vertex>, LatticeError> {
    let members: HashSet<G::Vertex> = hull.iter().copied().collect();
    let mut exposed = Vec::new();
    for &v in &hull {
        let nb = g.neighbors(v);
        if nb.iter().any(|w| w.is_none()) {
            return Err(LatticeError::HullEscape { depth: g.depth(v), interior: g.depth(v).saturating_sub(1) });
        }
        if nb.iter().flatten().any(|w| !members.contains(w)) {
            exposed.push(v);
        }
    }
    // only exposed vertices can be tangent: the fixed neighbour must be outside
    let mut tangent = Vec::new();
    for &v in &exposed {
        if tangent_slots(g, &hull, v)?.iter().any(|&t| t) {
            tangent.push(v);
        }
    }
    // nearest exposed vertex is reachable inside the hull
    let mut dist: HashMap<G::Vertex, u32> = exposed.iter().map(|&v| (v, 0)).collect();
    let mut queue: VecDeque<G::Vertex> = exposed.iter().copied().collect();
    while let Some(v) = queue.pop_front() {
        let d = dist[&v] + 1;
        for w in g.neighbors(v).into_iter().flatten() {
            if members.contains(&w) && !dist.contains_key(&w) {
                dist.insert(w, d);
                queue.push_back(w);
            }
        }
    }
    let boundary_distance = hull.iter().map(|v| dist.get(v).copied().unwrap_or(u32::MAX)).collect();
    Ok(HullReport { source, hull, exposed, tangent, boundary_distance })
}
