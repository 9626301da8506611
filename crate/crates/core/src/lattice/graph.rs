//! Rotation-system view of the triangulation shared by the finite ball and
//! the unbounded tiling, plus flag transport along paths.

use std::collections::VecDeque;

use rustc_hash::{FxHashMap as HashMap, FxHashSet as HashSet};
use std::fmt::Debug;
use std::hash::Hash;

use crate::error::LatticeError;

/// Vertex degree of the triangulation.
pub const DEGREE: usize = 7;

/// A planar triangulation given by a cyclic (counter-clockwise) neighbour
/// order at every vertex, rooted at a fixed vertex.
///
/// `depth(v)` must equal the graph distance from the root.
pub trait RotationGraph: Sync {
    type Vertex: Copy + Eq + Ord + Hash + Debug + Send + Sync;

    fn root(&self) -> Self::Vertex;

    fn depth(&self, v: Self::Vertex) -> u32;

    /// Neighbour of `v` in rotation slot `slot`, `None` outside the built region.
    fn neighbor(&self, v: Self::Vertex, slot: usize) -> Option<Self::Vertex>;

    /// Depth of the neighbour in `slot`.
    fn neighbor_depth(&self, v: Self::Vertex, slot: usize) -> Option<u32> {
        self.neighbor(v, slot).map(|w| self.depth(w))
    }

    fn neighbors(&self, v: Self::Vertex) -> [Option<Self::Vertex>; DEGREE] {
        std::array::from_fn(|s| self.neighbor(v, s))
    }

    fn slot_of(&self, v: Self::Vertex, w: Self::Vertex) -> Option<usize> {
        (0..DEGREE).find(|&s| self.neighbor(v, s) == Some(w))
    }

    /// Slot of `v` in the rotation of its neighbour at `slot`.
    fn back_slot(&self, v: Self::Vertex, slot: usize) -> Option<usize> {
        let w = self.neighbor(v, slot)?;
        self.slot_of(w, v)
    }

    /// Neighbours one step closer to the root (one or two of them).
    fn parents(&self, v: Self::Vertex) -> Vec<Self::Vertex> {
        let d = self.depth(v);
        if d == 0 {
            return Vec::new();
        }
        self.neighbors(v)
            .into_iter()
            .flatten()
            .filter(|&w| self.depth(w) + 1 == d)
            .collect()
    }

    fn adjacent(&self, v: Self::Vertex, w: Self::Vertex) -> bool {
        self.slot_of(v, w).is_some()
    }

    fn label(&self, v: Self::Vertex) -> String {
        format!("{v:?}")
    }

    /// Dense breadth-first id (the vertex id in a combinatorially built
    /// ball), when it fits.
    fn id(&self, v: Self::Vertex) -> Option<u128>;
}

/// Slot correspondence `u -> offset + sign * u (mod 7)` between a vertex and
/// its image under an automorphism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SlotMap {
    pub offset: u8,
    pub reversing: bool,
}

impl SlotMap {
    pub const IDENTITY: SlotMap = SlotMap { offset: 0, reversing: false };

    /// The map sending `from` to `to` with the given orientation behaviour.
    pub fn sending(from: usize, to: usize, reversing: bool) -> Self {
        let offset = if reversing { to + from } else { to + DEGREE - from };
        SlotMap { offset: (offset % DEGREE) as u8, reversing }
    }

    #[inline]
    pub fn map(&self, u: usize) -> usize {
        if self.reversing {
            (self.offset as usize + DEGREE - u) % DEGREE
        } else {
            (self.offset as usize + u) % DEGREE
        }
    }

    pub fn inverse(&self) -> SlotMap {
        if self.reversing {
            *self
        } else {
            SlotMap { offset: ((DEGREE - self.offset as usize) % DEGREE) as u8, reversing: false }
        }
    }
}

/// A pair (source vertex, image vertex) with the slot correspondence between
/// them; stepping it along an edge propagates the automorphism.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transport<V> {
    pub source: V,
    pub image: V,
    pub slots: SlotMap,
}

impl<V: Copy + Eq + Debug> Transport<V> {
    pub fn new(source: V, image: V, slots: SlotMap) -> Self {
        Transport { source, image, slots }
    }

    /// Move along source slot `slot`.
    pub fn step<G: RotationGraph<Vertex = V>>(&self, g: &G, slot: usize) -> Result<Self, LatticeError> {
        let next = g
            .neighbor(self.source, slot)
            .ok_or_else(|| LatticeError::Escape { vertex: g.label(self.source) })?;
        let islot = self.slots.map(slot);
        let inext = g
            .neighbor(self.image, islot)
            .ok_or_else(|| LatticeError::Escape { vertex: g.label(self.image) })?;
        let t = g.back_slot(self.source, slot).expect("adjacency is symmetric");
        let ti = g.back_slot(self.image, islot).expect("adjacency is symmetric");
        Ok(Transport {
            source: next,
            image: inext,
            slots: SlotMap::sending(t, ti, self.slots.reversing),
        })
    }

    /// Move to the adjacent source vertex `to`.
    pub fn step_to<G: RotationGraph<Vertex = V>>(&self, g: &G, to: V) -> Result<Self, LatticeError> {
        let slot = g.slot_of(self.source, to).ok_or_else(|| LatticeError::NotAdjacent {
            from: g.label(self.source),
            to: g.label(to),
        })?;
        self.step(g, slot)
    }

    pub fn reversed(&self) -> Transport<V> {
        Transport { source: self.image, image: self.source, slots: self.slots.inverse() }
    }
}

/// Orientation-preserving frame sending `(v, slot 0)` to `(root, slot 0)`.
pub fn root_frame<G: RotationGraph>(g: &G, v: G::Vertex) -> Transport<G::Vertex> {
    Transport::new(v, g.root(), SlotMap::IDENTITY)
}

/// Images of every vertex of `path` under the transport anchored at `path[0]`.
pub fn transport_path<G: RotationGraph>(
    g: &G,
    start: Transport<G::Vertex>,
    path: &[G::Vertex],
) -> Result<Vec<Transport<G::Vertex>>, LatticeError> {
    assert_eq!(path.first(), Some(&start.source), "path must start at the anchor");
    let mut out = Vec::with_capacity(path.len());
    let mut cur = start;
    out.push(cur);
    for &next in &path[1..] {
        cur = cur.step_to(g, next)?;
        out.push(cur);
    }
    Ok(out)
}

/// Transports for every member of a connected vertex set, by breadth-first
/// search inside the set from the anchor of `start`.
pub fn transport_set<G: RotationGraph>(
    g: &G,
    start: Transport<G::Vertex>,
    set: &HashSet<G::Vertex>,
) -> Result<HashMap<G::Vertex, Transport<G::Vertex>>, LatticeError> {
    let mut seen: HashMap<G::Vertex, Transport<G::Vertex>> = HashMap::with_capacity_and_hasher(set.len(), Default::default());
    seen.insert(start.source, start);
    let mut queue = VecDeque::from([start]);
    while let Some(t) = queue.pop_front() {
        for s in 0..DEGREE {
            match g.neighbor(t.source, s) {
                Some(w) if set.contains(&w) && !seen.contains_key(&w) => {
                    let nt = t.step(g, s)?;
                    seen.insert(w, nt);
                    queue.push_back(nt);
                }
                _ => {}
            }
        }
    }
    if seen.len() != set.len() {
        return Err(LatticeError::Disconnected { reached: seen.len(), total: set.len() });
    }
    Ok(seen)
}

/// Parent chain from `v` down to the root (first parent at each step).
pub fn path_to_root<G: RotationGraph>(g: &G, v: G::Vertex) -> Vec<G::Vertex> {
    let mut out = vec![v];
    let mut cur = v;
    while g.depth(cur) > 0 {
        cur = g.parents(cur)[0];
        out.push(cur);
    }
    out
}

/// A (not necessarily shortest) path from `u` to `v` through the root.
pub fn route<G: RotationGraph>(g: &G, u: G::Vertex, v: G::Vertex) -> Vec<G::Vertex> {
    let mut up = path_to_root(g, u);
    let mut down = path_to_root(g, v);
    // trim the common tail so the route turns at the deepest shared vertex
    while up.len() >= 2 && down.len() >= 2 && up[up.len() - 2] == down[down.len() - 2] {
        up.pop();
        down.pop();
    }
    down.pop();
    down.reverse();
    up.extend(down);
    up
}

/// Vertices on geodesics from the root to `v`: the closure of `v` under
/// taking parents.
pub fn root_interval<G: RotationGraph>(g: &G, v: G::Vertex) -> Vec<G::Vertex> {
    let mut seen = HashSet::from_iter([v]);
    let mut out = vec![v];
    let mut i = 0;
    while i < out.len() {
        for p in g.parents(out[i]) {
            if seen.insert(p) {
                out.push(p);
            }
        }
        i += 1;
    }
    out
}

/// Graph distance computed by transporting a path from `u` to `v` into the
/// root frame of `u`.
pub fn distance_along<G: RotationGraph>(g: &G, path: &[G::Vertex]) -> Result<u32, LatticeError> {
    let frames = transport_path(g, root_frame(g, path[0]), path)?;
    Ok(g.depth(frames.last().expect("nonempty path").image))
}

pub fn transport_distance<G: RotationGraph>(g: &G, u: G::Vertex, v: G::Vertex) -> Result<u32, LatticeError> {
    distance_along(g, &route(g, u, v))
}

/// Geodesic interval between the endpoints of `path`, via the root frame of
/// `path[0]`: the interval from the root to the image of the far endpoint is
/// its parent closure, which is mapped back.
pub fn interval_along<G: RotationGraph>(g: &G, path: &[G::Vertex]) -> Result<Vec<G::Vertex>, LatticeError> {
    let frames = transport_path(g, root_frame(g, path[0]), path)?;
    let end = *frames.last().expect("nonempty path");
    let back = end.reversed();
    let down = root_interval(g, back.source);
    let mut images: HashMap<G::Vertex, Transport<G::Vertex>> = HashMap::with_capacity_and_hasher(down.len(), Default::default());
    images.insert(back.source, back);
    let mut out = Vec::with_capacity(down.len());
    out.push(back.image);
    // down is in breadth-first order, so every member after the first has a
    // child earlier in the list
    let members: HashSet<G::Vertex> = down.iter().copied().collect();
    let mut queue = VecDeque::from([back]);
    while let Some(t) = queue.pop_front() {
        for s in 0..DEGREE {
            if let Some(w) = g.neighbor(t.source, s) {
                if members.contains(&w) && !images.contains_key(&w) {
                    let nt = t.step(g, s)?;
                    images.insert(w, nt);
                    out.push(nt.image);
                    queue.push_back(nt);
                }
            }
        }
    }
    debug_assert_eq!(out.len(), down.len());
    Ok(out)
}

pub fn transport_interval<G: RotationGraph>(
    g: &G,
    u: G::Vertex,
    v: G::Vertex,
) -> Result<Vec<G::Vertex>, LatticeError> {
    interval_along(g, &route(g, u, v))
}

/// Distances from the last vertex of `path` to every vertex of the path.
pub fn distances_to_end<G: RotationGraph>(g: &G, path: &[G::Vertex]) -> Result<Vec<u32>, LatticeError> {
    let rev: Vec<G::Vertex> = path.iter().rev().copied().collect();
    let frames = transport_path(g, root_frame(g, rev[0]), &rev)?;
    let mut out: Vec<u32> = frames.iter().map(|t| g.depth(t.image)).collect();
    out.reverse();
    Ok(out)
}

/// Breadth-first distances from a set of sources, up to `limit` steps.
pub fn bfs_within<G: RotationGraph>(
    g: &G,
    sources: impl IntoIterator<Item = G::Vertex>,
    limit: u32,
) -> HashMap<G::Vertex, u32> {
    let mut dist = HashMap::default();
    let mut queue = VecDeque::new();
    for s in sources {
        if dist.insert(s, 0).is_none() {
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        let d = dist[&v];
        if d == limit {
            continue;
        }
        for w in g.neighbors(v).into_iter().flatten() {
            if !dist.contains_key(&w) {
                dist.insert(w, d + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}
