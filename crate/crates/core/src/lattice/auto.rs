//! Lattice automorphisms as flag maps, evaluated by propagating the slot
//! correspondence along paths.

use std::collections::VecDeque;

use rustc_hash::{FxHashMap as HashMap, FxHashSet as HashSet};

use serde::{Deserialize, Serialize};

use crate::error::LatticeError;

use super::graph::{route, RotationGraph, SlotMap, Transport, DEGREE};
use super::Lattice;

/// The automorphism sending the flag `(anchor, anchor_slot)` to
/// `(image, image_slot)`. Reversing maps reverse the cyclic order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Automorphism<V> {
    pub anchor: V,
    pub anchor_slot: u8,
    pub image: V,
    pub image_slot: u8,
    pub reversing: bool,
}

impl<V: Copy + Eq + std::fmt::Debug> Automorphism<V> {
    /// The reflection fixing `v` and its neighbour in slot `k`.
    pub fn reflection(v: V, k: usize) -> Self {
        Automorphism { anchor: v, anchor_slot: k as u8, image: v, image_slot: k as u8, reversing: true }
    }

    pub fn is_reflection(&self) -> bool {
        self.reversing && self.anchor == self.image && self.anchor_slot == self.image_slot
    }

    /// +1 for orientation-preserving maps, -1 for reversing ones.
    pub fn sign(&self) -> i8 {
        if self.reversing {
            -1
        } else {
            1
        }
    }

    pub fn slot_map(&self) -> SlotMap {
        SlotMap::sending(self.anchor_slot as usize, self.image_slot as usize, self.reversing)
    }

    fn anchor_transport(&self) -> Transport<V> {
        Transport::new(self.anchor, self.image, self.slot_map())
    }
}

/// Reflections at `v` ordered by slot. `v` needs all seven neighbours.
pub fn reflections_at(lat: &Lattice, v: u32) -> Result<[Automorphism<u32>; DEGREE], LatticeError> {
    if !lat.contains(v) {
        return Err(LatticeError::UnknownVertex(v as u64));
    }
    if !lat.is_interior(v) {
        return Err(LatticeError::NotInterior {
            vertex: v.to_string(),
            depth: lat.depth(v),
            radius: lat.radius(),
        });
    }
    Ok(std::array::from_fn(|k| Automorphism::reflection(v, k)))
}

/// Evaluates one automorphism, remembering the transport at every vertex
/// it has visited. Not shared between threads: each worker owns its own.
pub struct Evaluator<'g, G: RotationGraph> {
    graph: &'g G,
    map: Automorphism<G::Vertex>,
    cache: HashMap<G::Vertex, Transport<G::Vertex>>,
}

impl<'g, G: RotationGraph> Evaluator<'g, G> {
    pub fn new(graph: &'g G, map: Automorphism<G::Vertex>) -> Self {
        let t = map.anchor_transport();
        Evaluator { graph, map, cache: HashMap::from_iter([(map.anchor, t)]) }
    }

    pub fn automorphism(&self) -> Automorphism<G::Vertex> {
        self.map
    }

    fn transport(&mut self, x: G::Vertex) -> Result<Transport<G::Vertex>, LatticeError> {
        if let Some(t) = self.cache.get(&x) {
            return Ok(*t);
        }
        let path = route(self.graph, self.map.anchor, x);
        // resume from the last cached vertex on the route
        let start = path.iter().rposition(|v| self.cache.contains_key(v)).expect("anchor is cached");
        let mut cur = self.cache[&path[start]];
        for &next in &path[start + 1..] {
            cur = cur.step_to(self.graph, next)?;
            self.cache.insert(next, cur);
        }
        Ok(cur)
    }

    pub fn image(&mut self, x: G::Vertex) -> Result<G::Vertex, LatticeError> {
        Ok(self.transport(x)?.image)
    }

    /// Image of a path, computed edge by edge from its first vertex.
    pub fn image_path(&mut self, path: &[G::Vertex]) -> Result<Vec<G::Vertex>, LatticeError> {
        let Some(&first) = path.first() else { return Ok(Vec::new()) };
        let mut cur = self.transport(first)?;
        let mut out = Vec::with_capacity(path.len());
        out.push(cur.image);
        for &next in &path[1..] {
            cur = match self.cache.get(&next) {
                Some(t) => *t,
                None => {
                    let t = cur.step_to(self.graph, next)?;
                    self.cache.insert(next, t);
                    t
                }
            };
            out.push(cur.image);
        }
        Ok(out)
    }

    /// Images of every member of `set`, in the order of `set`. Propagates
    /// inside the set where it is connected.
    pub fn image_set(&mut self, set: &[G::Vertex]) -> Result<Vec<G::Vertex>, LatticeError> {
        let members: HashSet<G::Vertex> = set.iter().copied().collect();
        let mut queue: VecDeque<G::Vertex> = VecDeque::new();
        for &x in set {
            if self.cache.contains_key(&x) {
                queue.push_back(x);
            }
        }
        let mut pending: Vec<G::Vertex> = set.to_vec();
        loop {
            while let Some(x) = queue.pop_front() {
                let t = self.cache[&x];
                for s in 0..DEGREE {
                    if let Some(w) = self.graph.neighbor(x, s) {
                        if members.contains(&w) && !self.cache.contains_key(&w) {
                            let nt = t.step(self.graph, s)?;
                            self.cache.insert(w, nt);
                            queue.push_back(w);
                        }
                    }
                }
            }
            pending.retain(|x| !self.cache.contains_key(x));
            match pending.first() {
                Some(&x) => {
                    self.transport(x)?;
                    queue.push_back(x);
                }
                None => break,
            }
        }
        Ok(set.iter().map(|x| self.cache[x].image).collect())
    }
}

/// Image of a single vertex.
pub fn apply<G: RotationGraph>(
    g: &G,
    map: Automorphism<G::Vertex>,
    x: G::Vertex,
) -> Result<G::Vertex, LatticeError> {
    Evaluator::new(g, map).image(x)
}

/// Image of a path.
pub fn apply_path<G: RotationGraph>(
    g: &G,
    map: Automorphism<G::Vertex>,
    path: &[G::Vertex],
) -> Result<Vec<G::Vertex>, LatticeError> {
    Evaluator::new(g, map).image_path(path)
}

/// Images of `set` under the orientation-preserving map sending
/// `(x0, slot 0)` to `(root, slot 0)`.
pub fn frame_images<G: RotationGraph>(
    g: &G,
    set: &[G::Vertex],
    x0: G::Vertex,
) -> Result<Vec<G::Vertex>, LatticeError> {
    let frame = Automorphism { anchor: x0, anchor_slot: 0, image: g.root(), image_slot: 0, reversing: false };
    Evaluator::new(g, frame).image_set(set)
}

/// For each slot `k`, whether the reflection at `(x0, k)` meets `set` only
/// in `x0`.
///
/// The test runs in the root frame of `x0`, where the reflection fixes the
/// root and so never leaves the layers the framed set occupies.
pub fn tangent_slots<G: RotationGraph>(
    g: &G,
    set: &[G::Vertex],
    x0: G::Vertex,
) -> Result<[bool; DEGREE], LatticeError> {
    let framed = frame_images(g, set, x0)?;
    let root = g.root();
    let members: HashSet<G::Vertex> = framed.iter().copied().collect();
    let mut out = [false; DEGREE];
    for (k, slot) in out.iter_mut().enumerate() {
        if g.neighbor(root, k).map_or(false, |w| members.contains(&w)) {
            continue;
        }
        let mut ev = Evaluator::new(g, Automorphism::reflection(root, k));
        let mut tangent = true;
        for &y in &framed {
            if y != root && members.contains(&ev.image(y)?) {
                tangent = false;
                break;
            }
        }
        *slot = tangent;
    }
    Ok(out)
}

/// The first reflection at `x0` (by slot) with `g(K) ∩ K = {x0}`.
pub fn tangent_reflection<G: RotationGraph>(
    g: &G,
    set: &[G::Vertex],
    x0: G::Vertex,
) -> Result<Option<Automorphism<G::Vertex>>, LatticeError> {
    let slots = tangent_slots(g, set, x0)?;
    Ok(slots.iter().position(|&t| t).map(|k| Automorphism::reflection(x0, k)))
}

/// Direct version of [`tangent_slots`]: reflects the set at `x0` itself.
/// Needs room around the set for the images.
pub fn tangent_slots_direct<G: RotationGraph>(
    g: &G,
    set: &[G::Vertex],
    x0: G::Vertex,
) -> Result<[bool; DEGREE], LatticeError> {
    let members: HashSet<G::Vertex> = set.iter().copied().collect();
    let mut out = [false; DEGREE];
    for (k, slot) in out.iter_mut().enumerate() {
        let images = Evaluator::new(g, Automorphism::reflection(x0, k)).image_set(set)?;
        *slot = images.iter().all(|y| *y == x0 || !members.contains(y));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::BuildMode;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ball(r: u32) -> Lattice {
        Lattice::build_ball(r, BuildMode::Combinatorial).unwrap()
    }

    #[test]
    fn seven_reflections_fix_their_edge() {
        let b = ball(5);
        for v in [0, 3, 20] {
            let refl = reflections_at(&b, v).unwrap();
            assert_eq!(refl.len(), 7);
            for (k, g) in refl.iter().enumerate() {
                assert_eq!(apply(&b, *g, v).unwrap(), v);
                let w = b.neighbor(v, k).unwrap();
                assert_eq!(apply(&b, *g, w).unwrap(), w);
                for j in 1..7 {
                    let a = b.neighbor(v, (k + j) % 7).unwrap();
                    let c = b.neighbor(v, (k + 7 - j) % 7).unwrap();
                    assert_eq!(apply(&b, *g, a).unwrap(), c);
                }
            }
        }
    }

    #[test]
    fn rim_vertices_are_rejected() {
        let b = ball(3);
        let rim = (0..b.len() as u32).find(|&v| b.depth(v) == 3).unwrap();
        assert!(matches!(reflections_at(&b, rim), Err(LatticeError::NotInterior { .. })));
    }

    #[test]
    fn reflections_are_isometric_involutions() {
        let b = ball(8);
        let inner: Vec<u32> = (0..b.len() as u32).filter(|&v| b.depth(v) <= 2).collect();
        let near: Vec<u32> = (0..b.len() as u32).filter(|&v| b.depth(v) <= 3).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let v = inner[rng.gen_range(0..inner.len())];
            let g = Automorphism::reflection(v, rng.gen_range(0..7));
            let mut ev = Evaluator::new(&b, g);
            let (x, y) = (near[rng.gen_range(0..near.len())], near[rng.gen_range(0..near.len())]);
            let (gx, gy) = (ev.image(x).unwrap(), ev.image(y).unwrap());
            assert_eq!(b.graph_dist(gx, gy).unwrap(), b.graph_dist(x, y).unwrap());
            assert_eq!(apply(&b, g, gx).unwrap(), x);
        }
    }

    #[test]
    fn escape_is_reported() {
        let b = ball(3);
        let v = b.neighbor(0, 0).unwrap();
        let far = (0..b.len() as u32).find(|&x| b.depth(x) == 3 && b.graph_dist(v, x).unwrap() == 4);
        // a reflection at a layer-1 vertex pushes the far side of the ball out
        let mut escaped = false;
        for k in 0..7 {
            if let Some(x) = far {
                if let Err(LatticeError::Escape { .. }) = apply(&b, Automorphism::reflection(v, k), x) {
                    escaped = true;
                }
            }
        }
        assert!(escaped);
    }

    #[test]
    fn tangency() {
        let b = ball(5);
        assert_eq!(tangent_reflection(&b, &[0], 0).unwrap(), Some(Automorphism::reflection(0, 0)));
        assert_eq!(tangent_reflection(&b, &[5], 5).unwrap(), Some(Automorphism::reflection(5, 0)));
        let star: Vec<u32> = (0..8).collect();
        assert_eq!(tangent_reflection(&b, &star, 0).unwrap(), None);
    }

    #[test]
    fn framed_and_direct_tangency_agree() {
        let b = ball(9);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let small: Vec<u32> = (0..b.len() as u32).filter(|&v| b.depth(v) <= 2).collect();
        for _ in 0..30 {
            let mut set: Vec<u32> = (0..4).map(|_| small[rng.gen_range(0..small.len())]).collect();
            set.sort();
            set.dedup();
            let x0 = set[rng.gen_range(0..set.len())];
            assert_eq!(tangent_slots(&b, &set, x0).unwrap(), tangent_slots_direct(&b, &set, x0).unwrap());
        }
    }
}
