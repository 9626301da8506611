//! Self-avoiding walks from the root: exact counts, uniform sampling, the
//! pivot chain and the suffix reflections `R_i`.

pub mod enumerate;
pub mod pivot;
pub mod reflect;
pub mod sample;
pub mod uniform;

use std::collections::HashSet;
use std::fmt::Write as _;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{LatticeError, SawError};
use crate::lattice::graph::{RotationGraph, DEGREE};

pub use enumerate::{count_walks, enumerate, for_each_walk, for_each_walk_from};
pub use pivot::{pivot_chain, MoveSet, PivotConfig, PivotRun};
pub use reflect::{fiber_histogram, reflect_at, FiberHistogram, Reflection};
pub use sample::{sample_exact, ExactSampler};
pub use uniform::{uniformity, Uniformity};

/// A self-avoiding walk `γ(0), …, γ(n)` with `γ(0)` the root.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Walk<V> {
    vertices: Vec<V>,
}

impl<V: Copy + Eq + std::hash::Hash + std::fmt::Debug> Walk<V> {
    /// Checks rootedness, adjacency and self-avoidance.
    pub fn new<G: RotationGraph<Vertex = V>>(g: &G, vertices: Vec<V>) -> Result<Self, SawError> {
        if vertices.first() != Some(&g.root()) {
            return Err(SawError::NotRooted);
        }
        for (i, w) in vertices.windows(2).enumerate() {
            if !g.adjacent(w[0], w[1]) {
                return Err(SawError::NotAdjacent { index: i, next: i + 1 });
            }
        }
        if let Some(index) = first_repeat(&vertices) {
            return Err(SawError::NotSelfAvoiding { index });
        }
        Ok(Walk { vertices })
    }

    /// Wraps a vertex list the caller has already validated.
    pub fn from_trusted(vertices: Vec<V>) -> Self {
        Walk { vertices }
    }

    /// The walk taking rotation slot `slots[j]` at step `j`.
    pub fn from_slots<G: RotationGraph<Vertex = V>>(g: &G, slots: &[u8]) -> Result<Self, SawError> {
        let mut vertices = Vec::with_capacity(slots.len() + 1);
        let mut cur = g.root();
        vertices.push(cur);
        for &s in slots {
            cur = g
                .neighbor(cur, s as usize)
                .ok_or(SawError::Lattice(LatticeError::Escape { vertex: g.label(cur) }))?;
            vertices.push(cur);
        }
        Walk::new(g, vertices)
    }

    /// Number of steps `n`.
    pub fn steps(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn vertices(&self) -> &[V] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<V> {
        self.vertices
    }

    pub fn at(&self, i: usize) -> V {
        self.vertices[i]
    }

    pub fn end(&self) -> V {
        *self.vertices.last().expect("walks are nonempty")
    }

    /// Rotation slot taken at each step.
    pub fn slots<G: RotationGraph<Vertex = V>>(&self, g: &G) -> Vec<u8> {
        self.vertices
            .windows(2)
            .map(|w| g.slot_of(w[0], w[1]).expect("consecutive vertices are adjacent") as u8)
            .collect()
    }

    /// Slot sequence packed three bits per step. Unique among walks of the
    /// same length up to 21 steps.
    pub fn key<G: RotationGraph<Vertex = V>>(&self, g: &G) -> u64 {
        pack_slots(&self.slots(g))
    }

    pub fn ids<G: RotationGraph<Vertex = V>>(&self, g: &G) -> Vec<u128> {
        self.vertices.iter().map(|&v| g.id(v).expect("vertex id fits in 128 bits")).collect()
    }

    /// JSON array of vertex ids.
    pub fn to_json<G: RotationGraph<Vertex = V>>(&self, g: &G) -> String {
        let mut s = String::from("[");
        for (j, id) in self.ids(g).into_iter().enumerate() {
            if j > 0 {
                s.push(',');
            }
            write!(s, "{id}").expect("writing to a string");
        }
        s.push(']');
        s
    }
}

pub fn pack_slots(slots: &[u8]) -> u64 {
    debug_assert!(slots.len() <= 21);
    slots.iter().fold(0u64, |k, &s| (k << 3) | s as u64)
}

/// Position of the first vertex that already occurred earlier.
pub fn first_repeat<V: Copy + Eq + std::hash::Hash>(vs: &[V]) -> Option<usize> {
    if vs.len() <= 24 {
        (1..vs.len()).find(|&i| vs[..i].contains(&vs[i]))
    } else {
        let mut seen = HashSet::with_capacity(vs.len());
        vs.iter().position(|v| !seen.insert(*v))
    }
}

/// `graph_dist(γ(0), γ(n))`; the walk starts at the root, so this is the
/// depth of its endpoint.
pub fn displacement<G: RotationGraph>(g: &G, walk: &Walk<G::Vertex>) -> u32 {
    g.depth(walk.end())
}

/// Exact numbers `c_0, …, c_n` of self-avoiding walks from the root.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountVector(pub Vec<BigUint>);

impl CountVector {
    pub fn n(&self) -> usize {
        self.0.len() - 1
    }

    pub fn get(&self, k: usize) -> &BigUint {
        &self.0[k]
    }

    /// `n,c_n` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,c_n\n");
        for (k, c) in self.0.iter().enumerate() {
            writeln!(s, "{k},{c}").expect("writing to a string");
        }
        s
    }

    /// `c_0 = 1`, `c_1 ≤ 7` and `c_k ≤ 6 c_{k-1}` afterwards.
    pub fn check_bounds(&self) -> bool {
        let one = BigUint::from(1u32);
        if self.0.first() != Some(&one) {
            return false;
        }
        self.0.windows(2).enumerate().all(|(k, w)| {
            let factor = if k == 0 { DEGREE as u32 } else { DEGREE as u32 - 1 };
            w[1] <= &w[0] * factor
        })
    }
}

/// One line of the sampler's NDJSON stream.
pub fn sample_record<G: RotationGraph>(g: &G, walk: &Walk<G::Vertex>) -> String {
    format!(
        "{{\"n\":{},\"walk\":{},\"displacement\":{}}}",
        walk.steps(),
        walk.to_json(g),
        displacement(g, walk)
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{BuildMode, Lattice};

    #[test]
    fn walk_validation() {
        let b = Lattice::build_ball(3, BuildMode::Combinatorial).unwrap();
        let v1 = b.neighbor(0, 0).unwrap();
        let v2 = b.neighbor(v1, 3).unwrap();
        let w = Walk::new(&b, vec![0, v1, v2]).unwrap();
        assert_eq!(w.steps(), 2);
        assert_eq!(w.slots(&b), vec![0, 3]);
        assert_eq!(Walk::from_slots(&b, &[0, 3]).unwrap(), w);
        assert_eq!(Walk::new(&b, vec![v1]), Err(SawError::NotRooted));
        assert_eq!(Walk::new(&b, vec![0, v1, 0]), Err(SawError::NotSelfAvoiding { index: 2 }));
        assert_eq!(Walk::new(&b, vec![0, v2]), Err(SawError::NotAdjacent { index: 0, next: 1 }));
        assert_eq!(displacement(&b, &Walk::from_trusted(vec![0])), 0);
        assert_eq!(displacement(&b, &Walk::from_trusted(vec![0, v1])), 1);
        assert_eq!(w.to_json(&b), format!("[0,{v1},{v2}]"));
        assert_eq!(
            sample_record(&b, &w),
            format!("{{\"n\":2,\"walk\":[0,{v1},{v2}],\"displacement\":{}}}", b.depth(v2))
        );
    }

    #[test]
    fn count_csv() {
        let c = CountVector(vec![1u32, 7, 42, 238].into_iter().map(BigUint::from).collect());
        assert_eq!(c.to_csv(), "n,c_n\n0,1\n1,7\n2,42\n3,238\n");
        assert!(c.check_bounds());
    }
}
