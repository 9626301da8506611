//! Finite balls of the 7-regular triangulation and the algorithms on them.
//!
//! [`Lattice`] is an explicit ball with dense vertex ids. [`tiling::Tiling`]
//! is the whole (unbounded) triangulation. Both implement
//! [`graph::RotationGraph`], which is what the walk and hull code is written
//! against.

pub mod auto;
pub mod distortion;
pub mod geometric;
pub mod graph;
pub mod hull;
pub mod thin;
pub mod tiling;

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::LatticeError;
use crate::geom::HPoint;
use graph::{RotationGraph, DEGREE};
use tiling::{Node, Tiling};

/// Marker for an absent neighbour (outside the ball).
pub const NONE: u32 = u32::MAX;
/// Largest radius accepted by [`Lattice::build_ball`].
pub const MAX_RADIUS: u32 = 25;
/// Version tag of the lattice JSON document.
pub const LATTICE_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BuildMode {
    /// Orbit of the basepoint under the (2,3,7) reflection group.
    Geometric,
    /// Layer-by-layer construction from the local triangulation rule.
    Combinatorial,
}

impl std::str::FromStr for BuildMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "geometric" => Ok(BuildMode::Geometric),
            "combinatorial" => Ok(BuildMode::Combinatorial),
            other => Err(format!("unknown build mode `{other}`")),
        }
    }
}

/// A ball of graph radius `R` around the root (vertex 0).
#[derive(Debug, Clone)]
pub struct Lattice {
    radius: u32,
    mode: BuildMode,
    rot: Vec<[u32; DEGREE]>,
    back: Vec<[u8; DEGREE]>,
    depth: Vec<u8>,
    coords: Option<Vec<HPoint>>,
    interior_radius: u32,
}

impl Lattice {
    pub fn build_ball(radius: u32, mode: BuildMode) -> Result<Self, LatticeError> {
        if radius == 0 || radius > MAX_RADIUS {
            return Err(LatticeError::RadiusOutOfRange { radius, max: MAX_RADIUS });
        }
        match mode {
            BuildMode::Combinatorial => {
                let rot = combinatorial_rotation(radius);
                Self::from_rotation(radius, mode, rot, None)
            }
            BuildMode::Geometric => {
                let (rot, coords) = geometric::orbit_ball(radius)?;
                Self::from_rotation(radius, mode, rot, Some(coords))
            }
        }
    }

    /// Assemble a lattice from rotation lists, recomputing depths and checking
    /// the structural invariants.
    pub fn from_rotation(
        radius: u32,
        mode: BuildMode,
        rot: Vec<[u32; DEGREE]>,
        coords: Option<Vec<HPoint>>,
    ) -> Result<Self, LatticeError> {
        let n = rot.len();
        if n == 0 {
            return Err(LatticeError::Invalid("empty lattice".into()));
        }
        if let Some(c) = &coords {
            if c.len() != n {
                return Err(LatticeError::Invalid("coordinate count does not match vertex count".into()));
            }
        }
        let mut back = vec![[u8::MAX; DEGREE]; n];
        for v in 0..n {
            let mut seen = [NONE; DEGREE];
            for s in 0..DEGREE {
                let w = rot[v][s];
                if w == NONE {
                    continue;
                }
                if w as usize >= n {
                    return Err(LatticeError::Invalid(format!("vertex {v} lists unknown neighbour {w}")));
                }
                if w as usize == v {
                    return Err(LatticeError::Invalid(format!("self-loop at {v}")));
                }
                if seen.contains(&w) {
                    return Err(LatticeError::Invalid(format!("parallel edges between {v} and {w}")));
                }
                seen[s] = w;
                let Some(t) = rot[w as usize].iter().position(|&x| x as usize == v) else {
                    return Err(LatticeError::Invalid(format!("edge {v}-{w} is not symmetric")));
                };
                back[v][s] = t as u8;
            }
        }
        let depth = bfs_from(&rot, 0);
        if depth.iter().any(|&d| d == u32::MAX) {
            return Err(LatticeError::Invalid("lattice is not connected".into()));
        }
        if depth.iter().any(|&d| d > radius) {
            return Err(LatticeError::Invalid(format!("vertex beyond radius {radius}")));
        }
        let depth: Vec<u8> = depth.into_iter().map(|d| d as u8).collect();
        let interior_radius = (0..n)
            .filter(|&v| rot[v].contains(&NONE))
            .map(|v| depth[v] as u32)
            .min()
            .map_or(radius, |d| d.saturating_sub(1));
        Ok(Lattice { radius, mode, rot, back, depth, coords, interior_radius })
    }

    pub fn len(&self) -> usize {
        self.rot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rot.is_empty()
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn mode(&self) -> BuildMode {
        self.mode
    }

    /// Largest `r` such that every vertex within distance `r` of the root has
    /// all seven neighbours in the ball.
    pub fn interior_radius(&self) -> u32 {
        self.interior_radius
    }

    pub fn coords(&self) -> Option<&[HPoint]> {
        self.coords.as_deref()
    }

    pub fn rotation(&self, v: u32) -> [Option<u32>; DEGREE] {
        self.rot[v as usize].map(|w| (w != NONE).then_some(w))
    }

    pub fn raw_rotation(&self) -> &[[u32; DEGREE]] {
        &self.rot
    }

    pub fn is_interior(&self, v: u32) -> bool {
        !self.rot[v as usize].contains(&NONE)
    }

    pub fn contains(&self, v: u32) -> bool {
        (v as usize) < self.rot.len()
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.radius as usize + 1];
        for &d in &self.depth {
            out[d as usize] += 1;
        }
        out
    }

    fn check(&self, v: u32) -> Result<(), LatticeError> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(LatticeError::UnknownVertex(v as u64))
        }
    }

    /// Breadth-first distances from `src` inside the ball (`u32::MAX` when
    /// unreachable).
    pub fn bfs(&self, src: u32) -> Vec<u32> {
        bfs_from(&self.rot, src)
    }

    /// Shortest-path length inside the ball.
    pub fn graph_dist(&self, u: u32, v: u32) -> Result<u32, LatticeError> {
        self.check(u)?;
        self.check(v)?;
        Ok(self.bfs(u)[v as usize])
    }

    /// Every vertex on some shortest path from `u` to `v`, from two
    /// breadth-first trees. Sorted by id.
    pub fn interval(&self, u: u32, v: u32) -> Result<Vec<u32>, LatticeError> {
        self.check(u)?;
        self.check(v)?;
        let du = self.bfs(u);
        let dv = self.bfs(v);
        Ok(interval_from_tables(&du, &dv, v))
    }

    /// Local triangulation rule at every interior vertex: seven distinct
    /// neighbours whose cyclic order closes into a 7-cycle.
    pub fn check_triangulation(&self) -> Result<(), String> {
        for v in 0..self.len() as u32 {
            if !self.is_interior(v) {
                continue;
            }
            let nb = self.rot[v as usize];
            for s in 0..DEGREE {
                let (a, b) = (nb[s], nb[(s + 1) % DEGREE]);
                if !self.rot[a as usize].contains(&b) {
                    return Err(format!("neighbours {a} and {b} of {v} are not adjacent"));
                }
            }
        }
        Ok(())
    }

    /// Breadth-first relabelled rotation lists, minimised over the starting
    /// slot at the root and the orientation. Coordinates are ignored.
    pub fn canonical_form(&self) -> Vec<u32> {
        let mut best: Option<Vec<u32>> = None;
        for start in 0..DEGREE {
            for reversed in [false, true] {
                let enc = self.encode_from(start, reversed);
                if best.as_ref().map_or(true, |b| enc < *b) {
                    best = Some(enc);
                }
            }
        }
        best.expect("at least one encoding")
    }

    fn encode_from(&self, start: usize, reversed: bool) -> Vec<u32> {
        let n = self.len();
        let slot = |first: usize, j: usize| {
            if reversed {
                (first + DEGREE - j) % DEGREE
            } else {
                (first + j) % DEGREE
            }
        };
        let mut label = vec![NONE; n];
        let mut first = vec![0usize; n];
        let mut order = Vec::with_capacity(n);
        label[0] = 0;
        first[0] = start;
        order.push(0u32);
        let mut head = 0;
        while head < order.len() {
            let v = order[head] as usize;
            head += 1;
            for j in 0..DEGREE {
                let s = slot(first[v], j);
                let w = self.rot[v][s];
                if w != NONE && label[w as usize] == NONE {
                    label[w as usize] = order.len() as u32;
                    first[w as usize] = self.back[v][s] as usize;
                    order.push(w);
                }
            }
        }
        let mut enc = Vec::with_capacity(n * DEGREE);
        for &v in &order {
            for j in 0..DEGREE {
                let w = self.rot[v as usize][slot(first[v as usize], j)];
                enc.push(if w == NONE { NONE } else { label[w as usize] });
            }
        }
        enc
    }

    /// SHA-256 over the canonical form, hex encoded.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for x in self.canonical_form() {
            h.update(x.to_le_bytes());
        }
        let mut out = String::with_capacity(64);
        for b in h.finalize() {
            write!(out, "{b:02x}").expect("writing to a string");
        }
        out
    }

    pub fn to_document(&self) -> LatticeDocument {
        LatticeDocument {
            format: "heptasaw-lattice".into(),
            version: LATTICE_FORMAT_VERSION,
            radius: self.radius,
            mode: self.mode,
            digest: self.digest(),
            rotation: self.rot.iter().map(|r| r.map(|w| (w != NONE).then_some(w)).to_vec()).collect(),
            coords: self
                .coords
                .as_ref()
                .map(|c| c.iter().map(|p| p.0.map(round_sig12)).collect()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_document()).expect("lattice documents serialise")
    }

    pub fn from_json(text: &str) -> Result<Self, LatticeError> {
        let doc: LatticeDocument =
            serde_json::from_str(text).map_err(|e| LatticeError::Invalid(e.to_string()))?;
        Self::from_document(doc)
    }

    pub fn from_document(doc: LatticeDocument) -> Result<Self, LatticeError> {
        if doc.version != LATTICE_FORMAT_VERSION {
            return Err(LatticeError::Invalid(format!("unsupported version {}", doc.version)));
        }
        let mut rot = Vec::with_capacity(doc.rotation.len());
        for (v, list) in doc.rotation.iter().enumerate() {
            if list.len() != DEGREE {
                return Err(LatticeError::Invalid(format!("vertex {v} has {} slots", list.len())));
            }
            rot.push(std::array::from_fn(|s| list[s].unwrap_or(NONE)));
        }
        let coords = doc.coords.map(|c| c.into_iter().map(HPoint).collect());
        let lat = Self::from_rotation(doc.radius, doc.mode, rot, coords)?;
        if !doc.digest.is_empty() && lat.digest() != doc.digest {
            return Err(LatticeError::Invalid("digest does not match the rotation lists".into()));
        }
        Ok(lat)
    }
}

/// Serialised form of a [`Lattice`].
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct LatticeDocument {
    pub format: String,
    pub version: u32,
    pub radius: u32,
    pub mode: BuildMode,
    #[serde(default)]
    pub digest: String,
    pub rotation: Vec<Vec<Option<u32>>>,
    #[serde(default)]
    pub coords: Option<Vec<[f64; 3]>>,
}

fn round_sig12(x: f64) -> f64 {
    format!("{x:.11e}").parse().expect("formatted float parses")
}

fn bfs_from(rot: &[[u32; DEGREE]], src: u32) -> Vec<u32> {
    let mut dist = vec![u32::MAX; rot.len()];
    dist[src as usize] = 0;
    let mut queue = VecDeque::from([src]);
    while let Some(v) = queue.pop_front() {
        let d = dist[v as usize] + 1;
        for &w in &rot[v as usize] {
            if w != NONE && dist[w as usize] == u32::MAX {
                dist[w as usize] = d;
                queue.push_back(w);
            }
        }
    }
    dist
}

pub(crate) fn interval_from_tables(du: &[u32], dv: &[u32], v: u32) -> Vec<u32> {
    let total = du[v as usize];
    (0..du.len() as u32)
        .filter(|&w| {
            let (a, b) = (du[w as usize], dv[w as usize]);
            a != u32::MAX && b != u32::MAX && a + b == total
        })
        .collect()
}

/// Rotation lists of the radius-`r` ball, read off the tiling. Ids follow
/// the breadth-first order of [`Node::id`].
fn combinatorial_rotation(radius: u32) -> Vec<[u32; DEGREE]> {
    let tiling = Tiling;
    let total: u128 = tiling::layer_sizes(radius).iter().sum();
    let mut rot = Vec::with_capacity(total as usize);
    let mut layer = vec![Node::ROOT];
    for k in 0..=radius {
        for v in &layer {
            rot.push(std::array::from_fn(|s| match v.neighbor(s) {
                Some(w) if w.depth() <= radius => w.id().expect("small ids") as u32,
                _ => NONE,
            }));
        }
        if k < radius {
            layer = tiling.next_layer(&layer);
        }
    }
    rot
}

impl RotationGraph for Lattice {
    type Vertex = u32;

    fn root(&self) -> u32 {
        0
    }

    #[inline]
    fn depth(&self, v: u32) -> u32 {
        self.depth[v as usize] as u32
    }

    #[inline]
    fn neighbor(&self, v: u32, slot: usize) -> Option<u32> {
        let w = self.rot[v as usize][slot];
        (w != NONE).then_some(w)
    }

    #[inline]
    fn back_slot(&self, v: u32, slot: usize) -> Option<usize> {
        let t = self.back[v as usize][slot];
        (t != u8::MAX).then_some(t as usize)
    }

    fn slot_of(&self, v: u32, w: u32) -> Option<usize> {
        self.rot[v as usize].iter().position(|&x| x == w)
    }

    fn parents(&self, v: u32) -> Vec<u32> {
        let d = self.depth[v as usize];
        if d == 0 {
            return Vec::new();
        }
        self.rot[v as usize]
            .iter()
            .copied()
            .filter(|&w| w != NONE && self.depth[w as usize] + 1 == d)
            .collect()
    }

    fn label(&self, v: u32) -> String {
        v.to_string()
    }

    fn id(&self, v: u32) -> Option<u128> {
        Some(v as u128)
    }
}
