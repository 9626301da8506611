//! The unbounded {3,7} triangulation, addressed by breadth-first layers.
//!
//! Every vertex at depth `k >= 1` has one or two neighbours at depth `k - 1`
//! (type A: one parent, four children; type B: two parents, three children).
//! Walking around a layer, each vertex owns a block of children on the next
//! layer: its private children followed by the child it shares with the next
//! vertex of its own layer. A block is `AAB` below an A vertex and `AB` below
//! a B vertex. A vertex is therefore addressed by its index on layer 1 and
//! its offset inside the parent's block at every deeper layer.
//!
//! Rotation order (counter-clockwise, slot 0 first):
//!
//! ```text
//! root : h0 h1 h2 h3 h4 h5 h6
//! A    : P        prev  c_prev  c0 c1 c2  next
//! B    : next(P)  P     prev    c_prev c0 c1  next
//! ```
//!
//! where `c_prev` is the shared child of `prev` and the last child is shared
//! with `next`.

use super::graph::{RotationGraph, DEGREE};

/// Deepest layer representable by a [`Node`].
pub const MAX_DEPTH: u32 = 128;

/// A vertex of the tiling.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Node {
    depth: u16,
    head: u8,
    digits: [u64; 4],
    btype: [u64; 2],
}

impl std::fmt::Debug for Node {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.address())
    }
}

#[inline]
fn block_len(is_b: bool) -> u8 {
    if is_b {
        2
    } else {
        3
    }
}

impl Node {
    pub const ROOT: Node = Node { depth: 0, head: 0, digits: [0; 4], btype: [0; 2] };

    pub fn depth(&self) -> u32 {
        self.depth as u32
    }

    #[inline]
    fn digit(&self, level: u32) -> u8 {
        let i = (level - 2) as usize;
        ((self.digits[i / 32] >> (2 * (i % 32))) & 3) as u8
    }

    #[inline]
    fn set_digit(&mut self, level: u32, d: u8) {
        let i = (level - 2) as usize;
        let sh = 2 * (i % 32);
        self.digits[i / 32] = (self.digits[i / 32] & !(3 << sh)) | ((d as u64) << sh);
    }

    #[inline]
    fn b_at(&self, level: u32) -> bool {
        let i = (level - 1) as usize;
        (self.btype[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    fn set_b(&mut self, level: u32, b: bool) {
        let i = (level - 1) as usize;
        if b {
            self.btype[i / 64] |= 1 << (i % 64);
        } else {
            self.btype[i / 64] &= !(1 << (i % 64));
        }
    }

    /// True for vertices with two parents.
    pub fn is_shared(&self) -> bool {
        self.depth >= 1 && self.b_at(self.depth as u32)
    }

    /// Number of children on the next layer owned by this vertex.
    fn own_block(&self) -> u8 {
        if self.depth == 0 {
            DEGREE as u8
        } else {
            block_len(self.is_shared())
        }
    }

    /// Human-readable address, e.g. `3.0.2.1`.
    pub fn address(&self) -> String {
        if self.depth == 0 {
            return "root".to_string();
        }
        let mut s = self.head.to_string();
        for level in 2..=self.depth as u32 {
            s.push('.');
            s.push_str(&self.digit(level).to_string());
        }
        s
    }

    /// Primary parent (the one whose block contains this vertex).
    pub fn parent(&self) -> Node {
        let mut p = *self;
        let level = self.depth as u32;
        match level {
            0 => {}
            1 => p = Node::ROOT,
            _ => {
                p.set_digit(level, 0);
                p.set_b(level, false);
                p.depth -= 1;
            }
        }
        p
    }

    /// The `j`-th child in this vertex's block.
    pub fn child(&self, j: u8) -> Option<Node> {
        let level = self.depth as u32 + 1;
        if level > MAX_DEPTH {
            return None;
        }
        let mut c = *self;
        c.depth += 1;
        if level == 1 {
            c.head = j;
        } else {
            let len = self.own_block();
            debug_assert!(j < len);
            c.set_digit(level, j);
            c.set_b(level, j == len - 1);
        }
        Some(c)
    }

    fn last_child(&self) -> Option<Node> {
        self.child(self.own_block() - 1)
    }

    /// Next vertex counter-clockwise on the same layer.
    pub fn next(&self) -> Node {
        let level = self.depth as u32;
        match level {
            0 => Node::ROOT,
            1 => {
                let mut n = *self;
                n.head = (self.head + 1) % DEGREE as u8;
                n
            }
            _ => {
                let len = block_len(self.b_at(level - 1));
                let d = self.digit(level);
                if d + 1 < len {
                    let mut n = *self;
                    n.set_digit(level, d + 1);
                    n.set_b(level, d + 1 == len - 1);
                    n
                } else {
                    self.parent().next().child(0).expect("same depth")
                }
            }
        }
    }

    /// Previous vertex on the same layer.
    pub fn prev(&self) -> Node {
        let level = self.depth as u32;
        match level {
            0 => Node::ROOT,
            1 => {
                let mut n = *self;
                n.head = (self.head + DEGREE as u8 - 1) % DEGREE as u8;
                n
            }
            _ => {
                let d = self.digit(level);
                if d > 0 {
                    let mut n = *self;
                    n.set_digit(level, d - 1);
                    n.set_b(level, false);
                    n
                } else {
                    self.parent().prev().last_child().expect("same depth")
                }
            }
        }
    }

    /// Neighbour in rotation slot `slot`.
    pub fn neighbor(&self, slot: usize) -> Option<Node> {
        if self.depth == 0 {
            return self.child(slot as u8);
        }
        if self.is_shared() {
            match slot {
                0 => Some(self.parent().next()),
                1 => Some(self.parent()),
                2 => Some(self.prev()),
                3 => self.prev().last_child(),
                4 => self.child(0),
                5 => self.child(1),
                _ => Some(self.next()),
            }
        } else {
            match slot {
                0 => Some(self.parent()),
                1 => Some(self.prev()),
                2 => self.prev().last_child(),
                3 => self.child(0),
                4 => self.child(1),
                5 => self.child(2),
                _ => Some(self.next()),
            }
        }
    }

    /// Index on its layer (counter-clockwise from `h0`) and the number of type-A
    /// vertices before it on that layer.
    fn layer_rank(&self) -> Option<(u128, u128)> {
        if self.depth == 0 {
            return Some((0, 0));
        }
        let mut idx = self.head as u128;
        let mut a_before = idx;
        for level in 2..=self.depth as u32 {
            let d = self.digit(level) as u128;
            let nidx = idx.checked_mul(2)?.checked_add(a_before)?.checked_add(d)?;
            a_before = a_before.checked_add(idx)?.checked_add(d)?;
            idx = nidx;
        }
        Some((idx, a_before))
    }

    /// Dense breadth-first id: vertices are numbered layer by layer,
    /// counter-clockwise from `h0` within a layer. Matches the ids of a
    /// combinatorially built ball.
    pub fn id(&self) -> Option<u128> {
        let (idx, _) = self.layer_rank()?;
        let mut base: u128 = 1;
        let (mut size, mut a_count): (u128, u128) = (7, 7);
        for _ in 1..self.depth {
            base = base.checked_add(size)?;
            let next = size.checked_mul(2)?.checked_add(a_count)?;
            a_count = a_count.checked_add(size)?;
            size = next;
        }
        if self.depth == 0 {
            Some(0)
        } else {
            base.checked_add(idx)
        }
    }
}

/// Number of vertices on each layer `0..=r`.
pub fn layer_sizes(r: u32) -> Vec<u128> {
    let mut out = vec![1u128];
    let (mut size, mut a_count): (u128, u128) = (7, 7);
    for _ in 1..=r {
        out.push(size);
        let next = size * 2 + a_count;
        a_count += size;
        size = next;
    }
    out
}

/// The whole triangulation, rooted at [`Node::ROOT`].
#[derive(Debug, Clone, Copy, Default)]
pub struct Tiling;

impl Tiling {
    /// Vertices of a layer in counter-clockwise order.
    pub fn layer(&self, k: u32) -> Vec<Node> {
        let mut cur = vec![Node::ROOT];
        for _ in 0..k {
            let mut next = Vec::new();
            for v in &cur {
                for j in 0..v.own_block() {
                    next.push(v.child(j).expect("depth within range"));
                }
            }
            cur = next;
        }
        cur
    }

    /// The layer after `layer` (which must be a whole layer in order).
    pub fn next_layer(&self, layer: &[Node]) -> Vec<Node> {
        let mut next = Vec::with_capacity(layer.len() * 3);
        for v in layer {
            for j in 0..v.own_block() {
                next.push(v.child(j).expect("depth within range"));
            }
        }
        next
    }
}

impl RotationGraph for Tiling {
    type Vertex = Node;

    fn root(&self) -> Node {
        Node::ROOT
    }

    fn depth(&self, v: Node) -> u32 {
        v.depth as u32
    }

    fn neighbor(&self, v: Node, slot: usize) -> Option<Node> {
        v.neighbor(slot)
    }

    fn neighbor_depth(&self, v: Node, slot: usize) -> Option<u32> {
        let d = v.depth as u32;
        if d == 0 {
            return Some(1);
        }
        let step: i8 = if v.is_shared() {
            [-1, -1, 0, 1, 1, 1, 0][slot]
        } else {
            [-1, 0, 1, 1, 1, 1, 0][slot]
        };
        let e = (d as i64 + step as i64) as u32;
        (e <= MAX_DEPTH).then_some(e)
    }

    fn parents(&self, v: Node) -> Vec<Node> {
        match v.depth {
            0 => Vec::new(),
            _ if v.is_shared() => vec![v.parent().next(), v.parent()],
            _ => vec![v.parent()],
        }
    }

    fn label(&self, v: Node) -> String {
        v.address()
    }

    fn id(&self, v: Node) -> Option<u128> {
        v.id()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{HashMap, HashSet, VecDeque};

    #[test]
    fn layer_sizes_recurrence() {
        let sizes = layer_sizes(12);
        assert_eq!(&sizes[..4], &[1, 7, 21, 56]);
        for k in 2..12 {
            assert_eq!(sizes[k + 1], 3 * sizes[k] - sizes[k - 1]);
        }
        let t = Tiling;
        for k in 0..=6 {
            assert_eq!(t.layer(k as u32).len() as u128, sizes[k]);
        }
    }

    #[test]
    fn layers_are_cycles_and_ids_dense() {
        let t = Tiling;
        let mut id = 0u128;
        for k in 0..=6u32 {
            let layer = t.layer(k);
            for (i, v) in layer.iter().enumerate() {
                assert_eq!(v.id(), Some(id));
                id += 1;
                if k > 0 {
                    assert_eq!(v.next(), layer[(i + 1) % layer.len()]);
                    assert_eq!(v.prev(), layer[(i + layer.len() - 1) % layer.len()]);
                }
            }
        }
    }

    #[test]
    fn local_structure_is_a_triangulation() {
        let t = Tiling;
        let mut all = vec![];
        for k in 0..=6 {
            all.extend(t.layer(k));
        }
        for &v in &all {
            let nb = t.neighbors(v);
            let nb: Vec<Node> = nb.into_iter().map(|w| w.unwrap()).collect();
            let distinct: HashSet<Node> = nb.iter().copied().collect();
            assert_eq!(distinct.len(), 7, "{v:?}");
            assert!(!distinct.contains(&v));
            for s in 0..7 {
                // symmetric adjacency
                assert!(t.slot_of(nb[s], v).is_some(), "{v:?} -> {:?}", nb[s]);
                // consecutive neighbours are adjacent
                assert!(t.adjacent(nb[s], nb[(s + 1) % 7]), "{v:?} slot {s}");
            }
            // neighbour depths differ by at most one
            for w in &nb {
                assert!((w.depth() as i64 - v.depth() as i64).abs() <= 1);
            }
        }
    }

    #[test]
    fn orientation_is_consistent() {
        // along every edge (v, w) the slots of the two common neighbours are
        // traversed in opposite directions, as in an oriented surface
        let t = Tiling;
        let mut all = vec![];
        for k in 0..=5 {
            all.extend(t.layer(k));
        }
        for &v in &all {
            for s in 0..7 {
                let w = t.neighbor(v, s).unwrap();
                let left = t.neighbor(v, (s + 1) % 7).unwrap();
                let back = t.slot_of(w, v).unwrap();
                assert_eq!(t.neighbor(w, (back + 6) % 7), Some(left));
            }
        }
    }

    #[test]
    fn depth_is_bfs_distance() {
        let t = Tiling;
        let mut dist: HashMap<Node, u32> = HashMap::from([(Node::ROOT, 0)]);
        let mut q = VecDeque::from([Node::ROOT]);
        while let Some(v) = q.pop_front() {
            let d = dist[&v];
            if d == 7 {
                continue;
            }
            for w in t.neighbors(v).into_iter().flatten() {
                dist.entry(w).or_insert_with(|| {
                    q.push_back(w);
                    d + 1
                });
            }
        }
        for (v, d) in dist {
            if d <= 6 {
                assert_eq!(v.depth(), d, "{v:?}");
                for s in 0..7 {
                    assert_eq!(t.neighbor_depth(v, s), Some(t.neighbor(v, s).unwrap().depth()));
                }
            }
        }
    }

    #[test]
    fn parents_match_depths() {
        let t = Tiling;
        for k in 1..=6 {
            for v in t.layer(k) {
                let p = t.parents(v);
                let q: Vec<Node> =
                    t.neighbors(v).into_iter().flatten().filter(|w| w.depth() + 1 == v.depth()).collect();
                let ps: HashSet<Node> = p.iter().copied().collect();
                let qs: HashSet<Node> = q.iter().copied().collect();
                assert_eq!(ps, qs);
                assert_eq!(p.len(), if v.is_shared() { 2 } else { 1 });
            }
        }
    }

    #[test]
    fn deep_nodes_stay_representable() {
        let mut v = Node::ROOT;
        for _ in 0..MAX_DEPTH {
            v = v.child(0).unwrap();
        }
        assert_eq!(v.depth(), MAX_DEPTH);
        assert!(v.child(0).is_none());
        assert!(v.next().prev() == v);
        assert!(v.id().is_none() || v.depth() < 90);
    }
}
