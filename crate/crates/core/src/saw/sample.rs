//! Exactly uniform sampling by unranking.
//!
//! Completion counts for every walk prefix up to a fixed depth are stored in
//! a trie; below it they are recounted on the fly during the descent.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::SawError;
use crate::lattice::graph::DEGREE;
use crate::lattice::{Lattice, NONE};

use super::Walk;

/// Deepest prefix kept in the trie.
pub const TRIE_DEPTH: usize = 7;
/// Samples drawn from one RNG stream.
pub const BLOCK: usize = 1024;

#[derive(Debug, Clone, Copy)]
struct TrieNode {
    vertex: u32,
    first_child: u32,
    children: u8,
    count: u128,
}

pub struct ExactSampler<'a> {
    lat: &'a Lattice,
    n: usize,
    depth: usize,
    nodes: Vec<TrieNode>,
}

impl<'a> ExactSampler<'a> {
    pub fn new(lat: &'a Lattice, n: usize) -> Result<Self, SawError> {
        Self::with_trie_depth(lat, n, TRIE_DEPTH)
    }

    pub fn with_trie_depth(lat: &'a Lattice, n: usize, trie_depth: usize) -> Result<Self, SawError> {
        if n as u64 > lat.interior_radius() as u64 {
            return Err(SawError::TooLong { n, interior: lat.interior_radius() });
        }
        let depth = trie_depth.min(n);
        let rot = lat.raw_rotation();
        let mut nodes = vec![TrieNode { vertex: 0, first_child: 0, children: 0, count: 0 }];
        let mut leaves: Vec<(u32, Vec<u32>)> = Vec::new();
        let mut path = vec![0u32];
        grow(rot, &mut nodes, 0, &mut path, depth, &mut leaves);

        let remaining = n - depth;
        let counts: Vec<u128> = leaves
            .par_iter()
            .map_init(
                || vec![false; rot.len()],
                |visited, (_, path)| {
                    for &v in path {
                        visited[v as usize] = true;
                    }
                    let c = completions(rot, visited, *path.last().expect("nonempty"), remaining);
                    for &v in path {
                        visited[v as usize] = false;
                    }
                    c
                },
            )
            .collect();
        for ((id, _), c) in leaves.iter().zip(counts) {
            nodes[*id as usize].count = c;
        }
        // children are stored after their parents
        for i in (0..nodes.len()).rev() {
            let TrieNode { first_child, children, .. } = nodes[i];
            if children > 0 {
                let s: u128 = (0..children as usize).map(|j| nodes[first_child as usize + j].count).sum();
                nodes[i].count = s;
            }
        }
        if nodes[0].count == 0 {
            return Err(SawError::Empty(n));
        }
        Ok(ExactSampler { lat, n, depth, nodes })
    }

    /// `c_n`.
    pub fn total(&self) -> u128 {
        self.nodes[0].count
    }

    /// The walk of the given rank in slot order, `0 <= rank < total()`.
    pub fn unrank(&self, mut rank: u128) -> Walk<u32> {
        assert!(rank < self.total(), "rank out of range");
        let rot = self.lat.raw_rotation();
        let mut path = Vec::with_capacity(self.n + 1);
        path.push(0u32);
        let mut node = 0usize;
        for _ in 0..self.depth {
            let TrieNode { first_child, children, .. } = self.nodes[node];
            let mut chosen = None;
            for j in 0..children as usize {
                let c = &self.nodes[first_child as usize + j];
                if rank < c.count {
                    chosen = Some(first_child as usize + j);
                    break;
                }
                rank -= c.count;
            }
            node = chosen.expect("rank below subtree total");
            path.push(self.nodes[node].vertex);
        }
        for step in self.depth..self.n {
            let v = *path.last().expect("nonempty");
            let left = self.n - step - 1;
            let mut next = None;
            for &w in &rot[v as usize] {
                if w == NONE || path.contains(&w) {
                    continue;
                }
                path.push(w);
                let c = path_completions(rot, &mut path, left);
                path.pop();
                if rank < c {
                    next = Some(w);
                    break;
                }
                rank -= c;
            }
            path.push(next.expect("rank below subtree total"));
        }
        Walk::from_trusted(path)
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Walk<u32> {
        self.unrank(rng.gen_range(0..self.total()))
    }

    /// `k` samples; sample `j` comes from stream `j / BLOCK` of the seeded
    /// generator, so the output does not depend on the number of workers.
    pub fn sample_many(&self, k: usize, seed: u64) -> Vec<Walk<u32>> {
        let blocks = k.div_ceil(BLOCK);
        let out: Vec<Vec<Walk<u32>>> = (0..blocks)
            .into_par_iter()
            .map(|b| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(b as u64);
                let len = BLOCK.min(k - b * BLOCK);
                (0..len).map(|_| self.sample(&mut rng)).collect()
            })
            .collect();
        out.into_iter().flatten().collect()
    }
}

/// `k` independent uniform `n`-step walks.
pub fn sample_exact(lat: &Lattice, n: usize, k: usize, seed: u64) -> Result<Vec<Walk<u32>>, SawError> {
    Ok(ExactSampler::new(lat, n)?.sample_many(k, seed))
}

fn grow(
    rot: &[[u32; DEGREE]],
    nodes: &mut Vec<TrieNode>,
    id: usize,
    path: &mut Vec<u32>,
    depth: usize,
    leaves: &mut Vec<(u32, Vec<u32>)>,
) {
    if path.len() == depth + 1 {
        leaves.push((id as u32, path.clone()));
        return;
    }
    let v = *path.last().expect("nonempty");
    let next: Vec<u32> = rot[v as usize].iter().copied().filter(|&w| w != NONE && !path.contains(&w)).collect();
    let first = nodes.len();
    nodes[id].first_child = first as u32;
    nodes[id].children = next.len() as u8;
    for &w in &next {
        nodes.push(TrieNode { vertex: w, first_child: 0, children: 0, count: 0 });
    }
    for (j, &w) in next.iter().enumerate() {
        path.push(w);
        grow(rot, nodes, first + j, path, depth, leaves);
        path.pop();
    }
}

fn completions(rot: &[[u32; DEGREE]], visited: &mut [bool], v: u32, left: usize) -> u128 {
    if left == 0 {
        return 1;
    }
    let mut total = 0;
    for &w in &rot[v as usize] {
        if w != NONE && !visited[w as usize] {
            if left == 1 {
                total += 1;
            } else {
                visited[w as usize] = true;
                total += completions(rot, visited, w, left - 1);
                visited[w as usize] = false;
            }
        }
    }
    total
}

/// Completions of `path` (ending at its last vertex) by `left` more steps.
fn path_completions(rot: &[[u32; DEGREE]], path: &mut Vec<u32>, left: usize) -> u128 {
    if left == 0 {
        return 1;
    }
    let v = *path.last().expect("nonempty");
    let mut total = 0;
    for &w in &rot[v as usize] {
        if w != NONE && !path.contains(&w) {
            path.push(w);
            total += path_completions(rot, path, left - 1);
            path.pop();
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::BuildMode;
    use crate::saw::enumerate::{enumerate, for_each_walk};

    #[test]
    fn unranking_lists_walks_in_slot_order() {
        let b = Lattice::build_ball(6, BuildMode::Combinatorial).unwrap();
        for depth in [0, 2, 5, 7] {
            let s = ExactSampler::with_trie_depth(&b, 5, depth).unwrap();
            let c = enumerate(&b, 5).unwrap();
            assert_eq!(num_bigint::BigUint::from(s.total()), c.0[5]);
            let mut r = 0u128;
            for_each_walk(&b, 5, |w| {
                if r % 97 == 0 {
                    assert_eq!(s.unrank(r).vertices(), w);
                }
                r += 1;
            })
            .unwrap();
        }
    }

    #[test]
    fn same_seed_same_samples() {
        let b = Lattice::build_ball(5, BuildMode::Combinatorial).unwrap();
        let a = sample_exact(&b, 4, 3000, 9).unwrap();
        let c = sample_exact(&b, 4, 3000, 9).unwrap();
        assert_eq!(a, c);
        assert_ne!(a, sample_exact(&b, 4, 3000, 10).unwrap());
    }

    #[test]
    fn one_step_frequencies() {
        let b = Lattice::build_ball(2, BuildMode::Combinatorial).unwrap();
        let k = 70_000;
        let walks = sample_exact(&b, 1, k, 1).unwrap();
        let mut hist = [0usize; 8];
        for w in &walks {
            hist[w.end() as usize] += 1;
        }
        let tol = 7.0 / (k as f64).sqrt() * 3.0;
        for &h in &hist[1..] {
            assert!((h as f64 / k as f64 - 1.0 / 7.0).abs() < tol);
        }
    }
}
