//! Pivot-style Markov chain on `Λ_n` with lattice symmetries at a walk
//! vertex as moves.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::SawError;
use crate::lattice::auto::Automorphism;
use crate::lattice::graph::{RotationGraph, DEGREE};

use super::reflect::reflect_suffix;
use super::{first_repeat, Walk};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MoveSet {
    /// The seven reflections at the pivot.
    #[default]
    Reflections,
    /// The seven reflections and the seven rotations (including the identity).
    Dihedral,
}

impl std::str::FromStr for MoveSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "reflections" => Ok(MoveSet::Reflections),
            "dihedral" => Ok(MoveSet::Dihedral),
            other => Err(format!("unknown move set `{other}` (reflections|dihedral)")),
        }
    }
}

impl MoveSet {
    pub fn size(&self) -> usize {
        match self {
            MoveSet::Reflections => DEGREE,
            MoveSet::Dihedral => 2 * DEGREE,
        }
    }

    fn element<V: Copy + Eq + std::fmt::Debug>(&self, v: V, j: usize) -> Automorphism<V> {
        if j < DEGREE {
            Automorphism::reflection(v, j)
        } else {
            Automorphism { anchor: v, anchor_slot: 0, image: v, image_slot: (j - DEGREE) as u8, reversing: false }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PivotConfig {
    pub n: usize,
    pub moves: MoveSet,
    /// Independent chains, each with its own stream.
    pub chains: usize,
    /// Proposals discarded at the start of each chain.
    pub burn_in: u64,
    /// Recorded states per chain.
    pub samples_per_chain: usize,
    /// Proposals between recorded states.
    pub thin: u64,
    pub seed: u64,
}

impl PivotConfig {
    pub fn new(n: usize, seed: u64) -> Self {
        PivotConfig { n, moves: MoveSet::Reflections, chains: 8, burn_in: 10_000, samples_per_chain: 1000, thin: 1, seed }
    }
}

/// States recorded by all chains, chain by chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PivotRun<V> {
    pub walks: Vec<Walk<V>>,
    pub proposals: u64,
    pub accepted: u64,
}

impl<V> PivotRun<V> {
    pub fn acceptance_rate(&self) -> f64 {
        self.accepted as f64 / self.proposals.max(1) as f64
    }
}

/// A straight walk outwards: always the first neighbour one layer deeper.
pub fn initial_walk<G: RotationGraph>(g: &G, n: usize) -> Result<Walk<G::Vertex>, SawError> {
    let mut vs = vec![g.root()];
    for _ in 0..n {
        let v = *vs.last().expect("nonempty");
        let next = g
            .neighbors(v)
            .into_iter()
            .flatten()
            .find(|&w| g.depth(w) == g.depth(v) + 1)
            .ok_or(SawError::TooLong { n, interior: g.depth(v) })?;
        vs.push(next);
    }
    Ok(Walk::from_trusted(vs))
}

/// One chain.
pub struct PivotChain<'g, G: RotationGraph> {
    graph: &'g G,
    state: Walk<G::Vertex>,
    moves: MoveSet,
    rng: ChaCha8Rng,
    pub proposals: u64,
    pub accepted: u64,
}

impl<'g, G: RotationGraph> PivotChain<'g, G> {
    pub fn new(graph: &'g G, n: usize, moves: MoveSet, seed: u64, stream: u64) -> Result<Self, SawError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Ok(PivotChain { graph, state: initial_walk(graph, n)?, moves, rng, proposals: 0, accepted: 0 })
    }

    pub fn state(&self) -> &Walk<G::Vertex> {
        &self.state
    }

    /// One proposal: pivot index uniform in `0..n`, symmetry uniform in the
    /// move set; accepted iff the result is self-avoiding and inside the
    /// built region.
    pub fn step(&mut self) -> bool {
        self.proposals += 1;
        let n = self.state.steps();
        if n == 0 {
            return false;
        }
        let i = self.rng.gen_range(0..n);
        let j = self.rng.gen_range(0..self.moves.size());
        let map = self.moves.element(self.state.at(i), j);
        let Ok(next) = reflect_suffix(self.graph, &self.state, i, map) else {
            return false;
        };
        if first_repeat(&next).is_some() {
            return false;
        }
        self.state = Walk::from_trusted(next);
        self.accepted += 1;
        true
    }
}

/// Runs `cfg.chains` chains, chain `c` on stream `c` of the seed, and
/// concatenates their recorded states in chain order.
pub fn pivot_chain<G: RotationGraph>(g: &G, cfg: &PivotConfig) -> Result<PivotRun<G::Vertex>, SawError> {
    let runs: Vec<Result<(Vec<Walk<G::Vertex>>, u64, u64), SawError>> = (0..cfg.chains)
        .into_par_iter()
        .map(|c| {
            let mut chain = PivotChain::new(g, cfg.n, cfg.moves, cfg.seed, c as u64)?;
            for _ in 0..cfg.burn_in {
                chain.step();
            }
            let mut out = Vec::with_capacity(cfg.samples_per_chain);
            for _ in 0..cfg.samples_per_chain {
                for _ in 0..cfg.thin.max(1) {
                    chain.step();
                }
                out.push(chain.state().clone());
            }
            Ok((out, chain.proposals, chain.accepted))
        })
        .collect();
    let mut run = PivotRun { walks: Vec::new(), proposals: 0, accepted: 0 };
    for r in runs {
        let (w, p, a) = r?;
        run.walks.extend(w);
        run.proposals += p;
        run.accepted += a;
    }
    Ok(run)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::tiling::Tiling;
    use crate::lattice::{BuildMode, Lattice};

    #[test]
    fn states_are_walks_and_runs_repeat() {
        let b = Lattice::build_ball(14, BuildMode::Combinatorial).unwrap();
        let mut cfg = PivotConfig::new(6, 5);
        cfg.chains = 3;
        cfg.burn_in = 100;
        cfg.samples_per_chain = 300;
        for moves in [MoveSet::Reflections, MoveSet::Dihedral] {
            cfg.moves = moves;
            let run = pivot_chain(&b, &cfg).unwrap();
            assert_eq!(run.walks.len(), 900);
            for w in &run.walks {
                Walk::new(&b, w.vertices().to_vec()).unwrap();
                assert_eq!(w.steps(), 6);
            }
            assert!(run.acceptance_rate() > 0.1 && run.acceptance_rate() <= 1.0);
            assert_eq!(pivot_chain(&b, &cfg).unwrap(), run);
        }
    }

    #[test]
    fn chain_on_the_tiling_leaves_the_start() {
        let t = Tiling;
        let mut c = PivotChain::new(&t, 30, MoveSet::Reflections, 1, 0).unwrap();
        let start = c.state().clone();
        for _ in 0..200 {
            c.step();
        }
        assert_ne!(c.state(), &start);
        Walk::new(&t, c.state().vertices().to_vec()).unwrap();
    }
}
