//! Exhaustive statistics over `Λ_n`.
//!
//! Walks are enumerated with the first step in slot 0 only; every
//! statistic here is invariant under rotation about the root, so counts are
//! multiplied by 7.

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::SawError;
use crate::lattice::graph::{root_frame, RotationGraph, Transport, DEGREE};
use crate::lattice::hull::BoundaryMode;
use crate::saw::enumerate::for_each_walk_from;
use crate::saw::Walk;

use super::profile::{profile_walk, tube_size, ProfileOptions, WalkProfile};

/// Largest constant tracked individually; larger excesses share a bucket.
pub const C_MAX: u32 = 8;
const BUCKETS: usize = C_MAX as usize + 2;

fn bucket(e: u32) -> usize {
    (e as usize).min(BUCKETS - 1)
}

pub fn ratio(num: u128, den: u128) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Displacement and excess counts for one `n`, from [`distance_stats`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DistanceStats {
    pub n: usize,
    pub walks: u128,
    pub displacement_sum: u128,
    pub displacement_sq_sum: u128,
    /// `excess[i - 1][b]`: walks whose excess at `i` is `b` (last bucket: larger).
    pub excess: Vec<[u128; BUCKETS]>,
}

impl DistanceStats {
    fn new(n: usize) -> Self {
        DistanceStats {
            n,
            walks: 0,
            displacement_sum: 0,
            displacement_sq_sum: 0,
            excess: vec![[0; BUCKETS]; n.saturating_sub(1)],
        }
    }

    fn merge(&mut self, o: &DistanceStats) {
        self.walks += o.walks;
        self.displacement_sum += o.displacement_sum;
        self.displacement_sq_sum += o.displacement_sq_sum;
        for (a, b) in self.excess.iter_mut().zip(&o.excess) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }

    fn scale(&mut self, k: u128) {
        self.walks *= k;
        self.displacement_sum *= k;
        self.displacement_sq_sum *= k;
        for row in &mut self.excess {
            for x in row.iter_mut() {
                *x *= k;
            }
        }
    }

    pub fn mean_displacement(&self) -> BigRational {
        ratio(self.displacement_sum, self.walks)
    }

    /// Pairs `(γ, i)` satisfying `𝒜_i` at constant `c`.
    pub fn iti_pairs(&self, c: u32) -> u128 {
        self.excess.iter().map(|row| upto(row, c)).sum()
    }

    /// `P(𝒜_i)` at constant `c`.
    pub fn iti_probability(&self, i: usize, c: u32) -> BigRational {
        ratio(upto(&self.excess[i - 1], c), self.walks)
    }

    /// `E|{i : 𝒜_i}|`.
    pub fn mean_iti_count(&self, c: u32) -> BigRational {
        ratio(self.iti_pairs(c), self.walks)
    }
}

/// Exact displacement and excess statistics for every `n <= n_max`, by one
/// depth-first search carrying the root frame of every walk vertex.
pub fn distance_stats<G: RotationGraph>(g: &G, n_max: usize) -> Result<Vec<DistanceStats>, SawError> {
    let mut out: Vec<DistanceStats> = (0..=n_max).map(DistanceStats::new).collect();
    out[0].walks = 1;
    if n_max == 0 {
        return Ok(out);
    }
    let root = g.root();
    let first = g.neighbor(root, 0).expect("root has seven neighbours");
    let start = vec![root_frame(g, root).step(g, 0)?];
    // split by the second step
    let heads: Vec<(usize, G::Vertex)> = (0..DEGREE)
        .filter_map(|s| g.neighbor(first, s).map(|w| (s, w)))
        .filter(|&(_, w)| w != root)
        .collect();
    let mut top = vec![DistanceStats::new(0), DistanceStats::new(1)];
    record(g, &[root, first], &start, &mut top);
    out[1].merge(&top[1]);
    if n_max >= 2 {
        let parts: Vec<Result<Vec<DistanceStats>, SawError>> = heads
            .par_iter()
            .map(|&(s, w)| {
                let mut acc: Vec<DistanceStats> = (0..=n_max).map(DistanceStats::new).collect();
                let mut frames: Vec<Vec<Transport<G::Vertex>>> = vec![Vec::new(); n_max + 1];
                frames[1] = start.clone();
                let mut path = vec![root, first];
                push(g, &mut path, &mut frames, s, w)?;
                dfs(g, &mut path, &mut frames, n_max, &mut acc)?;
                Ok(acc)
            })
            .collect();
        for p in parts {
            let p = p?;
            for k in 2..=n_max {
                out[k].merge(&p[k]);
            }
        }
    }
    for s in out.iter_mut().skip(1) {
        s.scale(DEGREE as u128);
    }
    Ok(out)
}

fn push<G: RotationGraph>(
    g: &G,
    path: &mut Vec<G::Vertex>,
    frames: &mut [Vec<Transport<G::Vertex>>],
    slot: usize,
    w: G::Vertex,
) -> Result<(), SawError> {
    let k = path.len() - 1;
    let v = path[k];
    let (lo, hi) = frames.split_at_mut(k + 1);
    let next = &mut hi[0];
    next.clear();
    for t in &lo[k] {
        next.push(t.step(g, slot)?);
    }
    next.push(root_frame(g, v).step(g, slot)?);
    path.push(w);
    Ok(())
}

fn record<G: RotationGraph>(
    g: &G,
    path: &[G::Vertex],
    frames: &[Transport<G::Vertex>],
    acc: &mut [DistanceStats],
) {
    let k = path.len() - 1;
    let s = &mut acc[k];
    let d0k = g.depth(path[k]) as u128;
    s.walks += 1;
    s.displacement_sum += d0k;
    s.displacement_sq_sum += d0k * d0k;
    for i in 1..k {
        let e = g.depth(path[i]) + g.depth(frames[i].image) - d0k as u32;
        s.excess[i - 1][bucket(e)] += 1;
    }
}

/// [`record`] for the extension of `path` by slot `slot`, reading only
/// depths of the frame images.
fn record_leaf<G: RotationGraph>(
    g: &G,
    path: &[G::Vertex],
    frames: &[Transport<G::Vertex>],
    slot: usize,
    acc: &mut [DistanceStats],
) -> Result<(), SawError> {
    let k = path.len();
    let v = path[k - 1];
    let escape = || crate::error::LatticeError::Escape { vertex: g.label(v) };
    let d0k = g.neighbor_depth(v, slot).ok_or_else(escape)?;
    let s = &mut acc[k];
    s.walks += 1;
    s.displacement_sum += d0k as u128;
    s.displacement_sq_sum += (d0k as u128).pow(2);
    for i in 1..k - 1 {
        let t = &frames[i];
        let d = g.neighbor_depth(t.image, t.slots.map(slot)).ok_or_else(escape)?;
        s.excess[i - 1][bucket(g.depth(path[i]) + d - d0k)] += 1;
    }
    if k >= 2 {
        s.excess[k - 2][bucket(g.depth(v) + 1 - d0k)] += 1;
    }
    Ok(())
}

fn dfs<G: RotationGraph>(
    g: &G,
    path: &mut Vec<G::Vertex>,
    frames: &mut Vec<Vec<Transport<G::Vertex>>>,
    n_max: usize,
    acc: &mut [DistanceStats],
) -> Result<(), SawError> {
    let k = path.len() - 1;
    record(g, path, &frames[k], acc);
    if k == n_max {
        return Ok(());
    }
    let v = path[k];
    for s in 0..DEGREE {
        let w = g
            .neighbor(v, s)
            .ok_or_else(|| crate::error::LatticeError::Escape { vertex: g.label(v) })?;
        if path.contains(&w) {
            continue;
        }
        if k + 1 == n_max {
            record_leaf(g, path, &frames[k], s, acc)?;
            continue;
        }
        push(g, path, frames, s, w)?;
        dfs(g, path, frames, n_max, acc)?;
        path.pop();
    }
    Ok(())
}

/// Exhaustive hull, boundary and reflection statistics for one `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExactSummary {
    pub n: usize,
    pub walks: u128,
    pub displacement_sum: u128,
    pub excess: Vec<[u128; BUCKETS]>,
    /// Excess of `R_i γ` at `i` (equal to the excess of `γ` when `R_i` does
    /// not act).
    pub reflected: Vec<[u128; BUCKETS]>,
    /// Same, restricted to walks on which `R_i` acts.
    pub reflected_acting: Vec<[u128; BUCKETS]>,
    pub acts: Vec<u128>,
    pub exposed_at: Vec<u128>,
    /// Sums over walks of the number of boundary vertices.
    pub tangent_vertices: u128,
    pub exposed_vertices: u128,
    /// `shell_vertices[d]`: walk vertices within `d` of the exposed boundary.
    pub shell_vertices: Vec<u128>,
    pub min_tangent: usize,
    pub min_exposed: usize,
    /// Largest deviation from the endpoint interval among pairs with
    /// excess at most `c`, for `c = 0..=C_MAX`.
    pub max_deviation: Vec<Option<u32>>,
}

/// Walk profiles for every `n`-step walk starting with slot 0.
pub fn for_each_profile<G: RotationGraph>(
    g: &G,
    n: usize,
    opts: &ProfileOptions,
) -> Result<Vec<(Walk<G::Vertex>, WalkProfile)>, SawError> {
    let root = g.root();
    let prefix = if n == 0 { vec![root] } else { vec![root, g.neighbor(root, 0).expect("full root")] };
    let mut walks = Vec::new();
    for_each_walk_from(g, &prefix, n, |w| walks.push(Walk::from_trusted(w.to_vec())))?;
    walks
        .into_par_iter()
        .map(|w| {
            let p = profile_walk(g, &w, opts)?;
            Ok((w, p))
        })
        .collect()
}

pub const SHELL_MAX: u32 = 3;

/// Exhaustive summary of `Λ_n` (`n >= 1`).
pub fn exact_summary<G: RotationGraph>(g: &G, n: usize, opts: &ProfileOptions) -> Result<ExactSummary, SawError> {
    let opts = ProfileOptions { deviation_limit: Some(C_MAX), ..*opts };
    let profiles = for_each_profile(g, n, &opts)?;
    let m = n.saturating_sub(1);
    let mut s = ExactSummary {
        n,
        walks: 0,
        displacement_sum: 0,
        excess: vec![[0; BUCKETS]; m],
        reflected: vec![[0; BUCKETS]; m],
        reflected_acting: vec![[0; BUCKETS]; m],
        acts: vec![0; m],
        exposed_at: vec![0; m],
        tangent_vertices: 0,
        exposed_vertices: 0,
        shell_vertices: vec![0; SHELL_MAX as usize + 1],
        min_tangent: usize::MAX,
        min_exposed: usize::MAX,
        max_deviation: vec![None; C_MAX as usize + 1],
    };
    for (_, p) in &profiles {
        s.walks += 1;
        s.displacement_sum += p.displacement as u128;
        for i in 0..m {
            s.excess[i][bucket(p.excess[i])] += 1;
            s.reflected[i][bucket(p.reflected_excess[i])] += 1;
            if p.acts[i] {
                s.acts[i] += 1;
                s.reflected_acting[i][bucket(p.reflected_excess[i])] += 1;
            }
            if p.exposed[i + 1] {
                s.exposed_at[i] += 1;
            }
            if let Some(d) = p.deviation[i] {
                for c in p.excess[i]..=C_MAX {
                    let slot = &mut s.max_deviation[c as usize];
                    *slot = Some(slot.map_or(d, |x: u32| x.max(d)));
                }
            }
        }
        let t = p.boundary_count(BoundaryMode::Tangent);
        let e = p.boundary_count(BoundaryMode::Exposed);
        s.tangent_vertices += t as u128;
        s.exposed_vertices += e as u128;
        s.min_tangent = s.min_tangent.min(t);
        s.min_exposed = s.min_exposed.min(e);
        for d in 0..=SHELL_MAX {
            s.shell_vertices[d as usize] += p.shell_count(d) as u128;
        }
    }
    let k = DEGREE as u128;
    s.walks *= k;
    s.displacement_sum *= k;
    for rows in [&mut s.excess, &mut s.reflected, &mut s.reflected_acting] {
        for row in rows.iter_mut() {
            for x in row.iter_mut() {
                *x *= k;
            }
        }
    }
    for x in s.acts.iter_mut().chain(s.exposed_at.iter_mut()).chain(s.shell_vertices.iter_mut()) {
        *x *= k;
    }
    s.tangent_vertices *= k;
    s.exposed_vertices *= k;
    Ok(s)
}

fn upto(row: &[u128; BUCKETS], c: u32) -> u128 {
    row[..=c.min(C_MAX) as usize].iter().sum()
}

fn above(row: &[u128; BUCKETS], c: u32) -> u128 {
    row[(c.min(C_MAX) as usize + 1)..].iter().sum()
}

/// The three probabilities of the inequality chain at one `(n, i, C)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainTriple {
    pub n: usize,
    pub i: usize,
    pub c: u32,
    pub boundary: BoundaryMode,
    #[serde(serialize_with = "ser_ratio")]
    pub iti: BigRational,
    #[serde(serialize_with = "ser_ratio")]
    pub reflected_iti: BigRational,
    #[serde(serialize_with = "ser_ratio")]
    pub on_boundary: BigRational,
}

pub fn ser_ratio<S: serde::Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

impl ChainTriple {
    /// `7 P(𝒜_i) >= P(R_i γ ∈ 𝒜_i)`.
    pub fn left_holds(&self) -> bool {
        BigRational::from_integer(BigInt::from(DEGREE)) * &self.iti >= self.reflected_iti
    }

    /// `P(R_i γ ∈ 𝒜_i) >= P(γ(i) ∈ ∂hull)`.
    pub fn right_holds(&self) -> bool {
        self.reflected_iti >= self.on_boundary
    }

    pub fn holds(&self) -> bool {
        self.left_holds() && self.right_holds()
    }
}

impl ExactSummary {
    /// `P(𝒜_i)`, `P(R_i γ ∈ 𝒜_i)` and `P(γ(i) ∈ ∂hull)`.
    pub fn inequality_chain(&self, i: usize, c: u32, boundary: BoundaryMode) -> ChainTriple {
        let on = match boundary {
            BoundaryMode::Tangent => self.acts[i - 1],
            BoundaryMode::Exposed => self.exposed_at[i - 1],
        };
        ChainTriple {
            n: self.n,
            i,
            c,
            boundary,
            iti: ratio(upto(&self.excess[i - 1], c), self.walks),
            reflected_iti: ratio(upto(&self.reflected[i - 1], c), self.walks),
            on_boundary: ratio(on, self.walks),
        }
    }

    /// Pairs `(γ, i)` where `R_i` acts but `R_i γ` misses `𝒜_i`.
    pub fn defects(&self, c: u32) -> u128 {
        self.reflected_acting.iter().map(|r| above(r, c)).sum()
    }

    /// Largest excess after an acting reflection, if it is at most `C_MAX`.
    pub fn max_reflected_excess(&self) -> Option<u32> {
        let mut best = 0;
        for row in &self.reflected_acting {
            for (b, &x) in row.iter().enumerate() {
                if x > 0 {
                    if b == BUCKETS - 1 {
                        return None;
                    }
                    best = best.max(b as u32);
                }
            }
        }
        Some(best)
    }

    pub fn mean_displacement(&self) -> BigRational {
        ratio(self.displacement_sum, self.walks)
    }

    pub fn mean_iti_count(&self, c: u32) -> BigRational {
        ratio(self.excess.iter().map(|r| upto(r, c)).sum(), self.walks)
    }

    /// Mean over walks of `|boundary ∩ γ| / (n + 1)`.
    pub fn mean_boundary_fraction(&self, mode: BoundaryMode) -> BigRational {
        let v = match mode {
            BoundaryMode::Tangent => self.tangent_vertices,
            BoundaryMode::Exposed => self.exposed_vertices,
        };
        ratio(v, self.walks * (self.n as u128 + 1))
    }

    pub fn min_boundary_fraction(&self, mode: BoundaryMode) -> BigRational {
        let v = match mode {
            BoundaryMode::Tangent => self.min_tangent,
            BoundaryMode::Exposed => self.min_exposed,
        };
        ratio(v as u128, self.n as u128 + 1)
    }

    pub fn mean_shell_fraction(&self, d: u32) -> BigRational {
        ratio(self.shell_vertices[d.min(SHELL_MAX) as usize], self.walks * (self.n as u128 + 1))
    }
}

/// Endpoints of the `n`-step walks whose first step is in slot 0.
pub fn distinct_ends<G: RotationGraph>(g: &G, n: usize) -> Result<Vec<G::Vertex>, SawError> {
    let root = g.root();
    let prefix = if n == 0 { vec![root] } else { vec![root, g.neighbor(root, 0).expect("full root")] };
    let mut ends = Vec::new();
    for_each_walk_from(g, &prefix, n, |w| ends.push(w[n]))?;
    ends.sort_unstable();
    ends.dedup();
    Ok(ends)
}

/// Largest tube-to-length ratio `|N_rho(I(0, γ(n)))| / d(0, γ(n))` over
/// distinct endpoints at positive distance.
pub fn max_tube_ratio<G: RotationGraph>(g: &G, ends: &[G::Vertex], rho: u32) -> f64 {
    ends.par_iter()
        .filter(|&&v| g.depth(v) > 0)
        .map(|&v| tube_size(g, v, rho) as f64 / g.depth(v) as f64)
        .reduce(|| 0.0, f64::max)
}

/// The smallest `C` in `1..=C_MAX` with no defects in any of `summaries`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Calibration {
    pub c_star: Option<u32>,
    /// Defect counts for `C = 0..=C_MAX`, summed over the summaries.
    pub defects: Vec<u128>,
    pub max_n: usize,
}

pub fn calibrate(summaries: &[ExactSummary]) -> Calibration {
    let defects: Vec<u128> = (0..=C_MAX).map(|c| summaries.iter().map(|s| s.defects(c)).sum()).collect();
    let c_star = (1..=C_MAX).find(|&c| defects[c as usize] == 0);
    Calibration { c_star, defects, max_n: summaries.iter().map(|s| s.n).max().unwrap_or(0) }
}
