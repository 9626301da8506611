//! The suffix reflections `R_i` and their fibers.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::SawError;
use crate::lattice::auto::{tangent_slots, Automorphism, Evaluator};
use crate::lattice::graph::{RotationGraph, DEGREE};
use crate::lattice::hull::{walk_hull_set, HullMode};

use super::enumerate::for_each_walk_from;
use super::{first_repeat, pack_slots, Walk};

/// Result of `R_i`: the new walk and the reflection used, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reflection<V> {
    pub walk: Walk<V>,
    pub mirror: Option<Automorphism<V>>,
}

/// Applies `map` to `γ(i..n)`, keeping `γ(0..i)`. The map must fix `γ(i)`.
pub fn reflect_suffix<G: RotationGraph>(
    g: &G,
    walk: &Walk<G::Vertex>,
    i: usize,
    map: Automorphism<G::Vertex>,
) -> Result<Vec<G::Vertex>, SawError> {
    let vs = walk.vertices();
    let image = Evaluator::new(g, map).image_path(&vs[i..])?;
    debug_assert_eq!(image[0], vs[i]);
    let mut out = Vec::with_capacity(vs.len());
    out.extend_from_slice(&vs[..i]);
    out.extend_from_slice(&image);
    Ok(out)
}

fn check_index(walk_steps: usize, i: usize) -> Result<(), SawError> {
    if i == 0 || i >= walk_steps {
        return Err(SawError::BadIndex { i, n: walk_steps });
    }
    Ok(())
}

/// `R_i γ`. `hull` is the vertex set of the hull of `γ` when the caller
/// already has it.
pub fn reflect_at<G: RotationGraph>(
    g: &G,
    walk: &Walk<G::Vertex>,
    i: usize,
    hull: Option<&[G::Vertex]>,
    mode: HullMode,
) -> Result<Reflection<G::Vertex>, SawError> {
    check_index(walk.steps(), i)?;
    let owned;
    let hull = match hull {
        Some(h) => h,
        None => {
            owned = walk_hull_set(g, walk.vertices(), mode)?;
            &owned
        }
    };
    let slots = tangent_slots(g, hull, walk.at(i))?;
    reflect_with_slots(g, walk, i, &slots)
}

/// `R_i γ` given the tangency of each reflection at `γ(i)`.
pub fn reflect_with_slots<G: RotationGraph>(
    g: &G,
    walk: &Walk<G::Vertex>,
    i: usize,
    tangent: &[bool; DEGREE],
) -> Result<Reflection<G::Vertex>, SawError> {
    let Some(k) = tangent.iter().position(|&t| t) else {
        return Ok(Reflection { walk: walk.clone(), mirror: None });
    };
    let map = Automorphism::reflection(walk.at(i), k);
    let out = reflect_suffix(g, walk, i, map)?;
    if let Some(index) = first_repeat(&out) {
        return Err(SawError::ReflectionBroken { index });
    }
    Ok(Reflection { walk: Walk::from_trusted(out), mirror: Some(map) })
}

/// `R_i γ` for every `0 < i < n`, sharing one hull computation.
pub fn reflect_all<G: RotationGraph>(
    g: &G,
    walk: &Walk<G::Vertex>,
    mode: HullMode,
) -> Result<Vec<Reflection<G::Vertex>>, SawError> {
    let hull = walk_hull_set(g, walk.vertices(), mode)?;
    (1..walk.steps())
        .map(|i| {
            let slots = tangent_slots(g, &hull, walk.at(i))?;
            reflect_with_slots(g, walk, i, &slots)
        })
        .collect()
}

/// Distribution of `|R_i^{-1}(γ)|` over `γ ∈ Λ_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberHistogram {
    pub n: usize,
    pub i: usize,
    /// `counts[s]` walks have exactly `s` preimages.
    pub counts: Vec<u64>,
    pub total: u64,
    /// Walks fixed by `R_i`.
    pub fixed: u64,
    /// Images that are not in `Λ_n` (must be zero).
    pub outside: u64,
    /// Images whose first `i + 1` vertices differ from the walk's.
    pub prefix_changed: u64,
}

impl FiberHistogram {
    pub fn max_fiber(&self) -> usize {
        self.counts.iter().rposition(|&c| c > 0).unwrap_or(0)
    }

    /// Sum of `s * counts[s]`, which must equal `total`.
    pub fn preimages(&self) -> u64 {
        self.counts.iter().enumerate().map(|(s, &c)| s as u64 * c).sum()
    }
}

/// All `n`-step walks, or only those whose first step uses slot 0.
pub fn collect_walks<G: RotationGraph>(
    g: &G,
    n: usize,
    first_slot_only: bool,
) -> Result<Vec<Walk<G::Vertex>>, SawError> {
    let root = g.root();
    let prefix: Vec<G::Vertex> = if first_slot_only && n > 0 {
        vec![root, g.neighbor(root, 0).expect("root has seven neighbours")]
    } else {
        vec![root]
    };
    let mut out = Vec::new();
    for_each_walk_from(g, &prefix, n, |w| out.push(Walk::from_trusted(w.to_vec())))?;
    Ok(out)
}

/// Fiber sizes of `R_i` on `Λ_n` for every `0 < i < n`.
///
/// With `use_symmetry`, only walks starting with slot 0 are processed and
/// counts are multiplied by 7. `R_i` fixes the first step and commutes with
/// the rotations about the root, which preserve slot labels.
pub fn fiber_histograms<G: RotationGraph>(
    g: &G,
    n: usize,
    mode: HullMode,
    use_symmetry: bool,
) -> Result<Vec<FiberHistogram>, SawError> {
    let walks = collect_walks(g, n, use_symmetry)?;
    let mult = if use_symmetry { DEGREE as u64 } else { 1 };
    let images: Vec<Vec<(u64, bool, bool)>> = walks
        .par_iter()
        .map(|w| {
            reflect_all(g, w, mode).map(|rs| {
                rs.iter()
                    .enumerate()
                    .map(|(k, r)| {
                        let same = r.walk.vertices()[..=k + 1] == w.vertices()[..=k + 1];
                        (r.walk.key(g), r.mirror.is_none(), same)
                    })
                    .collect()
            })
        })
        .collect::<Result<_, _>>()?;
    let mut domain = walk_keys(g, &walks);
    domain.sort_unstable();
    let mut out = Vec::new();
    for i in 1..n {
        let mut keys: Vec<u64> = images.iter().map(|v| v[i - 1].0).collect();
        let fixed = images.iter().filter(|v| v[i - 1].1).count() as u64 * mult;
        let prefix_changed = images.iter().filter(|v| !v[i - 1].2).count() as u64 * mult;
        keys.sort_unstable();
        let outside = keys.iter().filter(|k| domain.binary_search(k).is_err()).count() as u64 * mult;
        let mut counts = vec![0u64; 1];
        let mut j = 0;
        while j < keys.len() {
            let mut e = j;
            while e < keys.len() && keys[e] == keys[j] {
                e += 1;
            }
            let s = e - j;
            if counts.len() <= s {
                counts.resize(s + 1, 0);
            }
            counts[s] += mult;
            j = e;
        }
        let total = walks.len() as u64 * mult;
        let hit: u64 = counts.iter().skip(1).sum();
        counts[0] = total - hit;
        out.push(FiberHistogram { n, i, counts, total, fixed, outside, prefix_changed });
    }
    Ok(out)
}

/// Fiber sizes of `R_i` on `Λ_n`.
pub fn fiber_histogram<G: RotationGraph>(g: &G, n: usize, i: usize, mode: HullMode) -> Result<FiberHistogram, SawError> {
    check_index(n, i)?;
    let all = fiber_histograms(g, n, mode, true)?;
    Ok(all.into_iter().nth(i - 1).expect("index checked"))
}

/// Slot keys of walks, for membership tests against `Λ_n`.
pub fn walk_keys<G: RotationGraph>(g: &G, walks: &[Walk<G::Vertex>]) -> Vec<u64> {
    walks.iter().map(|w| pack_slots(&w.slots(g))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::tiling::Tiling;
    use crate::lattice::{BuildMode, Lattice};

    #[test]
    fn two_step_closure() {
        let t = Tiling;
        let walks = collect_walks(&t, 2, false).unwrap();
        assert_eq!(walks.len(), 42);
        let mut keys = walk_keys(&t, &walks);
        keys.sort();
        for w in &walks {
            let r = reflect_at(&t, w, 1, None, HullMode::OneStep).unwrap();
            assert_eq!(r.walk.steps(), 2);
            assert_eq!(r.walk.at(0), w.at(0));
            assert_eq!(r.walk.at(1), w.at(1));
            assert!(keys.binary_search(&r.walk.key(&t)).is_ok());
        }
    }

    #[test]
    fn bad_indices() {
        let t = Tiling;
        let w = collect_walks(&t, 3, false).unwrap().remove(0);
        assert!(matches!(reflect_at(&t, &w, 0, None, HullMode::OneStep), Err(SawError::BadIndex { .. })));
        assert!(matches!(reflect_at(&t, &w, 3, None, HullMode::OneStep), Err(SawError::BadIndex { .. })));
    }

    #[test]
    fn inside_the_hull_nothing_moves() {
        // the root is interior to the hull of the layer-1 ring
        let t = Tiling;
        let mut slots = vec![0u8];
        let ring = t.neighbors(t.root());
        let mut v = ring[0].unwrap();
        let mut vs = vec![t.root(), v];
        for k in 1..7 {
            let w = ring[k].unwrap();
            slots.push(t.slot_of(v, w).unwrap() as u8);
            vs.push(w);
            v = w;
        }
        let walk = Walk::new(&t, vs).unwrap();
        let hull = walk_hull_set(&t, walk.vertices(), HullMode::OneStep).unwrap();
        assert!(tangent_slots(&t, &hull, t.root()).unwrap().iter().all(|&x| !x));
    }

    #[test]
    fn symmetry_reduction_is_exact() {
        let t = Tiling;
        for n in 3..=5 {
            let full = fiber_histograms(&t, n, HullMode::OneStep, false).unwrap();
            let sym = fiber_histograms(&t, n, HullMode::OneStep, true).unwrap();
            assert_eq!(full, sym);
        }
    }

    #[test]
    fn ball_and_tiling_agree() {
        let b = Lattice::build_ball(12, BuildMode::Combinatorial).unwrap();
        let t = Tiling;
        let wb = collect_walks(&b, 4, true).unwrap();
        let wt = collect_walks(&t, 4, true).unwrap();
        for (x, y) in wb.iter().zip(&wt) {
            let rx = reflect_all(&b, x, HullMode::OneStep).unwrap();
            let ry = reflect_all(&t, y, HullMode::OneStep).unwrap();
            for (a, c) in rx.iter().zip(&ry) {
                assert_eq!(a.walk.slots(&b), c.walk.slots(&t));
            }
        }
    }
}
