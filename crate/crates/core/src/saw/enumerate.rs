//! Exhaustive depth-first enumeration.

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::error::{LatticeError, SawError};
use crate::lattice::graph::{RotationGraph, DEGREE};
use crate::lattice::{Lattice, NONE};

use super::CountVector;

/// Length of the prefixes that split the search between workers.
pub const PREFIX_LEN: usize = 4;

fn check_length(lat: &Lattice, n: usize) -> Result<(), SawError> {
    if n as u64 > lat.interior_radius() as u64 {
        return Err(SawError::TooLong { n, interior: lat.interior_radius() });
    }
    Ok(())
}

/// Exact `c_0..c_n` on a ball.
pub fn enumerate(lat: &Lattice, n: usize) -> Result<CountVector, SawError> {
    count_walks(lat, n, PREFIX_LEN)
}

/// Counts with the search split by all walks of length `prefix_len`. The
/// per-prefix counts are summed in prefix order.
pub fn count_walks(lat: &Lattice, n: usize, prefix_len: usize) -> Result<CountVector, SawError> {
    check_length(lat, n)?;
    let p = prefix_len.min(n);
    let rot = lat.raw_rotation();
    let mut prefixes: Vec<Vec<u32>> = Vec::new();
    let mut head = vec![0u32];
    collect_prefixes(rot, &mut head, p, &mut prefixes);

    let partial: Vec<Vec<u64>> = prefixes
        .par_iter()
        .map_init(
            || vec![false; rot.len()],
            |visited, prefix| {
                let mut counts = vec![0u64; n + 1];
                for &v in prefix {
                    visited[v as usize] = true;
                }
                let end = *prefix.last().expect("prefixes are nonempty");
                count_from(rot, visited, end, p, n, &mut counts);
                for &v in prefix {
                    visited[v as usize] = false;
                }
                counts
            },
        )
        .collect();

    let mut total = vec![0u64; n + 1];
    // walks shorter than the prefix length are counted while collecting
    let mut short = vec![0u64; p + 1];
    count_short(rot, &mut vec![0u32], p, &mut short);
    for (k, c) in short.iter().enumerate().take(p) {
        total[k] = *c;
    }
    for counts in &partial {
        for k in p..=n {
            total[k] += counts[k];
        }
    }
    Ok(CountVector(total.into_iter().map(BigUint::from).collect()))
}

fn collect_prefixes(rot: &[[u32; DEGREE]], path: &mut Vec<u32>, p: usize, out: &mut Vec<Vec<u32>>) {
    if path.len() == p + 1 {
        out.push(path.clone());
        return;
    }
    let v = *path.last().expect("nonempty");
    for &w in &rot[v as usize] {
        if w != NONE && !path.contains(&w) {
            path.push(w);
            collect_prefixes(rot, path, p, out);
            path.pop();
        }
    }
}

fn count_short(rot: &[[u32; DEGREE]], path: &mut Vec<u32>, p: usize, counts: &mut [u64]) {
    counts[path.len() - 1] += 1;
    if path.len() == p + 1 {
        return;
    }
    let v = *path.last().expect("nonempty");
    for &w in &rot[v as usize] {
        if w != NONE && !path.contains(&w) {
            path.push(w);
            count_short(rot, path, p, counts);
            path.pop();
        }
    }
}

fn count_from(rot: &[[u32; DEGREE]], visited: &mut [bool], v: u32, depth: usize, n: usize, counts: &mut [u64]) {
    counts[depth] += 1;
    if depth == n {
        return;
    }
    if depth + 1 == n {
        counts[n] += rot[v as usize].iter().filter(|&&w| w != NONE && !visited[w as usize]).count() as u64;
        return;
    }
    for &w in &rot[v as usize] {
        if w != NONE && !visited[w as usize] {
            visited[w as usize] = true;
            count_from(rot, visited, w, depth + 1, n, counts);
            visited[w as usize] = false;
        }
    }
}

/// Calls `visit` on every `n`-step walk from the root, in slot order.
pub fn for_each_walk<G: RotationGraph>(
    g: &G,
    n: usize,
    visit: impl FnMut(&[G::Vertex]),
) -> Result<(), SawError> {
    for_each_walk_from(g, &[g.root()], n, visit)
}

/// Calls `visit` on every `n`-step walk extending `prefix`, in slot order.
pub fn for_each_walk_from<G: RotationGraph>(
    g: &G,
    prefix: &[G::Vertex],
    n: usize,
    mut visit: impl FnMut(&[G::Vertex]),
) -> Result<(), SawError> {
    let mut path = prefix.to_vec();
    path.reserve(n + 1 - path.len().min(n + 1));
    extend(g, &mut path, n, &mut visit)
}

fn extend<G: RotationGraph>(
    g: &G,
    path: &mut Vec<G::Vertex>,
    n: usize,
    visit: &mut impl FnMut(&[G::Vertex]),
) -> Result<(), SawError> {
    if path.len() == n + 1 {
        visit(path);
        return Ok(());
    }
    let v = *path.last().expect("nonempty");
    for s in 0..DEGREE {
        let Some(w) = g.neighbor(v, s) else {
            return Err(SawError::Lattice(LatticeError::Escape { vertex: g.label(v) }));
        };
        if !path.contains(&w) {
            path.push(w);
            extend(g, path, n, visit)?;
            path.pop();
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::tiling::Tiling;
    use crate::lattice::BuildMode;

    #[test]
    fn first_counts() {
        let b = Lattice::build_ball(6, BuildMode::Combinatorial).unwrap();
        let c = enumerate(&b, 5).unwrap();
        let small: Vec<u64> = c.0.iter().map(|x| x.try_into().unwrap()).collect();
        assert_eq!(&small[..4], &[1, 7, 42, 238]);
        assert!(c.check_bounds());
        assert!(matches!(enumerate(&b, 7), Err(SawError::TooLong { .. })));
    }

    #[test]
    fn prefix_length_does_not_matter() {
        let b = Lattice::build_ball(8, BuildMode::Combinatorial).unwrap();
        let base = count_walks(&b, 7, 0).unwrap();
        for p in [1, 2, 4, 7, 9] {
            assert_eq!(count_walks(&b, 7, p).unwrap(), base);
        }
    }

    #[test]
    fn visitor_matches_counts() {
        let b = Lattice::build_ball(7, BuildMode::Combinatorial).unwrap();
        let c = enumerate(&b, 6).unwrap();
        for n in 0..=6 {
            let mut k = 0u64;
            for_each_walk(&b, n, |w| {
                assert_eq!(w.len(), n + 1);
                k += 1;
            })
            .unwrap();
            assert_eq!(BigUint::from(k), c.0[n]);
            let mut t = 0u64;
            for_each_walk(&Tiling, n, |_| t += 1).unwrap();
            assert_eq!(t, k);
        }
    }
}
