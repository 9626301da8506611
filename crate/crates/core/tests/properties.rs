use std::sync::OnceLock;

use heptasaw::analysis::profile::excesses;
use heptasaw::lattice::auto::{apply, Automorphism};
use heptasaw::lattice::graph::RotationGraph;
use heptasaw::lattice::hull::HullMode;
use heptasaw::lattice::tiling::Tiling;
use heptasaw::lattice::{BuildMode, Lattice};
use heptasaw::saw::pivot::{pivot_chain, MoveSet, PivotConfig};
use heptasaw::saw::reflect::{reflect_at, reflect_suffix};
use heptasaw::saw::{uniformity, Walk};
use proptest::prelude::*;

fn ball() -> &'static Lattice {
    static B: OnceLock<Lattice> = OnceLock::new();
    B.get_or_init(|| Lattice::build_ball(9, BuildMode::Combinatorial).unwrap())
}

/// Follows the slot choices, moving on to the next free slot when one is
/// taken. `None` if the walk traps itself.
fn greedy_walk<G: RotationGraph>(g: &G, choices: &[u8]) -> Option<Walk<G::Vertex>> {
    let mut vs = vec![g.root()];
    for &c in choices {
        let cur = *vs.last().unwrap();
        let next = (0..7).map(|k| g.neighbor(cur, (c as usize + k) % 7)).find_map(|w| w.filter(|w| !vs.contains(w)))?;
        vs.push(next);
    }
    Walk::new(g, vs).ok()
}

fn choices(max: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..7, 1..=max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tiling_and_ball_agree(cs in choices(8)) {
        let b = ball();
        if let Some(w) = greedy_walk(&Tiling, &cs) {
            let slots = w.slots(&Tiling);
            let on_ball = Walk::from_slots(b, &slots).unwrap();
            prop_assert_eq!(w.ids(&Tiling), on_ball.ids(b));
            for (j, &v) in w.vertices().iter().enumerate() {
                prop_assert_eq!(Tiling.depth(v), b.depth(on_ball.at(j)));
            }
        }
    }

    #[test]
    fn intervals_are_symmetric(a in 0u32..800, c in 0u32..800) {
        let b = ball();
        let (u, v) = (a % 400, c % 400);
        let mut i1 = b.interval(u, v).unwrap();
        let mut i2 = b.interval(v, u).unwrap();
        i1.sort_unstable();
        i2.sort_unstable();
        prop_assert_eq!(&i1, &i2);
        let d = b.graph_dist(u, v).unwrap();
        for &x in &i1 {
            prop_assert_eq!(b.graph_dist(u, x).unwrap() + b.graph_dist(x, v).unwrap(), d);
        }
    }

    #[test]
    fn reflections_are_isometries(cs in choices(2), k in 0usize..7, x in 0u32..29, y in 0u32..29) {
        let b = ball();
        let anchor = greedy_walk(b, &cs).unwrap().end();
        let g = Automorphism::reflection(anchor, k);
        let (gx, gy) = (apply(b, g, x).unwrap(), apply(b, g, y).unwrap());
        prop_assert_eq!(b.graph_dist(gx, gy).unwrap(), b.graph_dist(x, y).unwrap());
        prop_assert_eq!(apply(b, g, gx).unwrap(), x);
        prop_assert_eq!(apply(b, g, anchor).unwrap(), anchor);
    }

    #[test]
    fn reflected_walks_keep_their_prefix(cs in choices(12), i in 1usize..12, k in 0usize..7) {
        let t = Tiling;
        if let Some(w) = greedy_walk(&t, &cs) {
            let n = w.steps();
            prop_assume!(i < n);
            let g = Automorphism::reflection(w.at(i), k);
            if let Ok(vs) = reflect_suffix(&t, &w, i, g) {
                prop_assert_eq!(vs.len(), n + 1);
                prop_assert_eq!(&vs[..=i], &w.vertices()[..=i]);
                prop_assert!(vs.windows(2).all(|e| t.adjacent(e[0], e[1])));
            }
            let r = reflect_at(&t, &w, i, None, HullMode::OneStep).unwrap();
            prop_assert_eq!(&r.walk.vertices()[..=i], &w.vertices()[..=i]);
            prop_assert_eq!(r.mirror.is_none(), r.walk == w);
        }
    }

    #[test]
    fn excess_is_bounded(cs in choices(14)) {
        let t = Tiling;
        if let Some(w) = greedy_walk(&t, &cs) {
            let n = w.steps() as u32;
            let d = t.depth(w.end());
            prop_assert!(d <= n);
            for (j, e) in excesses(&t, &w).unwrap().into_iter().enumerate() {
                let i = j as u32 + 1;
                prop_assert!(e <= 2 * i.min(n - i));
            }
        }
    }

    #[test]
    fn pivot_states_are_walks(n in 2usize..20, seed in any::<u64>(), dihedral in any::<bool>()) {
        let moves = if dihedral { MoveSet::Dihedral } else { MoveSet::Reflections };
        let cfg = PivotConfig { n, moves, chains: 2, burn_in: 50, samples_per_chain: 20, thin: 3, seed };
        let run = pivot_chain(&Tiling, &cfg).unwrap();
        prop_assert_eq!(run.walks.len(), 40);
        for w in &run.walks {
            let again = Walk::new(&Tiling, w.vertices().to_vec());
            prop_assert!(again.is_ok());
            prop_assert_eq!(w.steps(), n);
        }
        prop_assert_eq!(run, pivot_chain(&Tiling, &cfg).unwrap());
    }

    #[test]
    fn tv_is_a_distance(hits in prop::collection::vec(0u64..20, 1..200)) {
        let pop: Vec<u64> = (0..20).collect();
        let u = uniformity(hits, &pop);
        prop_assert!((0.0..=1.0).contains(&u.tv));
        prop_assert_eq!(u.foreign, 0);
    }
}
