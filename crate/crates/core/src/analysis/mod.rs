//! Measurements behind the ballisticity argument: the inverse triangle
//! inequality, hull boundaries, the inequality chain for `R_i`, geodesic
//! tubes and displacement growth.

pub mod ensemble;
pub mod exact;
pub mod profile;
pub mod render;
pub mod report;
pub mod verify;

use serde::{Deserialize, Serialize};

use crate::error::SawError;
use crate::lattice::graph::{transport_distance, RotationGraph};
use crate::lattice::hull::{BoundaryMode, HullMode};
use crate::saw::Walk;

pub use exact::{calibrate, distance_stats, exact_summary, Calibration, ChainTriple, DistanceStats, ExactSummary};
pub use profile::{profile_walk, ProfileOptions, WalkProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItiConfig {
    pub c: u32,
    pub delta: u32,
    pub boundary: BoundaryMode,
    pub hull: HullMode,
}

impl Default for ItiConfig {
    fn default() -> Self {
        ItiConfig { c: 2, delta: 1, boundary: BoundaryMode::Tangent, hull: HullMode::OneStep }
    }
}

/// Whether the `c`-inverse triangle inequality holds at `0 < i < n`.
pub fn iti_event<G: RotationGraph>(g: &G, walk: &Walk<G::Vertex>, i: usize, c: u32) -> Result<bool, SawError> {
    if i == 0 || i >= walk.steps() {
        return Err(SawError::BadIndex { i, n: walk.steps() });
    }
    let d0i = g.depth(walk.at(i));
    let d0n = g.depth(walk.end());
    let din = transport_distance(g, walk.at(i), walk.end())?;
    Ok(d0i + din <= d0n + c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::tiling::Tiling;
    use crate::saw::reflect::collect_walks;

    #[test]
    fn two_steps_always_satisfy_c1() {
        let t = Tiling;
        for w in collect_walks(&t, 2, false).unwrap() {
            assert!(iti_event(&t, &w, 1, 1).unwrap());
        }
    }

    #[test]
    fn geodesic_walks_have_zero_excess() {
        let t = Tiling;
        let w = crate::saw::pivot::initial_walk(&t, 9).unwrap();
        for i in 1..9 {
            assert!(iti_event(&t, &w, i, 0).unwrap());
        }
        assert!(iti_event(&t, &w, 0, 0).is_err());
    }
}
