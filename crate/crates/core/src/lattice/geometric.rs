//! Ball construction as the orbit of the basepoint under the (2,3,7)
//! reflection group, with coordinates.

use std::collections::HashMap;

use crate::error::LatticeError;
use crate::geom::{
    edge_length, hyp_dist, origin_neighbours, renormalize, rotation_seventh, to_disk, triangle_mirrors,
    HPoint, IsomMatrix, DEDUP_TOL,
};

use super::graph::DEGREE;
use super::NONE;

/// Accepted deviation of an edge from [`edge_length`].
pub const EDGE_TOL: f64 = 1e-4;

/// Hash grid over the Poincaré disk with cells of side [`DEDUP_TOL`].
struct DiskIndex {
    cells: HashMap<(i64, i64), Vec<u32>>,
}

impl DiskIndex {
    fn cell(p: &HPoint) -> (i64, i64) {
        let (u, v) = to_disk(p);
        ((u / DEDUP_TOL).floor() as i64, (v / DEDUP_TOL).floor() as i64)
    }

    /// The vertex at `p`, if any. Disk-close points that are not
    /// hyperbolically close mean the chart has run out of resolution.
    fn find(&self, p: &HPoint, points: &[HPoint], near: usize) -> Result<Option<u32>, LatticeError> {
        let (cx, cy) = Self::cell(p);
        let (u, v) = to_disk(p);
        let mut hit = None;
        for dx in -1..=1 {
            for dy in -1..=1 {
                let Some(list) = self.cells.get(&(cx + dx, cy + dy)) else { continue };
                for &id in list {
                    let q = &points[id as usize];
                    let (a, b) = to_disk(q);
                    if (a - u).hypot(b - v) > DEDUP_TOL {
                        continue;
                    }
                    let d = hyp_dist(p, q);
                    if d >= 0.5 * edge_length() || hit.is_some() {
                        return Err(LatticeError::DedupCollision {
                            vertex: near,
                            detail: format!(
                                "disk separation below {DEDUP_TOL:e} but hyperbolic distance {d:.4}; \
                                 the chart cannot resolve this radius"
                            ),
                        });
                    }
                    hit = Some(id);
                }
            }
        }
        Ok(hit)
    }

    fn insert(&mut self, p: &HPoint, id: u32) {
        self.cells.entry(Self::cell(p)).or_default().push(id);
    }
}

/// Rotation lists and coordinates of the radius-`radius` ball, vertex 0 at
/// the origin and ids in breadth-first order.
pub fn orbit_ball(radius: u32) -> Result<(Vec<[u32; DEGREE]>, Vec<HPoint>), LatticeError> {
    let ell = edge_length();
    let base = origin_neighbours();
    let (_, _, bisector) = triangle_mirrors();
    let rot7 = rotation_seventh();
    let mut rot_pow = [IsomMatrix::IDENTITY; DEGREE];
    for k in 1..DEGREE {
        rot_pow[k] = renormalize(&(rot_pow[k - 1] * rot7))?;
    }
    // sends the origin to its slot-k neighbour
    let step: Vec<IsomMatrix> = rot_pow.iter().map(|r| *r * bisector.matrix()).collect();

    let mut points = vec![HPoint::ORIGIN];
    let mut frames = vec![IsomMatrix::IDENTITY];
    // determinant sign of each frame, tracked exactly: every step composes
    // with one reflection
    let mut preserving = vec![true];
    let mut depth = vec![0u32];
    let mut index = DiskIndex { cells: HashMap::new() };
    index.insert(&HPoint::ORIGIN, 0);
    let mut rot: Vec<[u32; DEGREE]> = Vec::new();

    let mut head = 0;
    while head < points.len() {
        let v = head;
        head += 1;
        let frame = frames[v];
        let orientation_kept = preserving[v];
        let mut row = [NONE; DEGREE];
        for (j, entry) in row.iter_mut().enumerate() {
            // counter-clockwise order at v
            let k = if orientation_kept { j } else { (DEGREE - j) % DEGREE };
            let q = frame.apply(&base[k]).normalized();
            let found = index.find(&q, &points, v)?;
            let w = match found {
                Some(w) => w,
                None if depth[v] < radius => {
                    let w = points.len() as u32;
                    let t = renormalize(&(frame * step[k]))?;
                    let q = t.apply(&HPoint::ORIGIN).normalized();
                    index.insert(&q, w);
                    points.push(q);
                    frames.push(t);
                    preserving.push(!orientation_kept);
                    depth.push(depth[v] + 1);
                    w
                }
                None => continue,
            };
            let d = hyp_dist(&points[v], &points[w as usize]);
            if (d - ell).abs() > EDGE_TOL {
                return Err(LatticeError::DedupCollision {
                    vertex: v,
                    detail: format!("neighbour {w} at distance {d:.6}, expected {ell:.6}"),
                });
            }
            *entry = w;
        }
        rot.push(row);
    }
    Ok((rot, points))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_rings() {
        let (rot, pts) = orbit_ball(2).unwrap();
        assert_eq!(rot.len(), 29);
        assert_eq!(pts.len(), 29);
        assert_eq!(rot[0], [1, 2, 3, 4, 5, 6, 7]);
        for p in &pts {
            assert!(p.is_valid(1e-9));
        }
    }

    #[test]
    fn adjacent_points_are_one_edge_apart() {
        let (rot, pts) = orbit_ball(6).unwrap();
        let ell = edge_length();
        for (v, row) in rot.iter().enumerate() {
            for &w in row.iter().filter(|&&w| w != NONE) {
                assert!((hyp_dist(&pts[v], &pts[w as usize]) - ell).abs() < 1e-9);
            }
        }
    }
}
