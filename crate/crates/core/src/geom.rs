//! Hyperboloid-model kernel for the hyperbolic plane.
//!
//! Points live on the upper sheet of `-x0^2 + x1^2 + x2^2 = -1` and isometries
//! are 3x3 matrices preserving the Minkowski form of signature `(-,+,+)`.
//! The Poincare disk is only used as a bounded chart (deduplication, drawing).

use std::f64::consts::PI;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::error::GeomError;

/// Tolerance for invariant checks (sheet membership, form preservation).
pub const INVARIANT_TOL: f64 = 1e-9;
/// Tolerance used when deduplicating orbit points in the disk chart.
pub const DEDUP_TOL: f64 = 1e-6;
/// Largest form error `renormalize` is willing to correct.
pub const MAX_DRIFT: f64 = 1e-3;

/// A point of the upper hyperboloid sheet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HPoint(pub [f64; 3]);

/// Spacelike unit normal of a geodesic line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mirror(pub [f64; 3]);

/// Minkowski bilinear form `-p0 q0 + p1 q1 + p2 q2`.
#[inline]
pub fn mink(p: &[f64; 3], q: &[f64; 3]) -> f64 {
    -p[0] * q[0] + p[1] * q[1] + p[2] * q[2]
}

impl HPoint {
    /// The basepoint `o = (1, 0, 0)`.
    pub const ORIGIN: HPoint = HPoint([1.0, 0.0, 0.0]);

    /// Lift `(x1, x2)` onto the upper sheet.
    pub fn lift(x1: f64, x2: f64) -> Self {
        HPoint([(1.0 + x1 * x1 + x2 * x2).sqrt(), x1, x2])
    }

    /// Point at distance `r` from the origin in direction `theta`.
    pub fn polar(r: f64, theta: f64) -> Self {
        HPoint([r.cosh(), r.sinh() * theta.cos(), r.sinh() * theta.sin()])
    }

    pub fn coords(&self) -> [f64; 3] {
        self.0
    }

    /// `mink(p, p) = -1` and `x0 >= 1`, both within `tol`.
    pub fn is_valid(&self, tol: f64) -> bool {
        (mink(&self.0, &self.0) + 1.0).abs() <= tol && self.0[0] >= 1.0 - tol
    }

    /// Rescale back onto the sheet after accumulated rounding.
    pub fn normalized(&self) -> Self {
        let s = (-mink(&self.0, &self.0)).sqrt();
        let s = if self.0[0] < 0.0 { -s } else { s };
        HPoint([self.0[0] / s, self.0[1] / s, self.0[2] / s])
    }
}

impl Mirror {
    pub fn new(n: [f64; 3]) -> Self {
        Mirror(n)
    }

    pub fn is_unit(&self, tol: f64) -> bool {
        (mink(&self.0, &self.0) - 1.0).abs() <= tol
    }

    /// The geodesic line through two distinct points.
    pub fn through(p: &HPoint, q: &HPoint) -> Self {
        let (a, b) = (p.0, q.0);
        let cross = [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ];
        // J * cross is Minkowski-orthogonal to both points.
        let n = [-cross[0], cross[1], cross[2]];
        let s = mink(&n, &n).sqrt();
        Mirror([n[0] / s, n[1] / s, n[2] / s])
    }

    /// Signed-distance sign of a point relative to the line.
    pub fn side(&self, p: &HPoint) -> f64 {
        mink(&p.0, &self.0)
    }

    pub fn matrix(&self) -> IsomMatrix {
        let n = self.0;
        let jn = [-n[0], n[1], n[2]];
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = if i == j { 1.0 } else { 0.0 } - 2.0 * n[i] * jn[j];
            }
        }
        IsomMatrix(m)
    }
}

/// Hyperbolic distance; arguments of `arccosh` below 1 are clamped.
pub fn hyp_dist(p: &HPoint, q: &HPoint) -> f64 {
    let c = -mink(&p.0, &q.0);
    if c <= 1.0 {
        0.0
    } else {
        c.acosh()
    }
}

/// Reflection of `p` in the geodesic with normal `m`.
pub fn reflect(m: &Mirror, p: &HPoint) -> HPoint {
    let k = 2.0 * mink(&p.0, &m.0);
    HPoint([p.0[0] - k * m.0[0], p.0[1] - k * m.0[1], p.0[2] - k * m.0[2]])
}

/// Half of the lattice edge length: `cosh(h) = cos(pi/3) / sin(pi/7)`.
fn half_edge() -> f64 {
    ((PI / 3.0).cos() / (PI / 7.0).sin()).acosh()
}

/// Length of a lattice edge, `2 arccosh(cos(pi/3) / sin(pi/7))`.
pub fn edge_length() -> f64 {
    2.0 * half_edge()
}

/// Mirrors of the (2,3,7) fundamental triangle, inward-pointing normals.
///
/// Returned as `(edge, median, bisector)`:
/// - `edge` is the line `x2 = 0`, carrying the lattice edge from `o` to its
///   slot-0 neighbour;
/// - `median` passes through `o` at angle `pi/7` (dihedral angle `pi/7` with
///   `edge`, the corner sitting at `o`);
/// - `bisector` is perpendicular to `edge` at the edge midpoint (angle `pi/2`)
///   and meets `median` at the face centre (angle `pi/3`).
pub fn triangle_mirrors() -> (Mirror, Mirror, Mirror) {
    let s7 = PI / 7.0;
    let h = half_edge();
    let edge = Mirror([0.0, 0.0, 1.0]);
    let median = Mirror([0.0, s7.sin(), -s7.cos()]);
    let bisector = Mirror([-h.sinh(), -h.cosh(), 0.0]);
    (edge, median, bisector)
}

/// Poincare disk chart.
pub fn to_disk(p: &HPoint) -> (f64, f64) {
    let d = 1.0 + p.0[0];
    (p.0[1] / d, p.0[2] / d)
}

/// Inverse of [`to_disk`].
pub fn from_disk(u: f64, v: f64) -> HPoint {
    let r2 = u * u + v * v;
    let d = 1.0 - r2;
    HPoint([(1.0 + r2) / d, 2.0 * u / d, 2.0 * v / d])
}

/// Point at arc length `t` on the geodesic from `p` towards `q`.
pub fn geodesic_point(p: &HPoint, q: &HPoint, t: f64) -> HPoint {
    let d = hyp_dist(p, q);
    if d == 0.0 {
        return *p;
    }
    let c = -mink(&p.0, &q.0);
    let sd = d.sinh();
    let u = [
        (q.0[0] - c * p.0[0]) / sd,
        (q.0[1] - c * p.0[1]) / sd,
        (q.0[2] - c * p.0[2]) / sd,
    ];
    let (ch, sh) = (t.cosh(), t.sinh());
    HPoint([
        ch * p.0[0] + sh * u[0],
        ch * p.0[1] + sh * u[1],
        ch * p.0[2] + sh * u[2],
    ])
}

/// A 3x3 matrix acting on hyperboloid coordinates (row-major).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsomMatrix(pub [[f64; 3]; 3]);

impl IsomMatrix {
    pub const IDENTITY: IsomMatrix = IsomMatrix([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    pub fn apply(&self, p: &HPoint) -> HPoint {
        let m = &self.0;
        let x = &p.0;
        HPoint([
            m[0][0] * x[0] + m[0][1] * x[1] + m[0][2] * x[2],
            m[1][0] * x[0] + m[1][1] * x[1] + m[1][2] * x[2],
            m[2][0] * x[0] + m[2][1] * x[1] + m[2][2] * x[2],
        ])
    }

    fn column(&self, j: usize) -> [f64; 3] {
        [self.0[0][j], self.0[1][j], self.0[2][j]]
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Largest entry of `|M^T J M - J|`.
    pub fn form_error(&self) -> f64 {
        let j = [-1.0, 1.0, 1.0];
        let mut err: f64 = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                let g = mink(&self.column(a), &self.column(b));
                let target = if a == b { j[a] } else { 0.0 };
                err = err.max((g - target).abs());
            }
        }
        err
    }

    /// Preserves the form within [`INVARIANT_TOL`] and keeps the upper sheet.
    pub fn is_isometry(&self) -> bool {
        self.form_error() <= INVARIANT_TOL && self.0[0][0] > 0.0
    }
}

impl Mul for IsomMatrix {
    type Output = IsomMatrix;

    fn mul(self, rhs: IsomMatrix) -> IsomMatrix {
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = (0..3).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        IsomMatrix(out)
    }
}

/// Nearest form-preserving matrix via Minkowski Gram-Schmidt on the columns.
///
/// Matrices whose form error exceeds [`MAX_DRIFT`] are rejected: they must be
/// rebuilt from generators rather than patched.
pub fn renormalize(m: &IsomMatrix) -> Result<IsomMatrix, GeomError> {
    let err = m.form_error();
    if !(err <= MAX_DRIFT) {
        return Err(GeomError::Drift { error: err });
    }
    if m.0[0][0] <= 0.0 {
        return Err(GeomError::SheetFlip);
    }
    let scale = |v: [f64; 3], s: f64| [v[0] / s, v[1] / s, v[2] / s];
    let axpy = |v: [f64; 3], a: f64, w: [f64; 3]| [v[0] + a * w[0], v[1] + a * w[1], v[2] + a * w[2]];

    let c0 = m.column(0);
    let c0 = scale(c0, (-mink(&c0, &c0)).sqrt());
    let c1 = axpy(m.column(1), mink(&m.column(1), &c0), c0);
    let c1 = scale(c1, mink(&c1, &c1).sqrt());
    let c2 = m.column(2);
    let c2 = axpy(c2, mink(&c2, &c0), c0);
    let c2 = axpy(c2, -mink(&c2, &c1), c1);
    let c2 = scale(c2, mink(&c2, &c2).sqrt());

    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        out[i] = [c0[i], c1[i], c2[i]];
    }
    Ok(IsomMatrix(out))
}

/// Rotation by `2 pi / 7` counter-clockwise about the origin.
pub fn rotation_seventh() -> IsomMatrix {
    let (edge, median, _) = triangle_mirrors();
    median.matrix() * edge.matrix()
}

/// The seven lattice neighbours of the origin, counter-clockwise from the
/// positive `x1` axis.
pub fn origin_neighbours() -> [HPoint; 7] {
    let l = edge_length();
    std::array::from_fn(|k| HPoint::polar(l, 2.0 * PI * k as f64 / 7.0))
}
