//! Poincare-disk drawings of walks.

use std::fmt::Write as _;

use crate::error::{AnalysisError, LatticeError};
use crate::geom::{geodesic_point, to_disk, HPoint};
use crate::lattice::auto::Automorphism;
use crate::lattice::Lattice;
use crate::saw::reflect::reflect_suffix;
use crate::saw::Walk;

const SIZE: f64 = 800.0;
const SCALE: f64 = 390.0;

fn px(p: &HPoint) -> (f64, f64) {
    let (u, v) = to_disk(p);
    (SIZE / 2.0 + SCALE * u, SIZE / 2.0 - SCALE * v)
}

fn polyline(pts: &[(f64, f64)]) -> String {
    let mut s = String::new();
    for (k, (x, y)) in pts.iter().enumerate() {
        if k > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{x:.3},{y:.3}");
    }
    s
}

/// SVG of `walk` over the lattice edges. With `mirror = (i, g)`, also draws
/// the fixed line of `g` and the reflected suffix `g(γ(i..n))` dashed.
pub fn render_walk(
    lat: &Lattice,
    walk: &Walk<u32>,
    mirror: Option<(usize, Automorphism<u32>)>,
) -> Result<String, AnalysisError> {
    let coords = lat.coords().ok_or(LatticeError::MissingCoordinates)?;
    let at = |v: u32| px(&coords[v as usize]);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let c = SIZE / 2.0;
    let _ = writeln!(svg, r##"<circle cx="{c}" cy="{c}" r="{SCALE}" fill="white" stroke="#999" stroke-width="1"/>"##);
    let _ = writeln!(svg, r##"<g stroke="#d0d0d0" stroke-width="0.5">"##);
    for (v, row) in lat.raw_rotation().iter().enumerate() {
        for &w in row {
            if w != crate::lattice::NONE && (v as u32) < w {
                let (x1, y1) = at(v as u32);
                let (x2, y2) = at(w);
                let _ = writeln!(svg, r#"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}"/>"#);
            }
        }
    }
    let _ = writeln!(svg, "</g>");

    if let Some((i, g)) = mirror {
        // the fixed line runs through γ(i) and its fixed neighbour
        let x0 = coords[g.anchor as usize];
        let w = lat.rotation(g.anchor)[g.anchor_slot as usize].ok_or(LatticeError::Escape { vertex: g.anchor.to_string() })?;
        let q = coords[w as usize];
        let pts: Vec<(f64, f64)> = (-60..=60).map(|k| px(&geodesic_point(&x0, &q, k as f64 * 0.25))).collect();
        let _ = writeln!(svg, r##"<polyline fill="none" stroke="#ff8c00" stroke-width="2" points="{}"/>"##, polyline(&pts));
        let image = reflect_suffix(lat, walk, i, g)?;
        let pts: Vec<(f64, f64)> = image[i..].iter().map(|&v| at(v)).collect();
        let _ = writeln!(
            svg,
            r##"<polyline fill="none" stroke="#2e8b57" stroke-width="2" stroke-dasharray="6,4" points="{}"/>"##,
            polyline(&pts)
        );
    }

    let pts: Vec<(f64, f64)> = walk.vertices().iter().map(|&v| at(v)).collect();
    let _ = writeln!(svg, r##"<polyline fill="none" stroke="#1a9e3a" stroke-width="2.5" points="{}"/>"##, polyline(&pts));
    let (x, y) = pts[0];
    let _ = writeln!(svg, r##"<circle cx="{x:.3}" cy="{y:.3}" r="3.5" fill="#1a9e3a"/>"##);
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::hull::HullMode;
    use crate::lattice::BuildMode;
    use crate::saw::reflect::{collect_walks, reflect_at};

    fn points_of(svg: &str, stroke: &str) -> Vec<Vec<(f64, f64)>> {
        svg.lines()
            .filter(|l| l.starts_with("<polyline") && l.contains(stroke) && !l.contains("dasharray"))
            .map(|l| {
                let p = l.split("points=\"").nth(1).unwrap().trim_end_matches("\"/>");
                p.split(' ')
                    .map(|xy| {
                        let (x, y) = xy.split_once(',').unwrap();
                        (x.parse().unwrap(), y.parse().unwrap())
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn walk_polyline() {
        let lat = Lattice::build_ball(7, BuildMode::Geometric).unwrap();
        let walks = collect_walks(&lat, 5, true).unwrap();
        let w = &walks[walks.len() / 3];
        let svg = render_walk(&lat, w, None).unwrap();
        let lines = points_of(&svg, "#1a9e3a");
        assert_eq!(lines.len(), 1);
        assert_eq!(lines[0].len() - 1, 5);
        for &(x, y) in &lines[0] {
            assert!((x - 400.0).hypot(y - 400.0) < SCALE);
        }
        assert_eq!(svg, render_walk(&lat, w, None).unwrap());

        let r = walks
            .iter()
            .find_map(|w| {
                let r = reflect_at(&lat, w, 2, None, HullMode::OneStep).unwrap();
                r.mirror.map(|m| (w.clone(), r.walk, m))
            })
            .unwrap();
        let a = render_walk(&lat, &r.0, Some((2, r.2))).unwrap();
        let b = render_walk(&lat, &r.1, None).unwrap();
        assert!(a.contains("#ff8c00"));
        let pa = &points_of(&a, "#1a9e3a")[0];
        let pb = &points_of(&b, "#1a9e3a")[0];
        assert_eq!(pa[..3], pb[..3]);
    }

    #[test]
    fn needs_coordinates() {
        let lat = Lattice::build_ball(3, BuildMode::Combinatorial).unwrap();
        let w = collect_walks(&lat, 2, true).unwrap().remove(0);
        assert!(render_walk(&lat, &w, None).is_err());
    }
}
