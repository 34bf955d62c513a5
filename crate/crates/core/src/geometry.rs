//! Convex polygons in the PQ plane: hull construction, area, intersection
//! and the Jaccard similarity used to score identified regions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Counter-clockwise convex polygon, vertices in (kW, kvar).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForPolygon {
    pub vertices: Vec<[f64; 2]>,
}

#[inline]
fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Andrew's monotone chain. Collinear points are dropped from the hull.
pub fn convex_hull(points: &[[f64; 2]]) -> Result<ForPolygon> {
    let mut pts: Vec<[f64; 2]> = points.iter().copied().filter(|p| p[0].is_finite() && p[1].is_finite()).collect();
    if pts.len() < 3 {
        return Err(Error::Degenerate(format!("{} points, need at least 3", pts.len())));
    }
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();

    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();

    if hull.len() < 3 {
        return Err(Error::Degenerate("all points collinear".into()));
    }
    Ok(ForPolygon { vertices: hull })
}

impl ForPolygon {
    /// Shoelace area; zero for fewer than three vertices.
    pub fn area(&self) -> f64 {
        let v = &self.vertices;
        if v.len() < 3 {
            return 0.0;
        }
        let twice: f64 = (0..v.len())
            .map(|i| {
                let (a, b) = (v[i], v[(i + 1) % v.len()]);
                a[0] * b[1] - a[1] * b[0]
            })
            .sum();
        (twice / 2.0).abs()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.len() < 3
    }

    /// True if `p` lies inside or within `tol` of the boundary.
    pub fn contains(&self, p: [f64; 2], tol: f64) -> bool {
        let v = &self.vertices;
        (0..v.len()).all(|i| {
            let (a, b) = (v[i], v[(i + 1) % v.len()]);
            let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
            cross(a, b, p) >= -tol * len
        })
    }

    pub fn is_convex_ccw(&self) -> bool {
        let v = &self.vertices;
        v.len() >= 3
            && (0..v.len()).all(|i| cross(v[i], v[(i + 1) % v.len()], v[(i + 2) % v.len()]) >= 0.0)
    }

    pub fn scaled(&self, s: f64) -> ForPolygon {
        ForPolygon {
            vertices: self.vertices.iter().map(|p| [p[0] * s, p[1] * s]).collect(),
        }
    }

    pub fn bounding_box(&self) -> ([f64; 2], [f64; 2]) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in &self.vertices {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (lo, hi)
    }
}

pub fn area(poly: &ForPolygon) -> f64 {
    poly.area()
}

/// Intersection of two convex polygons by clipping `a` against every edge
/// of `b` (Sutherland–Hodgman). Returns `None` when the overlap has no area.
pub fn intersect(a: &ForPolygon, b: &ForPolygon) -> Option<ForPolygon> {
    if a.is_empty() || b.is_empty() {
        return None;
    }
    let mut out = a.vertices.clone();
    let clip = &b.vertices;
    for i in 0..clip.len() {
        if out.is_empty() {
            break;
        }
        let (e0, e1) = (clip[i], clip[(i + 1) % clip.len()]);
        let input = std::mem::take(&mut out);
        for j in 0..input.len() {
            let cur = input[j];
            let prev = input[(j + input.len() - 1) % input.len()];
            let dc = cross(e0, e1, cur);
            let dp = cross(e0, e1, prev);
            if dc >= 0.0 {
                if dp < 0.0 {
                    out.push(edge_cut(prev, cur, dp, dc));
                }
                out.push(cur);
            } else if dp >= 0.0 {
                out.push(edge_cut(prev, cur, dp, dc));
            }
        }
    }
    let poly = ForPolygon { vertices: out };
    (poly.area() > 0.0).then_some(poly)
}

fn edge_cut(p: [f64; 2], c: [f64; 2], dp: f64, dc: f64) -> [f64; 2] {
    let t = dp / (dp - dc);
    [p[0] + t * (c[0] - p[0]), p[1] + t * (c[1] - p[1])]
}

/// Intersection over union of two convex regions.
pub fn jaccard(a: &ForPolygon, b: &ForPolygon) -> Result<f64> {
    let (aa, ab) = (a.area(), b.area());
    if aa <= 0.0 && ab <= 0.0 {
        return Err(Error::Degenerate("both polygons have zero area".into()));
    }
    let inter = intersect(a, b).map_or(0.0, |p| p.area());
    // union by inclusion–exclusion; clamp guards rounding at identity
    Ok((inter / (aa + ab - inter)).clamp(0.0, 1.0))
}
