//! Hull extremality by Carathéodory enumeration. A point of a finite set in
//! 3-space fails to be extreme exactly when it lies in a simplex with at most
//! four vertices drawn from the remaining points, so checking points, segments,
//! triangles and tetrahedra decides the linear feasibility problem exactly.

use super::{orient_det, scale_of, Point3, PolyhedralSurface, TOL_GEOM, TOL_HULL};
use crate::error::{Error, Result};
use nalgebra::Matrix3;

/// Per-vertex extremality flags and their conjunction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeakConvexity {
    pub per_vertex: Vec<bool>,
    pub all: bool,
}

impl WeakConvexity {
    pub fn failing(&self) -> Vec<usize> {
        self.per_vertex.iter().enumerate().filter(|(_, &ok)| !ok).map(|(i, _)| i).collect()
    }
}

/// Is `pts[i]` an extreme point of the convex hull of `pts`?
pub fn is_extreme(pts: &[Point3], i: usize) -> bool {
    let x = pts[i];
    let scale = scale_of(pts).max(f64::MIN_POSITIVE);
    let tol = TOL_HULL * scale;
    let o: Vec<Point3> = pts.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, p)| *p).collect();
    let n = o.len();
    for a in 0..n {
        if (o[a] - x).norm() <= tol {
            return false;
        }
        for b in a + 1..n {
            if in_segment(&x, &o[a], &o[b], tol) {
                return false;
            }
            for c in b + 1..n {
                if in_triangle(&x, &o[a], &o[b], &o[c], tol, scale) {
                    return false;
                }
                for d in c + 1..n {
                    if in_tetra(&x, &o[a], &o[b], &o[c], &o[d], scale) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

fn in_segment(x: &Point3, a: &Point3, b: &Point3, tol: f64) -> bool {
    let d = b - a;
    let l2 = d.norm_squared();
    if l2 <= tol * tol {
        return false;
    }
    let t = (x - a).dot(&d) / l2;
    let l = l2.sqrt();
    t >= -tol / l && t <= 1.0 + tol / l && (x - (a + d * t)).norm() <= tol
}

fn in_triangle(x: &Point3, a: &Point3, b: &Point3, c: &Point3, tol: f64, scale: f64) -> bool {
    let (ab, ac, ax) = (b - a, c - a, x - a);
    let n = ab.cross(&ac);
    let nn = n.norm();
    if nn <= TOL_GEOM * scale * scale {
        return false;
    }
    if (n.dot(&ax) / nn).abs() > tol {
        return false;
    }
    let n2 = nn * nn;
    let v = ax.cross(&ac).dot(&n) / n2;
    let w = ab.cross(&ax).dot(&n) / n2;
    let u = 1.0 - v - w;
    u >= -TOL_HULL && v >= -TOL_HULL && w >= -TOL_HULL
}

fn in_tetra(x: &Point3, a: &Point3, b: &Point3, c: &Point3, d: &Point3, scale: f64) -> bool {
    if orient_det(a, b, c, d).abs() <= TOL_GEOM * scale * scale * scale {
        return false;
    }
    let m = Matrix3::from_columns(&[b - a, c - a, d - a]);
    let Some(inv) = m.try_inverse() else { return false };
    let l = inv * (x - a);
    let l0 = 1.0 - l.sum();
    l0 >= -TOL_HULL && l.iter().all(|&t| t >= -TOL_HULL)
}

/// Does some plane through `pts[i]` leave every point on one closed side?
pub fn on_hull_boundary(pts: &[Point3], i: usize) -> bool {
    let x = pts[i];
    let scale = scale_of(pts).max(f64::MIN_POSITIVE);
    let tol = TOL_HULL * scale;
    let n = pts.len();
    if n <= 4 {
        return true;
    }
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let nrm = (pts[b] - pts[a]).cross(&(pts[c] - pts[a]));
                let l = nrm.norm();
                if l <= TOL_GEOM * scale * scale {
                    continue;
                }
                let nrm = nrm / l;
                if nrm.dot(&(x - pts[a])).abs() > tol {
                    continue;
                }
                let side = |p: &Point3| nrm.dot(&(p - pts[a]));
                if pts.iter().all(|p| side(p) <= tol) || pts.iter().all(|p| side(p) >= -tol) {
                    return true;
                }
            }
        }
    }
    false
}

/// Extremality of every vertex of a valid surface.
pub fn is_weakly_convex(s: &PolyhedralSurface) -> Result<WeakConvexity> {
    s.ensure_valid()?;
    let per_vertex: Vec<bool> = (0..s.vertices().len()).map(|i| is_extreme(s.vertices(), i)).collect();
    let all = per_vertex.iter().all(|&b| b);
    Ok(WeakConvexity { per_vertex, all })
}

/// Vertices on the hull boundary that are not extreme.
pub fn flat_vertices(s: &PolyhedralSurface) -> Result<Vec<usize>> {
    let wc = is_weakly_convex(s)?;
    Ok(wc.failing().into_iter().filter(|&i| on_hull_boundary(s.vertices(), i)).collect())
}

/// Convex hull of points in general position (no four coplanar hull points),
/// as an outward-oriented surface. Brute force; meant for small test sets.
pub fn convex_hull(pts: &[Point3]) -> Result<PolyhedralSurface> {
    let n = pts.len();
    if n < 4 {
        return Err(Error::BadParams("convex hull needs at least 4 points".into()));
    }
    let scale = scale_of(pts).max(f64::MIN_POSITIVE);
    let tol = TOL_GEOM * scale * scale * scale;
    let mut faces = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let mut pos = 0;
                let mut neg = 0;
                for d in 0..n {
                    if d == a || d == b || d == c {
                        continue;
                    }
                    let o = orient_det(&pts[a], &pts[b], &pts[c], &pts[d]);
                    if o > tol {
                        pos += 1;
                    } else if o < -tol {
                        neg += 1;
                    } else {
                        return Err(Error::BadParams("points are not in general position".into()));
                    }
                }
                if pos == 0 {
                    faces.push([a, b, c]);
                } else if neg == 0 {
                    faces.push([a, c, b]);
                }
            }
        }
    }
    // drop interior points and reindex
    let mut used: Vec<usize> = faces.iter().flatten().copied().collect();
    used.sort_unstable();
    used.dedup();
    let remap = |i: usize| used.binary_search(&i).unwrap();
    let verts = used.iter().map(|&i| pts[i]).collect();
    let faces = faces.iter().map(|f| [remap(f[0]), remap(f[1]), remap(f[2])]).collect();
    let s = PolyhedralSurface::new(verts, faces)?;
    s.ensure_valid()?;
    Ok(s)
}
