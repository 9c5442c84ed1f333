//! Segment/triangle contact, point location and the index-aware "improper
//! intersection" tests used by surface validation and the decomposition search.

use super::{Point3, PolyhedralSurface, TOL_GEOM};
use std::f64::consts::PI;

/// Where a query point sits relative to a closed surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointLocation {
    Inside,
    Outside,
    Boundary,
}

/// Parameter interval `[t0, t1] ⊂ [0, 1]` of the segment `p + t (q - p)` lying in
/// the closed triangle `abc`, or `None`. `tol` is an absolute distance.
pub fn segment_triangle_interval(
    p: &Point3,
    q: &Point3,
    a: &Point3,
    b: &Point3,
    c: &Point3,
    tol: f64,
) -> Option<(f64, f64)> {
    let n = (b - a).cross(&(c - a));
    let nn = n.norm();
    if nn <= f64::MIN_POSITIVE {
        return None;
    }
    let n = n / nn;
    let dp = n.dot(&(p - a));
    let dq = n.dot(&(q - a));
    let d = q - p;
    // inward edge normals in the triangle plane
    let edges = [(a, b), (b, c), (c, a)];
    if dp.abs() <= tol && dq.abs() <= tol {
        let (mut t0, mut t1) = (0.0f64, 1.0f64);
        for (u, v) in edges {
            let m = n.cross(&(v - u)).normalize();
            // m . (p + t d - u) >= -tol
            let alpha = m.dot(&(p - u)) + tol;
            let beta = m.dot(&d);
            if beta.abs() <= f64::EPSILON * d.norm().max(1.0) {
                if alpha < 0.0 {
                    return None;
                }
            } else if beta > 0.0 {
                t0 = t0.max(-alpha / beta);
            } else {
                t1 = t1.min(-alpha / beta);
            }
            if t0 > t1 {
                return None;
            }
        }
        return Some((t0, t1));
    }
    if (dp > tol && dq > tol) || (dp < -tol && dq < -tol) {
        return None;
    }
    let t = if dp.abs() <= tol {
        0.0
    } else if dq.abs() <= tol {
        1.0
    } else {
        (dp / (dp - dq)).clamp(0.0, 1.0)
    };
    let x = p + d * t;
    for (u, v) in edges {
        let m = n.cross(&(v - u)).normalize();
        if m.dot(&(x - u)) < -tol {
            return None;
        }
    }
    Some((t, t))
}

/// Euclidean distance from `x` to the closed triangle `abc`.
pub fn point_triangle_distance(x: &Point3, a: &Point3, b: &Point3, c: &Point3) -> f64 {
    let ab = b - a;
    let ac = c - a;
    let n = ab.cross(&ac);
    let nn = n.norm_squared();
    if nn > 0.0 {
        // barycentric projection onto the plane
        let ax = x - a;
        let v = ax.cross(&ac).dot(&n) / nn;
        let w = ab.cross(&ax).dot(&n) / nn;
        if v >= 0.0 && w >= 0.0 && v + w <= 1.0 {
            return (n.dot(&ax) / nn.sqrt()).abs();
        }
    }
    segment_distance(x, a, b).min(segment_distance(x, b, c)).min(segment_distance(x, c, a))
}

fn segment_distance(x: &Point3, a: &Point3, b: &Point3) -> f64 {
    let d = b - a;
    let l2 = d.norm_squared();
    let t = if l2 > 0.0 { ((x - a).dot(&d) / l2).clamp(0.0, 1.0) } else { 0.0 };
    (x - (a + d * t)).norm()
}

/// Signed solid angle of triangle `abc` seen from `x` (Van Oosterom and Strackee).
fn solid_angle(x: &Point3, a: &Point3, b: &Point3, c: &Point3) -> f64 {
    let (ra, rb, rc) = (a - x, b - x, c - x);
    let (la, lb, lc) = (ra.norm(), rb.norm(), rc.norm());
    let num = ra.dot(&rb.cross(&rc));
    let den = la * lb * lc + ra.dot(&rb) * lc + ra.dot(&rc) * lb + rb.dot(&rc) * la;
    2.0 * num.atan2(den)
}

/// Classify `x` against a closed, outward-oriented surface. Points within
/// `TOL_GEOM * scale` of a face are `Boundary`; otherwise the generalized
/// winding number decides.
pub fn locate_point(s: &PolyhedralSurface, x: &Point3) -> PointLocation {
    let v = s.vertices();
    let tol = TOL_GEOM * s.scale().max(1.0);
    let mut w = 0.0;
    for f in s.faces() {
        let (a, b, c) = (&v[f[0]], &v[f[1]], &v[f[2]]);
        if point_triangle_distance(x, a, b, c) <= tol {
            return PointLocation::Boundary;
        }
        w += solid_angle(x, a, b, c);
    }
    if w / (4.0 * PI) > 0.5 {
        PointLocation::Inside
    } else {
        PointLocation::Outside
    }
}

/// Does the segment between vertices `i` and `j` meet the triangle `tri` anywhere
/// other than at vertices the two share? Segments that are edges of `tri` never do.
pub(crate) fn segment_meets_triangle(pts: &[Point3], i: usize, j: usize, tri: [usize; 3], tol: f64) -> bool {
    let si = tri.contains(&i);
    let sj = tri.contains(&j);
    if si && sj {
        return false;
    }
    let (p, q) = (&pts[i], &pts[j]);
    let len = (q - p).norm();
    if len <= tol {
        return false;
    }
    if si || sj {
        let (o, far) = if si { (i, j) } else { (j, i) };
        return leaves_into_corner(pts, o, far, tri, tol);
    }
    segment_triangle_interval(p, q, &pts[tri[0]], &pts[tri[1]], &pts[tri[2]], tol).is_some()
}

/// Segment from the triangle's vertex `o` to `far`: it meets the triangle
/// beyond `o` only if it stays in the plane and heads into the corner at `o`.
fn leaves_into_corner(pts: &[Point3], o: usize, far: usize, tri: [usize; 3], tol: f64) -> bool {
    let others: Vec<usize> = tri.iter().copied().filter(|&x| x != o).collect();
    let (po, u, w) = (&pts[o], pts[others[0]] - pts[o], pts[others[1]] - pts[o]);
    let d = pts[far] - po;
    let n = u.cross(&w);
    let nn = n.norm();
    if nn <= f64::MIN_POSITIVE || (n.dot(&d) / nn).abs() > tol {
        return false;
    }
    let s1 = n.dot(&u.cross(&d)) / (nn * u.norm() * d.norm());
    let s2 = n.dot(&d.cross(&w)) / (nn * w.norm() * d.norm());
    s1 >= -TOL_GEOM && s2 >= -TOL_GEOM
}

/// Do two triangles (given by vertex indices) intersect anywhere other than in
/// the simplex they share?
pub(crate) fn triangles_meet_improperly(pts: &[Point3], f: [usize; 3], g: [usize; 3], tol: f64) -> bool {
    let shared = f.iter().filter(|x| g.contains(x)).count();
    if shared == 3 {
        return true;
    }
    for (x, y) in [(f, g), (g, f)] {
        for k in 0..3 {
            let (a, b) = (x[k], x[(k + 1) % 3]);
            if segment_meets_triangle(pts, a, b, y, tol) {
                return true;
            }
        }
    }
    false
}
