//! Points, predicates and the polyhedral surface model.

mod hull;
mod intersect;
mod surface;

pub use hull::{convex_hull, flat_vertices, is_extreme, is_weakly_convex, on_hull_boundary, WeakConvexity};
pub(crate) use intersect::segment_meets_triangle;
pub use intersect::{locate_point, point_triangle_distance, segment_triangle_interval, PointLocation};
pub use surface::{PolyhedralSurface, ValidityReport, Violation};

/// Vertex positions and velocity fields share one representation.
pub type Point3 = nalgebra::Vector3<f64>;
pub type Vector3 = nalgebra::Vector3<f64>;

/// Absolute tolerance for degeneracy predicates on unit-scale inputs.
pub const TOL_GEOM: f64 = 1e-9;
/// Tolerance of the hull-extremality feasibility test.
pub const TOL_HULL: f64 = 1e-9;

/// Largest absolute coordinate over a point set.
pub fn scale_of<'a, I: IntoIterator<Item = &'a Point3>>(pts: I) -> f64 {
    pts.into_iter().map(|p| p.amax()).fold(0.0, f64::max)
}

/// Signed volume of the parallelepiped spanned by `p1-p0, p2-p0, p3-p0`.
pub fn orient_det(p0: &Point3, p1: &Point3, p2: &Point3, p3: &Point3) -> f64 {
    (p1 - p0).dot(&(p2 - p0).cross(&(p3 - p0)))
}

/// Sign of the orientation determinant, with a scale-aware zero band.
pub fn orientation(p0: &Point3, p1: &Point3, p2: &Point3, p3: &Point3) -> i8 {
    let det = orient_det(p0, p1, p2, p3);
    let s = scale_of([p0, p1, p2, p3]);
    if det.abs() <= TOL_GEOM * s * s * s {
        0
    } else if det > 0.0 {
        1
    } else {
        -1
    }
}

/// Canonical undirected edge key.
#[inline]
pub fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(x: f64, y: f64, z: f64) -> Point3 {
        Point3::new(x, y, z)
    }

    #[test]
    fn right_handed_frame_is_positive() {
        let o = p(0., 0., 0.);
        assert_eq!(orientation(&o, &p(1., 0., 0.), &p(0., 1., 0.), &p(0., 0., 1.)), 1);
        assert_eq!(orientation(&o, &p(1., 0., 0.), &p(0., 0., 1.), &p(0., 1., 0.)), -1);
    }

    #[test]
    fn coplanar_points_are_zero() {
        let o = p(0., 0., 0.);
        assert_eq!(orientation(&o, &p(1., 0., 0.), &p(0., 1., 0.), &p(1., 1., 0.)), 0);
        assert_eq!(orientation(&o, &o, &o, &o), 0);
    }

    proptest! {
        #[test]
        fn transposition_negates(c in prop::array::uniform12(-10.0f64..10.0)) {
            let q: Vec<Point3> = c.chunks(3).map(|v| p(v[0], v[1], v[2])).collect();
            let s = orientation(&q[0], &q[1], &q[2], &q[3]);
            prop_assert_eq!(orientation(&q[1], &q[0], &q[2], &q[3]), -s);
            prop_assert_eq!(orientation(&q[0], &q[2], &q[1], &q[3]), -s);
            prop_assert_eq!(orientation(&q[0], &q[1], &q[3], &q[2]), -s);
            prop_assert_eq!(orientation(&q[3], &q[1], &q[2], &q[0]), -s);
        }
    }
}
