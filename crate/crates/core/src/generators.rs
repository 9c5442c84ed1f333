//! Parametric constructors for the polyhedra studied here and the closed-form
//! laws attached to them.

use crate::error::{Error, Result};
use crate::geom::{Point3, PolyhedralSurface};
use crate::triangulation::Triangulation;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_3, FRAC_PI_6, PI, TAU};

/// Twisted triangular antiprism. `theta` is the total rotation of the bottom
/// triangle; `theta = 0` is the convex prism, `theta = π/6` the classical
/// flexible instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchonhardtParams {
    pub theta: f64,
    pub r: f64,
    pub h: f64,
}

impl SchonhardtParams {
    pub fn new(theta: f64, r: f64, h: f64) -> Result<Self> {
        let p = SchonhardtParams { theta, r, h };
        p.check()?;
        Ok(p)
    }

    /// `θ = π/6, r = 1, h = 2`: top triangle at height 1 through `(1, 0, 1)`.
    pub fn standard() -> Self {
        SchonhardtParams { theta: FRAC_PI_6, r: 1.0, h: 2.0 }
    }

    pub fn check(&self) -> Result<()> {
        if !(self.r > 0.0 && self.r.is_finite()) || !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::BadParams(format!("r = {}, h = {} must be positive", self.r, self.h)));
        }
        if !(0.0..FRAC_PI_3).contains(&self.theta) {
            return Err(Error::BadParams(format!("theta = {} outside [0, π/3)", self.theta)));
        }
        Ok(())
    }
}

/// Vertex order A, B, C (top) then D, E, F (bottom).
pub const SCHONHARDT_FACES: [[usize; 3]; 8] =
    [[0, 4, 5], [3, 1, 5], [3, 4, 2], [0, 1, 5], [0, 4, 2], [3, 1, 2], [0, 1, 2], [3, 4, 5]];

fn ring(r: f64, z: f64, angles: [f64; 3]) -> [Point3; 3] {
    angles.map(|a| Point3::new(r * a.cos(), r * a.sin(), z))
}

fn top_angles() -> [f64; 3] {
    [0.0, TAU / 3.0, 2.0 * TAU / 3.0]
}

/// Bottom offsets are `{3π/2, π/6, 5π/6} + (θ − π/6)`, so that at `θ = 0` each
/// bottom vertex sits under a top vertex.
fn bottom_angles(theta: f64) -> [f64; 3] {
    let d = theta - FRAC_PI_6;
    [1.5 * PI + d, FRAC_PI_6 + d, 5.0 * FRAC_PI_6 + d]
}

fn schonhardt_points(p: &SchonhardtParams, z_shift: f64) -> [Point3; 6] {
    let t = ring(p.r, p.h / 2.0 + z_shift, top_angles());
    let b = ring(p.r, -p.h / 2.0 + z_shift, bottom_angles(p.theta));
    [t[0], t[1], t[2], b[0], b[1], b[2]]
}

pub fn schonhardt(p: &SchonhardtParams) -> Result<PolyhedralSurface> {
    p.check()?;
    PolyhedralSurface::new(schonhardt_points(p, 0.0).to_vec(), SCHONHARDT_FACES.to_vec())
}

/// Side length 1 and short diagonals `AE, BF, CD` of length 1, the height
/// adjusting with the twist. Requires `θ ∈ [0, π/3)`.
pub fn schonhardt_unit_side(theta: f64) -> Result<PolyhedralSurface> {
    let r = 1.0 / 3f64.sqrt();
    let h2 = 1.0 - 4.0 * r * r * (theta / 2.0).sin().powi(2);
    schonhardt(&SchonhardtParams::new(theta, r, h2.sqrt())?)
}

/// `h' = √(h² − 2r² sin(ω/2))`.
pub fn wunderlich_height(r: f64, omega: f64, h: f64) -> Result<f64> {
    if !(0.0..PI).contains(&omega) {
        return Err(Error::BadParams(format!("omega = {omega} outside [0, π)")));
    }
    let d = h * h - 2.0 * r * r * (omega / 2.0).sin();
    if d < 0.0 {
        return Err(Error::ImaginaryHeight(d));
    }
    Ok(d.sqrt())
}

/// `m = r(cos(ω/2) − cos(π/6))`
pub fn overhang(r: f64, omega: f64) -> f64 {
    r * ((omega / 2.0).cos() - FRAC_PI_6.cos())
}

/// Distance between two points of a radius-`r` circle `ω` apart.
pub fn chord_distance(r: f64, omega: f64) -> f64 {
    2.0 * r * (omega / 2.0).sin()
}

pub const OCTAHEDRON_VERTICES: [[f64; 3]; 6] =
    [[1., 0., 0.], [-1., 0., 0.], [0., 1., 0.], [0., -1., 0.], [0., 0., 1.], [0., 0., -1.]];
pub const OCTAHEDRON_FACES: [[usize; 3]; 8] =
    [[0, 2, 4], [1, 4, 3], [3, 0, 4], [5, 0, 2], [2, 5, 1], [1, 5, 3], [3, 5, 0], [2, 1, 4]];

pub fn octahedron() -> PolyhedralSurface {
    PolyhedralSurface::from_coords(&OCTAHEDRON_VERTICES, &OCTAHEDRON_FACES).expect("octahedron is valid")
}

/// Four tetrahedra around the axis through vertices 4 and 5.
pub fn octahedron_appendix_triangulation() -> Triangulation {
    Triangulation::new(octahedron(), vec![[1, 3, 4, 5], [3, 0, 4, 5], [0, 2, 4, 5], [2, 1, 4, 5]])
}

/// Octahedron coned from its center: one interior vertex.
pub fn octahedron_with_centroid() -> Triangulation {
    Triangulation::star_from_point(&octahedron(), Point3::zeros())
}

/// Poles 0 and 1, equator 2..=4.
pub fn triangular_bipyramid() -> PolyhedralSurface {
    let mut v = vec![Point3::new(0., 0., 1.), Point3::new(0., 0., -1.)];
    v.extend(ring(1.0, 0.0, top_angles()));
    let faces = vec![[0, 2, 3], [0, 3, 4], [0, 4, 2], [1, 3, 2], [1, 4, 3], [1, 2, 4]];
    PolyhedralSurface::new(v, faces).expect("bipyramid is valid")
}

pub fn regular_tetrahedron() -> PolyhedralSurface {
    PolyhedralSurface::from_coords(
        &[[1., 1., 1.], [1., -1., -1.], [-1., 1., -1.], [-1., -1., 1.]],
        &[[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]],
    )
    .expect("tetrahedron is valid")
}

/// Unit cube, corner `i` at `(i & 1, i >> 1 & 1, i >> 2 & 1)`, with vertex 8 at
/// the center of the top face. Faces through the origin are split along
/// diagonals from vertex 0 so that the fan from vertex 0 is a triangulation.
pub fn cube_with_flat_vertex() -> PolyhedralSurface {
    let mut v: Vec<[f64; 3]> = (0..8).map(|i| [(i & 1) as f64, (i >> 1 & 1) as f64, (i >> 2 & 1) as f64]).collect();
    v.push([0.5, 0.5, 1.0]);
    let faces = [
        [0, 1, 3],
        [0, 3, 2],
        [0, 1, 5],
        [0, 5, 4],
        [0, 2, 6],
        [0, 6, 4],
        [1, 3, 7],
        [1, 7, 5],
        [2, 3, 7],
        [2, 7, 6],
        [4, 5, 8],
        [5, 7, 8],
        [7, 6, 8],
        [6, 4, 8],
    ];
    PolyhedralSurface::from_coords(&v, &faces).expect("cube is valid")
}

// Pushed-vertex pair. Vertex 0 is the apex, 1..=5 the upper ring, 6..=10 the
// lower ring, 11 the bottom and 12 a low cap over the triangle 0 1 2.
const PUSHED_APEX: [f64; 3] = [-0.216, 0.137, 1.333];
const PUSHED_UPPER: [[f64; 3]; 5] = [
    [1.103, -0.246, -0.146],
    [0.092, 0.856, 0.056],
    [-0.751, 0.710, -0.272],
    [-0.690, -0.727, 0.073],
    [0.526, -0.956, 0.158],
];
const PUSHED_LOWER: [[f64; 3]; 5] = [
    [1.195, 0.628, -2.435],
    [-0.475, 1.264, -2.628],
    [-1.349, -0.060, -2.313],
    [-0.221, -1.332, -2.359],
    [1.094, -0.791, -2.402],
];
const PUSHED_BOTTOM: [f64; 3] = [0.182, -0.023, -2.826];
const PUSHED_CAP: [f64; 3] = [0.566, 0.505, 0.131];
/// Direction the apex is pushed in, before normalization.
const PUSHED_DIRECTION: [f64; 3] = [0.098, 0.959, -0.266];

fn pt(a: [f64; 3]) -> Point3 {
    Point3::new(a[0], a[1], a[2])
}

fn pushed_faces() -> Vec<[usize; 3]> {
    let mut f = Vec::new();
    for i in 0..5 {
        let j = (i + 1) % 5;
        if i == 0 {
            f.extend([[0, 1, 12], [1, 2, 12], [2, 0, 12]]);
        } else {
            f.push([0, 1 + i, 1 + j]);
        }
        f.push([1 + i, 6 + i, 1 + j]);
        f.push([1 + j, 6 + i, 6 + j]);
        f.push([11, 6 + j, 6 + i]);
    }
    f
}

fn pushed_apex(depth: f64) -> Point3 {
    pt(PUSHED_APEX) + pt(PUSHED_DIRECTION).normalize() * depth
}

/// Depth at which the cap vertex becomes coplanar with its three neighbours.
/// The cap is then a flat vertex and the surface flexes infinitesimally.
pub fn pushed_flat_depth() -> f64 {
    let (p, a, b) = (pt(PUSHED_CAP), pt(PUSHED_UPPER[0]), pt(PUSHED_UPPER[1]));
    let n = (a - p).cross(&(b - p));
    // linear in the depth
    let f0 = (pushed_apex(0.0) - p).dot(&n);
    let f1 = (pushed_apex(1.0) - p).dot(&n);
    f0 / (f0 - f1)
}

/// A strictly convex solid, and the same solid with its apex pushed inward by
/// `depth`. At [`pushed_flat_depth`] the pushed member is flexible.
pub fn pushed_vertex_pair(depth: f64) -> Result<(PolyhedralSurface, PolyhedralSurface)> {
    if !(depth > 0.0 && depth.is_finite()) {
        return Err(Error::DegenerateDepth(depth));
    }
    let build = |apex: Point3| -> Result<PolyhedralSurface> {
        let mut v = vec![apex];
        v.extend(PUSHED_UPPER.iter().map(|&p| pt(p)));
        v.extend(PUSHED_LOWER.iter().map(|&p| pt(p)));
        v.push(pt(PUSHED_BOTTOM));
        v.push(pt(PUSHED_CAP));
        PolyhedralSurface::new(v, pushed_faces())
    };
    let convex = build(pushed_apex(0.0))?;
    let pushed = build(pushed_apex(depth)).map_err(|_| Error::DegenerateDepth(depth))?;
    if !pushed.validate().ok() {
        return Err(Error::DegenerateDepth(depth));
    }
    Ok((convex, pushed))
}

/// How the cover annulus between the exterior and hull top rims is split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum CoverRecipe {
    /// quad `Xᵢ Xᵢ₊₁ xᵢ₊₁ xᵢ` split along `Xᵢ₊₁ xᵢ`
    #[default]
    Forward,
    /// split along `Xᵢ xᵢ₊₁`
    Backward,
}

/// A Schönhardt cavity nested in a larger Schönhardt solid and opening
/// through a top cover. `shift` lowers the cavity from the flush position,
/// where both top triangles lie in one plane and the cover is flat.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TPolyParams {
    pub hull: SchonhardtParams,
    pub exterior: SchonhardtParams,
    pub shift: f64,
    pub cover: CoverRecipe,
}

impl TPolyParams {
    /// Hull `(π/6, 1, 2)` flush inside exterior `(π/6, 2, 3)`.
    pub fn naive() -> Self {
        TPolyParams {
            hull: SchonhardtParams::standard(),
            exterior: SchonhardtParams { theta: FRAC_PI_6, r: 2.0, h: 3.0 },
            shift: 0.0,
            cover: CoverRecipe::Forward,
        }
    }

    pub fn shifted(shift: f64) -> Self {
        TPolyParams { shift, ..Self::naive() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    Cover,
    Hull,
    Exterior,
}

/// Vertices 0..6 are the exterior solid (top A B C, bottom D E F), 6..9 the
/// cavity rim (labelled cover), 9..12 the cavity floor (labelled hull).
pub fn t_polyhedron(p: &TPolyParams) -> Result<(PolyhedralSurface, Vec<Region>)> {
    p.hull.check()?;
    p.exterior.check()?;
    if p.exterior.r <= p.hull.r {
        return Err(Error::BadParams("exterior radius must exceed hull radius".into()));
    }
    if !p.shift.is_finite() {
        return Err(Error::BadParams("shift must be finite".into()));
    }
    let outer = schonhardt_points(&p.exterior, 0.0);
    let inner = schonhardt_points(&p.hull, 0.5 * (p.exterior.h - p.hull.h) - p.shift);
    let mut v = outer.to_vec();
    v.extend_from_slice(&inner);
    // exterior walls and floor as in the plain solid, without the top face
    let mut faces: Vec<[usize; 3]> = SCHONHARDT_FACES.iter().filter(|f| **f != [0, 1, 2]).copied().collect();
    // cavity walls and floor, reversed to face into the cavity
    for f in SCHONHARDT_FACES.iter().filter(|f| **f != [0, 1, 2]) {
        faces.push([f[0] + 6, f[2] + 6, f[1] + 6]);
    }
    for i in 0..3 {
        let j = (i + 1) % 3;
        let (xi, xj, yi, yj) = (i, j, i + 6, j + 6);
        match p.cover {
            CoverRecipe::Forward => {
                faces.push([xi, xj, yi]);
                faces.push([yi, xj, yj]);
            }
            CoverRecipe::Backward => {
                faces.push([xi, yj, yi]);
                faces.push([xi, xj, yj]);
            }
        }
    }
    let s = PolyhedralSurface::new(v, faces)?;
    if let Some((f, g)) = s.self_intersection() {
        return Err(Error::SelfIntersecting(f, g));
    }
    s.ensure_valid()?;
    let labels = (0..12)
        .map(|i| match i {
            0..=5 => Region::Exterior,
            6..=8 => Region::Cover,
            _ => Region::Hull,
        })
        .collect();
    Ok((s, labels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{flat_vertices, is_weakly_convex, locate_point, orient_det, PointLocation};
    use proptest::prelude::*;

    fn close(a: &Point3, b: [f64; 3], tol: f64) -> bool {
        (a - Point3::new(b[0], b[1], b[2])).amax() <= tol
    }

    #[test]
    fn standard_coordinates() {
        let s = schonhardt(&SchonhardtParams::standard()).unwrap();
        let v = s.vertices();
        let c = |a: f64| (a.cos(), a.sin());
        assert!(close(&v[0], [1., 0., 1.], 1e-12));
        let (x, y) = c(TAU / 3.0);
        assert!(close(&v[1], [x, y, 1.], 1e-12));
        let (x, y) = c(2.0 * TAU / 3.0);
        assert!(close(&v[2], [x, y, 1.], 1e-12));
        assert!(close(&v[3], [0., -1., -1.], 1e-12));
        assert!(close(&v[4], [FRAC_PI_6.cos(), 0.5, -1.], 1e-12));
        assert!(close(&v[5], [-FRAC_PI_6.cos(), 0.5, -1.], 1e-12));
        assert_eq!(s.faces().len(), 8);
        assert_eq!(s.edges().len(), 12);
        for e in [(0, 4), (0, 5), (1, 3), (1, 5), (2, 3), (2, 4)] {
            assert!(s.has_edge(e.0, e.1));
        }
    }

    #[test]
    fn bad_schonhardt_params() {
        assert!(SchonhardtParams::new(-1.0, 1.0, 2.0).is_err());
        assert!(SchonhardtParams::new(FRAC_PI_3, 1.0, 2.0).is_err());
        assert!(SchonhardtParams::new(0.1, 0.0, 2.0).is_err());
        assert!(SchonhardtParams::new(0.1, 1.0, -2.0).is_err());
    }

    #[test]
    fn untwisted_is_convex_twisted_weakly_convex() {
        let s = schonhardt(&SchonhardtParams::new(0.0, 1.0, 2.0).unwrap()).unwrap();
        assert!(is_weakly_convex(&s).unwrap().all);
        let s = schonhardt(&SchonhardtParams::standard()).unwrap();
        assert!(is_weakly_convex(&s).unwrap().all);
    }

    #[test]
    fn diagonal_classes() {
        for k in 0..20 {
            let th = k as f64 * 0.05;
            let s = schonhardt(&SchonhardtParams::new(th, 1.3, 1.7).unwrap()).unwrap();
            let v = s.vertices();
            let d = |i: usize, j: usize| (v[i] - v[j]).norm();
            let short = [d(0, 4), d(1, 5), d(2, 3)];
            let long = [d(0, 5), d(1, 3), d(2, 4)];
            for w in [short, long] {
                assert!((w[0] - w[1]).abs() < 1e-12 && (w[1] - w[2]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn unit_side_family() {
        for k in 0..50 {
            let th = k as f64 * (FRAC_PI_3 - 1e-3) / 49.0;
            let s = schonhardt_unit_side(th).unwrap();
            let v = s.vertices();
            assert!(((v[0] - v[1]).norm() - 1.0).abs() < 1e-12);
            assert!(((v[0] - v[4]).norm() - 1.0).abs() < 1e-12);
            let af2 = (v[0] - v[5]).norm_squared();
            assert!((af2 - (1.0 + 2.0 / 3f64.sqrt() * (FRAC_PI_3 + th).sin())).abs() < 1e-12);
        }
    }

    #[test]
    fn wunderlich_examples() {
        assert_eq!(wunderlich_height(1.0, 0.0, 2.0).unwrap(), 2.0);
        assert!((wunderlich_height(1.0, FRAC_PI_3, 2.0).unwrap() - 3f64.sqrt()).abs() < 1e-12);
        assert!(matches!(wunderlich_height(1.0, 3.0, 0.5), Err(Error::ImaginaryHeight(_))));
        let mut prev = f64::INFINITY;
        for k in 0..30 {
            let h = wunderlich_height(1.0, k as f64 * 0.1, 3.0).unwrap();
            assert!(h <= prev);
            prev = h;
        }
    }

    #[test]
    fn overhang_examples() {
        assert!(overhang(1.0, FRAC_PI_3).abs() < 1e-15);
        assert!((overhang(1.0, 0.0) - (1.0 - 3f64.sqrt() / 2.0)).abs() < 1e-15);
        for k in 0..=100 {
            let m = overhang(2.0, k as f64 * FRAC_PI_3 / 100.0);
            assert!((-1e-15..=0.134 * 2.0).contains(&m));
        }
    }

    proptest! {
        #[test]
        fn chord_matches_points(r in 0.1f64..10.0, a in 0.0f64..TAU, w in 0.0f64..PI) {
            let p = Point3::new(r * a.cos(), r * a.sin(), 0.0);
            let q = Point3::new(r * (a + w).cos(), r * (a + w).sin(), 0.0);
            prop_assert!((chord_distance(r, w) - (p - q).norm()).abs() < 1e-12 * r.max(1.0));
        }
    }

    #[test]
    fn octahedron_facts() {
        let s = octahedron();
        assert_eq!((s.vertices().len(), s.faces().len(), s.edges().len()), (6, 8, 12));
        assert!((s.volume().unwrap() - 4.0 / 3.0).abs() < 1e-14);
        assert!(is_weakly_convex(&s).unwrap().all);
    }

    #[test]
    fn cube_facts() {
        let s = cube_with_flat_vertex();
        assert!(s.validate().ok());
        assert_eq!(s.vertices().len(), 9);
        assert!((s.volume().unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(is_weakly_convex(&s).unwrap().failing(), vec![8]);
    }

    #[test]
    fn pushed_pair_shares_combinatorics() {
        let d = pushed_flat_depth();
        let (a, b) = pushed_vertex_pair(d).unwrap();
        assert_eq!(a.faces(), b.faces());
        assert!(is_weakly_convex(&a).unwrap().all);
        assert!(flat_vertices(&a).unwrap().is_empty());
        assert!(b.validate().ok());
        assert_eq!(is_weakly_convex(&b).unwrap().failing(), vec![2, 12]);
        let p = b.vertices();
        assert!(orient_det(&p[12], &p[0], &p[1], &p[2]).abs() < 1e-12);
        assert!(pushed_vertex_pair(4.0).is_err());
        assert!(pushed_vertex_pair(0.0).is_err());
        assert!(pushed_vertex_pair(-1.0).is_err());
    }

    #[test]
    fn t_polyhedron_variants() {
        let (s, labels) = t_polyhedron(&TPolyParams::naive()).unwrap();
        assert!(s.validate().ok(), "{}", s.validate());
        assert_eq!(labels.len(), s.vertices().len());
        assert_eq!(labels.iter().filter(|&&l| l == Region::Cover).count(), 3);
        // the cavity is outside the solid
        assert_eq!(locate_point(&s, &Point3::new(0., 0., 0.)), PointLocation::Outside);
        for c in [CoverRecipe::Forward, CoverRecipe::Backward] {
            let p = TPolyParams { cover: c, ..TPolyParams::shifted(0.3) };
            assert!(t_polyhedron(&p).unwrap().0.validate().ok());
        }
        let bad = TPolyParams { exterior: SchonhardtParams::standard(), ..TPolyParams::naive() };
        assert!(matches!(t_polyhedron(&bad), Err(Error::BadParams(_))));
    }

    #[test]
    fn t_polyhedron_rejects_protruding_floor() {
        for s in [1.2, -0.5] {
            let r = t_polyhedron(&TPolyParams::shifted(s));
            assert!(matches!(r, Err(Error::SelfIntersecting(..)) | Err(Error::InvalidSurface(_))), "{s}: {r:?}");
        }
    }
}
