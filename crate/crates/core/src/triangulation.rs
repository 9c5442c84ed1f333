//! Tetrahedral decompositions of a surface's interior.
//!
//! A [`Triangulation`] owns a copy of its surface plus, optionally, extra
//! points appended after the surface vertices (indices `nv..`). The
//! decomposition search never adds points; extra points exist so that interior
//! vertex configurations can be studied.

use crate::error::{Error, Result};
use crate::geom::segment_meets_triangle;
use crate::geom::{
    edge_key, flat_vertices, locate_point, orient_det, orientation, scale_of, Point3, PointLocation, PolyhedralSurface,
    ValidityReport, Violation, TOL_GEOM,
};
use nalgebra::Matrix3;
use std::collections::{BTreeMap, BTreeSet};

/// Relative tolerance of the volume fill check.
pub const TOL_FILL: f64 = 1e-9;
/// Largest surface the exhaustive search accepts.
pub const MAX_SEARCH_VERTICES: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct Triangulation {
    surface: PolyhedralSurface,
    extra: Vec<Point3>,
    tetrahedra: Vec<[usize; 4]>,
    interior_edges: Vec<(usize, usize)>,
}

/// Interior vertices `m` and flat vertices `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VertexCensus {
    pub m: usize,
    pub k: usize,
}

fn sorted3(mut f: [usize; 3]) -> [usize; 3] {
    f.sort_unstable();
    f
}

/// The four faces of a tetrahedron as sorted triples.
pub fn tetra_faces(t: &[usize; 4]) -> [[usize; 3]; 4] {
    [sorted3([t[1], t[2], t[3]]), sorted3([t[0], t[2], t[3]]), sorted3([t[0], t[1], t[3]]), sorted3([t[0], t[1], t[2]])]
}

/// The six edges of a tetrahedron, in the 12, 13, 14, 23, 24, 34 order.
pub fn tetra_edges(t: &[usize; 4]) -> [(usize, usize); 6] {
    [
        edge_key(t[0], t[1]),
        edge_key(t[0], t[2]),
        edge_key(t[0], t[3]),
        edge_key(t[1], t[2]),
        edge_key(t[1], t[3]),
        edge_key(t[2], t[3]),
    ]
}

impl Triangulation {
    pub fn new(surface: PolyhedralSurface, tetrahedra: Vec<[usize; 4]>) -> Self {
        Self::with_points(surface, Vec::new(), tetrahedra)
    }

    /// Triangulation whose tetrahedra may also use `extra` points, indexed
    /// after the surface vertices.
    pub fn with_points(surface: PolyhedralSurface, extra: Vec<Point3>, tetrahedra: Vec<[usize; 4]>) -> Self {
        let mut ie = BTreeSet::new();
        for t in &tetrahedra {
            for e in tetra_edges(t) {
                if !surface.has_edge(e.0, e.1) {
                    ie.insert(e);
                }
            }
        }
        Triangulation { surface, extra, tetrahedra, interior_edges: ie.into_iter().collect() }
    }

    /// Cone from vertex `apex` over every face not containing it.
    pub fn fan(surface: &PolyhedralSurface, apex: usize) -> Self {
        let tets = surface.faces().iter().filter(|f| !f.contains(&apex)).map(|f| [apex, f[0], f[1], f[2]]).collect();
        Self::new(surface.clone(), tets)
    }

    /// Cone from an added interior point over every face.
    pub fn star_from_point(surface: &PolyhedralSurface, x: Point3) -> Self {
        let c = surface.vertices().len();
        let tets = surface.faces().iter().map(|f| [c, f[0], f[1], f[2]]).collect();
        Self::with_points(surface.clone(), vec![x], tets)
    }

    pub fn surface(&self) -> &PolyhedralSurface {
        &self.surface
    }

    pub fn tetrahedra(&self) -> &[[usize; 4]] {
        &self.tetrahedra
    }

    pub fn extra_points(&self) -> &[Point3] {
        &self.extra
    }

    pub fn point(&self, i: usize) -> Point3 {
        let nv = self.surface.vertices().len();
        if i < nv {
            self.surface.vertices()[i]
        } else {
            self.extra[i - nv]
        }
    }

    pub fn num_points(&self) -> usize {
        self.surface.vertices().len() + self.extra.len()
    }

    /// Tetrahedron edges that are not surface edges, in lexicographic order.
    /// This order indexes the rows and columns of the stiffness matrix.
    pub fn interior_edges(&self) -> &[(usize, usize)] {
        &self.interior_edges
    }

    pub fn tetra_points(&self, t: &[usize; 4]) -> [Point3; 4] {
        t.map(|i| self.point(i))
    }

    /// Checks fill, boundary matching, face-to-face adjacency and pairwise
    /// disjointness.
    pub fn validate(&self) -> ValidityReport {
        let mut out = Vec::new();
        let sr = self.surface.validate();
        if !sr.ok() {
            out.push(Violation::SurfaceInvalid { detail: sr.to_string() });
            return ValidityReport { violations: out };
        }
        let np = self.num_points();
        let scale = scale_of(self.surface.vertices().iter().chain(self.extra.iter())).max(1.0);
        let mut good = Vec::new();
        for (k, t) in self.tetrahedra.iter().enumerate() {
            let distinct = (0..4).all(|a| (a + 1..4).all(|b| t[a] != t[b]));
            if !distinct || t.iter().any(|&i| i >= np) {
                out.push(Violation::TetraIndex { tetra: k });
                continue;
            }
            let p = self.tetra_points(t);
            if orientation(&p[0], &p[1], &p[2], &p[3]) == 0 {
                out.push(Violation::DegenerateTetra { tetra: k });
                continue;
            }
            good.push(k);
        }
        let vol = self.surface.volume().unwrap_or(0.0);
        let filled: f64 = good
            .iter()
            .map(|&k| {
                let p = self.tetra_points(&self.tetrahedra[k]);
                orient_det(&p[0], &p[1], &p[2], &p[3]).abs() / 6.0
            })
            .sum();
        if (filled - vol).abs() > TOL_FILL * vol.abs().max(f64::MIN_POSITIVE) {
            out.push(Violation::VolumeMismatch { surface: vol, filled });
        }
        let mut face_count: BTreeMap<[usize; 3], usize> = BTreeMap::new();
        for &k in &good {
            for f in tetra_faces(&self.tetrahedra[k]) {
                *face_count.entry(f).or_default() += 1;
            }
        }
        let surface_faces: BTreeSet<[usize; 3]> = self.surface.faces().iter().map(|f| sorted3(*f)).collect();
        for (i, f) in self.surface.faces().iter().enumerate() {
            let c = face_count.get(&sorted3(*f)).copied().unwrap_or(0);
            if c != 1 {
                out.push(Violation::BoundaryFaceCover { face: i, count: c });
            }
        }
        for (f, &c) in &face_count {
            if !surface_faces.contains(f) && c != 2 {
                out.push(Violation::UnmatchedInteriorFace { face: *f, count: c });
            }
        }
        let tol = TOL_GEOM * scale;
        for (a, &i) in good.iter().enumerate() {
            for &j in &good[a + 1..] {
                let p = self.tetra_points(&self.tetrahedra[i]);
                let q = self.tetra_points(&self.tetrahedra[j]);
                if tetras_overlap(&p, &q, tol) {
                    out.push(Violation::TetraOverlap { tetras: (i, j) });
                }
            }
        }
        ValidityReport { violations: out }
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let r = self.validate();
        if r.ok() {
            Ok(())
        } else {
            Err(Error::InvalidTriangulation(r.to_string()))
        }
    }

    /// Counts of added interior vertices and flat surface vertices.
    pub fn census(&self) -> Result<VertexCensus> {
        self.ensure_valid()?;
        let nv = self.surface.vertices().len();
        let used: BTreeSet<usize> = self.tetrahedra.iter().flatten().copied().filter(|&i| i >= nv).collect();
        let k = flat_vertices(&self.surface).map_err(|e| Error::InvalidTriangulation(e.to_string()))?.len();
        Ok(VertexCensus { m: used.len(), k })
    }
}

/// Separating-axis test for two closed tetrahedra. Returns true when their
/// interiors overlap by more than `tol` along every candidate axis.
pub fn tetras_overlap(p: &[Point3; 4], q: &[Point3; 4], tol: f64) -> bool {
    const E: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let mut axes = Vec::with_capacity(44);
    for t in [p, q] {
        for skip in 0..4 {
            let f: Vec<usize> = (0..4).filter(|&i| i != skip).collect();
            axes.push((t[f[1]] - t[f[0]]).cross(&(t[f[2]] - t[f[0]])));
        }
    }
    for (a, b) in E {
        for (c, d) in E {
            axes.push((p[b] - p[a]).cross(&(q[d] - q[c])));
        }
    }
    let scale = scale_of(p.iter().chain(q.iter())).max(1.0);
    for ax in axes {
        let n = ax.norm();
        if n <= 1e-12 * scale * scale {
            continue;
        }
        let ax = ax / n;
        let (pmin, pmax) = extent(p, &ax);
        let (qmin, qmax) = extent(q, &ax);
        if pmax <= qmin + tol || qmax <= pmin + tol {
            return false;
        }
    }
    true
}

fn extent(p: &[Point3; 4], ax: &Point3) -> (f64, f64) {
    p.iter().map(|x| x.dot(ax)).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

/// Outcome of the exhaustive decomposition search.
#[derive(Debug, Clone, PartialEq)]
pub enum Decomposition {
    Found(Triangulation),
    NonDecomposable,
    BudgetExceeded,
}

/// Search result with the certificate data: how many 4-subsets were
/// admissible and how many placements were tried.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionReport {
    pub outcome: Decomposition,
    pub admissible: usize,
    pub nodes: usize,
}

impl DecompositionReport {
    pub fn triangulation(&self) -> Option<&Triangulation> {
        match &self.outcome {
            Decomposition::Found(t) => Some(t),
            _ => None,
        }
    }
}

/// Is the tetrahedron on surface vertices `t` (any order) inside the surface,
/// with every face and edge either on the boundary as a surface simplex or
/// strictly interior?
pub fn admissible_tetra(s: &PolyhedralSurface, t: [usize; 4]) -> bool {
    let v = s.vertices();
    let p = t.map(|i| v[i]);
    if orientation(&p[0], &p[1], &p[2], &p[3]) == 0 {
        return false;
    }
    let tol = TOL_GEOM * s.scale().max(1.0);
    let centroid = (p[0] + p[1] + p[2] + p[3]) / 4.0;
    if locate_point(s, &centroid) != PointLocation::Inside {
        return false;
    }
    // no other vertex in the closed tetrahedron
    let m = Matrix3::from_columns(&[p[1] - p[0], p[2] - p[0], p[3] - p[0]]);
    if let Some(inv) = m.try_inverse() {
        for (i, x) in v.iter().enumerate() {
            if t.contains(&i) {
                continue;
            }
            let l = inv * (x - p[0]);
            if l.iter().all(|&c| c >= -1e-12) && l.sum() <= 1.0 + 1e-12 {
                return false;
            }
        }
    }
    for (a, b) in tetra_edges(&t) {
        if s.has_edge(a, b) {
            continue;
        }
        if locate_point(s, &((v[a] + v[b]) / 2.0)) != PointLocation::Inside {
            return false;
        }
        if s.faces().iter().any(|f| segment_meets_triangle(v, a, b, *f, tol)) {
            return false;
        }
    }
    for f in tetra_faces(&t) {
        if s.has_face(f) {
            continue;
        }
        if locate_point(s, &((v[f[0]] + v[f[1]] + v[f[2]]) / 3.0)) != PointLocation::Inside {
            return false;
        }
        if s.edges().iter().any(|&(a, b)| segment_meets_triangle(v, a, b, f, tol)) {
            return false;
        }
    }
    true
}

/// All admissible tetrahedra, positively oriented, sorted by volume descending
/// (ties broken by index order).
pub fn admissible_candidates(s: &PolyhedralSurface) -> Vec<[usize; 4]> {
    let n = s.vertices().len();
    let v = s.vertices();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    if admissible_tetra(s, [a, b, c, d]) {
                        let t = if orient_det(&v[a], &v[b], &v[c], &v[d]) > 0.0 { [a, b, c, d] } else { [a, b, d, c] };
                        out.push(t);
                    }
                }
            }
        }
    }
    let vol = |t: &[usize; 4]| orient_det(&v[t[0]], &v[t[1]], &v[t[2]], &v[t[3]]);
    out.sort_by(|x, y| vol(y).total_cmp(&vol(x)).then(x.cmp(y)));
    out
}

struct Search<'a> {
    s: &'a PolyhedralSurface,
    cands: Vec<[usize; 4]>,
    vols: Vec<f64>,
    by_face: BTreeMap<[usize; 3], Vec<usize>>,
    surface_faces: BTreeSet<[usize; 3]>,
    placed: Vec<usize>,
    open: BTreeSet<[usize; 3]>,
    remaining: f64,
    nodes: usize,
    budget: usize,
    tol: f64,
    vol_tol: f64,
}

enum Step {
    Done,
    Exhausted,
    OutOfBudget,
}

impl Search<'_> {
    fn compatible(&self, c: usize) -> bool {
        if self.vols[c] > self.remaining + self.vol_tol {
            return false;
        }
        let p = self.cands[c].map(|i| self.s.vertices()[i]);
        for f in tetra_faces(&self.cands[c]) {
            if self.surface_faces.contains(&f) && !self.open.contains(&f) {
                return false;
            }
        }
        self.placed.iter().all(|&k| {
            let q = self.cands[k].map(|i| self.s.vertices()[i]);
            !tetras_overlap(&p, &q, self.tol)
        })
    }

    fn run(&mut self) -> Step {
        if self.open.is_empty() {
            return Step::Done;
        }
        // first-fail: the open face with the fewest compatible candidates
        let mut best: Option<Vec<usize>> = None;
        for f in &self.open {
            let opts: Vec<usize> = self
                .by_face
                .get(f)
                .map(|v| v.iter().copied().filter(|&c| !self.placed.contains(&c) && self.compatible(c)).collect())
                .unwrap_or_default();
            if opts.is_empty() {
                return Step::Exhausted;
            }
            if best.as_ref().is_none_or(|b| opts.len() < b.len()) {
                best = Some(opts);
            }
        }
        for c in best.unwrap() {
            if self.nodes >= self.budget {
                return Step::OutOfBudget;
            }
            self.nodes += 1;
            let faces = tetra_faces(&self.cands[c]);
            let mut toggled = Vec::new();
            for f in faces {
                if self.open.remove(&f) {
                    toggled.push((f, false));
                } else {
                    self.open.insert(f);
                    toggled.push((f, true));
                }
            }
            self.placed.push(c);
            self.remaining -= self.vols[c];
            match self.run() {
                Step::Done => return Step::Done,
                Step::OutOfBudget => return Step::OutOfBudget,
                Step::Exhausted => {}
            }
            self.remaining += self.vols[c];
            self.placed.pop();
            for (f, added) in toggled {
                if added {
                    self.open.remove(&f);
                } else {
                    self.open.insert(f);
                }
            }
        }
        Step::Exhausted
    }
}

/// Exhaustive backtracking search for a decomposition without new vertices.
///
/// The fan from vertex 0 is tried first; otherwise candidates are placed one
/// open face at a time until every face is matched. `NonDecomposable` is only
/// returned once the whole candidate space has been explored.
pub fn find_decomposition(s: &PolyhedralSurface, budget: usize) -> Result<DecompositionReport> {
    s.ensure_valid()?;
    let n = s.vertices().len();
    if n > MAX_SEARCH_VERTICES {
        return Err(Error::TooManyVertices(n));
    }
    let cands = admissible_candidates(s);
    let admissible = cands.len();
    let fan = Triangulation::fan(s, 0);
    if fan.validate().ok() {
        return Ok(DecompositionReport { outcome: Decomposition::Found(fan), admissible, nodes: 0 });
    }
    let v = s.vertices();
    let vols: Vec<f64> = cands.iter().map(|t| orient_det(&v[t[0]], &v[t[1]], &v[t[2]], &v[t[3]]) / 6.0).collect();
    let mut by_face: BTreeMap<[usize; 3], Vec<usize>> = BTreeMap::new();
    for (k, t) in cands.iter().enumerate() {
        for f in tetra_faces(t) {
            by_face.entry(f).or_default().push(k);
        }
    }
    let surface_faces: BTreeSet<[usize; 3]> = s.faces().iter().map(|f| sorted3(*f)).collect();
    let volume = s.volume()?;
    let mut search = Search {
        s,
        cands,
        vols,
        by_face,
        open: surface_faces.clone(),
        surface_faces,
        placed: Vec::new(),
        remaining: volume,
        nodes: 0,
        budget,
        tol: TOL_GEOM * s.scale().max(1.0),
        vol_tol: TOL_FILL * volume,
    };
    let outcome = match search.run() {
        Step::Done => {
            let tets = search.placed.iter().map(|&k| search.cands[k]).collect();
            let t = Triangulation::new(s.clone(), tets);
            t.ensure_valid()?;
            Decomposition::Found(t)
        }
        Step::Exhausted => Decomposition::NonDecomposable,
        Step::OutOfBudget => Decomposition::BudgetExceeded,
    };
    Ok(DecompositionReport { outcome, admissible, nodes: search.nodes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    fn octa_appendix() -> Triangulation {
        generators::octahedron_appendix_triangulation()
    }

    #[test]
    fn appendix_triangulation_is_valid() {
        let t = octa_appendix();
        assert!(t.validate().ok(), "{}", t.validate());
        assert_eq!(t.interior_edges(), &[(4, 5)]);
        assert_eq!(t.census().unwrap(), VertexCensus { m: 0, k: 0 });
    }

    #[test]
    fn removed_tetra_is_volume_deficit() {
        let t = octa_appendix();
        let short = Triangulation::new(t.surface().clone(), t.tetrahedra()[1..].to_vec());
        let r = short.validate();
        assert!(r.violations.iter().any(|v| matches!(v, Violation::VolumeMismatch { .. })));
        assert!(r.to_string().contains("volume deficit"));
    }

    #[test]
    fn overlapping_pair_is_reported() {
        let t = octa_appendix();
        // two fans from opposite vertices overlap
        let mut tets = Triangulation::fan(t.surface(), 0).tetrahedra().to_vec();
        tets.extend_from_slice(Triangulation::fan(t.surface(), 1).tetrahedra());
        let r = Triangulation::new(t.surface().clone(), tets).validate();
        assert!(r.violations.iter().any(|v| matches!(v, Violation::TetraOverlap { .. })));
    }

    #[test]
    fn single_tetra_has_no_interior_edges() {
        let s = PolyhedralSurface::from_coords(
            &[[0., 0., 0.], [1., 0., 0.], [0., 1., 0.], [0., 0., 1.]],
            &[[0, 2, 1], [0, 1, 3], [1, 2, 3], [0, 3, 2]],
        )
        .unwrap();
        let t = Triangulation::new(s.clone(), vec![[0, 1, 2, 3]]);
        assert!(t.validate().ok());
        assert!(t.interior_edges().is_empty());
        let d = find_decomposition(&s, 1000).unwrap();
        assert_eq!(d.triangulation().unwrap().tetrahedra().len(), 1);
    }

    #[test]
    fn bipyramid_axis_is_the_only_interior_edge() {
        let s = generators::triangular_bipyramid();
        let t = Triangulation::fan(&s, 0);
        assert!(t.validate().ok(), "{}", t.validate());
        assert_eq!(t.tetrahedra().len(), 3);
        assert_eq!(t.interior_edges(), &[(0, 1)]);
    }

    #[test]
    fn census_counts_extra_points_and_flat_vertices() {
        let oc = generators::octahedron_with_centroid();
        assert_eq!(oc.census().unwrap(), VertexCensus { m: 1, k: 0 });
        let cube = generators::cube_with_flat_vertex();
        let t = Triangulation::fan(&cube, 0);
        assert!(t.validate().ok(), "{}", t.validate());
        assert_eq!(t.census().unwrap(), VertexCensus { m: 0, k: 1 });
    }

    #[test]
    fn octahedron_decomposes() {
        let s = generators::octahedron();
        let d = find_decomposition(&s, 100_000).unwrap();
        let t = d.triangulation().expect("decomposable");
        assert!(t.validate().ok());
        assert_eq!(t.tetrahedra().len(), 4);
        assert_eq!(t.census().unwrap().m, 0);
    }

    #[test]
    fn schonhardt_has_no_admissible_tetrahedra() {
        let s = generators::schonhardt(&generators::SchonhardtParams::standard()).unwrap();
        let d = find_decomposition(&s, 100_000).unwrap();
        assert_eq!(d.outcome, Decomposition::NonDecomposable);
        assert_eq!(d.admissible, 0);
    }

    #[test]
    fn search_without_fan_priming_finds_cube() {
        let s = generators::cube_with_flat_vertex();
        let cands = admissible_candidates(&s);
        assert!(!cands.is_empty());
        let d = find_decomposition(&s, 1_000_000).unwrap();
        assert!(d.triangulation().unwrap().validate().ok());
    }

    #[test]
    fn too_many_vertices() {
        let pts: Vec<Point3> = (0..17)
            .map(|i| {
                let z = -1.0 + 2.0 * (i as f64 + 0.5) / 17.0;
                let r = (1.0 - z * z).sqrt();
                let phi = i as f64 * 2.399963;
                Point3::new(r * phi.cos(), r * phi.sin(), z)
            })
            .collect();
        let s = crate::geom::convex_hull(&pts).unwrap();
        assert_eq!(find_decomposition(&s, 10), Err(Error::TooManyVertices(17)));
    }
}
