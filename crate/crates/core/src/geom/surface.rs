use super::intersect::triangles_meet_improperly;
use super::{edge_key, scale_of, Point3, Vector3, TOL_GEOM};
use crate::error::{Error, Result};
use std::collections::{BTreeMap, VecDeque};
use std::fmt;

/// A closed triangulated surface: vertex positions plus oriented triangles.
///
/// Construction only rejects non-finite coordinates. Everything else is reported
/// by [`PolyhedralSurface::validate`], so that broken inputs can still be
/// inspected. When the combinatorics allow it, faces are reoriented coherently
/// at ingestion and then flipped as a whole so the enclosed volume is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyhedralSurface {
    vertices: Vec<Point3>,
    faces: Vec<[usize; 3]>,
    edges: Vec<(usize, usize)>,
}

/// One broken invariant and where it was found.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    IndexOutOfRange { face: usize },
    RepeatedVertex { face: usize },
    DegenerateFace { face: usize, area: f64 },
    EdgeIncidence { edge: (usize, usize), faces: usize },
    InconsistentOrientation { edge: (usize, usize) },
    NonManifoldVertex { vertex: usize },
    EulerCharacteristic { v: usize, e: usize, f: usize },
    SelfIntersection { faces: (usize, usize) },
    TooFewVertices { count: usize },
    SurfaceInvalid { detail: String },
    TetraIndex { tetra: usize },
    DegenerateTetra { tetra: usize },
    VolumeMismatch { surface: f64, filled: f64 },
    BoundaryFaceCover { face: usize, count: usize },
    UnmatchedInteriorFace { face: [usize; 3], count: usize },
    TetraOverlap { tetras: (usize, usize) },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::IndexOutOfRange { face } => write!(f, "face {face}: vertex index out of range"),
            Violation::RepeatedVertex { face } => write!(f, "face {face}: repeated vertex"),
            Violation::DegenerateFace { face, area } => write!(f, "face {face}: degenerate triangle (area {area:e})"),
            Violation::EdgeIncidence { edge, faces: 1 } => {
                write!(f, "edge {edge:?}: edge with one incident face")
            }
            Violation::EdgeIncidence { edge, faces } => write!(f, "edge {edge:?}: edge with {faces} incident faces"),
            Violation::InconsistentOrientation { edge } => write!(f, "edge {edge:?}: inconsistent face orientation"),
            Violation::NonManifoldVertex { vertex } => write!(f, "vertex {vertex}: link is not a single cycle"),
            Violation::EulerCharacteristic { v, e, f: nf } => {
                write!(f, "V - E + F = {} - {} + {} = {}, expected 2", v, e, nf, *v as i64 - *e as i64 + *nf as i64)
            }
            Violation::SelfIntersection { faces } => write!(f, "faces {} and {} intersect", faces.0, faces.1),
            Violation::TooFewVertices { count } => write!(f, "only {count} vertices"),
            Violation::SurfaceInvalid { detail } => write!(f, "underlying surface invalid: {detail}"),
            Violation::TetraIndex { tetra } => write!(f, "tetrahedron {tetra}: bad or repeated vertex index"),
            Violation::DegenerateTetra { tetra } => write!(f, "tetrahedron {tetra}: degenerate"),
            Violation::VolumeMismatch { surface, filled } => {
                write!(f, "volume deficit: tetrahedra fill {filled} of {surface}")
            }
            Violation::BoundaryFaceCover { face, count } => {
                write!(f, "surface face {face} is a face of {count} tetrahedra (expected 1)")
            }
            Violation::UnmatchedInteriorFace { face, count } => {
                write!(f, "interior face {face:?} shared by {count} tetrahedra (expected 2)")
            }
            Violation::TetraOverlap { tetras } => {
                write!(f, "tetrahedra {} and {} overlap (disjointness violated)", tetras.0, tetras.1)
            }
        }
    }
}

/// Result of a validation pass; `ok()` holds exactly when nothing was found.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidityReport {
    pub violations: Vec<Violation>,
}

impl ValidityReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            return write!(f, "ok");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

impl PolyhedralSurface {
    pub fn new(vertices: Vec<Point3>, faces: Vec<[usize; 3]>) -> Result<Self> {
        if let Some(i) = vertices.iter().position(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(Error::InvalidSurface(format!("vertex {i} has a non-finite coordinate")));
        }
        let mut s = PolyhedralSurface { edges: derive_edges(&faces), vertices, faces };
        s.orient();
        Ok(s)
    }

    /// Convenience constructor from plain coordinate triples.
    pub fn from_coords(coords: &[[f64; 3]], faces: &[[usize; 3]]) -> Result<Self> {
        let v = coords.iter().map(|c| Point3::new(c[0], c[1], c[2])).collect();
        Self::new(v, faces.to_vec())
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    /// Canonical `(min, max)` edges in lexicographic order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn scale(&self) -> f64 {
        scale_of(&self.vertices)
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.binary_search(&edge_key(a, b)).is_ok()
    }

    /// Face as a sorted index triple, for set membership.
    pub fn has_face(&self, tri: [usize; 3]) -> bool {
        let mut t = tri;
        t.sort_unstable();
        self.faces.iter().any(|f| {
            let mut g = *f;
            g.sort_unstable();
            g == t
        })
    }

    /// Returns a copy with every vertex mapped through `f`.
    pub fn map_vertices(&self, f: impl Fn(&Point3) -> Point3) -> Result<Self> {
        Self::new(self.vertices.iter().map(f).collect(), self.faces.clone())
    }

    fn indices_ok(&self) -> bool {
        let n = self.vertices.len();
        self.faces.iter().all(|f| f.iter().all(|&i| i < n) && f[0] != f[1] && f[1] != f[2] && f[0] != f[2])
    }

    /// Coherent orientation by breadth-first propagation, then a global flip
    /// if the enclosed volume comes out negative.
    fn orient(&mut self) {
        if !self.indices_ok() {
            return;
        }
        let mut by_edge: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (k, f) in self.faces.iter().enumerate() {
            for e in 0..3 {
                by_edge.entry(edge_key(f[e], f[(e + 1) % 3])).or_default().push(k);
            }
        }
        if by_edge.values().any(|v| v.len() != 2) {
            return;
        }
        let nf = self.faces.len();
        let mut seen = vec![false; nf];
        for start in 0..nf {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(k) = queue.pop_front() {
                let f = self.faces[k];
                for e in 0..3 {
                    let (a, b) = (f[e], f[(e + 1) % 3]);
                    for &g in &by_edge[&edge_key(a, b)] {
                        if g == k || seen[g] {
                            continue;
                        }
                        // a coherent neighbour traverses the shared edge as b -> a
                        let h = self.faces[g];
                        let same_dir = (0..3).any(|i| h[i] == a && h[(i + 1) % 3] == b);
                        if same_dir {
                            self.faces[g].swap(1, 2);
                        }
                        seen[g] = true;
                        queue.push_back(g);
                    }
                }
            }
        }
        if self.raw_volume() < 0.0 {
            for f in &mut self.faces {
                f.swap(1, 2);
            }
        }
    }

    fn raw_volume(&self) -> f64 {
        self.faces
            .iter()
            .map(|f| {
                let (a, b, c) = (&self.vertices[f[0]], &self.vertices[f[1]], &self.vertices[f[2]]);
                a.dot(&b.cross(c))
            })
            .sum::<f64>()
            / 6.0
    }

    /// Checks every surface invariant and reports each violation found.
    pub fn validate(&self) -> ValidityReport {
        let mut out = Vec::new();
        let n = self.vertices.len();
        if n < 4 {
            out.push(Violation::TooFewVertices { count: n });
        }
        let scale = self.scale().max(1.0);
        let mut usable = true;
        for (k, f) in self.faces.iter().enumerate() {
            if f.iter().any(|&i| i >= n) {
                out.push(Violation::IndexOutOfRange { face: k });
                usable = false;
                continue;
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                out.push(Violation::RepeatedVertex { face: k });
                usable = false;
                continue;
            }
            let area = self.face_normal(k).norm() / 2.0;
            if area <= TOL_GEOM * scale * scale {
                out.push(Violation::DegenerateFace { face: k, area });
            }
        }
        if !usable {
            return ValidityReport { violations: out };
        }
        let mut directed: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut incidence: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for f in &self.faces {
            for e in 0..3 {
                let (a, b) = (f[e], f[(e + 1) % 3]);
                *directed.entry((a, b)).or_default() += 1;
                *incidence.entry(edge_key(a, b)).or_default() += 1;
            }
        }
        let mut manifold = true;
        for (&edge, &count) in &incidence {
            if count != 2 {
                out.push(Violation::EdgeIncidence { edge, faces: count });
                manifold = false;
            } else if directed.get(&edge).copied().unwrap_or(0) != 1 {
                out.push(Violation::InconsistentOrientation { edge });
                manifold = false;
            }
        }
        for v in 0..n {
            if !self.vertex_link_is_cycle(v) {
                out.push(Violation::NonManifoldVertex { vertex: v });
                manifold = false;
            }
        }
        let (e, f) = (incidence.len(), self.faces.len());
        if n + f != e + 2 {
            out.push(Violation::EulerCharacteristic { v: n, e, f });
        }
        if manifold {
            let tol = TOL_GEOM * scale;
            'outer: for i in 0..f {
                for j in i + 1..f {
                    if triangles_meet_improperly(&self.vertices, self.faces[i], self.faces[j], tol) {
                        out.push(Violation::SelfIntersection { faces: (i, j) });
                        break 'outer;
                    }
                }
            }
        }
        ValidityReport { violations: out }
    }

    /// First pair of faces that intersect improperly, if any.
    pub fn self_intersection(&self) -> Option<(usize, usize)> {
        let tol = TOL_GEOM * self.scale().max(1.0);
        let f = self.faces.len();
        for i in 0..f {
            for j in i + 1..f {
                if triangles_meet_improperly(&self.vertices, self.faces[i], self.faces[j], tol) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    fn vertex_link_is_cycle(&self, v: usize) -> bool {
        let mut next: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for f in &self.faces {
            if let Some(i) = f.iter().position(|&x| x == v) {
                let (a, b) = (f[(i + 1) % 3], f[(i + 2) % 3]);
                next.entry(a).or_default().push(b);
                next.entry(b).or_default().push(a);
            }
        }
        if next.is_empty() {
            return false;
        }
        if next.values().any(|nb| nb.len() != 2) {
            return false;
        }
        // walk the link once around
        let start = *next.keys().next().unwrap();
        let (mut prev, mut cur, mut steps) = (start, next[&start][0], 1);
        while cur != start {
            let nb = &next[&cur];
            let nxt = if nb[0] == prev { nb[1] } else { nb[0] };
            prev = cur;
            cur = nxt;
            steps += 1;
            if steps > next.len() {
                return false;
            }
        }
        steps == next.len()
    }

    /// Unnormalized outward normal (twice the area vector) of face `k`.
    pub fn face_normal(&self, k: usize) -> Vector3 {
        let f = self.faces[k];
        let (a, b, c) = (&self.vertices[f[0]], &self.vertices[f[1]], &self.vertices[f[2]]);
        (b - a).cross(&(c - a))
    }

    /// Enclosed volume via the divergence theorem.
    pub fn volume(&self) -> Result<f64> {
        self.ensure_valid()?;
        Ok(self.raw_volume())
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let r = self.validate();
        if r.ok() {
            Ok(())
        } else {
            Err(Error::InvalidSurface(r.to_string()))
        }
    }
}

fn derive_edges(faces: &[[usize; 3]]) -> Vec<(usize, usize)> {
    let mut e: Vec<(usize, usize)> =
        faces.iter().flat_map(|f| [edge_key(f[0], f[1]), edge_key(f[1], f[2]), edge_key(f[2], f[0])]).collect();
    e.sort_unstable();
    e.dedup();
    e
}
