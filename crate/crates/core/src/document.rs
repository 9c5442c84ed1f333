//! The on-disk polyhedron format and mesh export.

use crate::error::{Error, Result};
use crate::generators::Region;
use crate::geom::{Point3, PolyhedralSurface};
use crate::triangulation::Triangulation;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

pub const POLYHEDRON_SCHEMA: &str = "rigidity-lab/polyhedron@1";

/// Vertices, faces and optionally a triangulation and region labels. Floats
/// are written in shortest round-trip form, so parsing is lossless.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyhedronDocument {
    pub schema: String,
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triangulation: Option<Vec<[usize; 4]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<Region>>,
}

impl PolyhedronDocument {
    pub fn from_surface(s: &PolyhedralSurface) -> Self {
        PolyhedronDocument {
            schema: POLYHEDRON_SCHEMA.into(),
            vertices: s.vertices().iter().map(|p| [p.x, p.y, p.z]).collect(),
            faces: s.faces().to_vec(),
            triangulation: None,
            labels: None,
        }
    }

    pub fn from_triangulation(t: &Triangulation) -> Result<Self> {
        if !t.extra_points().is_empty() {
            return Err(Error::BadParams("documents hold triangulations without added points".into()));
        }
        Ok(PolyhedronDocument { triangulation: Some(t.tetrahedra().to_vec()), ..Self::from_surface(t.surface()) })
    }

    pub fn with_labels(mut self, labels: Vec<Region>) -> Self {
        self.labels = Some(labels);
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let d: PolyhedronDocument = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        d.check()?;
        Ok(d)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }

    /// Schema and index ranges.
    pub fn check(&self) -> Result<()> {
        if self.schema != POLYHEDRON_SCHEMA {
            return Err(Error::Parse(format!("unsupported schema {:?}", self.schema)));
        }
        let n = self.vertices.len();
        if let Some(f) = self.faces.iter().find(|f| f.iter().any(|&i| i >= n)) {
            return Err(Error::Parse(format!("face {f:?} indexes past {n} vertices")));
        }
        if let Some(t) = self.triangulation.iter().flatten().find(|t| t.iter().any(|&i| i >= n)) {
            return Err(Error::Parse(format!("tetrahedron {t:?} indexes past {n} vertices")));
        }
        if let Some(l) = &self.labels {
            if l.len() != n {
                return Err(Error::Parse(format!("{} labels for {n} vertices", l.len())));
            }
        }
        Ok(())
    }

    pub fn surface(&self) -> Result<PolyhedralSurface> {
        self.check()?;
        PolyhedralSurface::from_coords(&self.vertices, &self.faces)
    }

    /// The stored triangulation over the (reoriented) surface, if any.
    pub fn stored_triangulation(&self) -> Result<Option<Triangulation>> {
        let Some(tets) = &self.triangulation else { return Ok(None) };
        Ok(Some(Triangulation::new(self.surface()?, tets.clone())))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Obj,
}

impl std::str::FromStr for MeshFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "obj" => Ok(MeshFormat::Obj),
            other => Err(Error::BadParams(format!("unknown mesh format {other:?}"))),
        }
    }
}

/// Wavefront OBJ with 1-based indices; coordinates in round-trip form.
pub fn to_obj(vertices: &[[f64; 3]], faces: &[[usize; 3]]) -> String {
    let mut out = String::new();
    for v in vertices {
        let _ = writeln!(out, "v {:?} {:?} {:?}", v[0], v[1], v[2]);
    }
    for f in faces {
        let _ = writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    out
}

/// Vertex coordinates and 0-based triangles.
pub type Mesh = (Vec<[f64; 3]>, Vec<[usize; 3]>);

/// Reads `v` and triangular `f` records; other records are skipped. Face
/// entries of the form `i/t/n` keep the vertex index.
pub fn parse_obj(text: &str) -> Result<Mesh> {
    let mut verts = Vec::new();
    let mut faces = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let mut it = line.split_whitespace();
        let bad = |what: &str| Error::Parse(format!("line {}: {what}", ln + 1));
        match it.next() {
            Some("v") => {
                let c: Vec<f64> = it
                    .take(3)
                    .map(|x| x.parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad("bad coordinate"))?;
                if c.len() != 3 {
                    return Err(bad("vertex needs three coordinates"));
                }
                verts.push([c[0], c[1], c[2]]);
            }
            Some("f") => {
                let idx: Vec<usize> = it
                    .map(|x| x.split('/').next().unwrap_or("").parse::<usize>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad("bad face index"))?;
                if idx.len() != 3 || idx.contains(&0) {
                    return Err(bad("faces must be triangles with 1-based indices"));
                }
                faces.push([idx[0] - 1, idx[1] - 1, idx[2] - 1]);
            }
            _ => {}
        }
    }
    Ok((verts, faces))
}

pub fn point_array(p: &Point3) -> [f64; 3] {
    [p.x, p.y, p.z]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    #[test]
    fn json_round_trip_is_exact() {
        let s = generators::schonhardt(&generators::SchonhardtParams::standard()).unwrap();
        let d = PolyhedronDocument::from_surface(&s);
        let back = PolyhedronDocument::from_json(&d.to_json()).unwrap();
        assert_eq!(back, d);
        let t = generators::octahedron_appendix_triangulation();
        let d = PolyhedronDocument::from_triangulation(&t).unwrap();
        let back = PolyhedronDocument::from_json(&d.to_json()).unwrap();
        assert_eq!(back.stored_triangulation().unwrap().unwrap().tetrahedra(), t.tetrahedra());
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(matches!(PolyhedronDocument::from_json("{"), Err(Error::Parse(_))));
        let mut d = PolyhedronDocument::from_surface(&generators::octahedron());
        d.faces[0][1] = 6;
        assert!(matches!(PolyhedronDocument::from_json(&d.to_json()), Err(Error::Parse(_))));
        let mut d = PolyhedronDocument::from_surface(&generators::octahedron());
        d.schema = "other@1".into();
        assert!(PolyhedronDocument::from_json(&d.to_json()).is_err());
    }

    #[test]
    fn obj_export() {
        let d = PolyhedronDocument::from_surface(&generators::octahedron());
        let obj = to_obj(&d.vertices, &d.faces);
        assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 6);
        assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 8);
        assert!(obj.lines().all(|l| !l.starts_with("f ") || !l.contains(" 0")));
        let s = generators::schonhardt(&generators::SchonhardtParams::new(0.3, 1.7, 2.3).unwrap()).unwrap();
        let d = PolyhedronDocument::from_surface(&s);
        let (v, f) = parse_obj(&to_obj(&d.vertices, &d.faces)).unwrap();
        assert_eq!(f, d.faces);
        for (a, b) in v.iter().zip(&d.vertices) {
            for k in 0..3 {
                assert!((a[k] - b[k]).abs() <= 1e-12);
            }
        }
        assert!("stl".parse::<MeshFormat>().is_err());
        assert!(parse_obj("f 1 2").is_err());
    }
}
