//! Angle sums, curvatures and the discrete Hilbert–Einstein functional
//!
//! `HE(l) = Σ lᵢ κᵢ + Σ l'ⱼ (π − αⱼ)`, with `κᵢ = 2π − ωᵢ`.
//!
//! Interior lengths `l` vary; boundary lengths `l'` stay at their coordinate
//! values. Because each tetrahedron satisfies `Σ_e l_e dα_e = 0`, the
//! differential collapses to `dHE = Σ κᵢ dlᵢ`.

use crate::cayley_menger::{dihedral_angles, is_valid_tetra, EdgeLabel, TetraLengths};
use crate::error::{Error, Result};
use crate::triangulation::{tetra_edges, Triangulation};
use std::f64::consts::{PI, TAU};

/// Interior lengths aligned with `Triangulation::interior_edges`, boundary
/// lengths aligned with the surface's canonical edge list.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeLengthAssignment {
    pub interior: Vec<f64>,
    pub boundary: Vec<f64>,
}

/// Total angles, curvatures and boundary dihedral angles.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleData {
    pub omega: Vec<f64>,
    pub kappa: Vec<f64>,
    pub boundary_alpha: Vec<f64>,
}

#[derive(Clone, Copy)]
enum Slot {
    Interior(usize),
    Boundary(usize),
}

impl EdgeLengthAssignment {
    /// Lengths read off the vertex coordinates.
    pub fn euclidean(t: &Triangulation) -> Self {
        let d = |(a, b): (usize, usize)| (t.point(a) - t.point(b)).norm();
        EdgeLengthAssignment {
            interior: t.interior_edges().iter().map(|&e| d(e)).collect(),
            boundary: t.surface().edges().iter().map(|&e| d(e)).collect(),
        }
    }

    /// Same boundary, new interior lengths.
    pub fn with_interior(&self, interior: Vec<f64>) -> Self {
        EdgeLengthAssignment { interior, boundary: self.boundary.clone() }
    }

    fn check(&self, t: &Triangulation) -> Result<()> {
        if self.interior.len() != t.interior_edges().len() || self.boundary.len() != t.surface().edges().len() {
            return Err(Error::InvalidTriangulation(format!(
                "length vectors ({}, {}) do not match edge counts ({}, {})",
                self.interior.len(),
                self.boundary.len(),
                t.interior_edges().len(),
                t.surface().edges().len()
            )));
        }
        if let Some(&x) = self.interior.iter().chain(self.boundary.iter()).find(|x| !(x.is_finite() && **x > 0.0)) {
            return Err(Error::NonPositiveLength(x));
        }
        Ok(())
    }
}

fn slots(t: &Triangulation, tet: &[usize; 4]) -> Result<[Slot; 6]> {
    let mut out = [Slot::Interior(0); 6];
    for (k, e) in tetra_edges(tet).into_iter().enumerate() {
        out[k] = if let Ok(i) = t.interior_edges().binary_search(&e) {
            Slot::Interior(i)
        } else if let Ok(j) = t.surface().edges().binary_search(&e) {
            Slot::Boundary(j)
        } else {
            return Err(Error::InvalidTriangulation(format!("edge {e:?} is neither interior nor boundary")));
        };
    }
    Ok(out)
}

fn lengths_of(l: &EdgeLengthAssignment, s: &[Slot; 6]) -> Result<TetraLengths> {
    TetraLengths::new(s.map(|x| match x {
        Slot::Interior(i) => l.interior[i],
        Slot::Boundary(j) => l.boundary[j],
    }))
}

/// Does every tetrahedron stay a non-degenerate Euclidean simplex?
pub fn in_domain(t: &Triangulation, l: &EdgeLengthAssignment) -> Result<bool> {
    l.check(t)?;
    for tet in t.tetrahedra() {
        if !is_valid_tetra(&lengths_of(l, &slots(t, tet)?)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Sums tetrahedron dihedral angles around every interior and boundary edge.
pub fn total_angles(t: &Triangulation, l: &EdgeLengthAssignment) -> Result<AngleData> {
    l.check(t)?;
    let mut omega = vec![0.0; l.interior.len()];
    let mut alpha = vec![0.0; l.boundary.len()];
    for tet in t.tetrahedra() {
        let s = slots(t, tet)?;
        let len = lengths_of(l, &s)?;
        let ang = dihedral_angles(&len).map_err(|_| Error::OutOfDomain)?;
        for e in EdgeLabel::ALL {
            match s[e.index()] {
                Slot::Interior(i) => omega[i] += ang[e.index()],
                Slot::Boundary(j) => alpha[j] += ang[e.index()],
            }
        }
    }
    let kappa = omega.iter().map(|w| TAU - w).collect();
    Ok(AngleData { omega, kappa, boundary_alpha: alpha })
}

/// `κᵢ = 2π − ωᵢ`.
pub fn curvatures(a: &AngleData) -> Vec<f64> {
    a.omega.iter().map(|w| TAU - w).collect()
}

pub fn he_value(t: &Triangulation, l: &EdgeLengthAssignment) -> Result<f64> {
    let a = total_angles(t, l)?;
    let inner: f64 = l.interior.iter().zip(&a.kappa).map(|(x, k)| x * k).sum();
    let outer: f64 = l.boundary.iter().zip(&a.boundary_alpha).map(|(x, al)| x * (PI - al)).sum();
    Ok(inner + outer)
}

/// Central-difference probe of `Σ_e l_e dα_e` along `dir`; vanishes as `h → 0`.
pub fn schlafli_residual(l: &TetraLengths, dir: &[f64; 6], h: f64) -> Result<f64> {
    let base = l.as_array();
    let shift = |s: f64| -> Result<[f64; 6]> {
        let mut x = base;
        for k in 0..6 {
            x[k] += s * h * dir[k];
        }
        let tl = TetraLengths::new(x).map_err(|_| Error::DegenerateTetra(0.0))?;
        dihedral_angles(&tl).map_err(|e| match e {
            Error::DegenerateTetra(d) => Error::DegenerateTetra(d),
            _ => Error::DegenerateTetra(0.0),
        })
    };
    let (ap, am) = (shift(1.0)?, shift(-1.0)?);
    Ok((0..6).map(|k| base[k] * (ap[k] - am[k]) / (2.0 * h)).sum())
}

/// Largest deviation between a central-difference gradient of HE and κ.
pub fn he_gradient_check(t: &Triangulation, l: &EdgeLengthAssignment, h: f64) -> Result<f64> {
    let kappa = total_angles(t, l)?.kappa;
    let mut worst: f64 = 0.0;
    for i in 0..l.interior.len() {
        let mut p = l.interior.clone();
        let mut m = l.interior.clone();
        p[i] += h;
        m[i] -= h;
        let hp = he_value(t, &l.with_interior(p))?;
        let hm = he_value(t, &l.with_interior(m))?;
        worst = worst.max(((hp - hm) / (2.0 * h) - kappa[i]).abs());
    }
    Ok(worst)
}
