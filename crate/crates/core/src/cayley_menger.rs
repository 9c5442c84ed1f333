//! Tetrahedra from their six edge lengths.
//!
//! The bordered Cayley–Menger matrix puts squared lengths in the leading 4×4
//! block and a border of ones:
//!
//! ```text
//!  | 0     e12²  e13²  e14²  1 |
//!  | e12²  0     e23²  e24²  1 |
//!  | e13²  e23²  0     e34²  1 |
//!  | e14²  e24²  e34²  0     1 |
//!  | 1     1     1     1     0 |
//! ```
//!
//! Its determinant is `D = 288 V²`. The cofactor attached to edge `ij` is the
//! signed minor that removes row `k` and column `l`, where `{k, l}` are the two
//! vertices off that edge; the dihedral angle at `ij` is then
//! `arccos(D_ij / sqrt(2 e_ij² D + D_ij²))`.

use crate::error::{Error, Result};
use crate::geom::Point3;
use std::fmt;
use std::str::FromStr;

/// Slack allowed on the arccos argument before clamping is refused.
pub const TOL_CLAMP: f64 = 1e-9;
/// Relative degeneracy threshold for `D`, multiplied by (max length)⁶.
pub const TOL_D_REL: f64 = 1e-12;

/// The six edges of a tetrahedron with vertices 1..4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeLabel {
    E12,
    E13,
    E14,
    E23,
    E24,
    E34,
}

impl EdgeLabel {
    pub const ALL: [EdgeLabel; 6] =
        [EdgeLabel::E12, EdgeLabel::E13, EdgeLabel::E14, EdgeLabel::E23, EdgeLabel::E24, EdgeLabel::E34];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Zero-based endpoints.
    pub fn vertices(self) -> (usize, usize) {
        match self {
            EdgeLabel::E12 => (0, 1),
            EdgeLabel::E13 => (0, 2),
            EdgeLabel::E14 => (0, 3),
            EdgeLabel::E23 => (1, 2),
            EdgeLabel::E24 => (1, 3),
            EdgeLabel::E34 => (2, 3),
        }
    }

    /// Zero-based endpoints of the opposite edge.
    pub fn opposite(self) -> (usize, usize) {
        EdgeLabel::ALL[5 - self.index()].vertices()
    }

    pub fn from_vertices(i: usize, j: usize) -> Option<EdgeLabel> {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        EdgeLabel::ALL.into_iter().find(|e| e.vertices() == (a, b))
    }
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (i, j) = self.vertices();
        write!(f, "{}{}", i + 1, j + 1)
    }
}

impl FromStr for EdgeLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches(['e', 'E']);
        let b = t.as_bytes();
        if b.len() == 2 && (b'1'..=b'4').contains(&b[0]) && (b'1'..=b'4').contains(&b[1]) && b[0] < b[1] {
            if let Some(e) = EdgeLabel::from_vertices((b[0] - b'1') as usize, (b[1] - b'1') as usize) {
                return Ok(e);
            }
        }
        Err(Error::BadEdgeLabel(s.to_string()))
    }
}

/// Edge lengths `(e12, e13, e14, e23, e24, e34)`, all positive and finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TetraLengths([f64; 6]);

impl TetraLengths {
    pub fn new(l: [f64; 6]) -> Result<Self> {
        match l.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
            Some(&bad) => Err(Error::NonPositiveLength(bad)),
            None => Ok(TetraLengths(l)),
        }
    }

    pub fn from_points(p: &[Point3; 4]) -> Result<Self> {
        Self::new(EdgeLabel::ALL.map(|e| {
            let (i, j) = e.vertices();
            (p[i] - p[j]).norm()
        }))
    }

    pub fn get(&self, e: EdgeLabel) -> f64 {
        self.0[e.index()]
    }

    pub fn as_array(&self) -> [f64; 6] {
        self.0
    }

    pub fn max_length(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }

    fn faces_satisfy_triangle_inequality(&self) -> bool {
        let l = &self.0;
        // faces 123, 124, 134, 234
        [[0, 1, 3], [0, 2, 4], [1, 2, 5], [3, 4, 5]]
            .iter()
            .all(|&[a, b, c]| l[a] < l[b] + l[c] && l[b] < l[a] + l[c] && l[c] < l[a] + l[b])
    }
}

/// The bordered 5×5 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CMMatrix(pub [[f64; 5]; 5]);

impl CMMatrix {
    /// The 4×4 matrix left after deleting row `k` and column `l` (zero-based).
    pub fn minor(&self, k: usize, l: usize) -> [[f64; 4]; 4] {
        let mut out = [[0.0; 4]; 4];
        let rows = (0..5).filter(|&r| r != k);
        for (ri, r) in rows.enumerate() {
            for (ci, c) in (0..5).filter(|&c| c != l).enumerate() {
                out[ri][ci] = self.0[r][c];
            }
        }
        out
    }
}

pub fn cm_matrix(l: &TetraLengths) -> CMMatrix {
    let s = l.0.map(|x| x * x);
    let [e12, e13, e14, e23, e24, e34] = s;
    CMMatrix([
        [0.0, e12, e13, e14, 1.0],
        [e12, 0.0, e23, e24, 1.0],
        [e13, e23, 0.0, e34, 1.0],
        [e14, e24, e34, 0.0, 1.0],
        [1.0, 1.0, 1.0, 1.0, 0.0],
    ])
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det_pivoted<const N: usize>(mut a: [[f64; N]; N]) -> f64 {
    let mut det = 1.0;
    for col in 0..N {
        let piv = (col..N).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        if a[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        let p = a[col][col];
        det *= p;
        for r in col + 1..N {
            let f = a[r][col] / p;
            if f != 0.0 {
                let pivot_row = a[col];
                for (x, y) in a[r][col..].iter_mut().zip(&pivot_row[col..]) {
                    *x -= f * y;
                }
            }
        }
    }
    det
}

pub fn cm_determinant(l: &TetraLengths) -> f64 {
    det_pivoted(cm_matrix(l).0)
}

fn cofactor_of(m: &CMMatrix, e: EdgeLabel) -> f64 {
    let (k, l) = e.opposite();
    let sign = if (k + l) % 2 == 0 { 1.0 } else { -1.0 };
    sign * det_pivoted(m.minor(k, l))
}

/// Signed cofactor `D_ij` for edge `e`.
pub fn cm_cofactor(l: &TetraLengths, e: EdgeLabel) -> f64 {
    cofactor_of(&cm_matrix(l), e)
}

/// Degeneracy threshold for `D` at the scale of `l`.
pub fn tol_d(l: &TetraLengths) -> f64 {
    TOL_D_REL * l.max_length().powi(6)
}

/// Strict triangle inequalities on all four faces and `D` above threshold.
pub fn is_valid_tetra(l: &TetraLengths) -> bool {
    l.faces_satisfy_triangle_inequality() && cm_determinant(l) > tol_d(l)
}

fn check_valid(l: &TetraLengths, m: &CMMatrix) -> Result<f64> {
    if !l.faces_satisfy_triangle_inequality() {
        return Err(Error::TriangleInequalityViolated);
    }
    let d = det_pivoted(m.0);
    if d <= tol_d(l) {
        return Err(Error::DegenerateTetra(d));
    }
    Ok(d)
}

fn angle_from(d: f64, dij: f64, e: f64) -> f64 {
    let x = dij / (2.0 * e * e * d + dij * dij).sqrt();
    // |x| <= 1 holds in exact arithmetic whenever D > 0
    if x.abs() <= 1.0 + TOL_CLAMP {
        x.clamp(-1.0, 1.0).acos()
    } else {
        f64::NAN
    }
}

/// Interior dihedral angle at edge `e`, in `(0, π)`.
pub fn dihedral_angle(l: &TetraLengths, e: EdgeLabel) -> Result<f64> {
    let m = cm_matrix(l);
    let d = check_valid(l, &m)?;
    Ok(angle_from(d, cofactor_of(&m, e), l.get(e)))
}

/// All six dihedral angles, sharing one determinant evaluation.
pub fn dihedral_angles(l: &TetraLengths) -> Result<[f64; 6]> {
    let m = cm_matrix(l);
    let d = check_valid(l, &m)?;
    Ok(EdgeLabel::ALL.map(|e| angle_from(d, cofactor_of(&m, e), l.get(e))))
}
