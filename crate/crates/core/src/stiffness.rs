//! The stiffness matrix `M_T = (∂ωᵢ/∂lⱼ)` by finite differences, its
//! spectrum, and the verdicts read off it.
//!
//! With no interior vertices, `M_T` is non-degenerate exactly when the surface
//! is infinitesimally rigid. For convex surfaces with `m` interior and `k` flat
//! vertices the kernel has dimension `3m + k` and there are `m` negative
//! eigenvalues.

use crate::error::{Error, Result};
use crate::geom::is_extreme;
use crate::hilbert_einstein::{total_angles, EdgeLengthAssignment};
use crate::triangulation::{Triangulation, VertexCensus};
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::TAU;
use std::fmt;

/// Relative zero band for eigenvalues of finite-difference matrices.
pub const DEFAULT_TOL_EIG: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FdKind {
    Forward,
    Central,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FDScheme {
    pub kind: FdKind,
    pub epsilon: f64,
}

impl FDScheme {
    pub fn new(kind: FdKind, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1e-2) {
            return Err(Error::BadScheme(format!("epsilon {epsilon} outside (0, 1e-2]")));
        }
        Ok(FDScheme { kind, epsilon })
    }

    /// Central differences at 1e-6.
    pub fn central() -> Self {
        FDScheme { kind: FdKind::Central, epsilon: 1e-6 }
    }

    /// Forward differences at 1e-8, the step of the worked octahedron example.
    pub fn forward_replication() -> Self {
        FDScheme { kind: FdKind::Forward, epsilon: 1e-8 }
    }
}

impl Default for FDScheme {
    fn default() -> Self {
        Self::central()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StiffnessMatrix {
    pub matrix: DMatrix<f64>,
    pub scheme: FDScheme,
    /// `‖M − Mᵀ‖∞ / max(1, ‖M‖∞)`
    pub asymmetry: f64,
    pub interior_edges: Vec<(usize, usize)>,
}

impl StiffnessMatrix {
    pub fn symmetrized(&self) -> DMatrix<f64> {
        (&self.matrix + self.matrix.transpose()) * 0.5
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Max absolute row sum.
pub fn norm_inf(m: &DMatrix<f64>) -> f64 {
    m.row_iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Builds `M_T` column by column around the Euclidean lengths. The base angle
/// is taken as exactly 2π, which is what the Euclidean lengths realize.
pub fn assemble_mt(t: &Triangulation, scheme: FDScheme) -> Result<StiffnessMatrix> {
    FDScheme::new(scheme.kind, scheme.epsilon)?;
    t.ensure_valid()?;
    let base = EdgeLengthAssignment::euclidean(t);
    let n = base.interior.len();
    let omega_at = |j: usize, step: f64| -> Result<Vec<f64>> {
        let mut l = base.interior.clone();
        l[j] += step;
        total_angles(t, &base.with_interior(l)).map(|a| a.omega)
    };
    let eps = scheme.epsilon;
    let cols: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|j| -> Result<Vec<f64>> {
            Ok(match scheme.kind {
                FdKind::Forward => omega_at(j, eps)?.iter().map(|w| (w - TAU) / eps).collect(),
                FdKind::Central => {
                    let (p, m) = (omega_at(j, eps)?, omega_at(j, -eps)?);
                    p.iter().zip(&m).map(|(a, b)| (a - b) / (2.0 * eps)).collect()
                }
            })
        })
        .collect::<Result<_>>()?;
    let matrix = DMatrix::from_fn(n, n, |i, j| cols[j][i]);
    let asym = norm_inf(&(&matrix - matrix.transpose())) / norm_inf(&matrix).max(1.0);
    Ok(StiffnessMatrix { matrix, scheme, asymmetry: asym, interior_edges: t.interior_edges().to_vec() })
}

/// Eigenvalues with a sign census.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub negative: usize,
    pub zero: usize,
    pub positive: usize,
    pub tol_eig: f64,
}

/// Cyclic Jacobi rotations on a symmetric matrix. Returns eigenvalues in
/// ascending order and the eigenvectors as columns.
pub fn jacobi_eigen(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let mut a = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let scale = a.norm().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].powi(2))
            .sum::<f64>()
            .sqrt();
        if off <= 1e-12 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let vals = idx.iter().map(|&i| a[(i, i)]).collect();
    let vecs = DMatrix::from_fn(n, n, |r, c| v[(r, idx[c])]);
    (vals, vecs)
}

/// Spectrum of a symmetric matrix with `|λ| ≤ tol·max(1, ‖M‖∞)` counted as zero.
pub fn spectrum_of(m: &DMatrix<f64>, tol_eig: f64) -> Spectrum {
    let (eigenvalues, _) = jacobi_eigen(m);
    let band = tol_eig * norm_inf(m).max(1.0);
    let negative = eigenvalues.iter().filter(|&&l| l < -band).count();
    let zero = eigenvalues.iter().filter(|&&l| l.abs() <= band).count();
    let positive = eigenvalues.len() - negative - zero;
    Spectrum { eigenvalues, negative, zero, positive, tol_eig }
}

pub fn spectrum(m: &StiffnessMatrix, tol_eig: f64) -> Spectrum {
    spectrum_of(&m.symmetrized(), tol_eig)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VerdictKind {
    Rigid,
    Flexible,
    Indeterminate,
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            VerdictKind::Rigid => "Rigid",
            VerdictKind::Flexible => "Flexible",
            VerdictKind::Indeterminate => "Indeterminate",
        };
        f.write_str(s)
    }
}

/// A verdict plus the route and numbers that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    /// Which criterion was applied.
    pub route: String,
    /// Human-readable justification.
    pub evidence: String,
    /// Set when the verdict rests on a numerical zero band rather than an
    /// exact statement.
    pub numerical: bool,
}

/// Reads rigidity off the stiffness spectrum. Only triangulations without
/// interior vertices qualify; otherwise the answer is `Indeterminate`.
pub fn rigidity_verdict(_t: &Triangulation, sp: &Spectrum, census: &VertexCensus) -> Verdict {
    if census.m > 0 {
        return Verdict {
            kind: VerdictKind::Indeterminate,
            route: "stiffness".into(),
            evidence: format!("triangulation has {} interior vertices; spectrum does not decide rigidity", census.m),
            numerical: false,
        };
    }
    if sp.zero == 0 {
        Verdict {
            kind: VerdictKind::Rigid,
            route: "stiffness".into(),
            evidence: format!(
                "no eigenvalue within {:e} of zero among {} (smallest |λ| = {:.6e})",
                sp.tol_eig,
                sp.eigenvalues.len(),
                sp.eigenvalues.iter().map(|l| l.abs()).fold(f64::INFINITY, f64::min)
            ),
            numerical: false,
        }
    } else {
        Verdict {
            kind: VerdictKind::Flexible,
            route: "stiffness".into(),
            evidence: format!("{} eigenvalue(s) within the zero band {:e}", sp.zero, sp.tol_eig),
            numerical: true,
        }
    }
}

/// Checks `dim ker = 3m + k` and `#negative = m` on a convex surface.
pub fn kernel_count_check(t: &Triangulation, sp: &Spectrum, census: &VertexCensus) -> Result<bool> {
    let v = t.surface().vertices();
    let flat = crate::geom::flat_vertices(t.surface())?;
    let convex = (0..v.len()).all(|i| is_extreme(v, i) || flat.contains(&i));
    if !convex {
        return Err(Error::NotConvex);
    }
    Ok(sp.zero == 3 * census.m + census.k && sp.negative == census.m)
}
