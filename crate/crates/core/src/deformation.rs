//! Infinitesimal isometric deformations straight from the edge constraints:
//! the rigidity matrix, its null space, and the Killing fields inside it.

use crate::error::{Error, Result};
use crate::geom::{Point3, PolyhedralSurface, Vector3};
use crate::stiffness::{jacobi_eigen, Verdict, VerdictKind};
use nalgebra::{DMatrix, DVector, Matrix3, Rotation3};
use serde::Serialize;

/// Relative singular-value threshold for the null space.
pub const DEFAULT_TOL_SV: f64 = 1e-8;
/// Relative rank threshold for the projected Killing-field Gram matrix.
pub const TOL_TRIVIAL_RANK: f64 = 1e-9;

/// `|E| × 3|V|`; the row of edge `(i, j)` holds `pᵢ − pⱼ` in the columns of `i`
/// and `pⱼ − pᵢ` in those of `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct RigidityMatrix {
    pub matrix: DMatrix<f64>,
    pub edges: Vec<(usize, usize)>,
}

pub fn rigidity_matrix(s: &PolyhedralSurface) -> Result<RigidityMatrix> {
    s.ensure_valid()?;
    Ok(rigidity_matrix_unchecked(s.vertices(), s.edges()))
}

/// Rows for an arbitrary bar framework.
pub fn rigidity_matrix_unchecked(p: &[Point3], edges: &[(usize, usize)]) -> RigidityMatrix {
    let mut m = DMatrix::zeros(edges.len(), 3 * p.len());
    for (r, &(i, j)) in edges.iter().enumerate() {
        let d = p[i] - p[j];
        for a in 0..3 {
            m[(r, 3 * i + a)] = d[a];
            m[(r, 3 * j + a)] = -d[a];
        }
    }
    RigidityMatrix { matrix: m, edges: edges.to_vec() }
}

/// Columns: translations along x, y, z, then rotations about x, y, z.
pub fn killing_fields(p: &[Point3]) -> DMatrix<f64> {
    let mut t = DMatrix::zeros(3 * p.len(), 6);
    for (i, pi) in p.iter().enumerate() {
        for a in 0..3 {
            t[(3 * i + a, a)] = 1.0;
            let mut e = Vector3::zeros();
            e[a] = 1.0;
            let w = e.cross(pi);
            for b in 0..3 {
                t[(3 * i + b, 3 + a)] = w[b];
            }
        }
    }
    t
}

/// The six Killing fields restricted to the vertices.
pub fn trivial_motions(s: &PolyhedralSurface) -> Result<DMatrix<f64>> {
    s.ensure_valid()?;
    let p = s.vertices();
    let scale = s.scale().max(f64::MIN_POSITIVE);
    let collinear = p.iter().all(|x| (x - p[0]).cross(&(p[1] - p[0])).norm() <= 1e-12 * scale * scale);
    if p.len() < 3 || collinear {
        return Err(Error::DegenerateVertexSet);
    }
    Ok(killing_fields(p))
}

fn rank_of_gram(g: &DMatrix<f64>, tol: f64) -> usize {
    let (vals, _) = jacobi_eigen(g);
    let top = vals.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    vals.iter().filter(|&&l| l > tol * top).count()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeformationBasis {
    pub nullity: usize,
    /// Orthonormal columns spanning the numerical kernel of R.
    pub basis: DMatrix<f64>,
    pub trivial_dim: usize,
    pub nontrivial_dim: usize,
    /// Singular values of R, descending, padded with zeros to `3|V|`.
    pub singular_values: Vec<f64>,
    /// Smallest kept over largest dropped singular value; infinite when
    /// nothing is dropped.
    pub spectral_gap: f64,
    pub tol_sv: f64,
}

/// Kernel of R by SVD thresholding at `tol_sv · σ_max`.
pub fn deformation_space(s: &PolyhedralSurface, tol_sv: f64) -> Result<(DeformationBasis, Verdict)> {
    let r = rigidity_matrix(s)?;
    let t = trivial_motions(s)?;
    let n = r.matrix.ncols();
    // pad to square so the SVD returns a full right basis
    let mut sq = DMatrix::zeros(n.max(r.matrix.nrows()), n);
    sq.rows_mut(0, r.matrix.nrows()).copy_from(&r.matrix);
    let svd = sq.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sv: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let smax = sv.first().copied().unwrap_or(0.0);
    let cut = tol_sv * smax;
    let kernel: Vec<usize> = order.iter().copied().filter(|&i| svd.singular_values[i] <= cut).collect();
    let nullity = kernel.len();
    let basis = DMatrix::from_fn(n, nullity, |row, c| vt[(kernel[c], row)]);
    let proj = basis.transpose() * &t;
    let trivial_dim = rank_of_gram(&(proj.transpose() * &proj), TOL_TRIVIAL_RANK);
    let nontrivial_dim = nullity.saturating_sub(trivial_dim);
    let kept_min = sv.iter().copied().filter(|&x| x > cut).fold(f64::INFINITY, f64::min);
    let dropped_max = sv.iter().copied().filter(|&x| x <= cut).fold(0.0, f64::max);
    let spectral_gap = if nullity == 0 || dropped_max == 0.0 { f64::INFINITY } else { kept_min / dropped_max };
    let kind = if nontrivial_dim > 0 { VerdictKind::Flexible } else { VerdictKind::Rigid };
    let verdict = Verdict {
        kind,
        route: "deformation".into(),
        evidence: format!(
            "nullity {nullity}, trivial {trivial_dim}, nontrivial {nontrivial_dim} at tol_sv {tol_sv:e} (gap {spectral_gap:.3e})"
        ),
        numerical: false,
    };
    Ok((
        DeformationBasis { nullity, basis, trivial_dim, nontrivial_dim, singular_values: sv, spectral_gap, tol_sv },
        verdict,
    ))
}

/// Orthonormal basis of the complement of the Killing fields.
fn nontrivial_frame(p: &[Point3]) -> DMatrix<f64> {
    let tq = killing_fields(p).qr().q();
    let n = tq.nrows();
    let m = DMatrix::identity(n, n) - &tq * tq.transpose();
    let svd = m.svd(true, false);
    let u = svd.u.expect("requested");
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    DMatrix::from_fn(n, n - 6, |r, c| u[(r, idx[c])])
}

/// Smallest singular value of R restricted to motions orthogonal to the
/// Killing fields. Zero exactly at infinitesimal flexibility.
pub fn smallest_nontrivial_singular_value(s: &PolyhedralSurface) -> Result<f64> {
    let r = rigidity_matrix(s)?;
    trivial_motions(s)?;
    let rq = &r.matrix * nontrivial_frame(s.vertices());
    let sv = rq.singular_values();
    let top = sv.max();
    Ok(sv.min() / top.max(f64::MIN_POSITIVE))
}

/// `det [R; Tᵀ]` for sphere triangulations, where the stack is square. It
/// changes sign where the surface passes through an infinitesimally flexible
/// position, so it brackets crossings for bisection.
pub fn flex_indicator(s: &PolyhedralSurface) -> Result<f64> {
    let r = rigidity_matrix(s)?;
    let t = trivial_motions(s)?;
    let n = r.matrix.ncols();
    if r.matrix.nrows() + 6 != n {
        return Err(Error::InvalidSurface(format!("{} edges for {} vertices", r.matrix.nrows(), n / 3)));
    }
    let mut a = DMatrix::zeros(n, n);
    a.rows_mut(0, r.matrix.nrows()).copy_from(&r.matrix);
    a.rows_mut(r.matrix.nrows(), 6).copy_from(&t.transpose());
    // normalize rows so the sign is the only thing that matters
    for mut row in a.row_iter_mut() {
        let nrm = row.norm();
        if nrm > 0.0 {
            row /= nrm;
        }
    }
    Ok(a.determinant())
}

/// Bisects a sign change of `f` on `[lo, hi]` down to width `tol`.
pub fn bisect_sign_change(mut lo: f64, mut hi: f64, tol: f64, f: impl Fn(f64) -> Result<f64>) -> Result<(f64, f64)> {
    let mut flo = f(lo)?;
    let fhi = f(hi)?;
    if flo.signum() == fhi.signum() {
        return Err(Error::BadRange(format!("no sign change on [{lo}, {hi}]")));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok((mid, mid));
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

/// Gauge-fixed nontrivial mode of a Schönhardt-type surface with top
/// vertices 0, 1, 2 and bottom 3, 4, 5.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwistMode {
    /// Per-vertex velocities, bottom triangle at rest, `‖q(A)‖ = 1`.
    pub velocities: Vec<[f64; 3]>,
    /// `max(|⟨q(A), A−E⟩|, |⟨q(A), A−F⟩|) / ‖q(A)‖`
    pub plane_residual: f64,
    /// `max ‖q(B) − Rot(2π/3) q(A)‖, ‖q(C) − Rot(4π/3) q(A)‖`, relative.
    pub rotation_residual: f64,
    /// Largest radial component of `q(A), q(B), q(C)` relative to their norm;
    /// zero means tangent to the vertical cylinder through the top triangle.
    pub cylinder_residual: f64,
    /// Largest `|⟨pᵢ − pⱼ, qᵢ − qⱼ⟩|` over the edges.
    pub edge_residual: f64,
}

pub fn twist_mode(s: &PolyhedralSurface, d: &DeformationBasis) -> Result<TwistMode> {
    if d.nontrivial_dim == 0 {
        return Err(Error::NoNontrivialMode);
    }
    let p = s.vertices();
    if p.len() != 6 {
        return Err(Error::BadParams("twist mode expects the six-vertex antiprism".into()));
    }
    let t = killing_fields(p);
    let tq = t.clone().qr().q();
    // strip the trivial part from the kernel and take its dominant direction
    let resid = &d.basis - &tq * (tq.transpose() * &d.basis);
    let svd = resid.svd(true, false);
    let u = svd.u.expect("requested");
    let k = svd.singular_values.imax();
    let mut q: DVector<f64> = u.column(k).into_owned();
    // subtract the Killing field that matches q on D, E, F
    let rows: Vec<usize> = (9..18).collect();
    let a = t.select_rows(rows.iter());
    let b = q.select_rows(rows.iter());
    let coef = a.clone().svd(true, true).solve(&b, 1e-14).map_err(|e| Error::BadParams(e.to_string()))?;
    q -= &t * coef;
    let qa = Vector3::new(q[0], q[1], q[2]);
    let na = qa.norm();
    if na == 0.0 {
        return Err(Error::NoNontrivialMode);
    }
    q /= na;
    let v = |i: usize| Vector3::new(q[3 * i], q[3 * i + 1], q[3 * i + 2]);
    let qa = v(0);
    let plane_residual = (qa.dot(&(p[0] - p[4]))).abs().max(qa.dot(&(p[0] - p[5])).abs());
    let axis = Vector3::z_axis();
    let rot = |ang: f64| -> Matrix3<f64> { *Rotation3::from_axis_angle(&axis, ang).matrix() };
    let rot1 = rot(std::f64::consts::TAU / 3.0);
    let rot2 = rot(2.0 * std::f64::consts::TAU / 3.0);
    let rotation_residual = (v(1) - rot1 * qa).norm().max((v(2) - rot2 * qa).norm());
    let center = (p[0] + p[1] + p[2]) / 3.0;
    let cylinder_residual = (0..3)
        .map(|i| {
            let radial = Vector3::new(p[i].x - center.x, p[i].y - center.y, 0.0);
            let qi = v(i);
            (qi.dot(&radial) / (radial.norm() * qi.norm())).abs()
        })
        .fold(0.0, f64::max);
    let edge_residual = s.edges().iter().map(|&(i, j)| (p[i] - p[j]).dot(&(v(i) - v(j))).abs()).fold(0.0, f64::max);
    Ok(TwistMode {
        velocities: (0..6).map(|i| [q[3 * i], q[3 * i + 1], q[3 * i + 2]]).collect(),
        plane_residual,
        rotation_residual,
        cylinder_residual,
        edge_residual,
    })
}
