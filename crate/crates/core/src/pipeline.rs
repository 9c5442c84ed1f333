//! The three-step analysis (triangulate, assemble `M_T`, read its spectrum),
//! cross-checked against the rigidity matrix; named generators; sweeps.

use crate::deformation::{deformation_space, flex_indicator, smallest_nontrivial_singular_value, DEFAULT_TOL_SV};
use crate::document::PolyhedronDocument;
use crate::error::{Error, Result};
use crate::generators::{self, CoverRecipe, SchonhardtParams, TPolyParams};
use crate::geom::{flat_vertices, is_weakly_convex, PolyhedralSurface};
use crate::stiffness::{
    assemble_mt, kernel_count_check, rigidity_verdict, spectrum, FDScheme, Spectrum, Verdict, VerdictKind,
    DEFAULT_TOL_EIG,
};
use crate::triangulation::{find_decomposition, Decomposition, Triangulation};
use rayon::prelude::*;
use serde::Serialize;
use std::fmt::Write as _;

pub const ANALYSIS_SCHEMA: &str = "rigidity-lab/analysis@1";
pub const SWEEP_SCHEMA: &str = "rigidity-lab/sweep@1";
pub const DECOMPOSITION_SCHEMA: &str = "rigidity-lab/decomposition@1";
pub const DEFAULT_BUDGET: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions {
    pub scheme: FDScheme,
    pub tol_eig: f64,
    pub tol_sv: f64,
    pub budget: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            scheme: FDScheme::default(),
            tol_eig: DEFAULT_TOL_EIG,
            tol_sv: DEFAULT_TOL_SV,
            budget: DEFAULT_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionSummary {
    /// `found`, `non-decomposable`, `budget-exceeded` or `supplied`.
    pub outcome: String,
    pub admissible: Option<usize>,
    pub nodes: Option<usize>,
    pub tetrahedra: Option<Vec<[usize; 4]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StiffnessSummary {
    pub scheme: FDScheme,
    pub interior_edges: Vec<(usize, usize)>,
    pub matrix: Vec<Vec<f64>>,
    pub asymmetry: f64,
    pub spectrum: Spectrum,
    pub verdict: Verdict,
    /// Kernel and negative counts match `3m + k` and `m`; only on convex input.
    pub kernel_counts_hold: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeformationSummary {
    pub nullity: usize,
    pub trivial_dim: usize,
    pub nontrivial_dim: usize,
    pub spectral_gap: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Census {
    pub m: usize,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub schema: String,
    pub valid: bool,
    pub violations: Vec<String>,
    pub weakly_convex: Option<Vec<bool>>,
    pub flat_vertices: Option<Vec<usize>>,
    pub decomposition: Option<DecompositionSummary>,
    pub census: Option<Census>,
    pub stiffness: Option<StiffnessSummary>,
    pub deformation: Option<DeformationSummary>,
    /// Both verdicts are decisive and agree; absent when either is missing.
    pub oracles_agree: Option<bool>,
    /// `Rigid`, `Flexible`, `Flexible (numerical)`, `Indeterminate` or
    /// `Invalid`.
    pub verdict: String,
}

fn decomp_summary(outcome: &Decomposition, admissible: usize, nodes: usize) -> DecompositionSummary {
    let (name, tets) = match outcome {
        Decomposition::Found(t) => ("found", Some(t.tetrahedra().to_vec())),
        Decomposition::NonDecomposable => ("non-decomposable", None),
        Decomposition::BudgetExceeded => ("budget-exceeded", None),
    };
    DecompositionSummary { outcome: name.into(), admissible: Some(admissible), nodes: Some(nodes), tetrahedra: tets }
}

/// Runs the full analysis. A supplied triangulation replaces the search.
pub fn analyze(
    s: &PolyhedralSurface,
    supplied: Option<&Triangulation>,
    opts: &AnalysisOptions,
) -> Result<AnalysisReport> {
    FDScheme::new(opts.scheme.kind, opts.scheme.epsilon)?;
    let validity = s.validate();
    let mut report = AnalysisReport {
        schema: ANALYSIS_SCHEMA.into(),
        valid: validity.ok(),
        violations: validity.violations.iter().map(|v| v.to_string()).collect(),
        weakly_convex: None,
        flat_vertices: None,
        decomposition: None,
        census: None,
        stiffness: None,
        deformation: None,
        oracles_agree: None,
        verdict: "Invalid".into(),
    };
    if !report.valid {
        return Ok(report);
    }
    report.weakly_convex = Some(is_weakly_convex(s)?.per_vertex);
    report.flat_vertices = Some(flat_vertices(s)?);

    let tri = match supplied {
        Some(t) => {
            t.ensure_valid()?;
            report.decomposition = Some(DecompositionSummary {
                outcome: "supplied".into(),
                admissible: None,
                nodes: None,
                tetrahedra: Some(t.tetrahedra().to_vec()),
            });
            Some(t.clone())
        }
        None => {
            let d = find_decomposition(s, opts.budget)?;
            report.decomposition = Some(decomp_summary(&d.outcome, d.admissible, d.nodes));
            d.triangulation().cloned()
        }
    };

    let (basis, dverdict) = deformation_space(s, opts.tol_sv)?;
    report.deformation = Some(DeformationSummary {
        nullity: basis.nullity,
        trivial_dim: basis.trivial_dim,
        nontrivial_dim: basis.nontrivial_dim,
        spectral_gap: basis.spectral_gap,
        verdict: dverdict.clone(),
    });

    let mut verdict = dverdict.kind.to_string();
    if let Some(t) = tri {
        let census = t.census()?;
        report.census = Some(Census { m: census.m, k: census.k });
        let m = assemble_mt(&t, opts.scheme)?;
        let sp = spectrum(&m, opts.tol_eig);
        let mut sv = rigidity_verdict(&t, &sp, &census);
        let kernel_counts_hold = match kernel_count_check(&t, &sp, &census) {
            Ok(b) => Some(b),
            Err(Error::NotConvex) => None,
            Err(e) => return Err(e),
        };
        if sv.kind != VerdictKind::Indeterminate {
            let agree = sv.kind == dverdict.kind;
            report.oracles_agree = Some(agree);
            if sv.kind == VerdictKind::Flexible {
                if agree {
                    sv.numerical = false;
                    sv.evidence.push_str("; corroborated by the rigidity matrix");
                } else {
                    verdict = "Flexible (numerical)".into();
                }
            }
        }
        report.stiffness = Some(StiffnessSummary {
            scheme: m.scheme,
            interior_edges: m.interior_edges.clone(),
            matrix: m.matrix.row_iter().map(|r| r.iter().copied().collect()).collect(),
            asymmetry: m.asymmetry,
            spectrum: sp,
            verdict: sv,
            kernel_counts_hold,
        });
    }
    report.verdict = verdict;
    Ok(report)
}

pub fn analyze_document(doc: &PolyhedronDocument, opts: &AnalysisOptions) -> Result<AnalysisReport> {
    let s = doc.surface()?;
    let t = doc.stored_triangulation()?;
    analyze(&s, t.as_ref(), opts)
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    pub fn to_text(&self) -> String {
        let mut o = String::new();
        let _ = writeln!(o, "valid: {}", self.valid);
        for v in &self.violations {
            let _ = writeln!(o, "  violation: {v}");
        }
        if let Some(w) = &self.weakly_convex {
            let bad: Vec<usize> = (0..w.len()).filter(|&i| !w[i]).collect();
            if bad.is_empty() {
                let _ = writeln!(o, "weakly convex: yes");
            } else {
                let _ = writeln!(o, "weakly convex: no (vertices {bad:?})");
            }
        }
        if let Some(f) = &self.flat_vertices {
            let _ = writeln!(o, "flat vertices: {f:?}");
        }
        if let Some(d) = &self.decomposition {
            let _ = write!(o, "decomposition: {}", d.outcome);
            if let Some(a) = d.admissible {
                let _ = write!(o, " ({a} admissible tetrahedra)");
            }
            if let Some(t) = &d.tetrahedra {
                let _ = write!(o, ", {} tetrahedra", t.len());
            }
            o.push('\n');
        }
        if let Some(c) = &self.census {
            let _ = writeln!(o, "census: m = {}, k = {}", c.m, c.k);
        }
        if let Some(s) = &self.stiffness {
            let _ = writeln!(
                o,
                "stiffness: {}x{} ({:?}, eps {:e}), asymmetry {:.2e}",
                s.matrix.len(),
                s.matrix.len(),
                s.scheme.kind,
                s.scheme.epsilon,
                s.asymmetry
            );
            if s.matrix.len() <= 6 {
                for row in &s.matrix {
                    let cells: Vec<String> = row.iter().map(|x| format!("{x:.6}")).collect();
                    let _ = writeln!(o, "  [{}]", cells.join(", "));
                }
            }
            let ev: Vec<String> = s.spectrum.eigenvalues.iter().map(|x| format!("{x:.6e}")).collect();
            let _ = writeln!(o, "  eigenvalues: [{}]", ev.join(", "));
            let _ = writeln!(
                o,
                "  negative {}, zero {}, positive {}",
                s.spectrum.negative, s.spectrum.zero, s.spectrum.positive
            );
            let _ = writeln!(o, "  verdict: {} ({})", s.verdict.kind, s.verdict.evidence);
        }
        if let Some(d) = &self.deformation {
            let _ = writeln!(
                o,
                "deformation: nullity {}, trivial {}, nontrivial {}",
                d.nullity, d.trivial_dim, d.nontrivial_dim
            );
            let _ = writeln!(o, "  verdict: {}", d.verdict.kind);
        }
        if let Some(a) = self.oracles_agree {
            let _ = writeln!(o, "oracles agree: {a}");
        }
        let _ = writeln!(o, "verdict: {}", self.verdict);
        o
    }
}

/// Parameters understood by [`generate`]; unused ones are ignored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenParams {
    pub theta: f64,
    pub r: f64,
    pub h: f64,
    pub depth: f64,
    pub shift: f64,
    pub cover: CoverRecipe,
}

impl Default for GenParams {
    fn default() -> Self {
        let p = SchonhardtParams::standard();
        GenParams {
            theta: p.theta,
            r: p.r,
            h: p.h,
            depth: generators::pushed_flat_depth(),
            shift: 0.0,
            cover: CoverRecipe::Forward,
        }
    }
}

pub const GENERATOR_IDS: [&str; 8] =
    ["schonhardt", "schonhardt-unit", "octahedron", "cube-flat", "bipyramid", "pushed-convex", "pushed", "t-poly"];

/// Builds the named polyhedron as a document.
pub fn generate(name: &str, p: &GenParams) -> Result<PolyhedronDocument> {
    let doc = match name {
        "schonhardt" => {
            PolyhedronDocument::from_surface(&generators::schonhardt(&SchonhardtParams::new(p.theta, p.r, p.h)?)?)
        }
        "schonhardt-unit" => PolyhedronDocument::from_surface(&generators::schonhardt_unit_side(p.theta)?),
        // carries the four tetrahedra around the diagonal 4-5
        "octahedron" => PolyhedronDocument::from_triangulation(&generators::octahedron_appendix_triangulation())?,
        "cube-flat" => PolyhedronDocument::from_surface(&generators::cube_with_flat_vertex()),
        "bipyramid" => PolyhedronDocument::from_surface(&generators::triangular_bipyramid()),
        "pushed-convex" => PolyhedronDocument::from_surface(&generators::pushed_vertex_pair(p.depth)?.0),
        "pushed" => PolyhedronDocument::from_surface(&generators::pushed_vertex_pair(p.depth)?.1),
        "t-poly" => {
            let (s, labels) = generators::t_polyhedron(&tpoly_params(p))?;
            PolyhedronDocument::from_surface(&s).with_labels(labels)
        }
        other => return Err(Error::UnknownGenerator(other.into())),
    };
    Ok(doc)
}

fn tpoly_params(p: &GenParams) -> TPolyParams {
    TPolyParams { shift: p.shift, cover: p.cover, ..TPolyParams::naive() }
}

/// Which parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParam {
    Theta,
    Shift,
    Depth,
}

impl std::str::FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theta" => Ok(SweepParam::Theta),
            "shift" => Ok(SweepParam::Shift),
            "depth" => Ok(SweepParam::Depth),
            other => Err(Error::BadParams(format!("unknown sweep parameter {other:?}"))),
        }
    }
}

/// Sample points `from, from + step, …` up to `to` inclusive. A reversed range
/// is empty.
pub fn sample_range(from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
    if !(from.is_finite() && to.is_finite() && step.is_finite()) || step <= 0.0 {
        return Err(Error::BadRange(format!("from {from}, to {to}, step {step}")));
    }
    if to < from {
        return Ok(Vec::new());
    }
    let n = ((to - from) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|k| from + k as f64 * step).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub param: f64,
    /// Smallest singular value of R on motions orthogonal to the Killing
    /// fields, relative to the largest.
    pub smallest_nontrivial_sv: Option<f64>,
    pub nullity: Option<usize>,
    pub verdict: Option<VerdictKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weakly_convex: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposable: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flexible: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Sign change of the flex indicator between neighbouring samples, narrowed
/// by bisection, with the nullity at the bracket midpoint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Crossing {
    pub lo: f64,
    pub hi: f64,
    pub nullity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub schema: String,
    pub generator: String,
    pub param: SweepParam,
    pub rows: Vec<SweepRow>,
    pub crossings: Vec<Crossing>,
    /// Rows with all of weakly convex, decomposable and flexible.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub all_three: Option<usize>,
}

impl SweepTable {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tables always serialize")
    }
}

fn surface_at(generator: &str, param: SweepParam, x: f64, base: &GenParams) -> Result<PolyhedralSurface> {
    let mut p = *base;
    match param {
        SweepParam::Theta => p.theta = x,
        SweepParam::Shift => p.shift = x,
        SweepParam::Depth => p.depth = x,
    }
    generate(generator, &p)?.surface()
}

fn sweep_row(
    generator: &str,
    param: SweepParam,
    x: f64,
    base: &GenParams,
    opts: &AnalysisOptions,
    witness: bool,
) -> SweepRow {
    let mut row = SweepRow {
        param: x,
        smallest_nontrivial_sv: None,
        nullity: None,
        verdict: None,
        weakly_convex: None,
        decomposable: None,
        flexible: None,
        error: None,
    };
    let run = |row: &mut SweepRow| -> Result<()> {
        let s = surface_at(generator, param, x, base)?;
        let (d, v) = deformation_space(&s, opts.tol_sv)?;
        row.smallest_nontrivial_sv = Some(smallest_nontrivial_singular_value(&s)?);
        row.nullity = Some(d.nullity);
        row.verdict = Some(v.kind);
        if witness {
            row.weakly_convex = Some(is_weakly_convex(&s)?.all);
            let dec = find_decomposition(&s, opts.budget)?;
            row.decomposable = match dec.outcome {
                Decomposition::Found(_) => Some(true),
                Decomposition::NonDecomposable => Some(false),
                Decomposition::BudgetExceeded => None,
            };
            row.flexible = Some(v.kind == VerdictKind::Flexible);
        }
        Ok(())
    };
    if let Err(e) = run(&mut row) {
        row.error = Some(e.to_string());
        if witness {
            row.weakly_convex.get_or_insert(false);
            row.decomposable.get_or_insert(false);
            row.flexible.get_or_insert(false);
        }
    }
    row
}

/// Worker count from `RIGIDITY_LAB_THREADS`, else the machine's parallelism.
pub fn worker_count() -> usize {
    std::env::var("RIGIDITY_LAB_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

/// One row per sample, in parameter order. The witness columns are filled for
/// `t-poly`. Flex-indicator sign changes between neighbouring samples are
/// refined to width `1e-9`.
pub fn sweep(
    generator: &str,
    param: SweepParam,
    samples: &[f64],
    base: &GenParams,
    opts: &AnalysisOptions,
) -> Result<SweepTable> {
    if !GENERATOR_IDS.contains(&generator) {
        return Err(Error::UnknownGenerator(generator.into()));
    }
    let witness = generator == "t-poly";
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count())
        .build()
        .map_err(|e| Error::BadParams(e.to_string()))?;
    let (rows, signs) = pool.install(|| {
        let rows: Vec<SweepRow> =
            samples.par_iter().map(|&x| sweep_row(generator, param, x, base, opts, witness)).collect();
        let signs: Vec<Option<f64>> = samples
            .par_iter()
            .map(|&x| surface_at(generator, param, x, base).and_then(|s| flex_indicator(&s)).ok())
            .collect();
        (rows, signs)
    });
    let mut crossings = Vec::new();
    for k in 1..samples.len() {
        if let (Some(a), Some(b)) = (signs[k - 1], signs[k]) {
            if a != 0.0 && b != 0.0 && a.signum() != b.signum() {
                let f = |x: f64| surface_at(generator, param, x, base).and_then(|s| flex_indicator(&s));
                let (lo, hi) = crate::deformation::bisect_sign_change(samples[k - 1], samples[k], 1e-9, f)?;
                let s = surface_at(generator, param, 0.5 * (lo + hi), base)?;
                let nullity = deformation_space(&s, opts.tol_sv)?.0.nullity;
                crossings.push(Crossing { lo, hi, nullity });
            }
        }
    }
    let all_three = witness.then(|| {
        rows.iter()
            .filter(|r| r.weakly_convex == Some(true) && r.decomposable == Some(true) && r.flexible == Some(true))
            .count()
    });
    Ok(SweepTable { schema: SWEEP_SCHEMA.into(), generator: generator.into(), param, rows, crossings, all_three })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionDocument {
    pub schema: String,
    #[serde(flatten)]
    pub summary: DecompositionSummary,
}

pub fn decompose_document(doc: &PolyhedronDocument, budget: usize) -> Result<DecompositionDocument> {
    let s = doc.surface()?;
    s.ensure_valid()?;
    let d = find_decomposition(&s, budget)?;
    Ok(DecompositionDocument {
        schema: DECOMPOSITION_SCHEMA.into(),
        summary: decomp_summary(&d.outcome, d.admissible, d.nodes),
    })
}
