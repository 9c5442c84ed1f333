use clap::{Args, Parser, Subcommand, ValueEnum};
use rigidity_lab::deformation::DEFAULT_TOL_SV;
use rigidity_lab::document::{to_obj, MeshFormat, PolyhedronDocument};
use rigidity_lab::generators::CoverRecipe;
use rigidity_lab::pipeline::{
    analyze_document, decompose_document, generate, sample_range, sweep, worker_count, AnalysisOptions, GenParams,
    SweepParam, SweepTable, DEFAULT_BUDGET,
};
use rigidity_lab::stiffness::{FDScheme, FdKind, DEFAULT_TOL_EIG};
use rigidity_lab::{Error, Result};
use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

/// Infinitesimal rigidity of triangulated polyhedra.
#[derive(Parser)]
#[command(name = "rigidity-lab", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a generated polyhedron document.
    Generate {
        /// schonhardt, schonhardt-unit, octahedron, cube-flat, bipyramid,
        /// pushed-convex, pushed or t-poly
        name: String,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Triangulate, assemble the stiffness matrix and cross-check against the
    /// rigidity matrix.
    Analyze {
        /// Document path, or `-` for standard input.
        input: PathBuf,
        #[command(flatten)]
        analysis: AnalysisArgs,
        #[arg(long)]
        json: bool,
    },
    /// Analyze a generator over a parameter range.
    Sweep {
        generator: String,
        /// theta, shift or depth
        param: String,
        /// `FROM..TO`, inclusive.
        #[arg(allow_hyphen_values = true)]
        range: String,
        #[arg(long)]
        step: f64,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        analysis: AnalysisArgs,
        #[arg(long)]
        json: bool,
    },
    /// Write a document as a triangle mesh.
    Export {
        input: PathBuf,
        #[arg(long, default_value = "obj")]
        format: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Search for a triangulation without added vertices.
    Decompose {
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct ParamArgs {
    /// Twist angle in radians.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "theta_pi_frac")]
    theta: Option<f64>,
    /// Twist angle as a fraction of π, e.g. `1/6`.
    #[arg(long, value_name = "N/D")]
    theta_pi_frac: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    r: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    h: Option<f64>,
    /// Push distance of the pushed-vertex pair.
    #[arg(long, allow_hyphen_values = true)]
    depth: Option<f64>,
    /// How far the T-polyhedron cavity sits below the flush position.
    #[arg(long, allow_hyphen_values = true)]
    shift: Option<f64>,
    #[arg(long, value_enum, default_value = "forward")]
    cover: Cover,
}

#[derive(Clone, Copy, ValueEnum)]
enum Cover {
    Forward,
    Backward,
}

#[derive(Clone, Copy, ValueEnum)]
enum Scheme {
    Forward,
    Central,
}

#[derive(Args)]
struct AnalysisArgs {
    #[arg(long, value_enum, default_value = "central")]
    scheme: Scheme,
    /// Finite-difference step; defaults to 1e-6 central, 1e-8 forward.
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_TOL_EIG)]
    tol_eig: f64,
    #[arg(long, default_value_t = DEFAULT_TOL_SV)]
    tol_sv: f64,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
}

fn pi_frac(s: &str) -> Result<f64> {
    let bad = || Error::BadParams(format!("expected N/D for --theta-pi-frac, got {s:?}"));
    let (n, d) = s.split_once('/').ok_or_else(bad)?;
    let n: f64 = n.trim().parse().map_err(|_| bad())?;
    let d: f64 = d.trim().parse().map_err(|_| bad())?;
    if d == 0.0 {
        return Err(bad());
    }
    Ok(std::f64::consts::PI * n / d)
}

impl ParamArgs {
    fn resolve(&self) -> Result<GenParams> {
        let mut p = GenParams::default();
        if let Some(t) = self.theta {
            p.theta = t;
        }
        if let Some(f) = &self.theta_pi_frac {
            p.theta = pi_frac(f)?;
        }
        if let Some(r) = self.r {
            p.r = r;
        }
        if let Some(h) = self.h {
            p.h = h;
        }
        if let Some(d) = self.depth {
            p.depth = d;
        }
        if let Some(s) = self.shift {
            p.shift = s;
        }
        p.cover = match self.cover {
            Cover::Forward => CoverRecipe::Forward,
            Cover::Backward => CoverRecipe::Backward,
        };
        Ok(p)
    }
}

impl AnalysisArgs {
    fn resolve(&self) -> Result<AnalysisOptions> {
        let scheme = match (self.scheme, self.eps) {
            (Scheme::Central, None) => FDScheme::central(),
            (Scheme::Forward, None) => FDScheme::forward_replication(),
            (Scheme::Central, Some(e)) => FDScheme::new(FdKind::Central, e)?,
            (Scheme::Forward, Some(e)) => FDScheme::new(FdKind::Forward, e)?,
        };
        Ok(AnalysisOptions { scheme, tol_eig: self.tol_eig, tol_sv: self.tol_sv, budget: self.budget })
    }
}

fn read_input(path: &PathBuf) -> Result<String> {
    let mut text = String::new();
    if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text).map_err(|e| Error::Io(e.to_string()))?;
    } else {
        text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(text)
}

fn read_document(path: &PathBuf) -> Result<PolyhedronDocument> {
    PolyhedronDocument::from_json(&read_input(path)?)
}

fn emit(output: Option<&PathBuf>, text: &str) -> Result<()> {
    match output {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| Error::Io(e.to_string()))
        }
    }
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn parse_range(s: &str) -> Result<(f64, f64)> {
    let bad = || Error::BadRange(format!("expected FROM..TO, got {s:?}"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn sweep_text(t: &SweepTable) -> String {
    let opt = |x: Option<bool>| match x {
        Some(true) => "yes",
        Some(false) => "no",
        None => "-",
    };
    let mut o = String::new();
    let witness = t.all_three.is_some();
    o.push_str(&format!("{:>12}  {:>14}  {:>7}  {:<13}", "param", "sigma_min", "nullity", "verdict"));
    if witness {
        o.push_str("  convex  decomposable  flexible");
    }
    o.push('\n');
    for r in &t.rows {
        let sv = r.smallest_nontrivial_sv.map(|x| format!("{x:.6e}")).unwrap_or_else(|| "-".into());
        let n = r.nullity.map(|x| x.to_string()).unwrap_or_else(|| "-".into());
        let v = r.verdict.map(|x| x.to_string()).unwrap_or_else(|| "-".into());
        o.push_str(&format!("{:>12.6}  {sv:>14}  {n:>7}  {v:<13}", r.param));
        if witness {
            o.push_str(&format!("  {:<6}  {:<12}  {:<8}", opt(r.weakly_convex), opt(r.decomposable), opt(r.flexible)));
        }
        if let Some(e) = &r.error {
            o.push_str(&format!("  ({e})"));
        }
        o.push('\n');
    }
    for c in &t.crossings {
        o.push_str(&format!("crossing in [{:.12}, {:.12}], nullity {}\n", c.lo, c.hi, c.nullity));
    }
    if let Some(n) = t.all_three {
        o.push_str(&format!("rows with all three: {n}\n"));
    }
    o.lines().map(|l| format!("{}\n", l.trim_end())).collect()
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Generate { name, params, output } => {
            let doc = generate(&name, &params.resolve()?)?;
            emit(output.as_ref(), &with_newline(doc.to_json()))
        }
        Cmd::Analyze { input, analysis, json } => {
            let doc = read_document(&input)?;
            doc.surface()?.ensure_valid()?;
            let report = analyze_document(&doc, &analysis.resolve()?)?;
            emit(None, &if json { with_newline(report.to_json()) } else { report.to_text() })
        }
        Cmd::Sweep { generator, param, range, step, params, analysis, json } => {
            let (from, to) = parse_range(&range)?;
            let xs = sample_range(from, to, step)?;
            let param: SweepParam = param.parse()?;
            let t = sweep(&generator, param, &xs, &params.resolve()?, &analysis.resolve()?)?;
            emit(None, &if json { with_newline(t.to_json()) } else { sweep_text(&t) })
        }
        Cmd::Export { input, format, output } => {
            let MeshFormat::Obj = format.parse::<MeshFormat>()?;
            let doc = read_document(&input)?;
            let s = doc.surface()?;
            s.ensure_valid()?;
            emit(output.as_ref(), &to_obj(&doc.vertices, &doc.faces))
        }
        Cmd::Decompose { input, budget, json } => {
            let d = decompose_document(&read_document(&input)?, budget)?;
            let text = if json {
                serde_json::to_string_pretty(&d).expect("decomposition serializes")
            } else {
                let mut s = format!("decomposition: {}\n", d.summary.outcome);
                if let Some(a) = d.summary.admissible {
                    s.push_str(&format!("admissible tetrahedra: {a}\n"));
                }
                for t in d.summary.tetrahedra.iter().flatten() {
                    s.push_str(&format!("  {t:?}\n"));
                }
                s
            };
            emit(None, &with_newline(text))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    // sweeps build their own pool; this one serves stiffness assembly
    rayon::ThreadPoolBuilder::new().num_threads(worker_count()).build_global().expect("global pool is set once");
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rigidity-lab: {e}");
            ExitCode::FAILURE
        }
    }
}
