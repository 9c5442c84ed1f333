//! Acceptance run: one PASS/FAIL line per criterion, with timings.
//!
//! Exits 0 even when criteria fail so the rest of the test suite still runs;
//! set `ACCEPTANCE_STRICT=1` to turn any failure into a nonzero exit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rigidity_lab::cayley_menger::{dihedral_angle, EdgeLabel, TetraLengths};
use rigidity_lab::deformation::{deformation_space, twist_mode, DEFAULT_TOL_SV};
use rigidity_lab::generators::{self, SchonhardtParams};
use rigidity_lab::geom::{convex_hull, Point3, PolyhedralSurface};
use rigidity_lab::hilbert_einstein::{he_gradient_check, schlafli_residual, total_angles, EdgeLengthAssignment};
use rigidity_lab::pipeline::{analyze, sample_range, sweep, AnalysisOptions, GenParams, SweepParam};
use rigidity_lab::stiffness::{assemble_mt, kernel_count_check, rigidity_verdict, spectrum, FDScheme, VerdictKind};
use rigidity_lab::triangulation::{find_decomposition, Decomposition, Triangulation};
use std::f64::consts::{FRAC_PI_3, FRAC_PI_6, PI};
use std::time::{Duration, Instant};

const TOL_EIG: f64 = 1e-4;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn schonhardt(theta: f64) -> PolyhedralSurface {
    generators::schonhardt(&SchonhardtParams::new(theta, 1.0, 2.0).unwrap()).unwrap()
}

fn appendix_replication() -> Outcome {
    let t = generators::octahedron_appendix_triangulation();
    let m = assemble_mt(&t, FDScheme::forward_replication()).unwrap();
    let sp = spectrum(&m, TOL_EIG);
    let census = t.census().unwrap();
    let verdict = rigidity_verdict(&t, &sp, &census).kind;
    let value = m.matrix[(0, 0)];
    let shape_ok = m.dim() == 1;
    let value_ok = ((value - 1469.28) / 1469.28).abs() <= 0.01;
    // tetrahedron [1, 3, 4, 5]: the interior edge 4-5 is its third and fourth vertex
    let p = t.tetra_points(&t.tetrahedra()[0]);
    let alpha = dihedral_angle(&TetraLengths::from_points(&p).unwrap(), EdgeLabel::E34).unwrap();
    let alpha_ok = (alpha - PI / 2.0).abs() <= 1e-9;
    outcome(
        shape_ok && value_ok && verdict == VerdictKind::Rigid && alpha_ok,
        format!(
            "M_T {}x{} = {value:.6} (target 1469.28 within 1%), verdict {verdict}, dihedral {alpha:.15} (|err| {:.1e})",
            m.dim(),
            m.dim(),
            (alpha - PI / 2.0).abs()
        ),
    )
}

fn schonhardt_flexibility() -> Outcome {
    let (d, v) = deformation_space(&schonhardt(FRAC_PI_6), DEFAULT_TOL_SV).unwrap();
    let mut ok = d.nullity == 7 && d.nontrivial_dim == 1 && v.kind == VerdictKind::Flexible;
    let mut detail = format!("π/6: nullity {}, nontrivial {}, {}", d.nullity, d.nontrivial_dim, v.kind);
    for th in [PI / 12.0, PI / 4.0] {
        let (d, v) = deformation_space(&schonhardt(th), DEFAULT_TOL_SV).unwrap();
        ok &= d.nullity == 6 && v.kind == VerdictKind::Rigid;
        detail += &format!("; {th:.4}: nullity {}, {}", d.nullity, v.kind);
    }
    let xs = sample_range(0.0, 1.0, 0.01).unwrap();
    let t = sweep("schonhardt", SweepParam::Theta, &xs, &GenParams::default(), &AnalysisOptions::default()).unwrap();
    let hit: Vec<_> = t.crossings.iter().filter(|c| c.lo >= FRAC_PI_6 - 1e-6 && c.hi <= FRAC_PI_6 + 1e-6).collect();
    ok &= t.crossings.len() == 1 && hit.len() == 1 && hit[0].nullity == 7;
    match t.crossings.first() {
        Some(c) => detail += &format!("; crossing [{:.10}, {:.10}] nullity {}", c.lo, c.hi, c.nullity),
        None => detail += "; no crossing",
    }
    outcome(ok, detail)
}

fn non_decomposability() -> Outcome {
    let r = find_decomposition(&schonhardt(FRAC_PI_6), 10_000_000).unwrap();
    let ok = r.outcome == Decomposition::NonDecomposable && r.admissible == 0;
    let name = match r.outcome {
        Decomposition::Found(_) => "Found",
        Decomposition::NonDecomposable => "NonDecomposable",
        Decomposition::BudgetExceeded => "BudgetExceeded",
    };
    outcome(ok, format!("{name}, {} admissible tetrahedra, {} nodes", r.admissible, r.nodes))
}

fn mode_geometry() -> Outcome {
    let s = schonhardt(FRAC_PI_6);
    let (d, _) = deformation_space(&s, DEFAULT_TOL_SV).unwrap();
    let tm = twist_mode(&s, &d).unwrap();
    let q = &tm.velocities;
    // bottom triangle D E F is held fixed
    let fixed = q[3..6].iter().flatten().fold(0.0f64, |a, x| a.max(x.abs()));
    // independent checks from the coordinates
    let p = s.vertices();
    let qa = Point3::from(q[0]);
    let nrm = (p[4] - p[0]).cross(&(p[5] - p[0])).normalize();
    let perp = (qa.normalize().cross(&nrm)).norm();
    let rot = |k: f64, v: &Point3| {
        let (c, sn) = ((2.0 * PI * k / 3.0).cos(), (2.0 * PI * k / 3.0).sin());
        Point3::new(c * v.x - sn * v.y, sn * v.x + c * v.y, v.z)
    };
    let rel =
        ((Point3::from(q[1]) - rot(1.0, &qa)).norm()).max((Point3::from(q[2]) - rot(2.0, &qa)).norm()) / qa.norm();
    let ok = tm.plane_residual <= 1e-9 && tm.rotation_residual <= 1e-9 && perp <= 1e-9 && rel <= 1e-9 && fixed <= 1e-12;
    outcome(
        ok,
        format!(
            "plane {:.1e} (oracle {perp:.1e}), rotation {:.1e} (oracle {rel:.1e}), cylinder {:.1e}, edges {:.1e}",
            tm.plane_residual, tm.rotation_residual, tm.cylinder_residual, tm.edge_residual
        ),
    )
}

fn af2(theta: f64) -> f64 {
    let s = generators::schonhardt_unit_side(theta).unwrap();
    (s.vertices()[0] - s.vertices()[5]).norm_squared()
}

fn diagonal_law() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let th = FRAC_PI_3 * k as f64 / 100.0;
        let want = 1.0 + 2.0 / 3f64.sqrt() * (FRAC_PI_3 + th).sin();
        worst = worst.max((af2(th) - want).abs());
    }
    let h = 1e-5;
    let deriv = (af2(FRAC_PI_6 + h) - af2(FRAC_PI_6 - h)) / (2.0 * h);
    outcome(
        worst <= 1e-12 && deriv.abs() <= 1e-7,
        format!("max |AF² − law| {worst:.1e} on 100 samples, d/dθ at π/6 {deriv:.1e}"),
    )
}

/// Height after rotating the top of an upright prism by `omega` with the
/// lateral edges (initially vertical, length `h`) kept rigid.
fn twisted_height(r: f64, omega: f64, h: f64) -> Option<f64> {
    let foot = Point3::new(r, 0.0, 0.0);
    let top = Point3::new(r * omega.cos(), r * omega.sin(), 0.0);
    let d2 = h * h - (top - foot).norm_squared();
    (d2 >= 0.0).then(|| d2.sqrt())
}

fn wunderlich_formula() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut worst_lit, mut worst_swap, mut imaginary) = (0.0f64, 0.0f64, 0);
    for _ in 0..200 {
        let r: f64 = rng.gen_range(0.5..2.0);
        let omega: f64 = rng.gen_range(0.0..FRAC_PI_3);
        let h: f64 = 2.0 * r * (omega / 2.0).sin() + rng.gen_range(0.2..3.0);
        let tw = twisted_height(r, omega, h).unwrap();
        // h untwisted, h' twisted
        match generators::wunderlich_height(r, omega, h) {
            Ok(x) => worst_lit = worst_lit.max((x - tw).abs()),
            Err(_) => imaginary += 1,
        }
        // h twisted, h' untwisted
        if let Ok(x) = generators::wunderlich_height(r, omega, tw) {
            worst_swap = worst_swap.max((x - h).abs());
        } else {
            imaginary += 1;
        }
    }
    let formula_ok = worst_lit <= 1e-9 && imaginary == 0;
    let mut worst_m: f64 = 0.0;
    let mut in_bounds = true;
    for k in 0..=100 {
        let r = 0.5 + k as f64 / 50.0;
        let omega = FRAC_PI_3 * k as f64 / 100.0;
        // chord midpoints: angle ω against the inscribed triangle's π/3 chord
        let mid = |a: f64| (Point3::new(r, 0.0, 0.0) + Point3::new(r * a.cos(), r * a.sin(), 0.0)).norm() / 2.0;
        let m = generators::overhang(r, omega);
        worst_m = worst_m.max((m - (mid(omega) - mid(FRAC_PI_3))).abs());
        in_bounds &= m >= -1e-15 && m <= 0.134 * r;
    }
    outcome(
        formula_ok && worst_m <= 1e-12 && in_bounds,
        format!(
            "height vs construction: max err {worst_lit:.3e} (swapped labels {worst_swap:.3e}), {imaginary} imaginary; overhang err {worst_m:.1e}, bounds {}",
            if in_bounds { "hold" } else { "violated" }
        ),
    )
}

fn kernel_counts() -> Outcome {
    let cube = generators::cube_with_flat_vertex();
    let cases = [
        ("octahedron", generators::octahedron_appendix_triangulation(), (0, 0), Some(0)),
        ("cube+flat", find_decomposition(&cube, 1_000_000).unwrap().triangulation().unwrap().clone(), (0, 1), None),
        ("octahedron+centroid", generators::octahedron_with_centroid(), (1, 0), Some(1)),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, t, (m, k), neg) in cases {
        let sp = spectrum(&assemble_mt(&t, FDScheme::central()).unwrap(), TOL_EIG);
        let c = t.census().unwrap();
        let want = 3 * m + k;
        let holds = kernel_count_check(&t, &sp, &c).unwrap();
        ok &= c.m == m && c.k == k && sp.zero == want && neg.is_none_or(|n| sp.negative == n) && holds;
        parts.push(format!("{name} (m={},k={}): kernel {} want {want}, negatives {}", c.m, c.k, sp.zero, sp.negative));
    }
    outcome(ok, parts.join("; "))
}

fn pushed_pair() -> Outcome {
    let opts = AnalysisOptions::default();
    let (convex, pushed) = generators::pushed_vertex_pair(generators::pushed_flat_depth()).unwrap();
    let c = analyze(&convex, None, &opts).unwrap();
    let p = analyze(&pushed, None, &opts).unwrap();
    let (Some(cs), Some(ps)) = (&c.stiffness, &p.stiffness) else {
        return outcome(false, "a member did not decompose");
    };
    let (cd, pd) = (c.deformation.as_ref().unwrap(), p.deformation.as_ref().unwrap());
    let convex_ok = cs.spectrum.positive == cs.spectrum.eigenvalues.len()
        && cs.verdict.kind == VerdictKind::Rigid
        && cd.verdict.kind == VerdictKind::Rigid;
    let pushed_ok = ps.spectrum.negative >= 1
        && ps.spectrum.zero >= 1
        && ps.verdict.kind == VerdictKind::Flexible
        && pd.verdict.kind == VerdictKind::Flexible;
    let small = ps.spectrum.eigenvalues.iter().fold(f64::INFINITY, |a, x| a.min(x.abs()));
    outcome(
        convex_ok && pushed_ok,
        format!(
            "convex: {} eigenvalues all positive = {}, {} / {}; pushed: {} negative, {} zero (|λ|min {small:.1e}), {} / {}",
            cs.spectrum.eigenvalues.len(),
            cs.spectrum.positive == cs.spectrum.eigenvalues.len(),
            cs.verdict.kind,
            cd.verdict.kind,
            ps.spectrum.negative,
            ps.spectrum.zero,
            ps.verdict.kind,
            pd.verdict.kind
        ),
    )
}

fn random_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<Point3> {
    (0..n).map(|_| Point3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

fn random_tetra(rng: &mut ChaCha8Rng) -> TetraLengths {
    loop {
        let p = random_points(rng, 4);
        let p = [p[0], p[1], p[2], p[3]];
        if shape_quality(&p) > 0.02 {
            return TetraLengths::from_points(&p).unwrap();
        }
    }
}

/// Volume over the cube of the longest edge.
fn shape_quality(p: &[Point3; 4]) -> f64 {
    let vol = (p[1] - p[0]).dot(&(p[2] - p[0]).cross(&(p[3] - p[0]))).abs() / 6.0;
    let longest =
        (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).map(|(i, j)| (p[i] - p[j]).norm()).fold(0.0, f64::max);
    vol / longest.powi(3)
}

fn well_shaped(t: &Triangulation) -> bool {
    t.tetrahedra().iter().all(|tet| shape_quality(&t.tetra_points(tet)) > 0.02)
}

/// Fan triangulations of random convex hulls with at least one interior edge.
fn random_triangulations(rng: &mut ChaCha8Rng, count: usize) -> Vec<Triangulation> {
    let mut out = Vec::new();
    while out.len() < count {
        let n = rng.gen_range(6..10);
        let Ok(hull) = convex_hull(&random_points(rng, n)) else { continue };
        let t = Triangulation::fan(&hull, 0);
        if !t.interior_edges().is_empty() && t.ensure_valid().is_ok() && well_shaped(&t) {
            out.push(t);
        }
    }
    out
}

fn ratio_ok(r: f64) -> bool {
    (3.5..=4.5).contains(&r)
}

fn identity_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let h = 1e-3;
    let (mut bad_s, mut rs) = (0, Vec::new());
    for _ in 0..50 {
        let l = random_tetra(&mut rng);
        let dir: [f64; 6] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let a = schlafli_residual(&l, &dir, h).unwrap().abs();
        let b = schlafli_residual(&l, &dir, h / 2.0).unwrap().abs();
        let r = a / b;
        bad_s += usize::from(!ratio_ok(r));
        rs.push(r);
    }
    let (mut bad_g, mut gs, mut kappa) = (0, Vec::new(), 0.0f64);
    let hg = 1e-3;
    for t in random_triangulations(&mut rng, 50) {
        let l = EdgeLengthAssignment::euclidean(&t);
        kappa = total_angles(&t, &l).unwrap().kappa.iter().fold(kappa, |a, k| a.max(k.abs()));
        // move off the Euclidean point so the gradient is not trivially zero
        let pert: Vec<f64> = l.interior.iter().map(|x| x * (1.0 + rng.gen_range(-0.01..0.01))).collect();
        let l = l.with_interior(pert);
        let a = he_gradient_check(&t, &l, hg).unwrap();
        let b = he_gradient_check(&t, &l, hg / 2.0).unwrap();
        let r = a / b;
        bad_g += usize::from(!ratio_ok(r));
        gs.push(r);
    }
    let span = |v: &[f64]| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        format!("[{lo:.3}, {hi:.3}]")
    };
    outcome(
        bad_s == 0 && bad_g == 0 && kappa <= 1e-9,
        format!(
            "Schläfli ratios {} ({bad_s} outside), gradient ratios {} ({bad_g} outside), max |κ| {kappa:.1e}",
            span(&rs),
            span(&gs)
        ),
    )
}

fn oracle_equivalence() -> Outcome {
    let opts = AnalysisOptions::default();
    let mut suite: Vec<(String, PolyhedralSurface, Option<Triangulation>)> = vec![
        ("octahedron".into(), generators::octahedron(), Some(generators::octahedron_appendix_triangulation())),
        ("octahedron (searched)".into(), generators::octahedron(), None),
        ("cube+flat".into(), generators::cube_with_flat_vertex(), None),
        ("bipyramid".into(), generators::triangular_bipyramid(), None),
        ("tetrahedron".into(), generators::regular_tetrahedron(), None),
    ];
    let (c, p) = generators::pushed_vertex_pair(generators::pushed_flat_depth()).unwrap();
    suite.push(("pushed-convex".into(), c, None));
    suite.push(("pushed".into(), p, None));
    for s in sample_range(0.0, 1.0, 0.1).unwrap() {
        if let Ok((t, _)) = generators::t_polyhedron(&generators::TPolyParams::shifted(s)) {
            suite.push((format!("t-poly {s:.1}"), t, None));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for k in 0..20 {
        if let Ok(h) = convex_hull(&random_points(&mut rng, 9)) {
            suite.push((format!("hull {k}"), h, None));
        }
    }
    let (mut compared, mut disagree) = (0, Vec::new());
    let (mut flexible, mut rigid) = (0, 0);
    for (name, s, t) in &suite {
        let rep = analyze(s, t.as_ref(), &opts).unwrap();
        let (Some(st), Some(census)) = (&rep.stiffness, &rep.census) else { continue };
        if census.m != 0 || st.verdict.kind == VerdictKind::Indeterminate {
            continue;
        }
        compared += 1;
        let dk = rep.deformation.as_ref().unwrap().verdict.kind;
        if dk == VerdictKind::Flexible {
            flexible += 1;
        } else {
            rigid += 1;
        }
        if st.verdict.kind != dk {
            disagree.push(format!("{name}: stiffness {} vs deformation {dk}", st.verdict.kind));
        }
    }
    outcome(
        disagree.is_empty() && compared > 0,
        format!(
            "{compared} of {} instances compared ({rigid} rigid, {flexible} flexible), {} disagreements{}",
            suite.len(),
            disagree.len(),
            if disagree.is_empty() { String::new() } else { format!(": {}", disagree.join("; ")) }
        ),
    )
}

fn witness_search() -> Outcome {
    let xs = sample_range(0.0, 1.0, 0.1).unwrap();
    let t = sweep("t-poly", SweepParam::Shift, &xs, &GenParams::default(), &AnalysisOptions::default()).unwrap();
    let complete = t.rows.iter().all(|r| r.weakly_convex.is_some() && r.decomposable.is_some() && r.flexible.is_some());
    let all_three = t.all_three.unwrap_or(usize::MAX);
    let naive = find_decomposition(&generators::t_polyhedron(&generators::TPolyParams::naive()).unwrap().0, 10_000_000)
        .unwrap();
    let naive_ok = naive.outcome == Decomposition::NonDecomposable;
    let shifted = generators::t_polyhedron(&generators::TPolyParams::shifted(0.3)).unwrap().0;
    let shifted_convex = rigidity_lab::geom::is_weakly_convex(&shifted).unwrap().all;
    let shifted_dec = matches!(find_decomposition(&shifted, 10_000_000).unwrap().outcome, Decomposition::Found(_));
    let triples: Vec<String> = t
        .rows
        .iter()
        .map(|r| {
            let b = |x: Option<bool>| match x {
                Some(true) => 'T',
                Some(false) => 'F',
                None => '?',
            };
            format!("{:.1}:{}{}{}", r.param, b(r.weakly_convex), b(r.decomposable), b(r.flexible))
        })
        .collect();
    outcome(
        complete && all_three == 0 && naive_ok && !shifted_convex,
        format!(
            "{} candidates, {all_three} with all three, naive {}, shift 0.3 weakly convex {shifted_convex} decomposable {shifted_dec}; (convex, decomposable, flexible) {}",
            t.rows.len(),
            if naive_ok { "NonDecomposable" } else { "decomposable" },
            triples.join(" ")
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

fn main() {
    let criteria: [Criterion; 11] = [
        ("appendix replication", appendix_replication, Some(Duration::from_secs(1))),
        ("Schönhardt flexibility", schonhardt_flexibility, Some(Duration::from_secs(5))),
        ("non-decomposability certificate", non_decomposability, Some(Duration::from_secs(1))),
        ("mode geometry", mode_geometry, None),
        ("diagonal law", diagonal_law, None),
        ("Wunderlich height and overhang", wunderlich_formula, None),
        ("kernel counts", kernel_counts, None),
        ("convex and pushed pair", pushed_pair, None),
        ("identity suites", identity_suites, None),
        ("oracle equivalence", oracle_equivalence, None),
        ("T-polyhedron witness search", witness_search, None),
    ];
    let mut passed = 0;
    for (k, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let in_time = limit.is_none_or(|l| took < l);
        let pass = out.pass && in_time;
        passed += usize::from(pass);
        let timing = match limit {
            Some(l) => format!("{:.3}s, limit {:.0}s", took.as_secs_f64(), l.as_secs_f64()),
            None => format!("{:.3}s", took.as_secs_f64()),
        };
        println!("[{}] {:>2} {name}: {} ({timing})", if pass { "PASS" } else { "FAIL" }, k + 1, out.detail);
    }
    println!("acceptance: {passed}/{} criteria pass", criteria.len());
    if passed < criteria.len() && std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
