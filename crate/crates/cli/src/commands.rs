use lame_navier::geometry::{box_dimension, whitney_decompose};
use lame_navier::io::{load_jet, save_decomposition, save_field, save_jet, save_polyline, write_jet};
use lame_navier::operators::{
    asymptotic_growth_check, default_dimension, jump, FieldOnGrid, LimitOptions, OperatorError, Provenance, RegionTag,
};
use lame_navier::{
    check_jet, solve_jump_problem, teodorescu as teodorescu_at, Complex64, Curve, CurveKind, Domain, JumpMethod,
    LameCauchyTransform, SolveOptions, WhitneyJet,
};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{parse_field, RunConfig};
use crate::{emit, CliError, Status};

/// Boundary segments probed by `solve`.
const JUMP_PROBES: usize = 16;
const DEFAULT_DEPTH: u32 = 10;

fn cx(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

#[derive(Serialize)]
struct CurveInfo {
    spec: String,
    kind: &'static str,
    vertices: usize,
    perimeter: f64,
    signed_area: f64,
    radius: f64,
    min_segment: f64,
    max_segment: f64,
}

impl CurveInfo {
    fn new(cfg: &RunConfig, curve: &Curve) -> Self {
        Self {
            spec: cfg.curve_label(),
            kind: match curve.kind() {
                CurveKind::Circle { .. } => "circle",
                CurveKind::Koch { .. } => "koch",
                CurveKind::Polyline => "polyline",
            },
            vertices: curve.vertices().len(),
            perimeter: curve.perimeter(),
            signed_area: curve.signed_area(),
            radius: curve.radius(),
            min_segment: curve.min_segment_length(),
            max_segment: curve.max_segment_length(),
        }
    }
}

fn out_path(cfg: &RunConfig, name: &str) -> Option<String> {
    cfg.out.as_ref().map(|d| d.join(name).display().to_string())
}

#[derive(Serialize)]
struct DSumRow {
    depth: u32,
    squares: usize,
    sum: f64,
    increment: f64,
    /// This level's increment over the previous level's, when that was nonzero.
    ratio: Option<f64>,
}

#[derive(Serialize)]
struct BoxFit {
    slope: f64,
    tau_min: f64,
    tau_max: f64,
    taus: Vec<f64>,
    counts: Vec<usize>,
}

#[derive(Serialize)]
struct GeometryReport {
    curve: CurveInfo,
    depth: u32,
    accepted_squares: usize,
    residual_squares: usize,
    covered_area: f64,
    box_dimension: Option<BoxFit>,
    box_dimension_note: Option<String>,
    d: f64,
    /// Partial d-sums over the accepted squares of depth ≤ k.
    d_sum: Vec<DSumRow>,
    polyline_csv: Option<String>,
    decomposition_csv: Option<String>,
}

pub fn geometry(cfg: &RunConfig) -> Result<Status, CliError> {
    let curve = cfg.curve()?;
    let depth = cfg.depth.unwrap_or(DEFAULT_DEPTH);
    let decomp = whitney_decompose(&curve, depth)?;
    let d = cfg.d.unwrap_or_else(|| default_dimension(&curve));

    let diam = decomp.root().diameter();
    let mut rows = Vec::new();
    let (mut sum, mut prev) = (0.0, None::<f64>);
    for (k, &count) in decomp.level_counts().iter().enumerate() {
        let increment = count as f64 * (diam / (1u64 << k) as f64).powf(d);
        sum += increment;
        let ratio = prev.filter(|&p| p > 0.0).map(|p| increment / p);
        rows.push(DSumRow { depth: k as u32, squares: count, sum, increment, ratio });
        prev = Some(increment);
    }

    let (tau_min, tau_max) = (3.0 * curve.min_segment_length(), curve.nominal_diameter() / 3.0);
    let (fit, note) = match box_dimension(&curve, tau_min, tau_max) {
        Ok(f) => (Some(BoxFit { slope: f.slope, tau_min, tau_max, taus: f.taus, counts: f.counts }), None),
        Err(e) => (None, Some(e.to_string())),
    };

    if let Some(dir) = &cfg.out {
        save_polyline(&curve, dir.join("polyline.csv"))?;
        save_decomposition(&decomp, dir.join("decomposition.csv"))?;
    }
    let report = GeometryReport {
        curve: CurveInfo::new(cfg, &curve),
        depth,
        accepted_squares: decomp.squares().len(),
        residual_squares: decomp.residual().len(),
        covered_area: decomp.covered_area(),
        box_dimension: fit,
        box_dimension_note: note,
        d,
        d_sum: rows,
        polyline_csv: out_path(cfg, "polyline.csv"),
        decomposition_csv: out_path(cfg, "decomposition.csv"),
    };
    emit(cfg, "geometry.json", &report)?;
    Ok(Status::Ok)
}

/// The jet from `--jet FILE` or `--field SPEC` on `curve`.
fn jet_on(cfg: &RunConfig, curve: &Curve) -> Result<WhitneyJet, CliError> {
    match (&cfg.jet, &cfg.field) {
        (Some(path), None) => Ok(load_jet(curve, path, cfg.nu(), None)?),
        (None, Some(spec)) => Ok(WhitneyJet::from_field(curve, &parse_field(spec)?, cfg.nu())?),
        (Some(_), Some(_)) => Err(CliError::Input("give either a jet file or a field, not both".into())),
        (None, None) => Err(CliError::Input("a jet is needed: pass --jet FILE or --field SPEC".into())),
    }
}

#[derive(Serialize)]
struct JetMade {
    curve: CurveInfo,
    nu: f64,
    lip_constant: f64,
    jet_csv: Option<String>,
}

pub fn jet_make(cfg: &RunConfig) -> Result<Status, CliError> {
    if cfg.field.is_none() {
        return Err(CliError::Input("jet make needs --field SPEC".into()));
    }
    let curve = cfg.curve()?;
    let jet = jet_on(cfg, &curve)?;
    match &cfg.out {
        Some(dir) => {
            save_jet(&jet, dir.join("jet.csv"))?;
            let report = JetMade {
                curve: CurveInfo::new(cfg, &curve),
                nu: jet.nu(),
                lip_constant: jet.lip_constant(),
                jet_csv: out_path(cfg, "jet.csv"),
            };
            emit(cfg, "jet.json", &report)?;
        }
        None => write_jet(&jet, std::io::stdout().lock())?,
    }
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct JetCheck {
    curve: CurveInfo,
    nu: f64,
    valid: bool,
    smallest_c: f64,
    c_taylor: f64,
    c_f1: f64,
    c_f2: f64,
    c_fine: f64,
    c_coarse: Option<f64>,
    scale_divergent: bool,
    lip_constant: f64,
    worst_pair: Option<([f64; 2], [f64; 2])>,
    pairs_checked: usize,
    sampled: bool,
}

pub fn jet_check(cfg: &RunConfig) -> Result<Status, CliError> {
    let curve = cfg.curve()?;
    let jet = jet_on(cfg, &curve)?;
    let r = check_jet(&jet);
    let v = curve.vertices();
    let report = JetCheck {
        curve: CurveInfo::new(cfg, &curve),
        nu: jet.nu(),
        valid: r.valid,
        smallest_c: r.smallest_c,
        c_taylor: r.c_taylor,
        c_f1: r.c_f1,
        c_f2: r.c_f2,
        c_fine: r.c_fine,
        c_coarse: r.c_coarse,
        scale_divergent: r.scale_divergent,
        lip_constant: r.lip_constant,
        worst_pair: r.worst_pair.map(|(a, b)| (cx(v[a]), cx(v[b]))),
        pairs_checked: r.pairs_checked,
        sampled: r.sampled,
    };
    emit(cfg, "jet_check.json", &report)?;
    Ok(if r.valid { Status::Ok } else { Status::Failed })
}

/// Grid over the curve's surroundings, minus the points too close to it.
fn grid_points(cfg: &RunConfig, curve: &Curve) -> Vec<Complex64> {
    let (nx, ny) = cfg.grid();
    let c = curve.bbox_center();
    let r = 1.5 * curve.radius();
    let lattice = FieldOnGrid::lattice(c - Complex64::new(r, r), c + Complex64::new(r, r), nx, ny);
    FieldOnGrid::clear_of(curve, lattice, 4.0 * curve.max_segment_length())
}

#[derive(Serialize)]
struct GridSummary {
    grid: [usize; 2],
    points: usize,
    inside: usize,
    outside: usize,
    max_abs_inside: f64,
    max_abs_outside: f64,
    csv: Option<String>,
}

fn summarise(cfg: &RunConfig, field: &FieldOnGrid, csv: &str) -> Result<GridSummary, CliError> {
    if let Some(dir) = &cfg.out {
        save_field(field, dir.join(csv))?;
    }
    let (nx, ny) = cfg.grid();
    let max_in = |tag| {
        field.regions.iter().zip(&field.values).filter(|(r, _)| **r == tag).map(|(_, v)| v.norm()).fold(0.0, f64::max)
    };
    let inside = field.regions.iter().filter(|&&r| r == RegionTag::Inside).count();
    Ok(GridSummary {
        grid: [nx, ny],
        points: field.points.len(),
        inside,
        outside: field.points.len() - inside,
        max_abs_inside: max_in(RegionTag::Inside),
        max_abs_outside: max_in(RegionTag::Outside),
        csv: out_path(cfg, csv),
    })
}

#[derive(Serialize)]
struct TeodorescuReport {
    curve: CurveInfo,
    lambda: f64,
    mu: f64,
    density: String,
    depth: u32,
    cells: usize,
    field: GridSummary,
}

pub fn teodorescu(cfg: &RunConfig) -> Result<Status, CliError> {
    let params = cfg.params()?;
    let curve = cfg.curve()?;
    let spec = cfg.density.clone().unwrap_or_else(|| "const:1".into());
    let g = parse_field(&spec)?;
    let depth = cfg.depth.unwrap_or(DEFAULT_DEPTH);
    let cells = Domain::whitney(&curve, depth)?.cells();
    let density = cells.tabulate(|xi| g.eval(xi));
    let field = FieldOnGrid::evaluate(&curve, grid_points(cfg, &curve), Provenance::Teodorescu, |z| {
        teodorescu_at(&params, &cells, &density, z)
    })?;
    let report = TeodorescuReport {
        curve: CurveInfo::new(cfg, &curve),
        lambda: params.lambda(),
        mu: params.mu(),
        density: spec,
        depth,
        cells: cells.len(),
        field: summarise(cfg, &field, "teodorescu.csv")?,
    };
    emit(cfg, "teodorescu.json", &report)?;
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct TransformReport {
    curve: CurveInfo,
    lambda: f64,
    mu: f64,
    nu: f64,
    field: GridSummary,
}

pub fn cauchy_transform(cfg: &RunConfig) -> Result<Status, CliError> {
    let params = cfg.params()?;
    let curve = cfg.curve()?;
    let jet = jet_on(cfg, &curve)?;
    let tr = LameCauchyTransform::new(&params, &jet)?;
    let field = FieldOnGrid::evaluate(&curve, grid_points(cfg, &curve), Provenance::LameCauchy, |z| tr.eval(z))?;
    let report = TransformReport {
        curve: CurveInfo::new(cfg, &curve),
        lambda: params.lambda(),
        mu: params.mu(),
        nu: jet.nu(),
        field: summarise(cfg, &field, "cauchy_transform.csv")?,
    };
    emit(cfg, "cauchy_transform.json", &report)?;
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct JumpProbe {
    segment: usize,
    t: [f64; 2],
    f0_residual: f64,
    f1_residual: Option<f64>,
}

#[derive(Serialize)]
struct JumpSummary {
    seed: u64,
    probes: Vec<JumpProbe>,
    /// Segments whose probes would come closer to the curve than the
    /// quadrature resolves, cross the curve, or whose limit did not settle.
    skipped: Vec<(usize, String)>,
    max_f0_residual: Option<f64>,
    max_f1_residual: Option<f64>,
}

#[derive(Serialize)]
struct Growth {
    radii: Vec<f64>,
    max_abs: Vec<f64>,
    ratios: Vec<f64>,
    max_dz: Vec<f64>,
    bounded: bool,
    dz_decays: bool,
}

#[derive(Serialize)]
struct CertificateInfo {
    d: f64,
    nu: f64,
    p: f64,
    certified: bool,
}

#[derive(Serialize)]
struct SolveReport {
    curve: CurveInfo,
    lambda: f64,
    mu: f64,
    method: &'static str,
    certificate: CertificateInfo,
    warning: Option<String>,
    jump: JumpSummary,
    growth: Growth,
    field: GridSummary,
}

pub fn solve(cfg: &RunConfig) -> Result<Status, CliError> {
    let params = cfg.params()?;
    let curve = cfg.curve()?;
    let method = match cfg.method.as_deref().unwrap_or("cauchy") {
        "cauchy" | "cauchy_transform" => JumpMethod::CauchyTransform,
        "whitney" | "whitney_teodorescu" => JumpMethod::WhitneyTeodorescu,
        other => return Err(CliError::Input(format!("unknown method {other:?}; use cauchy or whitney"))),
    };
    let jet = jet_on(cfg, &curve)?;
    let options = SolveOptions { area_depth: cfg.depth.unwrap_or(DEFAULT_DEPTH), d: cfg.d, ..SolveOptions::default() };
    let sol = solve_jump_problem(&params, &jet, method, &options)?;
    if let Some(w) = sol.warning() {
        eprintln!("warning: {w}");
    }

    // jumps at seeded boundary segments, against the jet's segment midpoint values
    let n = curve.n_segments();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed());
    let mut segments = sample(&mut rng, n, JUMP_PROBES.min(n)).into_vec();
    segments.sort_unstable();
    let clearance = sol.finest_cell().map_or(0.0, |h| 3.0 * h);
    let limit = LimitOptions::default();
    let (mut probes, mut skipped) = (Vec::new(), Vec::new());
    for s in segments {
        let (a, b) = curve.segment(s);
        if LimitOptions::SEGMENT_FACTOR * (b - a).norm() / 4.0 < clearance {
            skipped.push((s, "probe closer than three area cells".to_owned()));
            continue;
        }
        let mid = |f: &[Complex64]| (f[s] + f[(s + 1) % n]) / 2.0;
        let j0 = match jump(|z| sol.field(z), &curve, s, &limit) {
            Ok(j) => j,
            Err(e @ (OperatorError::ProbeCrossesCurve { .. } | OperatorError::NonConvergent { .. })) => {
                skipped.push((s, e.to_string()));
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let f1_residual = match method {
            JumpMethod::CauchyTransform => Some((jump(|z| sol.dz_field(z), &curve, s, &limit)? - mid(jet.f1())).norm()),
            JumpMethod::WhitneyTeodorescu => None,
        };
        probes.push(JumpProbe {
            segment: s,
            t: cx(curve.segment_midpoint(s)),
            f0_residual: (j0 - mid(jet.f0())).norm(),
            f1_residual,
        });
    }
    let max = |it: &mut dyn Iterator<Item = f64>| it.fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.max(x))));
    let max_f0_residual = max(&mut probes.iter().map(|p| p.f0_residual));
    let max_f1_residual = max(&mut probes.iter().filter_map(|p| p.f1_residual));

    let r0 = 10.0 * curve.radius().max(1.0);
    let g = asymptotic_growth_check(&sol, &[r0, 10.0 * r0, 100.0 * r0])?;
    let field = FieldOnGrid::evaluate(&curve, grid_points(cfg, &curve), Provenance::JumpSolution, |z| sol.field(z))?;
    let c = sol.certificate();
    let report = SolveReport {
        curve: CurveInfo::new(cfg, &curve),
        lambda: params.lambda(),
        mu: params.mu(),
        method: method.as_str(),
        certificate: CertificateInfo { d: c.d, nu: c.nu, p: c.p, certified: c.certified },
        warning: sol.warning(),
        jump: JumpSummary { seed: cfg.seed(), probes, skipped, max_f0_residual, max_f1_residual },
        growth: Growth {
            radii: g.radii,
            max_abs: g.max_abs,
            ratios: g.ratios,
            max_dz: g.max_dz,
            bounded: g.bounded,
            dz_decays: g.dz_decays,
        },
        field: summarise(cfg, &field, "field.csv")?,
    };
    emit(cfg, "residuals.json", &report)?;
    Ok(Status::Ok)
}
