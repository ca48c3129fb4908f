//! Verification suites. Each check reports what it measured against its
//! tolerance; `--tol NAME=VALUE` overrides the tolerance of check NAME.

use std::f64::consts::PI;

use clap::ValueEnum;
use lame_navier::geometry::{box_dimension, d_sum, whitney_decompose};
use lame_navier::lame::{apply_lame_operator, default_step, try_apply_lame_operator_fd, universal_displacement};
use lame_navier::operators::{
    asymptotic_growth_check, borel_pompeiu_rhs, cauchy_repr, jump, lame_cauchy_transform, verify_right_inverse,
    BoundaryData, LimitOptions, RIGHT_INVERSE_STEP,
};
use lame_navier::whitney::{lp_exponent, lp_norm_estimate};
use lame_navier::{
    extend, solve_jump_problem, ClosedFormField, Complex64, Curve, Domain, ExtendOptions, JumpMethod, LameParams,
    SolveOptions, WhitneyJet,
};
use serde::Serialize;

use crate::config::RunConfig;
use crate::{emit, CliError, Status};

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Identities,
    Inverse,
    #[value(name = "borel_pompeiu")]
    BorelPompeiu,
    Cauchy,
    Jumps,
    Fractal,
    Growth,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Inverse => "inverse",
            Suite::BorelPompeiu => "borel_pompeiu",
            Suite::Cauchy => "cauchy",
            Suite::Jumps => "jumps",
            Suite::Fractal => "fractal",
            Suite::Growth => "growth",
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq, Eq)]
enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

#[derive(Debug, Serialize)]
struct Check {
    name: String,
    /// The property being checked, stated as a formula.
    anchor: &'static str,
    measured: f64,
    tolerance: f64,
    relation: Relation,
    pass: bool,
    detail: Option<String>,
}

#[derive(Serialize)]
struct Report {
    suite: &'static str,
    lambda: f64,
    mu: f64,
    seed: u64,
    pass: bool,
    checks: Vec<Check>,
}

struct Checks<'a> {
    cfg: &'a RunConfig,
    list: Vec<Check>,
}

impl Checks<'_> {
    fn push(
        &mut self,
        name: impl Into<String>,
        anchor: &'static str,
        measured: f64,
        default_tol: f64,
        relation: Relation,
    ) -> &mut Check {
        let name = name.into();
        let tolerance = self.cfg.tol(&name, default_tol);
        let pass = match relation {
            Relation::AtMost => measured <= tolerance,
            Relation::AtLeast => measured >= tolerance,
        };
        self.list.push(Check { name, anchor, measured, tolerance, relation, pass, detail: None });
        self.list.last_mut().expect("just pushed")
    }

    fn at_most(&mut self, name: impl Into<String>, anchor: &'static str, measured: f64, tol: f64) -> &mut Check {
        self.push(name, anchor, measured, tol, Relation::AtMost)
    }

    fn at_least(&mut self, name: impl Into<String>, anchor: &'static str, measured: f64, tol: f64) -> &mut Check {
        self.push(name, anchor, measured, tol, Relation::AtLeast)
    }
}

type ScalarFn = fn(Complex64) -> Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn zero(_: Complex64) -> Complex64 {
    c(0.0, 0.0)
}

fn unit_circle(n: usize) -> Result<Curve, CliError> {
    Ok(Curve::circle(c(0.0, 0.0), 1.0, n)?)
}

/// `n` points of a golden-angle spiral filling the disk of radius `r`.
fn spiral(n: usize, r: f64) -> Vec<Complex64> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n).map(|k| Complex64::from_polar(r * ((k as f64 + 0.5) / n as f64).sqrt(), golden * k as f64)).collect()
}

fn universal_fields() -> Result<Vec<ClosedFormField>, CliError> {
    let exp = ClosedFormField::exp();
    let z2 = ClosedFormField::monomial(2, 0);
    let z3 = ClosedFormField::monomial(3, 0);
    Ok(vec![
        universal_displacement(c(1.0, 0.0), &z2)?,
        universal_displacement(c(0.0, 1.0), &exp)?,
        universal_displacement(c(0.5, -1.0), &z3)?,
        universal_displacement(c(2.0, 0.0), &ClosedFormField::constant(c(0.0, 0.0)))?,
        universal_displacement(c(0.0, 0.0), &z3.linear_combination(c(1.0, 0.0), &exp, c(1.0, 0.0)))?,
    ])
}

pub fn run(cfg: &RunConfig, suite: Suite) -> Result<Status, CliError> {
    let params = cfg.params()?;
    let mut checks = Checks { cfg, list: Vec::new() };
    match suite {
        Suite::Identities => identities(&mut checks, &params)?,
        Suite::Inverse => inverse(&mut checks, &params)?,
        Suite::BorelPompeiu => borel_pompeiu(&mut checks, &params)?,
        Suite::Cauchy => cauchy(&mut checks, &params)?,
        Suite::Jumps => jumps(&mut checks, &params)?,
        Suite::Fractal => fractal(&mut checks)?,
        Suite::Growth => growth(&mut checks, &params)?,
    }
    let pass = checks.list.iter().all(|k| k.pass);
    let report = Report {
        suite: suite.name(),
        lambda: params.lambda(),
        mu: params.mu(),
        seed: cfg.seed(),
        pass,
        checks: checks.list,
    };
    emit(cfg, &format!("verify_{}.json", suite.name()), &report)?;
    Ok(if pass { Status::Ok } else { Status::Failed })
}

fn identities(k: &mut Checks<'_>, params: &LameParams) -> Result<(), CliError> {
    let mut grid = vec![*params];
    for i in 0..10 {
        let mu = 10f64.powf(-1.0 + 2.0 * i as f64 / 9.0);
        for j in 0..10 {
            grid.push(LameParams::new(mu * (-0.6 + 10.6 * j as f64 / 9.0), mu)?);
        }
    }
    let unit = grid.iter().map(|p| (p.unit_identity() - 1.0).abs()).fold(0.0, f64::max);
    let cross = grid.iter().map(|p| p.cross_identity().abs()).fold(0.0, f64::max);
    k.at_most("unit_identity", "αα* − ββ* = 1", unit, 1e-12).detail = Some(format!("{} parameter pairs", grid.len()));
    k.at_most("cross_identity", "αβ* − βα* = 0", cross, 1e-12);

    let probes = [c(0.3, 0.2), c(-0.7, 0.4), c(1.5, -1.1), c(0.0, -2.0), c(-0.05, 0.01)];
    let sets = [*params, LameParams::new(3.0, 0.5)?, LameParams::new(-0.2, 1.0)?];
    let (mut exact, mut fd) = (0.0f64, 0.0f64);
    for p in &sets {
        for f in universal_fields()? {
            for &z in &probes {
                exact = exact.max(apply_lame_operator(p, &f, z)?.norm());
                let v = try_apply_lame_operator_fd(p, |w| Ok::<_, ()>(f.eval(w)), z, default_step(z))?
                    .map_err(|_| CliError::Input("field evaluation failed".into()))?;
                fd = fd.max(v.norm());
            }
        }
    }
    k.at_most("universal_kernel_exact", "L[A z + conj(φ(z))] = 0 for holomorphic φ", exact, 0.0);
    k.at_most("universal_kernel_fd", "L[A z + conj(φ(z))] = 0, finite differences", fd, 1e-6);
    Ok(())
}

fn inverse(k: &mut Checks<'_>, params: &LameParams) -> Result<(), CliError> {
    let curve = unit_circle(1024)?;
    let coarse = Domain::whitney(&curve, 8)?.cells();
    let fine = Domain::whitney(&curve, 10)?.cells();
    let one = |_: Complex64| c(1.0, 0.0);
    let id = |xi: Complex64| xi;
    let interior = [c(0.2, 0.1), c(-0.3, 0.25), c(0.0, -0.4)];
    let exterior = [c(2.0, 0.0), c(-1.5, 1.5), c(0.0, -3.0)];
    for (name, g) in [("one", &one as &(dyn Fn(Complex64) -> Complex64 + Sync)), ("xi", &id)] {
        let (mut r8, mut r10, mut rext) = (0.0f64, 0.0f64, 0.0f64);
        for &z in &interior {
            r8 = r8.max(verify_right_inverse(params, &coarse, &g, z, RIGHT_INVERSE_STEP)?);
            r10 = r10.max(verify_right_inverse(params, &fine, &g, z, RIGHT_INVERSE_STEP)?);
        }
        for &z in &exterior {
            rext = rext.max(verify_right_inverse(params, &fine, &g, z, RIGHT_INVERSE_STEP)?);
        }
        k.at_most(format!("right_inverse_depth8_{name}"), "L[T g] = g in Ω", r8, 5e-2);
        k.at_most(format!("right_inverse_depth10_{name}"), "L[T g] = g in Ω", r10, 5e-2);
        k.at_least(format!("right_inverse_gain_{name}"), "residual shrinks under refinement", r8 / r10, 2.0);
        k.at_most(format!("right_inverse_exterior_{name}"), "L[T g] = 0 outside Ω", rext, 5e-2);
    }
    Ok(())
}

fn borel_pompeiu(k: &mut Checks<'_>, params: &LameParams) -> Result<(), CliError> {
    let curve = unit_circle(1 << 12)?;
    let cells = Domain::whitney(&curve, 8)?.cells();
    let probes = spiral(20, 0.8);
    for (name, f) in [
        ("z", ClosedFormField::monomial(1, 0)),
        ("zbar2", ClosedFormField::monomial(0, 2)),
        ("abs_z2", ClosedFormField::monomial(1, 1)),
        ("z2_zbar", ClosedFormField::monomial(2, 1)),
    ] {
        let mut e = 0.0f64;
        for &z in &probes {
            e = e.max((borel_pompeiu_rhs(params, &cells, &f, z)? - f.eval(z)).norm());
        }
        k.at_most(format!("borel_pompeiu_{name}"), "f = boundary terms + T[L f] in Ω", e, 1e-2);
    }
    Ok(())
}

fn cauchy(k: &mut Checks<'_>, params: &LameParams) -> Result<(), CliError> {
    for (name, curve, probes) in
        [("circle", unit_circle(1024)?, spiral(10, 0.8)), ("koch4", Curve::koch_snowflake(4, 3.0)?, spiral(10, 0.6))]
    {
        let mut e = 0.0f64;
        for f in universal_fields()? {
            let data = BoundaryData::from_field(&curve, &f)?;
            for &z in &probes {
                e = e.max((cauchy_repr(params, &curve, &data, z)? - f.eval(z)).norm());
            }
        }
        k.at_most(format!("cauchy_reproduction_{name}"), "f = boundary terms in Ω when L f = 0", e, 1e-3);
    }
    Ok(())
}

fn jumps(k: &mut Checks<'_>, params: &LameParams) -> Result<(), CliError> {
    let curve = unit_circle(1024)?;
    let jets: [(&str, ScalarFn, ScalarFn); 3] =
        [("one", |_| c(1.0, 0.0), |_| c(0.0, 0.0)), ("z", |t| t, |_| c(1.0, 0.0)), ("z2", |t| t * t, |t| 2.0 * t)];
    let segments: Vec<usize> = (0..8).map(|s| s * 128 + 5).collect();
    let opts = LimitOptions::default();
    for (name, f, df) in jets {
        let jet = WhitneyJet::from_functions(&curve, f, df, zero, 0.9)?;
        let sol = solve_jump_problem(params, &jet, JumpMethod::CauchyTransform, &SolveOptions::default())?;
        let (mut e0, mut e1) = (0.0f64, 0.0f64);
        for &s in &segments {
            let t = curve.segment_midpoint(s);
            e0 = e0.max((jump(|z| sol.field(z), &curve, s, &opts)? - f(t)).norm());
            e1 = e1.max((jump(|z| sol.dz_field(z), &curve, s, &opts)? - df(t)).norm());
        }
        k.at_most(format!("jump_f0_{name}"), "F⁺ − F⁻ = f0 on γ", e0, 1e-2).detail = Some("8 probes".into());
        k.at_most(format!("jump_f1_{name}"), "(∂z F)⁺ − (∂z F)⁻ = f1 on γ", e1, 5e-2).detail = Some("8 probes".into());
    }
    let constant = WhitneyJet::constant(&curve, c(1.0, 0.0), 0.5)?;
    let mut e = 0.0f64;
    for z in [c(0.0, 0.0), c(0.4, -0.3), c(-0.6, 0.1)] {
        e = e.max((lame_cauchy_transform(params, &constant, z)? - 1.0).norm());
    }
    for z in [c(2.0, 0.0), c(-1.5, 1.5), c(0.0, 5.0)] {
        e = e.max(lame_cauchy_transform(params, &constant, z)?.norm());
    }
    k.at_most("transform_of_constant_jet", "C^L{1,0,0} = 1 in Ω, 0 outside", e, 1e-4);
    Ok(())
}

fn fractal(k: &mut Checks<'_>) -> Result<(), CliError> {
    let koch6 = Curve::koch_snowflake(6, 1.0)?;
    let fit = box_dimension(&koch6, 3f64.powi(-5), 1.0 / 3.0)?;
    k.at_most("box_dimension_koch6", "box dimension of the Koch curve = ln 4/ln 3", (fit.slope - 1.26).abs(), 0.05)
        .detail = Some(format!("slope {:.4}", fit.slope));

    let decomps = [8, 10, 12].map(|depth| whitney_decompose(&koch6, depth));
    let decomps: Vec<_> = decomps.into_iter().collect::<Result<_, _>>()?;
    for (d, name) in [(1.5, "d_sum_shrink_d1.5"), (1.1, "d_sum_no_shrink_d1.1")] {
        let s: Vec<f64> = decomps.iter().map(|dec| d_sum(dec, d)).collect();
        let (i1, i2) = (s[1] - s[0], s[2] - s[1]);
        // depths 8, 10, 12 are two levels apart
        let per_level = (i2 / i1).sqrt();
        let detail = Some(format!("increments 8→10 {i1:.4}, 10→12 {i2:.4}"));
        if d > 1.3 {
            k.at_most(name, "Σ|Q|^d over Whitney squares converges for d > dim γ", per_level, 0.5).detail = detail;
        } else {
            k.at_least(name, "Σ|Q|^d over Whitney squares diverges for d < dim γ", per_level, 1.0).detail = detail;
        }
    }

    let mut mismatches = 0.0;
    for i in 0..=50 {
        let d = 1.0 + (i as f64 + 0.5) / 51.0;
        for j in 1..100 {
            let nu = j as f64 / 100.0;
            if (nu - d / 2.0).abs() > 1e-12 && (lp_exponent(d, nu) > 2.0) != (nu > d / 2.0) {
                mismatches += 1.0;
            }
        }
    }
    k.at_most("p_exceeds_two_iff_nu_exceeds_half_d", "p = (2−d)/(1−ν) > 2 ⇔ ν > d/2", mismatches, 0.0);

    for (name, curve, nu, p) in [
        ("lp_stability_circle", unit_circle(1024)?, 0.9, 3.0),
        ("lp_stability_koch5", Curve::koch_snowflake(5, 1.0)?, 0.8, lp_exponent(1.3, 0.8)),
    ] {
        let jet = WhitneyJet::from_functions(&curve, |t| t * t, |t| 2.0 * t, zero, nu)?;
        let ext = extend(&jet, ExtendOptions::default())?;
        let l8 = lp_norm_estimate(&ext, &whitney_decompose(&curve, 8)?, p)?.total;
        let l10 = lp_norm_estimate(&ext, &whitney_decompose(&curve, 10)?, p)?.total;
        k.at_most(name, "‖L f̃‖_p^p finite for p = (2−d)/(1−ν)", (l10 - l8).abs() / l10, 0.1).detail =
            Some(format!("p {p:.3}: depth 8 {l8:.6e}, depth 10 {l10:.6e}"));
    }
    Ok(())
}

fn growth(k: &mut Checks<'_>, params: &LameParams) -> Result<(), CliError> {
    let curve = unit_circle(1024)?;
    let radii = [10.0, 100.0, 1000.0];
    let constant = WhitneyJet::constant(&curve, c(1.0, 0.0), 0.5)?;
    let square = WhitneyJet::from_functions(&curve, |t| t * t, |t| 2.0 * t, zero, 0.9)?;
    for (name, jet) in [("one", constant), ("z2", square)] {
        let sol = solve_jump_problem(params, &jet, JumpMethod::CauchyTransform, &SolveOptions::default())?;
        let g = asymptotic_growth_check(&sol, &radii)?;
        let spread = g.ratios.iter().fold(0.0, |m: f64, &r| m.max(r)) / g.ratios[0].max(f64::MIN_POSITIVE);
        k.at_most(
            format!("log_growth_{name}"),
            "F(z) = O(ln|z|) as z → ∞",
            if g.ratios[0] == 0.0 { 0.0 } else { spread },
            2.0,
        )
        .detail = Some(format!("max|F|/ln R = {:?}", g.ratios));
        k.at_most(format!("dz_at_r100_{name}"), "∂z F(z) → 0 as z → ∞", g.max_dz[1], 1e-2).detail =
            Some(format!("max|∂z F| on R = {radii:?}: {:?}", g.max_dz));
    }
    Ok(())
}
