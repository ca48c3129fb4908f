//! The jump problem `F⁺ - F⁻ = f0`, `[∂_z F]⁺ - [∂_z F]⁻ = f1`, with `L F = 0`
//! off the curve.

use std::sync::Arc;

use num_complex::Complex64;

use super::{off_curve, teodorescu, teodorescu_dz, LameCauchyTransform, OperatorError};
use crate::geometry::{Curve, CurveKind, Location};
use crate::lame::{try_apply_lame_operator_fd, LameParams};
use crate::quadrature::{AreaCells, Domain, Tabulated};
use crate::whitney::{check_jet, extend, lp_exponent, ExtendOptions, Extension, WhitneyJet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JumpMethod {
    /// `F = C^L f`.
    CauchyTransform,
    /// `F = χ_Ω f̃ - T[L f̃]` with `f̃` the Whitney extension.
    WhitneyTeodorescu,
}

impl JumpMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            JumpMethod::CauchyTransform => "cauchy_transform",
            JumpMethod::WhitneyTeodorescu => "whitney_teodorescu",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub extend: ExtendOptions,
    /// Depth of the interior decomposition carrying `T[L f̃]`.
    pub area_depth: u32,
    /// Summability exponent of the curve; `None` uses [`default_dimension`].
    pub d: Option<f64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { extend: ExtendOptions::default(), area_depth: 10, d: None }
    }
}

/// Summability exponent assumed when none is given: just above the box
/// dimension `ln 4/ln 3` for Koch curves, just above 1 for rectifiable ones.
pub fn default_dimension(curve: &Curve) -> f64 {
    match curve.kind() {
        CurveKind::Koch { .. } => 4f64.ln() / 3f64.ln() + 0.01,
        _ => 1.01,
    }
}

/// Whether `ν > d/2`, i.e. `p = (2-d)/(1-ν) > 2`, so that `L f̃ ∈ L^p` with `p > 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    pub d: f64,
    pub nu: f64,
    pub p: f64,
    pub certified: bool,
}

impl Certificate {
    pub fn new(d: f64, nu: f64) -> Self {
        Self { d, nu, p: lp_exponent(d, nu), certified: nu > d / 2.0 }
    }
}

/// Samples per Whitney-square side when averaging `L f̃` over a cell. The
/// blending bands are an eighth of a side wide, so this puts sixteen in each,
/// enough for the midpoint rule to resolve the smooth step to about 1e-3.
const BAND_SAMPLES: f64 = 128.0;
const MAX_CELL_SAMPLES: usize = 128;

type BoxedDensity = Box<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

enum Method {
    Cauchy(LameCauchyTransform),
    Whitney { ext: Extension, cells: AreaCells, density: Tabulated<BoxedDensity> },
}

/// A solution of the jump problem, evaluable anywhere off the curve.
#[derive(Clone)]
pub struct JumpProblemSolution {
    params: LameParams,
    jet: WhitneyJet,
    method: JumpMethod,
    certificate: Certificate,
    inner: Arc<Method>,
}

impl std::fmt::Debug for JumpProblemSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("JumpProblemSolution")
            .field("params", &self.params)
            .field("method", &self.method)
            .field("certificate", &self.certificate)
            .finish()
    }
}

/// Solves the jump problem for `jet`. A missing certificate (`ν ≤ d/2`) is
/// reported through [`JumpProblemSolution::warning`], not as an error.
pub fn solve_jump_problem(
    params: &LameParams,
    jet: &WhitneyJet,
    method: JumpMethod,
    options: &SolveOptions,
) -> Result<JumpProblemSolution, OperatorError> {
    let report = check_jet(jet);
    if !report.valid {
        return Err(OperatorError::JetInvalid {
            smallest_c: report.smallest_c,
            lip_constant: report.lip_constant,
            scale_divergent: report.scale_divergent,
        });
    }
    let d = options.d.unwrap_or_else(|| default_dimension(jet.curve()));
    if !(d > 1.0 && d < 2.0) {
        return Err(OperatorError::InvalidArgument(format!("d must lie in (1, 2), got {d}")));
    }
    let certificate = Certificate::new(d, jet.nu());
    let inner = match method {
        JumpMethod::CauchyTransform => Method::Cauchy(LameCauchyTransform::new_unchecked(params, jet)),
        JumpMethod::WhitneyTeodorescu => {
            let ext = extend(jet, options.extend)?;
            let cells = Domain::whitney(jet.curve(), options.area_depth)?.cells();
            let (e, p) = (ext.clone(), *params);
            let avg = ext.clone();
            let density = cells.tabulate_by_cell(Box::new(move |xi| e.lame(&p, xi)) as BoxedDensity, |cell| {
                avg.cell_average_lame(&p, cell.center, cell.half, BAND_SAMPLES, MAX_CELL_SAMPLES)
            });
            Method::Whitney { ext, cells, density }
        }
    };
    Ok(JumpProblemSolution { params: *params, jet: jet.clone(), method, certificate, inner: Arc::new(inner) })
}

impl JumpProblemSolution {
    pub fn params(&self) -> &LameParams {
        &self.params
    }
    pub fn jet(&self) -> &WhitneyJet {
        &self.jet
    }
    pub fn curve(&self) -> &Curve {
        self.jet.curve()
    }
    pub fn method(&self) -> JumpMethod {
        self.method
    }
    pub fn certificate(&self) -> Certificate {
        self.certificate
    }

    /// Set when `ν ≤ d/2`: the solution is still computed, but `L f̃ ∈ L^p`
    /// with `p > 2` is not guaranteed.
    pub fn warning(&self) -> Option<String> {
        let c = self.certificate;
        (!c.certified)
            .then(|| format!("certificate unavailable: nu = {} <= d/2 = {} (p = {:.4})", c.nu, c.d / 2.0, c.p))
    }

    /// The Whitney extension behind the solution, for the second method.
    pub fn extension(&self) -> Option<&Extension> {
        match &*self.inner {
            Method::Whitney { ext, .. } => Some(ext),
            Method::Cauchy(_) => None,
        }
    }

    /// Side length of the smallest area cell, for the second method.
    pub fn finest_cell(&self) -> Option<f64> {
        match &*self.inner {
            Method::Whitney { cells, .. } => Some(cells.min_cell_side()),
            Method::Cauchy(_) => None,
        }
    }

    pub fn field(&self, z: Complex64) -> Result<Complex64, OperatorError> {
        match &*self.inner {
            Method::Cauchy(t) => t.eval(z),
            Method::Whitney { ext, cells, density } => {
                off_curve(self.curve(), z)?;
                let t = teodorescu(&self.params, cells, density, z)?;
                Ok(match self.curve().contains(z) {
                    Location::Inside => ext.eval(z) - t,
                    _ => -t,
                })
            }
        }
    }

    pub fn dz_field(&self, z: Complex64) -> Result<Complex64, OperatorError> {
        match &*self.inner {
            Method::Cauchy(t) => t.dz(z),
            Method::Whitney { ext, cells, density } => {
                off_curve(self.curve(), z)?;
                let t = teodorescu_dz(&self.params, cells, density, z)?;
                Ok(match self.curve().contains(z) {
                    Location::Inside => ext.dz(z) - t,
                    _ => -t,
                })
            }
        }
    }

    /// `|L F(z)|` by finite differences of step `h`; the stencil must stay on
    /// one side of the curve.
    pub fn lame_residual(&self, z: Complex64, h: f64) -> Result<f64, OperatorError> {
        let needed = 3.0 * h;
        if !self.curve().is_farther_than(z, needed) {
            return Err(OperatorError::StencilOutOfDomain { center: z, distance: self.curve().distance(z), needed });
        }
        Ok(try_apply_lame_operator_fd(&self.params, |w| self.field(w), z, h)??.norm())
    }
}

/// Growth of a solution along circles about the curve's centre.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthReport {
    pub radii: Vec<f64>,
    /// `max_{|z-c|=R} |F(z)|`.
    pub max_abs: Vec<f64>,
    /// `max |F| / ln R`.
    pub ratios: Vec<f64>,
    /// `max_{|z-c|=R} |∂_z F(z)|`.
    pub max_dz: Vec<f64>,
    /// Every ratio is at most twice the first.
    pub bounded: bool,
    /// `max |∂_z F|` does not increase with `R`.
    pub dz_decays: bool,
}

/// Samples per circle in [`asymptotic_growth_check`].
pub const GROWTH_SAMPLES: usize = 64;

/// Checks `F = O(ln|z|)` and `∂_z F → 0` on circles of the given radii.
pub fn asymptotic_growth_check(solution: &JumpProblemSolution, radii: &[f64]) -> Result<GrowthReport, OperatorError> {
    if radii.is_empty() || radii.windows(2).any(|w| w[1] <= w[0]) || radii[0] <= 1.0 {
        return Err(OperatorError::InvalidArgument("radii must be increasing and larger than 1".into()));
    }
    let curve = solution.curve();
    let c = curve.bbox_center();
    if radii[0] <= curve.radius() {
        return Err(OperatorError::InvalidArgument(format!(
            "radius {} does not clear the curve (radius {})",
            radii[0],
            curve.radius()
        )));
    }
    let mut max_abs = Vec::new();
    let mut max_dz = Vec::new();
    for &r in radii {
        let (mut a, mut d) = (0.0f64, 0.0f64);
        for k in 0..GROWTH_SAMPLES {
            let z = c + Complex64::from_polar(r, std::f64::consts::TAU * k as f64 / GROWTH_SAMPLES as f64);
            a = a.max(solution.field(z)?.norm());
            d = d.max(solution.dz_field(z)?.norm());
        }
        max_abs.push(a);
        max_dz.push(d);
    }
    let ratios: Vec<f64> = radii.iter().zip(&max_abs).map(|(r, a)| a / r.ln()).collect();
    let bounded = ratios.iter().all(|&q| q <= 2.0 * ratios[0] + 1e-12);
    let dz_decays = max_dz.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-15);
    Ok(GrowthReport { radii: radii.to_vec(), max_abs, ratios, max_dz, bounded, dz_decays })
}
