//! Teodorescu transform, Cauchy representation, Borel-Pompeiu formula,
//! Lamé-Cauchy transform, one-sided limits and the jump problem.

mod cauchy;
mod grid;
mod jump;
mod limits;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::geometry::{Curve, GeometryError, Location};
use crate::lame::{apply_lame_operator, try_apply_lame_operator_fd, ClosedFormField, LameError, LameParams};
use crate::quadrature::{area::area_integral_kernels, AreaCells, Density, Kernel, QuadratureError};
use crate::whitney::WhitneyError;

pub use cauchy::{cauchy_repr, lame_cauchy_transform, BoundaryData, LameCauchyTransform};
pub use grid::{FieldOnGrid, Provenance, RegionTag};
pub use jump::{
    asymptotic_growth_check, default_dimension, solve_jump_problem, Certificate, GrowthReport, JumpMethod,
    JumpProblemSolution, SolveOptions,
};
pub use limits::{boundary_limit, derivative_jump, jump, BoundaryLimit, LimitOptions, Side};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OperatorError {
    #[error("evaluation point {z} lies on the curve")]
    PointOnCurve { z: Complex64 },
    #[error("jet is not in Lip(1+nu): smallest admissible constant {smallest_c:.4e} vs {lip_constant:.4e}")]
    JetInvalid { smallest_c: f64, lip_constant: f64, scale_divergent: bool },
    #[error("one-sided limit at {t} did not settle: extrapolants {e1} and {e2} differ by more than {threshold:.3e}")]
    NonConvergent { t: Complex64, e1: Complex64, e2: Complex64, threshold: f64 },
    #[error("probe {z} at offset {delta:.3e} from {t} is not on the requested side of the curve")]
    ProbeCrossesCurve { t: Complex64, z: Complex64, delta: f64 },
    #[error("finite-difference stencil around {center} comes within {distance:.3e} of the curve (needs {needed:.3e})")]
    StencilOutOfDomain { center: Complex64, distance: f64, needed: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Lame(#[from] LameError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Whitney(WhitneyError),
}

impl From<WhitneyError> for OperatorError {
    fn from(e: WhitneyError) -> Self {
        match e {
            WhitneyError::JetInvalid { smallest_c, lip_constant, scale_divergent } => {
                OperatorError::JetInvalid { smallest_c, lip_constant, scale_divergent }
            }
            other => OperatorError::Whitney(other),
        }
    }
}

fn off_curve(curve: &Curve, z: Complex64) -> Result<(), OperatorError> {
    if curve.is_farther_than(z, curve.boundary_tolerance()) {
        Ok(())
    } else {
        Err(OperatorError::PointOnCurve { z })
    }
}

/// `T[g](z) = (1/π)∫_Ω [α*·(ξ-z)/conj(ξ-z)·conj(g) - β*·ln|ξ-z|²·g] dA`.
pub fn teodorescu(
    params: &LameParams,
    cells: &AreaCells,
    g: &dyn Density,
    z: Complex64,
) -> Result<Complex64, OperatorError> {
    off_curve(cells.curve(), z)?;
    let k = area_integral_kernels(cells, &[Kernel::Ratio, Kernel::LogModulus], g, z, true)?;
    Ok((params.alpha_star() * k[0] - params.beta_star() * k[1]) / PI)
}

/// `∂_z T[g](z) = (1/π)∫_Ω [-α*·conj(g)/conj(ξ-z) + β*·g/(ξ-z)] dA`.
pub fn teodorescu_dz(
    params: &LameParams,
    cells: &AreaCells,
    g: &dyn Density,
    z: Complex64,
) -> Result<Complex64, OperatorError> {
    off_curve(cells.curve(), z)?;
    let k = area_integral_kernels(cells, &[Kernel::ConjCauchy, Kernel::Cauchy], g, z, true)?;
    Ok((-params.alpha_star() * k[0] + params.beta_star() * k[1]) / PI)
}

/// Default finite-difference step of [`verify_right_inverse`]. It is large
/// on purpose: the stencil divides quadrature noise by `h²`.
pub const RIGHT_INVERSE_STEP: f64 = 0.05;

/// `|L[T g](z) - g(z)|` inside, `|L[T g](z)|` outside, with `L` applied by
/// finite differences of step `h`.
pub fn verify_right_inverse(
    params: &LameParams,
    cells: &AreaCells,
    g: &dyn Density,
    z: Complex64,
    h: f64,
) -> Result<f64, OperatorError> {
    let curve = cells.curve();
    let needed = 3.0 * (h + cells.max_cell_side());
    if !curve.is_farther_than(z, needed) {
        return Err(OperatorError::StencilOutOfDomain { center: z, distance: curve.distance(z), needed });
    }
    let lt = try_apply_lame_operator_fd(params, |w| teodorescu(params, cells, g, w), z, h)??;
    let target = match curve.contains(z) {
        Location::Inside => g.eval(z),
        _ => Complex64::new(0.0, 0.0),
    };
    Ok((lt - target).norm())
}

/// Right-hand side of the Borel-Pompeiu formula: the four contour terms with
/// the boundary data of `f`, plus `T[L f]`. Inside it reproduces `f(z)`,
/// outside it gives 0.
pub fn borel_pompeiu_rhs(
    params: &LameParams,
    cells: &AreaCells,
    f: &ClosedFormField,
    z: Complex64,
) -> Result<Complex64, OperatorError> {
    if !f.has_second() {
        return Err(LameError::MissingDerivative("second derivatives").into());
    }
    let curve = cells.curve();
    let data = BoundaryData::from_field(curve, f)?;
    let boundary = cauchy_repr(params, curve, &data, z)?;
    let lf = cells.tabulate(|xi| apply_lame_operator(params, f, xi).unwrap_or(Complex64::new(f64::NAN, 0.0)));
    let area = teodorescu(params, cells, &lf, z)?;
    Ok(boundary + area)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::Domain;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn disk_cells(depth: u32) -> AreaCells {
        let curve = Curve::circle(c(0.0, 0.0), 1.0, 1024).unwrap();
        Domain::whitney(&curve, depth).unwrap().cells()
    }

    fn one(_: Complex64) -> Complex64 {
        c(1.0, 0.0)
    }

    #[test]
    fn teodorescu_of_one_at_centre() {
        let p = LameParams::new(1.0, 1.0).unwrap();
        let cells = disk_cells(8);
        let t = teodorescu(&p, &cells, &one, c(0.0, 0.0)).unwrap();
        assert!((t - p.beta_star()).norm() < 1e-3, "{t}");
        let zero = |_: Complex64| c(0.0, 0.0);
        assert_eq!(teodorescu(&p, &cells, &zero, c(0.3, 0.1)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn teodorescu_is_annihilated_outside() {
        let p = LameParams::new(1.0, 1.0).unwrap();
        let cells = disk_cells(8);
        let r = verify_right_inverse(&p, &cells, &one, c(5.0, 0.0), RIGHT_INVERSE_STEP).unwrap();
        assert!(r < 1e-3, "{r}");
    }

    #[test]
    fn teodorescu_dz_matches_difference_quotient() {
        let p = LameParams::new(2.0, 0.7).unwrap();
        let cells = disk_cells(8);
        let g = |xi: Complex64| xi + c(0.5, 0.0);
        for z in [c(0.2, 0.1), c(-0.4, 0.3), c(2.0, 1.0)] {
            let h = 1e-3;
            let tx =
                (teodorescu(&p, &cells, &g, z + h).unwrap() - teodorescu(&p, &cells, &g, z - h).unwrap()) / (2.0 * h);
            let ty = (teodorescu(&p, &cells, &g, z + c(0.0, h)).unwrap()
                - teodorescu(&p, &cells, &g, z - c(0.0, h)).unwrap())
                / (2.0 * h);
            let fd = (tx - c(0.0, 1.0) * ty) / 2.0;
            let exact = teodorescu_dz(&p, &cells, &g, z).unwrap();
            assert!((fd - exact).norm() < 1e-3, "{z}: {fd} vs {exact}");
        }
    }

    #[test]
    fn right_inverse_examples() {
        let p = LameParams::new(1.0, 1.0).unwrap();
        let coarse = disk_cells(8);
        let fine = disk_cells(10);
        let z = c(0.2, 0.1);
        let r8 = verify_right_inverse(&p, &coarse, &one, z, RIGHT_INVERSE_STEP).unwrap();
        let r10 = verify_right_inverse(&p, &fine, &one, z, RIGHT_INVERSE_STEP).unwrap();
        assert!(r8 < 5e-2 && r10 < 2e-2, "{r8} {r10}");
        let id = |xi: Complex64| xi;
        assert!(verify_right_inverse(&p, &coarse, &id, c(0.0, 0.0), RIGHT_INVERSE_STEP).unwrap() < 5e-2);
        assert!(verify_right_inverse(&p, &coarse, &one, c(4.0, 0.0), RIGHT_INVERSE_STEP).unwrap() < 5e-2);
        assert!(matches!(
            verify_right_inverse(&p, &coarse, &one, c(0.9, 0.0), RIGHT_INVERSE_STEP),
            Err(OperatorError::StencilOutOfDomain { .. })
        ));
    }

    #[test]
    fn borel_pompeiu_examples() {
        let p = LameParams::new(1.0, 1.0).unwrap();
        let cells = disk_cells(8);
        let f = ClosedFormField::monomial(1, 0).linear_combination(
            c(1.0, 0.0),
            &ClosedFormField::monomial(0, 2),
            c(1.0, 0.0),
        );
        let v = borel_pompeiu_rhs(&p, &cells, &f, c(0.3, 0.0)).unwrap();
        assert!((v - c(0.39, 0.0)).norm() < 1e-3, "{v}");
        let m = ClosedFormField::monomial(1, 1);
        let v = borel_pompeiu_rhs(&p, &cells, &m, c(0.0, 0.0)).unwrap();
        assert!(v.norm() < 1e-3, "{v}");
        let zero = ClosedFormField::constant(c(0.0, 0.0));
        assert_eq!(borel_pompeiu_rhs(&p, &cells, &zero, c(0.2, 0.2)).unwrap(), c(0.0, 0.0));
        // outside the formula gives 0
        let v = borel_pompeiu_rhs(&p, &cells, &m, c(2.0, 0.5)).unwrap();
        assert!(v.norm() < 1e-3, "{v}");
    }

    #[test]
    fn points_on_the_curve_are_refused() {
        let p = LameParams::new(1.0, 1.0).unwrap();
        let cells = disk_cells(5);
        let v0 = cells.curve().vertices()[0];
        assert!(matches!(teodorescu(&p, &cells, &one, v0), Err(OperatorError::PointOnCurve { .. })));
    }
}
