//! The contour part of the Borel-Pompeiu formula, used both as a Cauchy
//! representation of kernel elements and as the Lamé-Cauchy transform of a jet.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::{off_curve, OperatorError};
use crate::geometry::Curve;
use crate::lame::{ClosedFormField, LameError, LameParams};
use crate::quadrature::{contour_integral, contour_integral_dz, ContourIntegrand, Kernel, Measure};
use crate::whitney::{check_jet, WhitneyJet};

/// Boundary samples of `f`, `∂_z f` and `∂_z̄ f` at the curve vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    pub f: Vec<Complex64>,
    pub dz: Vec<Complex64>,
    pub dzbar: Vec<Complex64>,
}

impl BoundaryData {
    pub fn from_field(curve: &Curve, field: &ClosedFormField) -> Result<Self, LameError> {
        let v = curve.vertices();
        let mut out = Self { f: Vec::with_capacity(v.len()), dz: Vec::new(), dzbar: Vec::new() };
        for &t in v {
            out.f.push(field.eval(t));
            out.dz.push(field.dz(t)?);
            out.dzbar.push(field.dzbar(t)?);
        }
        Ok(out)
    }

    pub fn from_jet(jet: &WhitneyJet) -> Self {
        Self { f: jet.f0().to_vec(), dz: jet.f1().to_vec(), dzbar: jet.f2().to_vec() }
    }
}

/// Densities and prefactors of the five contour integrals.
#[derive(Debug)]
struct Terms {
    curve: Curve,
    // f0 against 1/conj(ξ-z) dξ̄ and 1/(ξ-z) dξ
    f0: Vec<Complex64>,
    // α f1 + β conj(f1) against (ξ-z)/conj(ξ-z) dξ̄
    ratio: Vec<Complex64>,
    // α conj(f1) against ln|ξ-z|² dξ
    log_dxi: Vec<Complex64>,
    // β f2 against ln|ξ-z|² dξ̄
    log_dxibar: Vec<Complex64>,
    c_conj: Complex64,
    c_cauchy: Complex64,
    c_ratio: Complex64,
    c_log: Complex64,
}

impl Terms {
    fn new(params: &LameParams, curve: &Curve, data: &BoundaryData) -> Result<Self, OperatorError> {
        let n = curve.vertices().len();
        for v in [&data.f, &data.dz, &data.dzbar] {
            if v.len() != n {
                return Err(OperatorError::InvalidArgument(format!(
                    "boundary data has {} values, curve has {n} vertices",
                    v.len()
                )));
            }
        }
        let (a, b) = (params.alpha(), params.beta());
        let two_pi_i = Complex64::new(0.0, 2.0 * PI);
        Ok(Self {
            curve: curve.clone(),
            f0: data.f.clone(),
            ratio: data.dz.iter().map(|&f1| a * f1 + b * f1.conj()).collect(),
            log_dxi: data.dz.iter().map(|&f1| a * f1.conj()).collect(),
            log_dxibar: data.dzbar.iter().map(|&f2| b * f2).collect(),
            c_conj: -(a * params.alpha_star()) / two_pi_i,
            c_cauchy: -(b * params.beta_star()) / two_pi_i,
            c_ratio: params.alpha_star() / two_pi_i,
            c_log: params.beta_star() / two_pi_i,
        })
    }

    fn sum(&self, z: Complex64, dz: bool) -> Result<Complex64, OperatorError> {
        off_curve(&self.curve, z)?;
        let apply = if dz { contour_integral_dz } else { contour_integral };
        let term = |k: Kernel, m: Measure, d: &[Complex64], c: Complex64| {
            apply(&self.curve, &ContourIntegrand::new(k, m, d), z, c)
        };
        Ok(term(Kernel::ConjCauchy, Measure::DxiBar, &self.f0, self.c_conj)?
            + term(Kernel::Cauchy, Measure::Dxi, &self.f0, self.c_cauchy)?
            + term(Kernel::Ratio, Measure::DxiBar, &self.ratio, self.c_ratio)?
            + term(Kernel::LogModulus, Measure::Dxi, &self.log_dxi, self.c_log)?
            - term(Kernel::LogModulus, Measure::DxiBar, &self.log_dxibar, self.c_log)?)
    }
}

/// The contour terms of the Borel-Pompeiu formula with the given boundary
/// data. For `f` in the kernel of `L` it reproduces `f` inside the curve.
pub fn cauchy_repr(
    params: &LameParams,
    curve: &Curve,
    data: &BoundaryData,
    z: Complex64,
) -> Result<Complex64, OperatorError> {
    Terms::new(params, curve, data)?.sum(z, false)
}

/// Lamé-Cauchy transform of a jet, with its densities prepared once.
#[derive(Debug, Clone)]
pub struct LameCauchyTransform {
    terms: Arc<Terms>,
}

impl LameCauchyTransform {
    /// Fails with [`OperatorError::JetInvalid`] when [`check_jet`] rejects the jet.
    pub fn new(params: &LameParams, jet: &WhitneyJet) -> Result<Self, OperatorError> {
        let report = check_jet(jet);
        if !report.valid {
            return Err(OperatorError::JetInvalid {
                smallest_c: report.smallest_c,
                lip_constant: report.lip_constant,
                scale_divergent: report.scale_divergent,
            });
        }
        Ok(Self::new_unchecked(params, jet))
    }

    pub(crate) fn new_unchecked(params: &LameParams, jet: &WhitneyJet) -> Self {
        let terms = Terms::new(params, jet.curve(), &BoundaryData::from_jet(jet)).expect("jet lengths match its curve");
        Self { terms: Arc::new(terms) }
    }

    pub fn curve(&self) -> &Curve {
        &self.terms.curve
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64, OperatorError> {
        self.terms.sum(z, false)
    }

    /// `∂_z` of the transform, from the differentiated kernels.
    pub fn dz(&self, z: Complex64) -> Result<Complex64, OperatorError> {
        self.terms.sum(z, true)
    }
}

/// One-shot evaluation of the Lamé-Cauchy transform.
pub fn lame_cauchy_transform(params: &LameParams, jet: &WhitneyJet, z: Complex64) -> Result<Complex64, OperatorError> {
    LameCauchyTransform::new(params, jet)?.eval(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lame::universal_displacement;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn circle(n: usize) -> Curve {
        Curve::circle(c(0.0, 0.0), 1.0, n).unwrap()
    }

    #[test]
    fn reproduces_kernel_elements() {
        let p = LameParams::new(1.0, 1.0).unwrap();
        let curve = circle(1024);
        let z = ClosedFormField::monomial(1, 0);
        let v = cauchy_repr(&p, &curve, &BoundaryData::from_field(&curve, &z).unwrap(), c(0.0, 0.5)).unwrap();
        assert!((v - c(0.0, 0.5)).norm() < 1e-4, "{v}");
        let zb2 = ClosedFormField::monomial(0, 2);
        let v = cauchy_repr(&p, &curve, &BoundaryData::from_field(&curve, &zb2).unwrap(), c(0.2, 0.0)).unwrap();
        assert!((v - c(0.04, 0.0)).norm() < 1e-4, "{v}");
        let k = ClosedFormField::constant(c(2.0, -1.0));
        let v = cauchy_repr(&p, &curve, &BoundaryData::from_field(&curve, &k).unwrap(), c(0.1, 0.3)).unwrap();
        assert!((v - c(2.0, -1.0)).norm() < 1e-6, "{v}");
    }

    #[test]
    fn reproduces_universal_displacements_on_a_polygon() {
        let p = LameParams::new(3.0, 0.5).unwrap();
        let curve = Curve::koch_snowflake(3, 3.0).unwrap();
        let f = universal_displacement(c(0.5, -1.0), &ClosedFormField::exp()).unwrap();
        let data = BoundaryData::from_field(&curve, &f).unwrap();
        for z in [c(0.0, 0.0), c(0.3, -0.2), c(-0.4, 0.1)] {
            let v = cauchy_repr(&p, &curve, &data, z).unwrap();
            assert!((v - f.eval(z)).norm() < 1e-3, "{z}: {v} vs {}", f.eval(z));
        }
    }

    #[test]
    fn constant_jet_transform() {
        let p = LameParams::new(1.0, 1.0).unwrap();
        let curve = circle(1024);
        let jet = WhitneyJet::constant(&curve, c(1.0, 0.0), 0.5).unwrap();
        let inside = lame_cauchy_transform(&p, &jet, c(0.0, 0.0)).unwrap();
        assert!((inside - (p.alpha() * p.alpha_star() - p.beta() * p.beta_star())).norm() < 1e-4);
        assert!((inside - 1.0).norm() < 1e-4);
        assert!(lame_cauchy_transform(&p, &jet, c(3.0, 0.0)).unwrap().norm() < 1e-4);
        let zero = WhitneyJet::constant(&curve, c(0.0, 0.0), 0.5).unwrap();
        assert_eq!(lame_cauchy_transform(&p, &zero, c(0.2, 0.0)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn dz_matches_difference_quotient() {
        let p = LameParams::new(1.0, 2.0).unwrap();
        let curve = circle(512);
        let jet = WhitneyJet::from_functions(&curve, |t| t * t, |t| 2.0 * t, |_| c(0.0, 0.0), 0.9).unwrap();
        let tr = LameCauchyTransform::new(&p, &jet).unwrap();
        for z in [c(0.1, 0.2), c(1.5, -0.5)] {
            let h = 1e-5;
            let fx = (tr.eval(z + h).unwrap() - tr.eval(z - h).unwrap()) / (2.0 * h);
            let fy = (tr.eval(z + c(0.0, h)).unwrap() - tr.eval(z - c(0.0, h)).unwrap()) / (2.0 * h);
            let fd = (fx - c(0.0, 1.0) * fy) / 2.0;
            assert!((fd - tr.dz(z).unwrap()).norm() < 1e-6, "{z}");
        }
    }

    #[test]
    fn transform_solves_the_homogeneous_system() {
        let p = LameParams::new(1.0, 1.0).unwrap();
        let curve = circle(1024);
        let jet =
            WhitneyJet::from_functions(&curve, |t| t * t.conj() * t, |t| 2.0 * t * t.conj(), |t| t * t, 0.9).unwrap();
        let tr = LameCauchyTransform::new(&p, &jet).unwrap();
        for z in [c(0.2, 0.1), c(-0.3, -0.3), c(1.8, 0.4)] {
            let l = crate::lame::try_apply_lame_operator_fd(&p, |w| tr.eval(w), z, 1e-3).unwrap().unwrap();
            assert!(l.norm() < 1e-4, "{z}: {l}");
        }
    }
}
