//! One-sided boundary values by normal probes and Richardson extrapolation.

use num_complex::Complex64;

use super::{LameCauchyTransform, OperatorError};
use crate::geometry::{Curve, Location};
use crate::lame::LameParams;
use crate::whitney::WhitneyJet;

/// `Plus` approaches from the bounded component, `Minus` from outside.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitOptions {
    /// Largest probe offset; `None` uses [`LimitOptions::SEGMENT_FACTOR`] segment lengths.
    pub delta0: Option<f64>,
    /// Extrapolants further apart than `10·tol` are reported as nonconvergent.
    pub tol: f64,
}

impl LimitOptions {
    /// Default largest offset in units of the probed segment's length. The
    /// nearest probe sits at a quarter of it, which must clear the contour
    /// quadrature guard of three segment lengths.
    pub const SEGMENT_FACTOR: f64 = 16.0;
}

impl Default for LimitOptions {
    fn default() -> Self {
        Self { delta0: None, tol: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryLimit {
    /// Midpoint of the probed segment.
    pub t: Complex64,
    pub side: Side,
    pub value: Complex64,
    pub deltas: [f64; 3],
    pub samples: [Complex64; 3],
    /// First-order extrapolants from the two coarse and the two fine probes.
    pub extrapolants: [Complex64; 2],
}

/// Limit of `field` at the midpoint of `segment` from `side`, probing along
/// the segment normal at `δ0`, `δ0/2`, `δ0/4` and extrapolating to `δ = 0`.
pub fn boundary_limit<F>(
    field: F,
    curve: &Curve,
    segment: usize,
    side: Side,
    options: &LimitOptions,
) -> Result<BoundaryLimit, OperatorError>
where
    F: Fn(Complex64) -> Result<Complex64, OperatorError>,
{
    if segment >= curve.n_segments() {
        return Err(OperatorError::InvalidArgument(format!(
            "segment {segment} out of range (curve has {})",
            curve.n_segments()
        )));
    }
    if options.tol.is_nan() || options.tol <= 0.0 {
        return Err(OperatorError::InvalidArgument(format!("tolerance must be positive, got {}", options.tol)));
    }
    let (a, b) = curve.segment(segment);
    let t = curve.segment_midpoint(segment);
    let delta0 = options.delta0.unwrap_or(LimitOptions::SEGMENT_FACTOR * (b - a).norm());
    if !(delta0 > 0.0 && delta0.is_finite()) {
        return Err(OperatorError::InvalidArgument(format!("probe offset must be positive, got {delta0}")));
    }
    let normal = match side {
        Side::Plus => curve.inward_normal(segment),
        Side::Minus => -curve.inward_normal(segment),
    };
    let wanted = match side {
        Side::Plus => Location::Inside,
        Side::Minus => Location::Outside,
    };
    let deltas = [delta0, delta0 / 2.0, delta0 / 4.0];
    let mut samples = [Complex64::new(0.0, 0.0); 3];
    for (s, &d) in samples.iter_mut().zip(&deltas) {
        let z = t + normal * d;
        if curve.contains(z) != wanted {
            return Err(OperatorError::ProbeCrossesCurve { t, z, delta: d });
        }
        *s = field(z)?;
    }
    let e1 = 2.0 * samples[1] - samples[0];
    let e2 = 2.0 * samples[2] - samples[1];
    let threshold = 10.0 * options.tol;
    if (e2 - e1).norm() > threshold {
        return Err(OperatorError::NonConvergent { t, e1, e2, threshold });
    }
    // second-order Richardson on δ, δ/2, δ/4
    let value = (8.0 * samples[2] - 6.0 * samples[1] + samples[0]) / 3.0;
    Ok(BoundaryLimit { t, side, value, deltas, samples, extrapolants: [e1, e2] })
}

/// `F⁺ - F⁻` at the midpoint of `segment`.
pub fn jump<F>(field: F, curve: &Curve, segment: usize, options: &LimitOptions) -> Result<Complex64, OperatorError>
where
    F: Fn(Complex64) -> Result<Complex64, OperatorError>,
{
    let plus = boundary_limit(&field, curve, segment, Side::Plus, options)?;
    let minus = boundary_limit(&field, curve, segment, Side::Minus, options)?;
    Ok(plus.value - minus.value)
}

/// Jump of `∂_z` of the Lamé-Cauchy transform of `jet` at the midpoint of
/// `segment`; it should equal `f1` there.
pub fn derivative_jump(
    params: &LameParams,
    jet: &WhitneyJet,
    segment: usize,
    options: &LimitOptions,
) -> Result<Complex64, OperatorError> {
    let tr = LameCauchyTransform::new(params, jet)?;
    jump(|z| tr.dz(z), jet.curve(), segment, options)
}
