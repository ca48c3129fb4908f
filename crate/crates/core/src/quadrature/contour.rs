//! Contour integrals of the four kernels.
//!
//! Circles use the periodic trapezoidal rule at the vertices, which is
//! spectrally accurate for the smooth integrands met away from the curve.
//! Other polylines integrate the piecewise-linear interpolant of the density
//! exactly on each straight segment.

use std::f64::consts::TAU;

use num_complex::Complex64;

use super::{Kernel, Measure, QuadratureError};
use crate::geometry::{Curve, CurveKind};
use crate::sum::par_sum;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Kernel, measure and per-vertex density of a contour integral.
#[derive(Debug, Clone, Copy)]
pub struct ContourIntegrand<'a> {
    pub kernel: Kernel,
    pub measure: Measure,
    pub density: &'a [Complex64],
}

impl<'a> ContourIntegrand<'a> {
    pub fn new(kernel: Kernel, measure: Measure, density: &'a [Complex64]) -> Self {
        Self { kernel, measure, density }
    }
}

/// Distance below which contour quadrature refuses to evaluate.
pub fn contour_guard(curve: &Curve) -> f64 {
    3.0 * curve.max_segment_length()
}

fn check(curve: &Curve, integrand: &ContourIntegrand<'_>, z: Complex64) -> Result<(), QuadratureError> {
    if integrand.density.len() != curve.n_segments() {
        return Err(QuadratureError::DensityLength { expected: curve.n_segments(), got: integrand.density.len() });
    }
    let guard = contour_guard(curve);
    if !curve.is_farther_than(z, guard) {
        return Err(QuadratureError::TooCloseToBoundary { z, distance: curve.distance(z), guard });
    }
    Ok(())
}

/// `prefactor · ∮_γ K(ξ - z) φ(ξ) dμ(ξ)`.
pub fn contour_integral(
    curve: &Curve,
    integrand: &ContourIntegrand<'_>,
    z: Complex64,
    prefactor: Complex64,
) -> Result<Complex64, QuadratureError> {
    check(curve, integrand, z)?;
    Ok(prefactor * raw(curve, integrand.kernel, integrand.measure, integrand.density, z, false))
}

/// `∂_z` of [`contour_integral`] with respect to the evaluation point.
pub fn contour_integral_dz(
    curve: &Curve,
    integrand: &ContourIntegrand<'_>,
    z: Complex64,
    prefactor: Complex64,
) -> Result<Complex64, QuadratureError> {
    check(curve, integrand, z)?;
    Ok(prefactor * raw(curve, integrand.kernel, integrand.measure, integrand.density, z, true))
}

fn raw(curve: &Curve, kernel: Kernel, measure: Measure, phi: &[Complex64], z: Complex64, dz: bool) -> Complex64 {
    if dz {
        // ∂z(ξ-z)/conj(ξ-z) = -1/conj(ξ-z), ∂z ln|ξ-z|² = -1/(ξ-z), ∂z 1/conj(ξ-z) = 0
        match kernel {
            Kernel::ConjCauchy => return Complex64::new(0.0, 0.0),
            Kernel::Ratio => return -raw(curve, Kernel::ConjCauchy, measure, phi, z, false),
            Kernel::LogModulus => return -raw(curve, Kernel::Cauchy, measure, phi, z, false),
            Kernel::Cauchy => {}
        }
    }
    match curve.kind() {
        CurveKind::Circle { center, .. } => trapezoid(curve, center, kernel, measure, phi, z, dz),
        _ => polyline(curve, kernel, measure, phi, z, dz),
    }
}

fn trapezoid(
    curve: &Curve,
    center: Complex64,
    kernel: Kernel,
    measure: Measure,
    phi: &[Complex64],
    z: Complex64,
    dz: bool,
) -> Complex64 {
    let v = curve.vertices();
    let h = TAU / v.len() as f64;
    par_sum(v.len(), |k| {
        let xi = v[k];
        let w = xi - z;
        let dxi = I * (xi - center) * h;
        let dmu = match measure {
            Measure::Dxi => dxi,
            Measure::DxiBar => dxi.conj(),
        };
        let kv = if dz { 1.0 / (w * w) } else { kernel.eval(w) };
        kv * phi[k] * dmu
    })
}

fn polyline(curve: &Curve, kernel: Kernel, measure: Measure, phi: &[Complex64], z: Complex64, dz: bool) -> Complex64 {
    let n = curve.n_segments();
    par_sum(n, |i| {
        let (a, b) = curve.segment(i);
        let (pa, pb) = (phi[i], phi[(i + 1) % n]);
        let e = b - a;
        // dξ̄ = (ē/e) dξ along a straight segment
        let to_bar = e.conj() / e;
        if dz {
            let v = seg_cauchy2(a, b, pa, pb, z);
            return match measure {
                Measure::Dxi => v,
                Measure::DxiBar => v * to_bar,
            };
        }
        match kernel {
            Kernel::Cauchy => {
                let v = seg_cauchy(a, b, pa, pb, z);
                match measure {
                    Measure::Dxi => v,
                    Measure::DxiBar => v * to_bar,
                }
            }
            Kernel::ConjCauchy => {
                // in η = ξ̄ this is a Cauchy integral against dη = dξ̄
                let v = seg_cauchy(a.conj(), b.conj(), pa, pb, z.conj());
                match measure {
                    Measure::DxiBar => v,
                    Measure::Dxi => v / to_bar,
                }
            }
            Kernel::Ratio => {
                // (ξ-z)/conj(ξ-z) = q + c/(η - z̄) with η = ξ̄
                let q = e / e.conj();
                let c = (a - z) - q * (a - z).conj();
                let v = q * e.conj() * (pa + pb) / 2.0 + c * seg_cauchy(a.conj(), b.conj(), pa, pb, z.conj());
                match measure {
                    Measure::DxiBar => v,
                    Measure::Dxi => v / to_bar,
                }
            }
            Kernel::LogModulus => {
                let t = e / e.norm();
                let v = seg_log(a, b, pa, pb, z);
                match measure {
                    Measure::Dxi => v * t,
                    Measure::DxiBar => v * t.conj(),
                }
            }
        }
    })
}

/// `Log((b-z)/(a-z))` along the straight path, branch-free.
#[inline]
fn log_ratio(a: Complex64, b: Complex64, z: Complex64) -> Complex64 {
    let (u, v) = (a - z, b - z);
    let m = v * u.conj();
    Complex64::new(v.norm().ln() - u.norm().ln(), m.im.atan2(m.re))
}

/// `∫_a^b φ(ξ)/(ξ-z) dξ` for φ linear in ξ with end values `pa`, `pb`.
#[inline]
pub(crate) fn seg_cauchy(a: Complex64, b: Complex64, pa: Complex64, pb: Complex64, z: Complex64) -> Complex64 {
    let e = b - a;
    let m = (pb - pa) / e;
    m * e + (pa + m * (z - a)) * log_ratio(a, b, z)
}

/// `∫_a^b φ(ξ)/(ξ-z)² dξ` for linear φ.
#[inline]
fn seg_cauchy2(a: Complex64, b: Complex64, pa: Complex64, pb: Complex64, z: Complex64) -> Complex64 {
    let e = b - a;
    let m = (pb - pa) / e;
    let c0 = pa + m * (z - a);
    c0 * (1.0 / (a - z) - 1.0 / (b - z)) + m * log_ratio(a, b, z)
}

/// `∫ φ ln|ξ-z|² ds` over the segment, `s` being arclength.
fn seg_log(a: Complex64, b: Complex64, pa: Complex64, pb: Complex64, z: Complex64) -> Complex64 {
    let len = (b - a).norm();
    let t = (b - a) / len;
    // coordinates along the segment's line, foot of the perpendicular from z at s0
    let w = (z - a) * t.conj();
    let (s0, d) = (w.re, w.im.abs());
    let slope = (pb - pa) / len;
    // φ = A + B·(s - s0)
    let big_a = pa + slope * s0;
    let g0 = |x: f64| {
        let r2 = x * x + d * d;
        let lg = if r2 > 0.0 { x * r2.ln() } else { 0.0 };
        let at = if d > 0.0 { 2.0 * d * (x / d).atan() } else { 0.0 };
        lg - 2.0 * x + at
    };
    let g1 = |x: f64| {
        let r2 = x * x + d * d;
        let lg = if r2 > 0.0 { r2 * r2.ln() } else { 0.0 };
        0.5 * (lg - x * x)
    };
    let (x0, x1) = (-s0, len - s0);
    big_a * (g0(x1) - g0(x0)) + slope * (g1(x1) - g1(x0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ones(n: usize) -> Vec<Complex64> {
        vec![c(1.0, 0.0); n]
    }

    fn circle(n: usize) -> Curve {
        Curve::circle(c(0.0, 0.0), 1.0, n).unwrap()
    }

    fn polygon(curve: &Curve) -> Curve {
        Curve::from_vertices(curve.vertices().to_vec()).unwrap()
    }

    fn two_pi_i() -> Complex64 {
        c(0.0, 2.0 * PI)
    }

    #[test]
    fn residue_examples() {
        let curve = circle(1024);
        let one = ones(1024);
        let pre = 1.0 / two_pi_i();
        let ci = ContourIntegrand::new(Kernel::Cauchy, Measure::Dxi, &one);
        assert!((contour_integral(&curve, &ci, c(0.0, 0.0), pre).unwrap() - 1.0).norm() < 1e-6);
        assert!(contour_integral(&curve, &ci, c(3.0, 0.0), pre).unwrap().norm() < 1e-6);
        let cc = ContourIntegrand::new(Kernel::ConjCauchy, Measure::DxiBar, &one);
        assert!((contour_integral(&curve, &cc, c(0.0, 0.0), pre).unwrap() + 1.0).norm() < 1e-6);
        let lg = ContourIntegrand::new(Kernel::LogModulus, Measure::Dxi, &one);
        assert!(contour_integral(&curve, &lg, c(0.0, 0.0), c(1.0, 0.0)).unwrap().norm() < 1e-12);
    }

    #[test]
    fn polygon_rule_matches_residues() {
        let curve = polygon(&circle(1024));
        let one = ones(1024);
        let pre = 1.0 / two_pi_i();
        let ci = ContourIntegrand::new(Kernel::Cauchy, Measure::Dxi, &one);
        // a closed polygon integrates constants against 1/(ξ-z) exactly
        assert!((contour_integral(&curve, &ci, c(0.2, 0.1), pre).unwrap() - 1.0).norm() < 1e-13);
        assert!(contour_integral(&curve, &ci, c(3.0, 0.0), pre).unwrap().norm() < 1e-13);
        let cc = ContourIntegrand::new(Kernel::ConjCauchy, Measure::DxiBar, &one);
        assert!((contour_integral(&curve, &cc, c(0.0, 0.0), pre).unwrap() + 1.0).norm() < 1e-13);
    }

    #[test]
    fn guard_rejects_near_points() {
        let curve = circle(64);
        let one = ones(64);
        let ci = ContourIntegrand::new(Kernel::Cauchy, Measure::Dxi, &one);
        let r = contour_integral(&curve, &ci, c(0.99, 0.0), c(1.0, 0.0));
        assert!(matches!(r, Err(QuadratureError::TooCloseToBoundary { .. })));
        let short = ones(10);
        let bad = ContourIntegrand::new(Kernel::Cauchy, Measure::Dxi, &short);
        assert!(matches!(
            contour_integral(&curve, &bad, c(0.0, 0.0), c(1.0, 0.0)),
            Err(QuadratureError::DensityLength { .. })
        ));
    }

    // brute-force oracle: many-point midpoint rule on the piecewise-linear density
    fn brute(curve: &Curve, kernel: Kernel, measure: Measure, phi: &[Complex64], z: Complex64) -> Complex64 {
        let n = curve.n_segments();
        let m = 4000;
        let mut acc = c(0.0, 0.0);
        for i in 0..n {
            let (a, b) = curve.segment(i);
            for k in 0..m {
                let s = (k as f64 + 0.5) / m as f64;
                let xi = a + (b - a) * s;
                let p = phi[i] + (phi[(i + 1) % n] - phi[i]) * s;
                let d = (b - a) / m as f64;
                let dmu = match measure {
                    Measure::Dxi => d,
                    Measure::DxiBar => d.conj(),
                };
                acc += kernel.eval(xi - z) * p * dmu;
            }
        }
        acc
    }

    #[test]
    fn exact_segments_match_brute_force() {
        let curve = Curve::from_vertices(vec![c(0.0, 0.0), c(1.0, 0.2), c(0.7, 1.1), c(-0.3, 0.8)]).unwrap();
        let phi = vec![c(1.0, 0.5), c(-0.3, 0.2), c(0.4, -1.0), c(2.0, 0.0)];
        for z in [c(0.4, 0.5), c(2.0, -1.0)] {
            for kernel in [Kernel::Cauchy, Kernel::ConjCauchy, Kernel::Ratio, Kernel::LogModulus] {
                for measure in [Measure::Dxi, Measure::DxiBar] {
                    let exact = raw(&curve, kernel, measure, &phi, z, false);
                    let b = brute(&curve, kernel, measure, &phi, z);
                    assert!((exact - b).norm() < 1e-6, "{kernel:?} {measure:?} {z}: {exact} vs {b}");
                }
            }
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        for curve in [circle(256), Curve::koch_snowflake(3, 3.0).unwrap()] {
            let n = curve.n_segments();
            let phi: Vec<Complex64> = (0..n).map(|k| c((k as f64 * 0.1).sin(), (k as f64 * 0.05).cos())).collect();
            let z = c(0.1, -0.05);
            for kernel in [Kernel::Cauchy, Kernel::ConjCauchy, Kernel::Ratio, Kernel::LogModulus] {
                let ig = ContourIntegrand::new(kernel, Measure::DxiBar, &phi);
                let f = |w: Complex64| contour_integral(&curve, &ig, w, c(1.0, 0.0)).unwrap();
                let h = 1e-5;
                let fx = (f(z + h) - f(z - h)) / (2.0 * h);
                let fy = (f(z + I * h) - f(z - I * h)) / (2.0 * h);
                let fd = (fx - I * fy) / 2.0;
                let an = contour_integral_dz(&curve, &ig, z, c(1.0, 0.0)).unwrap();
                assert!((fd - an).norm() < 1e-6 * (1.0 + an.norm()), "{kernel:?}: {fd} vs {an}");
            }
        }
    }

    #[test]
    fn self_convergence_under_refinement() {
        // smooth density on a polygonal circle; changes must at least halve
        // (the ConjCauchy value is zero on the circle, so it sits at round-off)
        let z = c(0.3, 0.4);
        for kernel in [Kernel::Cauchy, Kernel::ConjCauchy, Kernel::Ratio, Kernel::LogModulus] {
            let vals: Vec<Complex64> = [64usize, 128, 256, 512]
                .iter()
                .map(|&n| {
                    let curve = polygon(&circle(n));
                    let phi: Vec<Complex64> = curve.vertices().iter().map(|v| (v * 2.0).exp()).collect();
                    let ig = ContourIntegrand::new(kernel, Measure::Dxi, &phi);
                    contour_integral(&curve, &ig, z, c(1.0, 0.0)).unwrap()
                })
                .collect();
            for w in vals.windows(3) {
                let (d1, d2) = ((w[1] - w[0]).norm(), (w[2] - w[1]).norm());
                assert!(d2 < 0.5 * d1 || d2 < 1e-12, "{kernel:?} {vals:?}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn conjugation_identity(seed in 0u64..1000, x in -0.3..0.3f64, y in -0.3..0.3f64) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            for curve in [circle(128), Curve::koch_snowflake(3, 3.0).unwrap()] {
                let n = curve.n_segments();
                let phi: Vec<Complex64> = (0..n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
                let phic: Vec<Complex64> = phi.iter().map(|p| p.conj()).collect();
                let z = c(x, y);
                let a = contour_integral(&curve, &ContourIntegrand::new(Kernel::Cauchy, Measure::Dxi, &phi), z, c(1.0, 0.0)).unwrap();
                let b = contour_integral(&curve, &ContourIntegrand::new(Kernel::ConjCauchy, Measure::DxiBar, &phic), z, c(1.0, 0.0)).unwrap();
                prop_assert!((a.conj() - b).norm() < 1e-10 * (1.0 + a.norm()));
            }
        }

        #[test]
        fn linearity(s in -2.0..2.0f64, t in -2.0..2.0f64) {
            let curve = Curve::koch_snowflake(3, 3.0).unwrap();
            let n = curve.n_segments();
            let g1: Vec<Complex64> = curve.vertices().to_vec();
            let g2: Vec<Complex64> = (0..n).map(|k| c(1.0, k as f64 / n as f64)).collect();
            let mix: Vec<Complex64> = g1.iter().zip(&g2).map(|(a, b)| a * s + b * t).collect();
            let z = c(0.05, 0.02);
            for kernel in [Kernel::Cauchy, Kernel::ConjCauchy, Kernel::Ratio, Kernel::LogModulus] {
                let f = |g: &[Complex64]| contour_integral(&curve, &ContourIntegrand::new(kernel, Measure::Dxi, g), z, c(1.0, 0.0)).unwrap();
                let lhs = f(&mix);
                let rhs = f(&g1) * s + f(&g2) * t;
                prop_assert!((lhs - rhs).norm() < 1e-12 * (1.0 + lhs.norm()));
            }
        }
    }
}
