//! Elastic parameters, Wirtinger calculus and the operator `L_{α,β}`.
//!
//! Wirtinger derivatives follow the usual convention
//! `∂z = (∂x - i∂y)/2`, `∂z̄ = (∂x + i∂y)/2`, so that `4∂z∂z̄ = Δ`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

/// Complex scalar function of a point in the plane.
pub type ScalarFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LameError {
    #[error("nonphysical material: need mu > 0 and lambda > -2 mu / 3 (got lambda = {lambda}, mu = {mu})")]
    ParameterDomain { lambda: f64, mu: f64 },
    #[error("field has no exact `{0}` derivative")]
    MissingDerivative(&'static str),
    #[error("phi is not holomorphic: d/dzbar phi({at}) = {value}")]
    NotHolomorphic { at: Complex64, value: Complex64 },
    #[error("finite-difference stencil around {center} leaves the evaluable region")]
    StencilOutOfDomain { center: Complex64 },
    #[error("finite-difference step must be positive and finite (got {0})")]
    BadStep(f64),
}

/// Lamé constants together with every derived coefficient used by the operators.
///
/// `alpha_star = α/(α²-β²)` and `beta_star = β/(α²-β²)` satisfy
/// `α·α* - β·β* = 1` and `α·β* - β·α* = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LameParams {
    lambda: f64,
    mu: f64,
    alpha: f64,
    beta: f64,
    alpha_star: f64,
    beta_star: f64,
    sigma: f64,
}

impl LameParams {
    pub fn new(lambda: f64, mu: f64) -> Result<Self, LameError> {
        let admissible = lambda.is_finite() && mu.is_finite() && mu > 0.0 && lambda > -2.0 * mu / 3.0;
        if !admissible {
            return Err(LameError::ParameterDomain { lambda, mu });
        }
        let alpha = (mu + lambda) / 2.0;
        let beta = (3.0 * mu + lambda) / 2.0;
        // α² - β² = -μ(2μ + λ), never zero on the admissible set.
        let det = alpha * alpha - beta * beta;
        Ok(Self {
            lambda,
            mu,
            alpha,
            beta,
            alpha_star: alpha / det,
            beta_star: beta / det,
            sigma: lambda / (2.0 * (lambda + mu)),
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn mu(&self) -> f64 {
        self.mu
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn alpha_star(&self) -> f64 {
        self.alpha_star
    }
    pub fn beta_star(&self) -> f64 {
        self.beta_star
    }
    /// Poisson ratio `λ / (2(λ+μ))`.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// `α·α* - β·β*`, equal to one.
    pub fn unit_identity(&self) -> f64 {
        self.alpha * self.alpha_star - self.beta * self.beta_star
    }

    /// `α·β* - β·α*`, equal to zero. This is the cancellation that makes the
    /// Teodorescu operator a right inverse.
    pub fn cross_identity(&self) -> f64 {
        self.alpha * self.beta_star - self.beta * self.alpha_star
    }

    /// Applies `L` given the second Wirtinger derivatives `∂z∂z f` and `∂z∂z̄ f`.
    #[inline]
    pub fn combine(&self, dz_dz: Complex64, dz_dzbar: Complex64) -> Complex64 {
        // ∂z̄∂z̄ conj(f) = conj(∂z∂z f)
        self.alpha * dz_dz.conj() + self.beta * dz_dzbar
    }
}

impl Default for LameParams {
    fn default() -> Self {
        Self::new(1.0, 1.0).expect("unit material is admissible")
    }
}

/// A complex field with optional exact Wirtinger derivatives up to order two.
#[derive(Clone)]
pub struct ClosedFormField {
    value: ScalarFn,
    dz: Option<ScalarFn>,
    dzbar: Option<ScalarFn>,
    dz_dz: Option<ScalarFn>,
    dz_dzbar: Option<ScalarFn>,
    dzbar_dzbar: Option<ScalarFn>,
}

impl fmt::Debug for ClosedFormField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClosedFormField")
            .field("dz", &self.dz.is_some())
            .field("dzbar", &self.dzbar.is_some())
            .field("dz_dz", &self.dz_dz.is_some())
            .field("dz_dzbar", &self.dz_dzbar.is_some())
            .field("dzbar_dzbar", &self.dzbar_dzbar.is_some())
            .finish()
    }
}

fn arc<F: Fn(Complex64) -> Complex64 + Send + Sync + 'static>(f: F) -> ScalarFn {
    Arc::new(f)
}

impl ClosedFormField {
    pub fn new<F>(value: F) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        Self { value: arc(value), dz: None, dzbar: None, dz_dz: None, dz_dzbar: None, dzbar_dzbar: None }
    }

    pub fn with_first<A, B>(mut self, dz: A, dzbar: B) -> Self
    where
        A: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
        B: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        self.dz = Some(arc(dz));
        self.dzbar = Some(arc(dzbar));
        self
    }

    pub fn with_dz<A>(mut self, dz: A) -> Self
    where
        A: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        self.dz = Some(arc(dz));
        self
    }

    pub fn with_dzbar<A>(mut self, dzbar: A) -> Self
    where
        A: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        self.dzbar = Some(arc(dzbar));
        self
    }

    pub fn with_second<A, B, C>(mut self, dz_dz: A, dz_dzbar: B, dzbar_dzbar: C) -> Self
    where
        A: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
        B: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
        C: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        self.dz_dz = Some(arc(dz_dz));
        self.dz_dzbar = Some(arc(dz_dzbar));
        self.dzbar_dzbar = Some(arc(dzbar_dzbar));
        self
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        (self.value)(z)
    }

    pub fn value_fn(&self) -> ScalarFn {
        self.value.clone()
    }

    pub fn dz(&self, z: Complex64) -> Result<Complex64, LameError> {
        call(&self.dz, "dz", z)
    }
    pub fn dzbar(&self, z: Complex64) -> Result<Complex64, LameError> {
        call(&self.dzbar, "dzbar", z)
    }
    pub fn dz_dz(&self, z: Complex64) -> Result<Complex64, LameError> {
        call(&self.dz_dz, "dz_dz", z)
    }
    pub fn dz_dzbar(&self, z: Complex64) -> Result<Complex64, LameError> {
        call(&self.dz_dzbar, "dz_dzbar", z)
    }
    pub fn dzbar_dzbar(&self, z: Complex64) -> Result<Complex64, LameError> {
        call(&self.dzbar_dzbar, "dzbar_dzbar", z)
    }

    pub fn has_first(&self) -> bool {
        self.dz.is_some() && self.dzbar.is_some()
    }

    pub fn has_second(&self) -> bool {
        self.dz_dz.is_some() && self.dz_dzbar.is_some() && self.dzbar_dzbar.is_some()
    }

    /// Largest `|4·∂z∂z̄ f - Δf|` over `points`, with the Laplacian taken by
    /// central differences of step `h`.
    pub fn laplacian_mismatch(&self, points: &[Complex64], h: f64) -> Result<f64, LameError> {
        check_step(h)?;
        let mut worst = 0.0f64;
        for &z in points {
            let d = fd_second(|w| self.eval(w), z, h);
            let lap = d.xx + d.yy;
            worst = worst.max((4.0 * self.dz_dzbar(z)? - lap).norm());
        }
        Ok(worst)
    }

    // Test fields.

    /// `z^p · z̄^q` with all exact derivatives.
    pub fn monomial(p: u32, q: u32) -> Self {
        fn term(c: f64, p: i32, q: i32) -> impl Fn(Complex64) -> Complex64 + Send + Sync {
            move |z: Complex64| {
                if c == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    c * z.powi(p) * z.conj().powi(q)
                }
            }
        }
        let (pi, qi) = (p as i32, q as i32);
        let (pf, qf) = (p as f64, q as f64);
        Self::new(term(1.0, pi, qi)).with_first(term(pf, pi - 1, qi), term(qf, pi, qi - 1)).with_second(
            term(pf * (pf - 1.0), pi - 2, qi),
            term(pf * qf, pi - 1, qi - 1),
            term(qf * (qf - 1.0), pi, qi - 2),
        )
    }

    pub fn constant(c: Complex64) -> Self {
        let zero = |_| Complex64::new(0.0, 0.0);
        Self::new(move |_| c).with_first(zero, zero).with_second(zero, zero, zero)
    }

    /// `exp(z)`, holomorphic.
    pub fn exp() -> Self {
        let zero = |_| Complex64::new(0.0, 0.0);
        Self::new(|z: Complex64| z.exp()).with_first(|z: Complex64| z.exp(), zero).with_second(
            |z: Complex64| z.exp(),
            zero,
            zero,
        )
    }

    /// Pointwise `a·self + b·other`; a derivative survives only if both have it.
    pub fn linear_combination(&self, a: Complex64, other: &Self, b: Complex64) -> Self {
        fn lin(x: &Option<ScalarFn>, y: &Option<ScalarFn>, a: Complex64, b: Complex64) -> Option<ScalarFn> {
            match (x, y) {
                (Some(x), Some(y)) => {
                    let (x, y) = (x.clone(), y.clone());
                    Some(arc(move |z| a * x(z) + b * y(z)))
                }
                _ => None,
            }
        }
        let (v, w) = (self.value.clone(), other.value.clone());
        Self {
            value: arc(move |z| a * v(z) + b * w(z)),
            dz: lin(&self.dz, &other.dz, a, b),
            dzbar: lin(&self.dzbar, &other.dzbar, a, b),
            dz_dz: lin(&self.dz_dz, &other.dz_dz, a, b),
            dz_dzbar: lin(&self.dz_dzbar, &other.dz_dzbar, a, b),
            dzbar_dzbar: lin(&self.dzbar_dzbar, &other.dzbar_dzbar, a, b),
        }
    }
}

fn call(f: &Option<ScalarFn>, name: &'static str, z: Complex64) -> Result<Complex64, LameError> {
    f.as_ref().map(|f| f(z)).ok_or(LameError::MissingDerivative(name))
}

/// Converts a real body force `(X, Y)` into the complex right-hand side `g = -(X + iY)/2`.
pub fn body_force_to_complex<X, Y>(x: X, y: Y) -> ScalarFn
where
    X: Fn(Complex64) -> f64 + Send + Sync + 'static,
    Y: Fn(Complex64) -> f64 + Send + Sync + 'static,
{
    arc(move |z| -0.5 * Complex64::new(x(z), y(z)))
}

/// `L_{α,β}[f](z)` from the field's exact second derivatives.
pub fn apply_lame_operator(params: &LameParams, f: &ClosedFormField, z: Complex64) -> Result<Complex64, LameError> {
    Ok(params.combine(f.dz_dz(z)?, f.dz_dzbar(z)?))
}

/// Raw second partials from a 3×3 central-difference stencil.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SecondPartials {
    pub xx: Complex64,
    pub xy: Complex64,
    pub yy: Complex64,
}

pub(crate) fn stencil_nodes(z: Complex64, h: f64) -> [Complex64; 9] {
    let (dx, dy) = (Complex64::new(h, 0.0), Complex64::new(0.0, h));
    [z, z + dx, z - dx, z + dy, z - dy, z + dx + dy, z + dx - dy, z - dx + dy, z - dx - dy]
}

pub(crate) fn second_from_samples(s: &[Complex64; 9], h: f64) -> SecondPartials {
    let h2 = h * h;
    SecondPartials {
        xx: (s[1] - 2.0 * s[0] + s[2]) / h2,
        yy: (s[3] - 2.0 * s[0] + s[4]) / h2,
        xy: (s[5] - s[6] - s[7] + s[8]) / (4.0 * h2),
    }
}

fn fd_second<F: Fn(Complex64) -> Complex64>(f: F, z: Complex64, h: f64) -> SecondPartials {
    let nodes = stencil_nodes(z, h);
    let samples = nodes.map(f);
    second_from_samples(&samples, h)
}

impl SecondPartials {
    pub fn dz_dz(&self) -> Complex64 {
        (self.xx - 2.0 * I * self.xy - self.yy) / 4.0
    }
    pub fn dz_dzbar(&self) -> Complex64 {
        (self.xx + self.yy) / 4.0
    }
}

fn check_step(h: f64) -> Result<(), LameError> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(LameError::BadStep(h))
    }
}

/// Default step for finite differences around `z`: `1e-4` times the local length scale.
pub fn default_step(z: Complex64) -> f64 {
    1e-4 * z.norm().max(1.0)
}

/// Second-order central-difference approximation of `L_{α,β}[f](z)` for a
/// black-box field evaluable on the whole 3×3 stencil.
pub fn apply_lame_operator_fd<F>(params: &LameParams, f: F, z: Complex64, h: f64) -> Result<Complex64, LameError>
where
    F: Fn(Complex64) -> Complex64,
{
    check_step(h)?;
    let d = fd_second(f, z, h);
    Ok(params.combine(d.dz_dz(), d.dz_dzbar()))
}

/// As [`apply_lame_operator_fd`], but every stencil node must satisfy `admissible`.
pub fn apply_lame_operator_fd_within<F, A>(
    params: &LameParams,
    f: F,
    z: Complex64,
    h: f64,
    admissible: A,
) -> Result<Complex64, LameError>
where
    F: Fn(Complex64) -> Complex64,
    A: Fn(Complex64) -> bool,
{
    check_step(h)?;
    if !stencil_nodes(z, h).iter().all(|&w| admissible(w)) {
        return Err(LameError::StencilOutOfDomain { center: z });
    }
    apply_lame_operator_fd(params, f, z, h)
}

/// Fallible variant used for fields computed by quadrature.
pub fn try_apply_lame_operator_fd<F, E>(
    params: &LameParams,
    f: F,
    z: Complex64,
    h: f64,
) -> Result<Result<Complex64, E>, LameError>
where
    F: Fn(Complex64) -> Result<Complex64, E>,
{
    check_step(h)?;
    let nodes = stencil_nodes(z, h);
    let mut samples = [Complex64::new(0.0, 0.0); 9];
    for (s, &w) in samples.iter_mut().zip(nodes.iter()) {
        match f(w) {
            Ok(v) => *s = v,
            Err(e) => return Ok(Err(e)),
        }
    }
    let d = second_from_samples(&samples, h);
    Ok(Ok(params.combine(d.dz_dz(), d.dz_dzbar())))
}

/// Sample points used to certify holomorphy of `phi`.
fn holomorphy_samples() -> impl Iterator<Item = Complex64> {
    (0..12).map(|k| {
        let t = k as f64 * std::f64::consts::TAU / 12.0;
        (0.25 + 0.05 * k as f64) * Complex64::from_polar(1.0, t)
    })
}

/// The universal displacement `f(z) = A·z + conj(φ(z))`, annihilated by `L`
/// for every admissible material.
pub fn universal_displacement(a: Complex64, phi: &ClosedFormField) -> Result<ClosedFormField, LameError> {
    let phi_dz = phi.dz.clone().ok_or(LameError::MissingDerivative("dz"))?;
    if let Some(dzbar) = &phi.dzbar {
        for z in holomorphy_samples() {
            let v = dzbar(z);
            if v.norm() > 1e-12 * (1.0 + phi.eval(z).norm()) {
                return Err(LameError::NotHolomorphic { at: z, value: v });
            }
        }
    }
    let value = phi.value.clone();
    let zero = |_| Complex64::new(0.0, 0.0);
    let mut f =
        ClosedFormField::new(move |z| a * z + value(z).conj()).with_first(move |_| a, move |z| phi_dz(z).conj());
    f.dz_dz = Some(arc(zero));
    f.dz_dzbar = Some(arc(zero));
    f.dzbar_dzbar = phi.dz_dz.clone().map(|d2| arc(move |z| d2(z).conj()));
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn params_unit_material() {
        let p = LameParams::new(1.0, 1.0).unwrap();
        assert_eq!(p.alpha(), 1.0);
        assert_eq!(p.beta(), 2.0);
        assert_abs_diff_eq!(p.alpha_star(), -1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.beta_star(), -2.0 / 3.0, epsilon = 1e-15);
        assert_eq!(p.sigma(), 0.25);
    }

    #[test]
    fn params_zero_lambda() {
        let p = LameParams::new(0.0, 1.0).unwrap();
        assert_eq!(p.alpha(), 0.5);
        assert_eq!(p.beta(), 1.5);
        assert_eq!(p.sigma(), 0.0);
    }

    #[test]
    fn params_reject_nonphysical() {
        assert!(matches!(LameParams::new(-1.0, 1.0), Err(LameError::ParameterDomain { .. })));
        assert!(LameParams::new(1.0, 0.0).is_err());
        assert!(LameParams::new(f64::NAN, 1.0).is_err());
        // boundary of the admissible set is excluded
        assert!(LameParams::new(-2.0 / 3.0, 1.0).is_err());
    }

    #[test]
    fn poisson_ratio_consistency() {
        for &(l, m) in &[(1.0, 1.0), (0.0, 2.0), (5.0, 0.3), (-0.5, 1.0)] {
            let p = LameParams::new(l, m).unwrap();
            assert_abs_diff_eq!(p.beta() / p.alpha(), 3.0 - 4.0 * p.sigma(), epsilon = 1e-12);
        }
    }

    #[test]
    fn body_force_examples() {
        let g = body_force_to_complex(|_| 2.0, |_| 0.0);
        assert_eq!(g(c(0.3, 0.2)), c(-1.0, 0.0));
        let g = body_force_to_complex(|_| 0.0, |_| 0.0);
        assert_eq!(g(c(0.0, 0.0)), c(0.0, 0.0));
        let g = body_force_to_complex(|_| 0.0, |_| 2.0);
        assert_eq!(g(c(1.0, 1.0)), c(0.0, -1.0));
    }

    #[test]
    fn operator_on_hand_computed_fields() {
        let p = LameParams::new(1.0, 1.0).unwrap();
        // z + z̄²
        let f = ClosedFormField::monomial(1, 0).linear_combination(
            c(1.0, 0.0),
            &ClosedFormField::monomial(0, 2),
            c(1.0, 0.0),
        );
        assert_eq!(apply_lame_operator(&p, &f, c(0.4, -0.3)).unwrap(), c(0.0, 0.0));
        // |z|² → β
        let f = ClosedFormField::monomial(1, 1);
        assert_eq!(apply_lame_operator(&p, &f, c(0.7, 0.1)).unwrap(), c(2.0, 0.0));
        // z² z̄ at 1+i → 2(α+β)z
        let f = ClosedFormField::monomial(2, 1);
        let v = apply_lame_operator(&p, &f, c(1.0, 1.0)).unwrap();
        assert_abs_diff_eq!(v.re, 6.0, epsilon = 1e-14);
        assert_abs_diff_eq!(v.im, 6.0, epsilon = 1e-14);
    }

    #[test]
    fn operator_requires_second_derivatives() {
        let p = LameParams::default();
        let f = ClosedFormField::new(|z| z);
        assert_eq!(apply_lame_operator(&p, &f, c(0.0, 0.0)), Err(LameError::MissingDerivative("dz_dz")));
    }

    #[test]
    fn fd_examples() {
        let p = LameParams::new(1.0, 1.0).unwrap();
        let abs2 = |z: Complex64| Complex64::new(z.norm_sqr(), 0.0);
        let v = apply_lame_operator_fd(&p, abs2, c(0.3, 0.1), 1e-3).unwrap();
        assert!((v - 2.0).norm() < 1e-5);
        let v = apply_lame_operator_fd(&p, |z| z, c(-0.2, 0.9), 1e-3).unwrap();
        assert!(v.norm() < 1e-8);
        let v = apply_lame_operator_fd(&p, |z: Complex64| z + z.conj() * z.conj(), c(0.5, 0.5), 1e-3).unwrap();
        assert!(v.norm() < 1e-6);
    }

    #[test]
    fn fd_second_order_rate() {
        let p = LameParams::new(1.0, 1.0).unwrap();
        // f = exp(x) sin(y) + i x^4: not in the kernel, C^∞
        let f = |z: Complex64| Complex64::new(z.re.exp() * z.im.sin(), z.re.powi(4) * z.im);
        let (x, y) = (0.3f64, 0.2f64);
        // exact second partials
        let xx = Complex64::new(x.exp() * y.sin(), 12.0 * x * x * y);
        let yy = Complex64::new(-x.exp() * y.sin(), 0.0);
        let xy = Complex64::new(x.exp() * y.cos(), 4.0 * x.powi(3));
        let exact = SecondPartials { xx, xy, yy };
        let exact = p.combine(exact.dz_dz(), exact.dz_dzbar());
        let z = c(x, y);
        let e1 = (apply_lame_operator_fd(&p, f, z, 0.02).unwrap() - exact).norm();
        let e2 = (apply_lame_operator_fd(&p, f, z, 0.01).unwrap() - exact).norm();
        let ratio = e1 / e2;
        assert!((ratio - 4.0).abs() < 0.8, "ratio {ratio}");
    }

    #[test]
    fn fd_stencil_guard() {
        let p = LameParams::default();
        let r = apply_lame_operator_fd_within(&p, |z| z, c(0.99, 0.0), 0.05, |w| w.norm() < 1.0);
        assert!(matches!(r, Err(LameError::StencilOutOfDomain { .. })));
        assert!(matches!(apply_lame_operator_fd(&p, |z| z, c(0.0, 0.0), 0.0), Err(LameError::BadStep(_))));
    }

    #[test]
    fn universal_displacements() {
        let z2 = ClosedFormField::monomial(2, 0);
        let f = universal_displacement(c(1.0, 0.0), &z2).unwrap();
        for p in [LameParams::new(1.0, 1.0).unwrap(), LameParams::new(2.0, 3.0).unwrap()] {
            for z in [c(0.1, 0.2), c(-1.0, 0.5)] {
                assert_eq!(apply_lame_operator(&p, &f, z).unwrap(), c(0.0, 0.0));
                assert!((f.eval(z) - (z + z.conj() * z.conj())).norm() < 1e-14);
            }
        }
        let zero = universal_displacement(c(0.0, 0.0), &ClosedFormField::constant(c(0.0, 0.0))).unwrap();
        assert_eq!(zero.eval(c(0.3, 0.3)), c(0.0, 0.0));

        let f = universal_displacement(c(0.0, 1.0), &ClosedFormField::exp()).unwrap();
        let p = LameParams::new(1.0, 1.0).unwrap();
        let fd = apply_lame_operator_fd(&p, |z| f.eval(z), c(0.5, 0.0), default_step(c(0.5, 0.0))).unwrap();
        assert!(fd.norm() < 1e-8, "{fd}");
    }

    #[test]
    fn universal_rejects_non_holomorphic() {
        let r = universal_displacement(c(1.0, 0.0), &ClosedFormField::monomial(1, 1));
        assert!(matches!(r, Err(LameError::NotHolomorphic { .. })));
        let r = universal_displacement(c(1.0, 0.0), &ClosedFormField::new(|z| z));
        assert_eq!(r.unwrap_err(), LameError::MissingDerivative("dz"));
    }

    #[test]
    fn laplacian_consistency_of_monomials() {
        let pts = [c(0.3, 0.4), c(-0.5, 0.1), c(0.8, -0.7)];
        for (p, q) in [(1, 1), (2, 1), (3, 2), (0, 2)] {
            let f = ClosedFormField::monomial(p, q);
            assert!(f.laplacian_mismatch(&pts, 1e-3).unwrap() < 1e-4);
        }
    }

    #[test]
    fn universal_fields_have_constant_dz() {
        let f = universal_displacement(c(0.3, -0.2), &ClosedFormField::exp()).unwrap();
        let pts = [c(0.0, 0.0), c(0.5, 0.5), c(-0.7, 0.2)];
        let d0 = f.dz(pts[0]).unwrap();
        for z in pts {
            // finite-difference ∂z, independent of the stored derivative
            let h = 1e-5;
            let dx = (f.eval(z + h) - f.eval(z - h)) / (2.0 * h);
            let dy = (f.eval(z + Complex64::i() * h) - f.eval(z - Complex64::i() * h)) / (2.0 * h);
            let dz = (dx - Complex64::i() * dy) / 2.0;
            assert!((dz - d0).norm() < 1e-8);
        }
    }
}
