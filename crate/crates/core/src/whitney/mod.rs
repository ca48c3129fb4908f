//! First-order Whitney jets on a curve and their compactly supported
//! `C^{1,ν}` extension to the plane.

mod extension;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::geometry::{Curve, GeometryError};
use crate::lame::{ClosedFormField, LameError};

pub use extension::{extend, lp_exponent, lp_norm_estimate, Derivatives, ExtendOptions, Extension, LpEstimate};

/// Above this many vertices [`check_jet`] samples pairs instead of visiting all of them.
pub const ALL_PAIRS_LIMIT: usize = 2000;
/// Number of random pairs drawn when sampling.
pub const SAMPLED_PAIRS: usize = 2_000_000;
/// Seed of the pair sampler, so reports are reproducible.
pub const SAMPLER_SEED: u64 = 42;
/// Neighbours (by vertex index) that are always checked when sampling.
const NEIGHBOUR_REACH: usize = 8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WhitneyError {
    #[error("jet component {component} has {got} values, curve has {expected} vertices")]
    LengthMismatch { component: &'static str, expected: usize, got: usize },
    #[error("nu must lie in (0, 1), got {0}")]
    InvalidNu(f64),
    #[error("Lipschitz constant must be finite and nonnegative, got {0}")]
    InvalidConstant(f64),
    #[error("jet value at vertex {0} is not finite")]
    NotFinite(usize),
    #[error(
        "jet is not in Lip(1+nu): smallest admissible constant {smallest_c:.4e} vs {lip_constant:.4e}{}",
        if *scale_divergent { ", ratios grow at fine scales" } else { "" }
    )]
    JetInvalid { smallest_c: f64, lip_constant: f64, scale_divergent: bool },
    #[error("invalid extension option: {0}")]
    InvalidOption(String),
    #[error(transparent)]
    Lame(#[from] LameError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Values `f0`, `f1`, `f2` at every curve vertex, standing in for `f`, `∂_z f`
/// and `∂_z̄ f` on the curve.
#[derive(Debug, Clone)]
pub struct WhitneyJet {
    curve: Curve,
    f0: Vec<Complex64>,
    f1: Vec<Complex64>,
    f2: Vec<Complex64>,
    nu: f64,
    lip_constant: f64,
}

impl WhitneyJet {
    pub fn new(
        curve: &Curve,
        f0: Vec<Complex64>,
        f1: Vec<Complex64>,
        f2: Vec<Complex64>,
        nu: f64,
        lip_constant: f64,
    ) -> Result<Self, WhitneyError> {
        let n = curve.vertices().len();
        for (component, v) in [("f0", &f0), ("f1", &f1), ("f2", &f2)] {
            if v.len() != n {
                return Err(WhitneyError::LengthMismatch { component, expected: n, got: v.len() });
            }
        }
        if !(nu > 0.0 && nu < 1.0) {
            return Err(WhitneyError::InvalidNu(nu));
        }
        if !(lip_constant >= 0.0 && lip_constant.is_finite()) {
            return Err(WhitneyError::InvalidConstant(lip_constant));
        }
        for i in 0..n {
            if !(finite(f0[i]) && finite(f1[i]) && finite(f2[i])) {
                return Err(WhitneyError::NotFinite(i));
            }
        }
        Ok(Self { curve: curve.clone(), f0, f1, f2, nu, lip_constant })
    }

    /// Jet of `f` and its two first derivatives; the constant is set to the
    /// smallest admissible one found by [`check_jet`].
    pub fn from_functions<F, A, B>(curve: &Curve, f: F, dz: A, dzbar: B, nu: f64) -> Result<Self, WhitneyError>
    where
        F: Fn(Complex64) -> Complex64,
        A: Fn(Complex64) -> Complex64,
        B: Fn(Complex64) -> Complex64,
    {
        let v = curve.vertices();
        let jet = Self::new(
            curve,
            v.iter().map(|&t| f(t)).collect(),
            v.iter().map(|&t| dz(t)).collect(),
            v.iter().map(|&t| dzbar(t)).collect(),
            nu,
            0.0,
        )?;
        let c = check_jet(&jet).smallest_c;
        Ok(jet.with_lip_constant(c))
    }

    /// Jet traced from a field that carries its first derivatives.
    pub fn from_field(curve: &Curve, field: &ClosedFormField, nu: f64) -> Result<Self, WhitneyError> {
        if !field.has_first() {
            return Err(LameError::MissingDerivative("dz/dzbar").into());
        }
        let v = curve.vertices();
        let mut f1 = Vec::with_capacity(v.len());
        let mut f2 = Vec::with_capacity(v.len());
        for &t in v {
            f1.push(field.dz(t)?);
            f2.push(field.dzbar(t)?);
        }
        let jet = Self::new(curve, v.iter().map(|&t| field.eval(t)).collect(), f1, f2, nu, 0.0)?;
        let c = check_jet(&jet).smallest_c;
        Ok(jet.with_lip_constant(c))
    }

    /// The jet `{value, 0, 0}`.
    pub fn constant(curve: &Curve, value: Complex64, nu: f64) -> Result<Self, WhitneyError> {
        let n = curve.vertices().len();
        let zero = Complex64::new(0.0, 0.0);
        Self::new(curve, vec![value; n], vec![zero; n], vec![zero; n], nu, 0.0)
    }

    pub fn with_lip_constant(mut self, c: f64) -> Self {
        self.lip_constant = c;
        self
    }

    pub fn curve(&self) -> &Curve {
        &self.curve
    }
    pub fn f0(&self) -> &[Complex64] {
        &self.f0
    }
    pub fn f1(&self) -> &[Complex64] {
        &self.f1
    }
    pub fn f2(&self) -> &[Complex64] {
        &self.f2
    }
    pub fn nu(&self) -> f64 {
        self.nu
    }
    pub fn lip_constant(&self) -> f64 {
        self.lip_constant
    }

    /// `f0(τ) + (z-τ) f1(τ) + conj(z-τ) f2(τ)` at vertex `k`.
    pub fn polynomial(&self, k: usize, z: Complex64) -> Complex64 {
        let w = z - self.curve.vertices()[k];
        self.f0[k] + w * self.f1[k] + w.conj() * self.f2[k]
    }
}

fn finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Outcome of [`check_jet`].
#[derive(Debug, Clone, PartialEq)]
pub struct JetReport {
    pub valid: bool,
    /// `max(c_taylor, c_f1, c_f2)`.
    pub smallest_c: f64,
    /// Worst `|f0(t)-f0(τ)-(t-τ)f1(τ)-conj(t-τ)f2(τ)| / |t-τ|^{1+ν}`.
    pub c_taylor: f64,
    /// Worst `|f1(t)-f1(τ)| / |t-τ|^ν`.
    pub c_f1: f64,
    /// Worst `|f2(t)-f2(τ)| / |t-τ|^ν`.
    pub c_f2: f64,
    /// Vertex pair `(t, τ)` attaining `smallest_c`.
    pub worst_pair: Option<(usize, usize)>,
    pub pairs_checked: usize,
    pub sampled: bool,
    /// Worst ratio over pairs closer than two segment lengths.
    pub c_fine: f64,
    /// Worst ratio over pairs at least sixteen segment lengths apart, if any.
    pub c_coarse: Option<f64>,
    /// The ratios keep growing as pairs get closer (`c_fine > 2·c_coarse`), so
    /// no constant survives refinement of the curve.
    pub scale_divergent: bool,
    pub lip_constant: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Worst {
    taylor: f64,
    f1: f64,
    f2: f64,
    fine: f64,
    coarse: f64,
    any_coarse: bool,
    // (ratio, t, τ) of the overall worst pair; ties go to the smaller indices
    pair: Option<(f64, usize, usize)>,
}

impl Worst {
    fn merge(mut self, o: Worst) -> Worst {
        self.taylor = self.taylor.max(o.taylor);
        self.f1 = self.f1.max(o.f1);
        self.f2 = self.f2.max(o.f2);
        self.fine = self.fine.max(o.fine);
        self.coarse = self.coarse.max(o.coarse);
        self.any_coarse |= o.any_coarse;
        self.pair = match (self.pair, o.pair) {
            (Some(a), Some(b)) => Some(if b.0 > a.0 || (b.0 == a.0 && (b.1, b.2) < (a.1, a.2)) { b } else { a }),
            (a, b) => a.or(b),
        };
        self
    }
}

struct PairCheck<'a> {
    jet: &'a WhitneyJet,
    fine: f64,
    coarse: f64,
}

impl PairCheck<'_> {
    /// Both orientations of the pair `{i, j}`.
    fn visit(&self, i: usize, j: usize, w: &mut Worst) {
        let jet = self.jet;
        let v = jet.curve.vertices();
        let d = v[i] - v[j];
        let r = d.norm();
        if r == 0.0 {
            return;
        }
        let nu = jet.nu;
        let (r_nu, r_1nu) = (r.powf(nu), r.powf(1.0 + nu));
        let rem = |t: usize, tau: usize| {
            let w = v[t] - v[tau];
            (jet.f0[t] - jet.f0[tau] - w * jet.f1[tau] - w.conj() * jet.f2[tau]).norm()
        };
        let taylor = rem(i, j).max(rem(j, i)) / r_1nu;
        let f1 = (jet.f1[i] - jet.f1[j]).norm() / r_nu;
        let f2 = (jet.f2[i] - jet.f2[j]).norm() / r_nu;
        let worst = taylor.max(f1).max(f2);
        w.taylor = w.taylor.max(taylor);
        w.f1 = w.f1.max(f1);
        w.f2 = w.f2.max(f2);
        if r <= self.fine {
            w.fine = w.fine.max(worst);
        }
        if r >= self.coarse {
            w.coarse = w.coarse.max(worst);
            w.any_coarse = true;
        }
        let (a, b) = (i.min(j), i.max(j));
        let better = match w.pair {
            None => true,
            Some((x, p, q)) => worst > x || (worst == x && (a, b) < (p, q)),
        };
        if better {
            w.pair = Some((worst, a, b));
        }
    }
}

/// Checks both defining inequalities of `Lip(1+ν, γ)` over vertex pairs and
/// reports the smallest constant that works for the pairs visited.
///
/// Up to [`ALL_PAIRS_LIMIT`] vertices every pair is visited; beyond that
/// [`SAMPLED_PAIRS`] uniform pairs are drawn (seeded) together with all pairs
/// of index distance at most eight, so fine scales are never missed.
pub fn check_jet(jet: &WhitneyJet) -> JetReport {
    let v = jet.curve.vertices();
    let n = v.len();
    let h = jet.curve.max_segment_length();
    let pc = PairCheck { jet, fine: 2.0 * h, coarse: 16.0 * h };
    let sampled = n > ALL_PAIRS_LIMIT;
    let (worst, pairs) = if !sampled {
        let w = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut w = Worst::default();
                for j in i + 1..n {
                    pc.visit(i, j, &mut w);
                }
                w
            })
            .reduce(Worst::default, Worst::merge);
        (w, n * (n - 1) / 2)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(SAMPLER_SEED);
        let mut list: Vec<(usize, usize)> = Vec::with_capacity(SAMPLED_PAIRS + n * NEIGHBOUR_REACH);
        while list.len() < SAMPLED_PAIRS {
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if i != j {
                list.push((i, j));
            }
        }
        for i in 0..n {
            for k in 1..=NEIGHBOUR_REACH {
                list.push((i, (i + k) % n));
            }
        }
        let w = list
            .par_chunks(4096)
            .map(|chunk| {
                let mut w = Worst::default();
                for &(i, j) in chunk {
                    pc.visit(i, j, &mut w);
                }
                w
            })
            .reduce(Worst::default, Worst::merge);
        (w, list.len())
    };
    let smallest_c = worst.taylor.max(worst.f1).max(worst.f2);
    let c_coarse = worst.any_coarse.then_some(worst.coarse);
    // Ratios of a jet that is exactly polynomial are pure round-off, which
    // grows like h^{-1-ν} at fine scale and would read as divergence.
    let magnitude = |xs: &[Complex64]| xs.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let size = magnitude(&jet.f0) + jet.curve.nominal_diameter() * magnitude(&jet.f1).max(magnitude(&jet.f2));
    let noise = 1e3 * f64::EPSILON * size / h.powf(1.0 + jet.nu);
    let scale_divergent = matches!(c_coarse, Some(cc) if worst.fine > 2.0 * cc && worst.fine > noise);
    JetReport {
        valid: smallest_c <= jet.lip_constant * (1.0 + 1e-12) && !scale_divergent,
        smallest_c,
        c_taylor: worst.taylor,
        c_f1: worst.f1,
        c_f2: worst.f2,
        worst_pair: worst.pair.map(|(_, a, b)| (a, b)),
        pairs_checked: pairs,
        sampled,
        c_fine: worst.fine,
        c_coarse,
        scale_divergent,
        lip_constant: jet.lip_constant,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unit_circle(n: usize) -> Curve {
        Curve::circle(c(0.0, 0.0), 1.0, n).unwrap()
    }

    #[test]
    fn square_jet_on_circle() {
        let curve = unit_circle(512);
        let jet = WhitneyJet::from_functions(&curve, |t| t * t, |t| 2.0 * t, |_| c(0.0, 0.0), 0.9).unwrap();
        let rep = check_jet(&jet);
        assert!(rep.valid, "{rep:?}");
        assert!(!rep.sampled);
        // the remainder is exactly (t-τ)², so the ratio is |t-τ|^{1-ν} ≤ 2^{0.1}
        let bound = curve
            .vertices()
            .iter()
            .map(|a| curve.vertices().iter().map(|b| (a - b).norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
            .powf(0.1);
        assert!(rep.c_taylor <= bound * (1.0 + 1e-9), "{} vs {bound}", rep.c_taylor);
        assert!(rep.c_f2 == 0.0);
    }

    #[test]
    fn constant_jet_admits_any_constant() {
        let curve = Curve::koch_snowflake(3, 1.0).unwrap();
        let jet = WhitneyJet::constant(&curve, c(1.0, 0.0), 0.5).unwrap().with_lip_constant(1e-300);
        let rep = check_jet(&jet);
        assert!(rep.valid);
        assert_eq!(rep.smallest_c, 0.0);
    }

    #[test]
    fn conjugate_jet_is_rejected() {
        let curve = unit_circle(1024);
        let zero = |_: Complex64| c(0.0, 0.0);
        let jet = WhitneyJet::from_functions(&curve, |t| t.conj(), zero, zero, 0.5).unwrap();
        let rep = check_jet(&jet);
        assert!(!rep.valid && rep.scale_divergent, "{rep:?}");
        // antipodal pairs: remainder |conj(t-τ)| = 2 against 2^{1.5}
        assert!(rep.c_taylor >= 2f64.powf(-0.5));
        let strict = WhitneyJet::from_functions(&curve, |t| t.conj(), zero, zero, 0.5).unwrap().with_lip_constant(1.0);
        assert!(!check_jet(&strict).valid);
    }

    #[test]
    fn sampled_check_is_reproducible() {
        let curve = Curve::koch_snowflake(5, 1.0).unwrap();
        assert!(curve.vertices().len() > ALL_PAIRS_LIMIT);
        let jet = WhitneyJet::from_functions(&curve, |t| t * t, |t| 2.0 * t, |_| c(0.0, 0.0), 0.8).unwrap();
        let (a, b) = (check_jet(&jet), check_jet(&jet));
        assert!(a.sampled && a.valid);
        assert_eq!(a, b);
        assert_eq!(a.pairs_checked, SAMPLED_PAIRS + NEIGHBOUR_REACH * curve.vertices().len());
    }

    #[test]
    fn field_jet_matches_function_jet() {
        let curve = unit_circle(64);
        let field = ClosedFormField::monomial(2, 1);
        let a = WhitneyJet::from_field(&curve, &field, 0.7).unwrap();
        let b =
            WhitneyJet::from_functions(&curve, |t| t * t * t.conj(), |t| 2.0 * t * t.conj(), |t| t * t, 0.7).unwrap();
        for k in 0..64 {
            assert!((a.f0()[k] - b.f0()[k]).norm() < 1e-14);
            assert!((a.f1()[k] - b.f1()[k]).norm() < 1e-14);
            assert!((a.f2()[k] - b.f2()[k]).norm() < 1e-14);
        }
        assert!(check_jet(&a).valid);
    }

    #[test]
    fn rejects_malformed_jets() {
        let curve = unit_circle(16);
        let z = vec![c(0.0, 0.0); 16];
        assert!(matches!(
            WhitneyJet::new(&curve, z.clone(), z.clone(), vec![c(0.0, 0.0); 3], 0.5, 1.0),
            Err(WhitneyError::LengthMismatch { component: "f2", .. })
        ));
        assert!(matches!(
            WhitneyJet::new(&curve, z.clone(), z.clone(), z.clone(), 1.0, 1.0),
            Err(WhitneyError::InvalidNu(_))
        ));
        let mut bad = z.clone();
        bad[3] = c(f64::NAN, 0.0);
        assert!(matches!(WhitneyJet::new(&curve, bad, z.clone(), z, 0.5, 1.0), Err(WhitneyError::NotFinite(3))));
        let no_derivs = ClosedFormField::new(|z| z);
        assert!(WhitneyJet::from_field(&curve, &no_derivs, 0.5).is_err());
    }
}
