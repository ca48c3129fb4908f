//! Classical Whitney extension of a first-order jet.
//!
//! The complement of the curve inside a box of side `4R` (with `R` the curve's
//! radius about its bounding-box centre) is cut into Whitney squares. Each
//! square carries the jet polynomial of the vertex nearest its centre and a
//! tensor-product bump that is 1 on the square and vanishes a fixed fraction
//! of a side beyond it. The blend is multiplied by a radial cutoff that is 1
//! inside `1.5R` and 0 beyond `2R`. Closer to the curve than the finest
//! squares reach, the nearest vertex's polynomial is used as is, which makes
//! the trace exact at the vertices.

use std::sync::Arc;

use num_complex::Complex64;
use rustc_hash::FxHashMap;

use super::{check_jet, WhitneyError, WhitneyJet};
use crate::autodiff::{smooth_step, Dual2, Taylor2};
use crate::geometry::{decompose_box, Curve, DomainDecomposition, Region, MAX_DECOMPOSITION_DEPTH};
use crate::lame::{ClosedFormField, LameParams};
use crate::sum::par_sum;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtendOptions {
    /// Depth of the Whitney decomposition of the complement.
    pub depth: u32,
    /// How far each bump reaches past its square, as a fraction of the side.
    pub overlap: f64,
    /// Cutoff radii in units of the curve radius.
    pub cutoff_inner: f64,
    pub cutoff_outer: f64,
}

impl Default for ExtendOptions {
    fn default() -> Self {
        Self { depth: 11, overlap: 0.125, cutoff_inner: 1.5, cutoff_outer: 2.0 }
    }
}

impl ExtendOptions {
    fn validate(&self) -> Result<(), WhitneyError> {
        if self.depth > MAX_DECOMPOSITION_DEPTH {
            return Err(WhitneyError::InvalidOption(format!("depth {} exceeds {MAX_DECOMPOSITION_DEPTH}", self.depth)));
        }
        // only the cells next to the one holding z are searched on each level
        if !(self.overlap > 0.0 && self.overlap < 0.5) {
            return Err(WhitneyError::InvalidOption(format!("overlap must lie in (0, 0.5), got {}", self.overlap)));
        }
        if !(self.cutoff_inner >= 1.0 && self.cutoff_outer > self.cutoff_inner && self.cutoff_outer <= 2.0) {
            return Err(WhitneyError::InvalidOption(format!(
                "need 1 <= cutoff_inner < cutoff_outer <= 2, got {} and {}",
                self.cutoff_inner, self.cutoff_outer
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    center: Complex64,
    half: f64,
    anchor: u32,
}

#[derive(Debug)]
struct Inner {
    jet: WhitneyJet,
    options: ExtendOptions,
    decomposition: DomainDecomposition,
    pieces: Vec<Piece>,
    lookup: FxHashMap<(u32, u32, u32), u32>,
    levels: std::ops::RangeInclusive<u32>,
    center: Complex64,
    radius: f64,
}

/// The extended field `f̃` with exact derivatives up to order two.
#[derive(Debug, Clone)]
pub struct Extension {
    inner: Arc<Inner>,
}

/// Value and Wirtinger derivatives of `f̃` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivatives {
    pub value: Complex64,
    pub dz: Complex64,
    pub dzbar: Complex64,
    pub dz_dz: Complex64,
    pub dz_dzbar: Complex64,
    pub dzbar_dzbar: Complex64,
}

impl Derivatives {
    /// Largest of the three second Wirtinger derivatives in modulus.
    pub fn second_norm(&self) -> f64 {
        self.dz_dz.norm().max(self.dz_dzbar.norm()).max(self.dzbar_dzbar.norm())
    }
}

/// Builds the extension; fails with [`WhitneyError::JetInvalid`] when
/// [`check_jet`] rejects the jet.
pub fn extend(jet: &WhitneyJet, options: ExtendOptions) -> Result<Extension, WhitneyError> {
    options.validate()?;
    let report = check_jet(jet);
    if !report.valid {
        return Err(WhitneyError::JetInvalid {
            smallest_c: report.smallest_c,
            lip_constant: report.lip_constant,
            scale_divergent: report.scale_divergent,
        });
    }
    let curve = jet.curve();
    let center = curve.bbox_center();
    let radius = curve.radius();
    let decomposition = decompose_box(curve, center, 4.0 * radius, Region::Complement, options.depth)?;
    let mut pieces = Vec::with_capacity(decomposition.squares().len());
    let mut lookup = FxHashMap::default();
    let (mut lo, mut hi) = (u32::MAX, 0);
    for q in decomposition.squares() {
        let (anchor, _) = curve.nearest_vertex(q.center);
        lookup.insert((q.depth, q.ix, q.iy), pieces.len() as u32);
        pieces.push(Piece { center: q.center, half: q.half_side(), anchor: anchor as u32 });
        lo = lo.min(q.depth);
        hi = hi.max(q.depth);
    }
    // empty (MAX..=0) when there are no squares
    let levels = lo..=hi;
    Ok(Extension {
        inner: Arc::new(Inner { jet: jet.clone(), options, decomposition, pieces, lookup, levels, center, radius }),
    })
}

/// One-dimensional bump in `x`: 1 for `|x-c| ≤ half`, 0 beyond `reach·half`.
fn bump(x: f64, c: f64, half: f64, reach: f64) -> Dual2 {
    let u = (x - c) / half;
    let sign = if u < 0.0 { -1.0 } else { 1.0 };
    let w = reach - 1.0;
    smooth_step(Dual2 { v: (reach - u.abs()) / w, d: -sign / (half * w), dd: 0.0 })
}

/// `ψ(|z - c|)`, 1 up to `r0` and 0 from `r1`; `None` where it is identically 1.
fn radial_cutoff(z: Complex64, c: Complex64, r0: f64, r1: f64) -> Option<Taylor2> {
    let (x, y) = (z.re - c.re, z.im - c.im);
    let r = x.hypot(y);
    if r <= r0 {
        return None;
    }
    let w = r1 - r0;
    let s = smooth_step(Dual2 { v: (r1 - r) / w, d: 1.0, dd: 0.0 });
    let (p1, p2) = (-s.d / w, s.dd / (w * w));
    let re = |t: f64| Complex64::new(t, 0.0);
    let (r2, r3) = (r * r, r * r * r);
    Some(Taylor2 {
        v: re(s.v),
        x: re(p1 * x / r),
        y: re(p1 * y / r),
        xx: re(p2 * x * x / r2 + p1 * y * y / r3),
        xy: re(p2 * x * y / r2 - p1 * x * y / r3),
        yy: re(p2 * y * y / r2 + p1 * x * x / r3),
    })
}

impl Extension {
    pub fn jet(&self) -> &WhitneyJet {
        &self.inner.jet
    }

    pub fn curve(&self) -> &Curve {
        self.inner.jet.curve()
    }

    pub fn options(&self) -> ExtendOptions {
        self.inner.options
    }

    /// The Whitney squares of the complement that carry the blend.
    pub fn decomposition(&self) -> &DomainDecomposition {
        &self.inner.decomposition
    }

    /// `f̃` vanishes outside the disk of this radius about [`Extension::center`].
    pub fn support_radius(&self) -> f64 {
        self.inner.options.cutoff_outer * self.inner.radius
    }

    pub fn center(&self) -> Complex64 {
        self.inner.center
    }

    fn anchor_poly(&self, k: usize, z: Complex64) -> Taylor2 {
        let jet = &self.inner.jet;
        Taylor2::affine(jet.f0()[k], jet.f1()[k], jet.f2()[k], z, jet.curve().vertices()[k])
    }

    /// Squares whose bump support meets the box `center ± half`.
    fn candidates(&self, center: Complex64, half: f64) -> Vec<u32> {
        let inner = &*self.inner;
        let reach = 1.0 + 2.0 * inner.options.overlap;
        let root = inner.decomposition.root();
        let lo = inner.decomposition.root_lo();
        let mut out = Vec::new();
        for k in inner.levels.clone() {
            let n = 1i64 << k;
            let side = root.side / n as f64;
            let pad = half + reach * side / 2.0;
            // squares of this level have centres at lo + (i + 1/2)·side
            let range = |c: f64, l: f64| {
                let first = ((c - pad - l) / side - 0.5).ceil().max(0.0) as i64;
                let last = (((c + pad - l) / side - 0.5).floor() as i64).min(n - 1);
                first..=last
            };
            for iy in range(center.im, lo.im) {
                for ix in range(center.re, lo.re) {
                    if let Some(&idx) = inner.lookup.get(&(k, ix as u32, iy as u32)) {
                        out.push(idx);
                    }
                }
            }
        }
        out
    }

    /// The candidates whose bump is nonzero at `z`, with their bumps.
    fn bumps(&self, z: Complex64, candidates: &[u32]) -> Vec<(u32, Taylor2)> {
        let reach = 1.0 + 2.0 * self.inner.options.overlap;
        let mut out = Vec::new();
        for &idx in candidates {
            let p = self.inner.pieces[idx as usize];
            let bx = bump(z.re, p.center.re, p.half, reach);
            if bx.v == 0.0 {
                continue;
            }
            let by = bump(z.im, p.center.im, p.half, reach);
            if by.v == 0.0 {
                continue;
            }
            out.push((idx, Taylor2::tensor(bx, by)));
        }
        out
    }

    fn active(&self, z: Complex64) -> Vec<(u32, Taylor2)> {
        self.bumps(z, &self.candidates(z, 0.0))
    }

    fn blend(&self, z: Complex64, active: &[(u32, Taylor2)]) -> Taylor2 {
        let inner = &*self.inner;
        let zero = Taylor2::constant(Complex64::new(0.0, 0.0));
        let nearest = || self.curve().nearest_vertex(z).0;
        if active.is_empty() {
            return self.anchor_poly(nearest(), z);
        }
        let sum = active.iter().fold(zero, |acc, (_, b)| acc + *b);
        // Inside any square S = Σ b_Q ≥ 1 and the blend is the normalised
        // partition P_r + Σ (P_Q - P_r) b_Q / S, exact for identical
        // polynomials. In the layer next to the curve that no square covers,
        // N(S) = S + (1-S)³ fades the squares out towards the polynomial of
        // the nearest vertex.
        let (reference, norm) = if sum.v.re >= 1.0 {
            (inner.pieces[active[0].0 as usize].anchor as usize, sum)
        } else {
            let gap = Taylor2::constant(Complex64::new(1.0, 0.0)) - sum;
            (nearest(), sum + gap * gap * gap)
        };
        let p_ref = self.anchor_poly(reference, z);
        let mut num = zero;
        for (idx, b) in active {
            let a = inner.pieces[*idx as usize].anchor as usize;
            if a != reference {
                num = num + (self.anchor_poly(a, z) - p_ref) * *b;
            }
        }
        p_ref + num / norm
    }

    fn cut_off(&self, z: Complex64, t: Taylor2) -> Taylor2 {
        let inner = &*self.inner;
        let r0 = inner.options.cutoff_inner * inner.radius;
        match radial_cutoff(z, inner.center, r0, inner.options.cutoff_outer * inner.radius) {
            None => t,
            Some(psi) => t * psi,
        }
    }

    fn taylor(&self, z: Complex64) -> Taylor2 {
        let inner = &*self.inner;
        if (z - inner.center).norm() >= inner.options.cutoff_outer * inner.radius {
            return Taylor2::constant(Complex64::new(0.0, 0.0));
        }
        self.cut_off(z, self.blend(z, &self.active(z)))
    }

    /// Average of `L f̃` over the square `center ± half`, from a midpoint grid
    /// with `samples_per_side` points per side of the smallest Whitney square
    /// that reaches the cell (at most `max_n` per cell side). Cells on which
    /// `f̃` is a single affine polynomial give exactly zero.
    pub fn cell_average_lame(
        &self,
        params: &LameParams,
        center: Complex64,
        half: f64,
        samples_per_side: f64,
        max_n: usize,
    ) -> Complex64 {
        let inner = &*self.inner;
        let zero = Complex64::new(0.0, 0.0);
        let cand = self.candidates(center, half);
        if cand.is_empty() {
            return zero;
        }
        let within_cutoff = (center - inner.center).norm() + half * std::f64::consts::SQRT_2
            <= inner.options.cutoff_inner * inner.radius;
        let anchor = inner.pieces[cand[0] as usize].anchor;
        let single = cand.iter().all(|&i| inner.pieces[i as usize].anchor == anchor)
            && cand.iter().any(|&i| {
                let p = inner.pieces[i as usize];
                (center.re - p.center.re).abs() + half <= p.half && (center.im - p.center.im).abs() + half <= p.half
            });
        if within_cutoff && single {
            return zero;
        }
        let smallest = cand.iter().map(|&i| 2.0 * inner.pieces[i as usize].half).fold(f64::INFINITY, f64::min);
        let n = ((samples_per_side * 2.0 * half / smallest).ceil() as usize).clamp(1, max_n.max(1));
        let step = 2.0 * half / n as f64;
        let lo = center - Complex64::new(half, half);
        let mut acc = zero;
        for j in 0..n {
            for i in 0..n {
                let z = lo + Complex64::new((i as f64 + 0.5) * step, (j as f64 + 0.5) * step);
                let t = self.cut_off(z, self.blend(z, &self.bumps(z, &cand)));
                acc += params.combine(t.dz_dz(), t.dz_dzbar());
            }
        }
        acc / (n * n) as f64
    }

    pub fn derivatives(&self, z: Complex64) -> Derivatives {
        let t = self.taylor(z);
        Derivatives {
            value: t.v,
            dz: t.dz(),
            dzbar: t.dzbar(),
            dz_dz: t.dz_dz(),
            dz_dzbar: t.dz_dzbar(),
            dzbar_dzbar: t.dzbar_dzbar(),
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.taylor(z).v
    }
    pub fn dz(&self, z: Complex64) -> Complex64 {
        self.taylor(z).dz()
    }
    pub fn dzbar(&self, z: Complex64) -> Complex64 {
        self.taylor(z).dzbar()
    }
    pub fn dz_dz(&self, z: Complex64) -> Complex64 {
        self.taylor(z).dz_dz()
    }
    pub fn dz_dzbar(&self, z: Complex64) -> Complex64 {
        self.taylor(z).dz_dzbar()
    }
    pub fn dzbar_dzbar(&self, z: Complex64) -> Complex64 {
        self.taylor(z).dzbar_dzbar()
    }

    /// `L f̃ = α·conj(∂z∂z f̃) + β·∂z∂z̄ f̃`, exact.
    pub fn lame(&self, params: &LameParams, z: Complex64) -> Complex64 {
        let t = self.taylor(z);
        params.combine(t.dz_dz(), t.dz_dzbar())
    }

    /// `Σ_Q φ_Q(z)` for the normalised bumps, or `None` where no square reaches
    /// (next to the curve, where the nearest vertex's polynomial is used).
    pub fn partition_sum(&self, z: Complex64) -> Option<f64> {
        let active = self.active(z);
        if active.is_empty() {
            return None;
        }
        let s: f64 = active.iter().map(|(_, b)| b.v.re).sum();
        Some(active.iter().map(|(_, b)| b.v.re / s).sum())
    }

    /// True when `z` lies in the blended region rather than the unresolved
    /// layer along the curve.
    pub fn is_blended(&self, z: Complex64) -> bool {
        !self.active(z).is_empty()
    }

    /// The extension as a field with exact first and second derivatives.
    pub fn to_field(&self) -> ClosedFormField {
        let (a, b, c, d, e, f) = (self.clone(), self.clone(), self.clone(), self.clone(), self.clone(), self.clone());
        ClosedFormField::new(move |z| a.eval(z)).with_first(move |z| b.dz(z), move |z| c.dzbar(z)).with_second(
            move |z| d.dz_dz(z),
            move |z| e.dz_dzbar(z),
            move |z| f.dzbar_dzbar(z),
        )
    }
}

/// `p = (2-d)/(1-ν)`.
pub fn lp_exponent(d: f64, nu: f64) -> f64 {
    (2.0 - d) / (1.0 - nu)
}

/// Square-wise estimate of `∫ |∂²f̃|^p`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpEstimate {
    pub p: f64,
    /// `Σ_Q (sup_Q |∂²f̃|)^p · area(Q)`.
    pub total: f64,
    /// One term per accepted square, in decomposition order.
    pub per_square: Vec<f64>,
    /// Terms summed by square depth.
    pub per_depth: Vec<f64>,
}

/// Offsets from an edge, in units of the side, at which the supremum is
/// sampled. The blending bands of neighbouring squares reach at most a
/// quarter side into a square, so sampling is dense there.
const SUP_OFFSETS: [f64; 7] = [0.0, 1.0 / 32.0, 1.0 / 16.0, 3.0 / 32.0, 1.0 / 8.0, 1.0 / 4.0, 1.0 / 2.0];

/// `Σ_Q (sup_Q |∂²f̃|)^p·area(Q)` over the accepted squares of `decomp`, the
/// supremum taken over a 13×13 grid refined towards the square's edges.
pub fn lp_norm_estimate(ext: &Extension, decomp: &DomainDecomposition, p: f64) -> Result<LpEstimate, WhitneyError> {
    if ext.curve().vertices() != decomp.curve().vertices() {
        return Err(WhitneyError::InvalidOption("decomposition belongs to a different curve".into()));
    }
    if !(p > 0.0 && p.is_finite()) {
        return Err(WhitneyError::InvalidOption(format!("p must be positive, got {p}")));
    }
    let mut unit: Vec<f64> = SUP_OFFSETS.iter().flat_map(|&o| [o - 0.5, 0.5 - o]).collect();
    unit.sort_by(f64::total_cmp);
    unit.dedup();
    let squares = decomp.squares();
    let terms: Vec<f64> = {
        use rayon::prelude::*;
        squares
            .par_iter()
            .map(|q| {
                let mut sup = 0.0f64;
                for &v in &unit {
                    for &u in &unit {
                        let z = q.center + q.side * Complex64::new(u, v);
                        sup = sup.max(ext.derivatives(z).second_norm());
                    }
                }
                sup.powf(p) * q.area()
            })
            .collect()
    };
    let total = par_sum(terms.len(), |i| Complex64::new(terms[i], 0.0)).re;
    let mut per_depth = vec![0.0; decomp.max_depth() as usize + 1];
    for (q, t) in squares.iter().zip(&terms) {
        per_depth[q.depth as usize] += t;
    }
    Ok(LpEstimate { p, total, per_square: terms, per_depth })
}
