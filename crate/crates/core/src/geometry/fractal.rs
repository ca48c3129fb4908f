//! Covering numbers and d-summability diagnostics.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use rustc_hash::FxHashSet;

use super::{Curve, GeometryError};

/// Upper estimate of the number of radius-`tau` balls needed to cover the
/// curve.
///
/// Cells come from the dyadic grids of the bounding box: the count uses the
/// coarsest level whose cell side does not exceed `tau·√2`, so each cell fits
/// in a ball of radius `tau`. The grids are nested, which makes the count
/// nonincreasing in `tau`.
pub fn box_count(curve: &Curve, tau: f64) -> Result<usize, GeometryError> {
    box_count_polyline(curve.vertices(), true, tau)
}

/// [`box_count`] for an open or closed vertex chain.
pub fn box_count_polyline(vertices: &[Complex64], closed: bool, tau: f64) -> Result<usize, GeometryError> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(GeometryError::InvalidArgument(format!("tau must be positive, got {tau}")));
    }
    if vertices.is_empty() {
        return Ok(0);
    }
    let (lo, root) = dyadic_root(vertices);
    let level = dyadic_level(root, tau);
    Ok(count_cells(vertices, closed, lo, root, level))
}

fn dyadic_root(vertices: &[Complex64]) -> (Complex64, f64) {
    let (mut lo, mut hi) = (vertices[0], vertices[0]);
    for v in vertices {
        lo = Complex64::new(lo.re.min(v.re), lo.im.min(v.im));
        hi = Complex64::new(hi.re.max(v.re), hi.im.max(v.im));
    }
    (lo, (hi.re - lo.re).max(hi.im - lo.im).max(f64::MIN_POSITIVE))
}

/// Smallest `k` with `root / 2^k ≤ tau·√2`.
fn dyadic_level(root: f64, tau: f64) -> u32 {
    let k = (root / (tau * SQRT_2)).log2().ceil().max(0.0) as u32;
    // guard against log2 rounding either way
    let mut k = k.min(60);
    while k > 0 && root / 2f64.powi(k as i32 - 1) <= tau * SQRT_2 {
        k -= 1;
    }
    while root / 2f64.powi(k as i32) > tau * SQRT_2 {
        k += 1;
    }
    k
}

fn count_cells(vertices: &[Complex64], closed: bool, lo: Complex64, root: f64, level: u32) -> usize {
    let cells_per_side = 2f64.powi(level as i32);
    let side = root / cells_per_side;
    let max_index = cells_per_side as i64 - 1;
    let to_grid = |z: Complex64| ((z.re - lo.re) / side, (z.im - lo.im) / side);
    let mut cells: FxHashSet<(i64, i64)> = FxHashSet::default();
    let n = vertices.len();
    let segs = if closed { n } else { n - 1 };
    if segs == 0 {
        let (x, y) = to_grid(vertices[0]);
        cells.insert((x.floor() as i64, y.floor() as i64));
    }
    for i in 0..segs {
        let (ax, ay) = to_grid(vertices[i]);
        let (bx, by) = to_grid(vertices[(i + 1) % n]);
        supercover(ax, ay, bx, by, &mut cells);
    }
    // the far edges of the root box belong to the last row and column
    let clamped: FxHashSet<(i64, i64)> =
        cells.into_iter().map(|(i, j)| (i.clamp(0, max_index), j.clamp(0, max_index))).collect();
    clamped.len()
}

/// Every unit cell met by the segment, column by column.
fn supercover(ax: f64, ay: f64, bx: f64, by: f64, out: &mut FxHashSet<(i64, i64)>) {
    let (ax, ay, bx, by) = if ax <= bx { (ax, ay, bx, by) } else { (bx, by, ax, ay) };
    let (c0, c1) = (ax.floor() as i64, bx.floor() as i64);
    let slope = if bx > ax { (by - ay) / (bx - ax) } else { 0.0 };
    for col in c0..=c1 {
        let x0 = (col as f64).max(ax);
        let x1 = ((col + 1) as f64).min(bx);
        let (y0, y1) = if bx > ax { (ay + slope * (x0 - ax), ay + slope * (x1 - ax)) } else { (ay, by) };
        let (r0, r1) = (y0.min(y1).floor() as i64, y0.max(y1).floor() as i64);
        for row in r0..=r1 {
            out.insert((col, row));
        }
    }
}

/// Least-squares fit of `ln N(τ)` against `ln(1/τ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxDimensionFit {
    pub slope: f64,
    pub intercept: f64,
    pub taus: Vec<f64>,
    pub counts: Vec<usize>,
}

/// Box-counting dimension from the dyadic levels whose radius `side/√2`
/// lies in `[tau_min, tau_max]`.
pub fn box_dimension(curve: &Curve, tau_min: f64, tau_max: f64) -> Result<BoxDimensionFit, GeometryError> {
    if !(tau_min > 0.0 && tau_max > tau_min) {
        return Err(GeometryError::InvalidArgument(format!("need 0 < tau_min < tau_max (got {tau_min}, {tau_max})")));
    }
    let (lo, root) = dyadic_root(curve.vertices());
    let (k0, k1) = (dyadic_level(root, tau_max), dyadic_level(root, tau_min));
    let levels: Vec<u32> = (k0..=k1).filter(|&k| root / 2f64.powi(k as i32) / SQRT_2 >= tau_min).collect();
    if levels.len() < 2 {
        return Err(GeometryError::InvalidArgument(format!(
            "[{tau_min}, {tau_max}] spans fewer than two dyadic levels"
        )));
    }
    let taus: Vec<f64> = levels.iter().map(|&k| root / 2f64.powi(k as i32) / SQRT_2).collect();
    let counts: Vec<usize> = levels.iter().map(|&k| count_cells(curve.vertices(), true, lo, root, k)).collect();
    let xs: Vec<f64> = taus.iter().map(|t| -t.ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|&n| (n as f64).ln()).collect();
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    Ok(BoxDimensionFit { slope, intercept: my - slope * mx, taus, counts })
}

/// `∫_{tau_min}^{1} N(τ) τ^{d-1} dτ`, trapezoidal in `ln τ` with 32 nodes per decade.
pub fn d_summability_integral(curve: &Curve, d: f64, tau_min: f64) -> Result<f64, GeometryError> {
    if !(d > 1.0 && d <= 2.0) {
        return Err(GeometryError::InvalidArgument(format!("d must lie in (1, 2], got {d}")));
    }
    if !(tau_min > 0.0 && tau_min < 1.0) {
        return Err(GeometryError::InvalidArgument(format!("tau_min must lie in (0, 1), got {tau_min}")));
    }
    let span = -tau_min.ln();
    let steps = ((span / std::f64::consts::LN_10) * 32.0).ceil().max(1.0) as usize;
    let h = span / steps as f64;
    // in s = ln τ the integrand is N(e^s) e^{s d}
    let f = |k: usize| -> Result<f64, GeometryError> {
        let s = -(k as f64) * h;
        let tau = s.exp();
        Ok(box_count(curve, tau)? as f64 * (s * d).exp())
    };
    let mut acc = 0.5 * (f(0)? + f(steps)?);
    for k in 1..steps {
        acc += f(k)?;
    }
    Ok(acc * h)
}
