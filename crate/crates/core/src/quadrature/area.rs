//! Area integrals over square cells.
//!
//! Every cell uses the midpoint rule except the cells near the evaluation
//! point: neighbours get a 4×4 Gauss rule and the cell containing `z` is
//! split into four triangles with apex `z` and integrated in polar
//! coordinates, which removes the weak singularity of all four kernels.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustc_hash::FxHashMap;

use super::gauss::gl8;
use super::{Kernel, QuadratureError};
use crate::geometry::{whitney_decompose, Curve, DomainDecomposition, Location};
use crate::sum::try_par_sum;

/// Default cap on the level to which Whitney squares are subdivided into quadrature cells.
pub const DEFAULT_REFINE_DEPTH: u32 = 10;

/// A complex density on the plane.
pub trait Density: Sync {
    fn eval(&self, z: Complex64) -> Complex64;

    /// Value at the centre of cell `index`; tabulated densities override this.
    fn at_cell(&self, index: usize, center: Complex64) -> Complex64 {
        let _ = index;
        self.eval(center)
    }
}

impl<F> Density for F
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    fn eval(&self, z: Complex64) -> Complex64 {
        self(z)
    }
}

/// A density with its values at the cell centres precomputed.
pub struct Tabulated<F> {
    values: Vec<Complex64>,
    f: F,
}

impl<F: Fn(Complex64) -> Complex64 + Sync> Density for Tabulated<F> {
    fn eval(&self, z: Complex64) -> Complex64 {
        (self.f)(z)
    }
    fn at_cell(&self, index: usize, _center: Complex64) -> Complex64 {
        self.values[index]
    }
}

impl<F> Tabulated<F> {
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
}

/// Quadrature cell: an axis-aligned square.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub center: Complex64,
    pub half: f64,
}

impl Cell {
    pub fn area(&self) -> f64 {
        4.0 * self.half * self.half
    }
}

/// Region of integration, described before any cells are built.
#[derive(Debug, Clone)]
pub enum Domain {
    /// Whitney squares subdivided down to `refine_depth`, plus the unresolved boundary squares.
    Whitney { decomposition: DomainDecomposition, refine_depth: u32 },
    /// `n × n` tensor grid over the bounding square, clipped by point inclusion.
    Grid { curve: Curve, n: usize },
}

impl Domain {
    /// Interior of `curve` decomposed to `depth`, with cells refined to `min(depth, 10)`.
    pub fn whitney(curve: &Curve, depth: u32) -> Result<Self, QuadratureError> {
        Ok(Domain::Whitney {
            decomposition: whitney_decompose(curve, depth)?,
            refine_depth: depth.min(DEFAULT_REFINE_DEPTH),
        })
    }

    pub fn grid(curve: &Curve, n: usize) -> Result<Self, QuadratureError> {
        if n == 0 {
            return Err(QuadratureError::InvalidArgument("grid needs at least one cell".into()));
        }
        Ok(Domain::Grid { curve: curve.clone(), n })
    }

    pub fn curve(&self) -> &Curve {
        match self {
            Domain::Whitney { decomposition, .. } => decomposition.curve(),
            Domain::Grid { curve, .. } => curve,
        }
    }

    pub fn cells(&self) -> AreaCells {
        AreaCells::new(self)
    }
}

/// Concrete quadrature cells of a [`Domain`] with a point-location table.
pub struct AreaCells {
    curve: Curve,
    cells: Vec<Cell>,
    lo: Complex64,
    level_sides: Vec<f64>,
    lookup: FxHashMap<(u16, i64, i64), u32>,
}

impl std::fmt::Debug for AreaCells {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AreaCells").field("cells", &self.cells.len()).finish()
    }
}

impl AreaCells {
    pub fn new(domain: &Domain) -> Self {
        let mut cells = Vec::new();
        let mut keys = Vec::new();
        let (lo, level_sides) = match domain {
            Domain::Whitney { decomposition, refine_depth } => {
                let root = decomposition.root();
                let sides: Vec<f64> = (0..=decomposition.max_depth().max(*refine_depth))
                    .map(|k| root.side / 2f64.powi(k as i32))
                    .collect();
                let lo = decomposition.root_lo();
                for q in decomposition.squares().iter().chain(decomposition.residual()) {
                    let k = refine_depth.saturating_sub(q.depth);
                    let per = 1i64 << k;
                    let level = q.depth + k;
                    let side = sides[level as usize];
                    for j in 0..per {
                        for i in 0..per {
                            let (ix, iy) = (q.ix as i64 * per + i, q.iy as i64 * per + j);
                            let center = lo + Complex64::new((ix as f64 + 0.5) * side, (iy as f64 + 0.5) * side);
                            cells.push(Cell { center, half: side / 2.0 });
                            keys.push((level as u16, ix, iy));
                        }
                    }
                }
                (lo, sides)
            }
            Domain::Grid { curve, n } => {
                let (blo, bhi) = curve.bbox();
                let big = (bhi.re - blo.re).max(bhi.im - blo.im) * 1.0625;
                let lo = curve.bbox_center() - Complex64::new(big / 2.0, big / 2.0);
                let side = big / *n as f64;
                for j in 0..*n as i64 {
                    for i in 0..*n as i64 {
                        let center = lo + Complex64::new((i as f64 + 0.5) * side, (j as f64 + 0.5) * side);
                        if curve.contains(center) == Location::Inside {
                            cells.push(Cell { center, half: side / 2.0 });
                            keys.push((0, i, j));
                        }
                    }
                }
                (lo, vec![side])
            }
        };
        let mut lookup = FxHashMap::default();
        lookup.reserve(keys.len());
        for (k, key) in keys.into_iter().enumerate() {
            lookup.insert(key, k as u32);
        }
        Self { curve: domain.curve().clone(), cells, lo, level_sides, lookup }
    }

    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn total_area(&self) -> f64 {
        self.cells.iter().map(Cell::area).sum()
    }

    /// Side of the largest cell.
    pub fn max_cell_side(&self) -> f64 {
        self.cells.iter().map(|c| 2.0 * c.half).fold(0.0, f64::max)
    }

    /// Side of the smallest cell.
    pub fn min_cell_side(&self) -> f64 {
        self.cells.iter().map(|c| 2.0 * c.half).fold(f64::INFINITY, f64::min)
    }

    /// Index of the cell containing `z`, if any.
    pub fn locate(&self, z: Complex64) -> Option<usize> {
        for (level, &side) in self.level_sides.iter().enumerate() {
            let ix = ((z.re - self.lo.re) / side).floor();
            let iy = ((z.im - self.lo.im) / side).floor();
            if !(ix.is_finite() && iy.is_finite()) {
                return None;
            }
            if let Some(&k) = self.lookup.get(&(level as u16, ix as i64, iy as i64)) {
                return Some(k as usize);
            }
        }
        None
    }

    /// Density values at all cell centres, computed once.
    pub fn tabulate<F>(&self, f: F) -> Tabulated<F>
    where
        F: Fn(Complex64) -> Complex64 + Sync,
    {
        let values = self.cells.par_iter().map(|c| f(c.center)).collect();
        Tabulated { values, f }
    }

    /// Tabulation with caller-supplied cell values, typically cell averages
    /// of `f` for densities that vary below the cell size. The far-field rule
    /// multiplies the value by the cell area, so an exact average makes the
    /// cell's contribution exact up to the variation of the kernel.
    pub fn tabulate_by_cell<F, V>(&self, f: F, value: V) -> Tabulated<F>
    where
        F: Fn(Complex64) -> Complex64 + Sync,
        V: Fn(&Cell) -> Complex64 + Sync + Send,
    {
        let values = self.cells.par_iter().map(value).collect();
        Tabulated { values, f }
    }
}

/// Kernel and density of an area integral.
#[derive(Clone, Copy)]
pub struct AreaIntegrand<'a> {
    pub kernel: Kernel,
    pub density: &'a dyn Density,
}

impl<'a> AreaIntegrand<'a> {
    pub fn new(kernel: Kernel, density: &'a dyn Density) -> Self {
        Self { kernel, density }
    }
}

fn finite(v: Complex64, at: Complex64) -> Result<Complex64, QuadratureError> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(QuadratureError::SingularDensity { at })
    }
}

/// `∫ K(ξ - z) g(ξ) dA(ξ)` over the cells, without any prefactor.
pub fn area_integral(
    cells: &AreaCells,
    integrand: &AreaIntegrand<'_>,
    z: Complex64,
) -> Result<Complex64, QuadratureError> {
    area_integral_kernels(cells, &[integrand.kernel], integrand.density, z, false).map(|v| v[0])
}

/// Several kernels against one density in one sweep. With `conj_density`
/// set, the `Ratio` and `ConjCauchy` kernels see `conj(g)` instead of `g`.
pub(crate) fn area_integral_kernels(
    cells: &AreaCells,
    kernels: &[Kernel],
    density: &dyn Density,
    z: Complex64,
    conj_density: bool,
) -> Result<Vec<Complex64>, QuadratureError> {
    let singular = cells.locate(z);
    let weigh = |k: Kernel, g: Complex64| {
        if conj_density && matches!(k, Kernel::Ratio | Kernel::ConjCauchy) {
            g.conj()
        } else {
            g
        }
    };
    let mut out = Vec::with_capacity(kernels.len());
    // one pass per kernel keeps the reduction order fixed and simple
    for &kernel in kernels {
        let v = try_par_sum(cells.len(), |i| {
            let cell = cells.cells[i];
            if Some(i) == singular {
                return polar_cell(cell, z, |xi| {
                    let g = finite(density.eval(xi), xi)?;
                    Ok(kernel.eval(xi - z) * weigh(kernel, g))
                });
            }
            let gap = ((z.re - cell.center.re).abs() - cell.half).max((z.im - cell.center.im).abs() - cell.half);
            if gap < 2.0 * cell.half {
                return polar_cell(cell, z, |xi| {
                    let g = finite(density.eval(xi), xi)?;
                    Ok(kernel.eval(xi - z) * weigh(kernel, g))
                });
            }
            let g = finite(density.at_cell(i, cell.center), cell.center)?;
            Ok(kernel.eval(cell.center - z) * weigh(kernel, g) * cell.area())
        })?;
        out.push(v);
    }
    Ok(out)
}

/// Integral over a cell at or near `z`: four signed triangles with apex `z`,
/// each mapped from the unit square by `ξ = z + s²·(p - z + v·(q - p))`. The
/// Jacobian `2s³·((p-z)×(q-p))` absorbs the `1/|ξ-z|` and `ln|ξ-z|`
/// singularities; when `z` lies outside the cell the signed pieces cancel
/// outside it, so `f` must be defined on a neighbourhood of the cell.
fn polar_cell<F>(cell: Cell, z: Complex64, f: F) -> Result<Complex64, QuadratureError>
where
    F: Fn(Complex64) -> Result<Complex64, QuadratureError>,
{
    let h = cell.half;
    let c = cell.center;
    let corners =
        [c + Complex64::new(-h, -h), c + Complex64::new(h, -h), c + Complex64::new(h, h), c + Complex64::new(-h, h)];
    let (gx, gw) = gl8();
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..4 {
        let (p, q) = (corners[k], corners[(k + 1) % 4]);
        let (u, e) = (p - z, q - p);
        let jac = u.re * e.im - u.im * e.re;
        if jac.abs() <= 1e-14 * h * h {
            continue;
        }
        for (xv, wv) in gx.iter().zip(gw) {
            let dir = u + e * *xv;
            for (xs, ws) in gx.iter().zip(gw) {
                let s2 = xs * xs;
                acc += f(z + dir * s2)? * (wv * ws * 2.0 * s2 * xs * jac);
            }
        }
    }
    Ok(acc)
}

/// `∂_z̄` of the Cauchy area potential `-(1/π)∫ g(ξ)/(ξ-z) dA` by central differences of step `h`.
pub fn wirtinger_of_area_potential(
    cells: &AreaCells,
    g: &dyn Density,
    z: Complex64,
    h: f64,
) -> Result<Complex64, QuadratureError> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(QuadratureError::InvalidArgument(format!("step must be positive, got {h}")));
    }
    if !cells.curve().is_farther_than(z, 3.0 * h) {
        return Err(QuadratureError::StencilOutOfDomain { center: z, distance: cells.curve().distance(z) });
    }
    let pot = |w: Complex64| -> Result<Complex64, QuadratureError> {
        Ok(-area_integral(cells, &AreaIntegrand::new(Kernel::Cauchy, g), w)? / PI)
    };
    let i = Complex64::new(0.0, 1.0);
    let px = (pot(z + h)? - pot(z - h)?) / (2.0 * h);
    let py = (pot(z + i * h)? - pot(z - i * h)?) / (2.0 * h);
    Ok((px + i * py) / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn disk(depth: u32) -> AreaCells {
        let curve = Curve::circle(c(0.0, 0.0), 1.0, 2048).unwrap();
        Domain::whitney(&curve, depth).unwrap().cells()
    }

    fn one(_: Complex64) -> Complex64 {
        c(1.0, 0.0)
    }

    #[test]
    fn cells_tile_the_disk() {
        let cells = disk(8);
        assert!((cells.total_area() - PI).abs() < 2e-2, "{}", cells.total_area());
        for (i, cell) in cells.cells().iter().enumerate().step_by(97) {
            assert_eq!(cells.locate(cell.center), Some(i));
        }
        assert_eq!(cells.locate(c(5.0, 5.0)), None);
    }

    #[test]
    fn polar_cell_integrates_exactly_known_values() {
        // ∫ over [-1,1]² of 1 and of |ξ|² about an off-centre apex
        let cell = Cell { center: c(0.0, 0.0), half: 1.0 };
        let z = c(0.3, -0.2);
        let a = polar_cell(cell, z, |_| Ok(c(1.0, 0.0))).unwrap();
        assert!((a - 4.0).norm() < 1e-12);
        let m = polar_cell(cell, z, |xi| Ok(c(xi.norm_sqr(), 0.0))).unwrap();
        assert!((m - 8.0 / 3.0).norm() < 1e-12);
        // corner apex
        let a = polar_cell(cell, c(1.0, 1.0), |_| Ok(c(1.0, 0.0))).unwrap();
        assert!((a - 4.0).norm() < 1e-12);
    }

    #[test]
    fn disk_examples() {
        let cells = disk(8);
        let ratio = area_integral(&cells, &AreaIntegrand::new(Kernel::Ratio, &one), c(0.0, 0.0)).unwrap();
        assert!(ratio.norm() < 1e-4, "{ratio}");
        let lg = area_integral(&cells, &AreaIntegrand::new(Kernel::LogModulus, &one), c(0.0, 0.0)).unwrap();
        assert!((lg + PI).norm() < 1e-3, "{lg}");
        let z = c(0.3, 0.0);
        let ca = area_integral(&cells, &AreaIntegrand::new(Kernel::Cauchy, &one), z).unwrap();
        assert!((ca + PI * z.conj()).norm() < 1e-3, "{ca}");
    }

    #[test]
    fn uniform_grid_agrees() {
        let curve = Curve::circle(c(0.0, 0.0), 1.0, 2048).unwrap();
        let cells = Domain::grid(&curve, 400).unwrap().cells();
        let lg = area_integral(&cells, &AreaIntegrand::new(Kernel::LogModulus, &one), c(0.1, 0.2)).unwrap();
        // π(|z|² - 1) inside the unit disk
        assert!((lg - PI * (0.05 - 1.0)).norm() < 1e-2, "{lg}");
    }

    #[test]
    fn zero_density_gives_exact_zero() {
        let cells = disk(6);
        let zero = |_: Complex64| c(0.0, 0.0);
        for k in [Kernel::Cauchy, Kernel::ConjCauchy, Kernel::Ratio, Kernel::LogModulus] {
            assert_eq!(area_integral(&cells, &AreaIntegrand::new(k, &zero), c(0.1, 0.1)).unwrap(), c(0.0, 0.0));
        }
        assert_eq!(wirtinger_of_area_potential(&cells, &zero, c(0.0, 0.0), 1e-3).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn vekua_identity() {
        let cells = disk(8);
        let v = wirtinger_of_area_potential(&cells, &one, c(0.0, 0.0), 1e-3).unwrap();
        assert!((v - 1.0).norm() < 1e-2, "{v}");
        let id = |xi: Complex64| xi;
        let v = wirtinger_of_area_potential(&cells, &id, c(0.2, 0.0), 1e-3).unwrap();
        assert!((v - 0.2).norm() < 1e-2, "{v}");
        assert!(matches!(
            wirtinger_of_area_potential(&cells, &one, c(0.999, 0.0), 1e-2),
            Err(QuadratureError::StencilOutOfDomain { .. })
        ));
    }

    #[test]
    fn singular_density_reported() {
        let cells = disk(5);
        let bad = |xi: Complex64| if xi.re > 0.5 { c(f64::NAN, 0.0) } else { c(1.0, 0.0) };
        assert!(matches!(
            area_integral(&cells, &AreaIntegrand::new(Kernel::LogModulus, &bad), c(0.0, 0.0)),
            Err(QuadratureError::SingularDensity { .. })
        ));
    }

    #[test]
    fn tabulated_matches_closure() {
        let cells = disk(6);
        let f = |xi: Complex64| xi * xi.conj() + xi;
        let t = cells.tabulate(f);
        for k in [Kernel::Ratio, Kernel::LogModulus] {
            let a = area_integral(&cells, &AreaIntegrand::new(k, &f), c(0.2, 0.3)).unwrap();
            let b = area_integral(&cells, &AreaIntegrand::new(k, &t), c(0.2, 0.3)).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn refinement_self_convergence() {
        let curve = Curve::circle(c(0.0, 0.0), 1.0, 2048).unwrap();
        let g = |xi: Complex64| (xi * 0.5).exp();
        let z = c(0.25, -0.1);
        for k in [Kernel::Ratio, Kernel::LogModulus] {
            let v: Vec<Complex64> = [4u32, 6, 8]
                .iter()
                .map(|&d| {
                    let cells = Domain::whitney(&curve, d).unwrap().cells();
                    area_integral(&cells, &AreaIntegrand::new(k, &g), z).unwrap()
                })
                .collect();
            assert!((v[2] - v[1]).norm() < 0.5 * (v[1] - v[0]).norm(), "{k:?} {v:?}");
        }
    }

    #[test]
    fn linearity() {
        let cells = disk(6);
        let g1 = |xi: Complex64| xi;
        let g2 = |xi: Complex64| xi.conj() * xi.conj();
        let (a, b) = (c(0.3, -1.2), c(2.0, 0.5));
        let mix = move |xi: Complex64| a * g1(xi) + b * g2(xi);
        let z = c(-0.1, 0.3);
        for k in [Kernel::Cauchy, Kernel::ConjCauchy, Kernel::Ratio, Kernel::LogModulus] {
            let l = area_integral(&cells, &AreaIntegrand::new(k, &mix), z).unwrap();
            let r = a * area_integral(&cells, &AreaIntegrand::new(k, &g1), z).unwrap()
                + b * area_integral(&cells, &AreaIntegrand::new(k, &g2), z).unwrap();
            assert!((l - r).norm() < 1e-12 * (1.0 + l.norm()));
        }
    }
}
