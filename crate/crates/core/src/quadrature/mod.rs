//! Contour and area quadrature for the kernels `1/(ξ-z)`, `1/conj(ξ-z)`,
//! `(ξ-z)/conj(ξ-z)` and `ln|ξ-z|²`.

pub(crate) mod area;
mod contour;
mod gauss;

use num_complex::Complex64;

pub use area::{
    area_integral, wirtinger_of_area_potential, AreaCells, AreaIntegrand, Cell, Density, Domain, Tabulated,
};
pub use contour::{contour_guard, contour_integral, contour_integral_dz, ContourIntegrand};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuadratureError {
    #[error("evaluation point {z} is {distance:.3e} from the curve, inside the guard {guard:.3e}")]
    TooCloseToBoundary { z: Complex64, distance: f64, guard: f64 },
    #[error("density has {got} values, curve has {expected} vertices")]
    DensityLength { expected: usize, got: usize },
    #[error("density is not finite at {at}")]
    SingularDensity { at: Complex64 },
    #[error("finite-difference stencil around {center} comes within {distance:.3e} of the curve")]
    StencilOutOfDomain { center: Complex64, distance: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Geometry(#[from] crate::geometry::GeometryError),
}

/// The four kernel families, as functions of `w = ξ - z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kernel {
    /// `1/(ξ-z)`
    Cauchy,
    /// `1/conj(ξ-z)`
    ConjCauchy,
    /// `(ξ-z)/conj(ξ-z)`
    Ratio,
    /// `ln|ξ-z|²`, computed as `2·ln|ξ-z|`
    LogModulus,
}

impl Kernel {
    #[inline]
    pub fn eval(self, w: Complex64) -> Complex64 {
        match self {
            Kernel::Cauchy => 1.0 / w,
            Kernel::ConjCauchy => 1.0 / w.conj(),
            Kernel::Ratio => w / w.conj(),
            Kernel::LogModulus => Complex64::new(2.0 * w.norm().ln(), 0.0),
        }
    }
}

/// Contour measure: `dξ` or `dξ̄`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Measure {
    Dxi,
    DxiBar,
}
