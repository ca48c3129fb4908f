//! Field values on a point set, tagged by region.

use num_complex::Complex64;
use rayon::prelude::*;

use super::OperatorError;
use crate::geometry::{Curve, Location};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionTag {
    Inside,
    Outside,
}

impl RegionTag {
    pub fn as_str(self) -> &'static str {
        match self {
            RegionTag::Inside => "inside",
            RegionTag::Outside => "outside",
        }
    }
}

/// Which operator produced a [`FieldOnGrid`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Teodorescu,
    BorelPompeiu,
    CauchyRepr,
    LameCauchy,
    JumpSolution,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Teodorescu => "teodorescu",
            Provenance::BorelPompeiu => "borel_pompeiu",
            Provenance::CauchyRepr => "cauchy_repr",
            Provenance::LameCauchy => "lame_cauchy",
            Provenance::JumpSolution => "jump_solution",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldOnGrid {
    pub points: Vec<Complex64>,
    pub regions: Vec<RegionTag>,
    pub values: Vec<Complex64>,
    pub provenance: Provenance,
}

impl FieldOnGrid {
    /// Evaluates `f` at every point (in parallel, results in input order).
    /// Points on the curve are refused: boundary values only come from
    /// one-sided limits.
    pub fn evaluate<F>(
        curve: &Curve,
        points: Vec<Complex64>,
        provenance: Provenance,
        f: F,
    ) -> Result<Self, OperatorError>
    where
        F: Fn(Complex64) -> Result<Complex64, OperatorError> + Sync,
    {
        let regions = points
            .iter()
            .map(|&z| match curve.contains(z) {
                Location::Inside => Ok(RegionTag::Inside),
                Location::Outside => Ok(RegionTag::Outside),
                Location::Boundary => Err(OperatorError::PointOnCurve { z }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let values = points.par_iter().map(|&z| f(z)).collect::<Result<Vec<_>, _>>()?;
        Ok(Self { points, regions, values, provenance })
    }

    /// Points of an `nx × ny` lattice over the rectangle `[lo, hi]`, row by row.
    pub fn lattice(lo: Complex64, hi: Complex64, nx: usize, ny: usize) -> Vec<Complex64> {
        let step = |a: f64, b: f64, n: usize, k: usize| {
            if n < 2 {
                (a + b) / 2.0
            } else {
                a + (b - a) * k as f64 / (n - 1) as f64
            }
        };
        (0..ny)
            .flat_map(|j| (0..nx).map(move |i| Complex64::new(step(lo.re, hi.re, nx, i), step(lo.im, hi.im, ny, j))))
            .collect()
    }

    /// Drops points closer than `margin` to the curve, so that an evaluation
    /// grid never touches it.
    pub fn clear_of(curve: &Curve, points: Vec<Complex64>, margin: f64) -> Vec<Complex64> {
        points.into_iter().filter(|&z| curve.is_farther_than(z, margin)).collect()
    }
}
