//! Dyadic Whitney decompositions.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;

use super::{square_segment_distance, Curve, GeometryError, Location, MAX_DECOMPOSITION_DEPTH};

/// Dyadic square of the quadtree rooted at the decomposition's root box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Square {
    pub center: Complex64,
    pub side: f64,
    pub depth: u32,
    /// Integer position at its depth: the square is
    /// `root_lo + side·[ix, ix+1] × side·[iy, iy+1]`.
    pub ix: u32,
    pub iy: u32,
}

impl Square {
    pub fn diameter(&self) -> f64 {
        self.side * SQRT_2
    }

    pub fn area(&self) -> f64 {
        self.side * self.side
    }

    pub fn half_side(&self) -> f64 {
        self.side / 2.0
    }

    pub fn children(&self) -> [Square; 4] {
        let h = self.side / 4.0;
        let d = self.depth + 1;
        let s = self.side / 2.0;
        let (x, y) = (2 * self.ix, 2 * self.iy);
        [
            Square { center: self.center + Complex64::new(-h, -h), side: s, depth: d, ix: x, iy: y },
            Square { center: self.center + Complex64::new(h, -h), side: s, depth: d, ix: x + 1, iy: y },
            Square { center: self.center + Complex64::new(-h, h), side: s, depth: d, ix: x, iy: y + 1 },
            Square { center: self.center + Complex64::new(h, h), side: s, depth: d, ix: x + 1, iy: y + 1 },
        ]
    }

    pub fn contains_point(&self, z: Complex64) -> bool {
        let h = self.side / 2.0;
        (z.re - self.center.re).abs() <= h && (z.im - self.center.im).abs() <= h
    }
}

/// Which part of the root box is decomposed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// The bounded component enclosed by the curve.
    Interior,
    /// Everything in the root box off the curve (both sides).
    Complement,
}

/// Whitney squares of a region, plus the unresolved finest-level squares
/// that touch the curve.
#[derive(Debug, Clone)]
pub struct DomainDecomposition {
    curve: Curve,
    region: Region,
    root: Square,
    max_depth: u32,
    squares: Vec<Square>,
    residual: Vec<Square>,
}

impl DomainDecomposition {
    pub fn curve(&self) -> &Curve {
        &self.curve
    }
    pub fn region(&self) -> Region {
        self.region
    }
    pub fn root(&self) -> Square {
        self.root
    }
    pub fn max_depth(&self) -> u32 {
        self.max_depth
    }
    /// Accepted squares in depth-first order.
    pub fn squares(&self) -> &[Square] {
        &self.squares
    }
    /// Finest-level squares that were not accepted but whose centre lies in the region.
    pub fn residual(&self) -> &[Square] {
        &self.residual
    }
    pub fn covered_area(&self) -> f64 {
        self.squares.iter().map(Square::area).sum()
    }
    /// Lower-left corner of the root box; together with `(depth, ix, iy)` it
    /// locates every square.
    pub fn root_lo(&self) -> Complex64 {
        self.root.center - Complex64::new(self.root.side / 2.0, self.root.side / 2.0)
    }
}

/// Whitney decomposition of the interior of `curve`. The root is the bounding
/// box of the curve, made square and enlarged by 1/16.
pub fn whitney_decompose(curve: &Curve, max_depth: u32) -> Result<DomainDecomposition, GeometryError> {
    let (lo, hi) = curve.bbox();
    let side = (hi.re - lo.re).max(hi.im - lo.im) * 1.0625;
    decompose_box(curve, curve.bbox_center(), side, Region::Interior, max_depth)
}

/// Whitney decomposition of `region` within the square of the given centre and side.
pub fn decompose_box(
    curve: &Curve,
    center: Complex64,
    side: f64,
    region: Region,
    max_depth: u32,
) -> Result<DomainDecomposition, GeometryError> {
    if max_depth > MAX_DECOMPOSITION_DEPTH {
        return Err(GeometryError::DepthTooLarge { depth: max_depth, limit: MAX_DECOMPOSITION_DEPTH });
    }
    if !(side > 0.0 && side.is_finite()) {
        return Err(GeometryError::InvalidArgument(format!("root side must be positive, got {side}")));
    }
    let root = Square { center, side, depth: 0, ix: 0, iy: 0 };
    let mut squares = Vec::new();
    let mut residual = Vec::new();
    let mut stack = vec![root];
    while let Some(q) = stack.pop() {
        let diam = q.diameter();
        let dc = curve.distance(q.center);
        let lower = (dc - diam / 2.0).max(0.0);
        // dist(Q, γ) lies in [lower, dc]; only compute it exactly when the bounds straddle diam
        let close = if dc < diam {
            true
        } else if lower >= diam {
            false
        } else {
            exact_square_distance(curve, &q, dc) < diam
        };
        if !close {
            if wanted(curve, region, q.center) {
                squares.push(q);
            }
            continue;
        }
        if q.depth == max_depth {
            if wanted(curve, region, q.center) {
                residual.push(q);
            }
            continue;
        }
        // reversed so the depth-first order visits children in their natural order
        for child in q.children().into_iter().rev() {
            stack.push(child);
        }
    }
    Ok(DomainDecomposition { curve: curve.clone(), region, root, max_depth, squares, residual })
}

fn wanted(curve: &Curve, region: Region, z: Complex64) -> bool {
    match region {
        Region::Interior => curve.contains(z) == Location::Inside,
        Region::Complement => curve.contains(z) != Location::Boundary,
    }
}

/// Exact `dist(Q, γ)` given the centre distance `dc`.
fn exact_square_distance(curve: &Curve, q: &Square, dc: f64) -> f64 {
    let h = q.half_side();
    curve
        .segments_within(q.center, dc + h * SQRT_2)
        .into_iter()
        .map(|s| {
            let (a, b) = curve.segment(s);
            square_segment_distance(q.center, h, a, b)
        })
        .fold(f64::INFINITY, f64::min)
}

/// `Σ_Q |Q|^d` over the accepted squares, `|Q|` being the diameter.
pub fn d_sum(decomp: &DomainDecomposition, d: f64) -> f64 {
    let mut by_depth = vec![0.0f64; decomp.max_depth as usize + 1];
    for q in &decomp.squares {
        by_depth[q.depth as usize] += 1.0;
    }
    // squares of one depth share their diameter, so sum per level
    by_depth.iter().enumerate().map(|(k, &count)| count * (decomp.root.diameter() / (1u64 << k) as f64).powf(d)).sum()
}

impl DomainDecomposition {
    /// Number of accepted squares at each depth.
    pub fn level_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.max_depth as usize + 1];
        for q in &self.squares {
            counts[q.depth as usize] += 1;
        }
        counts
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unit_square() -> Curve {
        Curve::from_vertices(vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0), c(0.0, 1.0)]).unwrap()
    }

    fn brute_distance(curve: &Curve, q: &Square) -> f64 {
        (0..curve.n_segments())
            .map(|i| {
                let (a, b) = curve.segment(i);
                square_segment_distance(q.center, q.half_side(), a, b)
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn whitney_condition_holds_for_every_square() {
        for curve in
            [Curve::circle(c(0.0, 0.0), 1.0, 256).unwrap(), Curve::koch_snowflake(4, 1.0).unwrap(), unit_square()]
        {
            let dec = whitney_decompose(&curve, 8).unwrap();
            assert!(!dec.squares().is_empty());
            for q in dec.squares() {
                let dist = brute_distance(&curve, q);
                assert!(q.diameter() <= dist, "{q:?} dist {dist}");
                assert!(dist <= 4.0 * q.diameter(), "{q:?} dist {dist}");
                assert_eq!(curve.contains(q.center), Location::Inside);
            }
        }
    }

    #[test]
    fn squares_are_disjoint() {
        let dec = whitney_decompose(&Curve::koch_snowflake(3, 1.0).unwrap(), 7).unwrap();
        let sq = dec.squares();
        for (i, a) in sq.iter().enumerate() {
            for b in &sq[i + 1..] {
                let gap = (a.center.re - b.center.re).abs().max((a.center.im - b.center.im).abs());
                assert!(gap >= (a.side + b.side) / 2.0 - 1e-12);
            }
        }
    }

    #[test]
    fn unit_square_collar() {
        let dec = whitney_decompose(&unit_square(), 6).unwrap();
        let uncovered = 1.0 - dec.covered_area();
        assert!(uncovered > 0.0 && uncovered < 4.0 * 2f64.powi(-6) * 4.0, "{uncovered}");
    }

    #[test]
    fn disk_exhaustion() {
        let curve = Curve::circle(c(0.0, 0.0), 1.0, 2048).unwrap();
        let deficit = |depth| curve.signed_area() - whitney_decompose(&curve, depth).unwrap().covered_area();
        let (d6, d8) = (deficit(6), deficit(8));
        assert!(d8 > 0.0 && d8 < 30.0 * 2f64.powi(-8), "{d8}");
        assert!(d8 < d6 / 2.0);
        let two_sum = d_sum(&whitney_decompose(&curve, 8).unwrap(), 2.0);
        assert!(two_sum <= 2.0 * PI);
        let dec = whitney_decompose(&curve, 8).unwrap();
        assert!((two_sum - 2.0 * dec.covered_area()).abs() < 1e-9);
    }

    #[test]
    fn depth_guard() {
        let curve = Curve::circle(c(0.0, 0.0), 1.0, 64).unwrap();
        assert!(matches!(whitney_decompose(&curve, 15), Err(GeometryError::DepthTooLarge { depth: 15, .. })));
    }

    #[test]
    fn complement_covers_both_sides() {
        let curve = Curve::circle(c(0.0, 0.0), 1.0, 128).unwrap();
        let dec = decompose_box(&curve, c(0.0, 0.0), 4.0, Region::Complement, 7).unwrap();
        assert!(dec.squares().iter().any(|q| q.center.norm() < 1.0));
        assert!(dec.squares().iter().any(|q| q.center.norm() > 1.0));
        let total = dec.covered_area() + dec.residual().iter().map(Square::area).sum::<f64>();
        assert!(total <= 16.0 + 1e-12);
    }

    #[test]
    fn d_sum_monotone_in_d_after_normalisation() {
        // unit nominal diameter keeps every |Q| below one
        let curve = Curve::koch_snowflake(4, 1.0 / Curve::koch_snowflake(4, 1.0).unwrap().nominal_diameter()).unwrap();
        let dec = whitney_decompose(&curve, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut ds: Vec<f64> = (0..20).map(|_| rng.gen_range(1.0..2.0)).collect();
        ds.sort_by(f64::total_cmp);
        let sums: Vec<f64> = ds.iter().map(|&d| d_sum(&dec, d)).collect();
        assert!(sums.windows(2).all(|w| w[1] <= w[0]));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn circle_squares_satisfy_whitney(r in 0.2..3.0f64, x in -2.0..2.0f64, depth in 3u32..8) {
            let curve = Curve::circle(c(x, -x), r, 96).unwrap();
            let dec = whitney_decompose(&curve, depth).unwrap();
            for q in dec.squares() {
                let dist = brute_distance(&curve, q);
                prop_assert!(q.diameter() <= dist && dist <= 4.0 * q.diameter());
            }
        }
    }
}
