//! Closed polylines, point location, box counting and Whitney decompositions.

mod decompose;
mod fractal;
mod index;

use std::f64::consts::{PI, TAU};
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

pub use decompose::{d_sum, decompose_box, whitney_decompose, DomainDecomposition, Region, Square};
pub use fractal::{box_count, box_count_polyline, box_dimension, d_summability_integral, BoxDimensionFit};

use index::{SegmentGrid, StripIndex};

/// Largest Koch generation accepted (3·4⁸ ≈ 2·10⁵ segments).
pub const MAX_KOCH_GENERATION: u32 = 8;
/// Largest quadtree depth accepted by [`whitney_decompose`].
pub const MAX_DECOMPOSITION_DEPTH: u32 = 14;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("bad discretization: {0}")]
    BadDiscretization(String),
    #[error("depth {depth} exceeds the limit {limit}")]
    DepthTooLarge { depth: u32, limit: u32 },
    #[error("polyline is not simple: segments {0} and {1} intersect")]
    SelfIntersecting(usize, usize),
    #[error("polyline is clockwise (signed area {0}); reverse the vertex order")]
    NegativeOrientation(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// How a curve was generated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurveKind {
    /// Regular polygon inscribed in a circle. Contour quadrature treats it as the circle itself.
    Circle {
        center: Complex64,
        radius: f64,
    },
    Koch {
        generation: u32,
    },
    Polyline,
}

/// Result of a point-location query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Location {
    Inside,
    Outside,
    Boundary,
}

/// Closed, simple, counter-clockwise polyline. Cheap to clone.
#[derive(Clone)]
pub struct Curve {
    inner: Arc<CurveData>,
}

struct CurveData {
    vertices: Vec<Complex64>,
    kind: CurveKind,
    lo: Complex64,
    hi: Complex64,
    nominal_diameter: f64,
    max_segment: f64,
    min_segment: f64,
    grid: OnceLock<SegmentGrid>,
    strips: OnceLock<StripIndex>,
}

impl std::fmt::Debug for Curve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Curve")
            .field("kind", &self.inner.kind)
            .field("segments", &self.n_segments())
            .field("nominal_diameter", &self.inner.nominal_diameter)
            .finish()
    }
}

impl Curve {
    fn build(vertices: Vec<Complex64>, kind: CurveKind) -> Self {
        let mut lo = vertices[0];
        let mut hi = vertices[0];
        for v in &vertices {
            lo = Complex64::new(lo.re.min(v.re), lo.im.min(v.im));
            hi = Complex64::new(hi.re.max(v.re), hi.im.max(v.im));
        }
        let n = vertices.len();
        let (mut max_segment, mut min_segment) = (0.0f64, f64::INFINITY);
        for i in 0..n {
            let l = (vertices[(i + 1) % n] - vertices[i]).norm();
            max_segment = max_segment.max(l);
            min_segment = min_segment.min(l);
        }
        Self {
            inner: Arc::new(CurveData {
                vertices,
                kind,
                lo,
                hi,
                nominal_diameter: (hi - lo).norm(),
                max_segment,
                min_segment,
                grid: OnceLock::new(),
                strips: OnceLock::new(),
            }),
        }
    }

    /// Regular `n`-gon inscribed in the circle, starting at angle 0.
    pub fn circle(center: Complex64, radius: f64, n_segments: usize) -> Result<Self, GeometryError> {
        if n_segments < 8 {
            return Err(GeometryError::BadDiscretization(format!(
                "a circle needs at least 8 segments, got {n_segments}"
            )));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(GeometryError::InvalidArgument(format!("radius must be positive, got {radius}")));
        }
        let vertices = (0..n_segments)
            .map(|k| center + Complex64::from_polar(radius, TAU * k as f64 / n_segments as f64))
            .collect();
        Ok(Self::build(vertices, CurveKind::Circle { center, radius }))
    }

    /// Koch snowflake grown outward from an equilateral triangle of side
    /// `scale` centred at the origin.
    pub fn koch_snowflake(generation: u32, scale: f64) -> Result<Self, GeometryError> {
        if generation > MAX_KOCH_GENERATION {
            return Err(GeometryError::DepthTooLarge { depth: generation, limit: MAX_KOCH_GENERATION });
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(GeometryError::InvalidArgument(format!("scale must be positive, got {scale}")));
        }
        let r = scale / 3f64.sqrt();
        let mut pts: Vec<Complex64> =
            (0..3).map(|k| Complex64::from_polar(r, PI / 2.0 + TAU * k as f64 / 3.0)).collect();
        // the outward side of a counter-clockwise edge is on its right
        let turn = Complex64::from_polar(1.0, -PI / 3.0);
        for _ in 0..generation {
            let n = pts.len();
            let mut next = Vec::with_capacity(4 * n);
            for i in 0..n {
                let (p, q) = (pts[i], pts[(i + 1) % n]);
                let e = (q - p) / 3.0;
                let a = p + e;
                next.extend_from_slice(&[p, a, a + e * turn, a + e]);
            }
            pts = next;
        }
        Ok(Self::build(pts, CurveKind::Koch { generation }))
    }

    /// User polyline; the closing edge is implicit. Checked for simplicity
    /// and counter-clockwise orientation.
    pub fn from_vertices(vertices: Vec<Complex64>) -> Result<Self, GeometryError> {
        if vertices.len() < 3 {
            return Err(GeometryError::BadDiscretization(format!(
                "a closed polyline needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        if vertices.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(GeometryError::InvalidArgument("non-finite vertex".into()));
        }
        let curve = Self::build(vertices, CurveKind::Polyline);
        if curve.min_segment_length() == 0.0 {
            return Err(GeometryError::BadDiscretization("repeated consecutive vertex".into()));
        }
        let area = curve.signed_area();
        if area <= 0.0 {
            return Err(GeometryError::NegativeOrientation(area));
        }
        if let Some((i, j)) = curve.find_self_intersection() {
            return Err(GeometryError::SelfIntersecting(i, j));
        }
        Ok(curve)
    }

    pub fn vertices(&self) -> &[Complex64] {
        &self.inner.vertices
    }

    pub fn n_segments(&self) -> usize {
        self.inner.vertices.len()
    }

    /// Endpoints of segment `i` (from vertex `i` to vertex `i+1`, cyclically).
    #[inline]
    pub fn segment(&self, i: usize) -> (Complex64, Complex64) {
        let v = &self.inner.vertices;
        (v[i], v[(i + 1) % v.len()])
    }

    pub fn kind(&self) -> CurveKind {
        self.inner.kind
    }

    pub fn generation(&self) -> Option<u32> {
        match self.inner.kind {
            CurveKind::Koch { generation } => Some(generation),
            _ => None,
        }
    }

    pub fn nominal_diameter(&self) -> f64 {
        self.inner.nominal_diameter
    }

    pub fn max_segment_length(&self) -> f64 {
        self.inner.max_segment
    }

    pub fn min_segment_length(&self) -> f64 {
        self.inner.min_segment
    }

    /// Lower-left and upper-right corners of the bounding box.
    pub fn bbox(&self) -> (Complex64, Complex64) {
        (self.inner.lo, self.inner.hi)
    }

    pub fn bbox_center(&self) -> Complex64 {
        (self.inner.lo + self.inner.hi) / 2.0
    }

    /// Largest distance from the bounding-box centre to a vertex.
    pub fn radius(&self) -> f64 {
        let c = self.bbox_center();
        self.vertices().iter().map(|v| (v - c).norm()).fold(0.0, f64::max)
    }

    pub fn boundary_tolerance(&self) -> f64 {
        1e-12 * self.inner.nominal_diameter
    }

    pub fn perimeter(&self) -> f64 {
        (0..self.n_segments())
            .map(|i| {
                let (a, b) = self.segment(i);
                (b - a).norm()
            })
            .sum()
    }

    pub fn signed_area(&self) -> f64 {
        let c = self.bbox_center();
        (0..self.n_segments())
            .map(|i| {
                let (a, b) = self.segment(i);
                let (a, b) = (a - c, b - c);
                a.re * b.im - a.im * b.re
            })
            .sum::<f64>()
            / 2.0
    }

    /// Area centroid of the enclosed region.
    pub fn centroid(&self) -> Complex64 {
        let c = self.bbox_center();
        let mut acc = Complex64::new(0.0, 0.0);
        let mut area2 = 0.0;
        for i in 0..self.n_segments() {
            let (a, b) = self.segment(i);
            let (a, b) = (a - c, b - c);
            let cross = a.re * b.im - a.im * b.re;
            acc += (a + b) * cross;
            area2 += cross;
        }
        c + acc / (3.0 * area2)
    }

    /// Unit normal of segment `i` pointing into the enclosed region.
    pub fn inward_normal(&self, i: usize) -> Complex64 {
        let (a, b) = self.segment(i);
        let e = b - a;
        Complex64::new(0.0, 1.0) * e / e.norm()
    }

    pub fn segment_midpoint(&self, i: usize) -> Complex64 {
        let (a, b) = self.segment(i);
        (a + b) / 2.0
    }

    pub(crate) fn grid(&self) -> &SegmentGrid {
        self.inner.grid.get_or_init(|| SegmentGrid::new(self))
    }

    fn strips(&self) -> &StripIndex {
        self.inner.strips.get_or_init(|| StripIndex::new(self))
    }

    /// Euclidean distance from `z` to the polyline.
    pub fn distance(&self, z: Complex64) -> f64 {
        self.nearest_segment(z).1
    }

    /// Index of the closest segment (lowest index on ties) and the distance to it.
    pub fn nearest_segment(&self, z: Complex64) -> (usize, f64) {
        self.grid().nearest_segment(self, z)
    }

    /// Index of the closest vertex (lowest index on ties) and the distance to it.
    pub fn nearest_vertex(&self, z: Complex64) -> (usize, f64) {
        self.grid().nearest_vertex(self, z)
    }

    /// True when `dist(z, γ) ≥ r`, often without a full nearest-segment search.
    pub fn is_farther_than(&self, z: Complex64, r: f64) -> bool {
        let (lo, hi) = self.bbox();
        let dx = (lo.re - z.re).max(z.re - hi.re).max(0.0);
        let dy = (lo.im - z.im).max(z.im - hi.im).max(0.0);
        if dx.hypot(dy) >= r {
            return true;
        }
        self.distance(z) >= r
    }

    /// Segments whose distance to `z` is at most `r`, in increasing index order.
    pub fn segments_within(&self, z: Complex64, r: f64) -> Vec<usize> {
        self.grid().segments_within(self, z, r)
    }

    /// Even-odd inclusion ignoring the boundary band.
    pub fn winds_around(&self, z: Complex64) -> bool {
        self.strips().crossings(self, z) % 2 == 1
    }

    pub fn contains(&self, z: Complex64) -> Location {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Location::Outside;
        }
        if !self.is_farther_than(z, self.boundary_tolerance()) {
            return Location::Boundary;
        }
        if self.winds_around(z) {
            Location::Inside
        } else {
            Location::Outside
        }
    }

    /// A pair of non-adjacent segments that intersect, if any.
    pub fn find_self_intersection(&self) -> Option<(usize, usize)> {
        let n = self.n_segments();
        for i in 0..n {
            let (a, b) = self.segment(i);
            let mid = (a + b) / 2.0;
            let reach = (b - a).norm() / 2.0;
            for j in self.segments_within(mid, reach) {
                if j <= i {
                    continue;
                }
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                let (c, d) = self.segment(j);
                if adjacent {
                    // consecutive segments may only share their common vertex
                    if collinear_overlap(a, b, c, d) {
                        return Some((i, j));
                    }
                } else if segments_intersect(a, b, c, d) {
                    return Some((i, j));
                }
            }
        }
        None
    }
}

fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

fn segments_intersect(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> bool {
    let d1 = cross(b - a, c - a);
    let d2 = cross(b - a, d - a);
    let d3 = cross(d - c, a - c);
    let d4 = cross(d - c, b - c);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    let on = |p: Complex64, q: Complex64, r: Complex64| {
        r.re >= p.re.min(q.re) && r.re <= p.re.max(q.re) && r.im >= p.im.min(q.im) && r.im <= p.im.max(q.im)
    };
    (d1 == 0.0 && on(a, b, c)) || (d2 == 0.0 && on(a, b, d)) || (d3 == 0.0 && on(c, d, a)) || (d4 == 0.0 && on(c, d, b))
}

/// Consecutive segments folding back onto each other.
fn collinear_overlap(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> bool {
    let (u, v) = if b == c { (a - b, d - b) } else { (b - a, c - a) };
    cross(u, v) == 0.0 && (u.re * v.re + u.im * v.im) > 0.0
}

/// Distance from `z` to the segment `[a, b]`.
#[inline]
pub(crate) fn point_segment_distance(z: Complex64, a: Complex64, b: Complex64) -> f64 {
    let e = b - a;
    let l2 = e.norm_sqr();
    if l2 == 0.0 {
        return (z - a).norm();
    }
    let t = (((z - a) * e.conj()).re / l2).clamp(0.0, 1.0);
    (z - (a + e * t)).norm()
}

/// Distance from the axis-aligned square (centre `c`, half-side `h`) to the segment `[a, b]`.
pub(crate) fn square_segment_distance(c: Complex64, h: f64, a: Complex64, b: Complex64) -> f64 {
    let (x0, x1, y0, y1) = (c.re - h, c.re + h, c.im - h, c.im + h);
    if segment_hits_box(a, b, x0, x1, y0, y1) {
        return 0.0;
    }
    let corners = [Complex64::new(x0, y0), Complex64::new(x1, y0), Complex64::new(x1, y1), Complex64::new(x0, y1)];
    let mut best = corners.iter().map(|&q| point_segment_distance(q, a, b)).fold(f64::INFINITY, f64::min);
    for p in [a, b] {
        let dx = (x0 - p.re).max(p.re - x1).max(0.0);
        let dy = (y0 - p.im).max(p.im - y1).max(0.0);
        best = best.min(dx.hypot(dy));
    }
    best
}

/// Liang-Barsky clipping test.
fn segment_hits_box(a: Complex64, b: Complex64, x0: f64, x1: f64, y0: f64, y1: f64) -> bool {
    let d = b - a;
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    for (p, q) in [(-d.re, a.re - x0), (d.re, x1 - a.re), (-d.im, a.im - y0), (d.im, y1 - a.im)] {
        if p == 0.0 {
            if q < 0.0 {
                return false;
            }
        } else {
            let r = q / p;
            if p < 0.0 {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
            if t0 > t1 {
                return false;
            }
        }
    }
    true
}
