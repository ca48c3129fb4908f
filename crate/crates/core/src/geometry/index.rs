//! Bucket grids over the segments of a curve.

use num_complex::Complex64;

use super::{point_segment_distance, Curve};

/// Uniform grid; every segment is registered in each cell its bounding box touches.
pub(crate) struct SegmentGrid {
    origin: Complex64,
    cell: f64,
    nx: usize,
    ny: usize,
    // CSR layout: cells[start[k]..start[k+1]] are the segments of cell k
    start: Vec<u32>,
    items: Vec<u32>,
    vstart: Vec<u32>,
    vitems: Vec<u32>,
}

impl SegmentGrid {
    pub fn new(curve: &Curve) -> Self {
        let (lo, hi) = curve.bbox();
        let n = curve.n_segments();
        let (w, h) = ((hi.re - lo.re).max(1e-300), (hi.im - lo.im).max(1e-300));
        let cell = (w * h / n as f64).sqrt().max(curve.max_segment_length()).max(w.max(h) / 2048.0);
        let nx = ((w / cell).ceil() as usize).max(1);
        let ny = ((h / cell).ceil() as usize).max(1);
        let mut grid = Self {
            origin: lo,
            cell,
            nx,
            ny,
            start: Vec::new(),
            items: Vec::new(),
            vstart: Vec::new(),
            vitems: Vec::new(),
        };
        let mut lists: Vec<Vec<u32>> = vec![Vec::new(); nx * ny];
        for i in 0..n {
            let (a, b) = curve.segment(i);
            let (i0, j0) = grid.cell_of(Complex64::new(a.re.min(b.re), a.im.min(b.im)));
            let (i1, j1) = grid.cell_of(Complex64::new(a.re.max(b.re), a.im.max(b.im)));
            for j in j0..=j1 {
                for i2 in i0..=i1 {
                    lists[j * nx + i2].push(i as u32);
                }
            }
        }
        (grid.start, grid.items) = csr(&lists);
        let mut vlists: Vec<Vec<u32>> = vec![Vec::new(); nx * ny];
        for (i, &v) in curve.vertices().iter().enumerate() {
            let (ci, cj) = grid.cell_of(v);
            vlists[cj * nx + ci].push(i as u32);
        }
        (grid.vstart, grid.vitems) = csr(&vlists);
        grid
    }

    fn cell_of(&self, z: Complex64) -> (usize, usize) {
        let fx = ((z.re - self.origin.re) / self.cell).floor();
        let fy = ((z.im - self.origin.im) / self.cell).floor();
        (fx.clamp(0.0, (self.nx - 1) as f64) as usize, fy.clamp(0.0, (self.ny - 1) as f64) as usize)
    }

    fn segs(&self, ci: usize, cj: usize) -> &[u32] {
        let k = cj * self.nx + ci;
        &self.items[self.start[k] as usize..self.start[k + 1] as usize]
    }

    fn verts(&self, ci: usize, cj: usize) -> &[u32] {
        let k = cj * self.nx + ci;
        &self.vitems[self.vstart[k] as usize..self.vstart[k + 1] as usize]
    }

    /// Visits rings of cells around `z` until no unvisited cell can beat the best distance.
    fn ring_search<F>(&self, z: Complex64, mut visit: F) -> (usize, f64)
    where
        F: FnMut(usize, usize, &mut (usize, f64)),
    {
        let (ci, cj) = self.cell_of(z);
        let mut best = (usize::MAX, f64::INFINITY);
        let max_ring = self.nx.max(self.ny);
        for k in 0..=max_ring {
            let (i0, i1) = (ci as isize - k as isize, ci as isize + k as isize);
            let (j0, j1) = (cj as isize - k as isize, cj as isize + k as isize);
            for j in j0..=j1 {
                if j < 0 || j >= self.ny as isize {
                    continue;
                }
                let on_edge = j == j0 || j == j1;
                let mut i = i0;
                while i <= i1 {
                    if i >= 0 && i < self.nx as isize {
                        visit(i as usize, j as usize, &mut best);
                    }
                    i += if on_edge || k == 0 { 1 } else { (i1 - i0).max(1) };
                }
            }
            // cells in ring k+1 and beyond are at least k·cell from the clamped query point,
            // and clamping onto the grid never increases distances to grid points
            if best.1 <= k as f64 * self.cell {
                break;
            }
        }
        best
    }

    pub fn nearest_segment(&self, curve: &Curve, z: Complex64) -> (usize, f64) {
        self.ring_search(z, |i, j, best| {
            for &s in self.segs(i, j) {
                let s = s as usize;
                let (a, b) = curve.segment(s);
                let d = point_segment_distance(z, a, b);
                if d < best.1 || (d == best.1 && s < best.0) {
                    *best = (s, d);
                }
            }
        })
    }

    pub fn nearest_vertex(&self, curve: &Curve, z: Complex64) -> (usize, f64) {
        let v = curve.vertices();
        self.ring_search(z, |i, j, best| {
            for &s in self.verts(i, j) {
                let s = s as usize;
                let d = (v[s] - z).norm();
                if d < best.1 || (d == best.1 && s < best.0) {
                    *best = (s, d);
                }
            }
        })
    }

    pub fn segments_within(&self, curve: &Curve, z: Complex64, r: f64) -> Vec<usize> {
        let (i0, j0) = self.cell_of(z - Complex64::new(r, r));
        let (i1, j1) = self.cell_of(z + Complex64::new(r, r));
        let mut out = Vec::new();
        for j in j0..=j1 {
            for i in i0..=i1 {
                for &s in self.segs(i, j) {
                    let s = s as usize;
                    let (a, b) = curve.segment(s);
                    if point_segment_distance(z, a, b) <= r {
                        out.push(s);
                    }
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

fn csr(lists: &[Vec<u32>]) -> (Vec<u32>, Vec<u32>) {
    let mut start = Vec::with_capacity(lists.len() + 1);
    let mut items = Vec::new();
    start.push(0);
    for l in lists {
        items.extend_from_slice(l);
        start.push(items.len() as u32);
    }
    (start, items)
}

/// Horizontal strips for crossing-number queries.
pub(crate) struct StripIndex {
    y0: f64,
    height: f64,
    start: Vec<u32>,
    items: Vec<u32>,
}

impl StripIndex {
    pub fn new(curve: &Curve) -> Self {
        let (lo, hi) = curve.bbox();
        let n = curve.n_segments();
        let strips = n.clamp(1, 1 << 16);
        let height = ((hi.im - lo.im) / strips as f64).max(1e-300);
        let mut lists: Vec<Vec<u32>> = vec![Vec::new(); strips];
        let idx = |y: f64| (((y - lo.im) / height).floor().max(0.0) as usize).min(strips - 1);
        for i in 0..n {
            let (a, b) = curve.segment(i);
            for l in &mut lists[idx(a.im.min(b.im))..=idx(a.im.max(b.im))] {
                l.push(i as u32);
            }
        }
        let (start, items) = csr(&lists);
        Self { y0: lo.im, height, start, items }
    }

    /// Number of segments crossed by the ray from `z` towards +x.
    pub fn crossings(&self, curve: &Curve, z: Complex64) -> usize {
        let k = (z.im - self.y0) / self.height;
        if k < 0.0 || k >= (self.start.len() - 1) as f64 + 1.0 {
            return 0;
        }
        let k = (k.floor() as usize).min(self.start.len() - 2);
        let mut count = 0;
        for &s in &self.items[self.start[k] as usize..self.start[k + 1] as usize] {
            let (a, b) = curve.segment(s as usize);
            // half-open rule so shared vertices count once
            if (a.im > z.im) != (b.im > z.im) {
                let x = a.re + (z.im - a.im) * (b.re - a.re) / (b.im - a.im);
                if x > z.re {
                    count += 1;
                }
            }
        }
        count
    }
}
