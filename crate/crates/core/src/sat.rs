//! Summed-area tables.
//!
//! A [`Sat2D`] stores `(width + 1) * (height + 1)` prefix sums with a zero
//! guard row and column, so a rectangle sum is four lookups with no boundary
//! branches. Rectangles use half-open-low pixel bounds `(x0, x1] × (y0, y1]`
//! and are clamped to the image, which makes off-image area contribute zero.
//!
//! Volumes are never given a full 3-D table. A cube sum is the 1-D sum over
//! its z range of per-slice rectangle sums.

use crate::image::Image;

#[derive(Debug, Clone, PartialEq)]
pub struct Sat2D {
    width: usize,
    height: usize,
    table: Vec<f64>,
}

impl Sat2D {
    /// An all-zero table for a `width × height` source.
    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            table: vec![0.0; (width + 1) * (height + 1)],
        }
    }

    /// Builds the table of a row-major `width × height` sample buffer.
    pub fn from_samples(width: usize, height: usize, samples: &[f64]) -> Self {
        let mut sat = Self::zeros(width, height);
        sat.rebuild(samples);
        sat
    }

    /// Recomputes the table in place from a new source of the same shape.
    ///
    /// The fast filter calls this once per intensity level, so it reuses the
    /// allocation and keeps the inner loop to one add per running sum.
    pub fn rebuild(&mut self, samples: &[f64]) {
        assert_eq!(samples.len(), self.width * self.height, "source shape mismatch");
        let stride = self.width + 1;
        for y in 0..self.height {
            let (done, rest) = self.table.split_at_mut((y + 1) * stride);
            let prev = &done[y * stride..];
            let cur = &mut rest[..stride];
            let src = &samples[y * self.width..(y + 1) * self.width];
            let mut run = 0.0;
            for x in 0..self.width {
                run += src[x];
                cur[x + 1] = prev[x + 1] + run;
            }
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    /// Table entry with guard indexing: `at(x, y)` is the sum over all pixels
    /// with column `< x` and row `< y`.
    #[inline]
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.table[y * (self.width + 1) + x]
    }

    /// Sum of the whole source.
    pub fn total(&self) -> f64 {
        self.at(self.width, self.height)
    }

    #[inline]
    fn clamp_x(&self, x: i64) -> usize {
        (x + 1).clamp(0, self.width as i64) as usize
    }

    #[inline]
    fn clamp_y(&self, y: i64) -> usize {
        (y + 1).clamp(0, self.height as i64) as usize
    }
}

/// Rectangle `(x0, x1] × (y0, y1]` in pixel indices. Bounds may lie outside
/// the image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rect {
    pub x0: i64,
    pub x1: i64,
    pub y0: i64,
    pub y1: i64,
}

impl Rect {
    pub fn new(x0: i64, x1: i64, y0: i64, y1: i64) -> Self {
        debug_assert!(x0 <= x1 && y0 <= y1, "inverted rect {x0},{x1},{y0},{y1}");
        Self { x0, x1, y0, y1 }
    }

    /// The rect that covers every pixel of a `width × height` image.
    pub fn full(width: usize, height: usize) -> Self {
        Self::new(-1, width as i64 - 1, -1, height as i64 - 1)
    }

    pub fn is_empty(&self) -> bool {
        self.x0 >= self.x1 || self.y0 >= self.y1
    }
}

/// A rect crossed with the level interval `(z0, z1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Cube {
    pub rect: Rect,
    pub z0: i64,
    pub z1: i64,
}

pub fn build_sat_2d(image: &Image) -> Sat2D {
    Sat2D::from_samples(image.width(), image.height(), image.samples())
}

/// Sum of the source over `r` clipped to the image.
#[inline]
pub fn region_sum_2d(sat: &Sat2D, r: &Rect) -> f64 {
    let (x0, x1) = (sat.clamp_x(r.x0), sat.clamp_x(r.x1));
    let (y0, y1) = (sat.clamp_y(r.y0), sat.clamp_y(r.y1));
    if x0 >= x1 || y0 >= y1 {
        return 0.0;
    }
    sat.at(x1, y1) - sat.at(x1, y0) - sat.at(x0, y1) + sat.at(x0, y0)
}

/// Centered window sums `out[z] = Σ values[z']` for `|z' − z| ≤ halfwidth`,
/// clipped to the sequence. Runs as a sliding window: one add and one
/// subtract per output.
pub fn sliding_sum_1d(values: &[f64], halfwidth: usize) -> Vec<f64> {
    let n = values.len();
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    let mut acc: f64 = values[..=halfwidth.min(n - 1)].iter().sum();
    out.push(acc);
    for z in 1..n {
        if let Some(&v) = values.get(z + halfwidth) {
            acc += v;
        }
        if z > halfwidth {
            acc -= values[z - halfwidth - 1];
        }
        out.push(acc);
    }
    out
}

/// A dense `(x, y, z)` volume stored slice by slice.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceStack {
    width: usize,
    height: usize,
    depth: usize,
    data: Vec<f64>,
}

impl SliceStack {
    pub fn zeros(width: usize, height: usize, depth: usize) -> Self {
        Self {
            width,
            height,
            depth,
            data: vec![0.0; width * height * depth],
        }
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.width, self.height, self.depth)
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, z: usize) -> f64 {
        self.data[(z * self.height + y) * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, z: usize, v: f64) {
        self.data[(z * self.height + y) * self.width + x] = v;
    }

    pub fn slice(&self, z: usize) -> &[f64] {
        let n = self.width * self.height;
        &self.data[z * n..(z + 1) * n]
    }

    /// One 2-D table per slice.
    pub fn slice_sats(&self) -> StackSats {
        StackSats {
            sats: (0..self.depth)
                .map(|z| Sat2D::from_samples(self.width, self.height, self.slice(z)))
                .collect(),
        }
    }
}

/// Per-slice tables of a volume, the only precomputation [`box_sum_3d`] needs.
#[derive(Debug, Clone)]
pub struct StackSats {
    sats: Vec<Sat2D>,
}

impl StackSats {
    pub fn depth(&self) -> usize {
        self.sats.len()
    }

    pub fn slice(&self, z: usize) -> &Sat2D {
        &self.sats[z]
    }
}

/// Sum of a volume over a cube: per-slice rect sums, then a 1-D sum over the
/// clipped level range.
pub fn box_sum_3d(stack: &StackSats, cube: &Cube) -> f64 {
    let depth = stack.depth() as i64;
    let lo = (cube.z0 + 1).clamp(0, depth);
    let hi = (cube.z1 + 1).clamp(0, depth);
    (lo..hi)
        .map(|z| region_sum_2d(stack.slice(z as usize), &cube.rect))
        .sum()
}
