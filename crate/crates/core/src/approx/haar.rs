//! Haar functions on `[-T, T]` and 2-D Haar coefficients of spatial kernels.
//!
//! The mother wavelet is `+1` on `[-T, 0)` and `-1` on `[0, T]`. Level `j ≥ 1`
//! wavelets are `ψ_{j,k}(x) = ψ_{0,0}(2^j x − Z_k)` with `Z_k = sign(k)(2|k|−1)T`
//! and `k ∈ {−2^{j−1}, …, −1, 1, …, 2^{j−1}}`, so each level tiles `[-T, T]`
//! with `2^j` translates of width `2T/2^j`.

use serde::{Deserialize, Serialize};

use crate::approx::kernel::TruncatedKernel;
use crate::sat::{region_sum_2d, Rect, Sat2D};

/// Finest wavelet level used unless a caller asks otherwise. Level 4 boxes
/// are `T/8` wide, below which pixel rounding erases them.
pub const DEFAULT_J_MAX: u32 = 4;

/// Midpoint samples per axis for the coefficient integrals.
pub const HAAR_QUADRATURE_SAMPLES: usize = 2048;

/// A 1-D Haar factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Haar1 {
    Scaling,
    Wavelet { j: u32, k: i32 },
}

impl Haar1 {
    /// Translation indices of level `j`, ascending.
    pub fn translations(j: u32) -> Vec<i32> {
        if j == 0 {
            return vec![0];
        }
        let half = 1i32 << (j - 1);
        (-half..=half).filter(|&k| k != 0).collect()
    }

    /// Normalisation factor `2^j` (1 for the scaling function).
    pub fn scale(&self) -> f64 {
        match *self {
            Haar1::Scaling => 1.0,
            Haar1::Wavelet { j, .. } => f64::from(1u32 << j),
        }
    }

    /// Signed constant pieces: the scaling function is a single `+1` piece on
    /// `[-T, T]`; a wavelet is `+1` on its left half and `-1` on its right.
    pub fn pieces(&self, t: f64) -> Vec<(f64, f64, f64)> {
        match *self {
            Haar1::Scaling => vec![(1.0, -t, t)],
            Haar1::Wavelet { j, k } => {
                let z = f64::from(k.signum()) * f64::from(2 * k.abs() - 1) * t;
                let s = 1.0 / f64::from(1u32 << j);
                vec![(1.0, s * (z - t), s * z), (-1.0, s * z, s * (z + t))]
            }
        }
    }

    /// Direct pointwise definition, used to cross-check the box lowering.
    pub fn eval(&self, x: f64, t: f64) -> f64 {
        let mother = |u: f64| {
            if (-t..0.0).contains(&u) {
                1.0
            } else if (0.0..=t).contains(&u) {
                -1.0
            } else {
                0.0
            }
        };
        match *self {
            Haar1::Scaling => {
                if x.abs() <= t {
                    1.0
                } else {
                    0.0
                }
            }
            Haar1::Wavelet { j, k } => {
                let z = f64::from(k.signum()) * f64::from(2 * k.abs() - 1) * t;
                mother(f64::from(1u32 << j) * x - z)
            }
        }
    }
}

/// Wavelets up to level `j_max` in canonical order: by level, then by
/// translation.
pub fn wavelets_1d(j_max: u32) -> Vec<Haar1> {
    (0..=j_max)
        .flat_map(|j| Haar1::translations(j).into_iter().map(move |k| Haar1::Wavelet { j, k }))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum HaarFamily {
    ScalingScaling,
    ScalingWavelet,
    WaveletScaling,
    WaveletWavelet,
}

/// Separable 2-D basis function `x(dx)·y(dy)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HaarBasis {
    pub x: Haar1,
    pub y: Haar1,
}

impl HaarBasis {
    pub fn family(&self) -> HaarFamily {
        match (self.x, self.y) {
            (Haar1::Scaling, Haar1::Scaling) => HaarFamily::ScalingScaling,
            (Haar1::Scaling, _) => HaarFamily::ScalingWavelet,
            (_, Haar1::Scaling) => HaarFamily::WaveletScaling,
            _ => HaarFamily::WaveletWavelet,
        }
    }

    pub fn eval(&self, dx: f64, dy: f64, t: f64) -> f64 {
        self.x.eval(dx, t) * self.y.eval(dy, t)
    }

    /// Short label such as `phi*psi(1,-1)`, used in reports.
    pub fn label(&self) -> String {
        let one = |h: &Haar1| match h {
            Haar1::Scaling => "phi".to_string(),
            Haar1::Wavelet { j, k } => format!("psi({j},{k})"),
        };
        format!("{}*{}", one(&self.x), one(&self.y))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HaarTerm {
    pub basis: HaarBasis,
    pub coefficient: f64,
}

/// Every 2-D basis function up to `j_max` in canonical order: families
/// `φφ, φψ, ψφ, ψψ`, and within a family `(j1, k1, j2, k2)` lexicographic.
pub fn canonical_bases(j_max: u32) -> Vec<HaarBasis> {
    let w = wavelets_1d(j_max);
    let mut out = Vec::with_capacity((w.len() + 1) * (w.len() + 1));
    out.push(HaarBasis {
        x: Haar1::Scaling,
        y: Haar1::Scaling,
    });
    out.extend(w.iter().map(|&y| HaarBasis { x: Haar1::Scaling, y }));
    out.extend(w.iter().map(|&x| HaarBasis { x, y: Haar1::Scaling }));
    for &x in &w {
        out.extend(w.iter().map(|&y| HaarBasis { x, y }));
    }
    out
}

/// Coefficients of the radial kernel `K(‖(dx, dy)‖)` on `[-T, T]²` for every
/// canonical basis function up to `j_max`.
pub fn haar_coefficients(kernel: &TruncatedKernel, j_max: u32) -> Vec<HaarTerm> {
    haar_coefficients_with_samples(kernel, j_max, HAAR_QUADRATURE_SAMPLES)
}

/// As [`haar_coefficients`] with an explicit per-axis sample count, rounded
/// up so every wavelet edge falls on a cell boundary.
///
/// The kernel is sampled once at cell midpoints and summed into a table, so
/// each coefficient costs a handful of rectangle lookups.
pub fn haar_coefficients_with_samples(kernel: &TruncatedKernel, j_max: u32, samples: usize) -> Vec<HaarTerm> {
    let align = 1usize << (j_max + 1);
    let n = samples.max(align).div_ceil(align) * align;
    let t = kernel.t;
    let h = 2.0 * t / n as f64;
    let centers: Vec<f64> = (0..n).map(|i| -t + (i as f64 + 0.5) * h).collect();
    let mut grid = Vec::with_capacity(n * n);
    for &y in &centers {
        grid.extend(centers.iter().map(|&x| kernel.base.eval(x.hypot(y))));
    }
    let sat = Sat2D::from_samples(n, n, &grid);
    let cell = |v: f64| ((v + t) / h).round() as i64;

    canonical_bases(j_max)
        .into_iter()
        .map(|basis| {
            let mut acc = 0.0;
            for (sx, ax, bx) in basis.x.pieces(t) {
                for (sy, ay, by) in basis.y.pieces(t) {
                    let r = Rect::new(cell(ax) - 1, cell(bx) - 1, cell(ay) - 1, cell(by) - 1);
                    acc += sx * sy * region_sum_2d(&sat, &r);
                }
            }
            let norm = basis.x.scale() * basis.y.scale() / (4.0 * t * t);
            HaarTerm {
                basis,
                coefficient: norm * acc * h * h,
            }
        })
        .collect()
}
