//! Coefficient listings, N→M tables and kernel reconstruction quality.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::approx::boxes::{eval_spatial_plan, SpatialPlan};
use crate::approx::haar::haar_coefficients;
use crate::approx::kernel::{KernelRole, TruncatedKernel};
use crate::approx::select::{best_n_terms, min_m_for_top_n};
use crate::approx::trig::trig_coefficients;
use crate::error::Result;
use crate::image::Image;
use crate::quality::MetricReport;

/// Largest N summarised in the N→M table.
pub const SUMMARY_MAX_N: usize = 8;

/// Coefficients at or below this fraction of the largest are quadrature noise
/// and are reported as exact zeros.
const ZERO_SNAP: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientRow {
    pub basis: String,
    pub index: usize,
    pub coefficient: f64,
    pub selected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxReport {
    pub role: KernelRole,
    pub t: f64,
    pub n: usize,
    pub m: usize,
    pub rows: Vec<CoefficientRow>,
    /// `(N, minimal M)` for `N = 1..=8`.
    pub n_to_m: Vec<(usize, usize)>,
}

impl ApproxReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("basis,index,coefficient,selected\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{:.12e},{}",
                r.basis,
                r.index,
                r.coefficient,
                u8::from(r.selected)
            );
        }
        out
    }

    /// One line such as `N->M: 1:2 2:2 3:3`.
    pub fn summary_line(&self) -> String {
        let pairs: Vec<String> = self.n_to_m.iter().map(|(n, m)| format!("{n}:{m}")).collect();
        format!("N->M: {}", pairs.join(" "))
    }

    pub fn nonzero_count(&self) -> usize {
        self.rows.iter().filter(|r| r.coefficient != 0.0).count()
    }
}

/// Lists the canonical coefficients of `kernel`, marks the best `n` among the
/// first `m`, and tabulates the minimal `M` for `N = 1..=8`.
///
/// Spatial kernels list every Haar basis up to `j_max`; range kernels list
/// enough cosines to cover both `m` and the summary.
pub fn approx_report(
    kernel: &TruncatedKernel,
    n: usize,
    m: usize,
    j_max: u32,
    m_factor: usize,
) -> Result<ApproxReport> {
    let (labels, mut values): (Vec<String>, Vec<f64>) = match kernel.base.role {
        KernelRole::Spatial => haar_coefficients(kernel, j_max)
            .into_iter()
            .map(|t| (t.basis.label(), t.coefficient))
            .unzip(),
        KernelRole::Range => {
            let count = m.max(SUMMARY_MAX_N * m_factor.max(1)).max(SUMMARY_MAX_N);
            trig_coefficients(kernel, count)?
                .into_iter()
                .map(|(k, a)| (format!("cos({k})"), a))
                .unzip()
        }
    };
    let peak = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    for v in values.iter_mut() {
        if v.abs() <= ZERO_SNAP * peak {
            *v = 0.0;
        }
    }
    let selected = best_n_terms(&values, n, m)?;
    let rows = labels
        .into_iter()
        .zip(&values)
        .enumerate()
        .map(|(index, (basis, &coefficient))| CoefficientRow {
            basis,
            index,
            coefficient,
            selected: selected.binary_search(&index).is_ok(),
        })
        .collect();
    let n_to_m = (1..=SUMMARY_MAX_N.min(values.len()))
        .map(|k| Ok((k, min_m_for_top_n(&values, k)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ApproxReport {
        role: kernel.base.role,
        t: kernel.t,
        n,
        m,
        rows,
        n_to_m,
    })
}

/// Side length, in samples, of the surfaces compared by [`kernel_surface_quality`].
pub const SURFACE_SAMPLES: usize = 128;

/// Half-extent of the compared surfaces in units of `T_s`.
pub const SURFACE_EXTENT: f64 = 4.0;

/// Compares a spatial plan with the truncated kernel it approximates.
///
/// Both surfaces are sampled at cell centres of a `128 × 128` grid over
/// `[-4T_s, 4T_s]²`, mapped to `[0, 255]` by the true kernel's minimum and
/// maximum, and compared with PSNR and SSIM.
pub fn kernel_surface_quality(kernel: &TruncatedKernel, plan: &SpatialPlan) -> Result<MetricReport> {
    let n = SURFACE_SAMPLES;
    let ext = SURFACE_EXTENT * kernel.t;
    let coord = |i: usize| -ext + (i as f64 + 0.5) * 2.0 * ext / n as f64;
    let truth = Image::from_fn(n, n, |x, y| kernel.eval_2d(coord(x), coord(y)))?;
    let approx = Image::from_fn(n, n, |x, y| eval_spatial_plan(plan, coord(x), coord(y)))?;
    let (lo, hi) = truth.range();
    let span = if hi > lo { hi - lo } else { 1.0 };
    let to_255 = |img: &Image| Image::from_fn(n, n, |x, y| 255.0 * (img.get(x, y) - lo) / span);
    MetricReport::compare(&to_255(&truth)?, &to_255(&approx)?)
}
