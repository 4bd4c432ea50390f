//! Truncated cosine expansion of range kernels.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::approx::kernel::TruncatedKernel;
use crate::approx::select::best_n_terms;
use crate::error::{Error, Result};

/// Midpoint samples over `[-T, T]` for the coefficient integrals.
pub const TRIG_QUADRATURE_SAMPLES: usize = 8192;

/// Sine coefficients of a symmetric kernel vanish; this is the tolerance,
/// relative to the largest cosine coefficient, at which that is checked.
const SINE_TOLERANCE: f64 = 1e-9;

/// Cosine coefficients `a_0 … a_{m-1}` of `K` on `[-T, T]`:
/// `a_0 = (1/2T)∫K` and `a_k = (1/T)∫K cos(πkx/T)`.
pub fn trig_coefficients(kernel: &TruncatedKernel, m: usize) -> Result<Vec<(usize, f64)>> {
    if m == 0 {
        return Err(Error::InvalidParameter("need at least one cosine coefficient".into()));
    }
    let t = kernel.t;
    let n = TRIG_QUADRATURE_SAMPLES;
    let h = 2.0 * t / n as f64;
    let samples: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let x = -t + (i as f64 + 0.5) * h;
            (x, kernel.base.eval(x))
        })
        .collect();

    let mut out = Vec::with_capacity(m);
    let mut worst_sine = 0.0f64;
    for k in 0..m {
        let w = PI * k as f64 / t;
        let (mut c, mut s) = (0.0, 0.0);
        for &(x, f) in &samples {
            c += f * (w * x).cos();
            s += f * (w * x).sin();
        }
        let scale = if k == 0 { h / (2.0 * t) } else { h / t };
        out.push((k, c * scale));
        worst_sine = worst_sine.max((s * h / t).abs());
    }
    let peak = out.iter().map(|(_, a)| a.abs()).fold(0.0, f64::max);
    debug_assert!(
        worst_sine <= SINE_TOLERANCE * peak.max(1.0),
        "kernel is not symmetric: sine coefficient {worst_sine}"
    );
    Ok(out)
}

/// Selected cosine terms on `[-T_r, T_r]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangePlan {
    pub terms: Vec<(usize, f64)>,
    pub t_r: f64,
}

impl RangePlan {
    /// Best `n` of the first `m` cosine coefficients.
    pub fn best_n(kernel: &TruncatedKernel, n: usize, m: usize) -> Result<Self> {
        let coeffs = trig_coefficients(kernel, m)?;
        let values: Vec<f64> = coeffs.iter().map(|&(_, a)| a).collect();
        let picked = best_n_terms(&values, n, m)?;
        Ok(Self {
            terms: picked.into_iter().map(|i| coeffs[i]).collect(),
            t_r: kernel.t,
        })
    }

    /// Highest selected frequency.
    pub fn max_frequency(&self) -> usize {
        self.terms.iter().map(|&(k, _)| k).max().unwrap_or(0)
    }

    /// Half-width of the level window, `round(T_r)`.
    pub fn level_halfwidth(&self) -> usize {
        (self.t_r + 0.5).floor() as usize
    }
}

/// `Σ a_k cos(πkt/T_r)` inside the support, zero outside.
pub fn eval_range_plan(plan: &RangePlan, t: f64) -> f64 {
    if t.abs() > plan.t_r {
        return 0.0;
    }
    plan.terms
        .iter()
        .map(|&(k, a)| a * (PI * k as f64 * t / plan.t_r).cos())
        .sum()
}
