//! Symmetric, non-increasing kernels and their truncation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cutoff: a kernel is dropped where it falls below 1% of its peak.
pub const DEFAULT_EPSILON: f64 = 0.01;

const BISECTION_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelRole {
    Spatial,
    Range,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum KernelFamily {
    /// `exp(-x² / 2σ²)`.
    Gaussian { sigma: f64 },
    /// `1` on `[-half_width, half_width]`, `0` beyond.
    Box { half_width: f64 },
    /// Samples of the non-negative half at `x = i·step`, linearly
    /// interpolated and mirrored. Zero beyond the last sample.
    Tabulated { step: f64, values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    #[serde(flatten)]
    pub family: KernelFamily,
    pub role: KernelRole,
}

impl KernelSpec {
    pub fn gaussian(sigma: f64, role: KernelRole) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidKernel(format!(
                "gaussian sigma must be positive, got {sigma}"
            )));
        }
        Ok(Self {
            family: KernelFamily::Gaussian { sigma },
            role,
        })
    }

    pub fn box_kernel(half_width: f64, role: KernelRole) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidKernel(format!(
                "box half-width must be positive, got {half_width}"
            )));
        }
        Ok(Self {
            family: KernelFamily::Box { half_width },
            role,
        })
    }

    /// A tabulated kernel. The table must start positive, be non-increasing
    /// and have a positive finite step.
    pub fn tabulated(step: f64, values: Vec<f64>, role: KernelRole) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::InvalidKernel(format!("table step must be positive, got {step}")));
        }
        match values.first() {
            Some(&v0) if v0.is_finite() && v0 > 0.0 => {}
            _ => return Err(Error::InvalidKernel("table must start with a positive value".into())),
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidKernel(
                "table values must be finite and non-negative".into(),
            ));
        }
        if values.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidKernel("table must be non-increasing".into()));
        }
        Ok(Self {
            family: KernelFamily::Tabulated { step, values },
            role,
        })
    }

    /// Kernel value at signed distance `x`.
    pub fn eval(&self, x: f64) -> f64 {
        let x = x.abs();
        match &self.family {
            KernelFamily::Gaussian { sigma } => (-x * x / (2.0 * sigma * sigma)).exp(),
            KernelFamily::Box { half_width } => {
                if x <= *half_width {
                    1.0
                } else {
                    0.0
                }
            }
            KernelFamily::Tabulated { step, values } => {
                let pos = x / step;
                let i = pos.floor() as usize;
                if i + 1 < values.len() {
                    let t = pos - i as f64;
                    values[i] * (1.0 - t) + values[i + 1] * t
                } else if i + 1 == values.len() && pos == i as f64 {
                    values[i]
                } else {
                    0.0
                }
            }
        }
    }

    /// Largest argument at which the kernel is defined, if bounded.
    fn support_end(&self) -> Option<f64> {
        match &self.family {
            KernelFamily::Gaussian { .. } | KernelFamily::Box { .. } => None,
            KernelFamily::Tabulated { step, values } => Some(step * (values.len() - 1) as f64),
        }
    }
}

/// A kernel set to zero outside `[-t, t]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncatedKernel {
    pub base: KernelSpec,
    pub t: f64,
    pub epsilon: f64,
}

impl TruncatedKernel {
    /// Truncated value: the base kernel inside `[-t, t]`, zero outside.
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        if x.abs() <= self.t {
            self.base.eval(x)
        } else {
            0.0
        }
    }

    /// Radial evaluation `K(‖(dx, dy)‖)` restricted to the square
    /// `[-t, t]²`, which is how spatial kernels are expanded.
    #[inline]
    pub fn eval_2d(&self, dx: f64, dy: f64) -> f64 {
        if dx.abs() <= self.t && dy.abs() <= self.t {
            self.base.eval(dx.hypot(dy))
        } else {
            0.0
        }
    }

    /// Same kernel with the support widened (or narrowed) to `t`.
    pub fn with_radius(&self, t: f64) -> Result<Self> {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "truncation radius must be positive, got {t}"
            )));
        }
        Ok(Self {
            base: self.base.clone(),
            t,
            epsilon: self.epsilon,
        })
    }
}

/// Finds the smallest `t ≥ 0` with `K(t)/K(0) ≤ ε` by bisection.
pub fn truncate_kernel(spec: &KernelSpec, epsilon: f64) -> Result<TruncatedKernel> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    let k0 = spec.eval(0.0);
    let below = |x: f64| spec.eval(x) / k0 <= epsilon;

    let mut hi = match spec.support_end() {
        Some(end) => {
            // The final sample is the last point where the table is defined;
            // if it is still above the cutoff the kernel never truncates.
            if spec.eval(end) / k0 > epsilon {
                return Err(Error::NotTruncatable(format!(
                    "kernel stays above {epsilon} of its peak on the tabulated support [0, {end}]"
                )));
            }
            end
        }
        None => {
            let mut hi = 1.0;
            while !below(hi) {
                hi *= 2.0;
                if !hi.is_finite() {
                    return Err(Error::NotTruncatable("kernel never decays below epsilon".into()));
                }
            }
            hi
        }
    };
    let mut lo = 0.0;
    while hi - lo > BISECTION_RTOL * hi {
        let mid = 0.5 * (lo + hi);
        if below(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(TruncatedKernel {
        base: spec.clone(),
        t: hi,
        epsilon,
    })
}

/// Closed-form truncation radius of a Gaussian.
pub fn gaussian_radius(sigma: f64, epsilon: f64) -> f64 {
    sigma * (-2.0 * epsilon.ln()).sqrt()
}

/// The Gaussian width whose truncation radius at `epsilon` is `t`.
pub fn gaussian_sigma_for_radius(t: f64, epsilon: f64) -> f64 {
    t / (-2.0 * epsilon.ln()).sqrt()
}
