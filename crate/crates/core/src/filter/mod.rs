//! Brute-force oracle and the accelerated box-filter pipeline.

pub mod brute;
pub mod cache;
pub mod fast;
pub mod lut;
pub mod stacks;

use serde::{Deserialize, Serialize};

use crate::approx::boxes::{best_n_plan, fused_plan, SpatialPlan};
use crate::approx::haar::DEFAULT_J_MAX;
use crate::approx::kernel::{truncate_kernel, KernelRole, KernelSpec, TruncatedKernel};
use crate::approx::trig::RangePlan;
use crate::approx::DEFAULT_M_FACTOR;
use crate::error::{Error, Result};

pub use brute::brute_force_bf;
pub use cache::{filter_with_cache, precompute_stacks, precompute_stacks_with, PrecomputeCache, DEFAULT_MAX_FREQUENCY};
pub use fast::{fast_bf, fast_bf_with, FilterDiagnostics, FilterOutput};
pub use lut::{build_intensity_lut, IntensityLut};
pub use stacks::{build_aux_stacks, AuxStack, ChannelId, ChannelKind, TrigSource};

/// Denominators at or below this value are treated as degenerate.
pub const DEGENERATE_DENOMINATOR: f64 = 1e-12;

/// Default number of cosine terms.
pub const DEFAULT_RANGE_TERMS: usize = 5;

/// Default fused spatial plan level (DC plus both axis-aligned wavelet pairs).
pub const DEFAULT_SPATIAL_LEVEL: usize = 3;

/// How the spatial plan is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum SpatialChoice {
    /// Cumulative low-order plan of the given level (1..=4).
    Fused { level: usize },
    /// Best `n` Haar terms among the first `m` up to level `j_max`.
    BestN { n: usize, m: usize, j_max: u32 },
}

impl Default for SpatialChoice {
    fn default() -> Self {
        SpatialChoice::Fused {
            level: DEFAULT_SPATIAL_LEVEL,
        }
    }
}

/// Everything the accelerated filter needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterParams {
    pub spatial_kernel: TruncatedKernel,
    pub spatial_plan: SpatialPlan,
    pub range_kernel: TruncatedKernel,
    pub range_plan: RangePlan,
    /// Number of cosine terms, kept so the plan can be rebuilt for a wider
    /// truncation radius.
    pub range_terms: usize,
    /// Candidate prefix length for the cosine selection.
    pub range_m: usize,
    /// Window half-width in pixels.
    pub rho: usize,
}

impl FilterParams {
    /// Builds parameters for Gaussian kernels. `rho = None` picks `ceil(T_s)`.
    pub fn gaussian(
        sigma_s: f64,
        sigma_r: f64,
        epsilon: f64,
        spatial: SpatialChoice,
        range_terms: usize,
        m_factor: usize,
        rho: Option<usize>,
    ) -> Result<Self> {
        let ks = truncate_kernel(&KernelSpec::gaussian(sigma_s, KernelRole::Spatial)?, epsilon)?;
        let kr = truncate_kernel(&KernelSpec::gaussian(sigma_r, KernelRole::Range)?, epsilon)?;
        Self::from_kernels(ks, kr, spatial, range_terms, m_factor, rho)
    }

    pub fn from_kernels(
        spatial_kernel: TruncatedKernel,
        range_kernel: TruncatedKernel,
        spatial: SpatialChoice,
        range_terms: usize,
        m_factor: usize,
        rho: Option<usize>,
    ) -> Result<Self> {
        if m_factor == 0 {
            return Err(Error::InvalidParameter("m-factor must be at least 1".into()));
        }
        let spatial_plan = match spatial {
            SpatialChoice::Fused { level } => fused_plan(&spatial_kernel, level)?,
            SpatialChoice::BestN { n, m, j_max } => best_n_plan(&spatial_kernel, n, m, j_max)?,
        };
        let range_m = range_terms.saturating_mul(m_factor);
        let range_plan = RangePlan::best_n(&range_kernel, range_terms, range_m)?;
        let rho = rho.unwrap_or_else(|| min_rho(spatial_kernel.t));
        let params = Self {
            spatial_kernel,
            spatial_plan,
            range_kernel,
            range_plan,
            range_terms,
            range_m,
            rho,
        };
        params.validate()?;
        Ok(params)
    }

    /// Gaussian defaults: ε = 0.01, fused level 3, five cosine terms, M = 20N.
    pub fn gaussian_defaults(sigma_s: f64, sigma_r: f64) -> Result<Self> {
        Self::gaussian(
            sigma_s,
            sigma_r,
            crate::approx::DEFAULT_EPSILON,
            SpatialChoice::default(),
            DEFAULT_RANGE_TERMS,
            DEFAULT_M_FACTOR,
            None,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.range_plan.terms.is_empty() {
            return Err(Error::InvalidParameter("range plan has no terms".into()));
        }
        let need = min_rho(self.spatial_kernel.t);
        if self.rho < need {
            return Err(Error::InvalidParameter(format!(
                "window radius {} is smaller than ceil(T_s) = {need}",
                self.rho
            )));
        }
        Ok(())
    }

    /// Same parameters with the range support widened to `t`, the cosine
    /// coefficients recomputed on `[-t, t]`.
    pub fn with_range_radius(&self, t: f64) -> Result<Self> {
        let range_kernel = self.range_kernel.with_radius(t)?;
        let range_plan = RangePlan::best_n(&range_kernel, self.range_terms, self.range_m)?;
        Ok(Self {
            range_kernel,
            range_plan,
            ..self.clone()
        })
    }
}

/// Smallest window radius that holds a plan of support `[-t_s, t_s]`.
///
/// Truncation radii come from a bisection, so a radius that is meant to be
/// an integer may sit a hair above it; that slack is ignored.
pub fn min_rho(t_s: f64) -> usize {
    (t_s - 1e-6).ceil().max(0.0) as usize
}

/// The default best-N spatial choice for `n` terms.
pub fn best_n_choice(n: usize) -> SpatialChoice {
    SpatialChoice::BestN {
        n,
        m: n * DEFAULT_M_FACTOR,
        j_max: DEFAULT_J_MAX,
    }
}
