//! Kernel truncation, Haar and cosine expansions, best N-term selection and
//! lowering of Haar terms to boxes.

pub mod boxes;
pub mod haar;
pub mod kernel;
pub mod report;
pub mod select;
pub mod trig;

pub use boxes::{best_n_plan, eval_spatial_plan, fused_plan, haar_to_boxes, BoxTerm, ContRect, SpatialPlan};
pub use haar::{canonical_bases, haar_coefficients, Haar1, HaarBasis, HaarFamily, HaarTerm, DEFAULT_J_MAX};
pub use kernel::{truncate_kernel, KernelFamily, KernelRole, KernelSpec, TruncatedKernel, DEFAULT_EPSILON};
pub use report::{approx_report, kernel_surface_quality, ApproxReport, CoefficientRow};
pub use select::{best_n_terms, min_m_for_top_n};
pub use trig::{eval_range_plan, trig_coefficients, RangePlan};

/// Candidate prefix length as a multiple of the requested term count.
pub const DEFAULT_M_FACTOR: usize = 20;
