//! JSON wire types shared by the HTTP service and its client.
//!
//! Images travel as base64-encoded PGM files. Encoding is left to the
//! transport crates; here they are plain strings.

use serde::{Deserialize, Serialize};

use crate::approx::haar::DEFAULT_J_MAX;
use crate::approx::kernel::{truncate_kernel, KernelRole, KernelSpec, TruncatedKernel, DEFAULT_EPSILON};
use crate::approx::report::ApproxReport;
use crate::approx::DEFAULT_M_FACTOR;
use crate::bench::{BenchConfig, BenchRow, Method};
use crate::error::{Error, Result};
use crate::filter::{
    FilterDiagnostics, FilterParams, SpatialChoice, DEFAULT_MAX_FREQUENCY, DEFAULT_RANGE_TERMS, DEFAULT_SPATIAL_LEVEL,
};
use crate::quality::MetricReport;

fn default_epsilon() -> f64 {
    DEFAULT_EPSILON
}
fn default_spatial_terms() -> usize {
    DEFAULT_SPATIAL_LEVEL
}
fn default_range_terms() -> usize {
    DEFAULT_RANGE_TERMS
}
fn default_m_factor() -> usize {
    DEFAULT_M_FACTOR
}
fn default_j_max() -> u32 {
    DEFAULT_J_MAX
}
fn default_max_frequency() -> usize {
    DEFAULT_MAX_FREQUENCY
}

/// How `spatial_terms` is interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpatialMode {
    /// `spatial_terms` is the fused plan level, 1..=4.
    #[default]
    Fused,
    /// `spatial_terms` is the number of Haar terms kept.
    BestN,
}

/// Kernel and plan settings shared by every filtering request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelArgs {
    pub sigma_s: f64,
    pub sigma_r: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub spatial_mode: SpatialMode,
    #[serde(default = "default_spatial_terms")]
    pub spatial_terms: usize,
    #[serde(default = "default_range_terms")]
    pub range_terms: usize,
    #[serde(default = "default_m_factor")]
    pub m_factor: usize,
    /// Window half-width; defaults to `ceil(T_s)`.
    #[serde(default)]
    pub rho: Option<usize>,
}

impl KernelArgs {
    pub fn new(sigma_s: f64, sigma_r: f64) -> Self {
        Self {
            sigma_s,
            sigma_r,
            epsilon: DEFAULT_EPSILON,
            spatial_mode: SpatialMode::Fused,
            spatial_terms: DEFAULT_SPATIAL_LEVEL,
            range_terms: DEFAULT_RANGE_TERMS,
            m_factor: DEFAULT_M_FACTOR,
            rho: None,
        }
    }

    pub fn spatial_choice(&self) -> SpatialChoice {
        match self.spatial_mode {
            SpatialMode::Fused => SpatialChoice::Fused {
                level: self.spatial_terms,
            },
            SpatialMode::BestN => SpatialChoice::BestN {
                n: self.spatial_terms,
                m: self.spatial_terms.saturating_mul(self.m_factor),
                j_max: DEFAULT_J_MAX,
            },
        }
    }

    pub fn to_params(&self) -> Result<FilterParams> {
        FilterParams::gaussian(
            self.sigma_s,
            self.sigma_r,
            self.epsilon,
            self.spatial_choice(),
            self.range_terms,
            self.m_factor,
            self.rho,
        )
    }
}

/// Filtering methods available on the filter endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FilterMethod {
    Brute,
    #[default]
    Fast,
    FastLut,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterRequest {
    /// Base64 PGM.
    pub image: String,
    #[serde(default)]
    pub method: FilterMethod,
    #[serde(flatten)]
    pub kernel: KernelArgs,
    /// Also run the brute-force filter and report PSNR/SSIM against it.
    #[serde(default)]
    pub compare_oracle: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterResponse {
    /// Base64 P5 PGM of the output.
    pub image: String,
    pub width: usize,
    pub height: usize,
    pub wall_ms: f64,
    /// Present for the accelerated methods.
    pub diagnostics: Option<FilterDiagnostics>,
    /// Present when the oracle comparison was requested.
    pub metrics: Option<MetricReport>,
    /// Truncation radius actually used for the range kernel.
    pub t_r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRequest {
    /// Base64 PGM; a synthetic image is generated when absent.
    #[serde(default)]
    pub image: Option<String>,
    #[serde(default)]
    pub width: Option<usize>,
    #[serde(default)]
    pub height: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    pub config: BenchConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResponse {
    pub rows: Vec<BenchRow>,
    pub csv: String,
}

/// Kernel description for coefficient reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum KernelDescription {
    Gaussian { sigma: f64 },
    Box { half_width: f64 },
    Tabulated { step: f64, values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxReportRequest {
    pub role: KernelRole,
    pub kernel: KernelDescription,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Terms to select.
    pub terms: usize,
    #[serde(default = "default_m_factor")]
    pub m_factor: usize,
    #[serde(default = "default_j_max")]
    pub j_max: u32,
}

impl ApproxReportRequest {
    pub fn truncated_kernel(&self) -> Result<TruncatedKernel> {
        let spec = match &self.kernel {
            KernelDescription::Gaussian { sigma } => KernelSpec::gaussian(*sigma, self.role)?,
            KernelDescription::Box { half_width } => KernelSpec::box_kernel(*half_width, self.role)?,
            KernelDescription::Tabulated { step, values } => KernelSpec::tabulated(*step, values.clone(), self.role)?,
        };
        truncate_kernel(&spec, self.epsilon)
    }

    pub fn m(&self) -> usize {
        self.terms.saturating_mul(self.m_factor)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxReportResponse {
    pub csv: String,
    pub summary: String,
    pub report: ApproxReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecomputeRequest {
    /// Base64 PGM.
    pub image: String,
    /// Candidate range truncation radii, ascending.
    pub radii: Vec<f64>,
    #[serde(default = "default_max_frequency")]
    pub max_frequency: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionInfo {
    pub id: String,
    pub width: usize,
    pub height: usize,
    pub radii: Vec<f64>,
    pub max_frequency: usize,
    pub build_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionFilterRequest {
    #[serde(flatten)]
    pub kernel: KernelArgs,
    #[serde(default)]
    pub compare_oracle: bool,
}

/// Error payload returned with every non-2xx response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
}

/// Parses a comma-separated list such as `2,6,10`.
pub fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.parse()
                .map_err(|_| Error::InvalidParameter(format!("cannot parse list item {p:?}")))
        })
        .collect()
}

/// The bench methods that map to a filter method, for reuse by callers.
pub fn filter_method_for(method: Method) -> Option<FilterMethod> {
    match method {
        Method::Brute => Some(FilterMethod::Brute),
        Method::Fast => Some(FilterMethod::Fast),
        Method::FastLut => Some(FilterMethod::FastLut),
        Method::Cached => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filter_request_defaults() {
        let r: FilterRequest = serde_json::from_str(r#"{"image":"", "sigma_s": 2, "sigma_r": 30}"#).unwrap();
        assert_eq!(r.method, FilterMethod::Fast);
        assert_eq!(r.kernel, KernelArgs::new(2.0, 30.0));
        assert!(!r.compare_oracle);
    }

    #[test]
    fn kebab_case_methods() {
        let m: FilterMethod = serde_json::from_str("\"fast-lut\"").unwrap();
        assert_eq!(m, FilterMethod::FastLut);
        let b: Method = serde_json::from_str("\"cached\"").unwrap();
        assert_eq!(b, Method::Cached);
    }

    #[test]
    fn list_parsing() {
        assert_eq!(parse_list::<usize>("2, 6,10").unwrap(), vec![2, 6, 10]);
        assert!(parse_list::<usize>("2,x").is_err());
        assert!(parse_list::<f64>("").unwrap().is_empty());
    }

    #[test]
    fn best_n_mode_uses_m_factor() {
        let mut k = KernelArgs::new(3.0, 30.0);
        k.spatial_mode = SpatialMode::BestN;
        k.spatial_terms = 4;
        assert_eq!(
            k.spatial_choice(),
            SpatialChoice::BestN {
                n: 4,
                m: 80,
                j_max: DEFAULT_J_MAX
            }
        );
    }
}
