//! `boxbf`: command-line front end for the box bilateral filter service.
//!
//! Every subcommand except `serve` is a client of the HTTP service. Without
//! `--server` an in-process server is started on an ephemeral local port.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use boxbf_core::api::{FilterMethod, KernelArgs, SpatialMode};
use boxbf_core::approx::kernel::KernelRole;
use boxbf_core::bench::Method;
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exit status for runtime failures.
pub const EXIT_RUNTIME: u8 = 1;
/// Exit status for usage errors.
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "boxbf",
    version,
    about = "Constant-time bilateral filtering with box-filter kernels"
)]
pub struct Cli {
    /// Base URL of a running service, e.g. http://127.0.0.1:8080. An
    /// in-process server is used when omitted.
    #[arg(long, global = true)]
    server: Option<String>,

    /// Worker threads for filtering in this process (default: all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,

    /// Log verbosity, e.g. `info` or `boxbf_service=debug`.
    #[arg(long, global = true, default_value = "warn")]
    log: String,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Filter one PGM image.
    Filter(FilterCmd),
    /// Time brute-force and accelerated filters over a parameter sweep; writes CSV.
    Bench(BenchCmd),
    /// List expansion coefficients of a kernel and the N->M selection table.
    ApproxReport(ApproxCmd),
    /// Precompute per-radius tables for an image, then filter from them.
    Precompute(PrecomputeCmd),
    /// Run the HTTP service in the foreground.
    Serve(ServeCmd),
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

fn unit_interval(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v < 1.0 => Ok(v),
        _ => Err(format!("expected a number in (0, 1), got {s:?}")),
    }
}

fn count(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(format!("expected a positive integer, got {s:?}")),
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Brute,
    Fast,
    FastLut,
}

impl From<MethodArg> for FilterMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Brute => FilterMethod::Brute,
            MethodArg::Fast => FilterMethod::Fast,
            MethodArg::FastLut => FilterMethod::FastLut,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SpatialModeArg {
    /// `--spatial-terms` is the cumulative plan level 1..=4.
    Fused,
    /// `--spatial-terms` is the number of Haar terms kept.
    BestN,
}

/// Kernel flags shared by `filter`, `bench` and `precompute`.
#[derive(Debug, Clone, Args)]
struct KernelFlags {
    /// Spatial Gaussian sigma in pixels.
    #[arg(long, value_parser = positive)]
    sigma_s: f64,
    /// Range Gaussian sigma in intensity levels.
    #[arg(long, value_parser = positive)]
    sigma_r: f64,
    #[command(flatten)]
    plan: PlanFlags,
    /// Window half-width in pixels (default: ceil of the spatial truncation radius).
    #[arg(long)]
    rho: Option<usize>,
}

#[derive(Debug, Clone, Args)]
struct PlanFlags {
    /// Kernel truncation threshold relative to the peak.
    #[arg(long, default_value_t = 0.01, value_parser = unit_interval)]
    epsilon: f64,
    #[arg(long, value_enum, default_value = "fused")]
    spatial_mode: SpatialModeArg,
    /// Fused plan level, or Haar term count with `--spatial-mode best-n`.
    #[arg(long, default_value_t = 3, value_parser = count)]
    spatial_terms: usize,
    /// Cosine terms for the range kernel.
    #[arg(long, default_value_t = 5, value_parser = count)]
    range_terms: usize,
    /// Candidate prefix length per selected term (M = m_factor * N).
    #[arg(long, default_value_t = 20, value_parser = count)]
    m_factor: usize,
}

impl PlanFlags {
    fn spatial_mode(&self) -> SpatialMode {
        match self.spatial_mode {
            SpatialModeArg::Fused => SpatialMode::Fused,
            SpatialModeArg::BestN => SpatialMode::BestN,
        }
    }
}

impl KernelFlags {
    fn to_args(&self) -> KernelArgs {
        KernelArgs {
            sigma_s: self.sigma_s,
            sigma_r: self.sigma_r,
            epsilon: self.plan.epsilon,
            spatial_mode: self.plan.spatial_mode(),
            spatial_terms: self.plan.spatial_terms,
            range_terms: self.plan.range_terms,
            m_factor: self.plan.m_factor,
            rho: self.rho,
        }
    }
}

#[derive(Debug, Args)]
struct FilterCmd {
    #[arg(long, value_enum, default_value = "fast")]
    method: MethodArg,
    #[command(flatten)]
    kernel: KernelFlags,
    /// Also run the brute-force filter and print PSNR/SSIM against it.
    #[arg(long)]
    compare_oracle: bool,
    /// Input PGM (P2 or P5).
    input: PathBuf,
    /// Output PGM (P5, 8-bit).
    output: PathBuf,
}

#[derive(Debug, Args)]
struct BenchCmd {
    /// Input PGM; a synthetic image is generated when omitted.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Synthetic image width.
    #[arg(long, default_value_t = 512, value_parser = count)]
    width: usize,
    /// Synthetic image height (default: width).
    #[arg(long, value_parser = count)]
    height: Option<usize>,
    /// Seed for the synthetic image.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Window radii; sigma_s is chosen per radius so the truncation radius equals it.
    #[arg(long, value_delimiter = ',', default_value = "2,6,10,14", value_parser = count)]
    radii: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "40", value_parser = positive)]
    sigma_r: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "brute,fast,fast-lut,cached")]
    methods: Vec<Method>,
    #[command(flatten)]
    plan: PlanFlags,
    /// Untimed runs before timing.
    #[arg(long, default_value_t = 1)]
    warmup: usize,
    /// Timed runs; the median is reported.
    #[arg(long, default_value_t = 5, value_parser = count)]
    runs: usize,
    /// CSV destination (default: stdout).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RoleArg {
    Spatial,
    Range,
}

impl From<RoleArg> for KernelRole {
    fn from(r: RoleArg) -> Self {
        match r {
            RoleArg::Spatial => KernelRole::Spatial,
            RoleArg::Range => KernelRole::Range,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    Gaussian,
    Box,
    Tabulated,
}

#[derive(Debug, Args)]
struct ApproxCmd {
    #[arg(long, value_enum)]
    role: RoleArg,
    #[arg(long, value_enum, default_value = "gaussian")]
    kernel: FamilyArg,
    /// Gaussian sigma.
    #[arg(long, value_parser = positive, required_if_eq("kernel", "gaussian"))]
    sigma: Option<f64>,
    /// Box half-width.
    #[arg(long, value_parser = positive, required_if_eq("kernel", "box"))]
    half_width: Option<f64>,
    /// Tabulated kernel samples: a text file of non-increasing values at
    /// 0, step, 2*step, ... separated by commas or whitespace.
    #[arg(long, required_if_eq("kernel", "tabulated"))]
    table: Option<PathBuf>,
    /// Sample spacing of `--table`.
    #[arg(long, value_parser = positive, default_value_t = 1.0)]
    step: f64,
    #[arg(long, default_value_t = 0.01, value_parser = unit_interval)]
    epsilon: f64,
    /// Terms to mark as selected.
    #[arg(long, default_value_t = 2, value_parser = count)]
    terms: usize,
    #[arg(long, default_value_t = 20, value_parser = count)]
    m_factor: usize,
    /// Finest Haar level for spatial kernels.
    #[arg(long, default_value_t = 4)]
    j_max: u32,
    /// CSV destination (default: stdout, with the summary on stderr).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PrecomputeCmd {
    /// Range truncation radii to precompute, ascending.
    #[arg(long, value_delimiter = ',', required = true, value_parser = positive)]
    radii: Vec<f64>,
    /// Highest cosine frequency stored per radius.
    #[arg(long, default_value_t = 16, value_parser = count)]
    max_frequency: usize,
    #[command(flatten)]
    kernel: KernelFlags,
    #[arg(long)]
    compare_oracle: bool,
    input: PathBuf,
    output: PathBuf,
}

#[derive(Debug, Args)]
struct ServeCmd {
    /// Address to bind.
    #[arg(long, default_value = "127.0.0.1:8080")]
    addr: String,
}

/// A failure with the exit status it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn runtime(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_RUNTIME,
            message: message.into(),
        }
    }
}

impl From<boxbf_client::ClientError> for Failure {
    fn from(e: boxbf_client::ClientError) -> Self {
        match e.status() {
            Some(400..=499) => Failure::usage(e.to_string()),
            _ => Failure::runtime(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version also come through here, with exit code 0
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::new(&cli.log))
        .with_writer(std::io::stderr)
        .init();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.into()).build_global() {
            eprintln!("error: cannot size thread pool: {e}");
            return ExitCode::from(EXIT_RUNTIME);
        }
    }
    let runtime = match tokio::runtime::Runtime::new() {
        Ok(rt) => rt,
        Err(e) => {
            eprintln!("error: cannot start async runtime: {e}");
            return ExitCode::from(EXIT_RUNTIME);
        }
    };
    match runtime.block_on(commands::run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
