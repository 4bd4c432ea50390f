//! Timing harness comparing the brute-force and accelerated filters.
//!
//! Each configuration runs once untimed, then `runs` timed repetitions whose
//! median is reported. Quality columns compare the 8-bit outputs against the
//! brute-force filter with the same window and kernels.

use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::approx::kernel::{gaussian_sigma_for_radius, DEFAULT_EPSILON};
use crate::approx::DEFAULT_M_FACTOR;
use crate::error::{Error, Result};
use crate::filter::{
    brute_force_bf, fast_bf_with, filter_with_cache, precompute_stacks_with, FilterParams, SpatialChoice, TrigSource,
    DEFAULT_MAX_FREQUENCY, DEFAULT_RANGE_TERMS,
};
use crate::image::Image;
use crate::quality::{psnr, ssim};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Brute,
    Fast,
    FastLut,
    /// Accelerated filter served from a precomputed cache; only the cached
    /// phase is timed.
    Cached,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Brute, Method::Fast, Method::FastLut, Method::Cached];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Brute => "brute",
            Method::Fast => "fast",
            Method::FastLut => "fast-lut",
            Method::Cached => "cached",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    /// Window radii. Each row uses `σ_s` chosen so that `T_s` equals the radius.
    pub radii: Vec<usize>,
    pub sigma_r: Vec<f64>,
    pub methods: Vec<Method>,
    pub epsilon: f64,
    pub spatial: SpatialChoice,
    pub range_terms: usize,
    pub m_factor: usize,
    pub warmup: usize,
    pub runs: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            radii: vec![2, 6, 10, 14],
            sigma_r: vec![40.0],
            methods: Method::ALL.to_vec(),
            epsilon: DEFAULT_EPSILON,
            spatial: SpatialChoice::default(),
            range_terms: DEFAULT_RANGE_TERMS,
            m_factor: DEFAULT_M_FACTOR,
            warmup: 1,
            runs: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub method: Method,
    pub radius: usize,
    pub sigma_s: f64,
    pub sigma_r: f64,
    pub image_px: usize,
    pub wall_ms: f64,
    pub psnr_vs_oracle: f64,
    pub ssim_vs_oracle: f64,
}

pub const CSV_HEADER: &str = "method,radius,sigma_s,sigma_r,image_px,wall_ms,psnr_vs_oracle,ssim_vs_oracle";

pub fn rows_to_csv(rows: &[BenchRow]) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{:.6},{:.6},{},{:.3},{:.4},{:.6}",
            r.method, r.radius, r.sigma_s, r.sigma_r, r.image_px, r.wall_ms, r.psnr_vs_oracle, r.ssim_vs_oracle
        );
    }
    out
}

/// Median of `runs` timed calls after `warmup` untimed ones. Returns the
/// last result alongside the median in milliseconds.
pub fn time_median<T>(warmup: usize, runs: usize, mut f: impl FnMut() -> Result<T>) -> Result<(T, f64)> {
    if runs == 0 {
        return Err(Error::InvalidParameter("need at least one timed run".into()));
    }
    for _ in 0..warmup {
        f()?;
    }
    let mut times = Vec::with_capacity(runs);
    let mut last = None;
    for _ in 0..runs {
        let t = Instant::now();
        let v = f()?;
        times.push(t.elapsed().as_secs_f64() * 1e3);
        last = Some(v);
    }
    times.sort_by(f64::total_cmp);
    let mid = times.len() / 2;
    let median = if times.len() % 2 == 1 {
        times[mid]
    } else {
        0.5 * (times[mid - 1] + times[mid])
    };
    Ok((last.expect("runs > 0"), median))
}

fn gaussian(sigma: f64) -> impl Fn(f64) -> f64 + Sync {
    move |x: f64| (-x * x / (2.0 * sigma * sigma)).exp()
}

pub fn run_bench(image: &Image, cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    if cfg.radii.is_empty() || cfg.sigma_r.is_empty() || cfg.methods.is_empty() {
        return Err(Error::InvalidParameter("bench sweep lists must be non-empty".into()));
    }
    if cfg.radii.contains(&0) {
        return Err(Error::InvalidParameter("bench radii must be positive".into()));
    }
    let mut rows = Vec::new();
    for &radius in &cfg.radii {
        let sigma_s = gaussian_sigma_for_radius(radius as f64, cfg.epsilon);
        for &sigma_r in &cfg.sigma_r {
            let params = FilterParams::gaussian(
                sigma_s,
                sigma_r,
                cfg.epsilon,
                cfg.spatial,
                cfg.range_terms,
                cfg.m_factor,
                Some(radius),
            )?;
            let oracle = brute_force_bf(image, gaussian(sigma_s), gaussian(sigma_r), radius).quantized();
            for &method in &cfg.methods {
                let (out, wall_ms) = match method {
                    Method::Brute => time_median(cfg.warmup, cfg.runs, || {
                        Ok(brute_force_bf(image, gaussian(sigma_s), gaussian(sigma_r), radius))
                    })?,
                    Method::Fast => time_median(cfg.warmup, cfg.runs, || {
                        Ok(fast_bf_with(image, &params, TrigSource::Direct)?.image)
                    })?,
                    Method::FastLut => time_median(cfg.warmup, cfg.runs, || {
                        Ok(fast_bf_with(image, &params, TrigSource::Lut)?.image)
                    })?,
                    Method::Cached => {
                        let max_k = params.range_plan.max_frequency().max(DEFAULT_MAX_FREQUENCY);
                        let cache = precompute_stacks_with(image, &[params.range_kernel.t], max_k)?;
                        time_median(cfg.warmup, cfg.runs, || {
                            Ok(filter_with_cache(image, &cache, &params)?.image)
                        })?
                    }
                };
                let q = out.quantized();
                rows.push(BenchRow {
                    method,
                    radius,
                    sigma_s,
                    sigma_r,
                    image_px: image.len(),
                    wall_ms,
                    psnr_vs_oracle: psnr(&q, &oracle)?,
                    ssim_vs_oracle: ssim(&q, &oracle)?,
                });
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::synthetic_image;

    fn small() -> BenchConfig {
        BenchConfig {
            radii: vec![2, 4],
            sigma_r: vec![30.0],
            warmup: 0,
            runs: 1,
            ..BenchConfig::default()
        }
    }

    #[test]
    fn rows_and_csv() {
        let img = synthetic_image(24, 24, 1).unwrap();
        let rows = run_bench(&img, &small()).unwrap();
        assert_eq!(rows.len(), 2 * 4);
        let brute = rows.iter().find(|r| r.method == Method::Brute).unwrap();
        assert_eq!(brute.psnr_vs_oracle, 120.0);
        assert!((brute.sigma_s * (-2.0 * 0.01f64.ln()).sqrt() - 2.0).abs() < 1e-12);
        let csv = rows_to_csv(&rows);
        assert!(csv.starts_with(CSV_HEADER));
        assert_eq!(csv.lines().count(), 9);
        assert!(csv.lines().nth(1).unwrap().starts_with("brute,2,"));
    }

    #[test]
    fn empty_sweep_rejected() {
        let img = synthetic_image(24, 24, 1).unwrap();
        let cfg = BenchConfig {
            radii: vec![],
            ..small()
        };
        assert!(run_bench(&img, &cfg).is_err());
    }

    #[test]
    fn median_of_odd_and_even() {
        let mut n = 0;
        let (v, _) = time_median(1, 5, || {
            n += 1;
            Ok(n)
        })
        .unwrap();
        assert_eq!(v, 6);
        assert!(time_median(0, 0, || Ok(())).is_err());
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert!("slow".parse::<Method>().is_err());
    }
}
