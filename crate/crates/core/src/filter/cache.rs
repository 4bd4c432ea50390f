//! Precomputation for an image whose filter parameters are not yet known.
//!
//! For each candidate truncation radius `T_i` the cache keeps the per-pixel
//! `cos(πk I/T_i)` and `sin(πk I/T_i)` up to a maximum frequency, plus the
//! quantized levels. Those are everything the stacks need except the
//! cosine coefficients, which depend on `σ_r`. A later request with radius
//! `T_r` is served by the smallest cached `T_i ≥ T_r`, recomputing the
//! coefficients on `[-T_i, T_i]`.

use std::borrow::Cow;
use std::sync::Arc;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::filter::fast::{intensity_offset, run_pipeline, FilterOutput};
use crate::filter::stacks::{assemble, phase, quantize_levels, TermTrig};
use crate::filter::FilterParams;
use crate::image::Image;

/// Highest cosine frequency cached per radius unless configured otherwise.
pub const DEFAULT_MAX_FREQUENCY: usize = 16;

/// Per-pixel `(cos, sin)` tables for one frequency.
type TrigPair = (Arc<[f64]>, Arc<[f64]>);

#[derive(Debug, Clone, PartialEq)]
struct RadiusEntry {
    t_r: f64,
    /// `trig[k - 1]` holds `(cos, sin)` per pixel for frequency `k ≥ 1`.
    trig: Vec<TrigPair>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrecomputeCache {
    image: Image,
    levels: Vec<u8>,
    offset: f64,
    max_frequency: usize,
    entries: Vec<RadiusEntry>,
    /// Wall time spent building the cache, in milliseconds.
    pub build_ms: f64,
}

impl PrecomputeCache {
    pub fn radii(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.t_r).collect()
    }

    pub fn max_frequency(&self) -> usize {
        self.max_frequency
    }

    pub fn image(&self) -> &Image {
        &self.image
    }

    /// The smallest cached radius that is at least `t_r`.
    pub fn select_radius(&self, t_r: f64) -> Result<f64> {
        self.entries
            .iter()
            .map(|e| e.t_r)
            .find(|&t| t >= t_r)
            .ok_or(Error::NoCachedRadius(t_r))
    }
}

/// Precomputes with [`DEFAULT_MAX_FREQUENCY`].
pub fn precompute_stacks(image: &Image, radii: &[f64]) -> Result<PrecomputeCache> {
    precompute_stacks_with(image, radii, DEFAULT_MAX_FREQUENCY)
}

pub fn precompute_stacks_with(image: &Image, radii: &[f64], max_frequency: usize) -> Result<PrecomputeCache> {
    if radii.is_empty() {
        return Err(Error::InvalidParameter("precompute needs at least one radius".into()));
    }
    if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::InvalidParameter("radii must be positive".into()));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("radii must be strictly ascending".into()));
    }
    let started = Instant::now();
    let entries = radii
        .iter()
        .map(|&t_r| RadiusEntry {
            t_r,
            trig: (1..=max_frequency)
                .map(|k| {
                    let (cos, sin): (Vec<f64>, Vec<f64>) = image
                        .samples()
                        .iter()
                        .map(|&v| {
                            let p = phase(k, v, t_r);
                            (p.cos(), p.sin())
                        })
                        .unzip();
                    (cos.into(), sin.into())
                })
                .collect(),
        })
        .collect();
    Ok(PrecomputeCache {
        image: image.clone(),
        levels: quantize_levels(image),
        offset: intensity_offset(image),
        max_frequency,
        entries,
        build_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

/// Filters using the cache. The result equals [`crate::filter::fast_bf`] run
/// with `params.with_range_radius(T_i)` where `T_i` is the selected radius.
pub fn filter_with_cache(image: &Image, cache: &PrecomputeCache, params: &FilterParams) -> Result<FilterOutput> {
    if !image.same_dimensions(&cache.image) {
        return Err(Error::DimensionMismatch(
            image.width(),
            image.height(),
            cache.image.width(),
            cache.image.height(),
        ));
    }
    if image != &cache.image {
        return Err(Error::InvalidParameter("image differs from the cached image".into()));
    }
    let t_i = cache.select_radius(params.range_kernel.t)?;
    // re-deriving the cosine plan dominates small images, so skip it when the
    // cached radius is already the requested one
    let params = if t_i == params.range_kernel.t {
        Cow::Borrowed(params)
    } else {
        Cow::Owned(params.with_range_radius(t_i)?)
    };
    params.validate()?;
    let entry = cache
        .entries
        .iter()
        .find(|e| e.t_r == t_i)
        .expect("selected radius is cached");

    let n = image.len();
    let terms = params
        .range_plan
        .terms
        .iter()
        .map(|&(k, a)| {
            if k == 0 {
                return Ok(TermTrig {
                    k,
                    a,
                    cos: vec![1.0; n].into(),
                    sin: vec![0.0; n].into(),
                });
            }
            let (cos, sin) = entry.trig.get(k - 1).ok_or(Error::FrequencyNotCached {
                frequency: k,
                max: cache.max_frequency,
            })?;
            Ok(TermTrig {
                k,
                a,
                cos: cos.clone(),
                sin: sin.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let stack = assemble(image, cache.levels.clone(), terms, cache.offset);
    Ok(run_pipeline(image, &params, &stack))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::kernel::gaussian_radius;
    use crate::filter::fast_bf;
    use crate::synth::synthetic_image;

    #[test]
    fn selects_smallest_covering_radius() {
        let img = synthetic_image(8, 8, 0).unwrap();
        let cache = precompute_stacks(&img, &[60.0, 90.0, 120.0]).unwrap();
        let t = gaussian_radius(25.0, 0.01);
        assert!((t - 75.87).abs() < 0.01);
        assert_eq!(cache.select_radius(t).unwrap(), 90.0);
        assert!(matches!(cache.select_radius(130.0), Err(Error::NoCachedRadius(_))));
    }

    #[test]
    fn equals_cold_path_bit_for_bit() {
        let img = synthetic_image(40, 30, 5).unwrap();
        let cache = precompute_stacks(&img, &[60.0, 90.0, 120.0]).unwrap();
        let params = FilterParams::gaussian_defaults(3.0, 25.0).unwrap();
        let cached = filter_with_cache(&img, &cache, &params).unwrap();
        let cold = fast_bf(&img, &params.with_range_radius(90.0).unwrap()).unwrap();
        assert_eq!(cached, cold);
    }

    #[test]
    fn exact_radius_reuses_the_plan() {
        let img = synthetic_image(20, 20, 2).unwrap();
        let params = FilterParams::gaussian_defaults(2.0, 30.0).unwrap();
        let cache = precompute_stacks(&img, &[params.range_kernel.t]).unwrap();
        assert_eq!(
            filter_with_cache(&img, &cache, &params).unwrap(),
            fast_bf(&img, &params).unwrap()
        );
    }

    #[test]
    fn uncovered_request_fails() {
        let img = synthetic_image(8, 8, 0).unwrap();
        let cache = precompute_stacks(&img, &[30.0]).unwrap();
        let params = FilterParams::gaussian_defaults(2.0, 40.0).unwrap();
        assert!(matches!(
            filter_with_cache(&img, &cache, &params),
            Err(Error::NoCachedRadius(_))
        ));
    }

    #[test]
    fn empty_or_unsorted_radii_rejected() {
        let img = synthetic_image(8, 8, 0).unwrap();
        assert!(precompute_stacks(&img, &[]).is_err());
        assert!(precompute_stacks(&img, &[90.0, 60.0]).is_err());
    }

    #[test]
    fn frequency_limit_enforced() {
        let img = synthetic_image(8, 8, 0).unwrap();
        let cache = precompute_stacks_with(&img, &[200.0], 2).unwrap();
        let params = FilterParams::gaussian_defaults(2.0, 40.0).unwrap();
        assert!(matches!(
            filter_with_cache(&img, &cache, &params),
            Err(Error::FrequencyNotCached { frequency: 3, max: 2 })
        ));
    }

    #[test]
    fn other_image_rejected() {
        let img = synthetic_image(8, 8, 0).unwrap();
        let cache = precompute_stacks(&img, &[200.0]).unwrap();
        let params = FilterParams::gaussian_defaults(2.0, 40.0).unwrap();
        let other = synthetic_image(8, 8, 1).unwrap();
        assert!(filter_with_cache(&other, &cache, &params).is_err());
    }
}
