//! The accelerated filter.
//!
//! For each cosine term `k` the numerator is
//! `a_k [cos_k(x)·B(F_c^k)(x) + sin_k(x)·B(F_s^k)(x)]`, and the denominator
//! is the same with the `W` stacks. `B` is the spatial plan's weighted sum of
//! 3-D box sums over `N^j_x × [q(x) − h, q(x) + h]`.
//!
//! Each channel is processed by sweeping the level axis. At level `c` a
//! single slice holds the z-window sum `Σ_{|z−c|≤h} F(·, z)`; because every
//! pixel lives on exactly one level, entering and leaving the window is an
//! assignment rather than an add/subtract, so the slice never drifts. The
//! slice's 2-D table is rebuilt only when the window contents changed and
//! some pixel sits at level `c`, then those pixels query their boxes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::approx::boxes::SpatialPlan;
use crate::error::{Error, Result};
use crate::filter::stacks::{build_aux_stacks_with, AuxStack, ChannelKind, TrigSource};
use crate::filter::{FilterParams, DEGENERATE_DENOMINATOR};
use crate::image::{Image, LEVELS};
use crate::sat::{region_sum_2d, Rect, Sat2D};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterDiagnostics {
    /// Pixels whose denominator was `≤ 1e-12` and were passed through.
    pub degenerate_pixels: u64,
    /// 2-D tables built across all channels.
    pub slices_built: u64,
    /// Rectangle sums evaluated across all channels.
    pub boxes_evaluated: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterOutput {
    pub image: Image,
    pub diagnostics: FilterDiagnostics,
}

/// A plan box discretised to integer offsets `d = x − y` with
/// `lx ≤ dx < hx` and `ly ≤ dy < hy`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelBox {
    pub weight: f64,
    pub lx: i64,
    pub hx: i64,
    pub ly: i64,
    pub hy: i64,
}

#[inline]
fn round_half_up(v: f64) -> i64 {
    (v + 0.5).floor() as i64
}

/// Rounds plan boxes to pixel offsets and clips them to the window.
///
/// Rounding both edges half-up keeps boxes that share an edge disjoint and
/// their union gap-free.
pub fn discretize_plan(plan: &SpatialPlan, rho: usize) -> Vec<PixelBox> {
    let r = rho as i64;
    plan.boxes
        .iter()
        .filter_map(|b| {
            let pb = PixelBox {
                weight: b.weight,
                lx: round_half_up(b.rect.lx).max(-r),
                hx: round_half_up(b.rect.hx).min(r + 1),
                ly: round_half_up(b.rect.ly).max(-r),
                hy: round_half_up(b.rect.hy).min(r + 1),
            };
            (pb.lx < pb.hx && pb.ly < pb.hy).then_some(pb)
        })
        .collect()
}

/// Pixel indices grouped by level.
pub(crate) struct LevelBuckets {
    start: Vec<usize>,
    order: Vec<u32>,
}

impl LevelBuckets {
    pub(crate) fn new(levels: &[u8]) -> Self {
        let mut start = vec![0usize; LEVELS + 1];
        for &z in levels {
            start[usize::from(z) + 1] += 1;
        }
        for z in 0..LEVELS {
            start[z + 1] += start[z];
        }
        let mut fill = start.clone();
        let mut order = vec![0u32; levels.len()];
        for (i, &z) in levels.iter().enumerate() {
            order[fill[usize::from(z)]] = i as u32;
            fill[usize::from(z)] += 1;
        }
        Self { start, order }
    }

    #[inline]
    fn bucket(&self, z: usize) -> &[u32] {
        &self.order[self.start[z]..self.start[z + 1]]
    }
}

struct ChannelResult {
    values: Vec<f64>,
    slices: u64,
    boxes: u64,
}

fn sweep_channel(
    values: &[f64],
    buckets: &LevelBuckets,
    width: usize,
    height: usize,
    boxes: &[PixelBox],
    halfwidth: usize,
) -> ChannelResult {
    let n = width * height;
    let mut slice = vec![0.0; n];
    let mut sat = Sat2D::zeros(width, height);
    let mut out = vec![0.0; n];
    let (mut slices, mut evaluated) = (0u64, 0u64);
    let mut dirty = true;

    let set_level = |slice: &mut [f64], z: usize, on: bool| -> bool {
        let b = buckets.bucket(z);
        for &p in b {
            slice[p as usize] = if on { values[p as usize] } else { 0.0 };
        }
        !b.is_empty()
    };
    for z in 0..halfwidth.min(LEVELS) {
        set_level(&mut slice, z, true);
    }
    for c in 0..LEVELS {
        if c + halfwidth < LEVELS {
            dirty |= set_level(&mut slice, c + halfwidth, true);
        }
        if c > halfwidth {
            dirty |= set_level(&mut slice, c - halfwidth - 1, false);
        }
        let here = buckets.bucket(c);
        if here.is_empty() {
            continue;
        }
        if dirty {
            sat.rebuild(&slice);
            slices += 1;
            dirty = false;
        }
        for &p in here {
            let (x, y) = ((p as usize % width) as i64, (p as usize / width) as i64);
            let mut acc = 0.0;
            for b in boxes {
                let r = Rect {
                    x0: x - b.hx,
                    x1: x - b.lx,
                    y0: y - b.hy,
                    y1: y - b.ly,
                };
                acc += b.weight * region_sum_2d(&sat, &r);
            }
            out[p as usize] = acc;
        }
        evaluated += (here.len() * boxes.len()) as u64;
    }
    ChannelResult {
        values: out,
        slices,
        boxes: evaluated,
    }
}

/// Runs the box-filter pipeline on prepared stacks.
pub(crate) fn run_pipeline(image: &Image, params: &FilterParams, stack: &AuxStack) -> FilterOutput {
    let (w, h) = (image.width(), image.height());
    let buckets = LevelBuckets::new(&stack.levels);
    let boxes = discretize_plan(&params.spatial_plan, params.rho);
    let halfwidth = params.range_plan.level_halfwidth();
    let channels = stack.channels();

    let results: Vec<ChannelResult> = channels
        .par_iter()
        .map(|&id| sweep_channel(&stack.channel_values(id), &buckets, w, h, &boxes, halfwidth))
        .collect();

    let mut diagnostics = FilterDiagnostics::default();
    for r in &results {
        diagnostics.slices_built += r.slices;
        diagnostics.boxes_evaluated += r.boxes;
    }

    // channel results in the order produced by `AuxStack::channels`
    let mut per_term: Vec<[Option<&[f64]>; 4]> = vec![[None; 4]; stack.terms.len()];
    for (id, r) in channels.iter().zip(&results) {
        let slot = match id.kind {
            ChannelKind::NumCos => 0,
            ChannelKind::NumSin => 1,
            ChannelKind::DenCos => 2,
            ChannelKind::DenSin => 3,
        };
        per_term[id.term][slot] = Some(&r.values);
    }

    let src = image.samples();
    let mut out = vec![0.0; w * h];
    for (p, o) in out.iter_mut().enumerate() {
        let (mut num, mut den) = (0.0, 0.0);
        for (t, slots) in stack.terms.iter().zip(&per_term) {
            let nc = slots[0].expect("numerator channel")[p];
            let dc = slots[2].expect("denominator channel")[p];
            if t.k == 0 {
                num += t.a * nc;
                den += t.a * dc;
            } else {
                let ns = slots[1].expect("numerator sine channel")[p];
                let ds = slots[3].expect("denominator sine channel")[p];
                num += t.a * (t.cos[p] * nc + t.sin[p] * ns);
                den += t.a * (t.cos[p] * dc + t.sin[p] * ds);
            }
        }
        *o = if den <= DEGENERATE_DENOMINATOR {
            diagnostics.degenerate_pixels += 1;
            src[p]
        } else {
            stack.offset + num / den
        };
    }
    FilterOutput {
        image: Image::new(w, h, out).expect("output has the input's shape"),
        diagnostics,
    }
}

/// The intensity subtracted before promotion. Using the image minimum keeps
/// numerator magnitudes small and makes flat images come back bit-exact.
pub(crate) fn intensity_offset(image: &Image) -> f64 {
    image.range().0
}

pub fn fast_bf(image: &Image, params: &FilterParams) -> Result<FilterOutput> {
    fast_bf_with(image, params, TrigSource::Direct)
}

pub fn fast_bf_with(image: &Image, params: &FilterParams, trig: TrigSource) -> Result<FilterOutput> {
    params.validate()?;
    if params.range_plan.t_r <= 0.0 {
        return Err(Error::InvalidParameter("T_r must be positive".into()));
    }
    let stack = build_aux_stacks_with(image, &params.range_plan, trig, intensity_offset(image));
    Ok(run_pipeline(image, params, &stack))
}
