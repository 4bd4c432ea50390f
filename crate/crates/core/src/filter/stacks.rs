//! Auxiliary stacks for dimension promotion.
//!
//! Every stack is an impulse along the level axis: pixel `y` contributes only
//! at `z = quantize(I(y))`. Storing the volumes densely would need 256 slices
//! per channel, so an [`AuxStack`] keeps each pixel's level once and one value
//! per pixel and channel. [`AuxStack::to_dense`] expands a channel for
//! inspection and tests.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::approx::trig::RangePlan;
use crate::filter::lut::IntensityLut;
use crate::image::{quantize_intensity, Image, LEVELS};
use crate::sat::SliceStack;

/// Which trigonometric factor a channel carries and whether it is weighted by
/// intensity (numerator) or not (denominator).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelKind {
    /// `g_k^c(y)·I(y)`
    NumCos,
    /// `g_k^s(y)·I(y)`
    NumSin,
    /// `g_k^c(y)`
    DenCos,
    /// `g_k^s(y)`
    DenSin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ChannelId {
    /// Position of the term in the range plan.
    pub term: usize,
    pub kind: ChannelKind,
}

/// Per-pixel `cos(πk I/T_r)` and `sin(πk I/T_r)` for one cosine term.
///
/// Shared so a precompute cache can lend its tables without copying them.
#[derive(Debug, Clone, PartialEq)]
pub struct TermTrig {
    pub k: usize,
    pub a: f64,
    pub cos: Arc<[f64]>,
    pub sin: Arc<[f64]>,
}

/// How trigonometric factors are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TrigSource {
    /// Evaluate `cos`/`sin` for every pixel.
    #[default]
    Direct,
    /// Read a 256-entry table indexed by the quantized level.
    Lut,
}

#[inline]
pub(crate) fn phase(k: usize, value: f64, t_r: f64) -> f64 {
    PI * k as f64 * value / t_r
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuxStack {
    pub width: usize,
    pub height: usize,
    /// Level axis position of each pixel.
    pub levels: Vec<u8>,
    /// Intensities entering the numerator channels, `I(y) − offset`.
    pub values: Vec<f64>,
    /// Constant subtracted from intensities before they enter the numerator.
    pub offset: f64,
    pub terms: Vec<TermTrig>,
}

impl AuxStack {
    /// Channels in evaluation order: `NumCos, DenCos` for `k = 0`, and
    /// `NumCos, NumSin, DenCos, DenSin` otherwise.
    pub fn channels(&self) -> Vec<ChannelId> {
        let mut out = Vec::new();
        for (term, t) in self.terms.iter().enumerate() {
            let kinds: &[ChannelKind] = if t.k == 0 {
                &[ChannelKind::NumCos, ChannelKind::DenCos]
            } else {
                &[
                    ChannelKind::NumCos,
                    ChannelKind::NumSin,
                    ChannelKind::DenCos,
                    ChannelKind::DenSin,
                ]
            };
            out.extend(kinds.iter().map(|&kind| ChannelId { term, kind }));
        }
        out
    }

    /// Per-pixel value of a channel (its only non-zero entry along z).
    pub fn channel_values(&self, id: ChannelId) -> Vec<f64> {
        let t = &self.terms[id.term];
        match id.kind {
            ChannelKind::NumCos => t.cos.iter().zip(&self.values).map(|(g, v)| g * v).collect(),
            ChannelKind::NumSin => t.sin.iter().zip(&self.values).map(|(g, v)| g * v).collect(),
            ChannelKind::DenCos => t.cos.to_vec(),
            ChannelKind::DenSin => t.sin.to_vec(),
        }
    }

    /// Expands a channel into a full `(x, y, z)` volume with 256 levels.
    pub fn to_dense(&self, id: ChannelId) -> SliceStack {
        let vals = self.channel_values(id);
        let mut st = SliceStack::zeros(self.width, self.height, LEVELS);
        for (i, (&v, &z)) in vals.iter().zip(&self.levels).enumerate() {
            st.set(i % self.width, i / self.width, usize::from(z), v);
        }
        st
    }
}

/// Trigonometric factors for every plan term, from a per-pixel evaluation or
/// from a level table.
pub(crate) fn term_trig(image: &Image, levels: &[u8], plan: &RangePlan, source: TrigSource) -> Vec<TermTrig> {
    let lut = match source {
        TrigSource::Lut => Some(IntensityLut::build(plan)),
        TrigSource::Direct => None,
    };
    plan.terms
        .iter()
        .enumerate()
        .map(|(i, &(k, a))| {
            let (cos, sin): (Vec<f64>, Vec<f64>) = match &lut {
                Some(l) => levels.iter().map(|&z| l.get(i, z)).unzip(),
                None => image
                    .samples()
                    .iter()
                    .map(|&v| {
                        let p = phase(k, v, plan.t_r);
                        (p.cos(), p.sin())
                    })
                    .unzip(),
            };
            TermTrig {
                k,
                a,
                cos: cos.into(),
                sin: sin.into(),
            }
        })
        .collect()
}

pub fn quantize_levels(image: &Image) -> Vec<u8> {
    image.samples().iter().map(|&v| quantize_intensity(v)).collect()
}

/// Builds the stacks with intensities entering the numerator unshifted.
pub fn build_aux_stacks(image: &Image, plan: &RangePlan) -> AuxStack {
    build_aux_stacks_with(image, plan, TrigSource::Direct, 0.0)
}

/// Builds the stacks with `I(y) − offset` in the numerator channels.
pub fn build_aux_stacks_with(image: &Image, plan: &RangePlan, source: TrigSource, offset: f64) -> AuxStack {
    let levels = quantize_levels(image);
    let terms = term_trig(image, &levels, plan, source);
    assemble(image, levels, terms, offset)
}

pub(crate) fn assemble(image: &Image, levels: Vec<u8>, terms: Vec<TermTrig>, offset: f64) -> AuxStack {
    AuxStack {
        width: image.width(),
        height: image.height(),
        levels,
        values: image.samples().iter().map(|v| v - offset).collect(),
        offset,
        terms,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::synthetic_image;

    fn plan() -> RangePlan {
        RangePlan {
            terms: vec![(0, 0.4), (1, 0.5), (3, 0.01)],
            t_r: 121.0,
        }
    }

    #[test]
    fn channel_layout() {
        let img = synthetic_image(4, 3, 0).unwrap();
        let st = build_aux_stacks(&img, &plan());
        assert_eq!(st.channels().len(), 2 + 4 + 4);
    }

    #[test]
    fn dc_term_stacks() {
        let img = synthetic_image(6, 5, 1).unwrap();
        let st = build_aux_stacks(&img, &plan());
        let f = st.to_dense(ChannelId {
            term: 0,
            kind: ChannelKind::NumCos,
        });
        let w = st.to_dense(ChannelId {
            term: 0,
            kind: ChannelKind::DenCos,
        });
        for y in 0..5 {
            for x in 0..6 {
                let q = usize::from(quantize_intensity(img.get(x, y)));
                for z in 0..LEVELS {
                    let on = z == q;
                    assert_eq!(f.get(x, y, z), if on { img.get(x, y) } else { 0.0 });
                    assert_eq!(w.get(x, y, z), if on { 1.0 } else { 0.0 });
                }
            }
        }
    }

    #[test]
    fn constant_image_occupies_one_level() {
        let img = Image::constant(3, 3, 77.0).unwrap();
        let st = build_aux_stacks(&img, &plan());
        for id in st.channels() {
            let d = st.to_dense(id);
            for z in (0..LEVELS).filter(|&z| z != 77) {
                assert!(d.slice(z).iter().all(|&v| v == 0.0));
            }
        }
    }

    #[test]
    fn column_sums_recover_channel_values() {
        let img = synthetic_image(5, 4, 9).unwrap();
        let st = build_aux_stacks(&img, &plan());
        let id = ChannelId {
            term: 1,
            kind: ChannelKind::NumCos,
        };
        let d = st.to_dense(id);
        for y in 0..4 {
            for x in 0..5 {
                let col: f64 = (0..LEVELS).map(|z| d.get(x, y, z)).sum();
                let v = img.get(x, y);
                assert_eq!(col, phase(1, v, 121.0).cos() * v);
            }
        }
    }

    #[test]
    fn occupancy_sums_to_one() {
        let img = synthetic_image(7, 7, 2).unwrap();
        let st = build_aux_stacks(&img, &plan());
        let w = st.to_dense(ChannelId {
            term: 0,
            kind: ChannelKind::DenCos,
        });
        for y in 0..7 {
            for x in 0..7 {
                assert_eq!((0..LEVELS).map(|z| w.get(x, y, z)).sum::<f64>(), 1.0);
            }
        }
    }
}
