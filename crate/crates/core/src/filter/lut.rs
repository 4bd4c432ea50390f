//! Per-level trigonometric tables.

use crate::approx::trig::RangePlan;
use crate::filter::stacks::phase;
use crate::image::LEVELS;

/// `(cos, sin)` of `πk v / T_r` for every plan term and level `v = 0..=255`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityLut {
    pub t_r: f64,
    pub frequencies: Vec<usize>,
    table: Vec<[(f64, f64); LEVELS]>,
}

impl IntensityLut {
    pub fn build(plan: &RangePlan) -> Self {
        let table = plan
            .terms
            .iter()
            .map(|&(k, _)| {
                let mut row = [(0.0, 0.0); LEVELS];
                for (v, e) in row.iter_mut().enumerate() {
                    let p = phase(k, v as f64, plan.t_r);
                    *e = (p.cos(), p.sin());
                }
                row
            })
            .collect();
        Self {
            t_r: plan.t_r,
            frequencies: plan.terms.iter().map(|&(k, _)| k).collect(),
            table,
        }
    }

    /// Entry for the plan's `term`-th frequency at `level`.
    #[inline]
    pub fn get(&self, term: usize, level: u8) -> (f64, f64) {
        self.table[term][usize::from(level)]
    }
}

pub fn build_intensity_lut(plan: &RangePlan) -> IntensityLut {
    IntensityLut::build(plan)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dc_row_and_zero_level() {
        let plan = RangePlan {
            terms: vec![(0, 1.0), (2, 0.1), (5, 0.01)],
            t_r: 50.0,
        };
        let lut = build_intensity_lut(&plan);
        for v in 0..=255u8 {
            assert_eq!(lut.get(0, v), (1.0, 0.0));
        }
        for t in 0..3 {
            assert_eq!(lut.get(t, 0), (1.0, 0.0));
        }
        let (c, s) = lut.get(1, 25);
        assert!((c + 1.0).abs() < 1e-15 && s.abs() < 1e-12);
    }
}
