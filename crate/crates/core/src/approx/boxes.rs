//! Lowering Haar terms to weighted, center-relative boxes.
//!
//! A scaling·scaling term is one box over `[-T, T]²`. A mixed term is two
//! boxes, `+c` on the wavelet's left half and `-c` on its right half. A
//! wavelet·wavelet term is four quadrant boxes with signs `+, -, +, -` for
//! `A1×A1, A1×A2, A2×A2, A2×A1`.

use serde::{Deserialize, Serialize};

use crate::approx::haar::{haar_coefficients, Haar1, HaarBasis, HaarTerm};
use crate::approx::kernel::TruncatedKernel;
use crate::approx::select::best_n_terms;
use crate::error::{Error, Result};

/// Continuous rectangle `[lx, hx] × [ly, hy]` in pixel units, relative to the
/// output pixel. Membership is half-open on the high side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContRect {
    pub lx: f64,
    pub hx: f64,
    pub ly: f64,
    pub hy: f64,
}

impl ContRect {
    #[inline]
    pub fn contains(&self, dx: f64, dy: f64) -> bool {
        self.lx <= dx && dx < self.hx && self.ly <= dy && dy < self.hy
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxTerm {
    pub weight: f64,
    pub rect: ContRect,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialPlan {
    pub t_s: f64,
    pub terms: Vec<HaarTerm>,
    pub boxes: Vec<BoxTerm>,
}

impl SpatialPlan {
    /// Number of boxes after lowering.
    pub fn box_count(&self) -> usize {
        self.boxes.len()
    }
}

/// Lowers `terms` into boxes on `[-t_s, t_s]²`.
pub fn haar_to_boxes(terms: &[HaarTerm], t_s: f64) -> Result<SpatialPlan> {
    if terms.is_empty() {
        return Err(Error::InvalidParameter(
            "spatial plan needs at least one Haar term".into(),
        ));
    }
    if !(t_s.is_finite() && t_s > 0.0) {
        return Err(Error::InvalidParameter(format!("T_s must be positive, got {t_s}")));
    }
    let mut boxes = Vec::new();
    for term in terms {
        let xs = term.basis.x.pieces(t_s);
        let ys = term.basis.y.pieces(t_s);
        let mut push = |(sx, lx, hx): (f64, f64, f64), (sy, ly, hy): (f64, f64, f64)| {
            boxes.push(BoxTerm {
                weight: sx * sy * term.coefficient,
                rect: ContRect { lx, hx, ly, hy },
            })
        };
        match (xs.len(), ys.len()) {
            (2, 2) => {
                push(xs[0], ys[0]);
                push(xs[0], ys[1]);
                push(xs[1], ys[1]);
                push(xs[1], ys[0]);
            }
            _ => {
                for &x in &xs {
                    for &y in &ys {
                        push(x, y);
                    }
                }
            }
        }
    }
    Ok(SpatialPlan {
        t_s,
        terms: terms.to_vec(),
        boxes,
    })
}

/// Reconstruction `Σ weight · [offset ∈ rect]`.
pub fn eval_spatial_plan(plan: &SpatialPlan, dx: f64, dy: f64) -> f64 {
    plan.boxes
        .iter()
        .filter(|b| b.rect.contains(dx, dy))
        .map(|b| b.weight)
        .sum()
}

/// Cumulative low-order plans: level 1 is the DC term, level 2 adds the two
/// half-width wavelets along y, level 3 the two along x, level 4 the four
/// level-1 wavelet products. Level `n` costs as much as `n` single boxes.
pub const MAX_FUSED_LEVEL: usize = 4;

/// Builds the fused plan of the given level from the kernel's coefficients.
pub fn fused_plan(kernel: &TruncatedKernel, level: usize) -> Result<SpatialPlan> {
    if !(1..=MAX_FUSED_LEVEL).contains(&level) {
        return Err(Error::InvalidParameter(format!(
            "fused spatial plan level must be 1..={MAX_FUSED_LEVEL}, got {level}"
        )));
    }
    let all = haar_coefficients(kernel, 1);
    let w1 = |k| Haar1::Wavelet { j: 1, k };
    let mut wanted = vec![HaarBasis {
        x: Haar1::Scaling,
        y: Haar1::Scaling,
    }];
    if level >= 2 {
        wanted.extend([-1, 1].map(|k| HaarBasis {
            x: Haar1::Scaling,
            y: w1(k),
        }));
    }
    if level >= 3 {
        wanted.extend([-1, 1].map(|k| HaarBasis {
            x: w1(k),
            y: Haar1::Scaling,
        }));
    }
    if level >= 4 {
        for k1 in [-1, 1] {
            wanted.extend([-1, 1].map(|k2| HaarBasis { x: w1(k1), y: w1(k2) }));
        }
    }
    let terms: Vec<HaarTerm> = wanted
        .into_iter()
        .map(|b| *all.iter().find(|t| t.basis == b).expect("level-1 basis present"))
        .collect();
    haar_to_boxes(&terms, kernel.t)
}

/// Plan made of the best `n` Haar terms among the first `m` in canonical
/// order, up to level `j_max`.
pub fn best_n_plan(kernel: &TruncatedKernel, n: usize, m: usize, j_max: u32) -> Result<SpatialPlan> {
    let all = haar_coefficients(kernel, j_max);
    let values: Vec<f64> = all.iter().map(|t| t.coefficient).collect();
    let picked = best_n_terms(&values, n, m)?;
    let terms: Vec<HaarTerm> = picked.into_iter().map(|i| all[i]).collect();
    haar_to_boxes(&terms, kernel.t)
}
