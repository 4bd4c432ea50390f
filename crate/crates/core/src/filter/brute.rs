//! Direct evaluation of the bilateral filter over a clipped square window.

use rayon::prelude::*;

use crate::image::Image;

/// Weighted mean over the `(2ρ+1)²` window clipped to the image, with
/// weights `K_s(‖x−y‖)·K_r(I(x)−I(y))`.
///
/// The result is accumulated as `I(x) + Σ w·(I(y)−I(x)) / Σ w`, which is the
/// same quantity as `Σ w·I(y) / Σ w` but returns flat regions unchanged to
/// the last bit.
pub fn brute_force_bf<S, R>(image: &Image, spatial: S, range: R, rho: usize) -> Image
where
    S: Fn(f64) -> f64 + Sync,
    R: Fn(f64) -> f64 + Sync,
{
    let (w, h) = (image.width(), image.height());
    let side = 2 * rho + 1;
    // spatial weights depend only on the offset
    let ks: Vec<f64> = (0..side * side)
        .map(|i| {
            let dx = (i % side) as f64 - rho as f64;
            let dy = (i / side) as f64 - rho as f64;
            spatial(dx.hypot(dy))
        })
        .collect();
    let src = image.samples();
    let mut out = vec![0.0; w * h];
    out.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        let y0 = y.saturating_sub(rho);
        let y1 = (y + rho).min(h - 1);
        for (x, o) in row.iter_mut().enumerate() {
            let x0 = x.saturating_sub(rho);
            let x1 = (x + rho).min(w - 1);
            let center = src[y * w + x];
            let (mut num, mut den) = (0.0, 0.0);
            for yy in y0..=y1 {
                let krow = &ks[(yy + rho - y) * side..];
                for xx in x0..=x1 {
                    let diff = src[yy * w + xx] - center;
                    let wgt = krow[xx + rho - x] * range(diff);
                    num += wgt * diff;
                    den += wgt;
                }
            }
            *o = center + num / den;
        }
    });
    Image::new(w, h, out).expect("output has the input's shape")
}
