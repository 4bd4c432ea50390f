//! PSNR and SSIM.
//!
//! SSIM uses the customary parameters: an 11×11 Gaussian window with
//! σ = 1.5, `K1 = 0.01`, `K2 = 0.03` and dynamic range 255. Local statistics
//! are taken only where the window fits inside the image and then averaged.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::Image;

/// PSNR reported for (near-)identical images.
pub const PSNR_CAP_DB: f64 = 120.0;
pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
const PEAK: f64 = 255.0;
const K1: f64 = 0.01;
const K2: f64 = 0.03;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub psnr: f64,
    /// `None` when either side is smaller than the SSIM window.
    pub ssim: Option<f64>,
}

impl MetricReport {
    pub fn compare(a: &Image, b: &Image) -> Result<Self> {
        let psnr = psnr(a, b)?;
        let ssim = match ssim(a, b) {
            Ok(v) => Some(v),
            Err(Error::ImageTooSmall { .. }) => None,
            Err(e) => return Err(e),
        };
        Ok(Self { psnr, ssim })
    }
}

fn check_dims(a: &Image, b: &Image) -> Result<()> {
    if a.same_dimensions(b) {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(a.width(), a.height(), b.width(), b.height()))
    }
}

pub fn mse(a: &Image, b: &Image) -> Result<f64> {
    check_dims(a, b)?;
    let sum: f64 = a
        .samples()
        .iter()
        .zip(b.samples())
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    Ok(sum / a.len() as f64)
}

pub fn psnr(a: &Image, b: &Image) -> Result<f64> {
    let m = mse(a, b)?;
    if m < 1e-12 {
        return Ok(PSNR_CAP_DB);
    }
    Ok((10.0 * (PEAK * PEAK / m).log10()).min(PSNR_CAP_DB))
}

fn gaussian_window() -> [f64; SSIM_WINDOW] {
    let r = (SSIM_WINDOW / 2) as f64;
    let mut w = [0.0; SSIM_WINDOW];
    for (i, v) in w.iter_mut().enumerate() {
        let x = i as f64 - r;
        *v = (-x * x / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
    }
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= s);
    w
}

/// Separable weighted sums over every position where the window fits.
fn filter_valid(src: &[f64], width: usize, height: usize, w: &[f64; SSIM_WINDOW]) -> Vec<f64> {
    let ow = width + 1 - SSIM_WINDOW;
    let oh = height + 1 - SSIM_WINDOW;
    let mut horiz = vec![0.0; ow * height];
    for y in 0..height {
        let row = &src[y * width..(y + 1) * width];
        for x in 0..ow {
            horiz[y * ow + x] = w.iter().zip(&row[x..x + SSIM_WINDOW]).map(|(a, b)| a * b).sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for y in 0..oh {
        for x in 0..ow {
            out[y * ow + x] = w.iter().enumerate().map(|(i, a)| a * horiz[(y + i) * ow + x]).sum();
        }
    }
    out
}

pub fn ssim(a: &Image, b: &Image) -> Result<f64> {
    check_dims(a, b)?;
    let (w, h) = (a.width(), a.height());
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Err(Error::ImageTooSmall {
            width: w,
            height: h,
            min: SSIM_WINDOW,
        });
    }
    let win = gaussian_window();
    let (x, y) = (a.samples(), b.samples());
    let prod = |f: fn(f64, f64) -> f64| -> Vec<f64> { x.iter().zip(y).map(|(&p, &q)| f(p, q)).collect() };
    let mx = filter_valid(x, w, h, &win);
    let my = filter_valid(y, w, h, &win);
    let mxx = filter_valid(&prod(|p, _| p * p), w, h, &win);
    let myy = filter_valid(&prod(|_, q| q * q), w, h, &win);
    let mxy = filter_valid(&prod(|p, q| p * q), w, h, &win);

    let c1 = (K1 * PEAK).powi(2);
    let c2 = (K2 * PEAK).powi(2);
    let mut total = 0.0;
    for i in 0..mx.len() {
        let (ux, uy) = (mx[i], my[i]);
        let vx = mxx[i] - ux * ux;
        let vy = myy[i] - uy * uy;
        let vxy = mxy[i] - ux * uy;
        total += ((2.0 * ux * uy + c1) * (2.0 * vxy + c2)) / ((ux * ux + uy * uy + c1) * (vx + vy + c2));
    }
    Ok(total / mx.len() as f64)
}
