//! Linear-time bilateral filtering with truncated kernels expanded on Haar
//! (spatial) and cosine (range) bases, evaluated as weighted 3-D box sums.
//!
//! The crate is organised bottom-up:
//!
//! * [`image`] holds the grayscale container and PGM I/O.
//! * [`sat`] provides summed-area tables and the 3-D box-sum primitive.
//! * [`approx`] truncates kernels, computes expansion coefficients, selects
//!   the best N terms and lowers Haar terms to boxes.
//! * [`filter`] contains the brute-force oracle and the accelerated pipeline.
//! * [`quality`] implements PSNR and SSIM.
//! * [`bench`] times the filters and emits CSV rows.

pub mod api;
pub mod approx;
pub mod bench;
pub mod error;
pub mod filter;
pub mod image;
pub mod quality;
pub mod sat;
pub mod synth;

pub use error::{Error, Result};
pub use image::{load_pgm, quantize_intensity, save_pgm, Image, PixelCoord};
