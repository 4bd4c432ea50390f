//! Seeded synthetic test images: a horizontal ramp, a step edge, a darker
//! rectangle and uniform noise, rounded to integer levels.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::image::Image;

/// Peak amplitude of the additive uniform noise.
pub const NOISE_AMPLITUDE: f64 = 20.0;

pub fn synthetic_image(width: usize, height: usize, seed: u64) -> Result<Image> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let wx = (width.max(2) - 1) as f64;
    Image::from_fn(width, height, |x, y| {
        let mut v = 40.0 + 150.0 * x as f64 / wx;
        if 2 * x > width {
            v += 50.0;
        }
        if 4 * y > height && 4 * y < 3 * height && 5 * x > width && 2 * x < width {
            v -= 45.0;
        }
        v += rng.random_range(-NOISE_AMPLITUDE..=NOISE_AMPLITUDE);
        v.clamp(0.0, 255.0).round()
    })
}
