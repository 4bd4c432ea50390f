//! Grayscale image container, intensity quantization and PGM (P2/P5) I/O.
//!
//! Samples are kept as `f64` even when they come from an 8-bit file, because
//! filter outputs are fractional. Rounding to integer levels only happens when
//! an image is written out and when an intensity is placed on the discrete
//! range axis of the promoted volume.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of discrete intensity levels on the range axis.
pub const LEVELS: usize = 256;

/// Largest representable 8-bit intensity.
pub const MAX_LEVEL: u8 = 255;

/// A row-major grayscale image with real-valued samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Image {
    width: usize,
    height: usize,
    samples: Vec<f64>,
}

/// Column/row index of a pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PixelCoord {
    pub x: usize,
    pub y: usize,
}

impl Image {
    pub fn new(width: usize, height: usize, samples: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "dimensions must be positive, got {width}x{height}"
            )));
        }
        if samples.len() != width * height {
            return Err(Error::InvalidImage(format!(
                "expected {} samples for {width}x{height}, got {}",
                width * height,
                samples.len()
            )));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidImage(format!("sample {i} is not finite")));
        }
        Ok(Self { width, height, samples })
    }

    /// Builds an image by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut samples = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                samples.push(f(x, y));
            }
        }
        Self::new(width, height, samples)
    }

    pub fn constant(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    #[inline]
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.samples[y * self.width + x]
    }

    #[inline]
    pub fn at(&self, p: PixelCoord) -> f64 {
        self.get(p.x, p.y)
    }

    pub fn same_dimensions(&self, other: &Image) -> bool {
        self.width == other.width && self.height == other.height
    }

    /// Minimum and maximum sample.
    pub fn range(&self) -> (f64, f64) {
        self.samples
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    /// Copy with every sample clamped to [0, 255] and rounded half-up.
    pub fn quantized(&self) -> Image {
        Image {
            width: self.width,
            height: self.height,
            samples: self.samples.iter().map(|&v| f64::from(quantize_intensity(v))).collect(),
        }
    }
}

/// Rounds half-up and clamps into `[0, 255]`.
#[inline]
pub fn quantize_intensity(v: f64) -> u8 {
    let r = (v + 0.5).floor();
    if r <= 0.0 {
        0
    } else if r >= f64::from(MAX_LEVEL) {
        MAX_LEVEL
    } else {
        r as u8
    }
}

/// Encodes an image as binary P5 with maxval 255.
pub fn save_pgm(image: &Image) -> Vec<u8> {
    let header = format!("P5\n{} {}\n255\n", image.width, image.height);
    let mut out = Vec::with_capacity(header.len() + image.len());
    out.extend_from_slice(header.as_bytes());
    out.extend(image.samples.iter().map(|&v| quantize_intensity(v)));
    out
}

/// Decodes a P2 (ASCII) or P5 (binary) graymap with maxval at most 255.
pub fn load_pgm(bytes: &[u8]) -> Result<Image> {
    let mut cur = Cursor { bytes, pos: 0 };
    cur.skip_space_and_comments();
    let magic_at = cur.pos;
    let magic = cur.token()?;
    let binary = match magic {
        b"P5" => true,
        b"P2" => false,
        _ => return Err(pgm_err(magic_at, "expected magic P2 or P5")),
    };
    let width = cur.header_number("width")?;
    let height = cur.header_number("height")?;
    cur.skip_space_and_comments();
    let maxval_at = cur.pos;
    let maxval = cur.header_number("maxval")?;
    if width == 0 || height == 0 {
        return Err(pgm_err(maxval_at, "image dimensions must be positive"));
    }
    if maxval == 0 {
        return Err(pgm_err(maxval_at, "maxval must be positive"));
    }
    if maxval > 255 {
        return Err(pgm_err(maxval_at, format!("unsupported maxval {maxval}")));
    }
    let count = width
        .checked_mul(height)
        .ok_or_else(|| pgm_err(maxval_at, "image dimensions overflow"))?;

    let mut samples = Vec::with_capacity(count);
    if binary {
        // exactly one whitespace byte separates the header from the raster
        match cur.bytes.get(cur.pos) {
            Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
            _ => return Err(pgm_err(cur.pos, "expected whitespace after maxval")),
        }
        let payload = &cur.bytes[cur.pos..];
        if payload.len() < count {
            return Err(pgm_err(
                cur.bytes.len(),
                format!("truncated payload: expected {count} bytes, found {}", payload.len()),
            ));
        }
        for (i, &b) in payload[..count].iter().enumerate() {
            if usize::from(b) > maxval {
                return Err(pgm_err(cur.pos + i, format!("sample {b} exceeds maxval {maxval}")));
            }
            samples.push(f64::from(b));
        }
    } else {
        for _ in 0..count {
            cur.skip_space_and_comments();
            let at = cur.pos;
            let v = cur.number().map_err(|e| match e {
                Error::Pgm { offset, .. } if offset >= cur.bytes.len() => {
                    pgm_err(offset, format!("truncated payload: expected {count} samples"))
                }
                other => other,
            })?;
            if v > maxval {
                return Err(pgm_err(at, format!("sample {v} exceeds maxval {maxval}")));
            }
            samples.push(v as f64);
        }
    }
    Image::new(width, height, samples)
}

fn pgm_err(offset: usize, message: impl Into<String>) -> Error {
    Error::Pgm {
        offset,
        message: message.into(),
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Result<&'a [u8]> {
        self.skip_space_and_comments();
        let start = self.pos;
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() || b == b'#' {
                break;
            }
            self.pos += 1;
        }
        if start == self.pos {
            return Err(pgm_err(start, "unexpected end of input"));
        }
        Ok(&self.bytes[start..self.pos])
    }

    fn number(&mut self) -> Result<usize> {
        let tok = self.token()?;
        let start = self.pos - tok.len();
        if !tok.iter().all(u8::is_ascii_digit) {
            return Err(pgm_err(
                start,
                format!("expected a decimal integer, found {:?}", String::from_utf8_lossy(tok)),
            ));
        }
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| pgm_err(start, "integer out of range"))
    }

    fn header_number(&mut self, what: &str) -> Result<usize> {
        self.number().map_err(|e| match e {
            Error::Pgm { offset, message } => pgm_err(offset, format!("{what}: {message}")),
            other => other,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p5_direct_byte_mapping() {
        let mut bytes = b"P5 2 2 255 ".to_vec();
        bytes.extend_from_slice(&[0, 128, 255, 64]);
        let img = load_pgm(&bytes).unwrap();
        assert_eq!((img.width(), img.height()), (2, 2));
        assert_eq!(img.samples(), &[0.0, 128.0, 255.0, 64.0]);
        assert_eq!(img.get(0, 1), 255.0);
    }

    #[test]
    fn p2_single_pixel() {
        let img = load_pgm(b"P2 1 1 255 7").unwrap();
        assert_eq!(img.samples(), &[7.0]);
    }

    #[test]
    fn p2_with_comments() {
        let img = load_pgm(b"P2\n# made by hand\n2 1\n# max\n10\n3 # trailing\n9\n").unwrap();
        assert_eq!(img.samples(), &[3.0, 9.0]);
    }

    #[test]
    fn wide_maxval_rejected() {
        let mut bytes = b"P5 1 1 65535\n".to_vec();
        bytes.extend_from_slice(&[0, 0]);
        let err = load_pgm(&bytes).unwrap_err();
        match err {
            Error::Pgm { offset, message } => {
                assert!(message.contains("unsupported maxval"), "{message}");
                assert_eq!(offset, 7);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn truncated_payload_names_offset() {
        let bytes = b"P5 2 2 255\n\x01\x02";
        let err = load_pgm(bytes).unwrap_err();
        assert!(matches!(err, Error::Pgm { offset: 13, .. }), "{err:?}");
        let err = load_pgm(b"P2 2 1 255 4").unwrap_err();
        assert!(err.to_string().contains("truncated"), "{err}");
    }

    #[test]
    fn malformed_headers() {
        assert!(load_pgm(b"P6 1 1 255\n\0\0\0").is_err());
        assert!(load_pgm(b"P5 x 1 255\n\0").is_err());
        assert!(load_pgm(b"P5 0 1 255\n").is_err());
        assert!(load_pgm(b"").is_err());
        assert!(load_pgm(b"P2 1 1 9 10").is_err());
    }

    #[test]
    fn save_rounds_and_clamps() {
        let img = Image::new(1, 1, vec![7.4]).unwrap();
        assert_eq!(save_pgm(&img).last(), Some(&7));
        let img = Image::new(1, 1, vec![-3.0]).unwrap();
        assert_eq!(save_pgm(&img).last(), Some(&0));
        let img = Image::new(2, 1, vec![300.0, 254.5]).unwrap();
        let bytes = save_pgm(&img);
        assert_eq!(&bytes[bytes.len() - 2..], &[255, 255]);
        assert!(bytes.starts_with(b"P5\n2 1\n255\n"));
    }

    #[test]
    fn quantize_examples() {
        assert_eq!(quantize_intensity(127.5), 128);
        assert_eq!(quantize_intensity(255.0), 255);
        assert_eq!(quantize_intensity(-0.2), 0);
        assert_eq!(quantize_intensity(0.49), 0);
        assert_eq!(quantize_intensity(1e9), 255);
    }

    #[test]
    fn image_invariants_enforced() {
        assert!(Image::new(0, 3, vec![]).is_err());
        assert!(Image::new(2, 2, vec![0.0; 3]).is_err());
        assert!(Image::new(1, 1, vec![f64::NAN]).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn quantize_is_monotone(a in -1e3f64..1e3, b in -1e3f64..1e3) {
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                prop_assert!(quantize_intensity(lo) <= quantize_intensity(hi));
            }

            #[test]
            fn save_load_is_stable(w in 1usize..9, h in 1usize..9, seed in any::<u64>()) {
                let mut s = seed;
                let img = Image::from_fn(w, h, |_, _| {
                    s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    ((s >> 33) % 4000) as f64 / 10.0 - 50.0
                }).unwrap();
                let once = load_pgm(&save_pgm(&img)).unwrap();
                prop_assert_eq!(&once, &img.quantized());
                let twice = load_pgm(&save_pgm(&once)).unwrap();
                prop_assert_eq!(twice, once);
            }
        }
    }
}
