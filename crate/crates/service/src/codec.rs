//! Base64 PGM transport encoding.

use base64::engine::general_purpose::STANDARD;
use base64::Engine as _;
use boxbf_core::{load_pgm, save_pgm, Image};

use crate::error::{ApiError, ApiResult};

pub fn decode_image(b64: &str) -> ApiResult<Image> {
    let bytes = STANDARD
        .decode(b64.trim())
        .map_err(|e| ApiError::bad_request(format!("image is not valid base64: {e}")))?;
    Ok(load_pgm(&bytes)?)
}

/// Quantizes to 8 bits and encodes as a base64 P5 file.
pub fn encode_image(image: &Image) -> String {
    STANDARD.encode(save_pgm(image))
}
