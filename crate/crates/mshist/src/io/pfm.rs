//! PFM (portable float map) decoding.
//!
//! Header: `PF` (color) or `Pf` (grayscale), whitespace-separated width and
//! height, then a scale whose sign selects the payload endianness (negative
//! is little-endian). Exactly one whitespace byte separates the scale from
//! the raw 32-bit floats, and rows are stored bottom to top. The scale's
//! magnitude is ignored, as is conventional among readers.

use crate::image::WdrImage;
use crate::io::DecodeError;

/// A decoded PFM file. The format allows negative samples but radiance
/// maps do not, so negatives clamp to zero and are counted here instead
/// of being lost silently.
#[derive(Debug)]
pub struct PfmImage {
    pub image: WdrImage,
    pub clamped_negatives: u64,
}

pub fn read_pfm(bytes: &[u8]) -> Result<PfmImage, DecodeError> {
    let color = match bytes.get(..2) {
        Some(b"PF") => true,
        Some(b"Pf") => false,
        _ => {
            return Err(DecodeError::BadMagic {
                format: "pfm",
                offset: 0,
            })
        }
    };
    let mut pos = 2;

    let width = parse_dim(token(bytes, &mut pos, "the width")?)?;
    let height = parse_dim(token(bytes, &mut pos, "the height")?)?;
    let (scale_offset, scale_token) = token(bytes, &mut pos, "the scale")?;
    let scale: f64 = std::str::from_utf8(scale_token)
        .ok()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| DecodeError::Header {
            offset: scale_offset,
            reason: format!("bad scale '{}'", String::from_utf8_lossy(scale_token)),
        })?;
    if scale == 0.0 || !scale.is_finite() {
        return Err(DecodeError::Header {
            offset: scale_offset,
            reason: format!("scale must be finite and nonzero, got {scale}"),
        });
    }
    let little_endian = scale < 0.0;

    // Exactly one whitespace byte between the scale and the payload.
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => {
            return Err(DecodeError::Header {
                offset: pos,
                reason: "expected a single whitespace byte before the payload".into(),
            })
        }
    }

    let channels: u64 = if color { 3 } else { 1 };
    let payload_len = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(channels))
        .and_then(|n| n.checked_mul(4))
        .filter(|&n| n <= (usize::MAX as u64).saturating_sub(pos as u64))
        .ok_or(DecodeError::DimensionOverflow { width, height })?
        as usize;
    if bytes.len() - pos < payload_len {
        return Err(DecodeError::Truncated {
            offset: bytes.len(),
            expected: "the float payload",
        });
    }
    let (width, height) = (width as usize, height as usize);
    let payload = &bytes[pos..pos + payload_len];

    let mut red = vec![0.0f64; width * height];
    let mut green = vec![0.0f64; width * height];
    let mut blue = vec![0.0f64; width * height];
    let mut clamped = 0u64;

    let channels = channels as usize;
    for (i, float_bytes) in payload.chunks_exact(4).enumerate() {
        let raw: [u8; 4] = float_bytes.try_into().unwrap();
        let v = if little_endian {
            f32::from_le_bytes(raw)
        } else {
            f32::from_be_bytes(raw)
        } as f64;
        if !v.is_finite() {
            return Err(DecodeError::NonFiniteSample {
                offset: pos + i * 4,
            });
        }
        let v = if v < 0.0 {
            clamped += 1;
            0.0
        } else {
            v
        };

        let pixel = i / channels;
        // Rows are stored bottom to top.
        let (x, file_row) = (pixel % width, pixel / width);
        let idx = (height - 1 - file_row) * width + x;
        match i % channels {
            0 => red[idx] = v,
            1 => green[idx] = v,
            _ => blue[idx] = v,
        }
    }
    if !color {
        green.copy_from_slice(&red);
        blue.copy_from_slice(&red);
    }

    let image = WdrImage::new(width, height, red, green, blue).map_err(|_| DecodeError::Header {
        offset: 0,
        reason: "decoded image failed radiance-map validation".into(),
    })?;
    Ok(PfmImage {
        image,
        clamped_negatives: clamped,
    })
}

// Skips leading ASCII whitespace, then reads the run of non-whitespace
// bytes starting at `*pos`. Returns the token and its offset.
fn token<'a>(
    bytes: &'a [u8],
    pos: &mut usize,
    expected: &'static str,
) -> Result<(usize, &'a [u8]), DecodeError> {
    while bytes.get(*pos).is_some_and(|b| b.is_ascii_whitespace()) {
        *pos += 1;
    }
    let start = *pos;
    while bytes.get(*pos).is_some_and(|b| !b.is_ascii_whitespace()) {
        *pos += 1;
    }
    if start == *pos {
        return Err(DecodeError::Truncated {
            offset: *pos,
            expected,
        });
    }
    Ok((start, &bytes[start..*pos]))
}

fn parse_dim((offset, token): (usize, &[u8])) -> Result<u64, DecodeError> {
    std::str::from_utf8(token)
        .ok()
        .and_then(|t| t.parse::<u64>().ok())
        .filter(|&d| d >= 1)
        .ok_or_else(|| DecodeError::Header {
            offset,
            reason: format!("bad dimension '{}'", String::from_utf8_lossy(token)),
        })
}
