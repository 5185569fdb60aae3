//! File formats: Radiance RGBE and PFM decoding, PNG and PPM encoding.

mod encode;
mod hdr;
mod pfm;

pub use encode::{write_display, OutputFormat};
pub use hdr::read_radiance_hdr;
pub use pfm::{read_pfm, PfmImage};

use thiserror::Error;

use crate::error::Result;
use crate::image::WdrImage;

/// What the magic bytes at the front of a file say it is. Extensions are
/// never consulted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFileKind {
    RadianceHdr,
    Pfm,
    Png,
    Ppm,
}

/// Identifies a file from its leading bytes.
pub fn detect_kind(bytes: &[u8]) -> Option<ImageFileKind> {
    const PNG_SIGNATURE: [u8; 8] = [0x89, b'P', b'N', b'G', 0x0D, 0x0A, 0x1A, 0x0A];
    if bytes.starts_with(b"#?RADIANCE") || bytes.starts_with(b"#?RGBE") {
        Some(ImageFileKind::RadianceHdr)
    } else if bytes.starts_with(&PNG_SIGNATURE) {
        Some(ImageFileKind::Png)
    } else if bytes.len() >= 3
        && (bytes.starts_with(b"PF") || bytes.starts_with(b"Pf"))
        && bytes[2].is_ascii_whitespace()
    {
        Some(ImageFileKind::Pfm)
    } else if bytes.len() >= 3 && bytes.starts_with(b"P6") && bytes[2].is_ascii_whitespace() {
        Some(ImageFileKind::Ppm)
    } else {
        None
    }
}

/// Decodes any supported WDR input, reporting how many negative PFM samples
/// were clamped to zero (always 0 for RGBE, which cannot encode negatives).
pub fn read_wdr(bytes: &[u8]) -> Result<(WdrImage, u64)> {
    match detect_kind(bytes) {
        Some(ImageFileKind::RadianceHdr) => Ok((read_radiance_hdr(bytes)?, 0)),
        Some(ImageFileKind::Pfm) => {
            let decoded = read_pfm(bytes)?;
            Ok((decoded.image, decoded.clamped_negatives))
        }
        Some(ImageFileKind::Png) => Err(DecodeError::NotWdrInput("png").into()),
        Some(ImageFileKind::Ppm) => Err(DecodeError::NotWdrInput("ppm").into()),
        None => Err(DecodeError::UnknownMagic.into()),
    }
}

/// Why a file could not be decoded. Offsets are byte positions into the
/// input.
#[derive(Debug, Error)]
pub enum DecodeError {
    #[error("unrecognized image format (no known magic bytes)")]
    UnknownMagic,

    #[error("{0} is a display format, not a WDR input")]
    NotWdrInput(&'static str),

    #[error("bad {format} magic at byte {offset}")]
    BadMagic {
        format: &'static str,
        offset: usize,
    },

    #[error("malformed header at byte {offset}: {reason}")]
    Header { offset: usize, reason: String },

    #[error("unsupported FORMAT '{found}' at byte {offset}; only 32-bit_rle_rgbe")]
    UnsupportedFormat { offset: usize, found: String },

    #[error("truncated file at byte {offset} while reading {expected}")]
    Truncated {
        offset: usize,
        expected: &'static str,
    },

    #[error("corrupt RLE data at byte {offset}: {reason}")]
    CorruptRle {
        offset: usize,
        reason: &'static str,
    },

    #[error("image dimensions {width}x{height} overflow addressable memory")]
    DimensionOverflow { width: u64, height: u64 },

    #[error("non-finite sample at byte {offset}")]
    NonFiniteSample { offset: usize },
}
