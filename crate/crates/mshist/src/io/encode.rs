//! Display-image encoding: binary PPM (P6) and 8-bit truecolor PNG.

use crate::error::{Error, Result};
use crate::image::DisplayImage;

/// Output encodings for tone-mapped images.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Png,
    Ppm,
}

impl OutputFormat {
    /// Picks a format from a file extension; anything unknown gets PNG.
    pub fn from_extension(ext: Option<&str>) -> Self {
        match ext.map(str::to_ascii_lowercase).as_deref() {
            Some("ppm") => OutputFormat::Ppm,
            _ => OutputFormat::Png,
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Png => "png",
            OutputFormat::Ppm => "ppm",
        }
    }
}

/// Encodes a display image, quantizing each sample to a byte by
/// round-half-away-from-zero (so 127.5 becomes 128 on every platform).
pub fn write_display(img: &DisplayImage, format: OutputFormat) -> Result<Vec<u8>> {
    let interleaved = quantize(img)?;
    match format {
        OutputFormat::Ppm => {
            let mut out = format!("P6\n{} {}\n255\n", img.width(), img.height()).into_bytes();
            out.extend_from_slice(&interleaved);
            Ok(out)
        }
        OutputFormat::Png => {
            let mut out = Vec::new();
            let mut encoder = png::Encoder::new(&mut out, img.width() as u32, img.height() as u32);
            encoder.set_color(png::ColorType::Rgb);
            encoder.set_depth(png::BitDepth::Eight);
            let mut writer = encoder
                .write_header()
                .map_err(|e| Error::PngEncode(e.to_string()))?;
            writer
                .write_image_data(&interleaved)
                .map_err(|e| Error::PngEncode(e.to_string()))?;
            writer
                .finish()
                .map_err(|e| Error::PngEncode(e.to_string()))?;
            Ok(out)
        }
    }
}

fn quantize(img: &DisplayImage) -> Result<Vec<u8>> {
    let [r, g, b] = img.planes();
    let mut bytes = Vec::with_capacity(r.len() * 3);
    for i in 0..r.len() {
        for plane in [r, g, b] {
            let v = plane[i];
            // DisplayImage already guarantees [0, 255]; re-check here since
            // an out-of-range byte is unrecoverable once written.
            if !(0.0..=255.0).contains(&v) {
                return Err(Error::SampleOutOfRange {
                    value: v,
                    x: i % img.width(),
                    y: i / img.width(),
                });
            }
            bytes.push(v.round() as u8);
        }
    }
    Ok(bytes)
}
