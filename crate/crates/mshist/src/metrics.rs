//! Image quality measures for tone-mapped results: brightness, sharpness
//! and contrast.
//!
//! All reductions use a fixed pairwise summation order, so repeated runs
//! (and runs under different thread counts) report identical numbers.

use std::fmt;

use crate::error::{Error, Result};
use crate::image::{Domain, LuminanceField};

/// The three §-style quality measures of one display-domain image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityReport {
    /// Mean display level, in [0, 255].
    pub brightness: f64,
    /// Mean gradient magnitude, display levels per pixel.
    pub sharpness: f64,
    /// Population standard deviation of display levels, in [0, 127.5].
    pub contrast: f64,
}

impl QualityReport {
    /// Measures all three values of a display-domain field.
    pub fn measure(field: &LuminanceField) -> Result<Self> {
        Ok(Self {
            brightness: brightness(field)?,
            sharpness: sharpness(field)?,
            contrast: contrast(field)?,
        })
    }

    pub const CSV_HEADER: &'static str = "brightness,sharpness,contrast";

    /// The measurements as one CSV row matching [`Self::CSV_HEADER`].
    pub fn to_csv_row(&self) -> String {
        format!(
            "{:.6},{:.6},{:.6}",
            self.brightness, self.sharpness, self.contrast
        )
    }
}

impl fmt::Display for QualityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "brightness: {:>10.4}", self.brightness)?;
        writeln!(f, "sharpness:  {:>10.4}", self.sharpness)?;
        write!(f, "contrast:   {:>10.4}", self.contrast)
    }
}

fn require_display(field: &LuminanceField) -> Result<()> {
    if field.domain() != Domain::Display {
        return Err(Error::InvalidImage(
            "metrics are defined on display-domain fields".into(),
        ));
    }
    Ok(())
}

/// Mean display level.
pub fn brightness(field: &LuminanceField) -> Result<f64> {
    require_display(field)?;
    Ok(pairwise_sum(field.samples()) / field.samples().len() as f64)
}

/// Population standard deviation of the display levels.
pub fn contrast(field: &LuminanceField) -> Result<f64> {
    require_display(field)?;
    let n = field.samples().len() as f64;
    let mean = pairwise_sum(field.samples()) / n;
    let sq: Vec<f64> = field
        .samples()
        .iter()
        .map(|&v| (v - mean) * (v - mean))
        .collect();
    Ok((pairwise_sum(&sq) / n).sqrt())
}

/// Mean gradient magnitude, using forward differences (backward at the
/// trailing border so every pixel has both components).
pub fn sharpness(field: &LuminanceField) -> Result<f64> {
    Ok(sharpness_total(field)? / field.samples().len() as f64)
}

/// The raw gradient-magnitude sum behind [`sharpness`], for comparisons
/// that want the unnormalized quantity.
pub fn sharpness_total(field: &LuminanceField) -> Result<f64> {
    require_display(field)?;
    let (w, h) = (field.width(), field.height());
    if w < 2 || h < 2 {
        return Err(Error::ImageTooSmall {
            width: w,
            height: h,
            reason: "gradients need at least 2x2 pixels",
        });
    }
    let magnitudes: Vec<f64> = (0..w * h)
        .map(|i| {
            let (x, y) = (i % w, i / w);
            let gx = if x + 1 < w {
                field.get(x + 1, y) - field.get(x, y)
            } else {
                field.get(x, y) - field.get(x - 1, y)
            };
            let gy = if y + 1 < h {
                field.get(x, y + 1) - field.get(x, y)
            } else {
                field.get(x, y) - field.get(x, y - 1)
            };
            (gx * gx + gy * gy).sqrt()
        })
        .collect();
    Ok(pairwise_sum(&magnitudes))
}

/// Summation with a fixed, input-length-determined association order.
fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 32 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}
