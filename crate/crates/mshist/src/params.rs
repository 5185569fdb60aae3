//! User-tunable parameters and their validation.

use crate::error::{Error, Result};
use crate::tonemap::scale_windows;

/// Number of pyramid scales: an explicit count, or `Auto` to halve the
/// full-image window until both sides are at most 64 pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScaleCount {
    Auto,
    Fixed(usize),
}

/// Every knob of the tone-mapping operator.
///
/// `bins`, `epsilon` and `sat` default to 5, 0.1 and 0.6; those values
/// give good brightness while preserving local contrast on most images.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToneParams {
    /// Histogram bin count n.
    pub bins: usize,
    /// Textural-score regularizer, applied to variances of the log
    /// luminance rescaled to [0, 1].
    pub epsilon: f64,
    /// Pyramid depth.
    pub scales: ScaleCount,
    /// Color-saturation exponent in (0, 1].
    pub sat: f64,
    /// Zero-luminance floor, relative to the image's maximum linear
    /// luminance. Keeps the log transform finite.
    pub log_floor: f64,
    /// Fusion weights summing below this threshold fall back to the
    /// largest-scale tone value.
    pub fallback_tolerance: f64,
}

impl Default for ToneParams {
    fn default() -> Self {
        Self {
            bins: 5,
            epsilon: 0.1,
            scales: ScaleCount::Auto,
            sat: 0.6,
            log_floor: 1e-6,
            fallback_tolerance: 1e-8,
        }
    }
}

impl ToneParams {
    /// Checks every invariant and resolves `Auto` scales against the given
    /// image dimensions. The result always carries `ScaleCount::Fixed`;
    /// validating an already-resolved value is a no-op.
    pub fn validate(&self, width: usize, height: usize) -> Result<ToneParams> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParams(format!(
                "image dimensions {width}x{height} must be at least 1x1"
            )));
        }
        if self.bins < 1 {
            return Err(Error::InvalidParams("bin count must be at least 1".into()));
        }
        if self.epsilon <= 0.0 || !self.epsilon.is_finite() {
            return Err(Error::InvalidParams(format!(
                "epsilon must be a positive finite number, got {}",
                self.epsilon
            )));
        }
        if !(self.sat > 0.0 && self.sat <= 1.0) {
            return Err(Error::InvalidParams(format!(
                "sat must lie in (0, 1], got {}",
                self.sat
            )));
        }
        if self.log_floor <= 0.0 || !self.log_floor.is_finite() {
            return Err(Error::InvalidParams(format!(
                "log floor must be a positive finite number, got {}",
                self.log_floor
            )));
        }
        if self.fallback_tolerance <= 0.0 || !self.fallback_tolerance.is_finite() {
            return Err(Error::InvalidParams(format!(
                "fallback tolerance must be a positive finite number, got {}",
                self.fallback_tolerance
            )));
        }
        // Resolves Auto and rejects explicit depths the pyramid cannot reach.
        let plan = scale_windows(width, height, self.scales)?;
        Ok(ToneParams {
            scales: ScaleCount::Fixed(plan.len()),
            ..*self
        })
    }
}
