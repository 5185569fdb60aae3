//! Core image containers shared by every stage of the pipeline.
//!
//! All types here are immutable after construction and safe to share
//! read-only across worker threads.

use crate::error::{Error, Result};

/// A wide-dynamic-range radiance map: three planes of non-negative,
/// finite, linear-light samples. Unbounded above.
#[derive(Debug, Clone, PartialEq)]
pub struct WdrImage {
    width: usize,
    height: usize,
    red: Vec<f64>,
    green: Vec<f64>,
    blue: Vec<f64>,
}

impl WdrImage {
    pub fn new(
        width: usize,
        height: usize,
        red: Vec<f64>,
        green: Vec<f64>,
        blue: Vec<f64>,
    ) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "dimensions must be at least 1x1, got {width}x{height}"
            )));
        }
        let n = width
            .checked_mul(height)
            .ok_or_else(|| Error::InvalidImage("dimension overflow".into()))?;
        for (name, plane) in [("red", &red), ("green", &green), ("blue", &blue)] {
            if plane.len() != n {
                return Err(Error::InvalidImage(format!(
                    "{name} plane has {} samples, expected {n}",
                    plane.len()
                )));
            }
            if let Some(i) = plane.iter().position(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::InvalidImage(format!(
                    "{name} plane sample {i} is {}; radiance must be finite and >= 0",
                    plane[i]
                )));
            }
        }
        Ok(Self {
            width,
            height,
            red,
            green,
            blue,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    pub fn red(&self) -> &[f64] {
        &self.red
    }

    pub fn green(&self) -> &[f64] {
        &self.green
    }

    pub fn blue(&self) -> &[f64] {
        &self.blue
    }

    pub fn planes(&self) -> [&[f64]; 3] {
        [&self.red, &self.green, &self.blue]
    }
}

/// Which value space a [`LuminanceField`] lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// Linear-light luminance, >= 0, unbounded above.
    Linear,
    /// Natural-log luminance.
    Log,
    /// Display levels in [0, 255].
    Display,
}

/// A single-channel image tagged with the domain its samples live in.
#[derive(Debug, Clone, PartialEq)]
pub struct LuminanceField {
    width: usize,
    height: usize,
    samples: Vec<f64>,
    domain: Domain,
}

impl LuminanceField {
    pub fn new(width: usize, height: usize, samples: Vec<f64>, domain: Domain) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "dimensions must be at least 1x1, got {width}x{height}"
            )));
        }
        let n = width
            .checked_mul(height)
            .ok_or_else(|| Error::InvalidImage("dimension overflow".into()))?;
        if samples.len() != n {
            return Err(Error::InvalidImage(format!(
                "{} samples for a {width}x{height} field, expected {n}",
                samples.len()
            )));
        }
        let bad = match domain {
            Domain::Linear => samples.iter().position(|v| !v.is_finite() || *v < 0.0),
            Domain::Log => samples.iter().position(|v| !v.is_finite()),
            Domain::Display => samples
                .iter()
                .position(|v| !v.is_finite() || *v < 0.0 || *v > 255.0),
        };
        if let Some(i) = bad {
            return Err(Error::InvalidImage(format!(
                "sample {i} = {} violates the {domain:?} domain",
                samples[i]
            )));
        }
        Ok(Self {
            width,
            height,
            samples,
            domain,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.samples[y * self.width + x]
    }

    pub fn min_max(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in &self.samples {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    }
}

/// A tone-mapped color image: three planes of display levels in [0, 255].
///
/// Values stay floating point until an encoder quantizes them.
#[derive(Debug, Clone, PartialEq)]
pub struct DisplayImage {
    width: usize,
    height: usize,
    red: Vec<f64>,
    green: Vec<f64>,
    blue: Vec<f64>,
}

impl DisplayImage {
    pub fn new(
        width: usize,
        height: usize,
        red: Vec<f64>,
        green: Vec<f64>,
        blue: Vec<f64>,
    ) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "dimensions must be at least 1x1, got {width}x{height}"
            )));
        }
        let n = width * height;
        for (name, plane) in [("red", &red), ("green", &green), ("blue", &blue)] {
            if plane.len() != n {
                return Err(Error::InvalidImage(format!(
                    "{name} plane has {} samples, expected {n}",
                    plane.len()
                )));
            }
            if let Some(i) = plane
                .iter()
                .position(|v| !v.is_finite() || *v < 0.0 || *v > 255.0)
            {
                return Err(Error::InvalidImage(format!(
                    "{name} plane sample {i} = {} outside display range [0,255]",
                    plane[i]
                )));
            }
        }
        Ok(Self {
            width,
            height,
            red,
            green,
            blue,
        })
    }

    /// Replicates one display-domain field into a gray color image.
    pub fn from_luminance(field: &LuminanceField) -> Result<Self> {
        if field.domain() != Domain::Display {
            return Err(Error::InvalidImage(
                "gray display image needs a display-domain field".into(),
            ));
        }
        Self::new(
            field.width(),
            field.height(),
            field.samples().to_vec(),
            field.samples().to_vec(),
            field.samples().to_vec(),
        )
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn planes(&self) -> [&[f64]; 3] {
        [&self.red, &self.green, &self.blue]
    }
}

/// An inclusive pixel rectangle: `x0..=x1` by `y0..=y1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowRect {
    pub x0: usize,
    pub y0: usize,
    pub x1: usize,
    pub y1: usize,
}

impl WindowRect {
    pub fn new(x0: usize, y0: usize, x1: usize, y1: usize) -> Result<Self> {
        if x0 > x1 || y0 > y1 {
            return Err(Error::InvalidImage(format!(
                "degenerate rectangle [{x0},{y0}]..[{x1},{y1}]"
            )));
        }
        Ok(Self { x0, y0, x1, y1 })
    }

    /// The window of size `win_w` x `win_h` centered on `(cx, cy)`, slid as
    /// far as needed to stay inside a `width` x `height` image. The window
    /// keeps its full area; near a border the center pixel sits off-center.
    /// A window as large as the image covers it entirely for every pixel,
    /// which is what makes the largest pyramid scale a global operator.
    pub fn centered(
        cx: usize,
        cy: usize,
        win_w: usize,
        win_h: usize,
        width: usize,
        height: usize,
    ) -> Self {
        debug_assert!(cx < width && cy < height);
        debug_assert!(win_w >= 1 && win_h >= 1);
        let (x0, x1) = Self::axis_span(cx, win_w, width);
        let (y0, y1) = Self::axis_span(cy, win_h, height);
        Self { x0, y0, x1, y1 }
    }

    fn axis_span(center: usize, win: usize, len: usize) -> (usize, usize) {
        let win = win.min(len);
        let lo = center.saturating_sub((win - 1) / 2).min(len - win);
        (lo, lo + win - 1)
    }

    pub fn width(&self) -> usize {
        self.x1 - self.x0 + 1
    }

    pub fn height(&self) -> usize {
        self.y1 - self.y0 + 1
    }

    pub fn area(&self) -> usize {
        self.width() * self.height()
    }

    /// True when the rectangle lies inside a `width` x `height` image.
    pub fn fits(&self, width: usize, height: usize) -> bool {
        self.x1 < width && self.y1 < height
    }
}
