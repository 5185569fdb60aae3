//! Integral images (summed-area tables) and integral histograms.
//!
//! These turn every windowed sum, variance and histogram the tone mapper
//! needs into a handful of table lookups, independent of window area. A
//! table is built once per image and then queried for every pixel at
//! every pyramid scale.
//!
//! Tables carry a zero guard row and column at index 0, so the four-corner
//! rectangle query needs no edge special-casing. Prefix sums accumulate in
//! `f64` regardless of the source precision, which keeps cancellation error
//! bounded on megapixel images and makes integer-valued inputs (such as the
//! histogram indicator planes) exact.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::{LuminanceField, WindowRect};

/// A 2-D prefix-sum table over a `width` x `height` field.
///
/// `table[(y+1) * (width+1) + (x+1)]` holds the sum of all samples at
/// coordinates `(x', y')` with `x' <= x` and `y' <= y`.
#[derive(Debug, Clone)]
pub struct IntegralImage {
    width: usize,
    height: usize,
    table: Vec<f64>,
}

impl IntegralImage {
    /// Builds the prefix-sum table of a field.
    pub fn build(field: &LuminanceField) -> Self {
        Self::build_mapped(field.width(), field.height(), field.samples(), |v| v)
    }

    /// Builds the prefix-sum table of the squared field, for variance queries.
    pub fn build_squared(field: &LuminanceField) -> Self {
        Self::build_mapped(field.width(), field.height(), field.samples(), |v| v * v)
    }

    fn build_mapped(width: usize, height: usize, samples: &[f64], map: impl Fn(f64) -> f64) -> Self {
        debug_assert_eq!(samples.len(), width * height);
        let stride = width + 1;
        let mut table = vec![0.0; stride * (height + 1)];
        for y in 0..height {
            let row = &samples[y * width..(y + 1) * width];
            let mut running = 0.0;
            for x in 0..width {
                running += map(row[x]);
                table[(y + 1) * stride + (x + 1)] = table[y * stride + (x + 1)] + running;
            }
        }
        Self {
            width,
            height,
            table,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Prefix sum over all samples at `(x', y')` with `x' < x, y' < y`.
    /// Index 0 is the guard row/column and always reads 0.
    pub fn prefix(&self, x: usize, y: usize) -> f64 {
        self.table[y * (self.width + 1) + x]
    }

    /// Sum of the field over an inclusive rectangle, in constant time.
    pub fn rect_sum(&self, rect: WindowRect) -> Result<f64> {
        self.check_bounds(rect)?;
        Ok(self.rect_sum_raw(rect))
    }

    #[inline]
    pub(crate) fn rect_sum_raw(&self, rect: WindowRect) -> f64 {
        debug_assert!(rect.fits(self.width, self.height));
        let stride = self.width + 1;
        let top = rect.y0 * stride;
        let bottom = (rect.y1 + 1) * stride;
        self.table[bottom + rect.x1 + 1] + self.table[top + rect.x0]
            - self.table[top + rect.x1 + 1]
            - self.table[bottom + rect.x0]
    }

    fn check_bounds(&self, rect: WindowRect) -> Result<()> {
        if rect.fits(self.width, self.height) {
            Ok(())
        } else {
            Err(Error::RectOutOfBounds {
                x0: rect.x0,
                y0: rect.y0,
                x1: rect.x1,
                y1: rect.y1,
                width: self.width,
                height: self.height,
            })
        }
    }
}

/// Variance of the source field over a window, from the field's integral
/// image `t` and the squared field's integral image `t2`.
///
/// Computed as `E[x^2] - E[x]^2` and clamped at zero, since floating-point
/// cancellation can drive the difference a hair negative on near-constant
/// windows.
pub fn window_variance(t: &IntegralImage, t2: &IntegralImage, rect: WindowRect) -> Result<f64> {
    if t.width != t2.width || t.height != t2.height {
        return Err(Error::MismatchedTables(
            t.width, t.height, t2.width, t2.height,
        ));
    }
    t.check_bounds(rect)?;
    Ok(window_variance_raw(t, t2, rect))
}

#[inline]
pub(crate) fn window_variance_raw(t: &IntegralImage, t2: &IntegralImage, rect: WindowRect) -> f64 {
    let n = rect.area() as f64;
    let mean = t.rect_sum_raw(rect) / n;
    let mean_sq = t2.rect_sum_raw(rect) / n;
    (mean_sq - mean * mean).max(0.0)
}

/// One integral image per histogram bin, over the indicator planes of a
/// log-luminance field. Any window's histogram then costs `4n` lookups.
#[derive(Debug, Clone)]
pub struct IntegralHistogram {
    edges: Vec<f64>,
    channels: Vec<IntegralImage>,
    width: usize,
    height: usize,
}

impl IntegralHistogram {
    /// Builds the `edges.len() - 1` indicator tables of a log-domain field.
    ///
    /// `edges` must be strictly ascending and cover every sample. Bins are
    /// half-open: a value on the shared edge of bins k and k+1 counts in
    /// bin k+1, and the top edge itself (the field's maximum when edges are
    /// fitted to it) counts in the last bin.
    pub fn build(field: &LuminanceField, edges: &[f64]) -> Result<Self> {
        if edges.len() < 2 {
            return Err(Error::BadBinEdges(format!(
                "need at least 2 edges, got {}",
                edges.len()
            )));
        }
        if edges.iter().any(|e| !e.is_finite()) {
            return Err(Error::BadBinEdges("edges must be finite".into()));
        }
        if edges.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::BadBinEdges(format!(
                "edges must be strictly ascending, got {edges:?}"
            )));
        }
        let (lo, hi) = field.min_max();
        if lo < edges[0] || hi > edges[edges.len() - 1] {
            return Err(Error::BadBinEdges(format!(
                "edges [{}, {}] do not cover the sample range [{lo}, {hi}]",
                edges[0],
                edges[edges.len() - 1]
            )));
        }

        let bins = edges.len() - 1;
        let assigned: Vec<u32> = field
            .samples()
            .iter()
            .map(|&v| bin_of(edges, v) as u32)
            .collect();

        // Indicator planes partition the image, one table per bin. The
        // tables are independent, so build them in parallel.
        let width = field.width();
        let height = field.height();
        let channels: Vec<IntegralImage> = (0..bins)
            .into_par_iter()
            .map(|k| IntegralImage::build_indicator(width, height, &assigned, k as u32))
            .collect();

        Ok(Self {
            edges: edges.to_vec(),
            channels,
            width,
            height,
        })
    }

    pub fn bins(&self) -> usize {
        self.channels.len()
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channel(&self, k: usize) -> &IntegralImage {
        &self.channels[k]
    }

    /// Which bin a sample falls in (0-based).
    pub fn bin_of(&self, value: f64) -> usize {
        bin_of(&self.edges, value)
    }

    /// Per-bin pixel counts inside an inclusive window.
    pub fn window_bin_populations(&self, rect: WindowRect) -> Result<Vec<u64>> {
        let mut out = vec![0u64; self.bins()];
        self.window_bin_populations_into(rect, &mut out)?;
        Ok(out)
    }

    /// Allocation-free variant for hot loops. `out.len()` must equal the
    /// bin count.
    pub fn window_bin_populations_into(&self, rect: WindowRect, out: &mut [u64]) -> Result<()> {
        if out.len() != self.bins() {
            return Err(Error::BadBinEdges(format!(
                "output slice holds {} bins, histogram has {}",
                out.len(),
                self.bins()
            )));
        }
        self.channels[0].check_bounds(rect)?;
        for (slot, channel) in out.iter_mut().zip(&self.channels) {
            // Indicator sums are exact integers in f64.
            *slot = channel.rect_sum_raw(rect) as u64;
        }
        Ok(())
    }
}

/// Half-open bin lookup: `edges[k] <= v < edges[k+1]`, with values at or
/// above the top edge folded into the last bin.
#[inline]
pub(crate) fn bin_of(edges: &[f64], value: f64) -> usize {
    let bins = edges.len() - 1;
    edges.partition_point(|&e| e <= value).clamp(1, bins) - 1
}

impl IntegralImage {
    // Builds the integral image of the {0,1} indicator of one bin.
    fn build_indicator(width: usize, height: usize, assigned: &[u32], bin: u32) -> Self {
        let stride = width + 1;
        let mut table = vec![0.0; stride * (height + 1)];
        for y in 0..height {
            let row = &assigned[y * width..(y + 1) * width];
            let mut running = 0.0;
            for x in 0..width {
                if row[x] == bin {
                    running += 1.0;
                }
                table[(y + 1) * stride + (x + 1)] = table[y * stride + (x + 1)] + running;
            }
        }
        Self {
            width,
            height,
            table,
        }
    }
}
