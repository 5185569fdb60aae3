//! The multi-scale histogram-synthesis tone mapper.
//!
//! Each pixel gets one tone value per pyramid scale, read off the cumulative
//! histogram of a window centered on it, plus a textural score derived from
//! the window's variance. The per-scale values are fused into one display
//! level with weights that favor large scales in flat regions (brightness
//! consistency) and small scales in textured regions (local contrast).
//!
//! Histograms and variances come from the integral structures in
//! [`crate::integral`], built once per image and shared by all scales.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::{Domain, DisplayImage, LuminanceField, WdrImage, WindowRect};
use crate::integral::{bin_of, window_variance_raw, IntegralHistogram, IntegralImage};
use crate::params::{ScaleCount, ToneParams};

/// Largest window side allowed for the smallest auto-resolved scale.
const AUTO_MIN_SIDE: usize = 64;

/// Display white point; every tone curve tops out here.
const DISPLAY_MAX: f64 = 255.0;

/// The pyramid of window sizes, largest first. Index 0 is the full image;
/// each following window halves both sides (rounding up).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalePlan {
    windows: Vec<(usize, usize)>,
}

impl ScalePlan {
    pub fn windows(&self) -> &[(usize, usize)] {
        &self.windows
    }

    pub fn len(&self) -> usize {
        self.windows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.windows.is_empty()
    }
}

/// Computes the pyramid windows for an image.
///
/// With `ScaleCount::Auto` the pyramid stops once both window sides are at
/// most 64 pixels (a 2000x2000 image yields 6 scales). An explicit count is
/// honored as long as the halving never has to continue past a 1x1 window.
pub fn scale_windows(width: usize, height: usize, scales: ScaleCount) -> Result<ScalePlan> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidParams(format!(
            "image dimensions {width}x{height} must be at least 1x1"
        )));
    }
    let halve = |(w, h): (usize, usize)| (w.div_ceil(2), h.div_ceil(2));
    let mut windows = vec![(width, height)];
    match scales {
        ScaleCount::Auto => {
            while windows.last().is_some_and(|&(w, h)| w.max(h) > AUTO_MIN_SIDE) {
                windows.push(halve(*windows.last().unwrap()));
            }
        }
        ScaleCount::Fixed(s) => {
            if s < 1 {
                return Err(Error::InvalidParams(
                    "scale count must be at least 1".into(),
                ));
            }
            for i in 1..s {
                let last = *windows.last().unwrap();
                if last == (1, 1) {
                    return Err(Error::InvalidParams(format!(
                        "{s} scales on a {width}x{height} image: scale {} would halve below one pixel",
                        i + 1,
                    )));
                }
                windows.push(halve(last));
            }
        }
    }
    Ok(ScalePlan { windows })
}

/// Luminance of a radiance map: `0.299 R + 0.587 G + 0.114 B`.
pub fn extract_luminance(img: &WdrImage) -> LuminanceField {
    let [r, g, b] = img.planes();
    let samples = r
        .iter()
        .zip(g)
        .zip(b)
        .map(|((&r, &g), &b)| 0.299 * r + 0.587 * g + 0.114 * b)
        .collect();
    LuminanceField::new(img.width(), img.height(), samples, Domain::Linear)
        .expect("weighted sum of valid radiance is valid luminance")
}

/// Linear luminance with zeros lifted to `log_floor` times the image
/// maximum, so the log transform and color ratios stay finite.
pub fn floored_linear(lum: &LuminanceField, log_floor: f64) -> Result<LuminanceField> {
    if lum.domain() != Domain::Linear {
        return Err(Error::InvalidImage(
            "flooring expects a linear-domain field".into(),
        ));
    }
    if log_floor <= 0.0 || !log_floor.is_finite() {
        return Err(Error::InvalidParams(format!(
            "log floor must be a positive finite number, got {log_floor}"
        )));
    }
    let (_, max) = lum.min_max();
    if max <= 0.0 {
        return Err(Error::EmptyDynamicRange);
    }
    let floor = log_floor * max;
    let samples = lum.samples().iter().map(|&v| v.max(floor)).collect();
    LuminanceField::new(lum.width(), lum.height(), samples, Domain::Linear)
}

/// Natural log of the floored linear luminance.
pub fn to_log_domain(lum: &LuminanceField, log_floor: f64) -> Result<LuminanceField> {
    let floored = floored_linear(lum, log_floor)?;
    let samples = floored.samples().iter().map(|&v| v.ln()).collect();
    LuminanceField::new(lum.width(), lum.height(), samples, Domain::Log)
}

/// The log field rescaled linearly onto [0, 1]; constant fields map to zero.
/// Textural scores are computed on this normalization so that the epsilon
/// regularizer has a fixed meaning regardless of the image's dynamic range.
pub fn normalize_unit(field: &LuminanceField) -> LuminanceField {
    let (lo, hi) = field.min_max();
    let span = hi - lo;
    let samples = if span > 0.0 {
        field.samples().iter().map(|&v| (v - lo) / span).collect()
    } else {
        vec![0.0; field.samples().len()]
    };
    LuminanceField::new(field.width(), field.height(), samples, Domain::Log)
        .expect("rescaled samples are finite")
}

/// Uniform histogram edges over `[lo, hi]`.
///
/// The end edges are pinned to `lo` and `hi` exactly so fitted samples are
/// always covered. A degenerate span (all samples equal, or so narrow the
/// uniform grid collides) widens to a unit interval around the data instead.
pub fn global_bin_edges(lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    assert!(bins >= 1, "need at least one bin");
    assert!(lo.is_finite() && hi.is_finite() && lo <= hi);
    if hi > lo {
        let span = hi - lo;
        let mut edges: Vec<f64> = (0..=bins)
            .map(|k| lo + span * (k as f64 / bins as f64))
            .collect();
        edges[0] = lo;
        edges[bins] = hi;
        if edges.windows(2).all(|w| w[0] < w[1]) {
            return edges;
        }
    }
    // Constant field: center it in a widened unit range.
    (0..=bins)
        .map(|k| (lo - 0.5) + k as f64 / bins as f64)
        .collect()
}

/// A per-window tone curve: the normalized cumulative histogram scaled to
/// the display range, evaluated piecewise-linearly inside each bin.
#[derive(Debug, Clone, PartialEq)]
pub struct ToneCurve {
    edges: Vec<f64>,
    levels: Vec<f64>,
}

impl ToneCurve {
    /// Builds the curve for one window from its bin populations.
    pub fn from_populations(edges: &[f64], populations: &[u64]) -> Result<Self> {
        if edges.len() != populations.len() + 1 {
            return Err(Error::BadBinEdges(format!(
                "{} edges for {} bins",
                edges.len(),
                populations.len()
            )));
        }
        let total: u64 = populations.iter().sum();
        if total == 0 {
            return Err(Error::InvalidImage(
                "tone curve needs a non-empty window".into(),
            ));
        }
        let total = total as f64;
        let mut cum = 0.0;
        let levels = populations
            .iter()
            .map(|&p| {
                cum += p as f64;
                DISPLAY_MAX * (cum / total)
            })
            .collect();
        Ok(Self {
            edges: edges.to_vec(),
            levels,
        })
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    /// Monotone display levels, one per bin; the last is exactly 255.
    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// Display value for a log-luminance sample.
    pub fn eval(&self, value: f64) -> f64 {
        let bin = bin_of(&self.edges, value);
        let below = if bin == 0 { 0.0 } else { self.levels[bin - 1] };
        let frac = bin_fraction(&self.edges, bin, value);
        below + frac * (self.levels[bin] - below)
    }
}

/// Fractional position of `value` inside bin `bin`, clamped to [0, 1].
/// Empty-width bins collapse to their upper level.
#[inline]
fn bin_fraction(edges: &[f64], bin: usize, value: f64) -> f64 {
    let lo = edges[bin];
    let hi = edges[bin + 1];
    if hi > lo {
        ((value - lo) / (hi - lo)).clamp(0.0, 1.0)
    } else {
        1.0
    }
}

/// Piecewise-linear evaluation from cumulative counts: interpolates between
/// the display level below the pixel's bin and the level at its top.
#[inline]
fn interp_tone(cum_below: f64, bin_pop: f64, total: f64, frac: f64) -> f64 {
    let below = DISPLAY_MAX * (cum_below / total);
    let at_bin = DISPLAY_MAX * ((cum_below + bin_pop) / total);
    below + frac * (at_bin - below)
}

/// Tone value of one pixel under one window size, from the shared integral
/// histogram. The window is centered on the pixel and slid to stay inside
/// the image.
pub fn tone_value_at(
    hist: &IntegralHistogram,
    x: usize,
    y: usize,
    window: (usize, usize),
    log_value: f64,
) -> Result<f64> {
    if x >= hist.width() || y >= hist.height() {
        return Err(Error::RectOutOfBounds {
            x0: x,
            y0: y,
            x1: x,
            y1: y,
            width: hist.width(),
            height: hist.height(),
        });
    }
    if window.0 < 1 || window.1 < 1 {
        return Err(Error::InvalidParams("window sides must be at least 1".into()));
    }
    let rect = WindowRect::centered(x, y, window.0, window.1, hist.width(), hist.height());
    let bin = hist.bin_of(log_value);
    let frac = bin_fraction(hist.edges(), bin, log_value);
    let total = rect.area() as f64;
    let mut cum_below = 0.0;
    for k in 0..bin {
        cum_below += hist.channel(k).rect_sum_raw(rect);
    }
    let bin_pop = hist.channel(bin).rect_sum_raw(rect);
    Ok(interp_tone(cum_below, bin_pop, total, frac))
}

/// Textural score of one pixel under one window size: `var / (var + epsilon)`
/// over the windowed variance of the unit-normalized log field. Near 0 in
/// flat windows, approaching 1 in busy ones.
pub fn texture_score_at(
    t: &IntegralImage,
    t2: &IntegralImage,
    x: usize,
    y: usize,
    window: (usize, usize),
    epsilon: f64,
) -> Result<f64> {
    if t.width() != t2.width() || t.height() != t2.height() {
        return Err(Error::MismatchedTables(
            t.width(),
            t.height(),
            t2.width(),
            t2.height(),
        ));
    }
    if x >= t.width() || y >= t.height() {
        return Err(Error::RectOutOfBounds {
            x0: x,
            y0: y,
            x1: x,
            y1: y,
            width: t.width(),
            height: t.height(),
        });
    }
    if window.0 < 1 || window.1 < 1 {
        return Err(Error::InvalidParams("window sides must be at least 1".into()));
    }
    if epsilon <= 0.0 || !epsilon.is_finite() {
        return Err(Error::InvalidParams(format!(
            "epsilon must be a positive finite number, got {epsilon}"
        )));
    }
    let rect = WindowRect::centered(x, y, window.0, window.1, t.width(), t.height());
    let var = window_variance_raw(t, t2, rect);
    Ok(var / (var + epsilon))
}

/// Fuses per-scale tone values with weights `score_i ^ i` (scale 1 is the
/// full image). When every weight has decayed below `tolerance` — a
/// perfectly flat image — the largest-scale value wins outright.
///
/// Panics if the slices are empty or of different lengths.
pub fn fuse(tones: &[f64], scores: &[f64], tolerance: f64) -> f64 {
    assert_eq!(tones.len(), scores.len(), "one score per tone value");
    assert!(!tones.is_empty(), "fusion needs at least one scale");
    if tones.len() == 1 {
        // The weight cancels (or the fallback fires); either way the single
        // scale passes through untouched.
        return tones[0];
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, (&u, &a)) in tones.iter().zip(scores).enumerate() {
        let w = a.powi(i as i32 + 1);
        num += w * u;
        den += w;
    }
    if den < tolerance {
        tones[0]
    } else {
        num / den
    }
}

// Everything the per-pixel loop reads; built once, then shared read-only.
struct Prepared {
    log: LuminanceField,
    hist: IntegralHistogram,
    t: IntegralImage,
    t2: IntegralImage,
    plan: ScalePlan,
    epsilon: f64,
    fallback_tolerance: f64,
}

impl Prepared {
    fn build(lum: &LuminanceField, params: &ToneParams) -> Result<Self> {
        let params = params.validate(lum.width(), lum.height())?;
        let log = to_log_domain(lum, params.log_floor)?;
        let (lo, hi) = log.min_max();
        let edges = global_bin_edges(lo, hi, params.bins);
        let hist = IntegralHistogram::build(&log, &edges)?;
        let unit = normalize_unit(&log);
        let t = IntegralImage::build(&unit);
        let t2 = IntegralImage::build_squared(&unit);
        let plan = scale_windows(lum.width(), lum.height(), params.scales)?;
        Ok(Self {
            log,
            hist,
            t,
            t2,
            plan,
            epsilon: params.epsilon,
            fallback_tolerance: params.fallback_tolerance,
        })
    }

    #[inline]
    fn tone_and_score(&self, x: usize, y: usize, scale: usize, bin: usize, frac: f64) -> (f64, f64) {
        let (ww, wh) = self.plan.windows()[scale];
        let rect = WindowRect::centered(x, y, ww, wh, self.log.width(), self.log.height());
        let total = rect.area() as f64;
        let mut cum_below = 0.0;
        for k in 0..bin {
            cum_below += self.hist.channel(k).rect_sum_raw(rect);
        }
        let bin_pop = self.hist.channel(bin).rect_sum_raw(rect);
        let tone = interp_tone(cum_below, bin_pop, total, frac);
        let var = window_variance_raw(&self.t, &self.t2, rect);
        (tone, var / (var + self.epsilon))
    }

    #[inline]
    fn fused_pixel(&self, x: usize, y: usize) -> f64 {
        let v = self.log.get(x, y);
        let bin = self.hist.bin_of(v);
        let frac = bin_fraction(self.hist.edges(), bin, v);
        let mut num = 0.0;
        let mut den = 0.0;
        let mut largest_scale_tone = 0.0;
        for i in 0..self.plan.len() {
            let (tone, score) = self.tone_and_score(x, y, i, bin, frac);
            if i == 0 {
                largest_scale_tone = tone;
            }
            let w = score.powi(i as i32 + 1);
            num += w * tone;
            den += w;
        }
        // Mirrors `fuse`, including the exact single-scale pass-through.
        let fused = if self.plan.len() == 1 || den < self.fallback_tolerance {
            largest_scale_tone
        } else {
            num / den
        };
        fused.clamp(0.0, DISPLAY_MAX)
    }
}

/// Runs the full multi-scale operator on a linear luminance field and
/// returns display levels in [0, 255].
pub fn tonemap_luminance(lum: &LuminanceField, params: &ToneParams) -> Result<LuminanceField> {
    if lum.domain() != Domain::Linear {
        return Err(Error::InvalidImage(
            "tone mapping expects a linear-domain field".into(),
        ));
    }
    let prepared = Prepared::build(lum, params)?;
    let width = lum.width();
    let mut out = vec![0.0; width * lum.height()];
    out.par_chunks_mut(width).enumerate().for_each(|(y, row)| {
        for (x, slot) in row.iter_mut().enumerate() {
            *slot = prepared.fused_pixel(x, y);
        }
    });
    LuminanceField::new(width, lum.height(), out, Domain::Display)
}

/// One pyramid level's raw ingredients, for diagnostics: the tone image the
/// level would produce on its own, and its textural scores stretched onto
/// the display range (bright pixels mark high-variance regions).
pub struct ScaleDiagnostic {
    pub window: (usize, usize),
    pub tone: LuminanceField,
    pub score: LuminanceField,
}

/// Per-scale tone images and score maps for the given luminance field.
pub fn scale_diagnostics(
    lum: &LuminanceField,
    params: &ToneParams,
) -> Result<Vec<ScaleDiagnostic>> {
    if lum.domain() != Domain::Linear {
        return Err(Error::InvalidImage(
            "tone mapping expects a linear-domain field".into(),
        ));
    }
    let prepared = Prepared::build(lum, params)?;
    let (width, height) = (lum.width(), lum.height());
    (0..prepared.plan.len())
        .map(|scale| {
            let mut tone = vec![0.0; width * height];
            let mut score = vec![0.0; width * height];
            tone.par_chunks_mut(width)
                .zip(score.par_chunks_mut(width))
                .enumerate()
                .for_each(|(y, (tone_row, score_row))| {
                    for x in 0..width {
                        let v = prepared.log.get(x, y);
                        let bin = prepared.hist.bin_of(v);
                        let frac = bin_fraction(prepared.hist.edges(), bin, v);
                        let (u, a) = prepared.tone_and_score(x, y, scale, bin, frac);
                        tone_row[x] = u.clamp(0.0, DISPLAY_MAX);
                        score_row[x] = (a * DISPLAY_MAX).clamp(0.0, DISPLAY_MAX);
                    }
                });
            Ok(ScaleDiagnostic {
                window: prepared.plan.windows()[scale],
                tone: LuminanceField::new(width, height, tone, Domain::Display)?,
                score: LuminanceField::new(width, height, score, Domain::Display)?,
            })
        })
        .collect()
}

/// Restores color around a tone-mapped luminance:
/// `C_out = (C_in / L_in)^sat * L_out`, clamped to the display range.
///
/// `lin` must be strictly positive everywhere — use [`floored_linear`] —
/// so black input pixels come out as `(0,0,0)` through a zero ratio rather
/// than a division by zero.
pub fn restore_color(
    img: &WdrImage,
    lin: &LuminanceField,
    out_lum: &LuminanceField,
    sat: f64,
) -> Result<DisplayImage> {
    if lin.domain() != Domain::Linear || out_lum.domain() != Domain::Display {
        return Err(Error::InvalidImage(
            "color restoration expects linear input and display output luminance".into(),
        ));
    }
    if img.width() != lin.width()
        || img.height() != lin.height()
        || img.width() != out_lum.width()
        || img.height() != out_lum.height()
    {
        return Err(Error::InvalidImage(
            "image and luminance dimensions disagree".into(),
        ));
    }
    if !(sat > 0.0 && sat <= 1.0) {
        return Err(Error::InvalidParams(format!(
            "sat must lie in (0, 1], got {sat}"
        )));
    }
    let (lin_min, _) = lin.min_max();
    if lin_min <= 0.0 {
        return Err(Error::InvalidImage(
            "input luminance must be strictly positive; floor it first".into(),
        ));
    }

    let restore_plane = |plane: &[f64]| -> Vec<f64> {
        plane
            .iter()
            .zip(lin.samples())
            .zip(out_lum.samples())
            .map(|((&c, &l_in), &l_out)| {
                ((c / l_in).powf(sat) * l_out).clamp(0.0, DISPLAY_MAX)
            })
            .collect()
    };
    let [r, g, b] = img.planes();
    DisplayImage::new(
        img.width(),
        img.height(),
        restore_plane(r),
        restore_plane(g),
        restore_plane(b),
    )
}

/// A tone-mapped image together with the display luminance it was built
/// around (the field the quality metrics are measured on).
pub struct TonemapResult {
    pub image: DisplayImage,
    pub luminance: LuminanceField,
}

/// The whole operator: luminance, log transform, multi-scale fusion, color.
pub fn tonemap(img: &WdrImage, params: &ToneParams) -> Result<TonemapResult> {
    let resolved = params.validate(img.width(), img.height())?;
    let lum = extract_luminance(img);
    let luminance = tonemap_luminance(&lum, &resolved)?;
    let floored = floored_linear(&lum, resolved.log_floor)?;
    let image = restore_color(img, &floored, &luminance, resolved.sat)?;
    Ok(TonemapResult { image, luminance })
}
