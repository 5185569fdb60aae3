//! Naive reference implementations used as oracles by the integration
//! tests. Everything here recomputes results from first principles —
//! double loops, linear scans, direct byte walks — independently of the
//! library's integral-table fast paths and streaming decoders.
#![allow(dead_code)]

use mshist::{Domain, LuminanceField, WdrImage, WindowRect};
use rand::prelude::*;

// ---------------------------------------------------------------------------
// Field construction helpers

pub fn log_field(width: usize, height: usize, samples: Vec<f64>) -> LuminanceField {
    LuminanceField::new(width, height, samples, Domain::Log).unwrap()
}

pub fn random_log_field(width: usize, height: usize, seed: u64) -> LuminanceField {
    let mut rng = StdRng::seed_from_u64(seed);
    log_field(
        width,
        height,
        (0..width * height)
            .map(|_| rng.random::<f64>() * 10.0 - 5.0)
            .collect(),
    )
}

/// A synthetic radiance map with structure: a smooth ramp, a hot spot and
/// per-pixel noise, spanning several decades of dynamic range.
pub fn synthetic_wdr(width: usize, height: usize, seed: u64) -> WdrImage {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut plane = |phase: f64| -> Vec<f64> {
        (0..width * height)
            .map(|i| {
                let x = (i % width) as f64 / width as f64;
                let y = (i / width) as f64 / height as f64;
                let ramp = (x + y) * 0.5 + 0.01;
                let spot = 40.0 * (-((x - 0.7).powi(2) + (y - 0.3).powi(2)) * 40.0).exp();
                let noise = rng.random::<f64>() * 0.05;
                (ramp * (1.0 + phase) + spot + noise) * 3.0
            })
            .collect()
    };
    WdrImage::new(width, height, plane(0.0), plane(0.3), plane(0.6)).unwrap()
}

/// Uniform bin edges with the ends pinned to the exact extremes.
pub fn pinned_edges(lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    let mut edges: Vec<f64> = (0..=bins)
        .map(|k| lo + (hi - lo) * k as f64 / bins as f64)
        .collect();
    edges[0] = lo;
    edges[bins] = hi;
    edges
}

pub fn random_rect(rng: &mut StdRng, width: usize, height: usize) -> WindowRect {
    let x0 = rng.random_range(0..width);
    let y0 = rng.random_range(0..height);
    WindowRect::new(
        x0,
        y0,
        rng.random_range(x0..width),
        rng.random_range(y0..height),
    )
    .unwrap()
}

// ---------------------------------------------------------------------------
// Naive windowed statistics

pub fn naive_rect_sum(field: &LuminanceField, rect: WindowRect) -> f64 {
    let mut total = 0.0;
    for y in rect.y0..=rect.y1 {
        for x in rect.x0..=rect.x1 {
            total += field.get(x, y);
        }
    }
    total
}

/// Two-pass variance: mean first, then mean squared deviation.
pub fn naive_variance(field: &LuminanceField, rect: WindowRect) -> f64 {
    let n = rect.area() as f64;
    let mean = naive_rect_sum(field, rect) / n;
    let mut acc = 0.0;
    for y in rect.y0..=rect.y1 {
        for x in rect.x0..=rect.x1 {
            let d = field.get(x, y) - mean;
            acc += d * d;
        }
    }
    acc / n
}

/// Linear-scan bin lookup: first bin whose upper edge exceeds the value;
/// everything at or above the last edge lands in the last bin.
pub fn naive_bin_of(edges: &[f64], value: f64) -> usize {
    let bins = edges.len() - 1;
    for k in 0..bins {
        if value < edges[k + 1] {
            return k;
        }
    }
    bins - 1
}

pub fn naive_window_histogram(
    field: &LuminanceField,
    edges: &[f64],
    rect: WindowRect,
) -> Vec<u64> {
    let mut counts = vec![0u64; edges.len() - 1];
    for y in rect.y0..=rect.y1 {
        for x in rect.x0..=rect.x1 {
            counts[naive_bin_of(edges, field.get(x, y))] += 1;
        }
    }
    counts
}

/// The window geometry contract: centered on the pixel, full size, slid to
/// stay inside the image.
pub fn naive_centered_window(
    cx: usize,
    cy: usize,
    win_w: usize,
    win_h: usize,
    width: usize,
    height: usize,
) -> WindowRect {
    let span = |c: usize, win: usize, len: usize| -> (usize, usize) {
        let win = win.min(len);
        let ideal = c as i64 - ((win as i64 - 1) / 2);
        let lo = ideal.clamp(0, (len - win) as i64) as usize;
        (lo, lo + win - 1)
    };
    let (x0, x1) = span(cx, win_w, width);
    let (y0, y1) = span(cy, win_h, height);
    WindowRect::new(x0, y0, x1, y1).unwrap()
}

/// From-scratch per-pixel tone value: rebuild the local histogram by
/// counting, form the cumulative curve, interpolate within the bin.
pub fn naive_tone_value(
    field: &LuminanceField,
    edges: &[f64],
    x: usize,
    y: usize,
    window: (usize, usize),
    value: f64,
) -> f64 {
    let rect = naive_centered_window(x, y, window.0, window.1, field.width(), field.height());
    let counts = naive_window_histogram(field, edges, rect);
    naive_curve_eval(edges, &counts, value)
}

pub fn naive_curve_eval(edges: &[f64], counts: &[u64], value: f64) -> f64 {
    let total: u64 = counts.iter().sum();
    let bin = naive_bin_of(edges, value);
    let below: u64 = counts[..bin].iter().sum();
    let u_prev = 255.0 * (below as f64 / total as f64);
    let u_bin = 255.0 * ((below + counts[bin]) as f64 / total as f64);
    let (lo, hi) = (edges[bin], edges[bin + 1]);
    let frac = if hi > lo {
        ((value - lo) / (hi - lo)).clamp(0.0, 1.0)
    } else {
        1.0
    };
    u_prev + frac * (u_bin - u_prev)
}

/// Global histogram-equalization-style mapping: one histogram over the
/// whole image, one cumulative curve, every pixel evaluated through it.
pub fn naive_global_map(log: &LuminanceField, bins: usize) -> Vec<f64> {
    let (lo, hi) = log.min_max();
    let edges = pinned_edges(lo, hi, bins);
    let full = WindowRect::new(0, 0, log.width() - 1, log.height() - 1).unwrap();
    let counts = naive_window_histogram(log, &edges, full);
    log.samples()
        .iter()
        .map(|&v| naive_curve_eval(&edges, &counts, v))
        .collect()
}

// ---------------------------------------------------------------------------
// Naive byte-level decoders
//
// Deliberately written as direct index walks over the byte slice, sharing
// nothing with the library decoders. They support what the hand-assembled
// test files use: the standard "-Y h +X w" orientation, flat pixels,
// old-style repeat markers and new-style per-component RLE.

#[allow(clippy::needless_range_loop)] // deliberate index-walk style
pub fn naive_decode_rgbe(bytes: &[u8]) -> (usize, usize, Vec<[f64; 3]>) {
    let text_line = |from: usize| -> (String, usize) {
        let mut end = from;
        while bytes[end] != b'\n' {
            end += 1;
        }
        (
            String::from_utf8(bytes[from..end].to_vec()).unwrap(),
            end + 1,
        )
    };

    let (magic, mut at) = text_line(0);
    assert!(magic.starts_with("#?"), "naive: not a radiance file");
    let mut exposure = 1.0f64;
    loop {
        let (line, next) = text_line(at);
        at = next;
        if line.is_empty() {
            break;
        }
        if let Some(v) = line.strip_prefix("EXPOSURE=") {
            exposure *= v.trim().parse::<f64>().unwrap();
        }
    }
    let (resolution, mut at) = text_line(at);
    let parts: Vec<&str> = resolution.split_whitespace().collect();
    assert_eq!(parts[0], "-Y", "naive decoder handles -Y h +X w only");
    assert_eq!(parts[2], "+X");
    let height: usize = parts[1].parse().unwrap();
    let width: usize = parts[3].parse().unwrap();

    let mut quads = vec![[0u8; 4]; width * height];
    for row in 0..height {
        let line = &mut quads[row * width..(row + 1) * width];
        // New-style scanline?
        if width >= 8
            && bytes[at] == 2
            && bytes[at + 1] == 2
            && (bytes[at + 2] as usize) < 128
            && ((bytes[at + 2] as usize) << 8 | bytes[at + 3] as usize) == width
        {
            at += 4;
            for c in 0..4 {
                let mut filled = 0;
                while filled < width {
                    let code = bytes[at] as usize;
                    at += 1;
                    if code > 128 {
                        for _ in 0..code - 128 {
                            line[filled][c] = bytes[at];
                            filled += 1;
                        }
                        at += 1;
                    } else {
                        for _ in 0..code {
                            line[filled][c] = bytes[at];
                            at += 1;
                            filled += 1;
                        }
                    }
                }
            }
        } else {
            let mut filled = 0;
            let mut marker_scale = 1usize;
            while filled < width {
                let quad = [bytes[at], bytes[at + 1], bytes[at + 2], bytes[at + 3]];
                at += 4;
                if quad[0] == 1 && quad[1] == 1 && quad[2] == 1 {
                    let repeats = quad[3] as usize * marker_scale;
                    marker_scale *= 256;
                    let prev = line[filled - 1];
                    for _ in 0..repeats {
                        line[filled] = prev;
                        filled += 1;
                    }
                } else {
                    marker_scale = 1;
                    line[filled] = quad;
                    filled += 1;
                }
            }
        }
    }

    let pixels = quads
        .iter()
        .map(|&[r, g, b, e]| {
            if e == 0 {
                [0.0, 0.0, 0.0]
            } else {
                let two_to = 2.0f64.powi(e as i32 - 128) / 256.0;
                [
                    (r as f64 + 0.5) * two_to / exposure,
                    (g as f64 + 0.5) * two_to / exposure,
                    (b as f64 + 0.5) * two_to / exposure,
                ]
            }
        })
        .collect();
    (width, height, pixels)
}

pub fn naive_decode_pfm(bytes: &[u8]) -> (usize, usize, Vec<[f64; 3]>) {
    // Scan the four header tokens byte-wise; the payload that follows is
    // binary and must not be touched by any text decoding.
    let mut tokens: Vec<String> = Vec::new();
    let mut pos = 0usize;
    while tokens.len() < 4 {
        while bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        tokens.push(String::from_utf8(bytes[start..pos].to_vec()).unwrap());
    }
    let header_end = pos + 1;

    let color = match tokens[0].as_str() {
        "PF" => true,
        "Pf" => false,
        other => panic!("naive: bad pfm magic {other}"),
    };
    let width: usize = tokens[1].parse().unwrap();
    let height: usize = tokens[2].parse().unwrap();
    let scale: f64 = tokens[3].parse().unwrap();

    let channels = if color { 3 } else { 1 };
    let mut pixels = vec![[0.0f64; 3]; width * height];
    for i in 0..width * height * channels {
        let b = &bytes[header_end + 4 * i..header_end + 4 * i + 4];
        let raw = [b[0], b[1], b[2], b[3]];
        let v = if scale < 0.0 {
            f32::from_le_bytes(raw)
        } else {
            f32::from_be_bytes(raw)
        } as f64;
        let v = v.max(0.0);
        let pixel = i / channels;
        let (x, file_row) = (pixel % width, pixel / width);
        let idx = (height - 1 - file_row) * width + x;
        if color {
            pixels[idx][i % 3] = v;
        } else {
            pixels[idx] = [v, v, v];
        }
    }
    (width, height, pixels)
}

// ---------------------------------------------------------------------------
// Test-side PFM writer (color, little-endian), for synthesizing CLI inputs.

pub fn encode_pfm(img: &WdrImage) -> Vec<u8> {
    let (w, h) = (img.width(), img.height());
    let mut out = format!("PF\n{w} {h}\n-1.0\n").into_bytes();
    let [r, g, b] = img.planes();
    for file_row in 0..h {
        let y = h - 1 - file_row;
        for x in 0..w {
            for plane in [r, g, b] {
                out.extend_from_slice(&(plane[y * w + x] as f32).to_le_bytes());
            }
        }
    }
    out
}
