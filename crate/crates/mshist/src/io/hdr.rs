//! Radiance RGBE (.hdr / .pic) decoding.
//!
//! Handles the classic header (`#?RADIANCE`, key=value lines, blank line,
//! resolution line), all eight pixel orientations, and all three scanline
//! encodings: flat RGBE, the old repeat-marker RLE, and the new-style
//! per-component RLE. Shared-exponent quadruples convert to linear floats
//! with the `(m + 0.5) / 256 * 2^(e-128)` mantissa-center convention;
//! a zero exponent byte decodes to black.

use crate::image::WdrImage;
use crate::io::DecodeError;

// One decoded quadruple: three mantissas sharing one exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Rgbe {
    r: u8,
    g: u8,
    b: u8,
    e: u8,
}

impl Rgbe {
    fn is_old_rle_marker(self) -> bool {
        self.r == 1 && self.g == 1 && self.b == 1
    }

    fn new_rle_width(self) -> Option<usize> {
        if self.r == 2 && self.g == 2 && self.b < 128 {
            Some(((self.b as usize) << 8) | self.e as usize)
        } else {
            None
        }
    }

    fn to_linear(self, exposure: f64) -> [f64; 3] {
        if self.e == 0 {
            return [0.0, 0.0, 0.0];
        }
        // (m + 0.5) / 256 * 2^(e - 128), folded into one exact power of two.
        let scale = 2.0_f64.powi(self.e as i32 - 136) / exposure;
        [
            (self.r as f64 + 0.5) * scale,
            (self.g as f64 + 0.5) * scale,
            (self.b as f64 + 0.5) * scale,
        ]
    }
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn byte(&mut self, expected: &'static str) -> Result<u8, DecodeError> {
        let b = *self.data.get(self.pos).ok_or(DecodeError::Truncated {
            offset: self.pos,
            expected,
        })?;
        self.pos += 1;
        Ok(b)
    }

    fn take(&mut self, n: usize, expected: &'static str) -> Result<&'a [u8], DecodeError> {
        if self.pos + n > self.data.len() {
            return Err(DecodeError::Truncated {
                offset: self.data.len(),
                expected,
            });
        }
        let slice = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    fn rgbe(&mut self) -> Result<Rgbe, DecodeError> {
        let q = self.take(4, "an RGBE quadruple")?;
        Ok(Rgbe {
            r: q[0],
            g: q[1],
            b: q[2],
            e: q[3],
        })
    }

    /// One text line, without its newline. Tolerates a trailing `\r`.
    fn line(&mut self) -> Result<&'a str, DecodeError> {
        let start = self.pos;
        let end = self.data[start..]
            .iter()
            .position(|&b| b == b'\n')
            .map(|i| start + i)
            .ok_or(DecodeError::Truncated {
                offset: self.data.len(),
                expected: "a newline-terminated header line",
            })?;
        self.pos = end + 1;
        let mut raw = &self.data[start..end];
        if raw.last() == Some(&b'\r') {
            raw = &raw[..raw.len() - 1];
        }
        std::str::from_utf8(raw).map_err(|_| DecodeError::Header {
            offset: start,
            reason: "header line is not valid ASCII".into(),
        })
    }
}

#[derive(Debug, Clone, Copy)]
struct Axis {
    positive: bool,
    is_x: bool,
    count: usize,
}

/// Decodes a Radiance RGBE image into linear radiance planes.
pub fn read_radiance_hdr(bytes: &[u8]) -> Result<WdrImage, DecodeError> {
    let mut cur = Cursor {
        data: bytes,
        pos: 0,
    };

    let magic = cur.line()?;
    if !(magic.starts_with("#?RADIANCE") || magic.starts_with("#?RGBE")) {
        return Err(DecodeError::BadMagic {
            format: "radiance",
            offset: 0,
        });
    }

    // key=value header lines up to the blank separator line.
    let mut exposure = 1.0_f64;
    let mut format_seen = false;
    loop {
        let line_offset = cur.pos;
        let line = cur.line()?;
        if line.is_empty() {
            break;
        }
        if line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(DecodeError::Header {
                offset: line_offset,
                reason: format!("expected key=value, got '{line}'"),
            });
        };
        match key.trim() {
            "FORMAT" => {
                let value = value.trim();
                if value != "32-bit_rle_rgbe" {
                    return Err(DecodeError::UnsupportedFormat {
                        offset: line_offset,
                        found: value.to_string(),
                    });
                }
                format_seen = true;
            }
            "EXPOSURE" => {
                let factor: f64 = value.trim().parse().map_err(|_| DecodeError::Header {
                    offset: line_offset,
                    reason: format!("bad EXPOSURE value '{}'", value.trim()),
                })?;
                if factor <= 0.0 || !factor.is_finite() {
                    return Err(DecodeError::Header {
                        offset: line_offset,
                        reason: format!("EXPOSURE must be positive and finite, got {factor}"),
                    });
                }
                // Multiple EXPOSURE lines accumulate multiplicatively.
                exposure *= factor;
            }
            // PRIMARIES, GAMMA, SOFTWARE, PIXASPECT, ... carry no pixel data.
            _ => {}
        }
    }
    if !format_seen {
        return Err(DecodeError::Header {
            offset: cur.pos,
            reason: "missing FORMAT=32-bit_rle_rgbe line".into(),
        });
    }

    let res_offset = cur.pos;
    let resolution = cur.line()?;
    let (outer, inner) = parse_resolution(resolution, res_offset)?;

    let width = if outer.is_x { outer.count } else { inner.count };
    let height = if outer.is_x { inner.count } else { outer.count };
    let total = (width as u64).checked_mul(height as u64).filter(|&n| {
        n > 0 && n <= (usize::MAX / 32) as u64
    });
    if total.is_none() {
        return Err(DecodeError::DimensionOverflow {
            width: width as u64,
            height: height as u64,
        });
    }

    let mut red = vec![0.0; width * height];
    let mut green = vec![0.0; width * height];
    let mut blue = vec![0.0; width * height];
    let mut scanline = vec![
        Rgbe {
            r: 0,
            g: 0,
            b: 0,
            e: 0
        };
        inner.count
    ];

    for s in 0..outer.count {
        read_scanline(&mut cur, &mut scanline)?;
        for (j, &pix) in scanline.iter().enumerate() {
            let (x, y) = place(outer, inner, s, j);
            let [r, g, b] = pix.to_linear(exposure);
            let idx = y * width + x;
            red[idx] = r;
            green[idx] = g;
            blue[idx] = b;
        }
    }

    WdrImage::new(width, height, red, green, blue).map_err(|_| DecodeError::Header {
        offset: res_offset,
        reason: "decoded image failed radiance-map validation".into(),
    })
}

/// Parses "-Y 768 +X 512" and friends: two perpendicular signed axes.
fn parse_resolution(line: &str, offset: usize) -> Result<(Axis, Axis), DecodeError> {
    let bad = |reason: String| DecodeError::Header { offset, reason };
    let tokens: Vec<&str> = line.split_whitespace().collect();
    if tokens.len() != 4 {
        return Err(bad(format!("expected '<±axis> <n> <±axis> <n>', got '{line}'")));
    }
    let parse_axis = |spec: &str, count: &str| -> Result<Axis, DecodeError> {
        let (positive, is_x) = match spec {
            "+X" => (true, true),
            "-X" => (false, true),
            "+Y" => (true, false),
            "-Y" => (false, false),
            other => return Err(bad(format!("bad axis token '{other}'"))),
        };
        let count: usize = count
            .parse()
            .map_err(|_| bad(format!("bad axis length '{count}'")))?;
        if count == 0 {
            return Err(bad("axis length must be at least 1".into()));
        }
        Ok(Axis {
            positive,
            is_x,
            count,
        })
    };
    let outer = parse_axis(tokens[0], tokens[1])?;
    let inner = parse_axis(tokens[2], tokens[3])?;
    if outer.is_x == inner.is_x {
        return Err(bad("resolution axes must be perpendicular".into()));
    }
    Ok((outer, inner))
}

/// Maps (scanline, pixel-in-scanline) to image coordinates for any of the
/// eight orientations. `-Y` runs top to bottom and `+X` left to right, so
/// the common "-Y h +X w" layout is the identity.
fn place(outer: Axis, inner: Axis, s: usize, j: usize) -> (usize, usize) {
    let along = |axis: Axis, idx: usize| -> usize {
        // For X, '+' means ascending columns; for Y, '-' means descending
        // rows from the top of the image.
        if axis.is_x == axis.positive {
            idx
        } else {
            axis.count - 1 - idx
        }
    };
    let a = along(outer, s);
    let b = along(inner, j);
    if outer.is_x {
        (a, b)
    } else {
        (b, a)
    }
}

fn read_scanline(cur: &mut Cursor, out: &mut [Rgbe]) -> Result<(), DecodeError> {
    let start = cur.pos;
    let first = cur.rgbe()?;
    if let Some(len) = first.new_rle_width() {
        if len != out.len() {
            return Err(DecodeError::CorruptRle {
                offset: start,
                reason: "new-style scanline length disagrees with the resolution line",
            });
        }
        for component in 0..4 {
            read_component_runs(cur, out, component)?;
        }
        Ok(())
    } else {
        read_old_style(cur, first, out)
    }
}

// New-style RLE: each of the four components is a sequence of runs.
// A count byte above 128 repeats the next byte (count - 128) times; a
// count of 1..=128 copies that many literal bytes; zero is invalid.
fn read_component_runs(
    cur: &mut Cursor,
    out: &mut [Rgbe],
    component: usize,
) -> Result<(), DecodeError> {
    let width = out.len();
    let set = |pix: &mut Rgbe, v: u8| match component {
        0 => pix.r = v,
        1 => pix.g = v,
        2 => pix.b = v,
        _ => pix.e = v,
    };
    let mut pos = 0;
    while pos < width {
        let run_offset = cur.pos;
        let code = cur.byte("an RLE run header")?;
        if code > 128 {
            let len = code as usize - 128;
            if pos + len > width {
                return Err(DecodeError::CorruptRle {
                    offset: run_offset,
                    reason: "repeat run overflows the scanline",
                });
            }
            let value = cur.byte("an RLE run value")?;
            for pix in &mut out[pos..pos + len] {
                set(pix, value);
            }
            pos += len;
        } else if code > 0 {
            let len = code as usize;
            if pos + len > width {
                return Err(DecodeError::CorruptRle {
                    offset: run_offset,
                    reason: "literal run overflows the scanline",
                });
            }
            let values = cur.take(len, "RLE literal bytes")?;
            for (pix, &v) in out[pos..pos + len].iter_mut().zip(values) {
                set(pix, v);
            }
            pos += len;
        } else {
            return Err(DecodeError::CorruptRle {
                offset: run_offset,
                reason: "zero-length run",
            });
        }
    }
    Ok(())
}

// Flat scanlines, possibly with old-style (1,1,1,n) repeat markers.
// Consecutive markers scale their count by successive powers of 256.
fn read_old_style(cur: &mut Cursor, first: Rgbe, out: &mut [Rgbe]) -> Result<(), DecodeError> {
    if first.is_old_rle_marker() {
        return Err(DecodeError::CorruptRle {
            offset: cur.pos - 4,
            reason: "scanline begins with a repeat marker",
        });
    }
    out[0] = first;
    let mut pos = 1;
    let mut repeat_shift = 0u32;
    while pos < out.len() {
        let pix_offset = cur.pos;
        let pix = cur.rgbe()?;
        if pix.is_old_rle_marker() {
            if repeat_shift >= usize::BITS {
                return Err(DecodeError::CorruptRle {
                    offset: pix_offset,
                    reason: "repeat marker chain too long",
                });
            }
            let count = (pix.e as usize) << repeat_shift;
            repeat_shift += 8;
            if count == 0 || pos + count > out.len() {
                return Err(DecodeError::CorruptRle {
                    offset: pix_offset,
                    reason: "repeat marker overflows the scanline",
                });
            }
            let prev = out[pos - 1];
            for slot in &mut out[pos..pos + count] {
                *slot = prev;
            }
            pos += count;
        } else {
            repeat_shift = 0;
            out[pos] = pix;
            pos += 1;
        }
    }
    Ok(())
}
