use std::path::PathBuf;

use thiserror::Error;

use crate::io::DecodeError;

/// Errors produced by the tone-mapping library.
#[derive(Debug, Error)]
pub enum Error {
    /// An image constructor rejected its inputs (dimensions, plane sizes,
    /// non-finite or negative samples, display values outside [0, 255]).
    #[error("invalid image: {0}")]
    InvalidImage(String),

    /// Parameter validation failed.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// A rectangle query fell outside the table it was issued against.
    #[error("window [{x0},{y0}]..[{x1},{y1}] out of bounds for {width}x{height} table")]
    RectOutOfBounds {
        x0: usize,
        y0: usize,
        x1: usize,
        y1: usize,
        width: usize,
        height: usize,
    },

    /// The two integral tables of a variance query were built over
    /// different dimensions.
    #[error("integral tables disagree on dimensions: {0}x{1} vs {2}x{3}")]
    MismatchedTables(usize, usize, usize, usize),

    /// Histogram bin edges were not strictly ascending or did not cover
    /// the sample range.
    #[error("invalid bin edges: {0}")]
    BadBinEdges(String),

    /// The luminance image is identically zero, so its dynamic range is
    /// undefined and the log transform has no anchor.
    #[error("image luminance is zero everywhere; dynamic range undefined")]
    EmptyDynamicRange,

    /// A metric needed more pixels than the image has.
    #[error("image {width}x{height} too small: {reason}")]
    ImageTooSmall {
        width: usize,
        height: usize,
        reason: &'static str,
    },

    /// A sample handed to an encoder was outside the display range.
    #[error("sample {value} at pixel ({x},{y}) outside display range [0,255]")]
    SampleOutOfRange { value: f64, x: usize, y: usize },

    /// Decoding an input file failed.
    #[error(transparent)]
    Decode(#[from] DecodeError),

    /// PNG encoding failed.
    #[error("png encoding: {0}")]
    PngEncode(String),

    /// Filesystem I/O failed.
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
