//! Multi-scale histogram-synthesis tone mapping for wide-dynamic-range
//! images.
//!
//! The operator builds a per-pixel tone curve from the cumulative histogram
//! of a window centered on each pixel, repeats that at every level of a
//! halving window pyramid, and fuses the per-scale values with weights
//! derived from local variance: flat neighborhoods lean on the large-scale
//! curves for brightness consistency, textured ones on the small-scale
//! curves for contrast and detail. Integral images and integral histograms
//! make every windowed query O(1) in the window area, so the whole operator
//! is a constant number of table lookups per pixel per scale.
//!
//! ```no_run
//! use mshist::{io, tonemap, ToneParams};
//!
//! let bytes = std::fs::read("scene.hdr")?;
//! let (wdr, _) = io::read_wdr(&bytes)?;
//! let result = tonemap(&wdr, &ToneParams::default())?;
//! let png = io::write_display(&result.image, io::OutputFormat::Png)?;
//! std::fs::write("scene.png", png)?;
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod cli;
pub mod error;
pub mod image;
pub mod integral;
pub mod io;
pub mod metrics;
pub mod params;
pub mod tonemap;

pub use error::{Error, Result};
pub use image::{DisplayImage, Domain, LuminanceField, WdrImage, WindowRect};
pub use params::{ScaleCount, ToneParams};
pub use tonemap::{tonemap, TonemapResult};
