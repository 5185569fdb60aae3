//! The batch front end: decode, tone map, encode, measure, sweep.
//!
//! [`run`] is the whole program behind the `mshist` binary, kept in the
//! library so integration tests can drive it directly. Files are processed
//! one at a time — a failure diagnoses and skips that file only — while the
//! per-pixel work inside each image fans out across the worker pool. Pixel
//! results never depend on the worker count, so identical invocations
//! produce byte-identical outputs.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::image::DisplayImage;
use crate::io::{read_wdr, write_display, OutputFormat};
use crate::metrics::{sharpness_total, QualityReport};
use crate::params::{ScaleCount, ToneParams};
use crate::tonemap::{scale_diagnostics, tonemap};

/// Everything one invocation does.
#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    /// WDR input files (Radiance RGBE or PFM, detected by magic bytes).
    pub inputs: Vec<PathBuf>,
    /// Output file (single input) or directory. `None` writes
    /// `<stem>_tm.png` beside each input.
    pub output: Option<PathBuf>,
    pub params: ToneParams,
    /// Append one metrics row per produced image to this CSV.
    pub metrics_csv: Option<PathBuf>,
    /// Bin counts for a sweep grid; empty means the configured value only.
    pub sweep_bins: Vec<usize>,
    /// Epsilon values for a sweep grid; empty means the configured value only.
    pub sweep_eps: Vec<f64>,
    /// Write per-scale tone images and score maps into this directory.
    pub dump_scales: Option<PathBuf>,
    /// Worker threads; 0 uses one per core.
    pub threads: usize,
    /// Add a raw gradient-magnitude-sum column to metrics rows.
    pub emit_sharpness_sum: bool,
}

/// Runs the batch. Returns the process exit code: 0 on full success, 1 if
/// any file failed, 2 on a usage error.
pub fn run(config: &RunConfig) -> i32 {
    if let Err(msg) = check_usage(config) {
        eprintln!("mshist: {msg}");
        return 2;
    }
    if config.threads > 0 {
        let pool = match rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build()
        {
            Ok(pool) => pool,
            Err(e) => {
                eprintln!("mshist: cannot build a {}-thread pool: {e}", config.threads);
                return 2;
            }
        };
        pool.install(|| run_batch(config))
    } else {
        run_batch(config)
    }
}

fn run_batch(config: &RunConfig) -> i32 {
    let mut failures = 0usize;
    for input in &config.inputs {
        if let Err(err) = process_file(config, input) {
            // File errors already name their path.
            match err {
                Error::File { .. } => eprintln!("mshist: {err}"),
                _ => eprintln!("mshist: {}: {err}", input.display()),
            }
            failures += 1;
        }
    }
    if failures > 0 { 1 } else { 0 }
}

fn check_usage(config: &RunConfig) -> std::result::Result<(), String> {
    if config.inputs.is_empty() {
        return Err("no input files".into());
    }
    // Catch knob errors that do not depend on image size up front; a huge
    // dummy geometry admits any plausible explicit scale count.
    config
        .params
        .validate(1 << 20, 1 << 20)
        .map_err(|e| e.to_string())?;
    for &bins in &config.sweep_bins {
        if bins < 1 {
            return Err(format!("sweep bin count {bins} must be at least 1"));
        }
    }
    for &eps in &config.sweep_eps {
        if eps <= 0.0 || !eps.is_finite() {
            return Err(format!("sweep epsilon {eps} must be positive and finite"));
        }
    }
    Ok(())
}

fn process_file(config: &RunConfig, input: &Path) -> Result<()> {
    let bytes = fs::read(input).map_err(|source| Error::File {
        path: input.to_path_buf(),
        source,
    })?;
    let (wdr, clamped) = read_wdr(&bytes)?;
    if clamped > 0 {
        eprintln!(
            "mshist: {}: warning: clamped {clamped} negative samples to zero",
            input.display()
        );
    }
    let params = config.params.validate(wdr.width(), wdr.height())?;

    let out_path = main_output_path(config, input);
    let format = OutputFormat::from_extension(out_path.extension().and_then(|e| e.to_str()));

    if config.sweep_bins.is_empty() && config.sweep_eps.is_empty() {
        let result = tonemap(&wdr, &params)?;
        write_image(&out_path, &result.image, format)?;
        if let Some(csv) = &config.metrics_csv {
            append_metrics(config, csv, &out_path, &params, &result)?;
        }
    } else {
        // Fig.-7-style grid: one output per (bins, epsilon) pair.
        let stem = file_stem(input);
        let dir = sweep_dir(config, input);
        fs::create_dir_all(&dir).map_err(|source| Error::File {
            path: dir.clone(),
            source,
        })?;
        let bins_list = non_empty_or(&config.sweep_bins, params.bins);
        let eps_list = non_empty_or(&config.sweep_eps, params.epsilon);
        for &bins in &bins_list {
            for &epsilon in &eps_list {
                let swept = ToneParams {
                    bins,
                    epsilon,
                    ..params
                }
                .validate(wdr.width(), wdr.height())?;
                let result = tonemap(&wdr, &swept)?;
                let name = format!("{stem}_n{bins}_eps{epsilon}.{}", format.extension());
                let path = dir.join(name);
                write_image(&path, &result.image, format)?;
                if let Some(csv) = &config.metrics_csv {
                    append_metrics(config, csv, &path, &swept, &result)?;
                }
            }
        }
    }

    if let Some(dump_dir) = &config.dump_scales {
        dump_scale_maps(dump_dir, input, &wdr, &params)?;
    }
    Ok(())
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into())
}

// The output flag names a directory rather than a file when several images
// are being produced (batch or sweep), when it already is one, or when it
// is spelled with a trailing separator.
fn output_is_dir(config: &RunConfig, target: &Path) -> bool {
    config.inputs.len() > 1
        || !config.sweep_bins.is_empty()
        || !config.sweep_eps.is_empty()
        || target.is_dir()
        || target
            .to_string_lossy()
            .ends_with(std::path::MAIN_SEPARATOR)
}

fn main_output_path(config: &RunConfig, input: &Path) -> PathBuf {
    let stem = file_stem(input);
    match &config.output {
        None => input.with_file_name(format!("{stem}_tm.png")),
        Some(target) if output_is_dir(config, target) => target.join(format!("{stem}.png")),
        Some(target) => target.clone(),
    }
}

fn sweep_dir(config: &RunConfig, input: &Path) -> PathBuf {
    let parent_of = |path: &Path| {
        path.parent()
            .filter(|p| !p.as_os_str().is_empty())
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."))
    };
    match &config.output {
        Some(target) if output_is_dir(config, target) => target.clone(),
        Some(target) => parent_of(target),
        None => parent_of(input),
    }
}

fn non_empty_or<T: Copy>(list: &[T], fallback: T) -> Vec<T> {
    if list.is_empty() {
        vec![fallback]
    } else {
        list.to_vec()
    }
}

fn write_image(path: &Path, image: &DisplayImage, format: OutputFormat) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|source| Error::File {
            path: parent.to_path_buf(),
            source,
        })?;
    }
    let bytes = write_display(image, format)?;
    fs::write(path, bytes).map_err(|source| Error::File {
        path: path.to_path_buf(),
        source,
    })
}

fn dump_scale_maps(
    dir: &Path,
    input: &Path,
    wdr: &crate::image::WdrImage,
    params: &ToneParams,
) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::File {
        path: dir.to_path_buf(),
        source,
    })?;
    let stem = file_stem(input);
    let lum = crate::tonemap::extract_luminance(wdr);
    for (i, diag) in scale_diagnostics(&lum, params)?.iter().enumerate() {
        let tone = DisplayImage::from_luminance(&diag.tone)?;
        let score = DisplayImage::from_luminance(&diag.score)?;
        let scale = i + 1;
        write_image(
            &dir.join(format!("{stem}_scale{scale}_tone.png")),
            &tone,
            OutputFormat::Png,
        )?;
        write_image(
            &dir.join(format!("{stem}_scale{scale}_score.png")),
            &score,
            OutputFormat::Png,
        )?;
    }
    Ok(())
}

fn append_metrics(
    config: &RunConfig,
    csv: &Path,
    image_path: &Path,
    params: &ToneParams,
    result: &crate::tonemap::TonemapResult,
) -> Result<()> {
    let report = QualityReport::measure(&result.luminance)?;
    let scales = match params.scales {
        ScaleCount::Fixed(s) => s,
        ScaleCount::Auto => 0,
    };
    let mut row = format!(
        "{},{},{},{},{},{},{},{}",
        image_path.display(),
        result.luminance.width(),
        result.luminance.height(),
        params.bins,
        params.epsilon,
        scales,
        params.sat,
        report.to_csv_row(),
    );
    if config.emit_sharpness_sum {
        row.push_str(&format!(",{:.6}", sharpness_total(&result.luminance)?));
    }

    let file_error = |source: std::io::Error| Error::File {
        path: csv.to_path_buf(),
        source,
    };
    let needs_header = fs::metadata(csv).map(|m| m.len() == 0).unwrap_or(true);
    let mut file = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(csv)
        .map_err(file_error)?;
    if needs_header {
        let mut header = format!("file,width,height,bins,epsilon,scales,sat,{}", QualityReport::CSV_HEADER);
        if config.emit_sharpness_sum {
            header.push_str(",sharpness_sum");
        }
        writeln!(file, "{header}").map_err(file_error)?;
    }
    writeln!(file, "{row}").map_err(file_error)?;
    Ok(())
}
