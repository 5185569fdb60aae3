use std::path::PathBuf;

use clap::Parser;

use mshist::cli::{run, RunConfig};
use mshist::{ScaleCount, ToneParams};

/// Tone map wide-dynamic-range images with multi-scale local histograms.
///
/// Inputs are Radiance RGBE (.hdr) or PFM files, recognized by their magic
/// bytes. Outputs are PNG (default) or binary PPM, chosen by the output
/// file extension.
#[derive(Parser, Debug)]
#[command(name = "mshist", version)]
struct Args {
    /// Input WDR images
    #[arg(required = true)]
    inputs: Vec<PathBuf>,

    /// Output file, or directory when tone mapping several inputs
    /// (defaults to `<stem>_tm.png` beside each input)
    #[arg(short, long)]
    output: Option<PathBuf>,

    /// Histogram bin count
    #[arg(long, default_value_t = 5)]
    bins: usize,

    /// Textural-score regularizer; smaller reveals more local detail
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,

    /// Color saturation exponent in (0, 1]
    #[arg(long, default_value_t = 0.6)]
    sat: f64,

    /// Pyramid depth; when omitted, windows halve until both sides are <= 64
    #[arg(long)]
    scales: Option<usize>,

    /// Append one quality-metrics row per output image to this CSV
    #[arg(long, value_name = "CSV")]
    metrics: Option<PathBuf>,

    /// Bin counts for a sweep grid, e.g. 3,5,20
    #[arg(long, value_name = "N,...", value_delimiter = ',')]
    sweep_bins: Vec<usize>,

    /// Epsilon values for a sweep grid, e.g. 0.9,0.1,0.001
    #[arg(long, value_name = "E,...", value_delimiter = ',')]
    sweep_eps: Vec<f64>,

    /// Write per-scale tone images and score maps into this directory
    #[arg(long, value_name = "DIR")]
    dump_scales: Option<PathBuf>,

    /// Worker threads (0 = one per core)
    #[arg(long, default_value_t = 0)]
    threads: usize,

    /// Add the raw gradient-magnitude sum as a metrics column
    #[arg(long)]
    sharpness_sum: bool,
}

fn main() {
    let args = Args::parse();
    let config = RunConfig {
        inputs: args.inputs,
        output: args.output,
        params: ToneParams {
            bins: args.bins,
            epsilon: args.epsilon,
            sat: args.sat,
            scales: args.scales.map_or(ScaleCount::Auto, ScaleCount::Fixed),
            ..ToneParams::default()
        },
        metrics_csv: args.metrics,
        sweep_bins: args.sweep_bins,
        sweep_eps: args.sweep_eps,
        dump_scales: args.dump_scales,
        threads: args.threads,
        emit_sharpness_sum: args.sharpness_sum,
    };
    std::process::exit(run(&config));
}
