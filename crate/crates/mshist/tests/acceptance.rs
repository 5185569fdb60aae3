//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with its measured numbers (run with `--nocapture` to see
//! them). Tolerances are pinned here, not configurable.

mod common;

use std::time::Instant;

use common::*;
use mshist::integral::{window_variance, IntegralHistogram, IntegralImage};
use mshist::metrics::QualityReport;
use mshist::tonemap::{
    extract_luminance, fuse, global_bin_edges, texture_score_at, to_log_domain, tone_value_at,
    tonemap_luminance,
};
use mshist::{cli, io, Domain, LuminanceField, ScaleCount, ToneParams, WindowRect};
use rand::prelude::*;

fn assert_close(actual: f64, expected: f64, tol: f64, what: &str) {
    assert!(
        (actual - expected).abs() <= tol,
        "{what}: {actual} vs {expected} (tol {tol})"
    );
}

/// Windowed bin populations and rectangle sums match naive counting on 50
/// random images with 200 random windows each; counts exact, sums within
/// 1e-9 relative; the whole check under 10 s.
#[test]
fn criterion_integral_oracle_equivalence() {
    let started = Instant::now();
    let mut rng = StdRng::seed_from_u64(0xACCE);
    let mut windows_checked = 0u64;
    for image_index in 0..50 {
        let width = rng.random_range(1..=32);
        let height = rng.random_range(1..=32);
        let field = random_log_field(width, height, 1000 + image_index);
        let (lo, hi) = field.min_max();
        let edges = pinned_edges(lo, hi.max(lo + 1e-9), 5);
        let hist = IntegralHistogram::build(&field, &edges).unwrap();
        let table = IntegralImage::build(&field);
        for _ in 0..200 {
            let rect = random_rect(&mut rng, width, height);
            assert_eq!(
                hist.window_bin_populations(rect).unwrap(),
                naive_window_histogram(&field, &edges, rect),
                "populations diverge on image {image_index} rect {rect:?}"
            );
            let fast = table.rect_sum(rect).unwrap();
            let naive = naive_rect_sum(&field, rect);
            assert!(
                (fast - naive).abs() <= 1e-9 * naive.abs().max(1.0),
                "rect_sum diverges on image {image_index} rect {rect:?}: {fast} vs {naive}"
            );
            windows_checked += 1;
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}, budget 10 s");
    println!(
        "ACCEPTANCE integral oracle equivalence: PASS ({windows_checked} windows, {elapsed:?})"
    );
}

/// Per-pixel tone values from the integral histogram match a from-scratch
/// per-window histogram implementation within 1e-6 on a 16x16 field,
/// n = 5, window 8x8; under 5 s.
#[test]
fn criterion_tone_curve_oracle() {
    let started = Instant::now();
    let field = random_log_field(16, 16, 77);
    let (lo, hi) = field.min_max();
    let edges = global_bin_edges(lo, hi, 5);
    let hist = IntegralHistogram::build(&field, &edges).unwrap();
    let mut worst = 0.0f64;
    for y in 0..16 {
        for x in 0..16 {
            let v = field.get(x, y);
            let fast = tone_value_at(&hist, x, y, (8, 8), v).unwrap();
            let naive = naive_tone_value(&field, &edges, x, y, (8, 8), v);
            worst = worst.max((fast - naive).abs());
            assert!(
                (fast - naive).abs() < 1e-6,
                "pixel ({x},{y}): {fast} vs {naive}"
            );
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}, budget 5 s");
    println!("ACCEPTANCE tone-curve oracle: PASS (worst |Δ| = {worst:.2e}, {elapsed:?})");
}

/// Windowed variance matches the two-pass oracle within 1e-7 absolute on
/// 100 random windows, and a window whose variance equals epsilon scores
/// exactly one half.
#[test]
fn criterion_variance_and_score_oracle() {
    let field = random_log_field(24, 18, 4242);
    let t = IntegralImage::build(&field);
    let t2 = IntegralImage::build_squared(&field);
    let mut rng = StdRng::seed_from_u64(0x5C0);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let rect = random_rect(&mut rng, 24, 18);
        let fast = window_variance(&t, &t2, rect).unwrap();
        let naive = naive_variance(&field, rect);
        worst = worst.max((fast - naive).abs());
        assert!(
            (fast - naive).abs() <= 1e-7,
            "variance diverges on {rect:?}: {fast} vs {naive}"
        );
    }

    // Algebraic checkpoint: Var = epsilon forces a score of exactly 1/2.
    let rect = WindowRect::new(2, 2, 9, 7).unwrap();
    let var = window_variance(&t, &t2, rect).unwrap();
    assert!(var > 0.0);
    let score = texture_score_at(&t, &t2, 5, 4, (8, 6), var).unwrap();
    assert_close(score, 0.5, 1e-12, "score at Var = epsilon");
    println!("ACCEPTANCE variance/score oracle: PASS (worst |Δvar| = {worst:.2e}, score(Var=ε) = {score})");
}

/// Fusion behaves at its fixed points: constant images come out constant
/// through the fallback, a single scale reduces the pipeline to the global
/// operator (1e-6 against the naive global mapping), and the worked
/// example lands on 62.857... to 1e-9.
#[test]
fn criterion_fusion_properties() {
    // Constant image -> constant output via the flat-weight fallback.
    let lum = LuminanceField::new(13, 9, vec![7.5; 117], Domain::Linear).unwrap();
    let out = tonemap_luminance(&lum, &ToneParams::default()).unwrap();
    let first = out.samples()[0];
    assert!(
        out.samples().iter().all(|&v| v == first),
        "constant input must map to a constant"
    );

    // s = 1 equals the naive global histogram mapping.
    let params = ToneParams {
        scales: ScaleCount::Fixed(1),
        ..ToneParams::default()
    };
    for seed in [1u64, 2, 3] {
        let wdr = synthetic_wdr(27, 22, seed);
        let lum = extract_luminance(&wdr);
        let out = tonemap_luminance(&lum, &params).unwrap();
        let log = to_log_domain(&lum, params.log_floor).unwrap();
        let oracle = naive_global_map(&log, params.bins);
        for (i, (&got, &want)) in out.samples().iter().zip(&oracle).enumerate() {
            assert!(
                (got - want).abs() < 1e-6,
                "seed {seed} pixel {i}: {got} vs {want}"
            );
        }
    }

    // Hand-evaluated fusion example.
    let fused = fuse(&[10.0, 100.0, 200.0], &[0.5, 0.5, 0.5], 1e-8);
    assert_close(fused, 62.857142857142854, 1e-9, "fusion example");
    println!("ACCEPTANCE fusion properties: PASS (constant = {first:.3}, example = {fused:.12})");
}

/// Tone curves stay monotone with their top level at exactly 255 over a
/// thousand random windows, and pipeline outputs never leave [0, 255].
#[test]
fn criterion_tone_curve_invariants() {
    use mshist::tonemap::ToneCurve;
    let mut rng = StdRng::seed_from_u64(0xC0FFEE);
    let field = random_log_field(40, 30, 555);
    let (lo, hi) = field.min_max();
    let edges = global_bin_edges(lo, hi, 7);
    let hist = IntegralHistogram::build(&field, &edges).unwrap();
    for _ in 0..1000 {
        let rect = random_rect(&mut rng, 40, 30);
        let pops = hist.window_bin_populations(rect).unwrap();
        let curve = ToneCurve::from_populations(&edges, &pops).unwrap();
        let levels = curve.levels();
        assert!(
            levels.windows(2).all(|w| w[0] <= w[1]),
            "curve not monotone: {levels:?}"
        );
        assert_eq!(*levels.last().unwrap(), 255.0, "top level must be 255");
    }

    for seed in 0..8u64 {
        let wdr = synthetic_wdr(21 + seed as usize, 17, 900 + seed);
        let result = mshist::tonemap(&wdr, &ToneParams::default()).unwrap();
        assert!(result
            .luminance
            .samples()
            .iter()
            .all(|&v| (0.0..=255.0).contains(&v)));
        for plane in result.image.planes() {
            assert!(plane.iter().all(|&v| (0.0..=255.0).contains(&v)));
        }
    }
    println!("ACCEPTANCE tone-curve invariants: PASS (1000 windows, 8 pipeline images)");
}

/// The memorial church radiance map under default parameters reproduces
/// the reference brightness/sharpness/contrast within ±15%, single-worker,
/// in under 5 s.
#[test]
fn criterion_memorial_reference_metrics() {
    let bytes = std::fs::read(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/tests/assets/memorial.hdr"
    ))
    .expect("memorial.hdr test asset");
    let (wdr, clamped) = io::read_wdr(&bytes).unwrap();
    assert_eq!(clamped, 0);
    assert_eq!((wdr.width(), wdr.height()), (512, 768));

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let started = Instant::now();
    let result = pool.install(|| mshist::tonemap(&wdr, &ToneParams::default()).unwrap());
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 5.0,
        "single-worker run took {elapsed:?}, budget 5 s"
    );

    let report = QualityReport::measure(&result.luminance).unwrap();
    let deviation = |actual: f64, reference: f64, what: &str| -> f64 {
        let pct = 100.0 * (actual - reference) / reference;
        assert!(
            pct.abs() <= 15.0,
            "{what}: {actual:.4} vs reference {reference:.4} ({pct:+.1}% exceeds ±15%)"
        );
        pct
    };
    let db = deviation(report.brightness, 115.1672, "brightness");
    let ds = deviation(report.sharpness, 14.8941, "sharpness");
    let dc = deviation(report.contrast, 70.6124, "contrast");
    println!(
        "ACCEPTANCE memorial reference metrics: PASS (brightness {:.2} [{db:+.1}%], sharpness {:.2} [{ds:+.1}%], contrast {:.2} [{dc:+.1}%], {elapsed:?} single-worker)",
        report.brightness, report.sharpness, report.contrast,
    );
}

/// The streaming decoders agree byte-for-byte with naive decoders on
/// hand-assembled RGBE and PFM files, and the memorial's decoded dynamic
/// range lands within 0.5 dB of the 110.8 dB reference.
#[test]
fn criterion_format_roundtrips() {
    // Flat RGBE with an old-style repeat marker.
    let mut flat = b"#?RADIANCE\nFORMAT=32-bit_rle_rgbe\nEXPOSURE=2.0\n\n-Y 2 +X 3\n".to_vec();
    flat.extend_from_slice(&[12, 34, 56, 130]);
    flat.extend_from_slice(&[1, 1, 1, 2]); // repeat the pixel twice
    flat.extend_from_slice(&[200, 150, 100, 127]);
    flat.extend_from_slice(&[0, 0, 0, 0]);
    flat.extend_from_slice(&[255, 255, 255, 128]);
    let fast = io::read_radiance_hdr(&flat).unwrap();
    let (w, h, naive) = naive_decode_rgbe(&flat);
    assert_eq!((fast.width(), fast.height()), (w, h));
    let [r, g, b] = fast.planes();
    for i in 0..w * h {
        assert_eq!([r[i], g[i], b[i]], naive[i], "flat rgbe pixel {i}");
    }

    // New-style RLE RGBE, mixed literal and repeat runs.
    let mut rle = b"#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n-Y 2 +X 9\n".to_vec();
    let mut rng = StdRng::seed_from_u64(99);
    for _ in 0..2 {
        rle.extend_from_slice(&[2, 2, 0, 9]);
        for _ in 0..4 {
            // 4 literals, then a 5-long run.
            rle.push(4);
            for _ in 0..4 {
                rle.push(rng.random());
            }
            rle.extend_from_slice(&[128 + 5, rng.random()]);
        }
    }
    let fast = io::read_radiance_hdr(&rle).unwrap();
    let (w, h, naive) = naive_decode_rgbe(&rle);
    assert_eq!((fast.width(), fast.height()), (w, h));
    let [r, g, b] = fast.planes();
    for i in 0..w * h {
        assert_eq!([r[i], g[i], b[i]], naive[i], "rle rgbe pixel {i}");
    }

    // PFM, color little-endian and grayscale big-endian.
    let wdr = synthetic_wdr(5, 4, 31);
    let pfm_bytes = encode_pfm(&wdr);
    let fast = io::read_pfm(&pfm_bytes).unwrap().image;
    let (w, h, naive) = naive_decode_pfm(&pfm_bytes);
    assert_eq!((fast.width(), fast.height()), (w, h));
    let [r, g, b] = fast.planes();
    for i in 0..w * h {
        assert_eq!([r[i], g[i], b[i]], naive[i], "pfm pixel {i}");
    }

    let mut gray_be = b"Pf\n3 2\n1.0\n".to_vec();
    for v in [0.5f32, 1.5, 2.5, 3.5, 4.5, 5.5] {
        gray_be.extend_from_slice(&v.to_be_bytes());
    }
    let fast = io::read_pfm(&gray_be).unwrap().image;
    let (w, h, naive) = naive_decode_pfm(&gray_be);
    let [r, g, b] = fast.planes();
    for i in 0..w * h {
        assert_eq!([r[i], g[i], b[i]], naive[i], "gray pfm pixel {i}");
    }

    // Memorial dynamic range: 20 log10(Lmax / smallest positive L).
    let bytes = std::fs::read(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/tests/assets/memorial.hdr"
    ))
    .unwrap();
    let (memorial, _) = io::read_wdr(&bytes).unwrap();
    let lum = extract_luminance(&memorial);
    let max = lum.samples().iter().cloned().fold(0.0f64, f64::max);
    let min_positive = lum
        .samples()
        .iter()
        .cloned()
        .filter(|&v| v > 0.0)
        .fold(f64::INFINITY, f64::min);
    let db = 20.0 * (max / min_positive).log10();
    assert!(
        (db - 110.8).abs() <= 0.5,
        "memorial dynamic range {db:.2} dB vs reference 110.8 ± 0.5 dB"
    );
    println!("ACCEPTANCE format round-trips: PASS (memorial range {db:.2} dB)");
}

/// Two full CLI runs with different worker counts produce byte-identical
/// PNGs across a five-image corpus.
#[test]
fn criterion_determinism_across_worker_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let mut inputs = vec![std::path::PathBuf::from(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/tests/assets/memorial.hdr"
    ))];
    for (i, (w, h)) in [(64, 48), (81, 63), (100, 100), (33, 57)].iter().enumerate() {
        let path = tmp.path().join(format!("synthetic_{i}.pfm"));
        std::fs::write(&path, encode_pfm(&synthetic_wdr(*w, *h, 7000 + i as u64))).unwrap();
        inputs.push(path);
    }

    let run_into = |dir: &std::path::Path, threads: usize| {
        let config = cli::RunConfig {
            inputs: inputs.clone(),
            output: Some(dir.to_path_buf()),
            threads,
            ..cli::RunConfig::default()
        };
        std::fs::create_dir_all(dir).unwrap();
        assert_eq!(cli::run(&config), 0, "cli run failed");
    };
    let dir_a = tmp.path().join("workers_1");
    let dir_b = tmp.path().join("workers_4");
    run_into(&dir_a, 1);
    run_into(&dir_b, 4);

    let mut compared = 0;
    for input in &inputs {
        let name = format!("{}.png", input.file_stem().unwrap().to_string_lossy());
        let a = std::fs::read(dir_a.join(&name)).unwrap();
        let b = std::fs::read(dir_b.join(&name)).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, b, "{name} differs between 1-thread and 4-thread runs");
        compared += 1;
    }
    assert_eq!(compared, 5);
    println!("ACCEPTANCE determinism across worker counts: PASS ({compared} images byte-identical)");
}
