//! Subcommand implementations. Every stage reads only the documented file
//! formats of the previous stage and writes its artifacts under `--out`,
//! so stages are independently re-runnable.

use super::args::*;
use crate::error::{Error, Result};
use crate::eval::{self, EvaluationReport, LinearCorrection};
use crate::geom::Rect;
use crate::imageops::Image;
use crate::ingest::{self, rgbv, RgbvReader, RgbvWriter};
use crate::pulse::{self, PulseEstimate, PulseRow};
use crate::roi::{RoiBuilder, ROI_SIZE};
use crate::scli::{self, Scli, Variant};
use crate::synth;
use crate::window;
use rayon::prelude::*;
use serde_json::json;
use std::fs;
use std::path::{Path, PathBuf};

/// Fixed ordering used whenever both variants appear in one run.
const VARIANT_ORDER: [Variant; 2] = [Variant::BEvm, Variant::AEvm];

fn ensure_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Run `op` inside a rayon pool sized by `jobs` (default: all processors).
fn with_pool<T: Send>(jobs: Option<usize>, op: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(op()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Pipeline(format!("worker pool: {e}")))?;
            Ok(pool.install(op))
        }
    }
}

pub fn scli_file_name(window_id: u64, variant: Variant) -> String {
    format!("scli_w{window_id:04}_{variant}.csv")
}

pub fn channels_file_name(window_id: u64, variant: Variant) -> String {
    format!("channels_w{window_id:04}_{variant}.csv")
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

pub fn run_synth(a: &SynthArgs) -> Result<String> {
    let mut spec = synth::SynthSpec {
        width: a.width,
        height: a.height,
        fps: a.fps,
        duration_s: a.duration_s,
        f0: a.f0,
        drift_amplitude: a.drift_amplitude,
        drift_frequency: a.drift_frequency,
        pixel_noise_sd: a.noise_sd,
        jitter_px: a.jitter_px,
        seed: a.seed,
        ..synth::SynthSpec::default()
    };
    if let Some(face) = a.face {
        spec.face_box = face;
    } else if (a.width, a.height) != (96, 96) {
        // Keep the default face proportions when the frame size changes.
        let w = (a.width * 5 / 6).max(8);
        let h = (a.height * 5 / 6).max(8);
        spec.face_box = Rect::new((a.width - w) / 2, (a.height - h) / 2, w, h);
        let ew = (w / 5).max(2);
        let eh = (h / 8).max(2);
        spec.eye_boxes = [
            Rect::new(w / 6, h / 4, ew, eh),
            Rect::new(w - w / 6 - ew, h / 4, ew, eh),
        ];
    }
    if let Some(eye) = a.eye_left {
        spec.eye_boxes[0] = eye;
    }
    if let Some(eye) = a.eye_right {
        spec.eye_boxes[1] = eye;
    }
    if let Some(base) = a.base_color {
        spec.base_color = base;
    }
    if let Some(amp) = a.amplitude {
        spec.modulation_amplitude = amp;
    }

    let manifest = synth::generate(&spec, &a.out)?;
    Ok(json!({
        "command": "synth",
        "out": a.out,
        "pr_bpm": manifest.pr_bpm,
        "f0": manifest.f0,
        "frames": spec.frame_count(),
    })
    .to_string())
}

// ---------------------------------------------------------------------------
// roi
// ---------------------------------------------------------------------------

/// Initial boxes: explicit flags win; otherwise the first annotated face
/// (largest in its record) and the first two-eye record.
fn initial_boxes(
    track: &ingest::AnnotationTrack,
    face_flag: Option<Rect>,
    left_flag: Option<Rect>,
    right_flag: Option<Rect>,
) -> Result<(Rect, [Rect; 2])> {
    let face = face_flag.or_else(|| {
        track.records().iter().find_map(|r| {
            crate::ingest::annotations::largest_face(&r.faces).copied()
        })
    });
    let pair = match (left_flag, right_flag) {
        (Some(l), Some(r)) => Some([l, r]),
        _ => track
            .records()
            .iter()
            .find(|r| r.eyes.len() == 2)
            .map(|r| [r.eyes[0], r.eyes[1]]),
    };
    match (face, pair) {
        (Some(f), Some(e)) => Ok((f, e)),
        _ => Err(Error::InvalidConfig(
            "no initial face/eye boxes: annotations lack them, pass --initial-face and --initial-eye-left/right".into(),
        )),
    }
}

pub fn run_roi(a: &RoiArgs) -> Result<String> {
    ensure_dir(&a.out)?;
    let track = ingest::load_annotations(&a.annotations)?;
    let (init_face, init_eyes) = initial_boxes(
        &track,
        a.initial_face,
        a.initial_eye_left,
        a.initial_eye_right,
    )?;

    let out_video = a.out.join("roi.rgbv");
    let boxes_path = a.out.join("rois.jsonl");
    let mut boxes_log = String::new();
    let mut frames_done = 0u64;
    let fps;

    if a.video.is_dir() {
        let seq = ingest::load_frame_sequence(&a.video, a.fps)?;
        track.validate_bounds(seq.width() as u32, seq.height() as u32)?;
        fps = seq.fps();
        let mut writer = RgbvWriter::create(&out_video, ROI_SIZE as u32, ROI_SIZE as u32, fps)?;
        let mut builder = RoiBuilder::new(&track, init_face, init_eyes);
        for (i, frame) in seq.frames().iter().enumerate() {
            let rf = builder.step(i as u64, frame)?;
            writer.write_frame(&rf.image)?;
            log_roi_boxes(&mut boxes_log, i as u64, &rf.face_box_used, &rf.eye_boxes_used);
            frames_done += 1;
        }
        writer.finish()?;
    } else {
        let mut reader = RgbvReader::open(&a.video)?;
        let sc = *reader.sidecar();
        track.validate_bounds(sc.width, sc.height)?;
        // The sidecar is authoritative for .rgbv input; --fps only covers
        // directory input, which has no rate of its own.
        fps = sc.fps;
        let mut writer = RgbvWriter::create(&out_video, ROI_SIZE as u32, ROI_SIZE as u32, fps)?;
        let mut builder = RoiBuilder::new(&track, init_face, init_eyes);
        let mut i = 0u64;
        while let Some(frame) = reader.read_frame()? {
            let rf = builder.step(i, &frame)?;
            writer.write_frame(&rf.image)?;
            log_roi_boxes(&mut boxes_log, i, &rf.face_box_used, &rf.eye_boxes_used);
            i += 1;
            frames_done += 1;
        }
        writer.finish()?;
    }
    write_text(&boxes_path, &boxes_log)?;

    Ok(json!({
        "command": "roi",
        "out": a.out,
        "frames": frames_done,
        "fps": fps,
        "video": out_video,
    })
    .to_string())
}

fn log_roi_boxes(log: &mut String, frame: u64, face: &Rect, eyes: &[Rect; 2]) {
    let rec = json!({
        "frame": frame,
        "face": [face.x, face.y, face.w, face.h],
        "eyes": eyes.iter().map(|e| [e.x, e.y, e.w, e.h]).collect::<Vec<_>>(),
    });
    log.push_str(&rec.to_string());
    log.push('\n');
}

// ---------------------------------------------------------------------------
// extract
// ---------------------------------------------------------------------------

pub fn run_extract(a: &ExtractArgs) -> Result<String> {
    let scli_dir = a.out.join("scli");
    ensure_dir(&scli_dir)?;
    let (frames, sidecar) = rgbv::load_rgbv(&a.roi)?;
    let fps = sidecar.fps;
    let spec = a.window.to_spec()?;
    let windows = window::segment(frames.len(), fps, &spec)?;
    if windows.is_empty() {
        return Err(Error::Pipeline(format!(
            "input has {} frames, shorter than one {}-second window",
            frames.len(),
            spec.length_s
        )));
    }

    let evm_cfg = a.evm.to_config();
    let filt_cfg = a.evm.to_filter();
    let variants = a.variant.variants();
    let tasks: Vec<(Variant, u64, usize, usize)> = variants
        .iter()
        .flat_map(|&v| {
            windows
                .iter()
                .enumerate()
                .map(move |(id, &(s, e))| (v, id as u64, s, e))
        })
        .collect();

    let frames_ref = &frames;
    let results: Vec<(Scli, scli::RgbSeries)> = with_pool(a.jobs, move || {
        tasks
            .par_iter()
            .map(|&(variant, id, s, e)| {
                scli::extract_scli_detailed(
                    &frames_ref[s..e],
                    fps,
                    id,
                    variant,
                    &evm_cfg,
                    &filt_cfg,
                    scli::OutlierPolicy::SymmetricIqr,
                )
            })
            .collect::<Result<_>>()
    })??;

    let mut written = Vec::new();
    for (s, channels) in &results {
        let scli_path = scli_dir.join(scli_file_name(s.window_id, s.variant));
        write_text(&scli_path, &scli::write_scli_csv(s))?;
        let ch_path = scli_dir.join(channels_file_name(s.window_id, s.variant));
        write_text(&ch_path, &scli::write_channels_csv(s.window_id, s.variant, channels))?;
        written.push(scli_path);
    }

    Ok(json!({
        "command": "extract",
        "out": scli_dir,
        "windows": windows.len(),
        "variants": variants.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "files": written.len(),
    })
    .to_string())
}

// ---------------------------------------------------------------------------
// estimate
// ---------------------------------------------------------------------------

/// Signal CSVs from a single file or a directory (sorted for determinism).
fn scli_inputs(path: &Path) -> Result<Vec<PathBuf>> {
    if path.is_file() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files: Vec<PathBuf> = fs::read_dir(path)
        .map_err(|e| Error::io(path, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("scli_") && n.ends_with(".csv"))
        })
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Error::Pipeline(format!(
            "no scli_*.csv files under {}",
            path.display()
        )));
    }
    Ok(files)
}

fn load_sclis(path: &Path) -> Result<Vec<Scli>> {
    let mut sclis = Vec::new();
    for file in scli_inputs(path)? {
        sclis.push(scli::parse_scli_csv(&read_text(&file)?)?);
    }
    sort_by_variant_then_id(&mut sclis);
    Ok(sclis)
}

fn variant_rank(v: Variant) -> usize {
    VARIANT_ORDER.iter().position(|&x| x == v).unwrap()
}

fn sort_by_variant_then_id(sclis: &mut [Scli]) {
    sclis.sort_by_key(|s| (variant_rank(s.variant), s.window_id));
}

pub fn run_estimate(a: &EstimateArgs) -> Result<String> {
    ensure_dir(&a.out)?;
    let mut sclis = load_sclis(&a.scli)?;
    if let Some(filter) = a.variant {
        let wanted = filter.variants();
        sclis.retain(|s| wanted.contains(&s.variant));
        if sclis.is_empty() {
            return Err(Error::Pipeline("no signals match --variant".into()));
        }
    }

    let peaks = &a.peaks;
    let outcomes: Vec<Result<PulseEstimate>> = with_pool(a.jobs, move || {
        sclis
            .par_iter()
            .map(|s| pulse::estimate_pulse(s, &peaks.to_config(s.variant)))
            .collect()
    })?;

    let mut estimates = Vec::new();
    let mut unusable = 0usize;
    for outcome in outcomes {
        match outcome {
            Ok(e) => estimates.push(e),
            Err(err) => {
                unusable += 1;
                log::warn!("window unusable: {err}");
            }
        }
    }
    if estimates.is_empty() {
        return Err(Error::Pipeline("no window produced a pulse estimate".into()));
    }

    let csv_path = a.out.join("pulse.csv");
    write_text(&csv_path, &pulse::write_pulse_csv(&estimates))?;

    Ok(json!({
        "command": "estimate",
        "out": csv_path,
        "windows": estimates.len(),
        "unusable": unusable,
    })
    .to_string())
}

// ---------------------------------------------------------------------------
// calibrate
// ---------------------------------------------------------------------------

/// Window time span in seconds relative to the reference start.
fn window_span(window_id: u64, flags: &WindowFlags, offset: f64) -> (f64, f64) {
    let t0 = offset + window_id as f64 * flags.step_s;
    (t0, t0 + flags.window_s)
}

pub fn run_calibrate(a: &CalibrateArgs) -> Result<String> {
    ensure_dir(&a.out)?;
    let mut sclis = load_sclis(&a.scli)?;
    if let Some(filter) = a.variant {
        let wanted = filter.variants();
        sclis.retain(|s| wanted.contains(&s.variant));
    }
    let reference = ingest::load_e4_reference(&a.reference)?;

    let mut report = serde_json::Map::new();
    for &variant in &VARIANT_ORDER {
        let mut dataset = Vec::new();
        for s in sclis.iter().filter(|s| s.variant == variant) {
            let (t0, t1) = window_span(s.window_id, &a.window, a.video_offset_s);
            match eval::reference_pr(&reference, t0, t1) {
                Ok(pr) => dataset.push((s.clone(), pr)),
                Err(err) => log::warn!("window {}: {err}", s.window_id),
            }
        }
        if dataset.is_empty() {
            continue;
        }
        let fs = dataset[0].0.fs;
        let base = a.peaks.to_config(variant);
        let width = pulse::calibrate_smoothing(&dataset, &base)?;
        report.insert(
            variant.to_string(),
            json!({
                "smooth_width_s": width,
                "smooth_ms": width * 1000.0,
                "smooth_samples": (width * fs).round() as u64,
                "windows": dataset.len(),
            }),
        );
    }
    if report.is_empty() {
        return Err(Error::Pipeline(
            "no windows with usable reference pulse rates".into(),
        ));
    }

    let path = a.out.join("calibration.json");
    write_text(
        &path,
        &serde_json::to_string_pretty(&serde_json::Value::Object(report.clone()))
            .expect("calibration serialization"),
    )?;

    let mut summary = serde_json::Map::new();
    summary.insert("command".into(), json!("calibrate"));
    summary.insert("out".into(), json!(path));
    summary.insert("widths".into(), serde_json::Value::Object(report));
    Ok(serde_json::Value::Object(summary).to_string())
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

fn correction_for(
    arg: CorrectionArg,
    variant: Variant,
    triples: &[(u64, f64, f64)],
) -> Result<Option<(String, LinearCorrection)>> {
    match arg {
        CorrectionArg::None => Ok(None),
        CorrectionArg::SelfFit => {
            let pairs: Vec<(f64, f64)> = triples.iter().map(|&(_, r, e)| (r, e - r)).collect();
            Ok(Some(("self-fit".into(), eval::fit_linear_correction(&pairs)?)))
        }
        CorrectionArg::PresetPaper => Ok(Some((
            "preset-paper".into(),
            LinearCorrection::preset_paper(variant),
        ))),
        CorrectionArg::PresetFaros => {
            Ok(Some(("preset-faros".into(), LinearCorrection::PRESET_FAROS)))
        }
    }
}

/// Mean that propagates an infinite element.
fn mean_db(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else if values.iter().any(|v| v.is_infinite()) {
        Some(f64::INFINITY)
    } else {
        Some(crate::dsp::mean(values))
    }
}

pub fn run_evaluate(a: &EvaluateArgs) -> Result<String> {
    ensure_dir(&a.out)?;
    let rows = pulse::parse_pulse_csv(&read_text(&a.pulse)?)?;
    let reference = ingest::load_e4_reference(&a.reference)?;
    let filt = crate::scli::FilterConfig::default();

    let mut summaries = Vec::new();
    for &variant in &VARIANT_ORDER {
        let vrows: Vec<&PulseRow> = rows.iter().filter(|r| r.variant == variant).collect();
        if vrows.is_empty() {
            continue;
        }

        let mut triples = Vec::new();
        let mut skipped = 0usize;
        for row in &vrows {
            let (t0, t1) = window_span(row.window_id, &a.window, a.video_offset_s);
            match eval::reference_pr(&reference, t0, t1) {
                Ok(pr_ref) => triples.push((row.window_id, pr_ref, row.pr_bpm)),
                Err(err) => {
                    skipped += 1;
                    log::warn!("window {}: {err}", row.window_id);
                }
            }
        }
        if triples.is_empty() {
            return Err(Error::Pipeline(format!(
                "no {variant} window has a usable reference pulse rate"
            )));
        }

        let correction = correction_for(a.correction, variant, &triples)?;
        let mut report = EvaluationReport::build(variant, &triples, correction)?;

        // Waveform comparisons when the extracted signals are available.
        if let Some(scli_dir) = &a.scli {
            let mut pearsons = Vec::new();
            let mut spearmans = Vec::new();
            let mut snr_refs = Vec::new();
            let mut snr_videos = Vec::new();
            for row in &vrows {
                let (t0, t1) = window_span(row.window_id, &a.window, a.video_offset_s);
                let bvp_slice = reference.bvp.slice_relative(t0, t1);

                let scli_path = scli_dir.join(scli_file_name(row.window_id, variant));
                if scli_path.is_file() && bvp_slice.len() >= 4 {
                    let s = scli::parse_scli_csv(&read_text(&scli_path)?)?;
                    if s.samples.len() >= 4 {
                        let upsampled =
                            eval::resample_cubic(&s.samples, s.fs, reference.bvp.fs)?;
                        let n = upsampled.len().min(bvp_slice.len());
                        if n >= 3 {
                            if let Ok((p, sp)) =
                                eval::correlations(&upsampled[..n], &bvp_slice[..n])
                            {
                                pearsons.push(p);
                                spearmans.push(sp);
                            }
                        }
                    }
                }
                if bvp_slice.len() > 21 {
                    if let Ok(snr) = eval::snr_reference(bvp_slice, reference.bvp.fs, &filt) {
                        snr_refs.push(snr);
                    }
                }
                let ch_path = scli_dir.join(channels_file_name(row.window_id, variant));
                if ch_path.is_file() {
                    let (_, _, channels) = scli::parse_channels_csv(&read_text(&ch_path)?)?;
                    if let Ok(snr) = eval::snr_video(&channels) {
                        snr_videos.push(snr);
                    }
                }
            }
            report.pearson = if pearsons.is_empty() {
                None
            } else {
                Some(crate::dsp::mean(&pearsons))
            };
            report.spearman = if spearmans.is_empty() {
                None
            } else {
                Some(crate::dsp::mean(&spearmans))
            };
            report.snr_reference_db = mean_db(&snr_refs);
            report.snr_video_db = mean_db(&snr_videos);
        }

        let stem = format!("report_{variant}");
        write_text(
            &a.out.join(format!("{stem}.json")),
            &serde_json::to_string_pretty(&report).expect("report serialization"),
        )?;
        write_text(&a.out.join(format!("pairs_{variant}.csv")), &report.pairs_csv())?;
        write_text(&a.out.join(format!("fit_{variant}.csv")), &report.fit_csv())?;

        let mut s = json!({
            "variant": variant.to_string(),
            "windows": report.n_windows,
            "skipped": skipped,
            "mae": report.metrics.mae,
            "rmse": report.metrics.rmse,
        });
        if let Some(c) = &report.correction {
            s["corrected_mae"] = json!(c.metrics.mae);
            s["corrected_rmse"] = json!(c.metrics.rmse);
        }
        summaries.push(s);
    }
    if summaries.is_empty() {
        return Err(Error::Pipeline("pulse csv contains no rows".into()));
    }

    Ok(json!({
        "command": "evaluate",
        "out": a.out,
        "reports": summaries,
    })
    .to_string())
}

// ---------------------------------------------------------------------------
// stats
// ---------------------------------------------------------------------------

fn read_group(path: &Path) -> Result<Vec<f64>> {
    let text = read_text(path)?;
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| {
            Error::parse(
                format!("{}", path.display()),
                format!("non-numeric value {line:?} on line {}", lineno + 1),
            )
        })?;
        values.push(v);
    }
    Ok(values)
}

pub fn run_stats(a: &StatsArgs) -> Result<String> {
    ensure_dir(&a.out)?;
    let group_a = read_group(&a.group_a)?;
    let group_b = read_group(&a.group_b)?;
    let comparison = crate::stats::compare_groups(&group_a, &group_b, a.welch)?;

    let path = a.out.join("comparison.json");
    write_text(
        &path,
        &serde_json::to_string_pretty(&comparison).expect("comparison serialization"),
    )?;

    Ok(json!({
        "command": "stats",
        "out": path,
        "test": comparison.test_name,
        "p_value": comparison.p_value,
        "effect": comparison.effect_name,
        "effect_value": comparison.effect_value,
    })
    .to_string())
}

// ---------------------------------------------------------------------------
// magnify
// ---------------------------------------------------------------------------

pub fn run_magnify(a: &MagnifyArgs) -> Result<String> {
    ensure_dir(&a.out)?;
    let (frames, sidecar) = rgbv::load_rgbv(&a.roi)?;
    let magnified: Vec<Image> = crate::evm::magnify(&frames, sidecar.fps, &a.evm.to_config())?;

    let out_path = a.out.join("magnified.rgbv");
    let mut writer = RgbvWriter::create(&out_path, sidecar.width, sidecar.height, sidecar.fps)?;
    for frame in &magnified {
        writer.write_frame(frame)?;
    }
    writer.finish()?;

    Ok(json!({
        "command": "magnify",
        "out": out_path,
        "frames": magnified.len(),
        "alpha": a.evm.alpha,
    })
    .to_string())
}

// ---------------------------------------------------------------------------
// pipeline
// ---------------------------------------------------------------------------

pub fn run_pipeline(a: &PipelineArgs) -> Result<String> {
    ensure_dir(&a.out)?;
    let roi_out = a.out.join("roi");
    let roi_summary = run_roi(&RoiArgs {
        video: a.video.clone(),
        annotations: a.annotations.clone(),
        fps: a.fps,
        initial_face: a.initial_face,
        initial_eye_left: a.initial_eye_left,
        initial_eye_right: a.initial_eye_right,
        out: roi_out.clone(),
    })?;

    let extract_summary = run_extract(&ExtractArgs {
        roi: roi_out.join("roi.rgbv"),
        variant: a.variant,
        window: WindowFlags {
            window_s: a.window.window_s,
            step_s: a.window.step_s,
        },
        evm: EvmFlags {
            alpha: a.evm.alpha,
            f_low: a.evm.f_low,
            f_high: a.evm.f_high,
            pyramid_steps: a.evm.pyramid_steps,
        },
        jobs: a.jobs,
        out: a.out.clone(),
    })?;
    let scli_dir = a.out.join("scli");

    let mut peaks = PeakFlags {
        smooth_ms: a.peaks.smooth_ms,
        prominence: a.peaks.prominence,
        min_distance_ms: a.peaks.min_distance_ms,
    };
    let mut calibration_summary = None;
    if a.calibrate {
        let summary = run_calibrate(&CalibrateArgs {
            scli: scli_dir.clone(),
            variant: Some(a.variant),
            reference: a.reference.clone(),
            window: WindowFlags {
                window_s: a.window.window_s,
                step_s: a.window.step_s,
            },
            peaks: PeakFlags {
                smooth_ms: a.peaks.smooth_ms,
                prominence: a.peaks.prominence,
                min_distance_ms: a.peaks.min_distance_ms,
            },
            video_offset_s: a.video_offset_s,
            out: a.out.clone(),
        })?;
        // Estimates reuse the calibrated width when both variants share it;
        // with two variants the per-variant widths live in calibration.json
        // and the estimate stage is run per variant below.
        calibration_summary = Some(serde_json::from_str::<serde_json::Value>(&summary).unwrap());
    }

    // When calibration ran and produced per-variant widths, estimate each
    // variant separately with its own width; otherwise one pass suffices.
    let calibrated_widths: Option<serde_json::Value> = if a.calibrate {
        let text = read_text(&a.out.join("calibration.json"))?;
        Some(serde_json::from_str(&text).map_err(|e| Error::parse("calibration.json", e.to_string()))?)
    } else {
        None
    };

    let pulse_csv = a.out.join("pulse.csv");
    if let Some(widths) = &calibrated_widths {
        let mut all = Vec::new();
        for variant in a.variant.variants() {
            let Some(entry) = widths.get(variant.to_string()) else {
                continue;
            };
            let ms = entry["smooth_ms"].as_f64().expect("calibration width");
            let est_out = a.out.join(format!("estimate_{variant}"));
            run_estimate(&EstimateArgs {
                scli: scli_dir.clone(),
                variant: Some(match variant {
                    Variant::BEvm => VariantArg::BEvm,
                    Variant::AEvm => VariantArg::AEvm,
                }),
                peaks: PeakFlags {
                    smooth_ms: Some(ms),
                    prominence: a.peaks.prominence,
                    min_distance_ms: a.peaks.min_distance_ms,
                },
                jobs: a.jobs,
                out: est_out.clone(),
            })?;
            let rows = pulse::parse_pulse_csv(&read_text(&est_out.join("pulse.csv"))?)?;
            all.extend(rows.into_iter().filter(|r| r.variant == variant));
        }
        if all.is_empty() {
            return Err(Error::Pipeline("no window produced a pulse estimate".into()));
        }
        all.sort_by_key(|r| (variant_rank(r.variant), r.window_id));
        let mut text = String::from(pulse::PULSE_CSV_HEADER);
        text.push('\n');
        for r in &all {
            text.push_str(&format!(
                "{},{},{},{},{}\n",
                r.window_id, r.variant, r.pr_bpm, r.n_peaks, r.mean_ibi_s
            ));
        }
        write_text(&pulse_csv, &text)?;
    } else {
        peaks.smooth_ms = a.peaks.smooth_ms;
        run_estimate(&EstimateArgs {
            scli: scli_dir.clone(),
            variant: Some(a.variant),
            peaks,
            jobs: a.jobs,
            out: a.out.clone(),
        })?;
    }

    let evaluate_summary = run_evaluate(&EvaluateArgs {
        pulse: pulse_csv,
        reference: a.reference.clone(),
        scli: Some(scli_dir),
        correction: a.correction,
        window: WindowFlags {
            window_s: a.window.window_s,
            step_s: a.window.step_s,
        },
        video_offset_s: a.video_offset_s,
        out: a.out.clone(),
    })?;

    Ok(json!({
        "command": "pipeline",
        "out": a.out,
        "roi": serde_json::from_str::<serde_json::Value>(&roi_summary).unwrap(),
        "extract": serde_json::from_str::<serde_json::Value>(&extract_summary).unwrap(),
        "calibration": calibration_summary,
        "evaluate": serde_json::from_str::<serde_json::Value>(&evaluate_summary).unwrap(),
    })
    .to_string())
}
