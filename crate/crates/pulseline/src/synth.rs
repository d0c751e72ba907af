//! Synthetic frame sequences with a known embedded pulse, plus matching
//! annotation and reference files. These corpora are the ground-truth
//! oracle for the end-to-end tests: every generated artifact encodes the
//! same pulse frequency.

use crate::error::{Error, Result};
use crate::geom::Rect;
use crate::imageops::Image;
use crate::ingest::annotations::{AnnotationRecord, AnnotationTrack};
use crate::ingest::e4::{format_ibi_csv, format_sampled_csv, IbiSeries, SampledSeries};
use crate::ingest::rgbv::RgbvWriter;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fs;
use std::path::Path;

/// Start timestamp written into the reference CSVs.
pub const SYNTH_EPOCH: f64 = 1_600_000_000.0;

/// Everything that defines one synthetic corpus.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthSpec {
    pub width: u32,
    pub height: u32,
    pub fps: f64,
    pub duration_s: f64,
    /// Pulse frequency, Hz; ground-truth rate is `60 * f0` bpm.
    pub f0: f64,
    /// Per-channel pulse amplitude in pixel units.
    pub modulation_amplitude: [f64; 3],
    pub base_color: [f64; 3],
    pub face_box: Rect,
    /// Face-local; these regions carry no pulse modulation.
    pub eye_boxes: [Rect; 2],
    /// Global illumination drift added to every pixel.
    pub drift_amplitude: f64,
    pub drift_frequency: f64,
    /// Per-pixel Gaussian noise, pixel units.
    pub pixel_noise_sd: f64,
    /// Maximum per-frame translation of the annotation boxes.
    pub jitter_px: u32,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            width: 96,
            height: 96,
            fps: 30.0,
            duration_s: 40.0,
            f0: 1.2,
            modulation_amplitude: [3.0, 5.0, 2.0],
            base_color: [120.0, 110.0, 100.0],
            face_box: Rect::new(8, 8, 80, 80),
            eye_boxes: [Rect::new(14, 18, 16, 10), Rect::new(50, 18, 16, 10)],
            drift_amplitude: 0.0,
            drift_frequency: 0.05,
            pixel_noise_sd: 0.0,
            jitter_px: 0,
            seed: 0,
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::InvalidConfig("zero frame dimensions".into()));
        }
        if !(self.fps > 0.0 && self.duration_s > 0.0) {
            return Err(Error::InvalidConfig("fps and duration must be positive".into()));
        }
        if !(0.4..=3.0).contains(&self.f0) {
            return Err(Error::InvalidConfig(format!(
                "pulse frequency {} Hz outside the in-band range [0.4, 3.0]",
                self.f0
            )));
        }
        if self.drift_amplitude != 0.0 && !(self.drift_frequency < 0.2) {
            return Err(Error::InvalidConfig(
                "lighting drift must stay below 0.2 Hz".into(),
            ));
        }
        if !self.face_box.fits_within(self.width, self.height) {
            return Err(Error::InvalidConfig("face box outside the frame".into()));
        }
        for eye in &self.eye_boxes {
            if !self.face_box.contains_local(eye) {
                return Err(Error::InvalidConfig("eye box outside the face box".into()));
            }
        }
        Ok(())
    }

    pub fn frame_count(&self) -> usize {
        (self.duration_s * self.fps).round() as usize
    }

    pub fn pr_bpm(&self) -> f64 {
        60.0 * self.f0
    }

    /// Eye boxes in absolute frame coordinates.
    fn absolute_eyes(&self) -> [Rect; 2] {
        self.eye_boxes.map(|e| {
            Rect::new(
                self.face_box.x + e.x,
                self.face_box.y + e.y,
                e.w,
                e.h,
            )
        })
    }
}

/// Paths and ground truth of a generated corpus.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub pr_bpm: f64,
    pub f0: f64,
    pub video: String,
    pub annotations: String,
    pub reference_dir: String,
    pub spec: SynthSpec,
}

/// Render one frame without noise; the deterministic part of the scene.
fn render_clean_frame(spec: &SynthSpec, frame_index: usize) -> Image {
    let t = frame_index as f64 / spec.fps;
    let pulse = (2.0 * PI * spec.f0 * t).sin();
    let drift = spec.drift_amplitude * (2.0 * PI * spec.drift_frequency * t).sin();
    let eyes = spec.absolute_eyes();

    let mut img = Image::new(spec.width as usize, spec.height as usize);
    for y in 0..spec.height as usize {
        for x in 0..spec.width as usize {
            let in_face = (x as u32) >= spec.face_box.x
                && (x as u64) < spec.face_box.x1()
                && (y as u32) >= spec.face_box.y
                && (y as u64) < spec.face_box.y1();
            let in_eye = eyes.iter().any(|e| {
                (x as u32) >= e.x && (x as u64) < e.x1() && (y as u32) >= e.y && (y as u64) < e.y1()
            });
            for c in 0..3 {
                let mut v = spec.base_color[c] + drift;
                if in_face && !in_eye {
                    v += spec.modulation_amplitude[c] * pulse;
                }
                img.set(x, y, c, v);
            }
        }
    }
    img
}

fn jitter_rect(rect: &Rect, jitter: u32, bound_w: u32, bound_h: u32, rng: &mut ChaCha20Rng) -> Rect {
    if jitter == 0 {
        return *rect;
    }
    let j = jitter as i64;
    let dx = rng.gen_range(-j..=j);
    let dy = rng.gen_range(-j..=j);
    let max_x = bound_w.saturating_sub(rect.w) as i64;
    let max_y = bound_h.saturating_sub(rect.h) as i64;
    Rect::new(
        (rect.x as i64 + dx).clamp(0, max_x) as u32,
        (rect.y as i64 + dy).clamp(0, max_y) as u32,
        rect.w,
        rect.h,
    )
}

/// Generate a complete corpus under `out_dir`: the raw video plus sidecar,
/// per-frame annotations, an E4-style reference directory, and a manifest
/// with the ground truth.
pub fn generate(spec: &SynthSpec, out_dir: &Path) -> Result<Manifest> {
    spec.validate()?;
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    // Independent streams so box jitter and pixel noise stay decoupled.
    let mut rng_boxes = ChaCha20Rng::seed_from_u64(spec.seed);
    let mut rng_noise = ChaCha20Rng::seed_from_u64(spec.seed ^ 0x9E37_79B9_7F4A_7C15);
    let noise = if spec.pixel_noise_sd > 0.0 {
        Some(Normal::new(0.0, spec.pixel_noise_sd).expect("valid noise sd"))
    } else {
        None
    };

    let n_frames = spec.frame_count();

    // Video frames, streamed to disk.
    let video_path = out_dir.join("video.rgbv");
    let mut writer = RgbvWriter::create(&video_path, spec.width, spec.height, spec.fps)?;
    for i in 0..n_frames {
        let mut frame = render_clean_frame(spec, i);
        if let Some(dist) = &noise {
            for v in frame.data_mut() {
                *v += dist.sample(&mut rng_noise);
            }
        }
        writer.write_frame(&frame)?;
    }
    writer.finish()?;

    // Annotations: the true boxes, jittered per frame.
    let mut records = Vec::with_capacity(n_frames);
    for i in 0..n_frames {
        let face = jitter_rect(&spec.face_box, spec.jitter_px, spec.width, spec.height, &mut rng_boxes);
        let eyes = spec
            .eye_boxes
            .map(|e| jitter_rect(&e, spec.jitter_px, face.w, face.h, &mut rng_boxes));
        records.push(AnnotationRecord {
            frame: i as u64,
            faces: vec![face],
            eyes: eyes.to_vec(),
        });
    }
    let track = AnnotationTrack::from_records(records)?;
    let ann_path = out_dir.join("annotations.jsonl");
    fs::write(&ann_path, track.to_jsonl()).map_err(|e| Error::io(&ann_path, e))?;

    // Reference recordings: the same pulse, rendered three ways.
    let e4_dir = out_dir.join("e4");
    fs::create_dir_all(&e4_dir).map_err(|e| Error::io(&e4_dir, e))?;

    let bvp_fs = 64.0;
    let bvp = SampledSeries {
        start_ts: SYNTH_EPOCH,
        fs: bvp_fs,
        samples: (0..(spec.duration_s * bvp_fs).round() as usize)
            .map(|k| (2.0 * PI * spec.f0 * k as f64 / bvp_fs).sin())
            .collect(),
    };
    let hr = SampledSeries {
        start_ts: SYNTH_EPOCH,
        fs: 1.0,
        samples: vec![spec.pr_bpm(); (spec.duration_s.floor() as usize).max(1)],
    };
    let period = 1.0 / spec.f0;
    let mut entries = Vec::new();
    let mut beat = period;
    while beat <= spec.duration_s {
        entries.push((beat, period));
        beat += period;
    }
    let ibi = IbiSeries {
        start_ts: SYNTH_EPOCH,
        entries,
    };
    write_text(&e4_dir.join("BVP.csv"), &format_sampled_csv(&bvp))?;
    write_text(&e4_dir.join("HR.csv"), &format_sampled_csv(&hr))?;
    write_text(&e4_dir.join("IBI.csv"), &format_ibi_csv(&ibi))?;

    let manifest = Manifest {
        pr_bpm: spec.pr_bpm(),
        f0: spec.f0,
        video: "video.rgbv".to_string(),
        annotations: "annotations.jsonl".to_string(),
        reference_dir: "e4".to_string(),
        spec: spec.clone(),
    };
    let manifest_path = out_dir.join("manifest.json");
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serialization");
    write_text(&manifest_path, &json)?;
    Ok(manifest)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
