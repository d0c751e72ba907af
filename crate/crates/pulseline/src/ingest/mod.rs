//! Loading of frame sequences, detection-box annotations, and wearable
//! reference recordings into validated in-memory structures.
//!
//! Everything here is pure parsing and validation: loaders are reentrant,
//! safe to call concurrently on distinct paths, and the returned structures
//! are immutable after load.

pub mod annotations;
pub mod e4;
pub mod pngio;
pub mod ppm;
pub mod rgbv;

pub use annotations::{AnnotationRecord, AnnotationTrack};
pub use e4::{IbiSeries, ReferenceRecord, SampledSeries};
pub use rgbv::{RgbvReader, RgbvWriter, Sidecar};

use crate::error::{Error, Result};
use crate::imageops::Image;
use std::fs;
use std::path::Path;

/// Frame rate assumed when neither a sidecar nor an override provides one.
pub const DEFAULT_FPS: f64 = 30.0;

/// Decoded RGB frames with shared dimensions and a frame rate.
#[derive(Debug, Clone)]
pub struct FrameSequence {
    frames: Vec<Image>,
    width: usize,
    height: usize,
    fps: f64,
}

impl FrameSequence {
    /// Build from frames, validating that all share one size.
    pub fn new(frames: Vec<Image>, fps: f64) -> Result<Self> {
        if frames.is_empty() {
            return Err(Error::EmptySequence("<memory>".into()));
        }
        if !(fps > 0.0) {
            return Err(Error::InvalidConfig(format!("fps must be positive, got {fps}")));
        }
        let (width, height) = (frames[0].width(), frames[0].height());
        for (index, f) in frames.iter().enumerate() {
            if f.width() != width || f.height() != height {
                return Err(Error::InconsistentDimensions {
                    index,
                    got_w: f.width(),
                    got_h: f.height(),
                    want_w: width,
                    want_h: height,
                });
            }
        }
        Ok(FrameSequence {
            frames,
            width,
            height,
            fps,
        })
    }

    pub fn frames(&self) -> &[Image] {
        &self.frames
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn fps(&self) -> f64 {
        self.fps
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.frames.len() as f64 / self.fps
    }
}

/// Load a frame sequence from either a `.rgbv` raw container (with its JSON
/// sidecar) or a directory of lexicographically ordered PPM/PNG files.
///
/// The frame rate comes from the sidecar when present, else from
/// `fps_override`, else 30.
pub fn load_frame_sequence(path: &Path, fps_override: Option<f64>) -> Result<FrameSequence> {
    if path.is_dir() {
        load_image_directory(path, fps_override)
    } else {
        let (frames, sidecar) = rgbv::load_rgbv(path)?;
        FrameSequence::new(frames, sidecar.fps)
    }
}

fn load_image_directory(dir: &Path, fps_override: Option<f64>) -> Result<FrameSequence> {
    let mut names: Vec<_> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            matches!(
                p.extension().and_then(|e| e.to_str()).map(|e| e.to_ascii_lowercase()),
                Some(ref ext) if ext == "ppm" || ext == "png"
            )
        })
        .collect();
    names.sort();
    if names.is_empty() {
        return Err(Error::EmptySequence(dir.to_path_buf()));
    }

    let mut frames = Vec::with_capacity(names.len());
    for p in &names {
        let bytes = fs::read(p).map_err(|e| Error::io(p, e))?;
        let ext = p
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| e.to_ascii_lowercase())
            .unwrap_or_default();
        let img = if ext == "ppm" {
            ppm::decode(&bytes)?
        } else {
            pngio::decode(&bytes)?
        };
        frames.push(img);
    }
    FrameSequence::new(frames, fps_override.unwrap_or(DEFAULT_FPS))
}

/// Load face/eye detection boxes from a JSON-Lines annotation file.
pub fn load_annotations(path: &Path) -> Result<AnnotationTrack> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    annotations::parse(&text)
}

/// Load an Empatica-E4-style reference directory (`BVP.csv` required,
/// `HR.csv` and `IBI.csv` optional).
pub fn load_e4_reference(dir: &Path) -> Result<ReferenceRecord> {
    e4::load_reference_dir(dir)
}
