//! Face selection, eye masking, cropping, and resizing to the fixed
//! 104x104 analysis resolution.

use crate::error::{Error, Result};
use crate::geom::Rect;
use crate::imageops::{bilinear_resize, Image};
use crate::ingest::annotations::{largest_face, AnnotationTrack};
use crate::ingest::FrameSequence;

/// Side length of the masked face crop.
pub const ROI_SIZE: usize = 104;

/// One masked, cropped, resized frame plus the boxes that produced it.
#[derive(Debug, Clone)]
pub struct RoiFrame {
    /// 104x104 pixels; eye regions are exactly zero in all channels.
    pub image: Image,
    /// Face box in source-frame coordinates.
    pub face_box_used: Rect,
    /// Eye boxes in face-local coordinates (detected, mirrored, or carried
    /// forward).
    pub eye_boxes_used: [Rect; 2],
}

impl AsRef<Image> for RoiFrame {
    fn as_ref(&self) -> &Image {
        &self.image
    }
}

/// A masked face video at a uniform frame rate.
#[derive(Debug, Clone)]
pub struct RoiVideo {
    pub frames: Vec<RoiFrame>,
    pub fps: f64,
}

impl RoiVideo {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn images(&self) -> Vec<&Image> {
        self.frames.iter().map(|f| &f.image).collect()
    }
}

/// Pick the candidate with the largest area; an empty candidate list falls
/// back to the previous box. Equal areas keep the earliest candidate.
pub fn select_face_box(candidates: &[Rect], previous: &Rect) -> Rect {
    *largest_face(candidates).unwrap_or(previous)
}

/// Resolve the eye pair for one frame from 0-2 detections.
///
/// Two detections pass through unchanged. A single detection is mirrored
/// across the face's vertical midline (`x = face_width / 2`) with the same
/// size; a mirrored box that would leave `[0, face_width)` is clamped to
/// the boundary. No detections keep the previous pair.
pub fn resolve_eyes(detected: &[Rect], previous_pair: &[Rect; 2], face_width: u32) -> [Rect; 2] {
    assert!(face_width > 0, "face width must be positive");
    match detected {
        [a, b] => [*a, *b],
        [one] => [*one, mirror_eye(one, face_width)],
        [] => *previous_pair,
        _ => unreachable!("annotation parsing caps eyes at two"),
    }
}

fn mirror_eye(eye: &Rect, face_width: u32) -> Rect {
    // Reflect the center across face_width / 2: x' = W - x - w, clamped
    // into the face.
    let mirrored_x = face_width as i64 - eye.x as i64 - eye.w as i64;
    let max_x = face_width.saturating_sub(eye.w) as i64;
    let x = mirrored_x.clamp(0, max_x) as u32;
    Rect::new(x, eye.y, eye.w.min(face_width), eye.h)
}

/// Map a face-local rectangle onto the resized output grid, covering every
/// output pixel whose source footprint touches the rectangle.
pub fn scale_eye_box(eye: &Rect, face_w: u32, face_h: u32) -> Rect {
    let sx = ROI_SIZE as f64 / face_w as f64;
    let sy = ROI_SIZE as f64 / face_h as f64;
    let x0 = ((eye.x as f64 * sx).floor() as u32).min(ROI_SIZE as u32);
    let y0 = ((eye.y as f64 * sy).floor() as u32).min(ROI_SIZE as u32);
    let x1 = (((eye.x + eye.w) as f64 * sx).ceil() as u32).min(ROI_SIZE as u32);
    let y1 = (((eye.y + eye.h) as f64 * sy).ceil() as u32).min(ROI_SIZE as u32);
    Rect::new(x0, y0, x1.saturating_sub(x0).max(1), y1.saturating_sub(y0).max(1))
}

/// Zero everything outside the face box, crop to it, zero the eye regions,
/// resize to 104x104, and re-assert the eye zeros on the resized grid so
/// interpolation cannot leak nonzero values into the masked regions.
pub fn mask_crop_resize(frame: &Image, face_box: &Rect, eyes: &[Rect; 2]) -> Result<RoiFrame> {
    if face_box.w < 2 || face_box.h < 2 {
        return Err(Error::InvalidBox {
            what: "degenerate face box".into(),
            x: face_box.x as i64,
            y: face_box.y as i64,
            w: face_box.w as i64,
            h: face_box.h as i64,
        });
    }
    if !face_box.fits_within(frame.width() as u32, frame.height() as u32) {
        return Err(Error::InvalidBox {
            what: format!("face box outside {}x{} frame", frame.width(), frame.height()),
            x: face_box.x as i64,
            y: face_box.y as i64,
            w: face_box.w as i64,
            h: face_box.h as i64,
        });
    }

    // Cropping to the face box subsumes zeroing the non-face pixels.
    let mut crop = frame.crop(face_box);
    for eye in eyes {
        crop.zero_rect(eye);
    }
    let mut resized = bilinear_resize(&crop, ROI_SIZE, ROI_SIZE);
    for eye in eyes {
        resized.zero_rect(&scale_eye_box(eye, face_box.w, face_box.h));
    }
    Ok(RoiFrame {
        image: resized,
        face_box_used: *face_box,
        eye_boxes_used: *eyes,
    })
}

/// Per-frame ROI extraction that threads the previous face box and eye
/// pair through the sequence, so frames without detections fall back to
/// the most recent state.
pub struct RoiBuilder<'a> {
    track: &'a AnnotationTrack,
    face: Rect,
    eyes: [Rect; 2],
}

impl<'a> RoiBuilder<'a> {
    pub fn new(track: &'a AnnotationTrack, initial_face: Rect, initial_eyes: [Rect; 2]) -> Self {
        RoiBuilder {
            track,
            face: initial_face,
            eyes: initial_eyes,
        }
    }

    /// Process one frame, updating the carried state.
    pub fn step(&mut self, frame_index: u64, frame: &Image) -> Result<RoiFrame> {
        let record = self.track.get(frame_index);
        let faces: &[Rect] = record.map_or(&[], |r| r.faces.as_slice());
        let eyes_detected: &[Rect] = record.map_or(&[], |r| r.eyes.as_slice());

        self.face = select_face_box(faces, &self.face);
        self.eyes = resolve_eyes(eyes_detected, &self.eyes, self.face.w);
        mask_crop_resize(frame, &self.face, &self.eyes)
    }
}

/// Apply the whole chain to every frame of a sequence.
pub fn build_roi_video(
    seq: &FrameSequence,
    track: &AnnotationTrack,
    initial_face: Rect,
    initial_eyes: [Rect; 2],
) -> Result<RoiVideo> {
    track.validate_bounds(seq.width() as u32, seq.height() as u32)?;
    let mut builder = RoiBuilder::new(track, initial_face, initial_eyes);
    let mut frames = Vec::with_capacity(seq.len());
    for (i, frame) in seq.frames().iter().enumerate() {
        frames.push(builder.step(i as u64, frame)?);
    }
    Ok(RoiVideo {
        frames,
        fps: seq.fps(),
    })
}
