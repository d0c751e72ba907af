//! JSON-Lines face/eye detection annotations.
//!
//! One record per annotated frame:
//! `{"frame": 0, "faces": [[x,y,w,h], ...], "eyes": [[x,y,w,h], ...]}`
//! with eye boxes expressed in face-local coordinates. Frames with no
//! record mean "nothing detected"; downstream fallback rules apply.

use crate::error::{Error, Result};
use crate::geom::Rect;
use serde::{Deserialize, Serialize};

#[derive(Debug, Serialize, Deserialize)]
struct RawRecord {
    frame: u64,
    #[serde(default)]
    faces: Vec<[i64; 4]>,
    #[serde(default)]
    eyes: Vec<[i64; 4]>,
}

/// Detections for one frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationRecord {
    pub frame: u64,
    pub faces: Vec<Rect>,
    /// Face-local eye boxes; at most two.
    pub eyes: Vec<Rect>,
}

/// Per-frame detections with strictly increasing frame indices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AnnotationTrack {
    records: Vec<AnnotationRecord>,
}

impl AnnotationTrack {
    /// Build from in-memory records, enforcing the same invariants as the
    /// parser (ordering, at most two eyes, eyes inside the largest face).
    pub fn from_records(records: Vec<AnnotationRecord>) -> Result<Self> {
        for (i, rec) in records.iter().enumerate() {
            if i > 0 && rec.frame <= records[i - 1].frame {
                return Err(Error::NonIncreasingFrame(rec.frame));
            }
            if rec.eyes.len() > 2 {
                return Err(Error::parse(
                    "annotations",
                    format!("{} eye boxes on frame {}, at most 2 allowed", rec.eyes.len(), rec.frame),
                ));
            }
            if let Some(face) = largest_face(&rec.faces) {
                for e in &rec.eyes {
                    if !face.contains_local(e) {
                        return Err(Error::InvalidBox {
                            what: format!("eye box outside face on frame {}", rec.frame),
                            x: e.x as i64,
                            y: e.y as i64,
                            w: e.w as i64,
                            h: e.h as i64,
                        });
                    }
                }
            }
        }
        Ok(AnnotationTrack { records })
    }

    pub fn records(&self) -> &[AnnotationRecord] {
        &self.records
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    /// Record for a frame index, if any.
    pub fn get(&self, frame: u64) -> Option<&AnnotationRecord> {
        self.records
            .binary_search_by_key(&frame, |r| r.frame)
            .ok()
            .map(|i| &self.records[i])
    }

    /// Check every face box against the frame dimensions. Eye boxes were
    /// already validated against their face at parse time.
    pub fn validate_bounds(&self, width: u32, height: u32) -> Result<()> {
        for rec in &self.records {
            for f in &rec.faces {
                if !f.fits_within(width, height) {
                    return Err(Error::InvalidBox {
                        what: format!("face on frame {} (frame is {width}x{height})", rec.frame),
                        x: f.x as i64,
                        y: f.y as i64,
                        w: f.w as i64,
                        h: f.h as i64,
                    });
                }
            }
        }
        Ok(())
    }

    /// Serialize back to JSON Lines.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for rec in &self.records {
            let raw = RawRecord {
                frame: rec.frame,
                faces: rec.faces.iter().map(box_to_arr).collect(),
                eyes: rec.eyes.iter().map(box_to_arr).collect(),
            };
            out.push_str(&serde_json::to_string(&raw).expect("annotation serialization"));
            out.push('\n');
        }
        out
    }
}

fn box_to_arr(r: &Rect) -> [i64; 4] {
    [r.x as i64, r.y as i64, r.w as i64, r.h as i64]
}

/// Largest face by area; the earliest wins ties.
pub(crate) fn largest_face(faces: &[Rect]) -> Option<&Rect> {
    let mut best: Option<&Rect> = None;
    for f in faces {
        if best.map_or(true, |b| f.area() > b.area()) {
            best = Some(f);
        }
    }
    best
}

fn arr_to_box(line: usize, what: &str, a: &[i64; 4]) -> Result<Rect> {
    let [x, y, w, h] = *a;
    let bad = x < 0 || y < 0 || w <= 0 || h <= 0;
    let too_big = [x, y, w, h].iter().any(|&v| v > u32::MAX as i64);
    if bad || too_big {
        return Err(Error::InvalidBox {
            what: format!("{what} on line {line}"),
            x,
            y,
            w,
            h,
        });
    }
    Ok(Rect::new(x as u32, y as u32, w as u32, h as u32))
}

/// Parse a JSON-Lines annotation file. Blank lines are ignored.
///
/// Structural validation: boxes must have nonnegative corners and positive
/// sizes, at most two eyes per record, every eye must fit inside the
/// record's largest face (when one is present), and frame indices must be
/// strictly increasing.
pub fn parse(text: &str) -> Result<AnnotationTrack> {
    let mut records: Vec<AnnotationRecord> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let lineno = lineno + 1;
        let raw: RawRecord = serde_json::from_str(line)
            .map_err(|e| Error::parse(format!("annotations line {lineno}"), e.to_string()))?;

        if let Some(last) = records.last() {
            if raw.frame <= last.frame {
                return Err(Error::NonIncreasingFrame(raw.frame));
            }
        }
        if raw.eyes.len() > 2 {
            return Err(Error::parse(
                format!("annotations line {lineno}"),
                format!("{} eye boxes, at most 2 allowed", raw.eyes.len()),
            ));
        }

        let faces: Vec<Rect> = raw
            .faces
            .iter()
            .map(|a| arr_to_box(lineno, "face box", a))
            .collect::<Result<_>>()?;
        let eyes: Vec<Rect> = raw
            .eyes
            .iter()
            .map(|a| arr_to_box(lineno, "eye box", a))
            .collect::<Result<_>>()?;

        // Eye boxes are face-local; check them against the face that the
        // selection rule would pick (the largest by area, earliest on ties).
        if let Some(face) = largest_face(&faces) {
            for e in &eyes {
                if !face.contains_local(e) {
                    return Err(Error::InvalidBox {
                        what: format!(
                            "eye box outside the {}x{} face on line {lineno}",
                            face.w, face.h
                        ),
                        x: e.x as i64,
                        y: e.y as i64,
                        w: e.w as i64,
                        h: e.h as i64,
                    });
                }
            }
        }

        records.push(AnnotationRecord {
            frame: raw.frame,
            faces,
            eyes,
        });
    }
    Ok(AnnotationTrack { records })
}
