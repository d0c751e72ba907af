//! The `.rgbv` raw frame container.
//!
//! Layout: frame-sequential, row-major, interleaved R,G,B bytes. A JSON
//! sidecar named `<name>.json` next to the `.rgbv` file carries `width`,
//! `height`, `fps`, and `frame_count`.

use crate::error::{Error, Result};
use crate::imageops::Image;
use serde::{Deserialize, Serialize};
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

/// Sidecar metadata for a `.rgbv` file.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct Sidecar {
    pub width: u32,
    pub height: u32,
    pub fps: f64,
    pub frame_count: u64,
}

impl Sidecar {
    /// Parse and validate sidecar JSON.
    pub fn parse(bytes: &[u8]) -> Result<Sidecar> {
        let sc: Sidecar = serde_json::from_slice(bytes)
            .map_err(|e| Error::parse("rgbv sidecar", e.to_string()))?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::parse("rgbv sidecar", "zero width or height"));
        }
        if self.frame_count == 0 {
            return Err(Error::parse("rgbv sidecar", "zero frames"));
        }
        if !(self.fps > 0.0 && self.fps.is_finite()) {
            return Err(Error::parse("rgbv sidecar", "fps must be positive"));
        }
        self.frame_bytes()?;
        Ok(())
    }

    /// Bytes per frame, guarded against overflow.
    pub fn frame_bytes(&self) -> Result<usize> {
        (self.width as u64)
            .checked_mul(self.height as u64)
            .and_then(|v| v.checked_mul(3))
            .and_then(|v| usize::try_from(v).ok())
            .filter(|&v| v > 0)
            .ok_or_else(|| Error::parse("rgbv sidecar", "frame size overflows"))
    }

    /// Total payload size, guarded against overflow.
    pub fn total_bytes(&self) -> Result<usize> {
        (self.frame_bytes()? as u64)
            .checked_mul(self.frame_count)
            .and_then(|v| usize::try_from(v).ok())
            .ok_or_else(|| Error::parse("rgbv sidecar", "payload size overflows"))
    }
}

/// Sidecar path for a given `.rgbv` path (`video.rgbv` -> `video.json`).
pub fn sidecar_path(rgbv: &Path) -> PathBuf {
    rgbv.with_extension("json")
}

/// Decode a full payload against its sidecar.
///
/// The byte length must equal `width * height * 3 * frame_count` exactly.
pub fn decode_frames(bytes: &[u8], sidecar: &Sidecar) -> Result<Vec<Image>> {
    sidecar.validate()?;
    let frame_bytes = sidecar.frame_bytes()?;
    if bytes.len() != sidecar.total_bytes()? {
        return Err(Error::parse(
            "rgbv payload",
            format!(
                "length {} is not width*height*3*frame_count = {}",
                bytes.len(),
                sidecar.total_bytes()?
            ),
        ));
    }
    Ok(bytes
        .chunks_exact(frame_bytes)
        .map(|chunk| Image::from_rgb8(sidecar.width as usize, sidecar.height as usize, chunk))
        .collect())
}

/// Load a `.rgbv` file and its sidecar fully into memory.
pub fn load_rgbv(path: &Path) -> Result<(Vec<Image>, Sidecar)> {
    let sc_path = sidecar_path(path);
    let sc_bytes = fs::read(&sc_path).map_err(|e| Error::io(&sc_path, e))?;
    let sidecar = Sidecar::parse(&sc_bytes)?;
    let payload = fs::read(path).map_err(|e| Error::io(path, e))?;
    let frames = decode_frames(&payload, &sidecar)?;
    Ok((frames, sidecar))
}

/// Streaming frame reader for large `.rgbv` files.
pub struct RgbvReader {
    reader: BufReader<File>,
    sidecar: Sidecar,
    read_so_far: u64,
}

impl RgbvReader {
    pub fn open(path: &Path) -> Result<Self> {
        let sc_path = sidecar_path(path);
        let sc_bytes = fs::read(&sc_path).map_err(|e| Error::io(&sc_path, e))?;
        let sidecar = Sidecar::parse(&sc_bytes)?;
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let meta = file.metadata().map_err(|e| Error::io(path, e))?;
        if meta.len() != sidecar.total_bytes()? as u64 {
            return Err(Error::parse(
                "rgbv payload",
                format!(
                    "file length {} does not match sidecar ({} frames of {} bytes)",
                    meta.len(),
                    sidecar.frame_count,
                    sidecar.frame_bytes()?
                ),
            ));
        }
        Ok(RgbvReader {
            reader: BufReader::new(file),
            sidecar,
            read_so_far: 0,
        })
    }

    pub fn sidecar(&self) -> &Sidecar {
        &self.sidecar
    }

    /// Next frame, or `None` past the end.
    pub fn read_frame(&mut self) -> Result<Option<Image>> {
        if self.read_so_far >= self.sidecar.frame_count {
            return Ok(None);
        }
        let mut buf = vec![0u8; self.sidecar.frame_bytes()?];
        self.reader
            .read_exact(&mut buf)
            .map_err(|e| Error::parse("rgbv payload", format!("short read: {e}")))?;
        self.read_so_far += 1;
        Ok(Some(Image::from_rgb8(
            self.sidecar.width as usize,
            self.sidecar.height as usize,
            &buf,
        )))
    }
}

/// Streaming frame writer; call [`Self::finish`] to emit the sidecar.
pub struct RgbvWriter {
    writer: BufWriter<File>,
    path: PathBuf,
    width: u32,
    height: u32,
    fps: f64,
    written: u64,
}

impl RgbvWriter {
    pub fn create(path: &Path, width: u32, height: u32, fps: f64) -> Result<Self> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        Ok(RgbvWriter {
            writer: BufWriter::new(file),
            path: path.to_path_buf(),
            width,
            height,
            fps,
            written: 0,
        })
    }

    /// Clamp to [0, 255], round to 8 bits, and append.
    pub fn write_frame(&mut self, frame: &Image) -> Result<()> {
        assert_eq!(frame.width(), self.width as usize);
        assert_eq!(frame.height(), self.height as usize);
        let bytes = frame.to_rgb8();
        self.writer
            .write_all(&bytes)
            .map_err(|e| Error::io(&self.path, e))?;
        self.written += 1;
        Ok(())
    }

    pub fn finish(mut self) -> Result<Sidecar> {
        self.writer.flush().map_err(|e| Error::io(&self.path, e))?;
        let sidecar = Sidecar {
            width: self.width,
            height: self.height,
            fps: self.fps,
            frame_count: self.written,
        };
        sidecar.validate()?;
        let sc_path = sidecar_path(&self.path);
        let json = serde_json::to_string_pretty(&sidecar)
            .expect("sidecar serialization cannot fail");
        fs::write(&sc_path, json).map_err(|e| Error::io(&sc_path, e))?;
        Ok(sidecar)
    }
}

/// Write a full in-memory sequence.
pub fn write_rgbv(path: &Path, frames: &[Image], fps: f64) -> Result<Sidecar> {
    assert!(!frames.is_empty());
    let mut w = RgbvWriter::create(path, frames[0].width() as u32, frames[0].height() as u32, fps)?;
    for f in frames {
        w.write_frame(f)?;
    }
    w.finish()
}
