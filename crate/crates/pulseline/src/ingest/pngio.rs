//! PNG decode into RGB, via the `png` crate.

use crate::error::{Error, Result};
use crate::imageops::Image;

/// Decode an 8-bit PNG (gray, gray+alpha, RGB, or RGBA) into RGB.
pub fn decode(bytes: &[u8]) -> Result<Image> {
    let mut limits = png::Limits::default();
    limits.bytes = 256 << 20;
    let decoder = png::Decoder::new_with_limits(bytes, limits);
    let mut reader = decoder
        .read_info()
        .map_err(|e| Error::parse("png", e.to_string()))?;
    let mut buf = vec![0u8; reader.output_buffer_size()];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| Error::parse("png", e.to_string()))?;
    if info.bit_depth != png::BitDepth::Eight {
        return Err(Error::parse("png", "only 8-bit PNGs are supported"));
    }
    let (w, h) = (info.width as usize, info.height as usize);
    let px = &buf[..info.buffer_size()];
    let rgb: Vec<u8> = match info.color_type {
        png::ColorType::Rgb => px.to_vec(),
        png::ColorType::Rgba => px.chunks_exact(4).flat_map(|p| [p[0], p[1], p[2]]).collect(),
        png::ColorType::Grayscale => px.iter().flat_map(|&g| [g, g, g]).collect(),
        png::ColorType::GrayscaleAlpha => {
            px.chunks_exact(2).flat_map(|p| [p[0], p[0], p[0]]).collect()
        }
        other => {
            return Err(Error::parse("png", format!("unsupported color type {other:?}")));
        }
    };
    if rgb.len() != w * h * 3 {
        return Err(Error::parse("png", "decoded buffer size mismatch"));
    }
    Ok(Image::from_rgb8(w, h, &rgb))
}
