//! Binary PPM (P6) decode/encode, 8 bits per channel.

use crate::error::{Error, Result};
use crate::imageops::Image;

const MAX_DIMENSION: u64 = 1 << 16;

/// Decode a P6 PPM image with maxval 255.
pub fn decode(bytes: &[u8]) -> Result<Image> {
    let mut pos = 0usize;
    expect_magic(bytes, &mut pos)?;
    let width = read_number(bytes, &mut pos)?;
    let height = read_number(bytes, &mut pos)?;
    let maxval = read_number(bytes, &mut pos)?;
    if maxval != 255 {
        return Err(Error::parse("ppm", format!("unsupported maxval {maxval}")));
    }
    if width == 0 || height == 0 || width > MAX_DIMENSION || height > MAX_DIMENSION {
        return Err(Error::parse("ppm", format!("bad dimensions {width}x{height}")));
    }
    // Exactly one whitespace byte separates the header from the raster.
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(Error::parse("ppm", "missing raster separator")),
    }
    let need = (width * height * 3) as usize;
    let raster = &bytes[pos..];
    if raster.len() != need {
        return Err(Error::parse(
            "ppm",
            format!("raster has {} bytes, expected {need}", raster.len()),
        ));
    }
    Ok(Image::from_rgb8(width as usize, height as usize, raster))
}

/// Encode to P6 with maxval 255, clamping and rounding pixels.
pub fn encode(img: &Image) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend(img.to_rgb8());
    out
}

fn expect_magic(bytes: &[u8], pos: &mut usize) -> Result<()> {
    if bytes.len() < 2 || &bytes[0..2] != b"P6" {
        return Err(Error::parse("ppm", "not a P6 file"));
    }
    *pos = 2;
    Ok(())
}

/// Read the next decimal token, skipping whitespace and `#` comments.
fn read_number(bytes: &[u8], pos: &mut usize) -> Result<u64> {
    loop {
        match bytes.get(*pos) {
            Some(b) if b.is_ascii_whitespace() => *pos += 1,
            Some(b'#') => {
                while let Some(&b) = bytes.get(*pos) {
                    *pos += 1;
                    if b == b'\n' {
                        break;
                    }
                }
            }
            _ => break,
        }
    }
    let start = *pos;
    while matches!(bytes.get(*pos), Some(b) if b.is_ascii_digit()) {
        *pos += 1;
    }
    if *pos == start || *pos - start > 10 {
        return Err(Error::parse("ppm", "malformed header number"));
    }
    std::str::from_utf8(&bytes[start..*pos])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::parse("ppm", "malformed header number"))
}
