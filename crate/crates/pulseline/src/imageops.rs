//! Floating-point RGB images and the resampling primitives used by the
//! ROI and magnification stages.

use crate::geom::Rect;

/// RGB image with interleaved `f64` samples.
///
/// Pixel values coming off disk are 8-bit and promoted to `f64` on load;
/// intermediate processing stages may take values outside `[0, 255]` and
/// are only clamped when a frame is exported back to an 8-bit container.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Image {
    pub fn new(width: usize, height: usize) -> Self {
        Image {
            width,
            height,
            data: vec![0.0; width * height * 3],
        }
    }

    pub fn from_data(width: usize, height: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), width * height * 3, "pixel buffer size mismatch");
        Image {
            width,
            height,
            data,
        }
    }

    /// Decode an interleaved 8-bit RGB buffer.
    pub fn from_rgb8(width: usize, height: usize, bytes: &[u8]) -> Self {
        assert_eq!(bytes.len(), width * height * 3, "rgb8 buffer size mismatch");
        Image {
            width,
            height,
            data: bytes.iter().map(|&b| b as f64).collect(),
        }
    }

    /// Encode to interleaved 8-bit RGB, clamping to [0, 255] and rounding.
    pub fn to_rgb8(&self) -> Vec<u8> {
        self.data
            .iter()
            .map(|&v| v.clamp(0.0, 255.0).round() as u8)
            .collect()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, c: usize) -> f64 {
        self.data[(y * self.width + x) * 3 + c]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, c: usize, v: f64) {
        self.data[(y * self.width + x) * 3 + c] = v;
    }

    /// Fill a rectangle (clipped to the image) with zeros in all channels.
    pub fn zero_rect(&mut self, rect: &Rect) {
        let Some(r) = rect.clipped_to(self.width as u32, self.height as u32) else {
            return;
        };
        for y in r.y..r.y + r.h {
            let row = (y as usize * self.width + r.x as usize) * 3;
            self.data[row..row + r.w as usize * 3].fill(0.0);
        }
    }

    /// Copy out a sub-rectangle; the rectangle must fit inside the image.
    pub fn crop(&self, rect: &Rect) -> Image {
        assert!(rect.fits_within(self.width as u32, self.height as u32));
        let mut out = Image::new(rect.w as usize, rect.h as usize);
        for y in 0..rect.h as usize {
            let src = ((rect.y as usize + y) * self.width + rect.x as usize) * 3;
            let dst = y * rect.w as usize * 3;
            out.data[dst..dst + rect.w as usize * 3]
                .copy_from_slice(&self.data[src..src + rect.w as usize * 3]);
        }
        out
    }

    /// Per-channel arithmetic mean over every pixel.
    pub fn channel_means(&self) -> [f64; 3] {
        let mut sums = [0.0f64; 3];
        for px in self.data.chunks_exact(3) {
            sums[0] += px[0];
            sums[1] += px[1];
            sums[2] += px[2];
        }
        let n = (self.width * self.height) as f64;
        [sums[0] / n, sums[1] / n, sums[2] / n]
    }
}

impl AsRef<Image> for Image {
    fn as_ref(&self) -> &Image {
        self
    }
}

/// Reflect an out-of-range index back into `[0, n)` without repeating the
/// edge sample (`-1 -> 1`, `n -> n-2`).
#[inline]
fn reflect101(i: isize, n: usize) -> usize {
    let n = n as isize;
    let mut i = i;
    // At most two folds are needed for kernel radii well below image size.
    if i < 0 {
        i = -i;
    }
    if i >= n {
        i = 2 * n - 2 - i;
    }
    i as usize
}

/// Separable 5-tap binomial blur, kernel [1, 4, 6, 4, 1] / 16.
pub fn binomial_blur5(img: &Image) -> Image {
    const K: [f64; 5] = [1.0 / 16.0, 4.0 / 16.0, 6.0 / 16.0, 4.0 / 16.0, 1.0 / 16.0];
    let (w, h) = (img.width, img.height);

    // Horizontal pass.
    let mut tmp = Image::new(w, h);
    for y in 0..h {
        for x in 0..w {
            for c in 0..3 {
                let mut acc = 0.0;
                for (t, k) in K.iter().enumerate() {
                    let sx = reflect101(x as isize + t as isize - 2, w);
                    acc += k * img.get(sx, y, c);
                }
                tmp.set(x, y, c, acc);
            }
        }
    }
    // Vertical pass.
    let mut out = Image::new(w, h);
    for y in 0..h {
        for x in 0..w {
            for c in 0..3 {
                let mut acc = 0.0;
                for (t, k) in K.iter().enumerate() {
                    let sy = reflect101(y as isize + t as isize - 2, h);
                    acc += k * tmp.get(x, sy, c);
                }
                out.set(x, y, c, acc);
            }
        }
    }
    out
}

/// Keep every second sample starting at index 0 in both axes.
pub fn decimate2(img: &Image) -> Image {
    let w = img.width.div_ceil(2);
    let h = img.height.div_ceil(2);
    let mut out = Image::new(w, h);
    for y in 0..h {
        for x in 0..w {
            for c in 0..3 {
                out.set(x, y, c, img.get(x * 2, y * 2, c));
            }
        }
    }
    out
}

/// Bilinear resize with pixel-center alignment.
pub fn bilinear_resize(img: &Image, dst_w: usize, dst_h: usize) -> Image {
    assert!(dst_w > 0 && dst_h > 0);
    let (sw, sh) = (img.width, img.height);
    let mut out = Image::new(dst_w, dst_h);

    let sx_scale = sw as f64 / dst_w as f64;
    let sy_scale = sh as f64 / dst_h as f64;

    for dy in 0..dst_h {
        let fy = ((dy as f64 + 0.5) * sy_scale - 0.5).clamp(0.0, (sh - 1) as f64);
        let y0 = fy.floor() as usize;
        let y1 = (y0 + 1).min(sh - 1);
        let ty = fy - y0 as f64;
        for dx in 0..dst_w {
            let fx = ((dx as f64 + 0.5) * sx_scale - 0.5).clamp(0.0, (sw - 1) as f64);
            let x0 = fx.floor() as usize;
            let x1 = (x0 + 1).min(sw - 1);
            let tx = fx - x0 as f64;
            for c in 0..3 {
                let top = img.get(x0, y0, c) * (1.0 - tx) + img.get(x1, y0, c) * tx;
                let bot = img.get(x0, y1, c) * (1.0 - tx) + img.get(x1, y1, c) * tx;
                out.set(dx, dy, c, top * (1.0 - ty) + bot * ty);
            }
        }
    }
    out
}
