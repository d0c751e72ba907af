//! Eulerian video magnification of a windowed face video: spatial
//! pyramid decomposition, per-pixel temporal ideal band-pass at the
//! coarsest level, amplification, and reconstruction onto the original
//! frames.

use crate::dsp::IdealBandpass;
use crate::error::{Error, Result};
use crate::imageops::{bilinear_resize, binomial_blur5, decimate2, Image};

/// Magnification parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvmConfig {
    /// Amplification applied to the band-passed component.
    pub alpha: f64,
    /// Lower passband edge, Hz.
    pub f_low: f64,
    /// Upper passband edge, Hz.
    pub f_high: f64,
    /// Number of blur-and-halve steps (104 -> 13 at the default 3).
    pub pyramid_steps: usize,
}

impl Default for EvmConfig {
    fn default() -> Self {
        EvmConfig {
            alpha: 20.0,
            f_low: 0.4,
            f_high: 3.0,
            pyramid_steps: 3,
        }
    }
}

impl EvmConfig {
    pub fn validate(&self, fps: f64, width: usize, height: usize) -> Result<()> {
        if self.alpha < 0.0 {
            return Err(Error::InvalidConfig("alpha must be nonnegative".into()));
        }
        if !(self.f_low > 0.0 && self.f_low < self.f_high && self.f_high < fps / 2.0) {
            return Err(Error::InvalidConfig(format!(
                "band edges must satisfy 0 < f_low < f_high < fps/2, got {}..{} at fps={fps}",
                self.f_low, self.f_high
            )));
        }
        if self.pyramid_steps < 1 {
            return Err(Error::InvalidConfig("pyramid_steps must be >= 1".into()));
        }
        let min_side = width.min(height);
        if min_side >> self.pyramid_steps < 4 {
            return Err(Error::InvalidConfig(format!(
                "{width}x{height} is too small for {} pyramid steps",
                self.pyramid_steps
            )));
        }
        Ok(())
    }
}

/// `steps` iterations of 5-tap binomial blur followed by 2x decimation.
pub fn pyramid_down(image: &Image, steps: usize) -> Result<Image> {
    if image.width().min(image.height()) >> steps < 4 {
        return Err(Error::InvalidConfig(format!(
            "image {}x{} too small for {steps} pyramid steps",
            image.width(),
            image.height()
        )));
    }
    let mut current = image.clone();
    for _ in 0..steps {
        current = decimate2(&binomial_blur5(&current));
    }
    Ok(current)
}

/// Ideal band-pass of one time series: DFT, zero all bins outside
/// `[f_low, f_high]` (edges inclusive), inverse DFT.
pub fn temporal_ideal_bandpass(series: &[f64], fs: f64, f_low: f64, f_high: f64) -> Vec<f64> {
    IdealBandpass::new(series.len(), fs, f_low, f_high).filter(series)
}

/// Magnify one window of frames.
///
/// Per channel: decimate every frame to the coarsest pyramid level, ideal
/// band-pass each coarse pixel's time series, scale by `alpha`, bilinearly
/// upsample back to full resolution, and add to the original frames. All
/// arithmetic stays in floating point; nothing is clamped here.
pub fn magnify<T: AsRef<Image>>(frames: &[T], fps: f64, cfg: &EvmConfig) -> Result<Vec<Image>> {
    if frames.len() < 2 {
        return Err(Error::SeriesTooShort {
            got: frames.len(),
            need: 2,
        });
    }
    let (w, h) = (frames[0].as_ref().width(), frames[0].as_ref().height());
    cfg.validate(fps, w, h)?;

    let coarse: Vec<Image> = frames
        .iter()
        .map(|f| pyramid_down(f.as_ref(), cfg.pyramid_steps))
        .collect::<Result<_>>()?;
    let (cw, ch) = (coarse[0].width(), coarse[0].height());
    let t = frames.len();

    // Temporal filtering across the stack, one coarse pixel channel at a time.
    let bandpass = IdealBandpass::new(t, fps, cfg.f_low, cfg.f_high);
    let mut filtered: Vec<Image> = (0..t).map(|_| Image::new(cw, ch)).collect();
    let mut series = vec![0.0f64; t];
    for y in 0..ch {
        for x in 0..cw {
            for c in 0..3 {
                for (i, frame) in coarse.iter().enumerate() {
                    series[i] = frame.get(x, y, c);
                }
                let banded = bandpass.filter(&series);
                for (i, v) in banded.into_iter().enumerate() {
                    filtered[i].set(x, y, c, cfg.alpha * v);
                }
            }
        }
    }

    // Reconstruction: upsample the amplified component and add it back.
    Ok(frames
        .iter()
        .zip(&filtered)
        .map(|(orig, amp)| {
            let up = bilinear_resize(amp, w, h);
            let mut out = orig.as_ref().clone();
            for (o, u) in out.data_mut().iter_mut().zip(up.data()) {
                *o += u;
            }
            out
        })
        .collect())
}
