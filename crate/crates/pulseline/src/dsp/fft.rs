//! Ideal (brick-wall) temporal band-pass via the discrete Fourier transform.

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Reusable ideal band-pass for series of a fixed length.
///
/// Bins whose absolute frequency falls outside `[f_low, f_high]` are zeroed;
/// bins exactly on the edges are kept. The plan is built once so the filter
/// can be applied cheaply to many per-pixel series of the same length.
pub struct IdealBandpass {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    keep: Vec<bool>,
    len: usize,
}

impl IdealBandpass {
    pub fn new(len: usize, fs: f64, f_low: f64, f_high: f64) -> Self {
        assert!(len >= 2, "series must have at least 2 samples");
        assert!(fs > 0.0 && f_low >= 0.0 && f_low < f_high);
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(len);
        let inverse = planner.plan_fft_inverse(len);
        // Inclusive edges, with a hair of slack for binary rounding of
        // bin frequencies.
        let eps = 1e-9;
        let keep = (0..len)
            .map(|k| {
                let f = k.min(len - k) as f64 * fs / len as f64;
                f >= f_low - eps && f <= f_high + eps
            })
            .collect();
        IdealBandpass {
            forward,
            inverse,
            keep,
            len,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Filter one series (length must match the plan).
    pub fn filter(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.len);
        let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        for (c, &keep) in buf.iter_mut().zip(&self.keep) {
            if !keep {
                *c = Complex64::new(0.0, 0.0);
            }
        }
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.len as f64;
        buf.iter().map(|c| c.re * scale).collect()
    }
}
