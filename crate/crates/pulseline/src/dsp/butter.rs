//! Butterworth band-pass design and zero-phase application.
//!
//! The filter is designed in the analog domain (prototype poles, low-pass
//! to band-pass transform) with pre-warped edge frequencies, then mapped to
//! the z-plane by the bilinear transform, so the digital half-power points
//! land exactly on the requested cutoffs.

use crate::error::{Error, Result};
use rustfft::num_complex::Complex64;
use std::f64::consts::PI;

/// Digital Butterworth band-pass in transfer-function form.
#[derive(Debug, Clone)]
pub struct ButterworthBandpass {
    order: usize,
    fs: f64,
    /// Numerator, descending powers of z; length `2 * order + 1`.
    b: Vec<f64>,
    /// Denominator, same length, normalized so `a[0] == 1`.
    a: Vec<f64>,
}

impl ButterworthBandpass {
    /// Design an `order`-pole-pair band-pass with cutoffs `f_low..f_high` Hz
    /// at sample rate `fs`.
    pub fn design(order: usize, f_low: f64, f_high: f64, fs: f64) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidConfig("filter order must be >= 1".into()));
        }
        if !(f_low > 0.0 && f_low < f_high && f_high < fs / 2.0) {
            return Err(Error::InvalidConfig(format!(
                "band edges must satisfy 0 < f_low < f_high < fs/2, got {f_low}..{f_high} at fs={fs}"
            )));
        }

        // Analog prototype poles on the unit circle, left half plane.
        let n = order;
        let prototype: Vec<Complex64> = (0..n)
            .map(|k| {
                let theta = PI * (2 * k + n + 1) as f64 / (2 * n) as f64;
                Complex64::new(theta.cos(), theta.sin())
            })
            .collect();

        // Pre-warp the band edges onto the analog axis.
        let c = 2.0 * fs;
        let wl = c * (PI * f_low / fs).tan();
        let wh = c * (PI * f_high / fs).tan();
        let w0sq = wl * wh;
        let bw = wh - wl;

        // Low-pass to band-pass: each prototype pole splits into two.
        let mut poles = Vec::with_capacity(2 * n);
        for p in &prototype {
            let plp = p * (bw / 2.0);
            let disc = (plp * plp - w0sq).sqrt();
            poles.push(plp + disc);
            poles.push(plp - disc);
        }

        // Bilinear transform. The n analog zeros at the origin map to z = 1;
        // the n zeros at infinity land at z = -1.
        let cz = Complex64::new(c, 0.0);
        let z_poles: Vec<Complex64> = poles.iter().map(|p| (cz + p) / (cz - p)).collect();
        let mut z_zeros = vec![Complex64::new(1.0, 0.0); n];
        z_zeros.extend(vec![Complex64::new(-1.0, 0.0); n]);

        // Gain: analog numerator is bw^n * s^n, and the transform scales by
        // prod(c - zero) / prod(c - pole) with all analog zeros at 0.
        let mut denom_prod = Complex64::new(1.0, 0.0);
        for p in &poles {
            denom_prod *= cz - p;
        }
        let gain = (bw.powi(n as i32) * c.powi(n as i32) / denom_prod).re;

        let b: Vec<f64> = poly_from_roots(&z_zeros).iter().map(|v| v * gain).collect();
        let a = poly_from_roots(&z_poles);
        debug_assert!((a[0] - 1.0).abs() < 1e-9);

        Ok(ButterworthBandpass { order, fs, b, a })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn sample_rate(&self) -> f64 {
        self.fs
    }

    /// Single-pass complex frequency response at `f` Hz.
    pub fn response(&self, f: f64) -> Complex64 {
        let w = 2.0 * PI * f / self.fs;
        let zinv = Complex64::new(0.0, -w).exp();
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = Complex64::new(0.0, 0.0);
        let mut zk = Complex64::new(1.0, 0.0);
        for (bi, ai) in self.b.iter().zip(&self.a) {
            num += bi * zk;
            den += ai * zk;
            zk *= zinv;
        }
        num / den
    }

    /// Squared single-pass magnitude: the effective gain of one
    /// forward-backward application.
    pub fn gain_squared(&self, f: f64) -> f64 {
        self.response(f).norm_sqr()
    }

    /// Padding length used by [`Self::filtfilt`].
    pub fn pad_len(&self) -> usize {
        3 * (2 * self.order + 1)
    }

    /// Zero-phase (forward then backward) filtering.
    ///
    /// The signal is extended on both sides by `pad_len()` samples of odd
    /// reflection before filtering, and each pass starts from steady-state
    /// initial conditions scaled by its first sample.
    pub fn filtfilt(&self, x: &[f64]) -> Result<Vec<f64>> {
        let pad = self.pad_len();
        if x.len() <= pad {
            return Err(Error::SeriesTooShort {
                got: x.len(),
                need: pad + 1,
            });
        }
        let ext = odd_reflect_pad(x, pad);
        let zi = self.steady_state_zi();

        let forward = self.lfilter(&ext, &scale(&zi, ext[0]));
        let mut rev: Vec<f64> = forward.into_iter().rev().collect();
        rev = self.lfilter(&rev, &scale(&zi, rev[0]));
        rev.reverse();

        Ok(rev[pad..pad + x.len()].to_vec())
    }

    /// Direct form II transposed single-pass filter with initial state `zi`.
    fn lfilter(&self, x: &[f64], zi: &[f64]) -> Vec<f64> {
        let nstate = self.a.len() - 1;
        debug_assert_eq!(zi.len(), nstate);
        let mut z = zi.to_vec();
        let mut y = Vec::with_capacity(x.len());
        for &xi in x {
            let yi = self.b[0] * xi + z[0];
            for j in 0..nstate - 1 {
                z[j] = self.b[j + 1] * xi + z[j + 1] - self.a[j + 1] * yi;
            }
            z[nstate - 1] = self.b[nstate] * xi - self.a[nstate] * yi;
            y.push(yi);
        }
        y
    }

    /// State vector that makes the filter output settle immediately for a
    /// unit step input: solves (I - C^T) zi = b[1..] - a[1..] * b[0], with C
    /// the companion matrix of `a`.
    fn steady_state_zi(&self) -> Vec<f64> {
        let n = self.a.len() - 1;
        let mut m = vec![vec![0.0; n]; n];
        let mut rhs = vec![0.0; n];
        for i in 0..n {
            m[i][i] = 1.0;
            m[i][0] += self.a[i + 1];
            if i + 1 < n {
                m[i][i + 1] -= 1.0;
            }
            rhs[i] = self.b[i + 1] - self.a[i + 1] * self.b[0];
        }
        solve_dense(m, rhs)
    }
}

fn scale(v: &[f64], k: f64) -> Vec<f64> {
    v.iter().map(|&x| x * k).collect()
}

/// Extend both ends by `pad` samples reflected through the end values.
fn odd_reflect_pad(x: &[f64], pad: usize) -> Vec<f64> {
    let n = x.len();
    debug_assert!(n > pad);
    let mut ext = Vec::with_capacity(n + 2 * pad);
    for i in 0..pad {
        ext.push(2.0 * x[0] - x[pad - i]);
    }
    ext.extend_from_slice(x);
    for i in 0..pad {
        ext.push(2.0 * x[n - 1] - x[n - 2 - i]);
    }
    ext
}

/// Expand a monic polynomial from its roots; coefficients in descending
/// powers. Imaginary parts cancel because roots come in conjugate pairs.
fn poly_from_roots(roots: &[Complex64]) -> Vec<f64> {
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    for r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
        for (i, &ci) in coeffs.iter().enumerate() {
            next[i] += ci;
            next[i + 1] -= ci * r;
        }
        coeffs = next;
    }
    coeffs
        .iter()
        .map(|c| {
            debug_assert!(c.im.abs() < 1e-8 * (1.0 + c.re.abs()));
            c.re
        })
        .collect()
}

/// Gaussian elimination with partial pivoting for the small zi system.
fn solve_dense(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Vec<f64> {
    let n = rhs.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        let d = m[col][col];
        for row in col + 1..n {
            let f = m[row][col] / d;
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                m[row][k] -= f * m[col][k];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for k in row + 1..n {
            acc -= m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    x
}
