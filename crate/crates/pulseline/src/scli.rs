//! Reduction of a (possibly magnified) window of masked face frames to the
//! one-dimensional signal of change in light intensity.
//!
//! Chain without magnification: per-channel means, zero-phase Butterworth
//! band-pass per channel, first principal component, interquartile outlier
//! adjustment. With magnification the band-pass stage is skipped (the
//! magnifier's temporal filter already restricted the band) and the channel
//! means are mean-centered before the principal-component step.

use crate::dsp::ButterworthBandpass;
use crate::error::{Error, Result};
use crate::evm::{magnify, EvmConfig};
use crate::imageops::Image;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Which side of the magnification stage a signal came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Before applying video magnification.
    BEvm,
    /// After applying video magnification.
    AEvm,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::BEvm => "b_evm",
            Variant::AEvm => "a_evm",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "b_evm" => Ok(Variant::BEvm),
            "a_evm" => Ok(Variant::AEvm),
            other => Err(Error::parse("variant", format!("unknown variant {other:?}"))),
        }
    }
}

/// Equal-length per-channel mean series.
#[derive(Debug, Clone, PartialEq)]
pub struct RgbSeries {
    pub r: Vec<f64>,
    pub g: Vec<f64>,
    pub b: Vec<f64>,
    pub fs: f64,
}

impl RgbSeries {
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn channels(&self) -> [&[f64]; 3] {
        [&self.r, &self.g, &self.b]
    }
}

/// One window's signal of change in light intensity.
#[derive(Debug, Clone, PartialEq)]
pub struct Scli {
    pub samples: Vec<f64>,
    pub fs: f64,
    pub variant: Variant,
    pub window_id: u64,
}

/// Band-pass parameters for the no-magnification path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterConfig {
    pub order: usize,
    pub f_low: f64,
    pub f_high: f64,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            order: 3,
            f_low: 0.4,
            f_high: 3.0,
        }
    }
}

/// How `adjust_outliers` treats the two tails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutlierPolicy {
    /// Clamp both tails at three interquartile ranges beyond the quartiles.
    #[default]
    SymmetricIqr,
    /// Clamp only values above `Q3 + 3 IQR`.
    UpperTailOnly,
}

/// Relative floor below which a window's channel amplitude counts as
/// degenerate (no usable light-intensity variation).
const DEGENERATE_VARIANCE_REL: f64 = 1e-9;

/// Per-frame arithmetic mean of every pixel, separately per channel.
/// Masked (zeroed) eye pixels are included; they contribute a constant
/// offset that centering and filtering remove.
pub fn channel_means<T: AsRef<Image>>(window: &[T], fs: f64) -> Result<RgbSeries> {
    if window.is_empty() {
        return Err(Error::DegenerateWindow("empty window".into()));
    }
    let mut r = Vec::with_capacity(window.len());
    let mut g = Vec::with_capacity(window.len());
    let mut b = Vec::with_capacity(window.len());
    for frame in window {
        let m = frame.as_ref().channel_means();
        r.push(m[0]);
        g.push(m[1]);
        b.push(m[2]);
    }
    Ok(RgbSeries { r, g, b, fs })
}

/// Zero-phase Butterworth band-pass (forward and backward application).
pub fn butter_bandpass_zerophase(series: &[f64], fs: f64, cfg: &FilterConfig) -> Result<Vec<f64>> {
    let filter = ButterworthBandpass::design(cfg.order, cfg.f_low, cfg.f_high, fs)?;
    filter.filtfilt(series)
}

/// Projection onto the first principal direction of the three channels.
///
/// Rows are mean-centered; the leading eigenvector of the 3x3 covariance
/// gives the direction; the output is sign-oriented so its correlation
/// with the centered green channel is nonnegative.
pub fn pca_first_component(rgb: &RgbSeries) -> Result<Vec<f64>> {
    let n = rgb.len();
    if n < 3 {
        return Err(Error::SeriesTooShort { got: n, need: 3 });
    }
    let centered: Vec<Vec<f64>> = rgb
        .channels()
        .iter()
        .map(|ch| {
            let m = crate::dsp::mean(ch);
            ch.iter().map(|v| v - m).collect()
        })
        .collect();

    let dir = first_principal_direction(&centered)?;

    // Sign orientation: flip if the projection anti-correlates with the
    // centered green channel.
    let mut projection: Vec<f64> = (0..n)
        .map(|t| dir[0] * centered[0][t] + dir[1] * centered[1][t] + dir[2] * centered[2][t])
        .collect();
    let green_cov: f64 = projection.iter().zip(&centered[1]).map(|(p, g)| p * g).sum();
    if green_cov < 0.0 {
        for v in &mut projection {
            *v = -*v;
        }
    }
    Ok(projection)
}

/// Leading eigenvector of the 3x3 covariance of already-centered rows.
pub(crate) fn first_principal_direction(centered: &[Vec<f64>]) -> Result<[f64; 3]> {
    assert_eq!(centered.len(), 3);
    let n = centered[0].len();
    if n < 2 {
        return Err(Error::SeriesTooShort { got: n, need: 2 });
    }
    let mut cov = [[0.0f64; 3]; 3];
    for i in 0..3 {
        for j in i..3 {
            let s: f64 = centered[i].iter().zip(&centered[j]).map(|(a, b)| a * b).sum();
            cov[i][j] = s / (n - 1) as f64;
            cov[j][i] = cov[i][j];
        }
    }
    let total_var = cov[0][0] + cov[1][1] + cov[2][2];
    if !(total_var > 0.0) || !total_var.is_finite() {
        return Err(Error::DegenerateWindow("zero channel variance".into()));
    }

    let (eigenvalues, eigenvectors) = jacobi_eigen_3x3(&cov);
    let lead = (0..3)
        .max_by(|&a, &b| eigenvalues[a].total_cmp(&eigenvalues[b]))
        .unwrap();
    Ok([
        eigenvectors[0][lead],
        eigenvectors[1][lead],
        eigenvectors[2][lead],
    ])
}

/// Cyclic Jacobi eigen-decomposition of a symmetric 3x3 matrix.
/// Returns eigenvalues and the matrix of column eigenvectors.
fn jacobi_eigen_3x3(m: &[[f64; 3]; 3]) -> ([f64; 3], [[f64; 3]; 3]) {
    let mut a = *m;
    let mut v = [[0.0; 3]; 3];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _sweep in 0..64 {
        let off = a[0][1].abs() + a[0][2].abs() + a[1][2].abs();
        if off < 1e-15 * (a[0][0].abs() + a[1][1].abs() + a[2][2].abs()).max(1e-300) {
            break;
        }
        for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
            if a[p][q].abs() < 1e-300 {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            for k in 0..3 {
                let (akp, akq) = (a[k][p], a[k][q]);
                a[k][p] = c * akp - s * akq;
                a[k][q] = s * akp + c * akq;
            }
            for k in 0..3 {
                let (apk, aqk) = (a[p][k], a[q][k]);
                a[p][k] = c * apk - s * aqk;
                a[q][k] = s * apk + c * aqk;
            }
            for row in &mut v {
                let (vkp, vkq) = (row[p], row[q]);
                row[p] = c * vkp - s * vkq;
                row[q] = s * vkp + c * vkq;
            }
        }
    }
    ([a[0][0], a[1][1], a[2][2]], v)
}

/// Clamp values farther than three interquartile ranges from the quartiles.
///
/// Quartiles use linear interpolation between order statistics. The upper
/// rule clamps values above `Q3 + 3 IQR`; by default the mirror-image rule
/// is applied to the lower tail as well (see [`OutlierPolicy`]).
pub fn adjust_outliers(series: &[f64], policy: OutlierPolicy) -> Vec<f64> {
    assert!(series.len() >= 4, "outlier adjustment needs >= 4 samples");
    let q1 = crate::dsp::quantile_linear(series, 0.25);
    let q3 = crate::dsp::quantile_linear(series, 0.75);
    let iqr = q3 - q1;
    let hi = q3 + 3.0 * iqr;
    let lo = q1 - 3.0 * iqr;
    series
        .iter()
        .map(|&v| {
            if v > hi {
                hi
            } else if policy == OutlierPolicy::SymmetricIqr && v < lo {
                lo
            } else {
                v
            }
        })
        .collect()
}

/// Full extraction of one window's signal. The chain is identical for both
/// variants; what differs is the video it runs on (magnified or not) and
/// whether the Butterworth stage is needed.
pub fn extract_scli<T: AsRef<Image>>(
    window: &[T],
    fs: f64,
    window_id: u64,
    variant: Variant,
    evm_cfg: &EvmConfig,
    filt_cfg: &FilterConfig,
    policy: OutlierPolicy,
) -> Result<Scli> {
    extract_scli_detailed(window, fs, window_id, variant, evm_cfg, filt_cfg, policy)
        .map(|(scli, _)| scli)
}

/// Like [`extract_scli`] but also returns the filtered (or centered)
/// per-channel series feeding the principal-component step; the video-side
/// signal-to-noise computation needs them.
pub fn extract_scli_detailed<T: AsRef<Image>>(
    window: &[T],
    fs: f64,
    window_id: u64,
    variant: Variant,
    evm_cfg: &EvmConfig,
    filt_cfg: &FilterConfig,
    policy: OutlierPolicy,
) -> Result<(Scli, RgbSeries)> {
    if window.len() < 4 {
        return Err(Error::SeriesTooShort {
            got: window.len(),
            need: 4,
        });
    }

    let raw = match variant {
        Variant::BEvm => channel_means(window, fs)?,
        Variant::AEvm => {
            let magnified = magnify(window, fs, evm_cfg)?;
            channel_means(&magnified, fs)?
        }
    };

    // Scale for the degeneracy test below: the raw means' magnitude.
    let dc_scale = raw
        .channels()
        .iter()
        .flat_map(|ch| ch.iter())
        .fold(0.0f64, |acc, &v| acc.max(v.abs()));

    let prepared = match variant {
        Variant::BEvm => RgbSeries {
            r: butter_bandpass_zerophase(&raw.r, fs, filt_cfg)?,
            g: butter_bandpass_zerophase(&raw.g, fs, filt_cfg)?,
            b: butter_bandpass_zerophase(&raw.b, fs, filt_cfg)?,
            fs,
        },
        Variant::AEvm => RgbSeries {
            r: center(&raw.r),
            g: center(&raw.g),
            b: center(&raw.b),
            fs,
        },
    };

    // A numerically flat window (constant video) leaves only rounding
    // noise after filtering; treat it as degenerate rather than letting
    // the principal component amplify garbage.
    let floor = DEGENERATE_VARIANCE_REL * (1.0 + dc_scale);
    let max_amp = prepared
        .channels()
        .iter()
        .flat_map(|ch| ch.iter())
        .fold(0.0f64, |acc, &v| acc.max(v.abs()));
    if max_amp <= floor {
        return Err(Error::DegenerateWindow(
            "no light-intensity variation in window".into(),
        ));
    }

    let component = pca_first_component(&prepared)?;
    let samples = adjust_outliers(&component, policy);
    Ok((
        Scli {
            samples,
            fs,
            variant,
            window_id,
        },
        prepared,
    ))
}

fn center(x: &[f64]) -> Vec<f64> {
    let m = crate::dsp::mean(x);
    x.iter().map(|v| v - m).collect()
}

// ---------------------------------------------------------------------------
// CSV interchange
// ---------------------------------------------------------------------------

/// Serialize one window's signal:
/// a `window_id,variant,fs` header row, one metadata row, then one sample
/// per line.
pub fn write_scli_csv(scli: &Scli) -> String {
    let mut out = format!(
        "window_id,variant,fs\n{},{},{}\n",
        scli.window_id, scli.variant, scli.fs
    );
    for s in &scli.samples {
        out.push_str(&format!("{s}\n"));
    }
    out
}

/// Parse the format written by [`write_scli_csv`].
pub fn parse_scli_csv(text: &str) -> Result<Scli> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::parse("scli csv", "empty file"))?;
    if header != "window_id,variant,fs" {
        return Err(Error::parse("scli csv", format!("bad header {header:?}")));
    }
    let meta = lines
        .next()
        .ok_or_else(|| Error::parse("scli csv", "missing metadata row"))?;
    let fields: Vec<&str> = meta.split(',').collect();
    if fields.len() != 3 {
        return Err(Error::parse("scli csv", "metadata row needs 3 fields"));
    }
    let window_id: u64 = fields[0]
        .parse()
        .map_err(|_| Error::parse("scli csv", format!("bad window id {:?}", fields[0])))?;
    let variant: Variant = fields[1].parse()?;
    let fs: f64 = fields[2]
        .parse()
        .map_err(|_| Error::parse("scli csv", format!("bad sample rate {:?}", fields[2])))?;
    if !(fs > 0.0 && fs.is_finite()) {
        return Err(Error::parse("scli csv", "sample rate must be positive"));
    }
    let samples: Vec<f64> = lines
        .map(|l| {
            l.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::parse("scli csv", format!("bad sample {l:?}")))
        })
        .collect::<Result<_>>()?;
    Ok(Scli {
        samples,
        fs,
        variant,
        window_id,
    })
}

/// Serialize the filtered per-channel series that fed the principal
/// component (used by the evaluation stage's video SNR).
pub fn write_channels_csv(window_id: u64, variant: Variant, rgb: &RgbSeries) -> String {
    let mut out = format!("window_id,variant,fs\n{window_id},{variant},{}\n", rgb.fs);
    for i in 0..rgb.len() {
        out.push_str(&format!("{},{},{}\n", rgb.r[i], rgb.g[i], rgb.b[i]));
    }
    out
}

/// Parse the format written by [`write_channels_csv`].
pub fn parse_channels_csv(text: &str) -> Result<(u64, Variant, RgbSeries)> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::parse("channels csv", "empty file"))?;
    if header != "window_id,variant,fs" {
        return Err(Error::parse("channels csv", format!("bad header {header:?}")));
    }
    let meta = lines
        .next()
        .ok_or_else(|| Error::parse("channels csv", "missing metadata row"))?;
    let fields: Vec<&str> = meta.split(',').collect();
    if fields.len() != 3 {
        return Err(Error::parse("channels csv", "metadata row needs 3 fields"));
    }
    let window_id: u64 = fields[0]
        .parse()
        .map_err(|_| Error::parse("channels csv", "bad window id"))?;
    let variant: Variant = fields[1].parse()?;
    let fs: f64 = fields[2]
        .parse()
        .map_err(|_| Error::parse("channels csv", "bad sample rate"))?;
    if !(fs > 0.0 && fs.is_finite()) {
        return Err(Error::parse("channels csv", "sample rate must be positive"));
    }
    let (mut r, mut g, mut b) = (Vec::new(), Vec::new(), Vec::new());
    for line in lines {
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::parse("channels csv", format!("bad row {line:?}")));
        }
        let vals: Vec<f64> = parts
            .iter()
            .map(|p| {
                p.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::parse("channels csv", format!("bad value {p:?}")))
            })
            .collect::<Result<_>>()?;
        r.push(vals[0]);
        g.push(vals[1]);
        b.push(vals[2]);
    }
    Ok((window_id, variant, RgbSeries { r, g, b, fs }))
}
