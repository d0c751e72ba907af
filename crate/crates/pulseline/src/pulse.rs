//! Heartbeat peak detection and pulse-rate estimation.
//!
//! Detection chain: first difference to enhance peaks, centered moving
//! average, min-max normalization to [0, 1], then local maxima filtered by
//! prominence and a minimum peak distance. The moving-average width is a
//! free parameter; [`calibrate_smoothing`] searches it against reference
//! pulse rates.

use crate::error::{Error, Result};
use crate::scli::{Scli, Variant};

/// Widths searched by the calibration: one to thirty samples at the
/// signal's rate (33 ms to 1 s in 33 ms steps at 30 Hz).
pub const SMOOTHING_GRID_STEPS: usize = 30;

/// Peak-detection parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakConfig {
    /// Moving-average width in seconds.
    pub smooth_width_s: f64,
    /// Minimum prominence on the unit-normalized detection signal.
    pub prominence: f64,
    /// Minimum spacing between kept peaks, seconds.
    pub min_distance_s: f64,
}

impl PeakConfig {
    /// Calibrated defaults per variant: 400 ms of smoothing without
    /// magnification, 433 ms with it.
    pub fn default_for(variant: Variant) -> Self {
        PeakConfig {
            smooth_width_s: match variant {
                Variant::BEvm => 0.400,
                Variant::AEvm => 0.433,
            },
            prominence: 0.15,
            min_distance_s: 0.33,
        }
    }

    pub fn validate(&self, fs: f64) -> Result<()> {
        if !(self.smooth_width_s >= 1.0 / fs && self.smooth_width_s <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "smoothing width {} s outside [{}, 1.0]",
                self.smooth_width_s,
                1.0 / fs
            )));
        }
        if !(self.prominence > 0.0) {
            return Err(Error::InvalidConfig("prominence must be positive".into()));
        }
        if !(self.min_distance_s > 0.0) {
            return Err(Error::InvalidConfig("min peak distance must be positive".into()));
        }
        Ok(())
    }

    pub fn smooth_samples(&self, fs: f64) -> usize {
        ((self.smooth_width_s * fs).round() as usize).max(1)
    }

    pub fn distance_samples(&self, fs: f64) -> usize {
        ((self.min_distance_s * fs).round() as usize).max(1)
    }
}

/// Peak times, inter-beat intervals, and pulse rate for one window.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseEstimate {
    pub window_id: u64,
    pub variant: Variant,
    /// Seconds, on the detection-signal timeline; strictly increasing.
    pub peak_times: Vec<f64>,
    /// Successive differences of the peak times, seconds.
    pub ibis: Vec<f64>,
    /// Beats per minute: 60 over the mean inter-beat interval.
    pub pr_bpm: f64,
}

impl PulseEstimate {
    pub fn mean_ibi_s(&self) -> f64 {
        crate::dsp::mean(&self.ibis)
    }
}

/// Detect heartbeat peaks; returns indices into the detection signal
/// (which is one sample shorter than the input).
///
/// A flat detection signal yields zero peaks rather than an error.
pub fn detect_peaks(scli: &Scli, cfg: &PeakConfig) -> Result<Vec<usize>> {
    let fs = scli.fs;
    cfg.validate(fs)?;
    let min_len = 2 * cfg.distance_samples(fs);
    if scli.samples.len() < min_len.max(3) {
        return Err(Error::SeriesTooShort {
            got: scli.samples.len(),
            need: min_len.max(3),
        });
    }

    let derivative = crate::dsp::first_difference(&scli.samples);
    let smoothed = crate::dsp::moving_average_centered(&derivative, cfg.smooth_samples(fs));
    let Some(normalized) = crate::dsp::minmax_normalize(&smoothed) else {
        log::warn!(
            "window {}: flat detection signal, no peaks",
            scli.window_id
        );
        return Ok(Vec::new());
    };

    let candidates = local_maxima(&normalized);
    let prominent: Vec<usize> = candidates
        .into_iter()
        .filter(|&p| prominence(&normalized, p) >= cfg.prominence)
        .collect();
    Ok(enforce_min_distance(
        &prominent,
        &normalized,
        cfg.distance_samples(fs),
    ))
}

/// Indices of strict local maxima; flat plateau tops yield their middle
/// sample (left of center for even plateaus).
fn local_maxima(x: &[f64]) -> Vec<usize> {
    let n = x.len();
    let mut peaks = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if x[i] > x[i - 1] {
            let mut j = i;
            while j + 1 < n && x[j + 1] == x[i] {
                j += 1;
            }
            if j + 1 < n && x[j + 1] < x[i] {
                peaks.push((i + j) / 2);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    peaks
}

/// Height of a peak above the higher of the two minima separating it from
/// higher terrain (or the signal ends).
fn prominence(x: &[f64], peak: usize) -> f64 {
    let mut left_min = x[peak];
    let mut i = peak;
    while i > 0 && x[i - 1] <= x[peak] {
        i -= 1;
        left_min = left_min.min(x[i]);
    }
    let mut right_min = x[peak];
    let mut j = peak;
    while j + 1 < x.len() && x[j + 1] <= x[peak] {
        j += 1;
        right_min = right_min.min(x[j]);
    }
    x[peak] - left_min.max(right_min)
}

/// Drop peaks closer than `distance` samples to a higher one. The higher
/// peak survives; exact ties keep the earlier index.
fn enforce_min_distance(peaks: &[usize], x: &[f64], distance: usize) -> Vec<usize> {
    let m = peaks.len();
    // Processing order: height descending, earlier index first on ties.
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| {
        x[peaks[b]]
            .total_cmp(&x[peaks[a]])
            .then(peaks[a].cmp(&peaks[b]))
    });
    let mut keep = vec![true; m];
    for &idx in &order {
        if !keep[idx] {
            continue;
        }
        let p = peaks[idx];
        let mut k = idx;
        while k > 0 {
            k -= 1;
            if p - peaks[k] < distance {
                keep[k] = false;
            } else {
                break;
            }
        }
        let mut k = idx + 1;
        while k < m {
            if peaks[k] - p < distance {
                keep[k] = false;
            } else {
                break;
            }
            k += 1;
        }
    }
    peaks
        .iter()
        .zip(&keep)
        .filter_map(|(&p, &k)| k.then_some(p))
        .collect()
}

/// Inter-beat intervals and pulse rate from peak indices.
pub fn pulse_rate(peaks: &[usize], fs: f64) -> Result<(Vec<f64>, f64)> {
    if peaks.len() < 2 {
        return Err(Error::InsufficientBeats { got: peaks.len() });
    }
    let ibis: Vec<f64> = peaks.windows(2).map(|w| (w[1] - w[0]) as f64 / fs).collect();
    let pr_bpm = 60.0 / crate::dsp::mean(&ibis);
    if !(pr_bpm > 0.0 && pr_bpm < 240.0) {
        return Err(Error::Pipeline(format!(
            "pulse rate {pr_bpm:.1} bpm outside the sane range (0, 240)"
        )));
    }
    Ok((ibis, pr_bpm))
}

/// Full per-window estimate: detect peaks, derive intervals and rate.
pub fn estimate_pulse(scli: &Scli, cfg: &PeakConfig) -> Result<PulseEstimate> {
    let peaks = detect_peaks(scli, cfg)?;
    let (ibis, pr_bpm) = pulse_rate(&peaks, scli.fs)?;
    Ok(PulseEstimate {
        window_id: scli.window_id,
        variant: scli.variant,
        peak_times: peaks.iter().map(|&p| p as f64 / scli.fs).collect(),
        ibis,
        pr_bpm,
    })
}

/// The calibration search grid: widths `k / fs` for `k = 1..=30`.
pub fn smoothing_search_widths(fs: f64) -> Vec<f64> {
    (1..=SMOOTHING_GRID_STEPS).map(|k| k as f64 / fs).collect()
}

/// Search the moving-average width against reference pulse rates.
///
/// For every (signal, reference) pair the whole grid is evaluated and the
/// width minimizing `|PR - reference|` is kept (ties keep the narrowest).
/// Items that produce no usable estimate at any width are skipped. The
/// per-item optima are averaged and snapped back onto the grid.
pub fn calibrate_smoothing(dataset: &[(Scli, f64)], base: &PeakConfig) -> Result<f64> {
    if dataset.is_empty() {
        return Err(Error::InvalidConfig("empty calibration dataset".into()));
    }
    let fs = dataset[0].0.fs;
    if dataset.iter().any(|(s, _)| s.fs != fs) {
        return Err(Error::InvalidConfig(
            "calibration items must share one sample rate".into(),
        ));
    }

    let mut optima = Vec::new();
    for (scli, reference_pr) in dataset {
        let mut best: Option<(f64, f64)> = None; // (abs error, width)
        for width in smoothing_search_widths(fs) {
            let cfg = PeakConfig {
                smooth_width_s: width,
                ..*base
            };
            let Ok(estimate) = estimate_pulse(scli, &cfg) else {
                continue;
            };
            let err = (estimate.pr_bpm - reference_pr).abs();
            if best.map_or(true, |(e, _)| err < e) {
                best = Some((err, width));
            }
        }
        if let Some((_, width)) = best {
            optima.push(width);
        } else {
            log::warn!(
                "window {}: no usable width in calibration, skipping",
                scli.window_id
            );
        }
    }
    if optima.is_empty() {
        return Err(Error::Pipeline(
            "calibration failed: no window produced peaks at any width".into(),
        ));
    }
    let mean_width = crate::dsp::mean(&optima);
    let k = ((mean_width * fs).round() as usize).clamp(1, SMOOTHING_GRID_STEPS);
    Ok(k as f64 / fs)
}

// ---------------------------------------------------------------------------
// CSV interchange
// ---------------------------------------------------------------------------

/// Parsed row of a pulse CSV (the evaluation stage's input).
#[derive(Debug, Clone, PartialEq)]
pub struct PulseRow {
    pub window_id: u64,
    pub variant: Variant,
    pub pr_bpm: f64,
    pub n_peaks: usize,
    pub mean_ibi_s: f64,
}

pub const PULSE_CSV_HEADER: &str = "window_id,variant,pr_bpm,n_peaks,mean_ibi_s";

/// Serialize estimates, one row per window.
pub fn write_pulse_csv(estimates: &[PulseEstimate]) -> String {
    let mut out = String::from(PULSE_CSV_HEADER);
    out.push('\n');
    for e in estimates {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            e.window_id,
            e.variant,
            e.pr_bpm,
            e.peak_times.len(),
            e.mean_ibi_s()
        ));
    }
    out
}

/// Parse the format written by [`write_pulse_csv`].
pub fn parse_pulse_csv(text: &str) -> Result<Vec<PulseRow>> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::parse("pulse csv", "empty file"))?;
    if header != PULSE_CSV_HEADER {
        return Err(Error::parse("pulse csv", format!("bad header {header:?}")));
    }
    let mut rows = Vec::new();
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 5 {
            return Err(Error::parse("pulse csv", format!("bad row {line:?}")));
        }
        let parse_float = |s: &str, what: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::parse("pulse csv", format!("bad {what} {s:?}")))
        };
        rows.push(PulseRow {
            window_id: f[0]
                .parse()
                .map_err(|_| Error::parse("pulse csv", format!("bad window id {:?}", f[0])))?,
            variant: f[1].parse()?,
            pr_bpm: parse_float(f[2], "pulse rate")?,
            n_peaks: f[3]
                .parse()
                .map_err(|_| Error::parse("pulse csv", format!("bad peak count {:?}", f[3])))?,
            mean_ibi_s: parse_float(f[4], "mean interval")?,
        });
    }
    Ok(rows)
}
