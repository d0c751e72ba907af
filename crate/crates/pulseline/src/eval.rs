//! Comparison of extracted pulse rates against a wearable reference:
//! per-window error metrics, waveform correlation, signal-to-noise ratios,
//! and linear-fit bias correction.

use crate::error::{Error, Result};
use crate::ingest::ReferenceRecord;
use crate::scli::{butter_bandpass_zerophase, FilterConfig, RgbSeries, Variant};
use serde::{Serialize, Serializer};

/// Linear bias model `y = a * x + b` fitted to (reference PR, PR difference)
/// points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearCorrection {
    pub a: f64,
    pub b: f64,
}

impl LinearCorrection {
    /// No-op correction.
    pub const IDENTITY: LinearCorrection = LinearCorrection { a: 0.0, b: 0.0 };

    /// Published fit for the no-magnification variant.
    pub const PRESET_PAPER_B_EVM: LinearCorrection = LinearCorrection { a: 0.94, b: -69.41 };
    /// Published fit for the magnified variant.
    pub const PRESET_PAPER_A_EVM: LinearCorrection = LinearCorrection { a: 0.96, b: -74.01 };
    /// Fit derived from an ECG-chest-strap comparison of the same wearable.
    pub const PRESET_FAROS: LinearCorrection = LinearCorrection { a: 0.32, b: -30.42 };

    pub fn preset_paper(variant: Variant) -> LinearCorrection {
        match variant {
            Variant::BEvm => Self::PRESET_PAPER_B_EVM,
            Variant::AEvm => Self::PRESET_PAPER_A_EVM,
        }
    }
}

/// Per-pair absolute errors plus the aggregate error measures.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorMetrics {
    pub ae: Vec<f64>,
    pub aae: f64,
    pub sae: f64,
    pub are: f64,
    pub mae: f64,
    pub rmse: f64,
}

/// Absolute-error battery over (reference, extracted) pulse-rate pairs.
///
/// `AE(i) = |ref_i - ext_i|`; AAE is its mean, SAE its population standard
/// deviation, ARE the mean of `AE(i) / ref_i`; MAE equals AAE numerically
/// and RMSE is the root of the mean squared AE.
///
/// ```
/// let m = pulseline::eval::error_metrics(&[(80.0, 74.0), (80.0, 86.0)]).unwrap();
/// assert_eq!((m.aae, m.sae, m.are, m.rmse), (6.0, 0.0, 0.075, 6.0));
/// ```
pub fn error_metrics(pairs: &[(f64, f64)]) -> Result<ErrorMetrics> {
    if pairs.is_empty() {
        return Err(Error::DegenerateInput("no pulse-rate pairs".into()));
    }
    if pairs.iter().any(|&(r, _)| !(r > 0.0)) {
        return Err(Error::DegenerateInput(
            "reference pulse rates must be positive".into(),
        ));
    }
    let n = pairs.len() as f64;
    let ae: Vec<f64> = pairs.iter().map(|&(r, e)| (r - e).abs()).collect();
    let aae = ae.iter().sum::<f64>() / n;
    let sae = (ae.iter().map(|&a| (a - aae) * (a - aae)).sum::<f64>() / n).sqrt();
    let are = pairs
        .iter()
        .zip(&ae)
        .map(|(&(r, _), &a)| a / r)
        .sum::<f64>()
        / n;
    let rmse = (ae.iter().map(|&a| a * a).sum::<f64>() / n).sqrt();
    Ok(ErrorMetrics {
        aae,
        sae,
        are,
        mae: aae,
        rmse,
        ae,
    })
}

/// Cubic-spline resampling (see [`crate::dsp::resample_natural_cubic`]).
pub fn resample_cubic(series: &[f64], fs_in: f64, fs_out: f64) -> Result<Vec<f64>> {
    crate::dsp::resample_natural_cubic(series, fs_in, fs_out)
}

/// Pearson and Spearman correlation between two equal-length series.
/// Spearman is the Pearson correlation of mid-ranks.
pub fn correlations(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    if a.len() != b.len() || a.len() < 3 {
        return Err(Error::DegenerateInput(
            "correlation needs equal lengths of at least 3".into(),
        ));
    }
    let pearson = crate::dsp::pearson(a, b)
        .ok_or_else(|| Error::DegenerateInput("correlation of a constant series".into()))?;
    let ra = crate::dsp::midranks(a);
    let rb = crate::dsp::midranks(b);
    let spearman = crate::dsp::pearson(&ra, &rb)
        .ok_or_else(|| Error::DegenerateInput("correlation of a constant series".into()))?;
    Ok((pearson, spearman))
}

/// SNR of a raw reference waveform in decibels.
///
/// Signal power is the mean square of the band-passed waveform; noise is
/// the residual `raw - filtered`. A zero-power residual reports +infinity.
pub fn snr_reference(raw_bvp: &[f64], fs: f64, cfg: &FilterConfig) -> Result<f64> {
    let filtered = butter_bandpass_zerophase(raw_bvp, fs, cfg)?;
    let signal_power = mean_square(&filtered);
    let noise_power = mean_square(
        &raw_bvp
            .iter()
            .zip(&filtered)
            .map(|(r, f)| r - f)
            .collect::<Vec<f64>>(),
    );
    if noise_power == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (signal_power / noise_power).log10())
}

/// SNR of the filtered R, G, B channel matrix in decibels.
///
/// The rows are centered and reconstructed from the first principal
/// direction; noise is what the rank-1 reconstruction misses.
pub fn snr_video(rgb: &RgbSeries) -> Result<f64> {
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
    let direction = crate::scli::first_principal_direction(&centered)?;

    let mut signal_sum = 0.0;
    let mut noise_sum = 0.0;
    for t in 0..n {
        let p = direction[0] * centered[0][t]
            + direction[1] * centered[1][t]
            + direction[2] * centered[2][t];
        for c in 0..3 {
            let recon = direction[c] * p;
            signal_sum += recon * recon;
            let resid = centered[c][t] - recon;
            noise_sum += resid * resid;
        }
    }
    let count = (3 * n) as f64;
    if noise_sum / count == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * ((signal_sum / count) / (noise_sum / count)).log10())
}

fn mean_square(x: &[f64]) -> f64 {
    x.iter().map(|&v| v * v).sum::<f64>() / x.len() as f64
}

/// Ordinary least squares of `diff` on `pr_reference`.
///
/// `diff` is `pr_extracted - pr_reference`; the same convention is used by
/// [`apply_linear_correction`], so it cancels in corrected residuals.
pub fn fit_linear_correction(pairs: &[(f64, f64)]) -> Result<LinearCorrection> {
    if pairs.len() < 2 {
        return Err(Error::DegenerateInput(
            "linear fit needs at least two points".into(),
        ));
    }
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for &(x, y) in pairs {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::DegenerateInput(
            "linear fit needs at least two distinct reference values".into(),
        ));
    }
    let a = sxy / sxx;
    Ok(LinearCorrection { a, b: my - a * mx })
}

/// Remove the fitted reference-dependent bias from one extracted value:
/// `corrected = extracted - (a * reference + b)`.
pub fn apply_linear_correction(pr_extracted: f64, pr_reference: f64, c: &LinearCorrection) -> f64 {
    pr_extracted - (c.a * pr_reference + c.b)
}

/// Reference pulse rate over a window `[t0, t1)` (seconds relative to the
/// recording start): the mean of the HR samples overlapping the window, or
/// 60 over the mean logged inter-beat interval when no HR series exists.
pub fn reference_pr(record: &ReferenceRecord, t0: f64, t1: f64) -> Result<f64> {
    if let Some(hr) = &record.hr {
        let samples = hr.slice_relative(t0, t1);
        if !samples.is_empty() {
            return Ok(crate::dsp::mean(samples));
        }
    }
    if let Some(ibi) = &record.ibi {
        let intervals: Vec<f64> = ibi
            .entries
            .iter()
            .filter(|&&(off, _)| off >= t0 && off < t1)
            .map(|&(_, interval)| interval)
            .collect();
        if !intervals.is_empty() {
            return Ok(60.0 / crate::dsp::mean(&intervals));
        }
    }
    Err(Error::ReferenceUnavailable(format!(
        "no HR samples or IBI entries in window [{t0:.1}, {t1:.1}) s"
    )))
}

// ---------------------------------------------------------------------------
// Report assembly
// ---------------------------------------------------------------------------

/// One evaluated window.
#[derive(Debug, Clone, Serialize)]
pub struct PairReport {
    pub window_id: u64,
    pub pr_reference: f64,
    pub pr_extracted: f64,
    pub ae: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corrected_diff: Option<f64>,
}

/// Aggregate error measures, bpm except the dimensionless relative error.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MetricSummary {
    pub aae: f64,
    pub sae: f64,
    pub are: f64,
    pub mae: f64,
    pub rmse: f64,
}

impl From<&ErrorMetrics> for MetricSummary {
    fn from(m: &ErrorMetrics) -> Self {
        MetricSummary {
            aae: m.aae,
            sae: m.sae,
            are: m.are,
            mae: m.mae,
            rmse: m.rmse,
        }
    }
}

/// Bias correction applied to a report, with the metrics recomputed on the
/// corrected differences.
#[derive(Debug, Clone, Serialize)]
pub struct CorrectionReport {
    pub kind: String,
    pub a: f64,
    pub b: f64,
    pub metrics: MetricSummary,
}

/// Full per-variant evaluation result.
#[derive(Debug, Clone, Serialize)]
pub struct EvaluationReport {
    pub variant: Variant,
    pub n_windows: usize,
    pub metrics: MetricSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pearson: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spearman: Option<f64>,
    #[serde(
        skip_serializing_if = "Option::is_none",
        serialize_with = "serialize_db"
    )]
    pub snr_reference_db: Option<f64>,
    #[serde(
        skip_serializing_if = "Option::is_none",
        serialize_with = "serialize_db"
    )]
    pub snr_video_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub correction: Option<CorrectionReport>,
    pub pairs: Vec<PairReport>,
}

/// Decibel values may legitimately be infinite (zero residual); JSON has
/// no infinity literal, so those serialize as the string `"inf"`.
fn serialize_db<S: Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) if x.is_infinite() => s.serialize_str(if *x > 0.0 { "inf" } else { "-inf" }),
        Some(x) => s.serialize_f64(*x),
        None => s.serialize_none(),
    }
}

impl EvaluationReport {
    /// Assemble a report from per-window (id, reference, extracted) triples
    /// and an optional correction.
    pub fn build(
        variant: Variant,
        triples: &[(u64, f64, f64)],
        correction: Option<(String, LinearCorrection)>,
    ) -> Result<EvaluationReport> {
        let pairs_re: Vec<(f64, f64)> = triples.iter().map(|&(_, r, e)| (r, e)).collect();
        let metrics = error_metrics(&pairs_re)?;

        let correction_report = match &correction {
            Some((kind, c)) => {
                let corrected_pairs: Vec<(f64, f64)> = triples
                    .iter()
                    .map(|&(_, r, e)| (r, apply_linear_correction(e, r, c)))
                    .collect();
                let m = error_metrics(&corrected_pairs)?;
                Some(CorrectionReport {
                    kind: kind.clone(),
                    a: c.a,
                    b: c.b,
                    metrics: MetricSummary::from(&m),
                })
            }
            None => None,
        };

        let pairs = triples
            .iter()
            .zip(&metrics.ae)
            .map(|(&(window_id, r, e), &ae)| PairReport {
                window_id,
                pr_reference: r,
                pr_extracted: e,
                ae,
                corrected_diff: correction
                    .as_ref()
                    .map(|(_, c)| (e - r) - (c.a * r + c.b)),
            })
            .collect();

        Ok(EvaluationReport {
            variant,
            n_windows: triples.len(),
            metrics: MetricSummary::from(&metrics),
            pearson: None,
            spearman: None,
            snr_reference_db: None,
            snr_video_db: None,
            correction: correction_report,
            pairs,
        })
    }

    /// Per-window pairs as CSV.
    pub fn pairs_csv(&self) -> String {
        let mut out = String::from("window_id,pr_reference,pr_extracted,ae,corrected_diff\n");
        for p in &self.pairs {
            let corrected = p
                .corrected_diff
                .map_or(String::new(), |v| format!("{v}"));
            out.push_str(&format!(
                "{},{},{},{},{corrected}\n",
                p.window_id, p.pr_reference, p.pr_extracted, p.ae
            ));
        }
        out
    }

    /// Plot-ready CSV of (reference, difference, corrected difference).
    pub fn fit_csv(&self) -> String {
        let mut out = String::from("pr_reference,diff,corrected_diff\n");
        for p in &self.pairs {
            let diff = p.pr_extracted - p.pr_reference;
            let corrected = p
                .corrected_diff
                .map_or(String::new(), |v| format!("{v}"));
            out.push_str(&format!("{},{diff},{corrected}\n", p.pr_reference));
        }
        out
    }
}
