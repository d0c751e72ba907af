//! Empatica-E4-style reference recordings.
//!
//! File layout (vendor convention):
//! - `BVP.csv`: line 1 start timestamp (seconds, UTC), line 2 sample rate,
//!   lines 3+ one sample each
//! - `HR.csv`: same shape as `BVP.csv`
//! - `IBI.csv`: line 1 start timestamp, lines 2+ `offset,interval` seconds

use crate::error::{Error, Result};
use std::fs;
use std::path::Path;

/// Uniformly sampled series with an absolute start timestamp.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSeries {
    pub start_ts: f64,
    pub fs: f64,
    pub samples: Vec<f64>,
}

impl SampledSeries {
    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.fs
    }

    /// Samples whose timestamps fall in `[t0, t1)` relative to `start_ts`.
    pub fn slice_relative(&self, t0: f64, t1: f64) -> &[f64] {
        let lo = (t0 * self.fs).ceil().max(0.0) as usize;
        let hi = ((t1 * self.fs).ceil().max(0.0) as usize).min(self.samples.len());
        if lo >= hi {
            &[]
        } else {
            &self.samples[lo..hi]
        }
    }
}

/// Inter-beat interval log: `(offset from start, interval)` pairs in seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct IbiSeries {
    pub start_ts: f64,
    pub entries: Vec<(f64, f64)>,
}

/// A subject's reference recording.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceRecord {
    pub bvp: SampledSeries,
    pub hr: Option<SampledSeries>,
    pub ibi: Option<IbiSeries>,
}

/// Load a reference directory; `BVP.csv` is required.
pub fn load_reference_dir(dir: &Path) -> Result<ReferenceRecord> {
    let bvp_path = dir.join("BVP.csv");
    if !bvp_path.is_file() {
        return Err(Error::ReferenceUnavailable(format!(
            "missing {}",
            bvp_path.display()
        )));
    }
    let bvp = parse_sampled_csv(&read(&bvp_path)?, "BVP.csv")?;

    let hr_path = dir.join("HR.csv");
    let hr = if hr_path.is_file() {
        Some(parse_sampled_csv(&read(&hr_path)?, "HR.csv")?)
    } else {
        None
    };

    let ibi_path = dir.join("IBI.csv");
    let ibi = if ibi_path.is_file() {
        Some(parse_ibi_csv(&read(&ibi_path)?)?)
    } else {
        None
    };

    Ok(ReferenceRecord { bvp, hr, ibi })
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn parse_f64(what: &str, lineno: usize, s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::parse(what, format!("non-numeric value {s:?} on line {lineno}")))?;
    if !v.is_finite() {
        return Err(Error::parse(what, format!("non-finite value on line {lineno}")));
    }
    Ok(v)
}

/// Parse the timestamp/rate/samples layout shared by `BVP.csv` and `HR.csv`.
pub fn parse_sampled_csv(text: &str, what: &str) -> Result<SampledSeries> {
    let mut lines = numbered_lines(text);
    let (n0, first) = lines
        .next()
        .ok_or_else(|| Error::parse(what, "empty file"))?;
    let (n1, second) = lines
        .next()
        .ok_or_else(|| Error::parse(what, "missing sample-rate line"))?;
    let start_ts = parse_f64(what, n0, first)?;
    let fs = parse_f64(what, n1, second)?;
    if !(fs > 0.0) {
        return Err(Error::parse(what, format!("nonpositive sample rate {fs}")));
    }
    let mut samples = Vec::new();
    for (lineno, line) in lines {
        samples.push(parse_f64(what, lineno, line)?);
    }
    Ok(SampledSeries {
        start_ts,
        fs,
        samples,
    })
}

/// Parse `IBI.csv`: start timestamp then `offset,interval` rows.
pub fn parse_ibi_csv(text: &str) -> Result<IbiSeries> {
    const WHAT: &str = "IBI.csv";
    let mut lines = numbered_lines(text);
    let (n0, first) = lines
        .next()
        .ok_or_else(|| Error::parse(WHAT, "empty file"))?;
    let start_ts = parse_f64(WHAT, n0, first)?;
    let mut entries: Vec<(f64, f64)> = Vec::new();
    for (lineno, line) in lines {
        let (off_s, int_s) = line.split_once(',').ok_or_else(|| {
            Error::parse(WHAT, format!("line {lineno} is not `offset,interval`"))
        })?;
        let offset = parse_f64(WHAT, lineno, off_s)?;
        let interval = parse_f64(WHAT, lineno, int_s)?;
        if interval <= 0.0 {
            return Err(Error::parse(
                WHAT,
                format!("nonpositive interval on line {lineno}"),
            ));
        }
        if let Some(&(prev, _)) = entries.last() {
            if offset < prev {
                return Err(Error::parse(
                    WHAT,
                    format!("offsets decrease on line {lineno}"),
                ));
            }
        }
        entries.push((offset, interval));
    }
    Ok(IbiSeries { start_ts, entries })
}

/// Non-empty lines with 1-based numbering; trailing blank lines are ignored.
fn numbered_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

/// Serialize the timestamp/rate/samples layout.
pub fn format_sampled_csv(series: &SampledSeries) -> String {
    let mut out = format!("{}\n{}\n", series.start_ts, series.fs);
    for s in &series.samples {
        out.push_str(&format!("{s}\n"));
    }
    out
}

/// Serialize an IBI log.
pub fn format_ibi_csv(ibi: &IbiSeries) -> String {
    let mut out = format!("{}\n", ibi.start_ts);
    for (off, int) in &ibi.entries {
        out.push_str(&format!("{off},{int}\n"));
    }
    out
}
