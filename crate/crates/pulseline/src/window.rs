//! Fixed-length analysis windows with overlap.

use crate::error::{Error, Result};

/// Window length and stride in seconds. Defaults: 30 s windows advancing
/// by 10 s (20 s overlap between adjacent windows).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowSpec {
    pub length_s: f64,
    pub step_s: f64,
}

impl Default for WindowSpec {
    fn default() -> Self {
        WindowSpec {
            length_s: 30.0,
            step_s: 10.0,
        }
    }
}

impl WindowSpec {
    pub fn new(length_s: f64, step_s: f64) -> Result<Self> {
        let spec = WindowSpec { length_s, step_s };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step_s > 0.0 && self.step_s <= self.length_s) {
            return Err(Error::InvalidConfig(format!(
                "window step must satisfy 0 < step <= length, got step={} length={}",
                self.step_s, self.length_s
            )));
        }
        Ok(())
    }

    /// Window length in items at a given rate (round half up).
    pub fn length_items(&self, fps: f64) -> usize {
        (self.length_s * fps).round() as usize
    }

    /// Step in items at a given rate (round half up).
    pub fn step_items(&self, fps: f64) -> usize {
        ((self.step_s * fps).round() as usize).max(1)
    }
}

/// Half-open index ranges of complete windows over `item_count` items.
///
/// Windows start at multiples of the step; a trailing partial window is
/// dropped. Fewer items than one window yields an empty list.
///
/// ```
/// use pulseline::window::{segment, WindowSpec};
/// let windows = segment(1200, 30.0, &WindowSpec::default()).unwrap();
/// assert_eq!(windows, vec![(0, 900), (300, 1200)]);
/// ```
pub fn segment(item_count: usize, fps: f64, spec: &WindowSpec) -> Result<Vec<(usize, usize)>> {
    if !(fps > 0.0) {
        return Err(Error::InvalidConfig(format!("fps must be positive, got {fps}")));
    }
    spec.validate()?;
    let len = spec.length_items(fps);
    let step = spec.step_items(fps);
    if len == 0 {
        return Err(Error::InvalidConfig(
            "window length rounds to zero items".into(),
        ));
    }
    let mut out = Vec::new();
    let mut start = 0usize;
    while start + len <= item_count {
        out.push((start, start + len));
        start += step;
    }
    Ok(out)
}
