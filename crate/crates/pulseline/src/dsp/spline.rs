//! Natural cubic-spline resampling on uniform grids.

use crate::error::{Error, Result};

/// Resample `series` from `fs_in` to `fs_out` with a natural cubic spline
/// through the input knots, evaluated on the output grid over the same
/// time span.
pub fn resample_natural_cubic(series: &[f64], fs_in: f64, fs_out: f64) -> Result<Vec<f64>> {
    if series.len() < 4 {
        return Err(Error::SeriesTooShort {
            got: series.len(),
            need: 4,
        });
    }
    if !(fs_in > 0.0 && fs_out > 0.0) {
        return Err(Error::InvalidConfig("sample rates must be positive".into()));
    }

    let n = series.len();
    let h = 1.0 / fs_in;
    let m = second_derivatives(series, h);

    let span = (n - 1) as f64 / fs_in;
    let out_len = (span * fs_out + 1e-9).floor() as usize + 1;

    let mut out = Vec::with_capacity(out_len);
    for k in 0..out_len {
        let t = k as f64 / fs_out;
        let i = ((t * fs_in).floor() as usize).min(n - 2);
        let u = t - i as f64 * h;
        let (y0, y1) = (series[i], series[i + 1]);
        let (m0, m1) = (m[i], m[i + 1]);
        let v = y0
            + u * ((y1 - y0) / h - h / 6.0 * (2.0 * m0 + m1))
            + u * u * (m0 / 2.0)
            + u * u * u * ((m1 - m0) / (6.0 * h));
        out.push(v);
    }
    Ok(out)
}

/// Second derivatives of the natural spline: tridiagonal Thomas solve with
/// zero curvature at both ends.
fn second_derivatives(y: &[f64], h: f64) -> Vec<f64> {
    let n = y.len();
    let mut m = vec![0.0; n];
    if n < 3 {
        return m;
    }
    // Interior equations: m[i-1] + 4 m[i] + m[i+1] = 6 (y[i-1] - 2y[i] + y[i+1]) / h^2.
    let cnt = n - 2;
    let mut diag = vec![4.0; cnt];
    let mut rhs: Vec<f64> = (1..n - 1)
        .map(|i| 6.0 * (y[i - 1] - 2.0 * y[i] + y[i + 1]) / (h * h))
        .collect();
    for i in 1..cnt {
        let f = 1.0 / diag[i - 1];
        diag[i] -= f;
        rhs[i] -= f * rhs[i - 1];
    }
    m[cnt] = rhs[cnt - 1] / diag[cnt - 1];
    for i in (0..cnt - 1).rev() {
        m[i + 1] = (rhs[i] - m[i + 2]) / diag[i];
    }
    m
}
