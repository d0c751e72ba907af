//! Shared one-dimensional signal helpers.

mod butter;
mod fft;
mod spline;

pub use butter::ButterworthBandpass;
pub use fft::IdealBandpass;
pub use spline::resample_natural_cubic;

/// First difference, `d[i] = x[i+1] - x[i]`; output is one sample shorter.
pub fn first_difference(x: &[f64]) -> Vec<f64> {
    x.windows(2).map(|w| w[1] - w[0]).collect()
}

/// Reflect an index into `[0, n)` without repeating the edge sample.
#[inline]
fn reflect101(i: isize, n: usize) -> usize {
    let n = n as isize;
    let mut i = i;
    while i < 0 || i >= n {
        if i < 0 {
            i = -i;
        }
        if i >= n {
            i = 2 * n - 2 - i;
        }
    }
    i as usize
}

/// Centered moving average of `width` samples with reflected ends.
///
/// Even widths use the left-heavier center: a width-12 window around
/// sample `i` spans offsets `-6..=5`.
pub fn moving_average_centered(x: &[f64], width: usize) -> Vec<f64> {
    assert!(width >= 1, "moving average width must be at least 1");
    if x.is_empty() {
        return Vec::new();
    }
    let n = x.len();
    let start_off = -((width / 2) as isize);
    let inv = 1.0 / width as f64;
    (0..n)
        .map(|i| {
            let mut acc = 0.0;
            for t in 0..width as isize {
                acc += x[reflect101(i as isize + start_off + t, n)];
            }
            acc * inv
        })
        .collect()
}

/// Scale to [0, 1]; `None` when the signal is flat.
pub fn minmax_normalize(x: &[f64]) -> Option<Vec<f64>> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in x {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !(hi > lo) {
        return None;
    }
    let span = hi - lo;
    Some(x.iter().map(|&v| (v - lo) / span).collect())
}

/// Linear-interpolation quantile of an unsorted sample, `q` in [0, 1].
pub fn quantile_linear(x: &[f64], q: f64) -> f64 {
    assert!(!x.is_empty());
    assert!((0.0..=1.0).contains(&q));
    let mut s = x.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    let pos = q * (s.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let frac = pos - lo as f64;
    if lo + 1 < s.len() {
        s[lo] + frac * (s[lo + 1] - s[lo])
    } else {
        s[lo]
    }
}

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Pearson product-moment correlation. `None` when either input is constant.
pub fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    assert_eq!(a.len(), b.len());
    let (ma, mb) = (mean(a), mean(b));
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa <= 0.0 || sbb <= 0.0 {
        return None;
    }
    Some(sab / (saa.sqrt() * sbb.sqrt()))
}

/// Mid-ranks (1-based); tied values share the average of their rank span.
pub fn midranks(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| x[i].total_cmp(&x[j]));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && x[order[j + 1]] == x[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

#[cfg(test)]
pub(crate) mod tests_support {
    use std::f64::consts::PI;

    /// Least-squares amplitude of a known-frequency sinusoid starting at t = 0.
    pub fn fit_amplitude(y: &[f64], freq: f64, fs: f64) -> f64 {
        let mut ss = 0.0;
        let mut sc = 0.0;
        let mut cc = 0.0;
        let mut ys = 0.0;
        let mut yc = 0.0;
        for (i, &v) in y.iter().enumerate() {
            let t = i as f64 / fs;
            let (s, c) = (2.0 * PI * freq * t).sin_cos();
            ss += s * s;
            cc += c * c;
            sc += s * c;
            ys += v * s;
            yc += v * c;
        }
        let det = ss * cc - sc * sc;
        let a = (ys * cc - yc * sc) / det;
        let b = (yc * ss - ys * sc) / det;
        (a * a + b * b).sqrt()
    }
}
