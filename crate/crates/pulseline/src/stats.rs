//! Group-comparison battery: normality testing, two-sample significance
//! tests, and effect sizes, wired together by the decision rule used in
//! the evaluation (normal data takes the parametric branch).

use crate::error::{Error, Result};
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

/// Significance threshold for the normality gate.
pub const NORMALITY_ALPHA: f64 = 0.05;

fn standard_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("standard normal")
}

/// Ascending-power polynomial evaluation.
fn poly(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

// ---------------------------------------------------------------------------
// Shapiro-Wilk
// ---------------------------------------------------------------------------

/// Shapiro-Wilk W statistic and approximate p-value for 3 <= n <= 5000.
///
/// Coefficients use the normal order-statistic approximation with the
/// published polynomial corrections for the two largest weights; p-values
/// come from the standard normalizing transforms of W (an exact expression
/// at n = 3, a log-gamma-style transform for n <= 11, and a log-normal
/// transform above that).
pub fn shapiro_wilk(sample: &[f64]) -> Result<(f64, f64)> {
    let n = sample.len();
    if !(3..=5000).contains(&n) {
        return Err(Error::DegenerateInput(format!(
            "Shapiro-Wilk needs 3 <= n <= 5000, got {n}"
        )));
    }
    let mut x = sample.to_vec();
    x.sort_by(|a, b| a.total_cmp(b));
    if x[n - 1] - x[0] <= 0.0 {
        return Err(Error::DegenerateInput(
            "Shapiro-Wilk is undefined for zero-range samples".into(),
        ));
    }

    let mean = crate::dsp::mean(&x);
    let ssq: f64 = x.iter().map(|&v| (v - mean) * (v - mean)).sum();

    // Half-vector of coefficients (the full vector is antisymmetric).
    let n2 = n / 2;
    let coeffs = coefficients(n);
    let numerator: f64 = (0..n2).map(|i| coeffs[i] * (x[n - 1 - i] - x[i])).sum();
    let w = ((numerator * numerator) / ssq).min(1.0);

    Ok((w, w_p_value(w, n)))
}

/// Half-vector of positive Shapiro-Wilk weights, largest first.
fn coefficients(n: usize) -> Vec<f64> {
    const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;
    // Corrections for the largest and second-largest weights.
    const C1: [f64; 6] = [0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056];
    const C2: [f64; 6] = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633];

    if n == 3 {
        return vec![SQRT_HALF];
    }
    let normal = standard_normal();
    let n2 = n / 2;
    let an25 = n as f64 + 0.25;
    // Expected normal order statistics for the lower half (all negative).
    let m: Vec<f64> = (1..=n2)
        .map(|i| normal.inverse_cdf((i as f64 - 0.375) / an25))
        .collect();
    let summ2: f64 = 2.0 * m.iter().map(|v| v * v).sum::<f64>();
    let ssumm2 = summ2.sqrt();
    let rsn = 1.0 / (n as f64).sqrt();

    let a1 = poly(&C1, rsn) - m[0] / ssumm2;
    let mut out = vec![0.0; n2];
    out[0] = a1;
    if n > 5 {
        let a2 = poly(&C2, rsn) - m[1] / ssumm2;
        out[1] = a2;
        let fac = ((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1])
            / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2))
            .sqrt();
        for i in 2..n2 {
            out[i] = -m[i] / fac;
        }
    } else {
        let fac = ((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1)).sqrt();
        for i in 1..n2 {
            out[i] = -m[i] / fac;
        }
    }
    out
}

/// Upper-tail p for the W statistic.
fn w_p_value(w: f64, n: usize) -> f64 {
    const PI6: f64 = 1.909_859_317_102_744; // 6 / pi
    const STQR: f64 = 1.047_197_551_196_597_7; // asin(sqrt(3/4))
    const G: [f64; 2] = [-2.273, 0.459];
    const C3: [f64; 4] = [0.5440, -0.39978, 0.025054, -6.714e-4];
    const C4: [f64; 4] = [1.3822, -0.77857, 0.062767, -0.0020322];
    const C5: [f64; 4] = [-1.5861, -0.31082, -0.083751, 0.0038915];
    const C6: [f64; 3] = [-0.4803, -0.082676, 0.0030302];

    if n == 3 {
        return (PI6 * ((w.sqrt()).asin() - STQR)).clamp(0.0, 1.0);
    }
    let y = (1.0 - w).ln();
    let an = n as f64;
    let (z, normal) = if n <= 11 {
        let gamma = poly(&G, an);
        if y >= gamma {
            return 1e-19;
        }
        let yy = -(gamma - y).ln();
        let mu = poly(&C3, an);
        let sigma = poly(&C4, an).exp();
        ((yy - mu) / sigma, standard_normal())
    } else {
        let u = an.ln();
        let mu = poly(&C5, u);
        let sigma = poly(&C6, u).exp();
        ((y - mu) / sigma, standard_normal())
    };
    (1.0 - normal.cdf(z)).clamp(0.0, 1.0)
}

// ---------------------------------------------------------------------------
// Two-sample tests
// ---------------------------------------------------------------------------

fn sample_variance(x: &[f64]) -> f64 {
    let m = crate::dsp::mean(x);
    x.iter().map(|&v| (v - m) * (v - m)).sum::<f64>() / (x.len() - 1) as f64
}

/// Two-sided unpaired Student's t-test with pooled variance.
pub fn t_test_unpaired(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::DegenerateInput(
            "t-test needs at least two samples per group".into(),
        ));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let pooled =
        ((na - 1.0) * sample_variance(a) + (nb - 1.0) * sample_variance(b)) / (na + nb - 2.0);
    if !(pooled > 0.0) {
        return Err(Error::DegenerateInput(
            "t-test pooled variance is zero".into(),
        ));
    }
    let t = (crate::dsp::mean(a) - crate::dsp::mean(b)) / (pooled * (1.0 / na + 1.0 / nb)).sqrt();
    let df = na + nb - 2.0;
    let dist = StudentsT::new(0.0, 1.0, df).expect("valid dof");
    let p = (2.0 * (1.0 - dist.cdf(t.abs()))).clamp(0.0, 1.0);
    Ok((t, p))
}

/// Two-sided Welch's t-test (unequal variances).
pub fn t_test_welch(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::DegenerateInput(
            "t-test needs at least two samples per group".into(),
        ));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (va, vb) = (sample_variance(a) / na, sample_variance(b) / nb);
    if !(va + vb > 0.0) {
        return Err(Error::DegenerateInput(
            "t-test pooled variance is zero".into(),
        ));
    }
    let t = (crate::dsp::mean(a) - crate::dsp::mean(b)) / (va + vb).sqrt();
    let df = (va + vb) * (va + vb) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    let dist = StudentsT::new(0.0, 1.0, df).expect("valid dof");
    let p = (2.0 * (1.0 - dist.cdf(t.abs()))).clamp(0.0, 1.0);
    Ok((t, p))
}

/// Largest pooled size for which the exact rank-sum null distribution is
/// enumerated (untied data only).
pub const WILCOXON_EXACT_LIMIT: usize = 12;

/// Two-sided Mann-Whitney U (Wilcoxon rank-sum) test.
///
/// Returns the U statistic of the first sample. For small untied inputs
/// (`n_a + n_b <= 12`) the p-value is exact by enumeration; otherwise the
/// normal approximation with tie and continuity corrections applies.
pub fn wilcoxon_rank_sum(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::DegenerateInput(
            "rank-sum test needs nonempty groups".into(),
        ));
    }
    let (na, nb) = (a.len(), b.len());
    let mut pooled: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
    let ranks = crate::dsp::midranks(&pooled);
    let ra: f64 = ranks[..na].iter().sum();
    let u_a = ra - (na * (na + 1)) as f64 / 2.0;
    let u_b = (na * nb) as f64 - u_a;

    pooled.sort_by(|x, y| x.total_cmp(y));
    let has_ties = pooled.windows(2).any(|w| w[0] == w[1]);

    let p = if na + nb <= WILCOXON_EXACT_LIMIT && !has_ties {
        exact_rank_sum_p(u_a as u64, na, nb)
    } else {
        let n = (na + nb) as f64;
        let tie_term: f64 = tie_groups(&pooled)
            .into_iter()
            .map(|t| {
                let t = t as f64;
                t * t * t - t
            })
            .sum();
        let mu = (na * nb) as f64 / 2.0;
        let sigma_sq = (na * nb) as f64 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
        if sigma_sq <= 0.0 {
            1.0
        } else {
            let z = (u_a.max(u_b) - mu - 0.5) / sigma_sq.sqrt();
            (2.0 * (1.0 - standard_normal().cdf(z))).clamp(0.0, 1.0)
        }
    };
    Ok((u_a, p))
}

fn tie_groups(sorted: &[f64]) -> Vec<usize> {
    let mut groups = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        if j > i {
            groups.push(j - i + 1);
        }
        i = j + 1;
    }
    groups
}

/// Exact two-sided p by complete enumeration of the `C(n_a + n_b, n_a)`
/// rank assignments: twice the smaller tail, capped at one.
fn exact_rank_sum_p(u: u64, na: usize, nb: usize) -> f64 {
    let n = na + nb;
    debug_assert!(n <= WILCOXON_EXACT_LIMIT);
    let mut counts = vec![0u64; na * nb + 1];
    let mut total = 0u64;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != na {
            continue;
        }
        // U = rank sum of the subset minus the minimum possible rank sum.
        let mut rank_sum = 0u64;
        for pos in 0..n {
            if mask & (1 << pos) != 0 {
                rank_sum += pos as u64 + 1;
            }
        }
        counts[(rank_sum - (na * (na + 1) / 2) as u64) as usize] += 1;
        total += 1;
    }
    let le: u64 = counts[..=(u as usize).min(na * nb)].iter().sum();
    let ge: u64 = counts[(u as usize).min(na * nb)..].iter().sum();
    let tail = le.min(ge) as f64 / total as f64;
    (2.0 * tail).min(1.0)
}

// ---------------------------------------------------------------------------
// Effect sizes
// ---------------------------------------------------------------------------

/// Cohen's d with the pooled (n - 1 weighted) standard deviation.
pub fn cohens_d(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::DegenerateInput(
            "Cohen's d needs at least two samples per group".into(),
        ));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let pooled =
        ((na - 1.0) * sample_variance(a) + (nb - 1.0) * sample_variance(b)) / (na + nb - 2.0);
    if !(pooled > 0.0) {
        return Err(Error::DegenerateInput("zero pooled standard deviation".into()));
    }
    Ok((crate::dsp::mean(a) - crate::dsp::mean(b)) / pooled.sqrt())
}

/// Cliff's delta: normalized dominance-count difference in [-1, 1].
///
/// Computed by sorting one group and binary-searching each value of the
/// other, so ties contribute to neither count.
pub fn cliffs_delta(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::DegenerateInput(
            "Cliff's delta needs nonempty groups".into(),
        ));
    }
    let mut sorted_b = b.to_vec();
    sorted_b.sort_by(|x, y| x.total_cmp(y));
    let m = sorted_b.len();
    let mut greater = 0u64; // pairs with a_i > b_j
    let mut less = 0u64; // pairs with a_i < b_j
    for &x in a {
        let lo = sorted_b.partition_point(|&v| v < x);
        let hi = sorted_b.partition_point(|&v| v <= x);
        greater += lo as u64;
        less += (m - hi) as u64;
    }
    Ok((greater as f64 - less as f64) / (a.len() * m) as f64)
}

// ---------------------------------------------------------------------------
// Decision rule
// ---------------------------------------------------------------------------

/// Which two-sample test a comparison used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TestName {
    #[serde(rename = "t-test")]
    TTest,
    #[serde(rename = "wilcoxon-rank-sum")]
    WilcoxonRankSum,
}

/// Which effect size accompanied it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EffectName {
    #[serde(rename = "cohens-d")]
    CohensD,
    #[serde(rename = "cliffs-delta")]
    CliffsDelta,
}

/// Result of comparing two independent groups.
#[derive(Debug, Clone, Serialize)]
pub struct GroupComparison {
    pub normal_a: bool,
    pub normal_b: bool,
    pub shapiro_w_a: f64,
    pub shapiro_p_a: f64,
    pub shapiro_w_b: f64,
    pub shapiro_p_b: f64,
    pub test_name: TestName,
    pub statistic: f64,
    pub p_value: f64,
    pub effect_name: EffectName,
    pub effect_value: f64,
}

/// Shapiro-Wilk on both groups, then the parametric branch (Student's t
/// plus Cohen's d) when both look normal at the 0.05 threshold, otherwise
/// the rank-sum test plus Cliff's delta. Set `welch` to swap in the
/// unequal-variance t statistic on the parametric branch.
pub fn compare_groups(a: &[f64], b: &[f64], welch: bool) -> Result<GroupComparison> {
    if a.len() < 3 || b.len() < 3 {
        return Err(Error::DegenerateInput(
            "group comparison needs at least three samples per group".into(),
        ));
    }
    let (wa, pa) = shapiro_wilk(a)?;
    let (wb, pb) = shapiro_wilk(b)?;
    let normal_a = pa > NORMALITY_ALPHA;
    let normal_b = pb > NORMALITY_ALPHA;

    let (test_name, statistic, p_value, effect_name, effect_value) = if normal_a && normal_b {
        let (t, p) = if welch {
            t_test_welch(a, b)?
        } else {
            t_test_unpaired(a, b)?
        };
        (TestName::TTest, t, p, EffectName::CohensD, cohens_d(a, b)?)
    } else {
        let (u, p) = wilcoxon_rank_sum(a, b)?;
        (
            TestName::WilcoxonRankSum,
            u,
            p,
            EffectName::CliffsDelta,
            cliffs_delta(a, b)?,
        )
    };

    Ok(GroupComparison {
        normal_a,
        normal_b,
        shapiro_w_a: wa,
        shapiro_p_a: pa,
        shapiro_w_b: wb,
        shapiro_p_b: pb,
        test_name,
        statistic,
        p_value,
        effect_name,
        effect_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn shapiro_rejects_bad_sizes_and_constant_input() {
        assert!(shapiro_wilk(&[1.0, 2.0]).is_err());
        assert!(shapiro_wilk(&[3.0; 10]).is_err());
    }

    #[test]
    fn shapiro_n3_exact_form() {
        // W for n = 3 is (x3 - x1)^2 / (2 ssq); p has a closed form.
        let x = [1.0, 2.0, 4.0];
        let (w, p) = shapiro_wilk(&x).unwrap();
        let ssq = 14.0 / 3.0;
        assert_abs_diff_eq!(w, 9.0 / (2.0 * ssq), epsilon = 1e-12);
        assert!(p > 0.0 && p < 1.0);
    }

    #[test]
    fn shapiro_uniformish_data_scores_below_normal_data() {
        // A clearly bimodal sample should look less normal than a bell-ish
        // one of the same size.
        let bimodal: Vec<f64> = (0..20)
            .map(|i| if i % 2 == 0 { i as f64 * 0.01 } else { 100.0 + i as f64 * 0.01 })
            .collect();
        let bellish: Vec<f64> = (0..20)
            .map(|i| {
                let u = (i as f64 + 0.5) / 20.0;
                // crude normal scores
                statrs::distribution::Normal::new(0.0, 1.0)
                    .unwrap()
                    .inverse_cdf(u)
            })
            .collect();
        let (w_bi, p_bi) = shapiro_wilk(&bimodal).unwrap();
        let (w_bell, p_bell) = shapiro_wilk(&bellish).unwrap();
        assert!(w_bi < w_bell);
        assert!(p_bi < 0.05, "bimodal p {p_bi}");
        assert!(p_bell > 0.5, "bell p {p_bell}");
    }

    #[test]
    fn t_test_identical_groups() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let (t, p) = t_test_unpaired(&a, &a).unwrap();
        assert_abs_diff_eq!(t, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn t_test_separated_groups() {
        let a: Vec<f64> = (0..10).map(|i| 100.0 + (i % 3) as f64 * 0.1).collect();
        let b: Vec<f64> = (0..10).map(|i| 1.0 + (i % 3) as f64 * 0.1).collect();
        let (_, p) = t_test_unpaired(&a, &b).unwrap();
        assert!(p < 1e-6);
    }

    #[test]
    fn t_test_zero_variance_errors() {
        assert!(t_test_unpaired(&[1.0, 1.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn rank_sum_complete_separation_small_n() {
        let (u, p) = wilcoxon_rank_sum(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap();
        assert_eq!(u, 0.0);
        assert_abs_diff_eq!(p, 0.1, epsilon = 1e-12);
    }

    #[test]
    fn rank_sum_singletons_tied() {
        let (u, p) = wilcoxon_rank_sum(&[2.0], &[2.0]).unwrap();
        assert_eq!(u, 0.5);
        assert_eq!(p, 1.0);
    }

    #[test]
    fn rank_sum_exact_symmetry() {
        let a = [1.0, 4.0, 7.0, 9.0];
        let b = [2.0, 3.0, 8.0, 11.0];
        let (ua, pa) = wilcoxon_rank_sum(&a, &b).unwrap();
        let (ub, pb) = wilcoxon_rank_sum(&b, &a).unwrap();
        assert_eq!(ua + ub, 16.0);
        assert_abs_diff_eq!(pa, pb, epsilon = 1e-12);
    }

    #[test]
    fn exact_and_approximate_agree_for_n6() {
        // Same untied data through both routes: the production function
        // takes the exact path at this size, and the test recomputes the
        // continuity-corrected normal approximation by hand.
        let a = [0.31, 1.47, 2.21, 3.9, 5.5, 7.01];
        let b = [0.9, 2.8, 4.4, 6.2, 8.3, 9.9];
        let (u_a, p_exact) = wilcoxon_rank_sum(&a, &b).unwrap();

        let u_b = 36.0 - u_a;
        let mu = 18.0;
        let sigma = (36.0 * 13.0 / 12.0f64).sqrt();
        let z = (u_a.max(u_b) - mu - 0.5) / sigma;
        let p_approx = 2.0 * (1.0 - standard_normal().cdf(z));
        assert!(
            (p_exact - p_approx).abs() < 0.02,
            "exact {p_exact} vs approx {p_approx}"
        );
    }

    #[test]
    fn cohens_d_unit_difference() {
        // Two groups with mean difference 1 and both SDs 1.
        let a = [0.0, 1.0, 2.0]; // mean 1, var 1
        let b = [-1.0, 0.0, 1.0]; // mean 0, var 1
        assert_abs_diff_eq!(cohens_d(&a, &b).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(cohens_d(&a, &a).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn cohens_d_matches_direct_formula() {
        let a = [3.1, 4.7, 5.2, 6.9, 7.7];
        let b = [1.2, 2.8, 3.3, 4.1];
        let va = sample_variance(&a);
        let vb = sample_variance(&b);
        let pooled = ((4.0 * va + 3.0 * vb) / 7.0).sqrt();
        let expected = (crate::dsp::mean(&a) - crate::dsp::mean(&b)) / pooled;
        assert_abs_diff_eq!(cohens_d(&a, &b).unwrap(), expected, epsilon = 1e-12);
    }

    #[test]
    fn cliffs_delta_extremes_and_zero() {
        assert_eq!(cliffs_delta(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap(), -1.0);
        assert_eq!(cliffs_delta(&[4.0, 5.0, 6.0], &[1.0, 2.0, 3.0]).unwrap(), 1.0);
        assert_eq!(cliffs_delta(&[2.0, 2.0], &[2.0, 2.0]).unwrap(), 0.0);
    }

    #[test]
    fn cliffs_delta_matches_brute_force_on_random_groups() {
        let mut state = 0xDEADBEEFu64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            ((state >> 40) as f64) / 256.0 // coarse values force ties
        };
        for _ in 0..25 {
            let a: Vec<f64> = (0..30).map(|_| next()).collect();
            let b: Vec<f64> = (0..30).map(|_| next()).collect();
            let fast = cliffs_delta(&a, &b).unwrap();
            let mut greater = 0i64;
            let mut less = 0i64;
            for &x in &a {
                for &y in &b {
                    if x > y {
                        greater += 1;
                    } else if x < y {
                        less += 1;
                    }
                }
            }
            let slow = (greater - less) as f64 / 900.0;
            assert_eq!(fast, slow);
        }
    }

    #[test]
    fn cliffs_delta_antisymmetry_shift_and_scale_invariance() {
        let a = [1.0, 3.0, 3.0, 7.0, 9.0];
        let b = [2.0, 3.0, 5.0, 8.0];
        let d = cliffs_delta(&a, &b).unwrap();
        assert_eq!(cliffs_delta(&b, &a).unwrap(), -d);
        let shift = |v: &[f64]| -> Vec<f64> { v.iter().map(|x| x + 13.7).collect() };
        assert_eq!(cliffs_delta(&shift(&a), &shift(&b)).unwrap(), d);
        let scale = |v: &[f64]| -> Vec<f64> { v.iter().map(|x| x * 2.5).collect() };
        assert_eq!(cliffs_delta(&scale(&a), &scale(&b)).unwrap(), d);

        // Shift and positive scale also leave U and Cohen's d alone.
        let (u0, _) = wilcoxon_rank_sum(&a, &b).unwrap();
        let (u1, _) = wilcoxon_rank_sum(&scale(&shift(&a)), &scale(&shift(&b))).unwrap();
        assert_eq!(u0, u1);
        let d0 = cohens_d(&a, &b).unwrap();
        let d1 = cohens_d(&scale(&a), &scale(&b)).unwrap();
        assert_abs_diff_eq!(d0, d1, epsilon = 1e-12);
        let d2 = cohens_d(&shift(&a), &shift(&b)).unwrap();
        assert_abs_diff_eq!(d0, d2, epsilon = 1e-12);
    }

    #[test]
    fn compare_groups_takes_the_parametric_branch_on_normal_data() {
        // Normal scores make maximally bell-shaped samples.
        let normal = Normal::new(0.0, 1.0).unwrap();
        let a: Vec<f64> = (0..20)
            .map(|i| 73.0 + 6.0 * normal.inverse_cdf((i as f64 + 0.5) / 20.0))
            .collect();
        let b: Vec<f64> = (0..15)
            .map(|i| 81.0 + 6.0 * normal.inverse_cdf((i as f64 + 0.5) / 15.0))
            .collect();
        let cmp = compare_groups(&a, &b, false).unwrap();
        assert!(cmp.normal_a && cmp.normal_b);
        assert_eq!(cmp.test_name, TestName::TTest);
        assert_eq!(cmp.effect_name, EffectName::CohensD);
        assert!(cmp.p_value < 0.05);
        assert!(cmp.effect_value < 0.0);
    }

    #[test]
    fn compare_groups_takes_the_rank_branch_on_skewed_data() {
        let skewed: Vec<f64> = (0..20).map(|i| ((i as f64) * 0.47).exp()).collect();
        let normalish: Vec<f64> = (0..20)
            .map(|i| {
                50.0 + 4.0
                    * Normal::new(0.0, 1.0)
                        .unwrap()
                        .inverse_cdf((i as f64 + 0.5) / 20.0)
            })
            .collect();
        let cmp = compare_groups(&skewed, &normalish, false).unwrap();
        assert!(!cmp.normal_a);
        assert_eq!(cmp.test_name, TestName::WilcoxonRankSum);
        assert_eq!(cmp.effect_name, EffectName::CliffsDelta);
        assert!((-1.0..=1.0).contains(&cmp.effect_value));
    }

    #[test]
    fn branch_selection_depends_only_on_normality_gate() {
        let normal = Normal::new(0.0, 1.0).unwrap();
        let a: Vec<f64> = (0..12)
            .map(|i| 10.0 + normal.inverse_cdf((i as f64 + 0.5) / 12.0))
            .collect();
        let cmp = compare_groups(&a, &a.iter().map(|x| x + 0.01).collect::<Vec<_>>(), false)
            .unwrap();
        assert_eq!(
            cmp.test_name == TestName::TTest,
            cmp.normal_a && cmp.normal_b
        );
    }
}
