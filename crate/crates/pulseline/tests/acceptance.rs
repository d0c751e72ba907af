//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line (run with `cargo test --test acceptance -- --nocapture`
//! to see them). Tolerances are pinned in the constants below.
//!
//! The end-to-end criteria drive the released binary through its
//! file-based stages on synthetic corpora whose ground truth is known by
//! construction; the remaining criteria check numeric kernels against
//! independent oracles computed in this file.

use pulseline::dsp::ButterworthBandpass;
use pulseline::eval;
use pulseline::evm::{magnify, EvmConfig};
use pulseline::imageops::Image;
use pulseline::pulse::{self, PeakConfig};
use pulseline::scli::{Scli, Variant};
use pulseline::stats;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::Distribution;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Mutex;
use std::time::Instant;

/// Per-window pulse-rate tolerance on clean synthetic corpora, bpm.
const CLEAN_TOLERANCE_BPM: f64 = 1.0;
/// Pooled MAE bound on the noisy corpora, bpm.
const NOISY_MAE_BPM: f64 = 5.0;
/// Wall-clock budget for the no-magnification clean run, seconds.
const CLEAN_RUNTIME_BUDGET_S: f64 = 60.0;
/// Relative band for the magnification gain law at alpha = 20.
const GAIN_LAW_REL: f64 = 0.05;
/// Identity tolerance at alpha = 0.
const ALPHA0_IDENTITY: f64 = 1e-9;
/// Filter fidelity: measured forward-backward gain vs the squared
/// analytic response, absolute.
const FILTER_FIDELITY: f64 = 1e-3;
/// Metric/effect-size oracle agreement, absolute.
const ORACLE_TOLERANCE: f64 = 1e-12;
/// Linear-correction recovery and residual tolerances.
const FIT_TOLERANCE: f64 = 1e-9;
/// Agreement with the reference statistics implementation.
const STATS_REFERENCE_TOLERANCE: f64 = 1e-4;

/// Pulse frequencies of the synthetic corpora (45-150 bpm).
const CORPUS_F0: [f64; 5] = [0.75, 1.2, 1.5, 2.0, 2.5];

/// Serializes the corpus-level runs: keeps peak memory bounded and the
/// runtime measurement honest.
static HEAVY: Mutex<()> = Mutex::new(());

fn criterion(name: &str, body: impl FnOnce() -> Result<String, String>) {
    match body() {
        Ok(detail) => println!("[PASS] {name}: {detail}"),
        Err(detail) => {
            println!("[FAIL] {name}: {detail}");
            panic!("criterion {name} failed: {detail}");
        }
    }
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_pulseline")
}

fn cli(args: &[&str]) -> Result<String, String> {
    let out = Command::new(bin())
        .args(args)
        .output()
        .map_err(|e| format!("spawn: {e}"))?;
    if !out.status.success() {
        return Err(format!(
            "`pulseline {}` exited {:?}: {}",
            args.join(" "),
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(String::from_utf8_lossy(&out.stdout).into_owned())
}

fn s(p: &Path) -> String {
    p.to_str().unwrap().to_string()
}

/// Drive one corpus through synth -> roi -> extract -> calibrate ->
/// estimate -> evaluate and return the per-window (reference, extracted)
/// pairs for `variant`. The calibration step is part of the published
/// method: the moving-average width is searched against the reference
/// before estimation.
fn run_corpus(
    root: &Path,
    f0: f64,
    variant: Variant,
    noise: Option<(f64, f64, f64, u32)>,
    seed: u64,
) -> Result<Vec<(f64, f64)>, String> {
    let corpus = root.join("corpus");
    let mut synth_args = vec![
        "synth".to_string(),
        "--out".into(),
        s(&corpus),
        "--f0".into(),
        f0.to_string(),
        "--duration-s".into(),
        "40".into(),
        "--seed".into(),
        seed.to_string(),
    ];
    if let Some((noise_sd, drift_amp, drift_freq, jitter)) = noise {
        synth_args.extend([
            "--noise-sd".into(),
            noise_sd.to_string(),
            "--drift-amplitude".into(),
            drift_amp.to_string(),
            "--drift-frequency".into(),
            drift_freq.to_string(),
            "--jitter-px".into(),
            jitter.to_string(),
        ]);
    }
    let synth_refs: Vec<&str> = synth_args.iter().map(String::as_str).collect();
    cli(&synth_refs)?;

    let roi_dir = root.join("roi");
    cli(&[
        "roi",
        "--video",
        &s(&corpus.join("video.rgbv")),
        "--annotations",
        &s(&corpus.join("annotations.jsonl")),
        "--out",
        &s(&roi_dir),
    ])?;

    let run_dir = root.join("run");
    let variant_name = variant.to_string();
    cli(&[
        "extract",
        "--roi",
        &s(&roi_dir.join("roi.rgbv")),
        "--variant",
        &variant_name,
        "--out",
        &s(&run_dir),
    ])?;

    cli(&[
        "calibrate",
        "--scli",
        &s(&run_dir.join("scli")),
        "--reference",
        &s(&corpus.join("e4")),
        "--out",
        &s(&run_dir),
    ])?;
    let calibration: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(run_dir.join("calibration.json")).map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    let smooth_ms = calibration[&variant_name]["smooth_ms"]
        .as_f64()
        .ok_or("missing calibrated width")?;

    let est_dir = root.join("estimate");
    cli(&[
        "estimate",
        "--scli",
        &s(&run_dir.join("scli")),
        "--smooth-ms",
        &smooth_ms.to_string(),
        "--out",
        &s(&est_dir),
    ])?;

    let eval_dir = root.join("eval");
    cli(&[
        "evaluate",
        "--pulse",
        &s(&est_dir.join("pulse.csv")),
        "--reference",
        &s(&corpus.join("e4")),
        "--out",
        &s(&eval_dir),
    ])?;

    let report: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(eval_dir.join(format!("report_{variant_name}.json")))
            .map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    let pairs = report["pairs"]
        .as_array()
        .ok_or("report has no pairs")?
        .iter()
        .map(|p| {
            (
                p["pr_reference"].as_f64().unwrap(),
                p["pr_extracted"].as_f64().unwrap(),
            )
        })
        .collect();
    Ok(pairs)
}

fn clean_corpus_criterion(variant: Variant) -> Result<String, String> {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    let mut n_windows = 0;
    for (i, &f0) in CORPUS_F0.iter().enumerate() {
        let pairs = run_corpus(&tmp.path().join(format!("f{i}")), f0, variant, None, 11 + i as u64)?;
        if pairs.len() < 2 {
            return Err(format!("f0={f0}: expected 2 windows, got {}", pairs.len()));
        }
        for (reference, extracted) in pairs {
            let err = (extracted - 60.0 * f0).abs();
            if (reference - 60.0 * f0).abs() > 1e-9 {
                return Err(format!("f0={f0}: reference {reference} is not 60*f0"));
            }
            worst = worst.max(err);
            n_windows += 1;
            if err > CLEAN_TOLERANCE_BPM {
                return Err(format!(
                    "f0={f0}: |{extracted} - {}| = {err:.3} bpm exceeds {CLEAN_TOLERANCE_BPM}",
                    60.0 * f0
                ));
            }
        }
    }
    Ok(format!(
        "{n_windows} windows across {} corpora, worst error {worst:.3} bpm <= {CLEAN_TOLERANCE_BPM}",
        CORPUS_F0.len()
    ))
}

#[test]
fn clean_synthetic_end_to_end_b_evm() {
    let _guard = HEAVY.lock().unwrap();
    criterion("clean-end-to-end-b_evm", || {
        let start = Instant::now();
        let detail = clean_corpus_criterion(Variant::BEvm)?;
        let elapsed = start.elapsed().as_secs_f64();
        if elapsed >= CLEAN_RUNTIME_BUDGET_S {
            return Err(format!(
                "runtime {elapsed:.1} s exceeds {CLEAN_RUNTIME_BUDGET_S} s"
            ));
        }
        Ok(format!("{detail}; runtime {elapsed:.1} s < {CLEAN_RUNTIME_BUDGET_S} s"))
    });
}

#[test]
fn clean_synthetic_end_to_end_a_evm() {
    let _guard = HEAVY.lock().unwrap();
    criterion("clean-end-to-end-a_evm", || {
        clean_corpus_criterion(Variant::AEvm)
    });
}

#[test]
fn noisy_synthetic_mae() {
    let _guard = HEAVY.lock().unwrap();
    criterion("noisy-synthetic-mae", || {
        let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
        let noise = Some((2.0, 10.0, 0.05, 2));
        let mut details = Vec::new();
        for variant in [Variant::BEvm, Variant::AEvm] {
            let mut abs_errors = Vec::new();
            for (i, &f0) in CORPUS_F0.iter().enumerate() {
                let root = tmp.path().join(format!("{variant}_f{i}"));
                let pairs = run_corpus(&root, f0, variant, noise, 100 + i as u64)?;
                for (_, extracted) in pairs {
                    abs_errors.push((extracted - 60.0 * f0).abs());
                }
            }
            let mae = abs_errors.iter().sum::<f64>() / abs_errors.len() as f64;
            if mae > NOISY_MAE_BPM {
                return Err(format!("{variant}: MAE {mae:.2} bpm exceeds {NOISY_MAE_BPM}"));
            }
            details.push(format!("{variant} MAE {mae:.3} bpm"));
        }
        Ok(format!("{} (bound {NOISY_MAE_BPM} bpm)", details.join(", ")))
    });
}

// ---------------------------------------------------------------------------
// Magnification gain law
// ---------------------------------------------------------------------------

fn uniform_video(n: usize, fps: f64, base: f64, amp: f64, freq: f64) -> Vec<Image> {
    (0..n)
        .map(|i| {
            let v = base + amp * (2.0 * PI * freq * i as f64 / fps).sin();
            let mut img = Image::new(104, 104);
            img.data_mut().fill(v);
            img
        })
        .collect()
}

/// Least-squares amplitude of a known-frequency sinusoid.
fn fit_amplitude(y: &[f64], freq: f64, fs: f64) -> f64 {
    let (mut ss, mut sc, mut cc, mut ys, mut yc) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (i, &v) in y.iter().enumerate() {
        let (si, ci) = (2.0 * PI * freq * i as f64 / fs).sin_cos();
        ss += si * si;
        cc += ci * ci;
        sc += si * ci;
        ys += v * si;
        yc += v * ci;
    }
    let det = ss * cc - sc * sc;
    let a = (ys * cc - yc * sc) / det;
    let b = (yc * ss - ys * sc) / det;
    (a * a + b * b).sqrt()
}

#[test]
fn evm_gain_law() {
    criterion("evm-gain-law", || {
        let fps = 30.0;
        let (base, amp, freq) = (128.0, 2.0, 1.2);
        let frames = uniform_video(300, fps, base, amp, freq);

        let cfg = EvmConfig::default();
        let out = magnify(&frames, fps, &cfg).map_err(|e| e.to_string())?;
        let series: Vec<f64> = out.iter().map(|f| f.get(37, 61, 0)).collect();
        let ratio = fit_amplitude(&series, freq, fps) / amp;
        let target = 1.0 + cfg.alpha;
        if !(ratio >= target * (1.0 - GAIN_LAW_REL) && ratio <= target * (1.0 + GAIN_LAW_REL)) {
            return Err(format!("gain {ratio:.3} outside {target} +- 5%"));
        }

        let zero = EvmConfig { alpha: 0.0, ..cfg };
        let out0 = magnify(&frames, fps, &zero).map_err(|e| e.to_string())?;
        let mut worst: f64 = 0.0;
        for (a, b) in frames.iter().zip(&out0) {
            for (x, y) in a.data().iter().zip(b.data()) {
                worst = worst.max((x - y).abs());
            }
        }
        if worst > ALPHA0_IDENTITY {
            return Err(format!("alpha=0 deviation {worst:e} exceeds {ALPHA0_IDENTITY:e}"));
        }
        Ok(format!(
            "amplitude ratio {ratio:.3} in [{:.2}, {:.2}]; alpha=0 max deviation {worst:.1e}",
            target * (1.0 - GAIN_LAW_REL),
            target * (1.0 + GAIN_LAW_REL)
        ))
    });
}

// ---------------------------------------------------------------------------
// Filter fidelity
// ---------------------------------------------------------------------------

#[test]
fn filter_fidelity_over_frequency_grid() {
    criterion("filter-fidelity", || {
        let fs = 30.0;
        let filter = ButterworthBandpass::design(3, 0.4, 3.0, fs).map_err(|e| e.to_string())?;
        let n = 12_000;
        let mut worst = (0.0f64, 0.0f64);
        for k in 0..50 {
            let freq = 0.05 + k as f64 * (10.0 - 0.05) / 49.0;
            let x: Vec<f64> = (0..n)
                .map(|i| (2.0 * PI * freq * i as f64 / fs).sin())
                .collect();
            let y = filter.filtfilt(&x).map_err(|e| e.to_string())?;
            // Interior gain: quadrature fit over the middle third. The fit
            // carries its own time origin, so amplitude is phase-safe.
            let measured = fit_amplitude(&y[n / 3..2 * n / 3], freq, fs);
            let analytic = filter.gain_squared(freq);
            let diff = (measured - analytic).abs();
            if diff > worst.1 {
                worst = (freq, diff);
            }
            if diff > FILTER_FIDELITY {
                return Err(format!(
                    "at {freq:.3} Hz: measured {measured:.6} vs |H|^2 {analytic:.6} (diff {diff:.2e})"
                ));
            }
        }
        Ok(format!(
            "50 frequencies in [0.05, 10] Hz, worst |measured - |H|^2| = {:.2e} at {:.2} Hz (bound {FILTER_FIDELITY:.0e})",
            worst.1, worst.0
        ))
    });
}

// ---------------------------------------------------------------------------
// Metric and effect-size oracles
// ---------------------------------------------------------------------------

#[test]
fn metric_oracle_on_random_instances() {
    criterion("metric-oracle", || {
        let mut rng = ChaCha20Rng::seed_from_u64(0xACCE55);
        for case in 0..1000 {
            // error_metrics vs a separately coded elementwise oracle.
            let n = rng.gen_range(1..=100);
            let pairs: Vec<(f64, f64)> = (0..n)
                .map(|_| (rng.gen_range(40.0..180.0), rng.gen_range(30.0..200.0)))
                .collect();
            let m = eval::error_metrics(&pairs).map_err(|e| e.to_string())?;

            let nf = n as f64;
            let mut sum_ae = 0.0;
            let mut sum_sq = 0.0;
            let mut sum_rel = 0.0;
            for &(r, e) in &pairs {
                let ae = (r - e).abs();
                sum_ae += ae;
                sum_sq += ae * ae;
                sum_rel += ae / r;
            }
            let aae = sum_ae / nf;
            let mut sum_dev = 0.0;
            for &(r, e) in &pairs {
                let d = (r - e).abs() - aae;
                sum_dev += d * d;
            }
            let checks = [
                (m.aae, aae, "aae"),
                (m.mae, aae, "mae"),
                (m.sae, (sum_dev / nf).sqrt(), "sae"),
                (m.are, sum_rel / nf, "are"),
                (m.rmse, (sum_sq / nf).sqrt(), "rmse"),
            ];
            for (got, want, name) in checks {
                if (got - want).abs() > ORACLE_TOLERANCE {
                    return Err(format!(
                        "case {case}: {name} {got} vs oracle {want} (diff {:.2e})",
                        (got - want).abs()
                    ));
                }
            }

            // cliffs_delta vs the quadratic-time definition.
            let na = rng.gen_range(1..=40);
            let nb = rng.gen_range(1..=40);
            // Coarse values so ties occur.
            let a: Vec<f64> = (0..na).map(|_| rng.gen_range(0..50) as f64 / 4.0).collect();
            let b: Vec<f64> = (0..nb).map(|_| rng.gen_range(0..50) as f64 / 4.0).collect();
            let fast = stats::cliffs_delta(&a, &b).map_err(|e| e.to_string())?;
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
            let slow = (greater - less) as f64 / (na * nb) as f64;
            if fast != slow {
                return Err(format!("case {case}: cliffs delta {fast} vs oracle {slow}"));
            }
        }
        Ok(format!(
            "1000 random instances, error metrics within {ORACLE_TOLERANCE:.0e} and Cliff's delta exact"
        ))
    });
}

// ---------------------------------------------------------------------------
// Linear correction
// ---------------------------------------------------------------------------

#[test]
fn linear_correction_recovery_and_self_fit() {
    criterion("linear-correction", || {
        // Noiseless points on the published line recover (a, b).
        let pairs: Vec<(f64, f64)> = (0..30)
            .map(|i| {
                let x = 50.0 + 4.0 * i as f64;
                (x, 0.94 * x - 69.41)
            })
            .collect();
        let c = eval::fit_linear_correction(&pairs).map_err(|e| e.to_string())?;
        if (c.a - 0.94).abs() > FIT_TOLERANCE || (c.b + 69.41).abs() > FIT_TOLERANCE {
            return Err(format!("recovered ({}, {}) vs (0.94, -69.41)", c.a, c.b));
        }

        // Self-fit correction zeroes the mean residual on its own
        // training pairs.
        let mut rng = ChaCha20Rng::seed_from_u64(99);
        let triples: Vec<(f64, f64)> = (0..40)
            .map(|_| {
                let r = rng.gen_range(50.0..140.0);
                let e = r + 0.7 * r - 50.0 + rng.gen_range(-3.0..3.0);
                (r, e)
            })
            .collect();
        let diff_pairs: Vec<(f64, f64)> = triples.iter().map(|&(r, e)| (r, e - r)).collect();
        let fit = eval::fit_linear_correction(&diff_pairs).map_err(|e| e.to_string())?;
        let mean_resid: f64 = triples
            .iter()
            .map(|&(r, e)| eval::apply_linear_correction(e, r, &fit) - r)
            .sum::<f64>()
            / triples.len() as f64;
        if mean_resid.abs() > FIT_TOLERANCE {
            return Err(format!("mean corrected residual {mean_resid:e}"));
        }
        Ok(format!(
            "recovered (0.94, -69.41) to {FIT_TOLERANCE:.0e}; mean self-fit residual {:.1e}",
            mean_resid.abs()
        ))
    });
}

// ---------------------------------------------------------------------------
// Exact Wilcoxon
// ---------------------------------------------------------------------------

/// Independent exact two-sided p: enumerate every subset of pooled ranks
/// recursively (a different route than the implementation's bitmask scan).
fn oracle_exact_p(a_ranks: &[usize], n: usize) -> f64 {
    let na = a_ranks.len();
    let u_of = |ranks: &[usize]| -> usize {
        ranks.iter().sum::<usize>() - na * (na + 1) / 2
    };
    let u_obs = u_of(a_ranks);
    let mut us = Vec::new();
    let mut choice = Vec::new();
    fn rec(start: usize, left: usize, n: usize, choice: &mut Vec<usize>, us: &mut Vec<usize>, na: usize) {
        if left == 0 {
            let sum: usize = choice.iter().sum();
            us.push(sum - na * (na + 1) / 2);
            return;
        }
        for r in start..=n {
            if n - r + 1 < left {
                break;
            }
            choice.push(r);
            rec(r + 1, left - 1, n, choice, us, na);
            choice.pop();
        }
    }
    rec(1, na, n, &mut choice, &mut us, na);
    let total = us.len() as f64;
    let le = us.iter().filter(|&&u| u <= u_obs).count() as f64;
    let ge = us.iter().filter(|&&u| u >= u_obs).count() as f64;
    (2.0 * (le.min(ge)) / total).min(1.0)
}

/// Advance `idx` (0-based, strictly increasing) to the next m-combination
/// of `0..n`; false when exhausted.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let m = idx.len();
    let mut i = m;
    while i > 0 {
        i -= 1;
        if idx[i] < n - m + i {
            idx[i] += 1;
            for j in i + 1..m {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[test]
fn exact_wilcoxon_small_samples() {
    criterion("exact-wilcoxon", || {
        let mut cases = 0;
        for m in 1..=4usize {
            let n = 2 * m;
            // Every way to assign ranks 1..n to group a.
            let mut assignment: Vec<usize> = (0..m).collect();
            loop {
                let a_ranks: Vec<usize> = assignment.iter().map(|&i| i + 1).collect();
                let a: Vec<f64> = a_ranks.iter().map(|&r| r as f64).collect();
                let b: Vec<f64> = (1..=n)
                    .filter(|r| !a_ranks.contains(r))
                    .map(|r| r as f64)
                    .collect();
                let (_, p) = stats::wilcoxon_rank_sum(&a, &b).map_err(|e| e.to_string())?;
                let oracle = oracle_exact_p(&a_ranks, n);
                if p != oracle {
                    return Err(format!(
                        "ranks {a_ranks:?} of 1..{n}: p {p} vs enumerated {oracle}"
                    ));
                }
                cases += 1;
                if !next_combination(&mut assignment, n) {
                    break;
                }
            }
        }

        let (u, p) = stats::wilcoxon_rank_sum(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0])
            .map_err(|e| e.to_string())?;
        if u != 0.0 || p != 0.1 {
            return Err(format!("canonical case gave U={u}, p={p}, expected U=0, p=0.1"));
        }
        Ok(format!(
            "{cases} rank assignments with n_a = n_b <= 4 match the enumerated p exactly; [1,2,3] vs [4,5,6] -> p = 0.1"
        ))
    });
}

// ---------------------------------------------------------------------------
// Reference-implementation statistics oracle
// ---------------------------------------------------------------------------

#[test]
fn statistics_match_reference_fixtures() {
    criterion("statistics-reference-oracle", || {
        let fx: serde_json::Value =
            serde_json::from_str(include_str!("fixtures/stats_reference.json"))
                .map_err(|e| e.to_string())?;
        let samples = fx["samples"].as_object().unwrap();
        let get = |name: &str| -> Vec<f64> {
            samples[name]
                .as_array()
                .unwrap()
                .iter()
                .map(|v| v.as_f64().unwrap())
                .collect()
        };

        let mut checked = 0;
        for case in fx["shapiro"].as_array().unwrap() {
            let data = get(case["sample"].as_str().unwrap());
            let (w, p) = stats::shapiro_wilk(&data).map_err(|e| e.to_string())?;
            let (w_ref, p_ref) = (case["w"].as_f64().unwrap(), case["p"].as_f64().unwrap());
            if (w - w_ref).abs() > STATS_REFERENCE_TOLERANCE
                || (p - p_ref).abs() > STATS_REFERENCE_TOLERANCE
            {
                return Err(format!(
                    "shapiro {}: ({w}, {p}) vs reference ({w_ref}, {p_ref})",
                    case["sample"]
                ));
            }
            checked += 1;
        }
        for case in fx["t_tests"].as_array().unwrap() {
            let a = get(case["a"].as_str().unwrap());
            let b = get(case["b"].as_str().unwrap());
            let (t, p) = stats::t_test_unpaired(&a, &b).map_err(|e| e.to_string())?;
            if (t - case["t"].as_f64().unwrap()).abs() > STATS_REFERENCE_TOLERANCE
                || (p - case["p"].as_f64().unwrap()).abs() > STATS_REFERENCE_TOLERANCE
            {
                return Err(format!("t-test {}-{} mismatch", case["a"], case["b"]));
            }
            checked += 1;
        }
        for case in fx["mannwhitney"].as_array().unwrap() {
            let a = get(case["a"].as_str().unwrap());
            let b = get(case["b"].as_str().unwrap());
            let (u, p) = stats::wilcoxon_rank_sum(&a, &b).map_err(|e| e.to_string())?;
            if (u - case["u"].as_f64().unwrap()).abs() > 1e-9
                || (p - case["p"].as_f64().unwrap()).abs() > STATS_REFERENCE_TOLERANCE
            {
                return Err(format!("rank-sum {}-{} mismatch", case["a"], case["b"]));
            }
            checked += 1;
        }
        Ok(format!(
            "{checked} fixture comparisons within {STATS_REFERENCE_TOLERANCE:.0e}"
        ))
    });
}

// ---------------------------------------------------------------------------
// Age-group reproduction at desk scale
// ---------------------------------------------------------------------------

#[test]
fn age_group_difference_reproduction() {
    criterion("age-group-reproduction", || {
        let mut rng = ChaCha20Rng::seed_from_u64(2026);
        let older_dist = rand_distr::Normal::new(73.12, 6.0).unwrap();
        let younger_dist = rand_distr::Normal::new(80.99, 6.0).unwrap();
        let older: Vec<f64> = (0..22).map(|_| older_dist.sample(&mut rng)).collect();
        let younger: Vec<f64> = (0..15).map(|_| younger_dist.sample(&mut rng)).collect();

        let cmp = stats::compare_groups(&older, &younger, false).map_err(|e| e.to_string())?;
        if cmp.p_value >= 0.05 {
            return Err(format!("p = {} not significant", cmp.p_value));
        }
        // Direction: younger above older, like the published group means.
        let mean_older = older.iter().sum::<f64>() / older.len() as f64;
        let mean_younger = younger.iter().sum::<f64>() / younger.len() as f64;
        if mean_younger <= mean_older {
            return Err("sampled cohorts lost the expected ordering".into());
        }
        if cmp.effect_value >= 0.0 {
            return Err(format!(
                "effect sign {} does not point from older toward younger",
                cmp.effect_value
            ));
        }
        Ok(format!(
            "n=22 at 73.12 vs n=15 at 80.99 (SD 6): {:?} p = {:.2e} < 0.05, {:?} = {:.2}",
            cmp.test_name, cmp.p_value, cmp.effect_name, cmp.effect_value
        ))
    });
}

// ---------------------------------------------------------------------------
// Calibration search
// ---------------------------------------------------------------------------

#[test]
fn calibration_search_grid_and_mean() {
    criterion("calibration-search", || {
        // The grid is exactly k/30 s for k = 1..=30.
        let grid = pulse::smoothing_search_widths(30.0);
        if grid.len() != 30 {
            return Err(format!("grid has {} widths", grid.len()));
        }
        for (k, w) in grid.iter().enumerate() {
            if *w != (k + 1) as f64 / 30.0 {
                return Err(format!("grid[{k}] = {w}, want {}", (k + 1) as f64 / 30.0));
            }
        }

        // Dataset with known per-item optima, computed by an independent
        // exhaustive search here.
        let fs = 30.0;
        let mut dataset = Vec::new();
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        for (i, f0) in [0.9, 1.3, 2.1].into_iter().enumerate() {
            let samples: Vec<f64> = (0..900)
                .map(|t| {
                    (2.0 * PI * f0 * t as f64 / fs).sin() + 0.3 * rng.gen_range(-1.0..1.0)
                })
                .collect();
            let scli = Scli {
                samples,
                fs,
                variant: Variant::BEvm,
                window_id: i as u64,
            };
            dataset.push((scli, 60.0 * f0));
        }
        let base = PeakConfig::default_for(Variant::BEvm);

        let mut optima = Vec::new();
        for (scli, reference) in &dataset {
            let mut best: Option<(f64, f64)> = None;
            for &width in &grid {
                let cfg = PeakConfig {
                    smooth_width_s: width,
                    ..base
                };
                if let Ok(est) = pulse::estimate_pulse(scli, &cfg) {
                    let err = (est.pr_bpm - reference).abs();
                    if best.map_or(true, |(e, _)| err < e) {
                        best = Some((err, width));
                    }
                }
            }
            optima.push(best.ok_or("oracle search found no usable width")?.1);
        }
        let mean = optima.iter().sum::<f64>() / optima.len() as f64;
        let expected = ((mean * fs).round() as usize).clamp(1, 30) as f64 / fs;

        let got = pulse::calibrate_smoothing(&dataset, &base).map_err(|e| e.to_string())?;
        if got != expected {
            return Err(format!("calibrated {got} vs oracle mean {expected}"));
        }
        Ok(format!(
            "grid is k/30 for k=1..30; calibrated width {got:.4} s equals the mean of per-item optima"
        ))
    });
}

// ---------------------------------------------------------------------------
// Determinism
// ---------------------------------------------------------------------------

fn collect_files(root: &Path, out: &mut Vec<PathBuf>) {
    for entry in fs::read_dir(root).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            collect_files(&path, out);
        } else {
            out.push(path);
        }
    }
}

#[test]
fn pipeline_determinism() {
    let _guard = HEAVY.lock().unwrap();
    criterion("pipeline-determinism", || {
        let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
        let corpus = tmp.path().join("corpus");
        cli(&[
            "synth",
            "--out",
            &s(&corpus),
            "--f0",
            "1.5",
            "--duration-s",
            "30",
            "--noise-sd",
            "1.0",
            "--jitter-px",
            "1",
            "--seed",
            "31337",
        ])?;

        let mut outs = Vec::new();
        for run_idx in 0..2 {
            let out = tmp.path().join(format!("run{run_idx}"));
            cli(&[
                "pipeline",
                "--video",
                &s(&corpus.join("video.rgbv")),
                "--annotations",
                &s(&corpus.join("annotations.jsonl")),
                "--reference",
                &s(&corpus.join("e4")),
                "--variant",
                "both",
                "--calibrate",
                "--correction",
                "preset-paper",
                "--jobs",
                "2",
                "--out",
                &s(&out),
            ])?;
            outs.push(out);
        }

        let mut files = Vec::new();
        collect_files(&outs[0], &mut files);
        if files.is_empty() {
            return Err("pipeline produced no artifacts".into());
        }
        let mut compared = 0;
        for f in &files {
            let rel = f.strip_prefix(&outs[0]).unwrap();
            let twin = outs[1].join(rel);
            let a = fs::read(f).map_err(|e| e.to_string())?;
            let b = fs::read(&twin).map_err(|e| format!("{}: {e}", twin.display()))?;
            if a != b {
                return Err(format!("{} differs between runs", rel.display()));
            }
            compared += 1;
        }
        Ok(format!("{compared} artifacts byte-identical across two runs"))
    });
}
