//! Command-line argument definitions.

use crate::geom::Rect;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(
    name = "pulseline",
    version,
    about = "Contactless pulse-rate estimation from masked facial video",
    after_help = "Set PULSELINE_LOG=debug for verbose logging."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a synthetic corpus with a known embedded pulse
    Synth(SynthArgs),
    /// Mask, crop, and resize a video to the 104x104 face region
    Roi(RoiArgs),
    /// Slice a masked video into windows and extract per-window signals
    Extract(ExtractArgs),
    /// Detect beats in extracted signals and compute pulse rates
    Estimate(EstimateArgs),
    /// Search the smoothing width against reference pulse rates
    Calibrate(CalibrateArgs),
    /// Compare estimated pulse rates against a reference recording
    Evaluate(EvaluateArgs),
    /// Compare two groups of pulse rates
    Stats(StatsArgs),
    /// Magnify a masked video and export the result
    Magnify(MagnifyArgs),
    /// roi + extract + estimate + evaluate in one run
    Pipeline(PipelineArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum VariantArg {
    #[value(name = "b_evm")]
    BEvm,
    #[value(name = "a_evm")]
    AEvm,
    #[value(name = "both")]
    Both,
}

impl VariantArg {
    pub fn variants(self) -> Vec<crate::scli::Variant> {
        match self {
            VariantArg::BEvm => vec![crate::scli::Variant::BEvm],
            VariantArg::AEvm => vec![crate::scli::Variant::AEvm],
            VariantArg::Both => vec![crate::scli::Variant::BEvm, crate::scli::Variant::AEvm],
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorrectionArg {
    #[value(name = "none")]
    None,
    #[value(name = "self-fit")]
    SelfFit,
    #[value(name = "preset-paper")]
    PresetPaper,
    #[value(name = "preset-faros")]
    PresetFaros,
}

pub fn parse_rect(s: &str) -> Result<Rect, String> {
    Rect::parse(s).ok_or_else(|| format!("expected x,y,w,h with positive size, got {s:?}"))
}

fn parse_rgb(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected r,g,b, got {s:?}"));
    }
    let mut out = [0.0; 3];
    for (slot, p) in out.iter_mut().zip(&parts) {
        *slot = p
            .trim()
            .parse()
            .map_err(|_| format!("bad component {p:?}"))?;
    }
    Ok(out)
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    /// Output directory for the corpus
    #[arg(long)]
    pub out: PathBuf,
    /// Pulse frequency in Hz (ground truth is 60*f0 bpm)
    #[arg(long, default_value_t = 1.2)]
    pub f0: f64,
    #[arg(long, default_value_t = 30.0)]
    pub fps: f64,
    #[arg(long = "duration-s", default_value_t = 40.0)]
    pub duration_s: f64,
    #[arg(long, default_value_t = 96)]
    pub width: u32,
    #[arg(long, default_value_t = 96)]
    pub height: u32,
    /// Per-pixel Gaussian noise, pixel units
    #[arg(long = "noise-sd", default_value_t = 0.0)]
    pub noise_sd: f64,
    /// Global illumination drift amplitude, pixel units
    #[arg(long = "drift-amplitude", default_value_t = 0.0)]
    pub drift_amplitude: f64,
    /// Illumination drift frequency, Hz (must stay below 0.2)
    #[arg(long = "drift-frequency", default_value_t = 0.05)]
    pub drift_frequency: f64,
    /// Maximum per-frame translation of annotation boxes, pixels
    #[arg(long = "jitter-px", default_value_t = 0)]
    pub jitter_px: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Face box as x,y,w,h (defaults to a centered box)
    #[arg(long, value_parser = parse_rect)]
    pub face: Option<Rect>,
    /// Left eye box in face-local x,y,w,h
    #[arg(long = "eye-left", value_parser = parse_rect)]
    pub eye_left: Option<Rect>,
    /// Right eye box in face-local x,y,w,h
    #[arg(long = "eye-right", value_parser = parse_rect)]
    pub eye_right: Option<Rect>,
    /// Base skin color as r,g,b
    #[arg(long = "base-color", value_parser = parse_rgb)]
    pub base_color: Option<[f64; 3]>,
    /// Pulse modulation amplitude per channel as r,g,b
    #[arg(long, value_parser = parse_rgb)]
    pub amplitude: Option<[f64; 3]>,
}

#[derive(Args, Debug)]
pub struct RoiArgs {
    /// Input video: a .rgbv file or a directory of PPM/PNG frames
    #[arg(long)]
    pub video: PathBuf,
    /// JSON-Lines face/eye annotations
    #[arg(long)]
    pub annotations: PathBuf,
    /// Frame rate override for directory input
    #[arg(long)]
    pub fps: Option<f64>,
    /// Initial face box x,y,w,h (default: first annotated face)
    #[arg(long = "initial-face", value_parser = parse_rect)]
    pub initial_face: Option<Rect>,
    /// Initial left eye box, face-local (default: first annotated pair)
    #[arg(long = "initial-eye-left", value_parser = parse_rect)]
    pub initial_eye_left: Option<Rect>,
    /// Initial right eye box, face-local
    #[arg(long = "initial-eye-right", value_parser = parse_rect)]
    pub initial_eye_right: Option<Rect>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct EvmFlags {
    /// Amplification of the band-passed component
    #[arg(long, default_value_t = 20.0)]
    pub alpha: f64,
    /// Lower passband edge, Hz
    #[arg(long = "f-low", default_value_t = 0.4)]
    pub f_low: f64,
    /// Upper passband edge, Hz
    #[arg(long = "f-high", default_value_t = 3.0)]
    pub f_high: f64,
    /// Blur-and-halve steps of the spatial pyramid
    #[arg(long = "pyramid-steps", default_value_t = 3)]
    pub pyramid_steps: usize,
}

impl EvmFlags {
    pub fn to_config(&self) -> crate::evm::EvmConfig {
        crate::evm::EvmConfig {
            alpha: self.alpha,
            f_low: self.f_low,
            f_high: self.f_high,
            pyramid_steps: self.pyramid_steps,
        }
    }

    pub fn to_filter(&self) -> crate::scli::FilterConfig {
        crate::scli::FilterConfig {
            order: 3,
            f_low: self.f_low,
            f_high: self.f_high,
        }
    }
}

#[derive(Args, Debug)]
pub struct WindowFlags {
    /// Window length, seconds
    #[arg(long = "window-s", default_value_t = 30.0)]
    pub window_s: f64,
    /// Window step, seconds
    #[arg(long = "step-s", default_value_t = 10.0)]
    pub step_s: f64,
}

impl WindowFlags {
    pub fn to_spec(&self) -> crate::error::Result<crate::window::WindowSpec> {
        crate::window::WindowSpec::new(self.window_s, self.step_s)
    }
}

#[derive(Args, Debug)]
pub struct PeakFlags {
    /// Moving-average width in milliseconds (default: 400 before
    /// magnification, 433 after)
    #[arg(long = "smooth-ms")]
    pub smooth_ms: Option<f64>,
    /// Prominence threshold on the normalized detection signal
    #[arg(long, default_value_t = 0.15)]
    pub prominence: f64,
    /// Minimum peak distance in milliseconds
    #[arg(long = "min-distance-ms", default_value_t = 330.0)]
    pub min_distance_ms: f64,
}

impl PeakFlags {
    pub fn to_config(&self, variant: crate::scli::Variant) -> crate::pulse::PeakConfig {
        let mut cfg = crate::pulse::PeakConfig::default_for(variant);
        if let Some(ms) = self.smooth_ms {
            cfg.smooth_width_s = ms / 1000.0;
        }
        cfg.prominence = self.prominence;
        cfg.min_distance_s = self.min_distance_ms / 1000.0;
        cfg
    }
}

#[derive(Args, Debug)]
pub struct ExtractArgs {
    /// Masked 104x104 video (.rgbv) produced by the roi stage
    #[arg(long)]
    pub roi: PathBuf,
    #[arg(long, value_enum, default_value_t = VariantArg::Both)]
    pub variant: VariantArg,
    #[command(flatten)]
    pub window: WindowFlags,
    #[command(flatten)]
    pub evm: EvmFlags,
    /// Worker threads (default: number of processors)
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct EstimateArgs {
    /// One signal CSV or a directory of them
    #[arg(long)]
    pub scli: PathBuf,
    /// Only process signals of this variant
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,
    #[command(flatten)]
    pub peaks: PeakFlags,
    /// Worker threads (default: number of processors)
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct CalibrateArgs {
    /// Directory of extracted signal CSVs
    #[arg(long)]
    pub scli: PathBuf,
    /// Only calibrate signals of this variant
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,
    /// Reference recording directory (BVP.csv, HR.csv, IBI.csv)
    #[arg(long)]
    pub reference: PathBuf,
    #[command(flatten)]
    pub window: WindowFlags,
    #[command(flatten)]
    pub peaks: PeakFlags,
    /// Video start relative to the reference start, seconds
    #[arg(long = "video-offset-s", default_value_t = 0.0)]
    pub video_offset_s: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    /// Pulse CSV from the estimate stage
    #[arg(long)]
    pub pulse: PathBuf,
    /// Reference recording directory (BVP.csv, HR.csv, IBI.csv)
    #[arg(long)]
    pub reference: PathBuf,
    /// Directory of signal CSVs; enables waveform correlation and SNR
    #[arg(long)]
    pub scli: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = CorrectionArg::None)]
    pub correction: CorrectionArg,
    #[command(flatten)]
    pub window: WindowFlags,
    /// Video start relative to the reference start, seconds
    #[arg(long = "video-offset-s", default_value_t = 0.0)]
    pub video_offset_s: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    /// First group: one value per line
    #[arg(long = "group-a")]
    pub group_a: PathBuf,
    /// Second group: one value per line
    #[arg(long = "group-b")]
    pub group_b: PathBuf,
    /// Use Welch's t statistic on the parametric branch
    #[arg(long)]
    pub welch: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct MagnifyArgs {
    /// Masked 104x104 video (.rgbv)
    #[arg(long)]
    pub roi: PathBuf,
    #[command(flatten)]
    pub evm: EvmFlags,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct PipelineArgs {
    #[arg(long)]
    pub video: PathBuf,
    #[arg(long)]
    pub annotations: PathBuf,
    #[arg(long)]
    pub reference: PathBuf,
    #[arg(long)]
    pub fps: Option<f64>,
    #[arg(long = "initial-face", value_parser = parse_rect)]
    pub initial_face: Option<Rect>,
    #[arg(long = "initial-eye-left", value_parser = parse_rect)]
    pub initial_eye_left: Option<Rect>,
    #[arg(long = "initial-eye-right", value_parser = parse_rect)]
    pub initial_eye_right: Option<Rect>,
    #[arg(long, value_enum, default_value_t = VariantArg::Both)]
    pub variant: VariantArg,
    /// Calibrate the smoothing width on this corpus before estimating
    #[arg(long)]
    pub calibrate: bool,
    #[arg(long, value_enum, default_value_t = CorrectionArg::None)]
    pub correction: CorrectionArg,
    #[command(flatten)]
    pub window: WindowFlags,
    #[command(flatten)]
    pub evm: EvmFlags,
    #[command(flatten)]
    pub peaks: PeakFlags,
    #[arg(long = "video-offset-s", default_value_t = 0.0)]
    pub video_offset_s: f64,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}
