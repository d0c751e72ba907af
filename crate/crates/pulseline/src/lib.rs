//! # pulseline
//!
//! Contactless pulse-rate estimation from masked facial video.
//!
//! The crate turns a sequence of RGB frames plus face/eye detection boxes
//! into per-window pulse-rate estimates and evaluates them against a
//! wrist-worn reference recording:
//!
//! - **ingest**: raw `.rgbv` / PPM / PNG frame sequences, JSON-Lines
//!   detection boxes, and Empatica-E4-style CSV reference recordings
//! - **roi**: face selection, eye masking, crop, and 104x104 resize
//! - **window**: fixed-length analysis windows with overlap
//! - **evm**: Eulerian video magnification (pyramid + per-pixel temporal
//!   ideal band-pass + amplification)
//! - **scli**: reduction of a window to a 1-D light-intensity signal
//!   (channel means, zero-phase Butterworth, first principal component,
//!   interquartile outlier adjustment)
//! - **pulse**: peak detection (derivative + moving average chain),
//!   inter-beat intervals, pulse rate, and smoothing-width calibration
//! - **eval**: error metrics, waveform correlation, SNR, and linear-fit
//!   bias correction against the reference
//! - **stats**: normality testing, two-sample tests, and effect sizes for
//!   group comparisons
//! - **synth**: synthetic corpora with a known embedded pulse, used as the
//!   ground-truth oracle for the end-to-end tests
//!
//! The `pulseline` binary wires these stages into file-based batch runs;
//! see the README for the command reference.

pub mod cli;
pub mod dsp;
pub mod error;
pub mod eval;
pub mod evm;
pub mod geom;
pub mod imageops;
pub mod ingest;
pub mod pulse;
pub mod roi;
pub mod scli;
pub mod stats;
pub mod synth;
pub mod window;

pub use error::{Error, Result};
