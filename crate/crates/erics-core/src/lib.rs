//! Streaming concept-drift detection by tracking the distribution of an
//! online model's parameters.
//!
//! The engine treats the parameters of a predictive model as a diagonal
//! Gaussian random variable and watches how the differential entropy and
//! KL divergence of that distribution move between successive training
//! steps. A rise of the windowed divergence statistic above an adaptive
//! threshold raises a drift alert, globally and (optionally) per input
//! feature.
//!
//! The crate is `no_std`-compatible (requires `alloc`); the companion
//! `erics` crate carries IO, file formats and the command line interface.
//!
//! Modules:
//! - [`dist`]: diagonal-Gaussian parameter distribution, entropy, KL
//! - [`probit`]: online Probit learner with Gaussian-distributed weights
//! - [`detector`]: moving-average statistic, sliding-window test, adaptive
//!   alpha threshold, per-feature variant
//! - [`streams`]: synthetic stream generators with drift ground truth
//! - [`tabular`]: table encoding, information-gain ranking, drift induction
//! - [`eval`]: prequential experiment runner, delay/recall/precision scoring

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod detector;
pub mod dist;
pub mod eval;
pub(crate) mod math;
pub mod probit;
pub mod streams;
pub mod tabular;

pub use detector::{AlertScope, Detector, DetectorConfig, DriftAlert, StepResult};
pub use dist::GaussianParamDist;
pub use eval::{EvalConfig, EvalReport, RangeScore};
pub use probit::{FeatureMatrix, LabeledBatch, ProbitConfig, ProbitModel};
pub use streams::{DriftGroundTruth, DriftPhase, GeneratorKind, StreamSpec};
pub use tabular::Dataset;
