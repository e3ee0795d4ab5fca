//! Iterative hard-decision decoding (HDD) analysis for generalized LDPC
//! ensembles whose constraint nodes are t-error-correcting BCH codes.
//!
//! The crate covers the whole pipeline:
//!
//! * [`gf`], [`bch`], [`spectrum`]: GF(2^ν) arithmetic, primitive BCH codes and
//!   their even-weight subcodes, bounded-distance decoding and weight spectra.
//! * [`miscorrection`]: the per-bit decoding error probabilities `P_n(i)`,
//!   `Q_n(i)` of a bounded-distance decoder, including miscorrection.
//! * [`de`]: density evolution for the uncoupled and spatially-coupled
//!   ensembles and the corresponding threshold solvers.
//! * [`highrate`]: the Poisson scaling limit of density evolution as `n → ∞`.
//! * [`potential`]: potential functions and potential thresholds.
//! * [`capacity`]: BSC capacity and ε-redundancy bookkeeping.
//! * [`sim`]: a Monte Carlo simulator of the extrinsic message-passing decoder
//!   on sampled Tanner graphs.
//!
//! Numerical modules are generic over the scalar type through [`Real`]
//! (implemented for `f32` and `f64`); the aliases at the crate root fix the
//! scalar to `f64`, which is what the solvers and the CLI use.

pub mod bch;
pub mod capacity;
pub mod de;
pub mod error;
pub mod gf;
pub mod highrate;
pub mod miscorrection;
pub mod potential;
pub mod scalar;
pub mod sim;
pub mod special;
pub mod spectrum;
mod word;

pub use bch::{build_bch, ComponentCode, DecodeOutcome};
pub use error::{Error, Result};
pub use gf::{build_field, FieldTable};
pub use scalar::Real;
pub use spectrum::{weight_spectrum, SpectrumMethod, SpectrumTable};
pub use word::Word;

/// Miscorrection table over `f64`.
pub type MiscorrectionTable = miscorrection::MiscorrectionTable<f64>;
/// Density-evolution trace over `f64`.
pub type DeTrace = de::DeTrace<f64>;
/// Threshold solver result over `f64`.
pub type ThresholdResult = de::ThresholdResult<f64>;
/// Stopping rules over `f64`.
pub type DeLimits = de::DeLimits<f64>;
/// Potential curve over `f64`.
pub type PotentialCurve = potential::PotentialCurve<f64>;
/// Poisson tail triple over `f64`.
pub type PoissonTails = highrate::PoissonTails<f64>;

pub use capacity::RedundancyReport;
pub use de::CouplingProfile;
pub use highrate::ScaledVariant;

/// Crate version, embedded in exported artifacts.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
