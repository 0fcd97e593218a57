//! Learning from Rademacher observations ("rados").
//!
//! A rado compresses a random subset of a labeled sample into a single
//! vector: pick a signature `σ ∈ {−1,+1}^m` and sum the edge vectors `y·x`
//! of the examples where `σ` agrees with the label. This crate implements
//! the full pipeline built on that object:
//!
//! * [`dataset`] — labeled datasets, CSV I/O, stratified folds;
//! * [`rado`] — signatures, rado computation, uniform / fixed-support /
//!   exhaustive sampling;
//! * [`losses`] — log-space logistic and exponential losses over examples
//!   and rado sets, and the identity tying them together;
//! * [`boosting`] — a boosting loop whose weak learner picks one rado
//!   coordinate (feature) per round;
//! * [`baseline`] — the example-space analogue of the same loop, for
//!   paired comparisons;
//! * [`privacy`] — differentially private rado release: feature-interval
//!   rejection sampling with a provable draw bound, plus Gaussian input
//!   noise helpers;
//! * [`reconstruction`] — what an observer can recover from released
//!   rados, and the ambiguity construction that defeats exact recovery;
//! * [`harness`] — cross-validated benchmarks, best-iterate selection and
//!   noise sweeps, all deterministic under a master seed.
//!
//! Everything randomized is driven by explicit `u64` seeds through
//! ChaCha streams; rerunning any entry point with the same inputs gives
//! byte-identical results.

pub mod baseline;
pub mod boosting;
pub mod dataset;
pub mod error;
pub mod harness;
pub mod losses;
pub mod privacy;
pub mod rado;
pub mod reconstruction;
pub mod seed;
pub mod synthetic;
pub mod tolerances;

pub use error::{Error, Result};
