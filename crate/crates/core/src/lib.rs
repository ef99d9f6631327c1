//! Simulation laboratory for sequential social learning with misspecified
//! beliefs and costly belief correction ("education").
//!
//! A binary state is learned from a public history of actions. Uneducated
//! agents read each observed action as an independent signal with perceived
//! accuracies; educated agents use the correct equilibrium likelihoods and
//! (optionally) a more precise private signal. The crate provides:
//!
//! - [`model`]: primitive parameters and the log-odds calculus,
//! - [`costs`]: education-cost distributions (uniform, exponential, logit),
//! - [`beliefs`]: public belief recursions along a history, with perfect or
//!   imperfectly observed education choices,
//! - [`decision`]: the accuracy functional, value of education, cutoff and
//!   threshold rules, and cascade flip probabilities,
//! - [`benchmarks`]: the homogeneous-precision rational vs. naive baseline
//!   and time-to-cascade comparisons,
//! - [`dynamics`]: the full equilibrium path simulator and cascade-break
//!   experiments,
//! - [`welfare`]: welfare accounting and planner subsidy rules,
//! - [`statics`]: comparative-statics sweeps and early-period closed forms.
//!
//! All numeric code is generic over the scalar type via [`Real`]; use the
//! `*F64` aliases at the crate root for the common double-precision case.

// validation uses `!(x > y)` so NaN inputs fail the check too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beliefs;
pub mod benchmarks;
pub mod costs;
pub mod decision;
pub mod dynamics;
pub mod error;
pub mod model;
pub mod rng;
pub mod statics;
pub mod welfare;

use std::fmt;

use num_traits::{Float, FromPrimitive, ToPrimitive};

pub use error::{ModelError, Result};

/// Scalar type for probability and log-odds arithmetic (`f32` or `f64`).
pub trait Real:
    Float + FromPrimitive + ToPrimitive + fmt::Debug + fmt::Display + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float + FromPrimitive + ToPrimitive + fmt::Debug + fmt::Display + Send + Sync + 'static
{
}

/// Converts an `f64` constant into the working scalar type.
///
/// Panics if the value is not representable, which cannot happen for the
/// finite literals this crate uses.
pub fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("finite f64 constant must be representable")
}

pub type ModelParamsF64 = model::ModelParams<f64>;
pub type CostModelF64 = costs::CostModel<f64>;
pub type SimConfigF64 = dynamics::SimConfig<f64>;
pub type SubsidyRuleF64 = welfare::SubsidyRule<f64>;
