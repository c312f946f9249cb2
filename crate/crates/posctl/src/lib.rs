//! Inverse-optimal and universal-formula feedback for control-affine systems
//! evolving on the positive orthant with a positive scalar input.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix the common `f64` instantiation.

// NaN must fail every guard, so `!(x > y)` is intentional throughout
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod direct;
pub mod error;
pub mod numerics;
pub mod predprey;
pub mod redesign;
pub mod scalar;
pub mod shaping;
pub mod sim;
pub mod suites;
pub mod sysmodel;
pub mod universal;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Contractor64 = shaping::Contractor<f64>;
pub type Expander64 = shaping::Expander<f64>;
pub type Penalty64 = shaping::Penalty<f64>;
pub type GammaMaps64 = shaping::GammaMaps<f64>;
pub type PositiveSystem64 = sysmodel::PositiveSystem<f64>;
pub type ControlLyapunov64 = sysmodel::ControlLyapunov<f64>;
pub type Plant64 = sysmodel::Plant<f64>;
pub type SystemRegistry64 = sysmodel::SystemRegistry<f64>;
pub type RedesignProblem64 = redesign::RedesignProblem<f64>;
pub type DirectDesign64 = direct::DirectDesign<f64>;
pub type ClosedLoop64 = sim::ClosedLoop<f64>;
pub type TrajectoryRecord64 = sim::TrajectoryRecord<f64>;
pub type IntegratorOptions64 = sim::IntegratorOptions<f64>;

pub type Contractor32 = shaping::Contractor<f32>;
pub type Expander32 = shaping::Expander<f32>;
pub type Penalty32 = shaping::Penalty<f32>;
pub type PositiveSystem32 = sysmodel::PositiveSystem<f32>;
pub type DirectDesign32 = direct::DirectDesign<f32>;
pub type ClosedLoop32 = sim::ClosedLoop<f32>;
