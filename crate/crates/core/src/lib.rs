//! Single-slit matter-wave diffraction workbench.
//!
//! The numerical core (`wavefield`, `pattern`, `detector`, `hypothesis`) is
//! generic over the floating-point scalar through [`Real`]; the aliases
//! below pin the common `f64` (and `f32`) instantiations. Physical constants
//! and the drop-experiment calculators in `feasibility` work in `f64` SI
//! units only, since several of the quantities involved (squared momenta of
//! order 1e-58 N²·s²) are below the `f32` range.

pub mod detector;
pub mod error;
pub mod feasibility;
pub mod hypothesis;
pub mod pattern;
pub mod quantities;
pub mod scalar;
pub mod wavefield;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Grid = wavefield::Grid1D<f64>;
pub type Field = wavefield::ComplexField<f64>;
pub type Source = wavefield::SourceSpec<f64>;
pub type Profile = pattern::IntensityProfile<f64>;
pub type Features = pattern::PatternFeatures<f64>;
pub type Scenario = hypothesis::Scenario<f64>;
pub type Model = hypothesis::DeflectionModel<f64>;
pub type Prediction = hypothesis::Prediction<f64>;
pub type BuildUp = detector::BuildUp<f64>;
pub type Event = detector::DetectionEvent<f64>;

pub type Grid32 = wavefield::Grid1D<f32>;
pub type Field32 = wavefield::ComplexField<f32>;
pub type Profile32 = pattern::IntensityProfile<f32>;
