//! Tree-grass dynamics under periodic pulse fires.
//!
//! Grass and trees grow logistically, trees shade grass, and a fire at every
//! multiple of the fire period removes a fixed fraction of grass and a
//! fuel-dependent fraction of trees. The crate provides the exact
//! within-period flow, the periodic grassland and savanna orbits, threshold
//! quantities with a regime classifier, and time-domain simulators.

pub mod closed_form;
pub mod config;
pub mod error;
pub mod model;
pub mod output;
pub mod presets;
pub mod quadrature;
pub mod roots;
pub mod simulate;
pub mod stability;

pub use error::{Error, Result};
pub use model::{
    apply_impulse, continuous_rhs, derive_quantities, fire_intensity, DerivedQuantities,
    ImpulseRecord, Model, OmegaArg, State, VegetationParams,
};
