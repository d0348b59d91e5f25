//! Simulation and analysis toolkit for thermometry with a transmon qubit.
//!
//! The crate models the three lowest transmon levels coupled to thermal baths
//! and quasiparticle channels, simulates the six-sequence pi-pulse population
//! measurement, turns readout outcomes into effective temperatures with nine
//! ratio estimators, and propagates statistical errors down to the quantum
//! Fisher information limit.
//!
//! Internally everything is SI with angular frequencies (rad/s), kelvin,
//! seconds and joules. Conversions from lab units live in [`units`].

pub mod bath;
pub mod bessel;
pub mod device;
pub mod dynamics;
pub mod error;
pub mod error_analysis;
pub mod experiment;
pub mod fit;
pub mod protocol;
pub mod quasiparticle;
pub mod thermometry;
pub mod units;

pub use error::{Error, Result};
