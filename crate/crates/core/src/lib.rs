//! Simulation and analysis of time-delayed coherent feedback on the
//! single-excitation Jaynes-Cummings model.
//!
//! Two reservoir structures are covered: a continuum of modes, which yields a
//! single-delay (Pyragas-type) equation for the cavity amplitude, and a
//! discrete set of modes confined by a mirror, which yields delayed taps at
//! every multiple of the roundtrip time.

pub mod analysis;
pub mod engine;
pub mod error;
pub mod models;
pub mod params;
pub mod trajectory;
pub mod validation;

pub use error::{Error, Result};
pub use models::{InitialState, ModelKind, SimConfig};
pub use params::FeedbackParams;
pub use trajectory::{ModeRegister, Trajectory};
