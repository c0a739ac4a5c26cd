//! Coupled-mode simulation of wireless power transfer between a source and a
//! drain coil.
//!
//! Two driving protocols are modelled: the static resonant scheme, where the
//! coil frequencies and coupling are fixed, and adiabatic passage, where the
//! detuning between the coils is chirped through resonance so that energy is
//! handed over to the drain once and stays there.
//!
//! The crate is organised bottom-up:
//!
//! - [`model`]: domain types and the circuit-parameter conversions.
//! - [`schedules`]: coupling/detuning protocols with analytic derivatives.
//! - [`propagator`]: adaptive integration of the coupled-mode equations.
//! - [`adiabatic`]: adiabatic-basis diagnostics.
//! - [`metrics`]: efficiency and energy accounting.
//! - [`experiments`]: batch drivers for the standard simulation studies.
//! - [`cli`]: configuration loading, output writers and the command front end.

pub mod adiabatic;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod metrics;
pub mod model;
pub mod propagator;
pub mod schedules;

pub use error::{Error, Result};
pub use model::{CoilPair, CoilPhysical, LossModel, Scenario};
pub use propagator::{propagate, propagate_cycles, ReloadPolicy, Trajectory};
pub use schedules::Schedule;
