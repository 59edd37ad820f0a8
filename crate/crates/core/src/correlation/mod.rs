//! Closed two-point correlation dynamics: generator assembly, spectra, time evolution
//! and steady states.

mod evolve;
mod generator;
mod spectrum;
mod state;
mod steady;

pub use evolve::{evolve, geometric_times, PropagationMethod, Propagator, DENSE_PROPAGATION_MAX};
pub use generator::{
    build_generator, build_generator_field, build_generator_pure, build_generator_thermal, ConservedQuantity, Generator,
};
pub use spectrum::{dense_spectrum, leading_spectrum, BlockReport, SpectrumResult, DENSE_MAX, ZERO_REL_TOL};
pub use state::{all_down, custom_state, infinite_temperature, Channel, ChannelLayout, CorrelationState, Scenario};
pub use steady::{steady_state, STEADY_DENSE_MAX};
