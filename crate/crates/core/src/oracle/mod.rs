//! Brute-force Lindblad dynamics on the full `2^N`-dimensional Hilbert space.
//!
//! Basis states are products of `s³` eigenstates with site 0 as the most significant
//! bit and bit value 0 for `|↑⟩`; superoperators act on column-stacked `vec(ρ)`.

mod channels;
mod density;
mod lindblad;
mod operators;

pub use channels::{channel_matrix, channels_from_density};
pub use density::{dicke_ensemble, expectation, DensityMatrix, StateTolerance};
pub use lindblad::{
    build_superoperator, evolve_exact, lindbladian_gap, lindbladian_spectrum, LindbladAction, LindbladSpec, Placement,
    Process, DENSE_GAP_MAX_SITES, MATRIX_FREE_MAX_SITES, SUPEROPERATOR_MAX_SITES,
};
pub use operators::{embed, Observable};
