//! Post-processing: finite-size scaling of the gap, late-time oscillation fits,
//! thermal phase diagrams and the two-spin closed form.

mod late_time;
mod phase;
mod scaling;
mod two_spin;

pub use late_time::{
    condensate_trajectory, late_time_average, late_time_fit, pair_amplitude, LateTimeFit, DEFAULT_DISCARD_GAPS,
};
pub use phase::{
    log_grid, optimal_temperature, phase_diagram_scan, phase_point, thermal_occupation, OptimalTemperature, PhasePoint,
};
pub use scaling::{
    fit_gap_scaling, fit_window, golden_min, half_decade_window, GapEntry, GapSeries, ScalingFit, ScalingModel,
    MIN_FIT_POINTS,
};
pub use two_spin::{two_spin_coefficients, two_spin_diagonal, two_spin_reference, TwoSpinDiagonal, TwoSpinReference};
