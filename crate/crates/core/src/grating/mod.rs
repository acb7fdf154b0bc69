//! Slit transmission amplitudes, diffraction-order intensities and angular
//! patterns for an atom beam crossing a transmission grating.

mod orders;
mod pattern;
mod phase;
mod slit;
mod types;

pub use orders::{
    order_intensities, order_intensities_for, velocity_averaged_intensities,
    velocity_averaged_intensities_for, PredictedOrders,
};
pub use pattern::{angular_pattern, n_slit_factor, order_grid};
pub use phase::{bar_transmission_phase, de_broglie_wavelength, diffraction_angle, PhaseProfile};
pub use slit::{slit_amplitude, SlitAmplitude, SlitQuadrature};
pub use types::{
    AngularScan, BeamState, GratingGeometry, OrderIntensities, OrderValue, Potential,
    NORMALIZATION_TOL,
};
