//! Lifshitz-theory prediction of `C3` from the material's dielectric response
//! and the atom's dynamic polarizability at imaginary frequency.

mod atom;
mod c3;
mod dielectric;

pub use atom::{
    one_oscillator_alpha, oscillator_energy_from_c6, AtomModel, OneOscillatorAtom,
    TabulatedPolarizability, TABLE_INTERPOLATION,
};
pub use c3::{
    c3_lifshitz, c3_lifshitz_prepared, c3_one_oscillator, static_response_g0, surface_response,
    C3Estimate, LifshitzOptions, PreparedSurface, SurfaceModel,
};
pub use dielectric::{
    eps_imaginary_axis, tauc_lorentz_eps2, ImaginaryAxisTable, KramersKronig, TableOptions,
    TaucLorentzParams,
};
