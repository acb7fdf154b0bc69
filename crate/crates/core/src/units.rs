//! Physical constants and unit conversions.
//!
//! Internal working units: nm, eV, s. `C3` is carried in meV·nm³ at API
//! boundaries and converted to eV·nm³ inside formulas.

/// Reduced Planck constant in eV·s.
pub const HBAR_EV_S: f64 = 6.582119569e-16;
/// Planck constant in eV·s.
pub const H_EV_S: f64 = 4.135667696e-15;
/// Unified atomic mass unit in kg.
pub const AMU_KG: f64 = 1.660_539_066_60e-27;
/// Elementary charge in C (J per eV).
pub const EV_J: f64 = 1.602_176_634e-19;

/// nm³ per Å³.
pub const ANGSTROM3_IN_NM3: f64 = 1.0e-3;
/// Hartree·bohr⁶ expressed in eV·Å⁶, for ingesting literature C6 values given in atomic units.
pub const HARTREE_BOHR6_IN_EV_ANGSTROM6: f64 = 0.597;
/// meV per eV.
pub const MEV_PER_EV: f64 = 1.0e3;

pub fn deg_to_rad(deg: f64) -> f64 {
    deg.to_radians()
}

/// Convert a speed in m/s to nm/s.
pub fn mps_to_nmps(v: f64) -> f64 {
    v * 1.0e9
}

/// Convert C6 from atomic units (E_h a0^6) to eV·nm⁶.
pub fn c6_atomic_to_ev_nm6(c6_au: f64) -> f64 {
    c6_au * HARTREE_BOHR6_IN_EV_ANGSTROM6 * 1.0e-6
}
