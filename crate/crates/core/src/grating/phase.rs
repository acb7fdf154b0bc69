//! Kinematics and the eikonal phase accumulated next to a grating bar.

use crate::error::{invalid, Error, Result};
use crate::grating::types::{wavelength_nm, BeamState, GratingGeometry, Potential};
use crate::units::{mps_to_nmps, HBAR_EV_S, MEV_PER_EV};

/// de Broglie wavelength `h / (m v)` in nm for a mass in u and a speed in m/s.
pub fn de_broglie_wavelength(mass_u: f64, velocity_mps: f64) -> Result<f64> {
    if !(mass_u.is_finite() && mass_u > 0.0) || !(velocity_mps.is_finite() && velocity_mps > 0.0) {
        return Err(invalid(format!(
            "mass and velocity must be positive (got m = {mass_u} u, v = {velocity_mps} m/s)"
        )));
    }
    Ok(wavelength_nm(mass_u, velocity_mps))
}

/// Angle of the `order`-th principal maximum, `asin(n λ / d)`.
pub fn diffraction_angle(order: i32, wavelength_nm: f64, period_nm: f64) -> Result<f64> {
    if !(wavelength_nm > 0.0 && period_nm > 0.0) {
        return Err(invalid("wavelength and period must be positive"));
    }
    let s = order as f64 * wavelength_nm / period_nm;
    if s.abs() > 1.0 {
        return Err(Error::EvanescentOrder {
            order,
            ratio: s.abs(),
        });
    }
    Ok(s.asin())
}

/// Eikonal phase `φ(ζ)` for straight-line passage at distance `ζ` from the bar edge.
///
/// `φ(ζ) = c / ζ³ · (1 + T/(2ζ)) / (1 + T/ζ)²` with `c = C3 t / (ħ v)` and
/// `T = t tan β`. Equivalently `φ = c (2ζ + T) / (2 ζ² (ζ + T)²)`, which is
/// what the derivative formulas below differentiate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseProfile {
    coeff: f64,
    taper: f64,
}

impl PhaseProfile {
    pub fn new(pot: &Potential, geom: &GratingGeometry, beam: &BeamState) -> Self {
        let c3_ev = pot.c3_mev_nm3() / MEV_PER_EV;
        let t = geom.bar_depth_nm();
        Self {
            coeff: c3_ev * t / (HBAR_EV_S * mps_to_nmps(beam.velocity_mps())),
            taper: t * geom.wedge_angle_rad().tan(),
        }
    }

    /// `C3 t / (ħ v)` in rad·nm³.
    pub fn coefficient(&self) -> f64 {
        self.coeff
    }

    /// `t tan β` in nm.
    pub fn taper(&self) -> f64 {
        self.taper
    }

    pub fn is_free(&self) -> bool {
        self.coeff == 0.0
    }

    pub fn phase(&self, zeta: f64) -> f64 {
        let r = self.taper / zeta;
        let bracket = (1.0 + 0.5 * r) / ((1.0 + r) * (1.0 + r));
        self.coeff / (zeta * zeta * zeta) * bracket
    }

    /// `[φ, φ', φ'', φ''']` at `ζ`, using the logarithmic derivative
    /// `L = φ'/φ = 2/(2ζ+T) - 2/ζ - 2/(ζ+T)`.
    pub fn derivatives(&self, zeta: f64) -> [f64; 4] {
        let phi = self.phase(zeta);
        let a = 2.0 * zeta + self.taper;
        let b = zeta + self.taper;
        let l = 2.0 / a - 2.0 / zeta - 2.0 / b;
        let l1 = -4.0 / (a * a) + 2.0 / (zeta * zeta) + 2.0 / (b * b);
        let l2 = 16.0 / (a * a * a) - 4.0 / (zeta * zeta * zeta) - 4.0 / (b * b * b);
        [
            phi,
            phi * l,
            phi * (l * l + l1),
            phi * (l * l * l + 3.0 * l * l1 + l2),
        ]
    }
}

/// Phase `φ(ζ)` in rad such that the slit transmission is `τ(ζ) = exp(i φ(ζ))`.
pub fn bar_transmission_phase(
    zeta_nm: f64,
    pot: &Potential,
    geom: &GratingGeometry,
    beam: &BeamState,
) -> Result<f64> {
    if !(zeta_nm.is_finite() && zeta_nm > 0.0) {
        return Err(invalid(format!(
            "impact parameter must be > 0 (got {zeta_nm})"
        )));
    }
    Ok(PhaseProfile::new(pot, geom, beam).phase(zeta_nm))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn he_beam() -> BeamState {
        BeamState::new(4.0026, 2347.0).unwrap()
    }

    #[test]
    fn wavelengths_of_metastable_beams() {
        let he = de_broglie_wavelength(4.0026, 2347.0).unwrap();
        let ne = de_broglie_wavelength(20.18, 873.0).unwrap();
        // Quoted wavelengths carry three significant figures.
        assert!((he * 1e3 / 42.5 - 1.0).abs() < 3e-3, "{he}");
        assert!((ne * 1e3 / 22.6 - 1.0).abs() < 3e-3, "{ne}");
        let half = de_broglie_wavelength(4.0026, 2.0 * 2347.0).unwrap();
        assert!((half - he / 2.0).abs() < 1e-16);
        assert!(de_broglie_wavelength(0.0, 1.0).is_err());
        assert!(de_broglie_wavelength(1.0, -1.0).is_err());
    }

    #[test]
    fn first_order_angle() {
        assert_eq!(diffraction_angle(0, 0.0425, 100.0).unwrap(), 0.0);
        let t1 = diffraction_angle(1, 0.0425, 100.0).unwrap();
        assert!((t1 - 4.25e-4).abs() < 1e-10);
        assert_eq!(diffraction_angle(-1, 0.0425, 100.0).unwrap(), -t1);
        assert!(matches!(
            diffraction_angle(3, 40.0, 100.0),
            Err(Error::EvanescentOrder { order: 3, .. })
        ));
    }

    #[test]
    fn phase_reference_value() {
        let geom = GratingGeometry::new(100.0, 66.8, 53.0, 11f64.to_radians()).unwrap();
        let pot = Potential::new(4.1).unwrap();
        let phi = bar_transmission_phase(10.0, &pot, &geom, &he_beam()).unwrap();
        assert!((phi - 5.17e-2).abs() < 5e-5, "{phi}");
        assert!(bar_transmission_phase(0.0, &pot, &geom, &he_beam()).is_err());
    }

    #[test]
    fn free_grating_has_zero_phase() {
        let geom = GratingGeometry::new(100.0, 66.8, 53.0, 0.2).unwrap();
        for z in [1e-3, 0.5, 20.0] {
            assert_eq!(
                bar_transmission_phase(z, &Potential::free(), &geom, &he_beam()).unwrap(),
                0.0
            );
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let geom = GratingGeometry::new(100.0, 66.8, 53.0, 0.19).unwrap();
        let p = PhaseProfile::new(&Potential::new(4.1).unwrap(), &geom, &he_beam());
        for z in [0.3, 2.0, 15.0] {
            let d = p.derivatives(z);
            let h = 1e-5 * z;
            let fd1 = (p.phase(z + h) - p.phase(z - h)) / (2.0 * h);
            let fd2 = (p.derivatives(z + h)[1] - p.derivatives(z - h)[1]) / (2.0 * h);
            let fd3 = (p.derivatives(z + h)[2] - p.derivatives(z - h)[2]) / (2.0 * h);
            assert!((d[1] - fd1).abs() < 1e-7 * d[1].abs());
            assert!((d[2] - fd2).abs() < 1e-7 * d[2].abs());
            assert!((d[3] - fd3).abs() < 1e-7 * d[3].abs());
        }
    }
}
