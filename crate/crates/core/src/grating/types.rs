use std::collections::BTreeMap;

use crate::error::{invalid, Result};
use crate::units::{AMU_KG, EV_J, H_EV_S};

/// Trapezoidal-bar transmission grating.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GratingGeometry {
    period_nm: f64,
    slit_width_nm: f64,
    bar_depth_nm: f64,
    wedge_angle_rad: f64,
}

impl GratingGeometry {
    pub fn new(
        period_nm: f64,
        slit_width_nm: f64,
        bar_depth_nm: f64,
        wedge_angle_rad: f64,
    ) -> Result<Self> {
        if !(period_nm.is_finite() && period_nm > 0.0) {
            return Err(invalid(format!(
                "grating period must be > 0 (got {period_nm})"
            )));
        }
        if !(slit_width_nm > 0.0 && slit_width_nm < period_nm) {
            return Err(invalid(format!(
                "slit width must satisfy 0 < s0 < d (got s0 = {slit_width_nm}, d = {period_nm})"
            )));
        }
        if !(bar_depth_nm.is_finite() && bar_depth_nm > 0.0) {
            return Err(invalid(format!(
                "bar depth must be > 0 (got {bar_depth_nm})"
            )));
        }
        if !(0.0..std::f64::consts::FRAC_PI_2).contains(&wedge_angle_rad) {
            return Err(invalid(format!(
                "wedge angle must lie in [0, pi/2) rad (got {wedge_angle_rad})"
            )));
        }
        Ok(Self {
            period_nm,
            slit_width_nm,
            bar_depth_nm,
            wedge_angle_rad,
        })
    }

    pub fn period_nm(&self) -> f64 {
        self.period_nm
    }
    pub fn slit_width_nm(&self) -> f64 {
        self.slit_width_nm
    }
    pub fn bar_depth_nm(&self) -> f64 {
        self.bar_depth_nm
    }
    pub fn wedge_angle_rad(&self) -> f64 {
        self.wedge_angle_rad
    }
}

/// Monochromatic (or nearly so) atomic beam.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamState {
    mass_u: f64,
    velocity_mps: f64,
    velocity_spread: f64,
}

impl BeamState {
    pub fn new(mass_u: f64, velocity_mps: f64) -> Result<Self> {
        Self::with_spread(mass_u, velocity_mps, 0.0)
    }

    /// `velocity_spread` is the FWHM Δv divided by the mean velocity u.
    pub fn with_spread(mass_u: f64, velocity_mps: f64, velocity_spread: f64) -> Result<Self> {
        if !(mass_u.is_finite() && mass_u > 0.0) {
            return Err(invalid(format!("mass must be > 0 (got {mass_u})")));
        }
        if !(velocity_mps.is_finite() && velocity_mps > 0.0) {
            return Err(invalid(format!(
                "velocity must be > 0 (got {velocity_mps})"
            )));
        }
        if !(0.0..1.0).contains(&velocity_spread) {
            return Err(invalid(format!(
                "velocity spread must lie in [0, 1) (got {velocity_spread})"
            )));
        }
        Ok(Self {
            mass_u,
            velocity_mps,
            velocity_spread,
        })
    }

    pub fn mass_u(&self) -> f64 {
        self.mass_u
    }
    pub fn velocity_mps(&self) -> f64 {
        self.velocity_mps
    }
    pub fn velocity_spread(&self) -> f64 {
        self.velocity_spread
    }

    /// de Broglie wavelength in nm.
    pub fn wavelength_nm(&self) -> f64 {
        wavelength_nm(self.mass_u, self.velocity_mps)
    }

    /// Wavenumber `k = 2π/λ` in nm⁻¹.
    pub fn wavenumber(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.wavelength_nm()
    }

    /// Same species at another velocity, with no spread.
    pub fn at_velocity(&self, velocity_mps: f64) -> Result<Self> {
        Self::new(self.mass_u, velocity_mps)
    }
}

pub(crate) fn wavelength_nm(mass_u: f64, velocity_mps: f64) -> f64 {
    H_EV_S * EV_J / (mass_u * AMU_KG * velocity_mps) * 1.0e9
}

/// Strength of the attractive `-C3/l^3` atom–surface potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Potential {
    c3_mev_nm3: f64,
}

impl Potential {
    pub fn new(c3_mev_nm3: f64) -> Result<Self> {
        if !(c3_mev_nm3.is_finite() && c3_mev_nm3 >= 0.0) {
            return Err(invalid(format!(
                "C3 must be finite and >= 0 (got {c3_mev_nm3})"
            )));
        }
        Ok(Self { c3_mev_nm3 })
    }

    pub fn free() -> Self {
        Self { c3_mev_nm3: 0.0 }
    }

    pub fn c3_mev_nm3(&self) -> f64 {
        self.c3_mev_nm3
    }
}

/// Sampled angular distribution behind a grating of `slits` illuminated slits.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularScan {
    thetas: Vec<f64>,
    values: Vec<f64>,
    slits: u32,
}

impl AngularScan {
    pub fn new(thetas: Vec<f64>, values: Vec<f64>, slits: u32) -> Result<Self> {
        if slits == 0 {
            return Err(invalid("slit count must be >= 1"));
        }
        if thetas.len() != values.len() {
            return Err(invalid("angle and value columns differ in length"));
        }
        if thetas.is_empty() {
            return Err(invalid("angular scan is empty"));
        }
        if thetas.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(invalid("angular scan contains non-finite values"));
        }
        if let Some(i) = thetas.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(invalid(format!(
                "angles must be strictly increasing (sample {} -> {})",
                i,
                i + 1
            )));
        }
        Ok(Self {
            thetas,
            values,
            slits,
        })
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn slits(&self) -> u32 {
        self.slits
    }
    pub fn len(&self) -> usize {
        self.thetas.len()
    }
    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.thetas.iter().copied().zip(self.values.iter().copied())
    }
}

/// One diffraction order's relative intensity and optional 1σ uncertainty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderValue {
    pub intensity: f64,
    pub sigma: Option<f64>,
}

/// Relative intensities `R_n = I_n / I_tot` over a set of orders.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderIntensities {
    entries: BTreeMap<i32, OrderValue>,
}

/// Tolerance on `Σ R_n = 1` for already-normalised data.
pub const NORMALIZATION_TOL: f64 = 1e-12;

impl OrderIntensities {
    /// Accepts already-normalised intensities.
    pub fn from_normalized(entries: BTreeMap<i32, OrderValue>) -> Result<Self> {
        validate_entries(&entries)?;
        let total: f64 = entries.values().map(|v| v.intensity).sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(invalid(format!(
                "relative intensities sum to {total}, not 1"
            )));
        }
        Ok(Self { entries })
    }

    /// Divides raw intensities (and uncertainties) by their total.
    pub fn normalize(raw: BTreeMap<i32, OrderValue>) -> Result<Self> {
        validate_entries(&raw)?;
        let total: f64 = raw.values().map(|v| v.intensity).sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(invalid("total intensity must be positive"));
        }
        let entries = raw
            .into_iter()
            .map(|(n, v)| {
                (
                    n,
                    OrderValue {
                        intensity: v.intensity / total,
                        sigma: v.sigma.map(|s| s / total),
                    },
                )
            })
            .collect();
        Ok(Self { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
    pub fn orders(&self) -> Vec<i32> {
        self.entries.keys().copied().collect()
    }
    pub fn get(&self, order: i32) -> Option<OrderValue> {
        self.entries.get(&order).copied()
    }
    pub fn intensity(&self, order: i32) -> Option<f64> {
        self.entries.get(&order).map(|v| v.intensity)
    }
    pub fn iter(&self) -> impl Iterator<Item = (i32, OrderValue)> + '_ {
        self.entries.iter().map(|(n, v)| (*n, *v))
    }
    pub fn total(&self) -> f64 {
        self.entries.values().map(|v| v.intensity).sum()
    }
    pub fn has_sigmas(&self) -> bool {
        !self.entries.is_empty()
            && self
                .entries
                .values()
                .all(|v| matches!(v.sigma, Some(s) if s > 0.0))
    }
}

fn validate_entries(entries: &BTreeMap<i32, OrderValue>) -> Result<()> {
    if entries.is_empty() {
        return Err(invalid("no diffraction orders given"));
    }
    for (n, v) in entries {
        if !(v.intensity.is_finite() && v.intensity >= 0.0) {
            return Err(invalid(format!(
                "order {n}: intensity must be finite and >= 0"
            )));
        }
        if let Some(s) = v.sigma {
            if !(s.is_finite() && s >= 0.0) {
                return Err(invalid(format!("order {n}: sigma must be finite and >= 0")));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometry_invariants() {
        assert!(GratingGeometry::new(100.0, 66.8, 53.0, 0.19).is_ok());
        assert!(GratingGeometry::new(100.0, 100.0, 53.0, 0.19).is_err());
        assert!(GratingGeometry::new(100.0, 66.8, 0.0, 0.19).is_err());
        assert!(GratingGeometry::new(100.0, 66.8, 53.0, 1.6).is_err());
        assert!(GratingGeometry::new(-1.0, 0.5, 53.0, 0.0).is_err());
    }

    #[test]
    fn beam_invariants() {
        assert!(BeamState::new(4.0026, 0.0).is_err());
        assert!(BeamState::new(-1.0, 100.0).is_err());
        assert!(BeamState::with_spread(4.0, 100.0, 1.0).is_err());
        let b = BeamState::new(4.0026, 2347.0).unwrap();
        assert!((b.wavenumber() * b.wavelength_nm() - 2.0 * std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn scan_rejects_non_monotone_angles() {
        assert!(AngularScan::new(vec![0.0, 1.0, 1.0], vec![1.0; 3], 1).is_err());
        assert!(AngularScan::new(vec![0.0, 1.0], vec![1.0; 2], 0).is_err());
        assert!(AngularScan::new(vec![0.0, 1.0], vec![1.0; 2], 3).is_ok());
    }

    #[test]
    fn normalization() {
        let raw: BTreeMap<i32, OrderValue> = [(0, 4.0), (1, 2.0), (-1, 2.0)]
            .into_iter()
            .map(|(n, v)| {
                (
                    n,
                    OrderValue {
                        intensity: v,
                        sigma: Some(0.4),
                    },
                )
            })
            .collect();
        let o = OrderIntensities::normalize(raw.clone()).unwrap();
        assert_eq!(o.intensity(0), Some(0.5));
        assert_eq!(o.intensity(-1), Some(0.25));
        assert_eq!(o.get(1).unwrap().sigma, Some(0.05));
        assert!(OrderIntensities::from_normalized(raw).is_err());
    }
}
