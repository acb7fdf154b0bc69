use crate::error::{invalid, Result};
use crate::grating::slit::{slit_amplitude, SlitQuadrature};
use crate::grating::types::{AngularScan, BeamState, GratingGeometry, Potential};

/// `|sin(N x) / sin(x)|²` with `x = (k d / 2) sin θ`, continuous through the
/// principal maxima where it equals `N²`.
pub fn n_slit_factor(theta: f64, wavelength_nm: f64, period_nm: f64, slits: u32) -> f64 {
    let n = slits as f64;
    let x = std::f64::consts::PI * period_nm * theta.sin() / wavelength_nm;
    // Reduce to the distance from the nearest multiple of π; the ratio's
    // modulus is π-periodic.
    let r = x - (x / std::f64::consts::PI).round() * std::f64::consts::PI;
    if r.abs() < 1e-8 {
        let n2 = n * n;
        return n2 * (1.0 - (n2 - 1.0) * r * r / 3.0);
    }
    let ratio = (n * r).sin() / r.sin();
    ratio * ratio
}

/// Far-field intensity `|N-slit factor · f_slit(θ)|²` on a strictly increasing grid.
pub fn angular_pattern(
    thetas: &[f64],
    slits: u32,
    pot: &Potential,
    geom: &GratingGeometry,
    beam: &BeamState,
    quad: &SlitQuadrature,
) -> Result<AngularScan> {
    if slits == 0 {
        return Err(invalid("slit count must be >= 1"));
    }
    if thetas.is_empty() || thetas.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid(
            "angle grid must be non-empty and strictly increasing",
        ));
    }
    let lambda = beam.wavelength_nm();
    let eval = |&theta: &f64| -> Result<f64> {
        let amp = slit_amplitude(theta, pot, geom, beam, quad)?;
        Ok(n_slit_factor(theta, lambda, geom.period_nm(), slits) * amp.value.norm_sqr())
    };
    #[cfg(feature = "parallel")]
    let values: Result<Vec<f64>> = {
        use rayon::prelude::*;
        thetas.par_iter().map(eval).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let values: Result<Vec<f64>> = thetas.iter().map(eval).collect();
    AngularScan::new(thetas.to_vec(), values?, slits)
}

/// Uniform grid covering orders `-n_max ..= n_max` with half an order spacing
/// of margin on each side.
pub fn order_grid(
    n_max: u32,
    wavelength_nm: f64,
    period_nm: f64,
    points: usize,
) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(invalid("angle grid needs at least two points"));
    }
    let edge = ((n_max as f64 + 0.5) * wavelength_nm / period_nm)
        .min(1.0)
        .asin();
    Ok((0..points)
        .map(|i| -edge + 2.0 * edge * i as f64 / (points - 1) as f64)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_limits() {
        let lambda = 0.0425;
        let d: f64 = 100.0;
        let t1 = (lambda / d).asin();
        assert_eq!(n_slit_factor(0.0, lambda, d, 100), 1e4);
        assert!((n_slit_factor(t1, lambda, d, 100) - 1e4).abs() < 1e-6);
        assert_eq!(n_slit_factor(0.3 * t1, lambda, d, 1), 1.0);
        // First zero next to the central maximum.
        let zero = (lambda / (100.0 * d)).asin();
        assert!(n_slit_factor(zero, lambda, d, 100) < 1e-20);
    }

    #[test]
    fn single_slit_is_envelope() {
        let geom = GratingGeometry::new(100.0, 66.8, 53.0, 0.19).unwrap();
        let beam = BeamState::new(4.0026, 2347.0).unwrap();
        let q = SlitQuadrature::default();
        let grid = [-1e-3, 2e-4, 7e-4];
        let scan = angular_pattern(&grid, 1, &Potential::free(), &geom, &beam, &q).unwrap();
        for (theta, v) in scan.iter() {
            let f = slit_amplitude(theta, &Potential::free(), &geom, &beam, &q).unwrap();
            assert!((v - f.value.norm_sqr()).abs() < 1e-12 * v);
        }
        assert!(angular_pattern(&[1.0, 0.0], 1, &Potential::free(), &geom, &beam, &q).is_err());
    }
}
