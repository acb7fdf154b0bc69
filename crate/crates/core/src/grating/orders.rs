//! Relative intensities of the principal diffraction maxima.
//!
//! At a principal maximum the N-slit factor equals `N²` for every order, so the
//! ratio `I_n / I_tot` depends only on the slit envelope `|f_slit(θ_n)|²`.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{invalid, Result};
use crate::grating::phase::diffraction_angle;
use crate::grating::slit::{slit_amplitude, SlitQuadrature};
use crate::grating::types::{BeamState, GratingGeometry, OrderIntensities, OrderValue, Potential};
use crate::quadrature::gauss_hermite_normal;

/// Model intensities together with their numerical error estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictedOrders {
    pub intensities: OrderIntensities,
    /// Absolute error bound on each `R_n` propagated from the slit quadrature.
    pub errors: BTreeMap<i32, f64>,
}

impl PredictedOrders {
    pub fn intensity(&self, order: i32) -> f64 {
        self.intensities.intensity(order).unwrap_or(0.0)
    }
    pub fn error(&self, order: i32) -> f64 {
        self.errors.get(&order).copied().unwrap_or(0.0)
    }
}

/// `R_n` for all orders `-n_max ..= n_max`.
pub fn order_intensities(
    n_max: u32,
    pot: &Potential,
    geom: &GratingGeometry,
    beam: &BeamState,
    quad: &SlitQuadrature,
) -> Result<PredictedOrders> {
    order_intensities_for(&symmetric_orders(n_max), pot, geom, beam, quad)
}

/// `R_n` normalised over exactly the given set of orders.
pub fn order_intensities_for(
    orders: &[i32],
    pot: &Potential,
    geom: &GratingGeometry,
    beam: &BeamState,
    quad: &SlitQuadrature,
) -> Result<PredictedOrders> {
    let angles = order_angles(orders, beam, geom)?;
    let power = envelope_power(&angles, pot, geom, beam, quad)?;
    normalize_power(orders, &power)
}

/// `R_n` averaged over a Gaussian velocity distribution of FWHM `Δv = (Δv/u) u`.
///
/// Each velocity node contributes its envelope `|f_slit|²` evaluated at the
/// fixed angles `θ_n(u)` of the mean velocity; the weighted sum is renormalised.
/// Gauss–Hermite nodes are used, so `quad_points` must be odd (the middle node
/// sits at `u`); a single node reproduces the monochromatic result exactly.
pub fn velocity_averaged_intensities(
    n_max: u32,
    pot: &Potential,
    geom: &GratingGeometry,
    beam: &BeamState,
    quad_points: usize,
    quad: &SlitQuadrature,
) -> Result<PredictedOrders> {
    velocity_averaged_intensities_for(&symmetric_orders(n_max), pot, geom, beam, quad_points, quad)
}

pub fn velocity_averaged_intensities_for(
    orders: &[i32],
    pot: &Potential,
    geom: &GratingGeometry,
    beam: &BeamState,
    quad_points: usize,
    quad: &SlitQuadrature,
) -> Result<PredictedOrders> {
    if quad_points == 0 || quad_points.is_multiple_of(2) {
        return Err(invalid(format!(
            "velocity quadrature needs an odd node count (got {quad_points})"
        )));
    }
    let angles = order_angles(orders, beam, geom)?;
    let u = beam.velocity_mps();
    let sigma_v = beam.velocity_spread() * u / (2.0 * (2.0 * std::f64::consts::LN_2).sqrt());
    let mut total: BTreeMap<u32, (f64, f64)> = BTreeMap::new();
    for (z, w) in gauss_hermite_normal(quad_points)? {
        let v = u + sigma_v * z;
        if !(v > 0.0) {
            return Err(invalid(
                "velocity spread too wide: quadrature node at non-positive speed",
            ));
        }
        let node_beam = beam.at_velocity(v)?;
        for (n, (p, e)) in envelope_power(&angles, pot, geom, &node_beam, quad)? {
            let acc = total.entry(n).or_insert((0.0, 0.0));
            acc.0 += w * p;
            acc.1 += w * e;
        }
    }
    normalize_power(orders, &total)
}

pub(crate) fn symmetric_orders(n_max: u32) -> Vec<i32> {
    let n = n_max as i32;
    (-n..=n).collect()
}

fn order_angles(
    orders: &[i32],
    beam: &BeamState,
    geom: &GratingGeometry,
) -> Result<BTreeMap<u32, f64>> {
    if orders.is_empty() {
        return Err(invalid("no diffraction orders requested"));
    }
    let unique: BTreeSet<i32> = orders.iter().copied().collect();
    if unique.len() != orders.len() {
        return Err(invalid("diffraction orders must be distinct"));
    }
    let lambda = beam.wavelength_nm();
    let mut angles = BTreeMap::new();
    for &n in &unique {
        let theta = diffraction_angle(n, lambda, geom.period_nm())?;
        angles.insert(n.unsigned_abs(), theta.abs());
    }
    Ok(angles)
}

/// `|f_slit(θ)|²` and its error bound for each distinct `|n|`.
fn envelope_power(
    angles: &BTreeMap<u32, f64>,
    pot: &Potential,
    geom: &GratingGeometry,
    beam: &BeamState,
    quad: &SlitQuadrature,
) -> Result<BTreeMap<u32, (f64, f64)>> {
    let list: Vec<(u32, f64)> = angles.iter().map(|(n, t)| (*n, *t)).collect();
    let eval = |&(n, theta): &(u32, f64)| -> Result<(u32, (f64, f64))> {
        let amp = slit_amplitude(theta, pot, geom, beam, quad)?;
        let mag = amp.value.norm();
        let power = amp.value.norm_sqr();
        let err = 2.0 * mag * amp.error + amp.error * amp.error;
        Ok((n, (power, err)))
    };
    #[cfg(feature = "parallel")]
    let out: Result<Vec<_>> = {
        use rayon::prelude::*;
        list.par_iter().map(eval).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let out: Result<Vec<_>> = list.iter().map(eval).collect();
    Ok(out?.into_iter().collect())
}

fn normalize_power(orders: &[i32], power: &BTreeMap<u32, (f64, f64)>) -> Result<PredictedOrders> {
    let lookup = |n: i32| power[&n.unsigned_abs()];
    let total: f64 = orders.iter().map(|&n| lookup(n).0).sum();
    let total_err: f64 = orders.iter().map(|&n| lookup(n).1).sum();
    if !(total > 0.0) {
        return Err(invalid("all requested orders have zero intensity"));
    }
    let mut raw = BTreeMap::new();
    let mut errors = BTreeMap::new();
    for &n in orders {
        let (p, e) = lookup(n);
        raw.insert(
            n,
            OrderValue {
                intensity: p,
                sigma: None,
            },
        );
        errors.insert(n, e / total + p * total_err / (total * total));
    }
    Ok(PredictedOrders {
        intensities: OrderIntensities::normalize(raw)?,
        errors,
    })
}
