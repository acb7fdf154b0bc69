//! Seeded synthetic data.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Result};
use crate::grating::{
    angular_pattern, order_intensities_for, AngularScan, BeamState, GratingGeometry,
    OrderIntensities, OrderValue, Potential, SlitQuadrature,
};

/// Generator identifier written to every output that used random numbers.
pub const RNG_ALGORITHM: &str =
    "chacha20(rand_chacha 0.9, seed_from_u64)+standard-normal(rand_distr 0.5)";

/// Multiplicative Gaussian noise: each value becomes `v (1 + fraction z)`,
/// clamped at zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Noise {
    pub fraction: f64,
    pub seed: u64,
}

impl Noise {
    pub fn none() -> Self {
        Self {
            fraction: 0.0,
            seed: 0,
        }
    }

    pub fn apply(&self, values: &[f64]) -> Result<Vec<f64>> {
        if !(self.fraction.is_finite() && self.fraction >= 0.0) {
            return Err(invalid(format!(
                "noise fraction must be >= 0 (got {})",
                self.fraction
            )));
        }
        if self.fraction == 0.0 {
            return Ok(values.to_vec());
        }
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        Ok(values
            .iter()
            .map(|v| {
                let z: f64 = StandardNormal.sample(&mut rng);
                (v * (1.0 + self.fraction * z)).max(0.0)
            })
            .collect())
    }
}

/// The N-slit angular pattern at `thetas` with multiplicative noise.
pub fn synthesize_scan(
    pot: &Potential,
    geom: &GratingGeometry,
    beam: &BeamState,
    slits: u32,
    thetas: &[f64],
    noise: &Noise,
    quad: &SlitQuadrature,
) -> Result<AngularScan> {
    let clean = angular_pattern(thetas, slits, pot, geom, beam, quad)?;
    let noisy = noise.apply(clean.values())?;
    AngularScan::new(clean.thetas().to_vec(), noisy, slits)
}

/// Model `R_n` over `orders` with multiplicative noise, renormalised.
///
/// With noise each order carries `σ = fraction × R_n` (before renormalisation);
/// noiseless data carry no uncertainties.
pub fn synthesize_orders(
    orders: &[i32],
    pot: &Potential,
    geom: &GratingGeometry,
    beam: &BeamState,
    noise: &Noise,
    quad: &SlitQuadrature,
) -> Result<OrderIntensities> {
    let model = order_intensities_for(orders, pot, geom, beam, quad)?;
    let clean: Vec<f64> = orders.iter().map(|&n| model.intensity(n)).collect();
    let noisy = noise.apply(&clean)?;
    let raw: BTreeMap<i32, OrderValue> = orders
        .iter()
        .zip(clean.iter().zip(noisy))
        .map(|(&n, (&c, v))| {
            let sigma = (noise.fraction > 0.0).then_some(noise.fraction * c);
            (
                n,
                OrderValue {
                    intensity: v,
                    sigma,
                },
            )
        })
        .collect();
    OrderIntensities::normalize(raw)
}
