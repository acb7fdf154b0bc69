//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every function takes plain numbers and returns a flat `Vec<f64>` so the
//! page needs no glue beyond the generated module.

use wasm_bindgen::prelude::*;

use vdw_grating::grating::{
    angular_pattern, order_grid, order_intensities, BeamState, GratingGeometry, Potential,
    SlitQuadrature,
};
use vdw_grating::lifshitz::{
    c3_lifshitz_prepared, c3_one_oscillator, AtomModel, OneOscillatorAtom, SurfaceModel,
    TableOptions, TaucLorentzParams,
};

fn js(e: vdw_grating::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn setup(
    c3: f64,
    mass_u: f64,
    velocity: f64,
    d: f64,
    s0: f64,
    t: f64,
    beta_deg: f64,
) -> Result<(Potential, GratingGeometry, BeamState), vdw_grating::Error> {
    Ok((
        Potential::new(c3)?,
        GratingGeometry::new(d, s0, t, beta_deg.to_radians())?,
        BeamState::new(mass_u, velocity)?,
    ))
}

/// Relative intensities `R_0 ..= R_nmax` (the negative orders mirror them).
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn relative_orders(
    c3: f64,
    mass_u: f64,
    velocity: f64,
    d: f64,
    s0: f64,
    t: f64,
    beta_deg: f64,
    n_max: u32,
) -> Result<Vec<f64>, JsError> {
    let (pot, geom, beam) = setup(c3, mass_u, velocity, d, s0, t, beta_deg).map_err(js)?;
    let r = order_intensities(n_max, &pot, &geom, &beam, &SlitQuadrature::default()).map_err(js)?;
    Ok((0..=n_max as i32).map(|n| r.intensity(n)).collect())
}

/// Angular pattern as interleaved `[θ₀, I₀, θ₁, I₁, …]` over `±(n_max + ½)` orders.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn pattern(
    c3: f64,
    mass_u: f64,
    velocity: f64,
    d: f64,
    s0: f64,
    t: f64,
    beta_deg: f64,
    slits: u32,
    n_max: u32,
    points: usize,
) -> Result<Vec<f64>, JsError> {
    let (pot, geom, beam) = setup(c3, mass_u, velocity, d, s0, t, beta_deg).map_err(js)?;
    let thetas = order_grid(n_max, beam.wavelength_nm(), d, points).map_err(js)?;
    let scan = angular_pattern(
        &thetas,
        slits,
        &pot,
        &geom,
        &beam,
        &SlitQuadrature::with_tolerance(1e-6),
    )
    .map_err(js)?;
    Ok(scan.iter().flat_map(|(t, v)| [t, v]).collect())
}

/// Lifshitz prediction for a one-oscillator atom above a Tauc-Lorentz surface.
///
/// Returns `[C3, uncertainty, g0, C3 one-oscillator(E_S), ξ₀, g₀, ξ₁, g₁, …]`
/// with `g(iξ)` sampled at `samples` log-spaced energies from 0.01 to 1000 eV.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn lifshitz(
    alpha0_nm3: f64,
    ea_ev: f64,
    band_gap: f64,
    strength: f64,
    resonance: f64,
    width: f64,
    es_ev: f64,
    samples: usize,
) -> Result<Vec<f64>, JsError> {
    let atom = OneOscillatorAtom::new(alpha0_nm3, ea_ev).map_err(js)?;
    let params = TaucLorentzParams::new(band_gap, strength, resonance, width).map_err(js)?;
    let surface = SurfaceModel::TaucLorentz(params)
        .prepare(&TableOptions::default())
        .map_err(js)?;
    let est = c3_lifshitz_prepared(&AtomModel::from(atom), &surface, 1e-8).map_err(js)?;
    let g0 = surface.static_response();
    let one = c3_one_oscillator(alpha0_nm3, g0, ea_ev, es_ev).map_err(js)?;
    let mut out = vec![est.value, est.uncertainty, g0, one];
    let n = samples.max(2);
    for i in 0..n {
        let xi = 10f64.powf(-2.0 + 5.0 * i as f64 / (n - 1) as f64);
        out.extend([xi, surface.g(xi)]);
    }
    Ok(out)
}
