//! Surface response and the non-retarded Lifshitz coefficient.

use crate::error::{invalid, Result};
use crate::lifshitz::atom::AtomModel;
use crate::lifshitz::dielectric::{
    eps_imaginary_axis, ImaginaryAxisTable, KramersKronig, TableOptions, TaucLorentzParams,
};
use crate::quadrature::{integrate_adaptive, AdaptiveOptions};
use crate::units::MEV_PER_EV;

/// Electronic response of the grating material.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurfaceModel {
    /// Full route: Tauc-Lorentz `ε₂` → Kramers-Kronig → `g = (ε−1)/(ε+1)`.
    TaucLorentz(TaucLorentzParams),
    /// Single oscillator `g0 / (1 + (ħω)²/E_S²)`.
    Oscillator { g0: f64, energy_ev: f64 },
}

impl SurfaceModel {
    pub fn oscillator(g0: f64, energy_ev: f64) -> Result<Self> {
        if !(g0 > 0.0 && g0 < 1.0) {
            return Err(invalid(format!("g0 must lie in (0, 1) (got {g0})")));
        }
        if !(energy_ev.is_finite() && energy_ev > 0.0) {
            return Err(invalid(format!("E_S must be > 0 (got {energy_ev})")));
        }
        Ok(SurfaceModel::Oscillator { g0, energy_ev })
    }

    /// Precomputes what the frequency integral needs (the `ε(iξ)` table on the
    /// Tauc-Lorentz route).
    pub fn prepare(&self, table: &TableOptions) -> Result<PreparedSurface> {
        Ok(match self {
            SurfaceModel::TaucLorentz(p) => {
                PreparedSurface::Table(ImaginaryAxisTable::build(p, table)?)
            }
            SurfaceModel::Oscillator { g0, energy_ev } => PreparedSurface::Oscillator {
                g0: *g0,
                energy_ev: *energy_ev,
            },
        })
    }
}

/// A surface model ready for repeated evaluation.
#[derive(Debug, Clone)]
pub enum PreparedSurface {
    Table(ImaginaryAxisTable),
    Oscillator { g0: f64, energy_ev: f64 },
}

impl PreparedSurface {
    pub fn g(&self, energy_ev: f64) -> f64 {
        match self {
            PreparedSurface::Table(t) => t.surface_response(energy_ev),
            PreparedSurface::Oscillator { g0, energy_ev: es } => {
                let r = energy_ev / es;
                g0 / (1.0 + r * r)
            }
        }
    }

    /// Relative error bound on `g` from tabulation (zero for the closed form).
    pub fn relative_error(&self) -> f64 {
        match self {
            PreparedSurface::Table(t) => t.interpolation_error() + t.quadrature_error(),
            PreparedSurface::Oscillator { .. } => 0.0,
        }
    }

    pub fn static_response(&self) -> f64 {
        self.g(0.0)
    }
}

/// `g(iω)` evaluated directly (no table) on either route.
pub fn surface_response(energy_ev: f64, surface: &SurfaceModel, kk: &KramersKronig) -> Result<f64> {
    if !(energy_ev.is_finite() && energy_ev >= 0.0) {
        return Err(invalid(format!("frequency must be >= 0 (got {energy_ev})")));
    }
    match surface {
        SurfaceModel::TaucLorentz(p) => {
            let e = eps_imaginary_axis(energy_ev, p, kk)?.value;
            Ok((e - 1.0) / (e + 1.0))
        }
        SurfaceModel::Oscillator { g0, energy_ev: es } => {
            let r = energy_ev / es;
            Ok(g0 / (1.0 + r * r))
        }
    }
}

/// Static surface response `g(iω → 0)` from the Tauc-Lorentz Kramers-Kronig route.
pub fn static_response_g0(p: &TaucLorentzParams, kk: &KramersKronig) -> Result<f64> {
    surface_response(0.0, &SurfaceModel::TaucLorentz(*p), kk)
}

/// Options for [`c3_lifshitz`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LifshitzOptions {
    pub rel_tol: f64,
    pub table: TableOptions,
}

impl Default for LifshitzOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            table: TableOptions::default(),
        }
    }
}

/// `C3` with its numerical uncertainty, both in meV·nm³.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct C3Estimate {
    pub value: f64,
    pub uncertainty: f64,
    pub quadrature_error: f64,
    pub interpolation_error: f64,
}

/// `C3 = (ħ/4π) ∫_0^∞ dω α(iω) g(iω)`, written in `E = ħω` as
/// `(1/4π) ∫_0^∞ α(E) g(E) dE`.
pub fn c3_lifshitz(
    atom: &AtomModel,
    surface: &SurfaceModel,
    opts: &LifshitzOptions,
) -> Result<C3Estimate> {
    let prepared = surface.prepare(&opts.table)?;
    c3_lifshitz_prepared(atom, &prepared, opts.rel_tol)
}

/// As [`c3_lifshitz`] with an already prepared surface (reuse the table across atoms).
///
/// The half-line is mapped onto `[0, π/2)` by `E = E_ref tan x` with `E_ref`
/// the atom's characteristic energy.
pub fn c3_lifshitz_prepared(
    atom: &AtomModel,
    surface: &PreparedSurface,
    rel_tol: f64,
) -> Result<C3Estimate> {
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(invalid("Lifshitz tolerance must lie in (0, 1)"));
    }
    let e_ref = atom.reference_energy();
    let integrand = |x: f64| {
        let t = x.tan();
        let e = e_ref * t;
        atom.alpha(e) * surface.g(e) * e_ref * (1.0 + t * t)
    };
    let breaks: Vec<f64> = (0..=8)
        .map(|i| std::f64::consts::FRAC_PI_2 * i as f64 / 8.0)
        .collect();
    let opts = AdaptiveOptions {
        abs_tol: 1e-300,
        rel_tol,
        max_panels: 2000,
    };
    let est = integrate_adaptive(integrand, &breaks, &opts, "Lifshitz integral")?;
    let scale = MEV_PER_EV / (4.0 * std::f64::consts::PI);
    let value = est.value * scale;
    let quadrature_error = est.error * scale;
    let interpolation_error = value.abs() * surface.relative_error();
    Ok(C3Estimate {
        value,
        uncertainty: quadrature_error + interpolation_error,
        quadrature_error,
        interpolation_error,
    })
}

/// Closed form `α(0) g0 E_a E_S / (8 (E_a + E_S))` in meV·nm³ for two
/// single oscillators. An infinite energy gives the corresponding limit.
pub fn c3_one_oscillator(alpha0_nm3: f64, g0: f64, ea_ev: f64, es_ev: f64) -> Result<f64> {
    for (name, v) in [("alpha0", alpha0_nm3), ("g0", g0)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(invalid(format!("{name} must be > 0 (got {v})")));
        }
    }
    if !(ea_ev > 0.0 && es_ev > 0.0) {
        return Err(invalid(format!(
            "oscillator energies must be > 0 (got {ea_ev}, {es_ev})"
        )));
    }
    let reduced = match (ea_ev.is_infinite(), es_ev.is_infinite()) {
        (true, true) => return Err(invalid("at least one oscillator energy must be finite")),
        (true, false) => es_ev,
        (false, true) => ea_ev,
        (false, false) => ea_ev * es_ev / (ea_ev + es_ev),
    };
    Ok(alpha0_nm3 * g0 * reduced / 8.0 * MEV_PER_EV)
}
