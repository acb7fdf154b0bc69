//! Single-slit amplitude with the eikonal wall phase.
//!
//! The amplitude is
//!
//! ```text
//! f(θ) = 2 cos θ / √λ · ∫_0^{s0/2} cos[k sin θ (s0/2 − ζ)] exp(i φ(ζ)) dζ
//! ```
//!
//! where `ζ` is the distance from the bar edge. `φ(ζ)` diverges at the wall, so
//! the integrand oscillates without bound as `ζ → 0` while staying of unit
//! modulus. The integral is split at a cutoff `b`:
//!
//! * on `[b, s0/2]` the interval is cut into panels over which the total phase
//!   (wall phase plus the `k sin θ` term) advances by at most `panel_phase`,
//!   each integrated with a 15-point Gauss–Kronrod rule;
//! * on `(0, b]` the cosine is split into two exponentials and each piece is
//!   replaced by its integration-by-parts expansion at `b` (three terms). The
//!   boundary terms at `ζ = 0` vanish because `|φ'| → ∞` there. `b` is the
//!   largest cutoff for which the first neglected term is below the tail
//!   budget.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::grating::phase::PhaseProfile;
use crate::grating::types::{BeamState, GratingGeometry, Potential};
use crate::quadrature::gauss_kronrod15;

/// Controls for the slit-amplitude quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlitQuadrature {
    /// Target absolute error of the ζ-integral, relative to the half-opening `s0/2`.
    pub rel_tol: f64,
    /// Maximum phase advance per panel, rad.
    pub panel_phase: f64,
    /// How many times the panel phase may be halved before giving up.
    pub max_refinements: u32,
}

impl Default for SlitQuadrature {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            panel_phase: std::f64::consts::FRAC_PI_2,
            max_refinements: 4,
        }
    }
}

impl SlitQuadrature {
    pub fn with_tolerance(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(invalid(format!(
                "quadrature tolerance must lie in (0, 1) (got {})",
                self.rel_tol
            )));
        }
        if !(self.panel_phase > 0.0 && self.panel_phase <= std::f64::consts::PI) {
            return Err(invalid("panel phase must lie in (0, pi]"));
        }
        Ok(())
    }
}

/// Complex slit amplitude with its absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlitAmplitude {
    pub value: Complex64,
    pub error: f64,
    /// Number of Gauss–Kronrod panels used (diagnostic).
    pub panels: usize,
}

// Tail budget as a fraction of the overall tolerance.
const TAIL_SHARE: f64 = 1e-3;
// Largest accepted ratio of successive expansion terms at the cutoff.
const TAIL_MAX_RATIO: f64 = 0.1;
const CUTOFF_SHRINK: f64 = 0.8;

/// Slit function `f_slit(θ)` in nm^½. Even in `θ`: the computation uses `|sin θ|`.
pub fn slit_amplitude(
    theta: f64,
    pot: &Potential,
    geom: &GratingGeometry,
    beam: &BeamState,
    quad: &SlitQuadrature,
) -> Result<SlitAmplitude> {
    if !(theta.is_finite() && theta.abs() <= std::f64::consts::FRAC_PI_2) {
        return Err(invalid(format!(
            "angle must satisfy |theta| <= pi/2 (got {theta})"
        )));
    }
    quad.validate()?;
    let lambda = beam.wavelength_nm();
    let q = beam.wavenumber() * theta.sin().abs();
    let integral = SlitIntegral {
        half: 0.5 * geom.slit_width_nm(),
        q,
        profile: PhaseProfile::new(pot, geom, beam),
    };
    let tolerance = quad.rel_tol * integral.half;
    let mut panel_phase = quad.panel_phase;
    let mut last_error = f64::INFINITY;
    for _ in 0..=quad.max_refinements {
        let (value, error, panels) = integral.evaluate(panel_phase, tolerance);
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::NonFinite(format!(
                "slit amplitude at theta = {theta}"
            )));
        }
        if error <= tolerance {
            let scale = 2.0 * theta.cos() / lambda.sqrt();
            return Ok(SlitAmplitude {
                value: value * scale,
                error: error * scale.abs(),
                panels,
            });
        }
        last_error = error;
        panel_phase *= 0.5;
    }
    Err(Error::Tolerance {
        what: "slit amplitude",
        estimate: last_error,
        tolerance,
    })
}

struct SlitIntegral {
    half: f64,
    q: f64,
    profile: PhaseProfile,
}

impl SlitIntegral {
    fn integrand(&self, zeta: f64) -> Complex64 {
        let envelope = (self.q * (self.half - zeta)).cos();
        Complex64::from_polar(envelope, self.profile.phase(zeta))
    }

    fn evaluate(&self, panel_phase: f64, tolerance: f64) -> (Complex64, f64, usize) {
        let (cutoff, tail, tail_error) = if self.profile.is_free() {
            (0.0, Complex64::new(0.0, 0.0), 0.0)
        } else {
            self.tail(TAIL_SHARE * tolerance)
        };

        let mut sum = tail;
        let mut error = tail_error;
        let mut panels = 0usize;
        let mut f = |z: f64| self.integrand(z);
        let mut z = cutoff;
        while z < self.half {
            let rate = if self.profile.is_free() {
                self.q
            } else {
                // |φ'| decreases with ζ, so the left end bounds the panel.
                self.profile.derivatives(z)[1].abs() + self.q
            };
            let mut step = if rate > 0.0 {
                panel_phase / rate
            } else {
                f64::INFINITY
            };
            if !self.profile.is_free() {
                step = step.min(z);
            }
            let mut end = z + step;
            if end >= self.half || self.half - end < 1e-12 * self.half {
                end = self.half;
            }
            let est = gauss_kronrod15(&mut f, z, end);
            sum += est.value;
            error += est.error;
            panels += 1;
            z = end;
        }
        (sum, error, panels)
    }

    /// Asymptotic value of `∫_0^b` at the largest acceptable cutoff `b`.
    fn tail(&self, budget: f64) -> (f64, Complex64, f64) {
        let mut b = self.half;
        let floor = 1e-14 * self.half;
        while b > floor {
            if b <= budget {
                // |integrand| <= 1, so the whole interval is below budget.
                return (b, Complex64::new(0.0, 0.0), b);
            }
            if let Some((value, err)) = self.tail_expansion(b) {
                if err <= budget {
                    return (b, value, err);
                }
            }
            b *= CUTOFF_SHRINK;
        }
        (b, Complex64::new(0.0, 0.0), b)
    }

    fn tail_expansion(&self, b: f64) -> Option<(Complex64, f64)> {
        let [phi, d1, d2, d3] = self.profile.derivatives(b);
        let mut value = Complex64::new(0.0, 0.0);
        let mut error = 0.0;
        for sign in [1.0, -1.0] {
            // Piece ½ exp(i ψ) with ψ = φ + sign·q (s0/2 − ζ).
            let psi = phi + sign * self.q * (self.half - b);
            let p1 = d1 - sign * self.q;
            if p1 >= 0.0 || p1.abs() < 10.0 * self.q {
                return None;
            }
            let t0 = 1.0 / p1;
            let t1 = d2 / (p1 * p1 * p1);
            let t2 = d3 / (p1 * p1 * p1 * p1) - 3.0 * d2 * d2 / (p1 * p1 * p1 * p1 * p1);
            if (t1 / t0).abs() > TAIL_MAX_RATIO || (t2 / t1).abs() > TAIL_MAX_RATIO {
                return None;
            }
            let series = Complex64::new(-t1, -t0 - t2);
            value += Complex64::from_polar(0.5, psi) * series;
            // Next-term estimate with a factor 2 margin (two pieces of weight ½).
            error += t2.abs() * (t2 / t1).abs();
        }
        Some((value, error))
    }
}
