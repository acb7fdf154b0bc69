//! Tauc-Lorentz absorption and the dielectric function on the imaginary
//! frequency axis.

use crate::error::{invalid, Result};
use crate::interp::Pchip;
use crate::quadrature::{integrate_adaptive, AdaptiveOptions, Estimate};

/// Tauc-Lorentz parameters, all as energies `ħ·(…)` in eV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaucLorentzParams {
    band_gap_ev: f64,
    strength_ev: f64,
    resonance_ev: f64,
    width_ev: f64,
}

impl TaucLorentzParams {
    pub fn new(
        band_gap_ev: f64,
        strength_ev: f64,
        resonance_ev: f64,
        width_ev: f64,
    ) -> Result<Self> {
        for (name, v) in [
            ("band gap", band_gap_ev),
            ("strength", strength_ev),
            ("resonance", resonance_ev),
            ("width", width_ev),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(format!(
                    "Tauc-Lorentz {name} must be > 0 (got {v})"
                )));
            }
        }
        Ok(Self {
            band_gap_ev,
            strength_ev,
            resonance_ev,
            width_ev,
        })
    }

    pub fn band_gap_ev(&self) -> f64 {
        self.band_gap_ev
    }
    pub fn strength_ev(&self) -> f64 {
        self.strength_ev
    }
    pub fn resonance_ev(&self) -> f64 {
        self.resonance_ev
    }
    pub fn width_ev(&self) -> f64 {
        self.width_ev
    }

    fn eps2_unchecked(&self, e: f64) -> f64 {
        if e <= self.band_gap_ev {
            return 0.0;
        }
        let de = e - self.band_gap_ev;
        let e0 = self.resonance_ev;
        let c = self.width_ev;
        let lorentz = (e * e - e0 * e0).powi(2) + c * c * e * e;
        self.strength_ev * e0 * c * de * de / (lorentz * e)
    }
}

/// Imaginary part `ε₂(ħω)` of the Tauc-Lorentz dielectric function.
pub fn tauc_lorentz_eps2(energy_ev: f64, p: &TaucLorentzParams) -> Result<f64> {
    if !(energy_ev.is_finite() && energy_ev > 0.0) {
        return Err(invalid(format!(
            "photon energy must be > 0 (got {energy_ev})"
        )));
    }
    Ok(p.eps2_unchecked(energy_ev))
}

/// Controls for the Kramers-Kronig integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KramersKronig {
    pub rel_tol: f64,
    /// Upper end of the numerical integration; beyond it the `1/E³` tail of
    /// `ε₂` is integrated analytically.
    pub e_max_ev: f64,
}

impl Default for KramersKronig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            e_max_ev: 1.0e4,
        }
    }
}

/// `ε(iξ) = 1 + (2/π) ∫_0^∞ E ε₂(E) / (E² + ξ²) dE` for `ξ = ħω ≥ 0` in eV,
/// with an absolute error estimate.
pub fn eps_imaginary_axis(
    xi_ev: f64,
    p: &TaucLorentzParams,
    kk: &KramersKronig,
) -> Result<Estimate<f64>> {
    if !(xi_ev.is_finite() && xi_ev >= 0.0) {
        return Err(invalid(format!(
            "imaginary frequency must be >= 0 (got {xi_ev})"
        )));
    }
    let gap = p.band_gap_ev;
    let top = kk.e_max_ev.max(10.0 * gap);
    let breaks = breakpoints(p, top);
    let xi2 = xi_ev * xi_ev;
    let opts = AdaptiveOptions {
        abs_tol: 0.0,
        rel_tol: kk.rel_tol,
        max_panels: 4000,
    };
    let body = integrate_adaptive(
        |e: f64| e * p.eps2_unchecked(e) / (e * e + xi2),
        &breaks,
        &opts,
        "Kramers-Kronig integral",
    )?;
    let (tail, tail_err) = analytic_tail(p, top, xi_ev);
    let scale = 2.0 / std::f64::consts::PI;
    Ok(Estimate {
        value: 1.0 + scale * (body.value + tail),
        error: scale * (body.error + tail_err),
    })
}

// Beyond `top`, E ε₂(E) = A E0 Γ Σ_j c_j E^(−2−j) with u = 1/E expansion of
// (1 − E_g u)² / (1 + P u² + E0⁴ u⁴), P = Γ² − 2E0². Four terms are kept; the
// fifth bounds the error.
fn analytic_tail(p: &TaucLorentzParams, top: f64, xi: f64) -> (f64, f64) {
    let g = p.band_gap_ev;
    let pp = p.width_ev * p.width_ev - 2.0 * p.resonance_ev * p.resonance_ev;
    let q = p.resonance_ev.powi(4);
    let coeffs = [1.0, -2.0 * g, g * g - pp, 2.0 * g * pp];
    let next = -g * g * pp + pp * pp - q;
    let amplitude = p.strength_ev * p.resonance_ev * p.width_ev;
    let value: f64 = coeffs
        .iter()
        .enumerate()
        .map(|(j, c)| c * tail_kernel(2 + j as u32, top, xi))
        .sum();
    let error = (next * tail_kernel(6, top, xi)).abs() * 2.0;
    (amplitude * value, amplitude * error)
}

// ∫_M^∞ E^(−k) / (E² + ξ²) dE
fn tail_kernel(k: u32, m: f64, xi: f64) -> f64 {
    let x = xi / m;
    if x < 0.3 {
        let x2 = x * x;
        let mut term = 1.0;
        let mut sum = 0.0;
        for j in 0..24 {
            sum += term / (k + 1 + 2 * j) as f64;
            term *= -x2;
        }
        sum / m.powi(k as i32 + 1)
    } else {
        let xi2 = xi * xi;
        let mut lower = [x.atan() / xi, (1.0 + x * x).ln() / (2.0 * xi2)];
        for j in 2..=k {
            let next = (m.powi(1 - j as i32) / (j - 1) as f64 - lower[(j % 2) as usize]) / xi2;
            lower[(j % 2) as usize] = next;
        }
        lower[(k % 2) as usize]
    }
}

fn breakpoints(p: &TaucLorentzParams, top: f64) -> Vec<f64> {
    let gap = p.band_gap_ev;
    let mut pts: Vec<f64> = (0..=24)
        .map(|i| gap * (top / gap).powf(i as f64 / 24.0))
        .collect();
    for extra in [
        p.resonance_ev,
        p.resonance_ev - p.width_ev,
        p.resonance_ev + p.width_ev,
    ] {
        if extra > gap && extra < top {
            pts.push(extra);
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
    *pts.last_mut().expect("non-empty") = top;
    pts
}

// (a, b) with y = a/ξ² + b/ξ³ through two points.
fn asymptote((xi1, y1): (f64, f64), (xi2, y2): (f64, f64)) -> (f64, f64) {
    let (u1, u2) = (y1 * xi1 * xi1, y2 * xi2 * xi2);
    let b = (u1 - u2) / (1.0 / xi1 - 1.0 / xi2);
    (u2 - b / xi2, b)
}

/// Options for building an [`ImaginaryAxisTable`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableOptions {
    pub nodes: usize,
    pub xi_min_ev: f64,
    pub xi_max_ev: f64,
    pub kk: KramersKronig,
}

impl Default for TableOptions {
    fn default() -> Self {
        Self {
            nodes: 512,
            xi_min_ev: 1.0e-3,
            xi_max_ev: 1.0e4,
            kk: KramersKronig::default(),
        }
    }
}

/// `ε(iξ)` tabulated once on a logarithmic grid and interpolated with a
/// shape-preserving cubic in `(ln ξ, ln(ε − 1))`.
///
/// Below the first node `ε` is continued quadratically from `ε(0)`, above the
/// last node as `ε − 1 = a/ξ² + b/ξ³` matched to the last two nodes.
#[derive(Debug, Clone)]
pub struct ImaginaryAxisTable {
    params: TaucLorentzParams,
    eps_static: f64,
    eps_first: f64,
    tail: (f64, f64),
    xi_min: f64,
    xi_max: f64,
    spline: Pchip,
    grid: Vec<(f64, f64)>,
    quadrature_error: f64,
    interpolation_error: f64,
}

impl ImaginaryAxisTable {
    pub fn build(params: &TaucLorentzParams, opts: &TableOptions) -> Result<Self> {
        if opts.nodes < 4 {
            return Err(invalid("imaginary-axis table needs at least 4 nodes"));
        }
        if !(opts.xi_min_ev > 0.0 && opts.xi_max_ev > opts.xi_min_ev) {
            return Err(invalid(
                "imaginary-axis table range must satisfy 0 < min < max",
            ));
        }
        let n = opts.nodes;
        let (lo, hi) = (opts.xi_min_ev.ln(), opts.xi_max_ev.ln());
        let logs: Vec<f64> = (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect();
        let mut quadrature_error: f64 = 0.0;
        let mut eps = Vec::with_capacity(n);
        for &l in &logs {
            let e = eps_imaginary_axis(l.exp(), params, &opts.kk)?;
            quadrature_error = quadrature_error.max(e.error / (e.value - 1.0));
            eps.push(e.value);
        }
        let stat = eps_imaginary_axis(0.0, params, &opts.kk)?;
        quadrature_error = quadrature_error.max(stat.error / (stat.value - 1.0));
        let ln_excess: Vec<f64> = eps.iter().map(|e| (e - 1.0).ln()).collect();
        let spline = Pchip::new(logs.clone(), ln_excess)?;
        let mut table = Self {
            params: *params,
            eps_static: stat.value,
            eps_first: eps[0],
            tail: asymptote(
                (logs[n - 2].exp(), eps[n - 2] - 1.0),
                (logs[n - 1].exp(), eps[n - 1] - 1.0),
            ),
            xi_min: opts.xi_min_ev,
            xi_max: opts.xi_max_ev,
            spline,
            grid: logs
                .iter()
                .map(|l| l.exp())
                .zip(eps.iter().copied())
                .collect(),
            quadrature_error,
            interpolation_error: 0.0,
        };
        table.interpolation_error = table.probe_interpolation(&logs, &opts.kk)?;
        Ok(table)
    }

    // Largest relative deviation of g(iξ) from a direct evaluation, probed at
    // interval midpoints and inside the quadratic low-frequency continuation.
    fn probe_interpolation(&self, logs: &[f64], kk: &KramersKronig) -> Result<f64> {
        let mut probes: Vec<f64> = logs
            .windows(2)
            .step_by(8)
            .map(|w| (0.5 * (w[0] + w[1])).exp())
            .collect();
        probes.push(0.5 * self.xi_min);
        let mut worst: f64 = 0.0;
        for xi in probes {
            let direct = eps_imaginary_axis(xi, &self.params, kk)?.value;
            let g_direct = (direct - 1.0) / (direct + 1.0);
            let g_table = self.surface_response(xi);
            worst = worst.max(((g_table - g_direct) / g_direct).abs());
        }
        Ok(worst)
    }

    pub fn params(&self) -> &TaucLorentzParams {
        &self.params
    }

    pub fn eps(&self, xi_ev: f64) -> f64 {
        let xi = xi_ev.abs();
        if xi == 0.0 {
            self.eps_static
        } else if xi < self.xi_min {
            let s = xi / self.xi_min;
            self.eps_static + (self.eps_first - self.eps_static) * s * s
        } else if xi > self.xi_max {
            let x = 1.0 / xi;
            1.0 + x * x * (self.tail.0 + self.tail.1 * x)
        } else {
            1.0 + self.spline.eval(xi.ln()).exp()
        }
    }

    /// `g(iξ) = (ε − 1)/(ε + 1)` from the table.
    pub fn surface_response(&self, xi_ev: f64) -> f64 {
        let e = self.eps(xi_ev);
        (e - 1.0) / (e + 1.0)
    }

    pub fn static_eps(&self) -> f64 {
        self.eps_static
    }

    /// Tabulated `(ξ, ε(iξ))` pairs.
    pub fn grid(&self) -> &[(f64, f64)] {
        &self.grid
    }

    /// Largest relative quadrature error of `ε − 1` over the nodes.
    pub fn quadrature_error(&self) -> f64 {
        self.quadrature_error
    }

    /// Largest relative interpolation error of `g` found by probing.
    pub fn interpolation_error(&self) -> f64 {
        self.interpolation_error
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sinx() -> TaucLorentzParams {
        TaucLorentzParams::new(2.29, 74.5, 7.17, 7.62).unwrap()
    }

    #[test]
    fn eps2_below_and_at_gap() {
        let p = sinx();
        assert_eq!(tauc_lorentz_eps2(2.0, &p).unwrap(), 0.0);
        assert_eq!(tauc_lorentz_eps2(2.29, &p).unwrap(), 0.0);
        assert!(tauc_lorentz_eps2(2.2901, &p).unwrap() > 0.0);
        assert!(tauc_lorentz_eps2(0.0, &p).is_err());
        assert!(TaucLorentzParams::new(0.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn tail_kernel_branches_agree() {
        let m = 1e4;
        for k in 2..=6u32 {
            for xi in [0.0, 10.0, 2999.0, 3001.0, 1e4, 1e5] {
                let numeric = integrate_adaptive(
                    |t: f64| {
                        // E = m / t maps [M, ∞) to (0, 1]
                        let e = m / t;
                        m / (t * t) / (e.powi(k as i32) * (e * e + xi * xi))
                    },
                    &[1e-9, 1.0],
                    &AdaptiveOptions {
                        abs_tol: 0.0,
                        rel_tol: 1e-12,
                        max_panels: 10000,
                    },
                    "tail",
                )
                .unwrap();
                let v = tail_kernel(k, m, xi);
                assert!((v - numeric.value).abs() < 1e-9 * v, "k = {k}, xi = {xi}");
            }
        }
    }

    #[test]
    fn tail_expansion_matches_direct_integral() {
        let p = sinx();
        let m = 200.0;
        for xi in [0.0, 50.0, 400.0] {
            let direct = integrate_adaptive(
                |t: f64| {
                    let e = m / t;
                    m / (t * t) * e * p.eps2_unchecked(e) / (e * e + xi * xi)
                },
                &[1e-9, 1.0],
                &AdaptiveOptions {
                    abs_tol: 0.0,
                    rel_tol: 1e-13,
                    max_panels: 10000,
                },
                "tail",
            )
            .unwrap()
            .value;
            let (v, err) = analytic_tail(&p, m, xi);
            assert!(
                (v - direct).abs() < err,
                "xi = {xi}: {} vs {err}",
                v - direct
            );
            assert!(err < 1e-6 * v);
        }
    }

    #[test]
    fn eps_is_monotone_and_tends_to_one() {
        let p = sinx();
        let kk = KramersKronig::default();
        let mut prev = f64::INFINITY;
        for xi in [0.0, 0.1, 1.0, 3.0, 10.0, 100.0, 1e3] {
            let e = eps_imaginary_axis(xi, &p, &kk).unwrap().value;
            assert!(e >= 1.0 && e < prev);
            prev = e;
        }
        let far = eps_imaginary_axis(1e6, &p, &kk).unwrap().value;
        assert!(far - 1.0 < 1e-8);
    }

    #[test]
    fn table_reproduces_direct_evaluation() {
        let p = sinx();
        let table = ImaginaryAxisTable::build(&p, &TableOptions::default()).unwrap();
        let kk = KramersKronig::default();
        for xi in [0.0, 5e-4, 0.0123, 0.7, 4.4, 31.0, 900.0, 2e4] {
            let direct = eps_imaginary_axis(xi, &p, &kk).unwrap().value;
            assert!(
                ((table.eps(xi) - direct) / (direct - 1.0)).abs() < 1e-6,
                "xi = {xi}: {} vs {direct}",
                table.eps(xi)
            );
        }
        assert!(table.interpolation_error() < 1e-6);
        assert!(table.quadrature_error() < 1e-9);
    }
}
