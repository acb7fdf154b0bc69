//! Joint Gaussian fits of diffraction peaks on a shared flat background.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Error, Result};
use crate::grating::{AngularScan, OrderIntensities, OrderValue};

/// One fitted peak `A exp(−(θ−c)²/2σ²)` on top of the shared background.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPeak {
    pub amplitude: f64,
    pub center: f64,
    pub sigma: f64,
    pub background: f64,
    /// `A σ √(2π)`.
    pub area: f64,
    /// 1σ uncertainty of `area` from the fit covariance.
    pub area_sigma: f64,
}

/// Controls for [`fit_gaussian_peaks`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakFitOptions {
    /// Initial width of every peak in rad.
    pub width_seed: f64,
    pub max_iterations: usize,
    /// Convergence threshold on the relative parameter step.
    pub rel_change: f64,
    /// A peak must rise this many noise-floor units above the background.
    pub detection_threshold: f64,
}

impl Default for PeakFitOptions {
    fn default() -> Self {
        Self {
            width_seed: 1.0e-4,
            max_iterations: 200,
            rel_change: 1.0e-8,
            detection_threshold: 3.0,
        }
    }
}

/// Fits one Gaussian per expected center jointly with a common background by
/// damped least squares (Levenberg–Marquardt).
///
/// Residuals are weighted by `1/max(y, 1)` (counting statistics); the
/// covariance is inflated by the reduced χ² when that exceeds one.
pub fn fit_gaussian_peaks(
    scan: &AngularScan,
    expected_centers: &[f64],
    opts: &PeakFitOptions,
) -> Result<Vec<GaussianPeak>> {
    if expected_centers.is_empty() {
        return Err(invalid("no expected peak centers given"));
    }
    if !(opts.width_seed > 0.0) || opts.max_iterations == 0 {
        return Err(invalid(
            "peak width seed and iteration limit must be positive",
        ));
    }
    let x = scan.thetas();
    let y = scan.values();
    let (lo, hi) = (x[0], x[x.len() - 1]);
    for &c in expected_centers {
        if !(c >= lo && c <= hi) {
            return Err(invalid(format!(
                "expected peak at {c:e} rad lies outside the scan [{lo:e}, {hi:e}]"
            )));
        }
    }

    let background = lower_decile(y);
    let floor = noise_floor(y).max(1e-12 * y.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    let mut params = vec![background];
    for (index, &c) in expected_centers.iter().enumerate() {
        let i = nearest(x, c);
        let height = y[i] - background;
        if !(height > opts.detection_threshold * floor) {
            return Err(Error::MissingPeak { index, center: c });
        }
        params.extend([height, c, opts.width_seed]);
    }
    let per_peak = samples_per_width(x, opts.width_seed);
    if per_peak < 5.0 {
        return Err(invalid(format!(
            "scan resolves the seed width with only {per_peak:.1} samples (need 5)"
        )));
    }

    let weights: Vec<f64> = y.iter().map(|v| 1.0 / v.max(1.0)).collect();
    let fit = levenberg_marquardt(x, y, &weights, params, opts)?;
    let k = expected_centers.len();
    let m = x.len();
    let p = 1 + 3 * k;
    let dof = m.saturating_sub(p).max(1) as f64;
    let scale = (fit.chi2 / dof).max(1.0);

    let mut peaks = Vec::with_capacity(k);
    for (j, &expected) in expected_centers.iter().enumerate() {
        let (a, c, s) = (
            fit.params[1 + 3 * j],
            fit.params[2 + 3 * j],
            fit.params[3 + 3 * j],
        );
        let s = s.abs();
        if !(a > 0.0 && s > 0.0) || !a.is_finite() {
            return Err(Error::FitFailure {
                index: j,
                center: expected,
                reason: format!("fit drove the peak to amplitude {a:e}, width {s:e}"),
            });
        }
        let root = (2.0 * std::f64::consts::PI).sqrt();
        // d(area)/dA = σ√2π, d(area)/dσ = A√2π
        let (ia, is) = (1 + 3 * j, 3 + 3 * j);
        let cov = &fit.covariance;
        let var = (s * root).powi(2) * cov[(ia, ia)]
            + (a * root).powi(2) * cov[(is, is)]
            + 2.0 * s * a * root * root * cov[(ia, is)];
        peaks.push(GaussianPeak {
            amplitude: a,
            center: c,
            sigma: s,
            background: fit.params[0],
            area: a * s * root,
            area_sigma: (var.max(0.0) * scale).sqrt(),
        });
    }
    Ok(peaks)
}

/// `R_n = area_n / Σ area_m` with first-order propagation of the area
/// uncertainties.
pub fn normalize_orders(peaks: &[(i32, GaussianPeak)]) -> Result<OrderIntensities> {
    if peaks.len() < 2 {
        return Err(invalid("at least two peaks are needed to normalise"));
    }
    let total: f64 = peaks.iter().map(|(_, p)| p.area).sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(invalid("total peak area must be positive"));
    }
    let var_total: f64 = peaks.iter().map(|(_, p)| p.area_sigma * p.area_sigma).sum();
    let mut entries = BTreeMap::new();
    for (n, p) in peaks {
        let own = p.area_sigma * p.area_sigma;
        // ∂R_n/∂a_m = (δ_nm S − a_n) / S²
        let var =
            ((total - p.area).powi(2) * own + p.area * p.area * (var_total - own)) / total.powi(4);
        let value = OrderValue {
            intensity: p.area / total,
            sigma: Some(var.max(0.0).sqrt()),
        };
        if entries.insert(*n, value).is_some() {
            return Err(invalid(format!("order {n} appears twice")));
        }
    }
    OrderIntensities::normalize(entries)
}

fn lower_decile(y: &[f64]) -> f64 {
    let mut sorted = y.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted[(sorted.len() - 1) / 10].max(0.0)
}

// Robust scatter of the sample-to-sample differences (MAD scaled to σ).
fn noise_floor(y: &[f64]) -> f64 {
    if y.len() < 3 {
        return 0.0;
    }
    let mut d: Vec<f64> = y.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    d.sort_by(f64::total_cmp);
    1.4826 * d[d.len() / 2] / std::f64::consts::SQRT_2
}

fn nearest(x: &[f64], c: f64) -> usize {
    match x.binary_search_by(|v| v.total_cmp(&c)) {
        Ok(i) => i,
        Err(0) => 0,
        Err(i) if i >= x.len() => x.len() - 1,
        Err(i) => {
            if c - x[i - 1] <= x[i] - c {
                i - 1
            } else {
                i
            }
        }
    }
}

fn samples_per_width(x: &[f64], width: f64) -> f64 {
    let span = x[x.len() - 1] - x[0];
    if span <= 0.0 {
        return 0.0;
    }
    width * (x.len() - 1) as f64 / span
}

struct LmFit {
    params: Vec<f64>,
    covariance: DMatrix<f64>,
    chi2: f64,
}

fn model_and_jacobian(x: &[f64], params: &[f64], jac: Option<&mut DMatrix<f64>>) -> Vec<f64> {
    let k = (params.len() - 1) / 3;
    let mut out = vec![params[0]; x.len()];
    let mut jac = jac;
    for (i, &xi) in x.iter().enumerate() {
        if let Some(j) = jac.as_deref_mut() {
            j[(i, 0)] = 1.0;
        }
        for p in 0..k {
            let (a, c, s) = (params[1 + 3 * p], params[2 + 3 * p], params[3 + 3 * p]);
            let u = (xi - c) / s;
            let e = (-0.5 * u * u).exp();
            out[i] += a * e;
            if let Some(j) = jac.as_deref_mut() {
                j[(i, 1 + 3 * p)] = e;
                j[(i, 2 + 3 * p)] = a * e * u / s;
                j[(i, 3 + 3 * p)] = a * e * u * u / s;
            }
        }
    }
    out
}

fn weighted_chi2(y: &[f64], model: &[f64], w: &[f64]) -> f64 {
    y.iter()
        .zip(model)
        .zip(w)
        .map(|((yi, mi), wi)| wi * (yi - mi) * (yi - mi))
        .sum()
}

fn levenberg_marquardt(
    x: &[f64],
    y: &[f64],
    w: &[f64],
    mut params: Vec<f64>,
    opts: &PeakFitOptions,
) -> Result<LmFit> {
    let m = x.len();
    let p = params.len();
    let mut jac = DMatrix::<f64>::zeros(m, p);
    let mut model = model_and_jacobian(x, &params, Some(&mut jac));
    let mut chi2 = weighted_chi2(y, &model, w);
    let mut lambda = 1e-3;
    let mut converged = false;
    for _ in 0..opts.max_iterations {
        let mut jtwj = DMatrix::<f64>::zeros(p, p);
        let mut jtwr = DVector::<f64>::zeros(p);
        for i in 0..m {
            let r = y[i] - model[i];
            let row = jac.row(i);
            for a in 0..p {
                let ja = row[a] * w[i];
                jtwr[a] += ja * r;
                for b in a..p {
                    jtwj[(a, b)] += ja * row[b];
                }
            }
        }
        for a in 0..p {
            for b in 0..a {
                jtwj[(a, b)] = jtwj[(b, a)];
            }
        }
        let mut accepted = false;
        for _ in 0..30 {
            let mut damped = jtwj.clone();
            for a in 0..p {
                damped[(a, a)] += lambda * jtwj[(a, a)].max(1e-300);
            }
            let Some(step) = damped.cholesky().map(|c| c.solve(&jtwr)) else {
                lambda *= 10.0;
                continue;
            };
            let trial: Vec<f64> = params.iter().zip(step.iter()).map(|(a, d)| a + d).collect();
            let trial_model = model_and_jacobian(x, &trial, None);
            let trial_chi2 = weighted_chi2(y, &trial_model, w);
            if trial_chi2.is_finite() && trial_chi2 <= chi2 {
                let rel = step
                    .iter()
                    .zip(&params)
                    .map(|(d, a)| d.abs() / a.abs().max(1e-300))
                    .fold(0.0f64, f64::max);
                params = trial;
                model = model_and_jacobian(x, &params, Some(&mut jac));
                let improvement = chi2 - trial_chi2;
                chi2 = trial_chi2;
                lambda = (lambda * 0.3).max(1e-12);
                accepted = true;
                if rel < opts.rel_change || improvement <= 1e-15 * chi2.max(f64::MIN_POSITIVE) {
                    converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if !accepted {
            // No downhill step at any damping: already at the minimum to
            // working precision.
            converged = true;
        }
        if converged {
            break;
        }
    }
    if !converged {
        let k = (p - 1) / 3;
        let worst = (0..k)
            .max_by(|&a, &b| {
                let ca = params[3 + 3 * a].abs() / params[1 + 3 * a].abs().max(1e-300);
                let cb = params[3 + 3 * b].abs() / params[1 + 3 * b].abs().max(1e-300);
                ca.total_cmp(&cb)
            })
            .unwrap_or(0);
        return Err(Error::FitFailure {
            index: worst,
            center: params[2 + 3 * worst],
            reason: format!("no convergence in {} iterations", opts.max_iterations),
        });
    }
    let mut jtwj = DMatrix::<f64>::zeros(p, p);
    for (i, wi) in w.iter().enumerate().take(m) {
        let row = jac.row(i);
        for a in 0..p {
            for b in 0..p {
                jtwj[(a, b)] += row[a] * wi * row[b];
            }
        }
    }
    let covariance = jtwj
        .try_inverse()
        .unwrap_or_else(|| DMatrix::from_element(p, p, f64::INFINITY));
    Ok(LmFit {
        params,
        covariance,
        chi2,
    })
}
