//! Least-squares fit of `C3` to observed relative intensities.

use crate::error::{invalid, Error, Result};
use crate::grating::{
    order_intensities_for, velocity_averaged_intensities_for, BeamState, GratingGeometry,
    OrderIntensities, Potential, PredictedOrders, SlitQuadrature,
};

/// Controls for [`fit_c3`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Points of the coarse scan of χ² used to bracket the minimum.
    pub grid_points: usize,
    /// Absolute tolerance on `C3` in meV·nm³.
    pub xtol: f64,
    pub quad: SlitQuadrature,
    /// Gauss–Hermite nodes for velocity averaging; `None` fits the monochromatic model.
    pub velocity_nodes: Option<usize>,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            grid_points: 41,
            xtol: 1.0e-4,
            quad: SlitQuadrature::default(),
            velocity_nodes: None,
        }
    }
}

/// Observed and best-fit model intensity of one order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderResidual {
    pub order: i32,
    pub observed: f64,
    pub model: f64,
    pub sigma: Option<f64>,
    /// `observed − model`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub c3_hat: f64,
    /// Half-width of the Δχ² = 1 interval (after χ²/dof rescaling when the
    /// data carry no uncertainties).
    pub uncertainty: f64,
    pub chi2: f64,
    pub dof: usize,
    /// True when `w_n = 1/σ_n²` was used.
    pub weighted: bool,
    pub residuals: Vec<OrderResidual>,
    /// Iterations of the scalar minimiser after bracketing.
    pub iterations: usize,
    /// Model evaluations in total.
    pub evaluations: usize,
}

struct Objective<'a> {
    orders: Vec<i32>,
    observed: Vec<f64>,
    weights: Vec<f64>,
    geom: &'a GratingGeometry,
    beam: &'a BeamState,
    opts: &'a FitOptions,
    evaluations: usize,
}

impl Objective<'_> {
    fn model(&mut self, c3: f64) -> Result<PredictedOrders> {
        self.evaluations += 1;
        let pot = Potential::new(c3)?;
        match self.opts.velocity_nodes {
            Some(nodes) if self.beam.velocity_spread() > 0.0 => velocity_averaged_intensities_for(
                &self.orders,
                &pot,
                self.geom,
                self.beam,
                nodes,
                &self.opts.quad,
            ),
            _ => order_intensities_for(&self.orders, &pot, self.geom, self.beam, &self.opts.quad),
        }
    }

    fn chi2(&mut self, c3: f64) -> Result<f64> {
        let m = self.model(c3)?;
        let value: f64 = self
            .orders
            .iter()
            .zip(&self.observed)
            .zip(&self.weights)
            .map(|((&n, o), w)| w * (o - m.intensity(n)).powi(2))
            .sum();
        if !value.is_finite() {
            return Err(Error::NonFinite(format!("chi-square at C3 = {c3}")));
        }
        Ok(value)
    }
}

/// Minimises `χ²(C3) = Σ_n w_n (R_n^obs − R_n^model)²` over `bounds`.
///
/// The observed values are renormalised and the model is normalised over the
/// same set of orders. χ² is scanned on a grid first; more than one separated
/// local minimum is reported as [`Error::Multimodal`], a minimum on a bound as
/// [`Error::BoundarySolution`]. The bracket is then polished by Brent's method.
pub fn fit_c3(
    observed: &OrderIntensities,
    geom: &GratingGeometry,
    beam: &BeamState,
    bounds: (f64, f64),
    opts: &FitOptions,
) -> Result<FitResult> {
    let (lo, hi) = bounds;
    if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
        return Err(invalid(format!(
            "C3 bounds must satisfy 0 <= lo < hi (got [{lo}, {hi}])"
        )));
    }
    if observed.len() < 3 {
        return Err(invalid(format!(
            "fitting needs at least 3 distinct orders (got {})",
            observed.len()
        )));
    }
    if opts.grid_points < 3 || !(opts.xtol > 0.0) {
        return Err(invalid(
            "fit needs >= 3 grid points and a positive tolerance",
        ));
    }
    let total = observed.total();
    if !(total > 0.0) {
        return Err(invalid("observed intensities sum to zero"));
    }
    let weighted = observed.has_sigmas();
    let orders = observed.orders();
    let observed_r: Vec<f64> = orders
        .iter()
        .map(|&n| observed.intensity(n).unwrap_or(0.0) / total)
        .collect();
    let weights: Vec<f64> = orders
        .iter()
        .map(|&n| match observed.get(n).and_then(|v| v.sigma) {
            Some(s) if weighted => (total / s).powi(2),
            _ => 1.0,
        })
        .collect();
    let mut obj = Objective {
        orders: orders.clone(),
        observed: observed_r.clone(),
        weights,
        geom,
        beam,
        opts,
        evaluations: 0,
    };

    let g = opts.grid_points;
    let grid: Vec<f64> = (0..g)
        .map(|i| lo + (hi - lo) * i as f64 / (g - 1) as f64)
        .collect();
    let values = grid
        .iter()
        .map(|&c| obj.chi2(c))
        .collect::<Result<Vec<f64>>>()?;
    let best = bracket_minimum(&grid, &values)?;

    let a = grid[best.saturating_sub(1)];
    let b = grid[(best + 1).min(g - 1)];
    let (c3_hat, chi2, iterations) = brent_minimize(|c| obj.chi2(c), a, b, opts.xtol)?;
    let edge = 2.0 * opts.xtol;
    if c3_hat - lo < edge || hi - c3_hat < edge {
        let bound = if c3_hat - lo < edge { lo } else { hi };
        return Err(Error::BoundarySolution { bound });
    }

    let dof = orders.len().saturating_sub(1).max(1);
    let final_model = obj.model(c3_hat)?;
    let noise: f64 = orders
        .iter()
        .zip(&obj.weights)
        .map(|(&n, w)| w * final_model.error(n).powi(2))
        .sum();
    let delta = if weighted {
        1.0
    } else {
        (chi2 / dof as f64).max(noise).max(f64::MIN_POSITIVE)
    };
    let up = interval_edge(&mut obj, c3_hat, chi2, delta, hi, opts.xtol)?;
    let down = interval_edge(&mut obj, c3_hat, chi2, delta, lo, opts.xtol)?;
    let uncertainty = (0.5 * (up + down)).max(opts.xtol);

    let residuals = orders
        .iter()
        .zip(&observed_r)
        .map(|(&n, &o)| {
            let m = final_model.intensity(n);
            OrderResidual {
                order: n,
                observed: o,
                model: m,
                sigma: observed.get(n).and_then(|v| v.sigma).map(|s| s / total),
                residual: o - m,
            }
        })
        .collect();
    Ok(FitResult {
        c3_hat,
        uncertainty,
        chi2,
        dof,
        weighted,
        residuals,
        iterations,
        evaluations: obj.evaluations,
    })
}

/// Inverse-variance weighted mean of independent fits, with its 1σ error.
pub fn weighted_mean(fits: &[FitResult]) -> Result<(f64, f64)> {
    if fits.is_empty() {
        return Err(invalid("no fits to combine"));
    }
    let (mut sw, mut swx) = (0.0, 0.0);
    for f in fits {
        let w = 1.0 / (f.uncertainty * f.uncertainty);
        sw += w;
        swx += w * f.c3_hat;
    }
    Ok((swx / sw, sw.sqrt().recip()))
}

// Index of the global grid minimum, after checking that no other separated
// local minimum exists.
fn bracket_minimum(grid: &[f64], values: &[f64]) -> Result<usize> {
    let g = values.len();
    let best = (0..g)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .expect("grid is non-empty");
    let vmax = values.iter().copied().fold(f64::MIN, f64::max);
    let range = vmax - values[best];
    let mut minima = vec![grid[best]];
    for i in 0..g {
        if i == best {
            continue;
        }
        let left = i == 0 || values[i] < values[i - 1];
        let right = i == g - 1 || values[i] < values[i + 1];
        if !(left && right) {
            continue;
        }
        // Height of the barrier separating this minimum from the global one.
        let (s, e) = if i < best { (i, best) } else { (best, i) };
        let barrier = values[s..=e].iter().copied().fold(f64::MIN, f64::max) - values[i];
        if barrier > 1e-3 * range {
            minima.push(grid[i]);
        }
    }
    if minima.len() > 1 {
        minima.sort_by(f64::total_cmp);
        return Err(Error::Multimodal { minima });
    }
    Ok(best)
}

// Distance from `x0` towards `limit` at which χ² has risen by `delta`; the
// distance to `limit` if it never does.
fn interval_edge(
    obj: &mut Objective,
    x0: f64,
    f0: f64,
    delta: f64,
    limit: f64,
    xtol: f64,
) -> Result<f64> {
    let dir = (limit - x0).signum();
    let reach = (limit - x0).abs();
    if reach == 0.0 {
        return Ok(0.0);
    }
    let target = f0 + delta;
    let mut inner = 0.0;
    let mut step = (0.1 * xtol).min(reach);
    loop {
        let v = obj.chi2(x0 + dir * step)?;
        if v >= target {
            break;
        }
        inner = step;
        if step >= reach {
            return Ok(reach);
        }
        step = (step * 2.0).min(reach);
    }
    let mut outer = step;
    for _ in 0..60 {
        if outer - inner <= 1e-3 * outer {
            break;
        }
        let mid = 0.5 * (inner + outer);
        if obj.chi2(x0 + dir * mid)? >= target {
            outer = mid;
        } else {
            inner = mid;
        }
    }
    Ok(0.5 * (inner + outer))
}

/// Brent's parabolic/golden-section minimisation on `[a, b]`.
/// Returns `(x, f(x), iterations)`.
fn brent_minimize<F>(mut f: F, mut a: f64, mut b: f64, xtol: f64) -> Result<(f64, f64, usize)>
where
    F: FnMut(f64) -> Result<f64>,
{
    const GOLD: f64 = 0.381_966_011_250_105_1;
    let mut x = a + GOLD * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = f(x)?;
    let (mut fw, mut fv) = (fx, fx);
    let (mut d, mut e) = (0.0f64, 0.0f64);
    for iter in 1..=200 {
        let m = 0.5 * (a + b);
        let tol = 0.5 * xtol;
        if (x - m).abs() <= 2.0 * tol - 0.5 * (b - a) {
            return Ok((x, fx, iter - 1));
        }
        let mut golden = true;
        if e.abs() > tol {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            if p.abs() < (0.5 * q * e).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < 2.0 * tol || b - u < 2.0 * tol {
                    d = if x < m { tol } else { -tol };
                }
                golden = false;
            }
        }
        if golden {
            e = if x < m { b - x } else { a - x };
            d = GOLD * e;
        }
        let u = if d.abs() >= tol {
            x + d
        } else {
            x + tol * d.signum()
        };
        let fu = f(u)?;
        if fu <= fx {
            if u < x {
                b = x;
            } else {
                a = x;
            }
            (v, fv) = (w, fw);
            (w, fw) = (x, fx);
            (x, fx) = (u, fu);
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                (v, fv) = (w, fw);
                (w, fw) = (u, fu);
            } else if fu <= fv || v == x || v == w {
                (v, fv) = (u, fu);
            }
        }
    }
    Err(Error::Tolerance {
        what: "C3 minimisation",
        estimate: b - a,
        tolerance: xtol,
    })
}
