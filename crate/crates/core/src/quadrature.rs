//! Gauss–Kronrod panels, a globally adaptive integrator, and Gauss–Hermite nodes.

use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Values a quadrature rule can accumulate: reals and complex numbers.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

// 15-point Kronrod abscissae/weights with the embedded 7-point Gauss rule
// (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Result of one quadrature: value and an (absolute) error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
}

/// Applies the 15-point Kronrod rule on `[a, b]`.
///
/// The error is `|K15 - G7|` plus a round-off floor proportional to the sum of
/// absolute contributions; for smooth integrands this overestimates the error
/// of the Kronrod value by many orders of magnitude.
pub fn gauss_kronrod15<T, F>(f: &mut F, a: f64, b: f64) -> Estimate<T>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut absolute = fc.magnitude() * WGK[7];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        let sum = f1 + f2;
        kronrod = kronrod + sum * w;
        absolute += (f1.magnitude() + f2.magnitude()) * w;
        if j % 2 == 1 {
            gauss = gauss + sum * WG[j / 2];
        }
    }
    let value = kronrod * half;
    let roundoff = 50.0 * f64::EPSILON * absolute * half.abs();
    let error = ((kronrod - gauss) * half).magnitude() + roundoff;
    Estimate { value, error }
}

/// Options for [`integrate_adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self {
            abs_tol: 0.0,
            rel_tol: 1e-10,
            max_panels: 4000,
        }
    }
}

/// Globally adaptive Gauss–Kronrod integration over `[a, b]` with optional
/// interior breakpoints.
///
/// The panel with the largest error estimate is bisected until the summed
/// error drops below `max(abs_tol, rel_tol * |I|)`.
pub fn integrate_adaptive<T, F>(
    mut f: F,
    breakpoints: &[f64],
    opts: &AdaptiveOptions,
    what: &'static str,
) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    if breakpoints.len() < 2 {
        return Err(invalid("integration needs at least two breakpoints"));
    }
    if breakpoints.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid(
            "integration breakpoints must be strictly increasing",
        ));
    }
    let mut panels: Vec<(f64, f64, Estimate<T>)> = breakpoints
        .windows(2)
        .map(|w| (w[0], w[1], gauss_kronrod15(&mut f, w[0], w[1])))
        .collect();

    loop {
        let total = panels.iter().fold(T::zero(), |acc, p| acc + p.2.value);
        let error: f64 = panels.iter().map(|p| p.2.error).sum();
        let target = opts.abs_tol.max(opts.rel_tol * total.magnitude());
        if !error.is_finite() || !total.magnitude().is_finite() {
            return Err(Error::NonFinite(format!(
                "{what}: integrand produced a non-finite value"
            )));
        }
        if error <= target {
            return Ok(Estimate {
                value: total,
                error,
            });
        }
        if panels.len() >= opts.max_panels {
            return Err(Error::Tolerance {
                what,
                estimate: error,
                tolerance: target,
            });
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .2.error.total_cmp(&b.1 .2.error))
            .expect("panel list is never empty");
        let (a, b, _) = panels.swap_remove(worst);
        let mid = 0.5 * (a + b);
        if !(mid > a && mid < b) {
            // Interval exhausted at machine resolution.
            return Err(Error::Tolerance {
                what,
                estimate: error,
                tolerance: target,
            });
        }
        panels.push((a, mid, gauss_kronrod15(&mut f, a, mid)));
        panels.push((mid, b, gauss_kronrod15(&mut f, mid, b)));
    }
}

/// Gauss–Hermite nodes and weights normalised to a standard normal variate:
/// `E[h(Z)] ≈ Σ w_i h(z_i)` with `Σ w_i = 1`.
///
/// Computed by the Golub–Welsch eigenvalue method. A single node is `(0, 1)`.
pub fn gauss_hermite_normal(n: usize) -> Result<Vec<(f64, f64)>> {
    if n == 0 {
        return Err(invalid("Gauss-Hermite rule needs at least one node"));
    }
    if n == 1 {
        return Ok(vec![(0.0, 1.0)]);
    }
    // Probabilists' Hermite recurrence: off-diagonal sqrt(k).
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = (k as f64).sqrt();
        jacobi[(k - 1, k)] = b;
        jacobi[(k, k - 1)] = b;
    }
    let eig = SymmetricEigen::new(jacobi);
    let mut nodes: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], v0 * v0)
        })
        .collect();
    nodes.sort_by(|a, b| a.0.total_cmp(&b.0));
    // Symmetrise so that mirrored nodes carry identical weights and the middle
    // node of an odd rule sits exactly at zero.
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (nodes[j].0 - nodes[i].0);
        let w = 0.5 * (nodes[i].1 + nodes[j].1);
        nodes[i] = (-x, w);
        nodes[j] = (x, w);
    }
    if n % 2 == 1 {
        nodes[n / 2].0 = 0.0;
    }
    let total: f64 = nodes.iter().map(|p| p.1).sum();
    for p in &mut nodes {
        p.1 /= total;
    }
    Ok(nodes)
}
