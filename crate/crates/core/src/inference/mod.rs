//! Peak extraction, `C3` fitting and seeded synthetic data.

mod fit;
mod peaks;
mod synth;

pub use fit::{fit_c3, weighted_mean, FitOptions, FitResult, OrderResidual};
pub use peaks::{fit_gaussian_peaks, normalize_orders, GaussianPeak, PeakFitOptions};
pub use synth::{synthesize_orders, synthesize_scan, Noise, RNG_ALGORITHM};
