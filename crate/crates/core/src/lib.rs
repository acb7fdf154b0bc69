//! Matter-wave diffraction of atoms through nanostructured transmission gratings
//! under a van der Waals atom–surface potential `-C3/l^3`.
//!
//! The crate has three computational layers:
//!
//! * [`grating`] simulates slit amplitudes, diffraction-order intensities and
//!   full angular patterns from the eikonal phase picked up next to a
//!   trapezoidal grating bar.
//! * [`lifshitz`] predicts `C3` from a Tauc-Lorentz model of the grating
//!   material and a one-oscillator (or tabulated) atomic polarizability.
//! * [`inference`] fits Gaussian peaks to angular scans and extracts `C3` from
//!   relative order intensities by bounded least squares.
//!
//! [`io`] holds the config grammar, the CSV schemas and the report format used
//! by the `vdwgrat` command-line tool.
//!
//! Units throughout: lengths in nm, energies in eV, `C3` in meV·nm³,
//! velocities in m/s, angles in rad.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod error;
pub mod grating;
pub mod inference;
pub mod interp;
pub mod io;
pub mod lifshitz;
pub mod quadrature;
pub mod units;

pub use error::{Error, Result};
