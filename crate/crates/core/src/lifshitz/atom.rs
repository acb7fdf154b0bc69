//! Dynamic polarizability of the atom at imaginary frequency.

use std::path::Path;

use crate::error::{invalid, Error, Result};
use crate::interp::Pchip;

/// Single-oscillator atom: `α(iω) = α(0) / (1 + (ħω)²/E_a²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneOscillatorAtom {
    alpha0_nm3: f64,
    energy_ev: f64,
}

impl OneOscillatorAtom {
    pub fn new(alpha0_nm3: f64, energy_ev: f64) -> Result<Self> {
        if !(alpha0_nm3.is_finite() && alpha0_nm3 > 0.0) {
            return Err(invalid(format!(
                "static polarizability must be > 0 (got {alpha0_nm3})"
            )));
        }
        if !(energy_ev.is_finite() && energy_ev > 0.0) {
            return Err(invalid(format!(
                "oscillator energy must be > 0 (got {energy_ev})"
            )));
        }
        Ok(Self {
            alpha0_nm3,
            energy_ev,
        })
    }

    pub fn alpha0_nm3(&self) -> f64 {
        self.alpha0_nm3
    }
    pub fn energy_ev(&self) -> f64 {
        self.energy_ev
    }

    pub fn alpha(&self, energy_ev: f64) -> f64 {
        let r = energy_ev / self.energy_ev;
        self.alpha0_nm3 / (1.0 + r * r)
    }
}

/// `α(0) / (1 + (ħω)²/E_a²)` in nm³.
pub fn one_oscillator_alpha(energy_ev: f64, atom: &OneOscillatorAtom) -> f64 {
    atom.alpha(energy_ev)
}

/// Oscillator energy `E_a = 4 C6 / (3 α(0)²)` from the interatomic C6 (eV·nm⁶)
/// and the static polarizability (nm³).
pub fn oscillator_energy_from_c6(c6_ev_nm6: f64, alpha0_nm3: f64) -> Result<f64> {
    if !(c6_ev_nm6.is_finite() && c6_ev_nm6 > 0.0) || !(alpha0_nm3.is_finite() && alpha0_nm3 > 0.0)
    {
        return Err(invalid(format!(
            "C6 and alpha(0) must be > 0 (got C6 = {c6_ev_nm6}, alpha0 = {alpha0_nm3})"
        )));
    }
    Ok(4.0 * c6_ev_nm6 / (3.0 * alpha0_nm3 * alpha0_nm3))
}

/// `α(iω)` tabulated against `ħω`, starting at zero frequency.
///
/// Between the first two nodes `α` is continued quadratically in `ω` (it is an
/// even function of `ω`); from the second node on a shape-preserving cubic in
/// `ln ω` is used; past the last node `α ∝ ω⁻²`.
#[derive(Debug, Clone)]
pub struct TabulatedPolarizability {
    energies: Vec<f64>,
    alphas: Vec<f64>,
    spline: Option<Pchip>,
}

/// Interpolation rule identifier recorded in reports.
pub const TABLE_INTERPOLATION: &str = "quadratic-then-pchip-log-omega";

impl TabulatedPolarizability {
    pub fn new(energies: Vec<f64>, alphas: Vec<f64>) -> Result<Self> {
        if energies.len() < 2 || energies.len() != alphas.len() {
            return Err(invalid(
                "polarizability table needs at least two (energy, alpha) rows",
            ));
        }
        if energies[0] != 0.0 {
            return Err(invalid("polarizability table must start at zero frequency"));
        }
        if energies.windows(2).any(|w| !(w[1] > w[0])) || energies.iter().any(|e| !e.is_finite()) {
            return Err(invalid(
                "polarizability table energies must be strictly increasing",
            ));
        }
        if alphas.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
            return Err(invalid("polarizability values must be finite and >= 0"));
        }
        if alphas.windows(2).any(|w| w[1] > w[0]) {
            return Err(invalid(
                "polarizability must be non-increasing in frequency",
            ));
        }
        let spline = if energies.len() >= 3 {
            Some(Pchip::new(
                energies[1..].iter().map(|e| e.ln()).collect(),
                alphas[1..].to_vec(),
            )?)
        } else {
            None
        };
        Ok(Self {
            energies,
            alphas,
            spline,
        })
    }

    /// Parses the two-column text format: `ħω[eV] α[nm³]` per line, `#` comments.
    pub fn parse(text: &str) -> Result<Self> {
        let mut energies = Vec::new();
        let mut alphas = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split_whitespace().collect();
            if cols.len() != 2 {
                return Err(table_error(
                    line_no,
                    format!("expected 2 columns, found {}", cols.len()),
                ));
            }
            let parse = |s: &str, what: &str| -> Result<f64> {
                s.parse::<f64>()
                    .map_err(|_| table_error(line_no, format!("{what} `{s}` is not a number")))
            };
            let e = parse(cols[0], "energy")?;
            let a = parse(cols[1], "polarizability")?;
            if let Some(&last) = energies.last() {
                if !(e > last) {
                    return Err(table_error(
                        line_no,
                        format!("energy {e} does not increase"),
                    ));
                }
            }
            energies.push(e);
            alphas.push(a);
        }
        Self::new(energies, alphas)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn alpha0_nm3(&self) -> f64 {
        self.alphas[0]
    }

    pub fn rows(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.energies
            .iter()
            .copied()
            .zip(self.alphas.iter().copied())
    }

    pub fn alpha(&self, energy_ev: f64) -> f64 {
        let e = energy_ev.abs();
        let n = self.energies.len();
        let e1 = self.energies[1];
        let last = self.energies[n - 1];
        if e <= e1 {
            let s = e / e1;
            self.alphas[0] + (self.alphas[1] - self.alphas[0]) * s * s
        } else if e >= last {
            let s = last / e;
            self.alphas[n - 1] * s * s
        } else {
            // e1 < e < last implies at least three nodes.
            self.spline
                .as_ref()
                .map_or(self.alphas[1], |p| p.eval(e.ln()))
        }
    }

    /// Energy at which `α` has dropped to half its static value (or the last
    /// node energy); used to scale the frequency integral.
    pub fn characteristic_energy(&self) -> f64 {
        let half = 0.5 * self.alphas[0];
        self.energies
            .iter()
            .zip(&self.alphas)
            .find(|(_, a)| **a <= half)
            .map(|(e, _)| *e)
            .filter(|e| *e > 0.0)
            .unwrap_or(self.energies[self.energies.len() - 1])
    }
}

fn table_error(line: usize, message: String) -> Error {
    Error::Format {
        source_name: "polarizability table".into(),
        row: line,
        message,
    }
}

/// Atomic response model used by the Lifshitz integral.
#[derive(Debug, Clone)]
pub enum AtomModel {
    OneOscillator(OneOscillatorAtom),
    Tabulated(TabulatedPolarizability),
}

impl AtomModel {
    pub fn alpha(&self, energy_ev: f64) -> f64 {
        match self {
            AtomModel::OneOscillator(a) => a.alpha(energy_ev),
            AtomModel::Tabulated(t) => t.alpha(energy_ev),
        }
    }

    pub fn reference_energy(&self) -> f64 {
        match self {
            AtomModel::OneOscillator(a) => a.energy_ev(),
            AtomModel::Tabulated(t) => t.characteristic_energy(),
        }
    }

    /// Multiplies the polarizability by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(invalid("scale factor must be > 0"));
        }
        Ok(match self {
            AtomModel::OneOscillator(a) => AtomModel::OneOscillator(OneOscillatorAtom::new(
                a.alpha0_nm3 * factor,
                a.energy_ev,
            )?),
            AtomModel::Tabulated(t) => AtomModel::Tabulated(TabulatedPolarizability::new(
                t.energies.clone(),
                t.alphas.iter().map(|a| a * factor).collect(),
            )?),
        })
    }
}

impl From<OneOscillatorAtom> for AtomModel {
    fn from(a: OneOscillatorAtom) -> Self {
        AtomModel::OneOscillator(a)
    }
}

impl From<TabulatedPolarizability> for AtomModel {
    fn from(t: TabulatedPolarizability) -> Self {
        AtomModel::Tabulated(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_oscillator_values() {
        let he = OneOscillatorAtom::new(0.0468, 1.18).unwrap();
        assert_eq!(one_oscillator_alpha(0.0, &he), 0.0468);
        assert!((one_oscillator_alpha(1.18, &he) - 0.0234).abs() < 1e-17);
        assert!((one_oscillator_alpha(2.36, &he) - 0.00936).abs() < 1e-15);
        assert!(OneOscillatorAtom::new(0.0, 1.0).is_err());
    }

    #[test]
    fn energy_from_c6() {
        let e = oscillator_energy_from_c6(1.956e-3, 0.0468).unwrap();
        assert!((e - 1.19).abs() < 0.005, "{e}");
        assert!(
            (oscillator_energy_from_c6(2.0 * 1.956e-3, 0.0468).unwrap() - 2.0 * e).abs() < 1e-14
        );
        assert!(
            (oscillator_energy_from_c6(1.956e-3, 2.0 * 0.0468).unwrap() - e / 4.0).abs() < 1e-15
        );
        assert!(oscillator_energy_from_c6(0.0, 1.0).is_err());
        assert!(oscillator_energy_from_c6(1.0, -1.0).is_err());
    }

    #[test]
    fn parse_table_with_comments() {
        let t = TabulatedPolarizability::parse("# He*\n0 0.0468\n0.5 0.04 # mid\n\n2.0 0.01\n")
            .unwrap();
        assert_eq!(t.alpha(0.0), 0.0468);
        assert_eq!(t.alpha(2.0), 0.01);
        assert!((t.alpha(4.0) - 0.0025).abs() < 1e-17);
        assert!(t.alpha(1.0) < 0.04 && t.alpha(1.0) > 0.01);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let e = TabulatedPolarizability::parse("0 1\n0.5 x\n").unwrap_err();
        assert!(matches!(e, Error::Format { row: 2, .. }), "{e}");
        let e = TabulatedPolarizability::parse("0 1\n1 0.5\n0.5 0.2\n").unwrap_err();
        assert!(matches!(e, Error::Format { row: 3, .. }), "{e}");
        let e = TabulatedPolarizability::parse("0 1 2\n").unwrap_err();
        assert!(matches!(e, Error::Format { row: 1, .. }), "{e}");
        assert!(TabulatedPolarizability::parse("0.1 1\n1 0.5\n").is_err());
        assert!(TabulatedPolarizability::parse("0 1\n1 2\n").is_err());
    }
}
