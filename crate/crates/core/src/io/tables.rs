//! CSV files: order intensities, angular scans and ε(iξ) dumps.
//!
//! Numbers are written in the shortest form that parses back to the same
//! `f64`, so every file round-trips through its loader exactly.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::grating::{AngularScan, OrderIntensities, OrderValue, NORMALIZATION_TOL};

/// Orders read from disk plus any non-fatal notices (e.g. renormalisation).
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedOrders {
    pub orders: OrderIntensities,
    pub warnings: Vec<String>,
}

fn format_err(source: &str, row: usize, message: impl Into<String>) -> Error {
    Error::Format {
        source_name: source.to_string(),
        row,
        message: message.into(),
    }
}

fn csv_err(source: &str, e: csv::Error) -> Error {
    let row = e
        .position()
        .map_or(0, |p| p.line().saturating_sub(1) as usize);
    format_err(source, row, e.to_string())
}

fn open(path: &Path) -> Result<std::fs::File> {
    std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn create(path: &Path) -> Result<std::fs::File> {
    std::fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn field_f64(source: &str, row: usize, name: &str, s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format_err(source, row, format!("{name} `{s}` is not a number")))?;
    if !v.is_finite() {
        return Err(format_err(source, row, format!("{name} must be finite")));
    }
    Ok(v)
}

/// Reads `n,intensity[,sigma]`. Data rows are numbered from 1.
///
/// Intensities not summing to 1 within 1e-12 are renormalised and a warning
/// is recorded.
pub fn read_orders<R: Read>(reader: R, source: &str) -> Result<LoadedOrders> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| csv_err(source, e))?.clone();
    let names: Vec<&str> = headers.iter().collect();
    let with_sigma = match names.as_slice() {
        ["n", "intensity"] => false,
        ["n", "intensity", "sigma"] => true,
        _ => {
            return Err(format_err(
                source,
                0,
                format!(
                    "header must be `n,intensity,sigma` or `n,intensity` (got `{}`)",
                    names.join(",")
                ),
            ))
        }
    };
    let mut raw = BTreeMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| csv_err(source, e))?;
        let n: i32 = rec[0].parse().map_err(|_| {
            format_err(
                source,
                row,
                format!("order `{}` is not an integer", &rec[0]),
            )
        })?;
        let intensity = field_f64(source, row, "intensity", &rec[1])?;
        if intensity < 0.0 {
            return Err(format_err(source, row, "intensity must be >= 0"));
        }
        let sigma = if with_sigma && !rec[2].is_empty() {
            let s = field_f64(source, row, "sigma", &rec[2])?;
            if s < 0.0 {
                return Err(format_err(source, row, "sigma must be >= 0"));
            }
            Some(s)
        } else {
            None
        };
        if raw.insert(n, OrderValue { intensity, sigma }).is_some() {
            return Err(format_err(source, row, format!("order {n} listed twice")));
        }
    }
    if raw.is_empty() {
        return Err(format_err(source, 0, "no data rows"));
    }
    let total: f64 = raw.values().map(|v| v.intensity).sum();
    let mut warnings = Vec::new();
    let orders = if (total - 1.0).abs() <= NORMALIZATION_TOL {
        OrderIntensities::from_normalized(raw)?
    } else {
        warnings.push(format!(
            "{source}: intensities sum to {total}; renormalised to 1"
        ));
        OrderIntensities::normalize(raw)?
    };
    Ok(LoadedOrders { orders, warnings })
}

pub fn load_orders_csv(path: &Path) -> Result<LoadedOrders> {
    read_orders(open(path)?, &path.display().to_string())
}

pub fn write_orders<W: Write>(writer: W, orders: &OrderIntensities) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let e = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["n", "intensity", "sigma"]).map_err(e)?;
    for (n, v) in orders.iter() {
        let sigma = v.sigma.map(|s| s.to_string()).unwrap_or_default();
        w.write_record([n.to_string(), v.intensity.to_string(), sigma])
            .map_err(e)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_orders_csv(path: &Path, orders: &OrderIntensities) -> Result<()> {
    write_orders(create(path)?, orders)
}

/// Reads `theta_rad,counts`; `slits` is recorded on the scan.
pub fn read_scan<R: Read>(reader: R, source: &str, slits: u32) -> Result<AngularScan> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| csv_err(source, e))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["theta_rad", "counts"] {
        return Err(format_err(source, 0, "header must be `theta_rad,counts`"));
    }
    let (mut thetas, mut counts) = (Vec::new(), Vec::new());
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| csv_err(source, e))?;
        let t = field_f64(source, row, "theta_rad", &rec[0])?;
        let c = field_f64(source, row, "counts", &rec[1])?;
        if let Some(&prev) = thetas.last() {
            if !(t > prev) {
                return Err(format_err(
                    source,
                    row,
                    "angles must be strictly increasing",
                ));
            }
        }
        thetas.push(t);
        counts.push(c);
    }
    if thetas.is_empty() {
        return Err(format_err(source, 0, "no data rows"));
    }
    AngularScan::new(thetas, counts, slits)
}

pub fn load_scan_csv(path: &Path, slits: u32) -> Result<AngularScan> {
    read_scan(open(path)?, &path.display().to_string(), slits)
}

pub fn write_scan<W: Write>(writer: W, scan: &AngularScan) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let e = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["theta_rad", "counts"]).map_err(e)?;
    for (t, c) in scan.iter() {
        w.write_record([t.to_string(), c.to_string()]).map_err(e)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_scan_csv(path: &Path, scan: &AngularScan) -> Result<()> {
    write_scan(create(path)?, scan)
}

/// Writes `(ξ, ε(iξ))` pairs as `xi_ev,eps`.
pub fn write_eps_csv(path: &Path, grid: &[(f64, f64)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    let e = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["xi_ev", "eps"]).map_err(e)?;
    for (x, v) in grid {
        w.write_record([x.to_string(), v.to_string()]).map_err(e)?;
    }
    w.flush()?;
    Ok(())
}
