//! Line-oriented run configuration: `section.key = value`, `#` comments.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::grating::{BeamState, GratingGeometry, Potential, SlitQuadrature};
use crate::lifshitz::{SurfaceModel, TaucLorentzParams};
use crate::units::deg_to_rad;

/// Whether a key must appear.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeyRule {
    Required,
    Optional,
    /// Required for some subcommands or routes only.
    Conditional,
}

/// Every accepted key with its rule and a one-line description.
pub const CONFIG_KEYS: &[(&str, KeyRule, &str)] = &[
    ("geometry.d", KeyRule::Required, "grating period in nm"),
    (
        "geometry.s0",
        KeyRule::Required,
        "slit opening at the grating entrance in nm (0 < s0 < d)",
    ),
    (
        "geometry.t",
        KeyRule::Required,
        "bar depth along the beam in nm",
    ),
    (
        "geometry.beta_deg",
        KeyRule::Required,
        "bar wedge angle in degrees, [0, 90)",
    ),
    (
        "beam.species",
        KeyRule::Required,
        "free-text label, e.g. He*",
    ),
    ("beam.mass_u", KeyRule::Required, "atomic mass in u"),
    (
        "beam.velocity_mps",
        KeyRule::Required,
        "mean beam velocity in m/s",
    ),
    (
        "beam.dv_over_u",
        KeyRule::Optional,
        "velocity FWHM over mean velocity (default 0)",
    ),
    (
        "potential.c3_mev_nm3",
        KeyRule::Required,
        "van der Waals coefficient C3 in meV nm^3",
    ),
    (
        "material.tl_band_gap_ev",
        KeyRule::Conditional,
        "Tauc-Lorentz band gap in eV (kk/table routes)",
    ),
    (
        "material.tl_strength_ev",
        KeyRule::Conditional,
        "Tauc-Lorentz strength A in eV",
    ),
    (
        "material.tl_resonance_ev",
        KeyRule::Conditional,
        "Tauc-Lorentz resonance energy in eV",
    ),
    (
        "material.tl_width_ev",
        KeyRule::Conditional,
        "Tauc-Lorentz broadening in eV",
    ),
    (
        "material.g0",
        KeyRule::Conditional,
        "static surface response for the one-oscillator surface",
    ),
    (
        "material.es_ev",
        KeyRule::Conditional,
        "surface oscillator energy E_S in eV (one-osc route)",
    ),
    (
        "atom.alpha0_nm3",
        KeyRule::Conditional,
        "static polarizability in nm^3 (kk/one-osc routes)",
    ),
    (
        "atom.ea_ev",
        KeyRule::Conditional,
        "atomic oscillator energy E_a in eV (kk/one-osc routes)",
    ),
    (
        "atom.polarizability_table",
        KeyRule::Conditional,
        "path of an (energy eV, alpha nm^3) table (table route)",
    ),
    (
        "run.n_max",
        KeyRule::Required,
        "highest diffraction order |n| simulated",
    ),
    (
        "run.tolerance",
        KeyRule::Optional,
        "slit-amplitude relative tolerance (default 1e-8)",
    ),
    (
        "run.seed",
        KeyRule::Optional,
        "64-bit seed for synthetic noise (default 0)",
    ),
    (
        "run.slits",
        KeyRule::Optional,
        "number of illuminated slits N (default 100)",
    ),
    (
        "run.scan_points",
        KeyRule::Optional,
        "samples in simulated angular scans (default 4001)",
    ),
    (
        "run.velocity_nodes",
        KeyRule::Optional,
        "odd Gauss-Hermite node count; enables velocity averaging",
    ),
    (
        "run.c3_min",
        KeyRule::Optional,
        "lower C3 bound for fits (default 0)",
    ),
    (
        "run.c3_max",
        KeyRule::Optional,
        "upper C3 bound for fits (default 20)",
    ),
];

const SECTIONS: &[&str] = &["geometry", "beam", "potential", "material", "atom", "run"];
const REQUIRED_SECTIONS: &[&str] = &["geometry", "beam", "potential", "run"];

#[derive(Debug, Clone, PartialEq)]
pub struct GeometryConfig {
    pub d: f64,
    pub s0: f64,
    pub t: f64,
    pub beta_deg: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamConfig {
    pub species: String,
    pub mass_u: f64,
    pub velocity_mps: f64,
    pub dv_over_u: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MaterialConfig {
    pub tauc_lorentz: Option<TaucLorentzParams>,
    pub g0: Option<f64>,
    pub es_ev: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AtomConfig {
    pub alpha0_nm3: Option<f64>,
    pub ea_ev: Option<f64>,
    pub polarizability_table: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSection {
    pub n_max: u32,
    pub tolerance: f64,
    pub seed: u64,
    pub slits: u32,
    pub scan_points: usize,
    pub velocity_nodes: Option<usize>,
    pub c3_min: f64,
    pub c3_max: f64,
}

/// Fully validated configuration with defaults resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub geometry: GeometryConfig,
    pub beam: BeamConfig,
    pub c3_mev_nm3: f64,
    pub material: MaterialConfig,
    pub atom: AtomConfig,
    pub run: RunSection,
}

struct Entry {
    line: usize,
    value: String,
}

struct Doc {
    entries: BTreeMap<String, Entry>,
}

impl Doc {
    fn raw(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key)
    }

    fn f64_opt(&self, key: &str) -> Result<Option<(f64, usize)>> {
        let Some(e) = self.raw(key) else {
            return Ok(None);
        };
        let v: f64 = e
            .value
            .parse()
            .map_err(|_| parse_err(e.line, key, format!("`{}` is not a number", e.value)))?;
        if !v.is_finite() {
            return Err(parse_err(e.line, key, "value must be finite"));
        }
        Ok(Some((v, e.line)))
    }

    fn f64_req(&self, key: &str) -> Result<(f64, usize)> {
        self.f64_opt(key)?
            .ok_or_else(|| parse_err(0, key, "required key is missing"))
    }

    fn int_opt<T: std::str::FromStr>(&self, key: &str) -> Result<Option<(T, usize)>> {
        let Some(e) = self.raw(key) else {
            return Ok(None);
        };
        let v = e.value.parse::<T>().map_err(|_| {
            parse_err(
                e.line,
                key,
                format!("`{}` is not a non-negative integer", e.value),
            )
        })?;
        Ok(Some((v, e.line)))
    }
}

fn parse_err(line: usize, key: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        key: key.to_string(),
        message: message.into(),
    }
}

// Re-raises a domain invariant failure as a parse error at `line`/`key`.
fn at<T>(line: usize, key: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| parse_err(line, key, e.to_string()))
}

fn positive(v: (f64, usize), key: &str) -> Result<f64> {
    if v.0 > 0.0 {
        Ok(v.0)
    } else {
        Err(parse_err(v.1, key, format!("must be > 0 (got {})", v.0)))
    }
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut entries = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((key, value)) = body.split_once('=') else {
            return Err(parse_err(line, body, "expected `section.key = value`"));
        };
        let (key, value) = (key.trim(), value.trim());
        let Some((section, _)) = key.split_once('.') else {
            return Err(parse_err(line, key, "key must be written as `section.key`"));
        };
        if !SECTIONS.contains(&section) {
            return Err(parse_err(line, key, format!("unknown section `{section}`")));
        }
        if !CONFIG_KEYS.iter().any(|(k, _, _)| *k == key) {
            return Err(parse_err(line, key, "unknown key"));
        }
        if value.is_empty() {
            return Err(parse_err(line, key, "missing value"));
        }
        if let Some(prev) = entries.insert(
            key.to_string(),
            Entry {
                line,
                value: value.to_string(),
            },
        ) {
            return Err(parse_err(
                line,
                key,
                format!("duplicate key (first given on line {})", prev.line),
            ));
        }
    }
    let missing: Vec<&str> = REQUIRED_SECTIONS
        .iter()
        .copied()
        .filter(|s| !entries.keys().any(|k| k.starts_with(&format!("{s}."))))
        .collect();
    if !missing.is_empty() {
        return Err(parse_err(
            0,
            "",
            format!("missing required sections: {}", missing.join(", ")),
        ));
    }
    let doc = Doc { entries };
    for (key, rule, _) in CONFIG_KEYS {
        if *rule == KeyRule::Required && doc.raw(key).is_none() {
            return Err(parse_err(0, key, "required key is missing"));
        }
    }

    let d = doc.f64_req("geometry.d")?;
    let s0 = doc.f64_req("geometry.s0")?;
    let t = doc.f64_req("geometry.t")?;
    let beta = doc.f64_req("geometry.beta_deg")?;
    if !(0.0..90.0).contains(&beta.0) {
        return Err(parse_err(
            beta.1,
            "geometry.beta_deg",
            format!("wedge angle must lie in [0, 90) degrees (got {})", beta.0),
        ));
    }
    at(
        s0.1,
        "geometry.s0",
        GratingGeometry::new(d.0, s0.0, t.0, deg_to_rad(beta.0)),
    )?;
    let geometry = GeometryConfig {
        d: d.0,
        s0: s0.0,
        t: t.0,
        beta_deg: beta.0,
    };

    let species = doc.raw("beam.species").expect("checked").value.clone();
    let mass = doc.f64_req("beam.mass_u")?;
    let vel = doc.f64_req("beam.velocity_mps")?;
    let spread = doc.f64_opt("beam.dv_over_u")?.unwrap_or((0.0, 0));
    at(mass.1, "beam.mass_u", BeamState::new(mass.0, vel.0))?;
    at(
        spread.1,
        "beam.dv_over_u",
        BeamState::with_spread(mass.0, vel.0, spread.0),
    )?;
    let beam = BeamConfig {
        species,
        mass_u: mass.0,
        velocity_mps: vel.0,
        dv_over_u: spread.0,
    };

    let c3 = doc.f64_req("potential.c3_mev_nm3")?;
    at(c3.1, "potential.c3_mev_nm3", Potential::new(c3.0))?;

    let tl_keys = [
        "material.tl_band_gap_ev",
        "material.tl_strength_ev",
        "material.tl_resonance_ev",
        "material.tl_width_ev",
    ];
    let tl: Vec<Option<(f64, usize)>> = tl_keys
        .iter()
        .map(|k| doc.f64_opt(k))
        .collect::<Result<_>>()?;
    let tauc_lorentz = match tl.iter().filter(|v| v.is_some()).count() {
        0 => None,
        4 => {
            let v: Vec<(f64, usize)> = tl.into_iter().flatten().collect();
            Some(at(
                v[0].1,
                tl_keys[0],
                TaucLorentzParams::new(v[0].0, v[1].0, v[2].0, v[3].0),
            )?)
        }
        _ => {
            let (i, _) = tl
                .iter()
                .enumerate()
                .find(|(_, v)| v.is_none())
                .expect("some missing");
            return Err(parse_err(
                0,
                tl_keys[i],
                "Tauc-Lorentz parameters must be given all together",
            ));
        }
    };
    let g0 = doc.f64_opt("material.g0")?;
    if let Some((v, line)) = g0 {
        if !(v > 0.0 && v < 1.0) {
            return Err(parse_err(
                line,
                "material.g0",
                format!("must lie in (0, 1) (got {v})"),
            ));
        }
    }
    let es = doc
        .f64_opt("material.es_ev")?
        .map(|v| positive(v, "material.es_ev"))
        .transpose()?;
    let material = MaterialConfig {
        tauc_lorentz,
        g0: g0.map(|v| v.0),
        es_ev: es,
    };

    let atom = AtomConfig {
        alpha0_nm3: doc
            .f64_opt("atom.alpha0_nm3")?
            .map(|v| positive(v, "atom.alpha0_nm3"))
            .transpose()?,
        ea_ev: doc
            .f64_opt("atom.ea_ev")?
            .map(|v| positive(v, "atom.ea_ev"))
            .transpose()?,
        polarizability_table: doc
            .raw("atom.polarizability_table")
            .map(|e| e.value.clone()),
    };

    let (n_max, _) = doc.int_opt::<u32>("run.n_max")?.expect("checked");
    let tolerance = doc.f64_opt("run.tolerance")?.unwrap_or((1e-8, 0));
    if !(tolerance.0 > 0.0 && tolerance.0 < 1.0) {
        return Err(parse_err(
            tolerance.1,
            "run.tolerance",
            "must lie in (0, 1)",
        ));
    }
    let seed = doc.int_opt::<u64>("run.seed")?.map_or(0, |v| v.0);
    let slits = doc.int_opt::<u32>("run.slits")?.unwrap_or((100, 0));
    if slits.0 == 0 {
        return Err(parse_err(slits.1, "run.slits", "must be >= 1"));
    }
    let points = doc
        .int_opt::<usize>("run.scan_points")?
        .unwrap_or((4001, 0));
    if points.0 < 2 {
        return Err(parse_err(points.1, "run.scan_points", "must be >= 2"));
    }
    let nodes = doc.int_opt::<usize>("run.velocity_nodes")?;
    if let Some((n, line)) = nodes {
        if n == 0 || n % 2 == 0 {
            return Err(parse_err(
                line,
                "run.velocity_nodes",
                "must be odd and >= 1",
            ));
        }
    }
    let c3_min = doc.f64_opt("run.c3_min")?.unwrap_or((0.0, 0));
    let c3_max = doc.f64_opt("run.c3_max")?.unwrap_or((20.0, 0));
    if !(c3_min.0 >= 0.0 && c3_max.0 > c3_min.0) {
        return Err(parse_err(
            c3_max.1.max(c3_min.1),
            "run.c3_max",
            "fit bounds must satisfy 0 <= c3_min < c3_max",
        ));
    }

    Ok(RunConfig {
        geometry,
        beam,
        c3_mev_nm3: c3.0,
        material,
        atom,
        run: RunSection {
            n_max,
            tolerance: tolerance.0,
            seed,
            slits: slits.0,
            scan_points: points.0,
            velocity_nodes: nodes.map(|v| v.0),
            c3_min: c3_min.0,
            c3_max: c3_max.0,
        },
    })
}

/// Reads and parses a configuration file.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

impl RunConfig {
    pub fn geometry(&self) -> GratingGeometry {
        let g = &self.geometry;
        GratingGeometry::new(g.d, g.s0, g.t, deg_to_rad(g.beta_deg)).expect("validated at parse")
    }

    pub fn beam(&self) -> BeamState {
        let b = &self.beam;
        BeamState::with_spread(b.mass_u, b.velocity_mps, b.dv_over_u).expect("validated at parse")
    }

    pub fn potential(&self) -> Potential {
        Potential::new(self.c3_mev_nm3).expect("validated at parse")
    }

    pub fn quadrature(&self) -> SlitQuadrature {
        SlitQuadrature::with_tolerance(self.run.tolerance)
    }

    /// The oscillator surface if `g0` and `E_S` are both configured.
    pub fn oscillator_surface(&self) -> Option<SurfaceModel> {
        match (self.material.g0, self.material.es_ev) {
            (Some(g0), Some(es)) => SurfaceModel::oscillator(g0, es).ok(),
            _ => None,
        }
    }

    /// Resolves the polarizability table path against `base` (the config's
    /// directory) unless it is absolute.
    pub fn table_path(&self, base: Option<&Path>) -> Option<PathBuf> {
        let p = Path::new(self.atom.polarizability_table.as_ref()?);
        Some(match base {
            Some(b) if p.is_relative() => b.join(p),
            _ => p.to_path_buf(),
        })
    }

    /// Canonical text with every resolved value; parses back to an equal config.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        let g = &self.geometry;
        put("geometry.d", g.d.to_string());
        put("geometry.s0", g.s0.to_string());
        put("geometry.t", g.t.to_string());
        put("geometry.beta_deg", g.beta_deg.to_string());
        let b = &self.beam;
        put("beam.species", b.species.clone());
        put("beam.mass_u", b.mass_u.to_string());
        put("beam.velocity_mps", b.velocity_mps.to_string());
        put("beam.dv_over_u", b.dv_over_u.to_string());
        put("potential.c3_mev_nm3", self.c3_mev_nm3.to_string());
        if let Some(p) = &self.material.tauc_lorentz {
            put("material.tl_band_gap_ev", p.band_gap_ev().to_string());
            put("material.tl_strength_ev", p.strength_ev().to_string());
            put("material.tl_resonance_ev", p.resonance_ev().to_string());
            put("material.tl_width_ev", p.width_ev().to_string());
        }
        if let Some(v) = self.material.g0 {
            put("material.g0", v.to_string());
        }
        if let Some(v) = self.material.es_ev {
            put("material.es_ev", v.to_string());
        }
        if let Some(v) = self.atom.alpha0_nm3 {
            put("atom.alpha0_nm3", v.to_string());
        }
        if let Some(v) = self.atom.ea_ev {
            put("atom.ea_ev", v.to_string());
        }
        if let Some(v) = &self.atom.polarizability_table {
            put("atom.polarizability_table", v.clone());
        }
        let r = &self.run;
        put("run.n_max", r.n_max.to_string());
        put("run.tolerance", r.tolerance.to_string());
        put("run.seed", r.seed.to_string());
        put("run.slits", r.slits.to_string());
        put("run.scan_points", r.scan_points.to_string());
        if let Some(n) = r.velocity_nodes {
            put("run.velocity_nodes", n.to_string());
        }
        put("run.c3_min", r.c3_min.to_string());
        put("run.c3_max", r.c3_max.to_string());
        out
    }
}
