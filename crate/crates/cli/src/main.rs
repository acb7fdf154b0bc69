//! `vdwgrat`: simulate, fit and predict van der Waals diffraction data.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};

use vdw_grating::error::ErrorKind;
use vdw_grating::grating::{
    angular_pattern, order_grid, order_intensities, velocity_averaged_intensities, PredictedOrders,
};
use vdw_grating::inference::{
    fit_c3, synthesize_orders, synthesize_scan, FitOptions, Noise, RNG_ALGORITHM,
};
use vdw_grating::io::{
    load_config, load_orders_csv, write_eps_csv, write_orders_csv, write_scan_csv, KeyRule, Report,
    RunConfig, CONFIG_KEYS,
};
use vdw_grating::lifshitz::{
    c3_lifshitz_prepared, c3_one_oscillator, static_response_g0, AtomModel, ImaginaryAxisTable,
    KramersKronig, LifshitzOptions, OneOscillatorAtom, TableOptions, TabulatedPolarizability,
    TABLE_INTERPOLATION,
};
use vdw_grating::Error;

#[derive(Parser)]
#[command(
    name = "vdwgrat",
    version,
    about = "Atom diffraction by nanogratings with van der Waals interactions",
    long_about = "Simulates diffraction-order intensities and angular scans of atoms passing a \
                  transmission grating under a -C3/l^3 surface potential, fits C3 to measured \
                  relative intensities, and predicts C3 from Lifshitz theory."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Model order intensities (default) or an angular scan for the configured C3.
    Simulate(SimulateArgs),
    /// Fit C3 to an orders CSV and write a report.
    Fit(FitArgs),
    /// Predict C3 from the material and atom response functions.
    Theory(TheoryArgs),
    /// Seeded synthetic data with multiplicative Gaussian noise.
    Synth(SynthArgs),
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    /// Write the angular pattern `theta_rad,counts`.
    #[arg(long, conflicts_with = "orders")]
    scan: bool,
    /// Write relative intensities `n,intensity,sigma` (the default).
    #[arg(long)]
    orders: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long)]
    config: PathBuf,
    /// Orders CSV with header `n,intensity,sigma` (sigma optional).
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Route {
    /// Tauc-Lorentz material through Kramers-Kronig, one-oscillator atom.
    Kk,
    /// Closed form with g0 and E_S (g0 from the material if not configured).
    OneOsc,
    /// Tabulated polarizability from `atom.polarizability_table`.
    Table,
}

impl Route {
    fn name(self) -> &'static str {
        match self {
            Route::Kk => "kk",
            Route::OneOsc => "one-osc",
            Route::Table => "table",
        }
    }
}

#[derive(Args)]
struct TheoryArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, value_enum)]
    route: Route,
    #[arg(long)]
    out: PathBuf,
    /// Also write the tabulated ε(iξ) as `xi_ev,eps`.
    #[arg(long)]
    dump_eps: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderSet {
    /// -n_max ..= n_max
    Symmetric,
    /// 1 ..= n_max
    Positive,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    config: PathBuf,
    /// Relative noise level (standard deviation of the multiplicative factor).
    #[arg(long)]
    noise: f64,
    /// Overrides `run.seed`.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
    /// Emit relative order intensities instead of a scan.
    #[arg(long)]
    orders: bool,
    #[arg(long, value_enum, default_value = "symmetric", requires = "orders")]
    order_set: OrderSet,
}

enum Failure {
    Usage(String),
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

type CliResult = std::result::Result<(), Failure>;

fn key_reference() -> String {
    let mut s = String::from("Configuration keys (`section.key = value`, `#` starts a comment):\n");
    for (key, rule, help) in CONFIG_KEYS {
        let tag = match rule {
            KeyRule::Required => "required",
            KeyRule::Optional => "optional",
            KeyRule::Conditional => "route-dependent",
        };
        s.push_str(&format!("  {key:<28} {tag:<16} {help}\n"));
    }
    s.push_str(
        "\nExit codes: 0 success, 1 usage error, 2 input/format error, 3 numerical failure.\n\
         Failures print one line `error: code=<id> kind=<usage|input|numerical> message=<text>` \
         on standard error.",
    );
    s
}

fn main() -> ExitCode {
    let matches = match Cli::command().after_help(key_reference()).try_get_matches() {
        Ok(m) => m,
        Err(e) => return clap_exit(e),
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => return clap_exit(e),
    };
    let result = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Fit(a) => fit(a),
        Command::Theory(a) => theory(a),
        Command::Synth(a) => synth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            machine_line("usage", "usage", &msg);
            ExitCode::from(1)
        }
        Err(Failure::Run(e)) => {
            let (kind, code) = match e.kind() {
                ErrorKind::Input => ("input", 2),
                ErrorKind::Numerical => ("numerical", 3),
            };
            machine_line(e.code(), kind, &e.to_string());
            ExitCode::from(code)
        }
    }
}

fn clap_exit(e: clap::Error) -> ExitCode {
    use clap::error::ErrorKind as K;
    match e.kind() {
        K::DisplayHelp | K::DisplayVersion | K::DisplayHelpOnMissingArgumentOrSubcommand => {
            let _ = e.print();
            ExitCode::SUCCESS
        }
        _ => {
            let _ = e.print();
            machine_line("usage", "usage", &e.kind().to_string());
            ExitCode::from(1)
        }
    }
}

fn machine_line(code: &str, kind: &str, message: &str) {
    let flat = message.replace(['\n', '\r'], " ");
    eprintln!("error: code={code} kind={kind} message={flat}");
}

fn config_dir(path: &Path) -> Option<&Path> {
    path.parent()
}

fn predicted_orders(cfg: &RunConfig) -> vdw_grating::Result<PredictedOrders> {
    let (pot, geom, beam, quad) = (
        cfg.potential(),
        cfg.geometry(),
        cfg.beam(),
        cfg.quadrature(),
    );
    match cfg.run.velocity_nodes {
        Some(nodes) if cfg.beam.dv_over_u > 0.0 => {
            velocity_averaged_intensities(cfg.run.n_max, &pot, &geom, &beam, nodes, &quad)
        }
        _ => order_intensities(cfg.run.n_max, &pot, &geom, &beam, &quad),
    }
}

fn scan_grid(cfg: &RunConfig) -> vdw_grating::Result<Vec<f64>> {
    order_grid(
        cfg.run.n_max,
        cfg.beam().wavelength_nm(),
        cfg.geometry.d,
        cfg.run.scan_points,
    )
}

fn simulate(a: SimulateArgs) -> CliResult {
    let cfg = load_config(&a.config)?;
    if a.scan {
        let thetas = scan_grid(&cfg)?;
        let scan = angular_pattern(
            &thetas,
            cfg.run.slits,
            &cfg.potential(),
            &cfg.geometry(),
            &cfg.beam(),
            &cfg.quadrature(),
        )?;
        write_scan_csv(&a.out, &scan)?;
        println!("wrote {} scan samples to {}", scan.len(), a.out.display());
    } else {
        let predicted = predicted_orders(&cfg)?;
        write_orders_csv(&a.out, &predicted.intensities)?;
        println!(
            "wrote {} orders (C3 = {} meV nm^3) to {}",
            predicted.intensities.len(),
            cfg.c3_mev_nm3,
            a.out.display()
        );
    }
    Ok(())
}

fn fit(a: FitArgs) -> CliResult {
    let cfg = load_config(&a.config)?;
    let loaded = load_orders_csv(&a.data)?;
    for w in &loaded.warnings {
        eprintln!("warning: {w}");
    }
    let opts = FitOptions {
        quad: cfg.quadrature(),
        velocity_nodes: cfg.run.velocity_nodes,
        ..FitOptions::default()
    };
    let result = fit_c3(
        &loaded.orders,
        &cfg.geometry(),
        &cfg.beam(),
        (cfg.run.c3_min, cfg.run.c3_max),
        &opts,
    )?;
    let mut r = Report::new("fit");
    r.text("species", cfg.beam.species.clone())
        .text("data", a.data.display().to_string())
        .number("c3_hat_mev_nm3", result.c3_hat)
        .number("uncertainty_mev_nm3", result.uncertainty)
        .number("chi2", result.chi2)
        .integer("dof", result.dof)
        .text(
            "weighting",
            if result.weighted {
                "inverse-variance"
            } else {
                "uniform"
            },
        )
        .integer("iterations", result.iterations)
        .integer("model_evaluations", result.evaluations);
    for (i, w) in loaded.warnings.iter().enumerate() {
        r.text(&format!("warning.{}", i + 1), w.clone());
    }
    for res in &result.residuals {
        let p = format!("order.{}", res.order);
        r.number(&format!("{p}.observed"), res.observed)
            .number(&format!("{p}.model"), res.model)
            .number(&format!("{p}.residual"), res.residual);
        if let Some(s) = res.sigma {
            r.number(&format!("{p}.sigma"), s);
        }
    }
    r.config(&cfg);
    r.write(&a.out)?;
    println!(
        "C3 = {:.4} +/- {:.4} meV nm^3 (chi2 = {:.3e}, {} orders)",
        result.c3_hat,
        result.uncertainty,
        result.chi2,
        result.residuals.len()
    );
    Ok(())
}

fn oscillator_atom(cfg: &RunConfig) -> vdw_grating::Result<Option<OneOscillatorAtom>> {
    match (cfg.atom.alpha0_nm3, cfg.atom.ea_ev) {
        (Some(a), Some(e)) => Ok(Some(OneOscillatorAtom::new(a, e)?)),
        _ => Ok(None),
    }
}

fn missing(what: &str) -> Failure {
    Failure::Run(Error::InvalidInput(format!("configuration lacks {what}")))
}

fn theory(a: TheoryArgs) -> CliResult {
    let cfg = load_config(&a.config)?;
    let kk = KramersKronig::default();
    let lifshitz = LifshitzOptions::default();
    let tl = cfg.material.tauc_lorentz;
    let mut r = Report::new("theory");
    r.text("route", a.route.name())
        .text("species", cfg.beam.species.clone());
    let table = match (tl, a.route) {
        (Some(p), Route::Kk | Route::Table) => {
            Some(ImaginaryAxisTable::build(&p, &lifshitz.table)?)
        }
        (Some(p), Route::OneOsc) if a.dump_eps.is_some() => {
            Some(ImaginaryAxisTable::build(&p, &TableOptions::default())?)
        }
        _ => None,
    };
    if let Some(t) = &table {
        r.number("eps_static", t.static_eps())
            .number("eps_table_quadrature_error", t.quadrature_error())
            .number("g_table_interpolation_error", t.interpolation_error());
    }

    let (value, uncertainty) = match a.route {
        Route::Kk => {
            let t = table
                .clone()
                .ok_or_else(|| missing("the material.tl_* Tauc-Lorentz parameters"))?;
            let atom =
                oscillator_atom(&cfg)?.ok_or_else(|| missing("atom.alpha0_nm3 and atom.ea_ev"))?;
            let surface = vdw_grating::lifshitz::PreparedSurface::Table(t);
            r.number("g0", surface.static_response());
            let est = c3_lifshitz_prepared(&AtomModel::from(atom), &surface, lifshitz.rel_tol)?;
            r.number("c3_quadrature_error_mev_nm3", est.quadrature_error)
                .number("c3_interpolation_error_mev_nm3", est.interpolation_error);
            (est.value, est.uncertainty)
        }
        Route::OneOsc => {
            let atom =
                oscillator_atom(&cfg)?.ok_or_else(|| missing("atom.alpha0_nm3 and atom.ea_ev"))?;
            let es = cfg
                .material
                .es_ev
                .ok_or_else(|| missing("material.es_ev"))?;
            let (g0, source) = match (cfg.material.g0, tl) {
                (Some(g), _) => (g, "config"),
                (None, Some(p)) => (static_response_g0(&p, &kk)?, "kramers-kronig"),
                (None, None) => return Err(missing("material.g0 or the Tauc-Lorentz parameters")),
            };
            r.number("g0", g0)
                .text("g0_source", source)
                .number("es_ev", es)
                .number("ea_ev", atom.energy_ev())
                .number("alpha0_nm3", atom.alpha0_nm3());
            (
                c3_one_oscillator(atom.alpha0_nm3(), g0, atom.energy_ev(), es)?,
                0.0,
            )
        }
        Route::Table => {
            let path = cfg
                .table_path(config_dir(&a.config))
                .ok_or_else(|| missing("atom.polarizability_table"))?;
            let atom = TabulatedPolarizability::load(&path)?;
            r.text("polarizability_table", path.display().to_string())
                .integer("polarizability_rows", atom.rows().count())
                .text("table_interpolation", TABLE_INTERPOLATION);
            let surface = match (&table, cfg.oscillator_surface()) {
                (Some(t), _) => vdw_grating::lifshitz::PreparedSurface::Table(t.clone()),
                (None, Some(s)) => s.prepare(&lifshitz.table)?,
                (None, None) => {
                    return Err(missing(
                        "a surface model (Tauc-Lorentz or material.g0 + material.es_ev)",
                    ))
                }
            };
            r.number("g0", surface.static_response());
            let est = c3_lifshitz_prepared(&AtomModel::from(atom), &surface, lifshitz.rel_tol)?;
            r.number("c3_quadrature_error_mev_nm3", est.quadrature_error)
                .number("c3_interpolation_error_mev_nm3", est.interpolation_error);
            (est.value, est.uncertainty)
        }
    };
    r.number("c3_mev_nm3", value)
        .number("c3_uncertainty_mev_nm3", uncertainty);

    if let Some(path) = &a.dump_eps {
        let t = table
            .as_ref()
            .ok_or_else(|| missing("Tauc-Lorentz parameters for --dump-eps"))?;
        write_eps_csv(path, t.grid())?;
        r.text("eps_dump", path.display().to_string());
    }
    r.config(&cfg);
    r.write(&a.out)?;
    println!(
        "{} C3 = {:.4} +/- {:.1e} meV nm^3 ({} route)",
        cfg.beam.species,
        value,
        uncertainty,
        a.route.name()
    );
    Ok(())
}

fn synth(a: SynthArgs) -> CliResult {
    let mut cfg = load_config(&a.config)?;
    if !(a.noise.is_finite() && a.noise >= 0.0) {
        return Err(Failure::Usage(format!(
            "--noise must be >= 0 (got {})",
            a.noise
        )));
    }
    if let Some(s) = a.seed {
        cfg.run.seed = s;
    }
    let noise = Noise {
        fraction: a.noise,
        seed: cfg.run.seed,
    };
    let (pot, geom, beam, quad) = (
        cfg.potential(),
        cfg.geometry(),
        cfg.beam(),
        cfg.quadrature(),
    );
    let mut r = Report::new("synth");
    if a.orders {
        let n = cfg.run.n_max as i32;
        let orders: Vec<i32> = match a.order_set {
            OrderSet::Symmetric => (-n..=n).collect(),
            OrderSet::Positive => (1..=n).collect(),
        };
        let data = synthesize_orders(&orders, &pot, &geom, &beam, &noise, &quad)?;
        write_orders_csv(&a.out, &data)?;
        r.text("output", "orders").integer("orders", data.len());
    } else {
        let thetas = scan_grid(&cfg)?;
        let scan = synthesize_scan(&pot, &geom, &beam, cfg.run.slits, &thetas, &noise, &quad)?;
        write_scan_csv(&a.out, &scan)?;
        r.text("output", "scan").integer("samples", scan.len());
    }
    r.text("data", a.out.display().to_string())
        .number("noise_fraction", a.noise)
        .integer("seed", cfg.run.seed)
        .text("rng_algorithm", RNG_ALGORITHM)
        .config(&cfg);
    let meta = sidecar(&a.out);
    r.write(&meta)?;
    println!("wrote {} (metadata in {})", a.out.display(), meta.display());
    Ok(())
}

fn sidecar(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".report");
    PathBuf::from(s)
}
