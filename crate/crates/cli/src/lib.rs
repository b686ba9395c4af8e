//! Command implementations behind the `dispersion` binary.

pub mod config;
pub mod error;
pub mod figures;
pub mod svg;
pub mod sweeps;
pub mod table;
pub mod validate;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use dispersion::temporal::TemporalScheme;
use dispersion::Spatial;

use config::{build_spec, parse_scheme, Format, MeshArgs, Range, RunConfig};
use error::{CliError, CliResult};
use svg::LinePlot;
use table::Table;

#[derive(Debug, Parser)]
#[command(name = "dispersion", version, about = "Numerical dispersion of Maxwell-Lorentz discretizations")]
pub struct Cli {
    /// JSON file with a medium object or a full run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file (a directory for `figure`). Defaults to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    pub parallel: Option<usize>,
    /// Run leap-frog schemes above their stability limit.
    #[arg(long, global = true)]
    pub allow_unstable: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Default, Args)]
pub struct MeshFlags {
    /// `W1 = omega_1 dt`.
    #[arg(long)]
    pub w1: Option<f64>,
    /// CFL number `dt/(h sqrt(eps_inf))`.
    #[arg(long)]
    pub nu: Option<f64>,
    /// `omega_1 h`.
    #[arg(long = "omega1-h")]
    pub omega1_h: Option<f64>,
}

impl From<MeshFlags> for MeshArgs {
    fn from(f: MeshFlags) -> Self {
        MeshArgs { w1: f.w1, nu: f.nu, omega1_h: f.omega1_h }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum TimeKind {
    Semi,
    Lf,
    Tp,
}

impl From<TimeKind> for Option<TemporalScheme> {
    fn from(t: TimeKind) -> Self {
        match t {
            TimeKind::Semi => None,
            TimeKind::Lf => Some(TemporalScheme::LeapFrog),
            TimeKind::Tp => Some(TemporalScheme::Trapezoidal),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Relative phase error of the two time integrators.
    TemporalSweep {
        #[arg(long)]
        w1: Option<f64>,
        #[arg(long)]
        range: Option<String>,
    },
    /// Wavenumbers and error of FD2M schemes.
    FdSweep {
        #[arg(long, value_enum, default_value = "semi")]
        scheme: TimeKind,
        /// Stencil half-width; the scheme is accurate to order 2M.
        #[arg(long = "M")]
        m: usize,
        #[command(flatten)]
        mesh: MeshFlags,
        #[arg(long)]
        range: Option<String>,
        #[arg(long)]
        all_modes: bool,
    },
    /// Wavenumbers and error of nodal DG schemes.
    DgSweep {
        #[arg(long)]
        p: usize,
        /// central, alt+, alt- or upwind.
        #[arg(long)]
        flux: String,
        #[arg(long, value_enum, default_value = "semi")]
        scheme: TimeKind,
        #[command(flatten)]
        mesh: MeshFlags,
        #[arg(long)]
        range: Option<String>,
        #[arg(long)]
        all_modes: bool,
    },
    /// Leap-frog stability limits for FD and DG.
    CflTable,
    /// Normalized phase velocity, attenuation, energy and group velocity.
    Quantities {
        /// e.g. exact, lf, lf-fd4, tp-dg2-alt+.
        #[arg(long)]
        scheme: Option<String>,
        #[command(flatten)]
        mesh: MeshFlags,
        #[arg(long)]
        range: Option<String>,
    },
    /// Exact and FD2M frequency branches as functions of `kh`.
    OmegaOfK {
        #[arg(long = "M")]
        m: usize,
        #[arg(long = "omega1-h")]
        omega1_h: Option<f64>,
        #[arg(long)]
        range: Option<String>,
    },
    /// Check the analysis against the time-domain steppers.
    Validate {
        #[arg(long)]
        scheme: Option<String>,
        #[arg(long, default_value_t = 0.5)]
        w: f64,
        #[arg(long, default_value_t = 256)]
        cells: usize,
        #[arg(long, default_value_t = 4000)]
        steps: usize,
        #[command(flatten)]
        mesh: MeshFlags,
    },
    /// Regenerate the data behind one of the reference figures.
    Figure { id: String },
}

const DEFAULT_SWEEP: Range = Range::new(0.0, 3.0, 301);

fn emit(table: &Table, title: &str, format: Format, out: Option<&Path>) -> CliResult<()> {
    let text = match format {
        Format::Csv => table.to_csv()?,
        Format::Json => table.to_json(),
        Format::Svg => LinePlot::from_table(table, title).render(),
    };
    match out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn spatial_sweep(
    cli: &Cli,
    cfg: &RunConfig,
    temporal: Option<TemporalScheme>,
    spatial: Spatial,
    mesh: MeshFlags,
    range: Option<&str>,
    all_modes: bool,
) -> CliResult<(Table, String)> {
    let medium = cfg.medium();
    let spec = build_spec(temporal, spatial, MeshArgs::from(mesh).merged(cfg), &medium, cli.allow_unstable)?;
    let points = cfg.range(range, DEFAULT_SWEEP)?.points();
    Ok((sweeps::wavenumber_sweep(&spec, &medium, &points, all_modes), spec.to_string()))
}

/// Runs the parsed command line.
pub fn run(cli: &Cli) -> CliResult<()> {
    let cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(n) = cli.parallel {
        if n == 0 {
            return Err(CliError::config("--parallel needs at least one thread"));
        }
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let format = cli.format.or(cfg.format).unwrap_or_default();
    let out = cli.out.clone().or_else(|| cfg.out.clone());
    let medium = cfg.medium();
    let (table, title) = match &cli.command {
        Command::TemporalSweep { w1, range } => {
            let w1 = w1.or(cfg.w1).unwrap_or(config::DEFAULT_W1);
            if !(w1 > 0.0) {
                return Err(CliError::config("w1 must be positive"));
            }
            let points = cfg.range(range.as_deref(), DEFAULT_SWEEP)?.points();
            (sweeps::temporal_sweep(&medium, w1, &points), format!("time discretization, W1 = {w1}"))
        }
        Command::FdSweep { scheme, m, mesh, range, all_modes } => {
            spatial_sweep(cli, &cfg, (*scheme).into(), Spatial::Fd { order: *m }, *mesh, range.as_deref(), *all_modes)?
        }
        Command::DgSweep { p, flux, scheme, mesh, range, all_modes } => {
            let flux = flux.parse().map_err(|e: dispersion::DispersionError| CliError::config(e.to_string()))?;
            spatial_sweep(cli, &cfg, (*scheme).into(), Spatial::Dg { degree: *p, flux }, *mesh, range.as_deref(), *all_modes)?
        }
        Command::CflTable => (sweeps::cfl_table()?, "leap-frog stability limits".into()),
        Command::Quantities { scheme, mesh, range } => {
            let name = scheme.as_deref().or(cfg.scheme.as_deref()).ok_or_else(|| CliError::config("quantities needs --scheme"))?;
            let (t, s) = parse_scheme(name)?;
            let spec = build_spec(t, s, MeshArgs::from(*mesh).merged(&cfg), &medium, cli.allow_unstable)?;
            let points = cfg.range(range.as_deref(), Range::new(0.01, 3.0, 300))?.points();
            (sweeps::quantities_table(&spec, &medium, &points), format!("normalized quantities, {spec}"))
        }
        Command::OmegaOfK { m, omega1_h, range } => {
            let oh = omega1_h.or(cfg.omega1_h).unwrap_or(config::DEFAULT_OMEGA1_H);
            if !(oh > 0.0) {
                return Err(CliError::config("omega1_h must be positive"));
            }
            dispersion::fd::lambda_coeffs(*m)?;
            let points = cfg.range(range.as_deref(), Range::new(0.0, std::f64::consts::TAU, 201))?.points();
            (sweeps::omega_of_k_table(*m, &medium, oh, &points), format!("omega(k), FD{}", 2 * m))
        }
        Command::Validate { scheme, w, cells, steps, mesh } => {
            let name = scheme.as_deref().or(cfg.scheme.as_deref()).unwrap_or("lf-fd2");
            let (t, s) = parse_scheme(name)?;
            let spec = build_spec(t, s, MeshArgs::from(*mesh).merged(&cfg), &medium, cli.allow_unstable)?;
            let args = validate::ValidateArgs { w_hat: *w, cells: *cells, steps: *steps };
            let (table, ok) = validate::validate(&spec, &medium, args)?;
            emit(&table, "validation", format, out.as_deref())?;
            return if ok { Ok(()) } else { Err(CliError::Validation(format!("{spec}: at least one check failed"))) };
        }
        Command::Figure { id } => {
            let dir = out.unwrap_or_else(|| PathBuf::from("figures"));
            let files = figures::figure(id, &medium, format)?;
            fs::create_dir_all(&dir)?;
            let mut stdout = std::io::stdout().lock();
            for f in files {
                let path = dir.join(&f.name);
                fs::write(&path, f.contents)?;
                writeln!(stdout, "{}", path.display())?;
            }
            return Ok(());
        }
    };
    emit(&table, &title, format, out.as_deref())
}
