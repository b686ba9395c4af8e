//! Run configuration: the optional JSON file merged with command-line flags.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::ValueEnum;
use dispersion::dg::FluxKind;
use dispersion::scheme::Mesh;
use dispersion::temporal::TemporalScheme;
use dispersion::{LorentzMedium, SchemeSpec, Spatial};
use serde::Deserialize;

use crate::error::{CliError, CliResult};

/// `W₁` used when nothing else is given.
pub const DEFAULT_W1: f64 = PI / 30.0;
/// `ω₁h` for semi-discrete runs when nothing else is given.
pub const DEFAULT_OMEGA1_H: f64 = PI / 30.0;
/// Fraction of the leap-frog limit used when no mesh is given.
pub const DEFAULT_CFL_FRACTION: f64 = 0.7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
    Svg,
}

/// Inclusive sweep `a:b:n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl Range {
    pub const fn new(start: f64, end: f64, count: usize) -> Self {
        Range { start, end, count }
    }

    pub fn points(&self) -> Vec<f64> {
        match self.count {
            0 => Vec::new(),
            1 => vec![self.start],
            n => (0..n).map(|i| self.start + (self.end - self.start) * i as f64 / (n - 1) as f64).collect(),
        }
    }
}

impl FromStr for Range {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || CliError::config(format!("range `{s}` is not of the form a:b:n"));
        let [a, b, n] = parts[..] else { return Err(bad()) };
        let start: f64 = a.trim().parse().map_err(|_| bad())?;
        let end: f64 = b.trim().parse().map_err(|_| bad())?;
        let count: usize = n.trim().parse().map_err(|_| bad())?;
        if !(start.is_finite() && end.is_finite()) || count == 0 {
            return Err(bad());
        }
        Ok(Range { start, end, count })
    }
}

/// Settings read from `--config`. Every field is optional; flags win.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub medium: Option<LorentzMedium>,
    pub scheme: Option<String>,
    pub w1: Option<f64>,
    pub omega1_h: Option<f64>,
    pub nu: Option<f64>,
    pub range: Option<String>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl RunConfig {
    /// Accepts either a full run config or a bare medium object.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        let parsed = if value.get("eps_s").is_some() {
            serde_json::from_value(value).map(|m| RunConfig { medium: Some(m), ..Default::default() })
        } else {
            serde_json::from_value(value)
        };
        parsed.map_err(|e| CliError::config(format!("{}: {e}", path.display())))
    }

    pub fn medium(&self) -> LorentzMedium {
        self.medium.unwrap_or_default()
    }

    pub fn range(&self, flag: Option<&str>, default: Range) -> CliResult<Range> {
        flag.or(self.range.as_deref()).map_or(Ok(default), str::parse)
    }
}

/// Mesh-related flags after merging with the config file.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MeshArgs {
    pub w1: Option<f64>,
    pub nu: Option<f64>,
    pub omega1_h: Option<f64>,
}

impl MeshArgs {
    pub fn merged(self, cfg: &RunConfig) -> Self {
        MeshArgs { w1: self.w1.or(cfg.w1), nu: self.nu.or(cfg.nu), omega1_h: self.omega1_h.or(cfg.omega1_h) }
    }
}

fn parse_temporal(s: &str) -> CliResult<Option<TemporalScheme>> {
    match s {
        "semi" => Ok(None),
        other => other.parse().map(Some).map_err(|e: dispersion::DispersionError| CliError::config(e.to_string())),
    }
}

/// Parses scheme names of the form `exact`, `lf`, `tp`, `semi-fd4`,
/// `lf-fd2`, `tp-dg1-upwind`, `lf-dg2-alt-`.
pub fn parse_scheme(s: &str) -> CliResult<(Option<TemporalScheme>, Spatial)> {
    let s = s.trim().to_ascii_lowercase();
    if s == "exact" {
        return Ok((None, Spatial::Continuous));
    }
    let bad = |why: &str| CliError::config(format!("scheme `{s}`: {why}"));
    let mut parts = s.splitn(3, '-');
    let temporal = parse_temporal(parts.next().unwrap_or_default())?;
    let Some(space) = parts.next() else {
        return match temporal {
            Some(_) => Ok((temporal, Spatial::Continuous)),
            None => Err(bad("semi needs a spatial part")),
        };
    };
    let number = |prefix: &str| -> CliResult<usize> {
        space[prefix.len()..].parse().map_err(|_| bad("expected a number after the spatial kind"))
    };
    let spatial = if space.starts_with("fd") {
        let accuracy = number("fd")?;
        if accuracy == 0 || accuracy % 2 == 1 {
            return Err(bad("FD accuracy must be a positive even number"));
        }
        Spatial::Fd { order: accuracy / 2 }
    } else if space.starts_with("dg") {
        let degree = number("dg")?;
        let flux: FluxKind = parts.next().ok_or_else(|| bad("DG needs a flux"))?.parse().map_err(|e: dispersion::DispersionError| bad(&e.to_string()))?;
        Spatial::Dg { degree, flux }
    } else {
        return Err(bad("spatial part must start with fd or dg"));
    };
    if parts.next().is_some() {
        return Err(bad("trailing text"));
    }
    Ok((temporal, spatial))
}

/// Resolves the mesh of a scheme and checks the leap-frog limit.
pub fn build_spec(
    temporal: Option<TemporalScheme>,
    spatial: Spatial,
    mesh: MeshArgs,
    medium: &LorentzMedium,
    allow_unstable: bool,
) -> CliResult<SchemeSpec> {
    for (name, v) in [("w1", mesh.w1), ("nu", mesh.nu), ("omega1_h", mesh.omega1_h)] {
        if let Some(v) = v {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::config(format!("{name} must be positive, got {v}")));
            }
        }
    }
    match spatial {
        Spatial::Continuous => {}
        Spatial::Fd { order } => {
            dispersion::fd::lambda_coeffs(order)?;
        }
        Spatial::Dg { degree, .. } => {
            dispersion::dg::assemble_local(degree)?;
        }
    }
    let base = SchemeSpec { temporal, spatial, w1: None, mesh: None };
    let spec = match (temporal, spatial) {
        (None, Spatial::Continuous) => base,
        (Some(_), Spatial::Continuous) => SchemeSpec { w1: Some(mesh.w1.unwrap_or(DEFAULT_W1)), ..base },
        (None, _) => {
            let oh = match (mesh.omega1_h, mesh.nu) {
                (Some(_), Some(_)) => return Err(CliError::config("give omega1_h or nu, not both")),
                (Some(oh), None) => oh,
                (None, Some(nu)) => mesh.w1.unwrap_or(DEFAULT_W1) / (medium.eps_inf().sqrt() * nu),
                (None, None) => DEFAULT_OMEGA1_H,
            };
            SchemeSpec { mesh: Some(Mesh::Omega1H(oh)), ..base }
        }
        (Some(_), _) => {
            let m = match (mesh.omega1_h, mesh.nu) {
                (Some(_), Some(_)) => return Err(CliError::config("give omega1_h or nu, not both")),
                (Some(oh), None) => Mesh::Omega1H(oh),
                (None, Some(nu)) => Mesh::Cfl(nu),
                (None, None) => Mesh::Cfl(DEFAULT_CFL_FRACTION * base.cfl_limit()?.unwrap_or(1.0)),
            };
            SchemeSpec { w1: Some(mesh.w1.unwrap_or(DEFAULT_W1)), mesh: Some(m), ..base }
        }
    };
    if spec.temporal == Some(TemporalScheme::LeapFrog) && !allow_unstable {
        if let Some(limit) = spec.cfl_limit()? {
            let nu = spec.nu(medium)?;
            if nu > limit * (1.0 + 1e-12) {
                return Err(CliError::config(format!("nu = {nu} exceeds the leap-frog limit {limit}; pass --allow-unstable to run anyway")));
            }
        }
    }
    Ok(spec)
}
