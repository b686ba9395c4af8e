//! A complete description of a discretization whose physical wavenumber can
//! be computed at any frequency.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dg::{cfl_max_dg, solve_dg_modes, FluxKind, SymbolScheme};
use crate::error::{DispersionError, Result};
use crate::fd::{cfl_max_fd, omega1_h_from_cfl, solve_fullydiscrete_modes, solve_semidiscrete_modes};
use crate::medium::LorentzMedium;
use crate::modes::ModeSet;
use crate::temporal::{semidiscrete_wavenumber, TemporalScheme};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Spatial {
    Continuous,
    Fd { order: usize },
    Dg { degree: usize, flux: FluxKind },
}

/// Spatial mesh, either directly or through the CFL number `ν = Δt/(h√ε_∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mesh {
    Omega1H(f64),
    Cfl(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeSpec {
    pub temporal: Option<TemporalScheme>,
    pub spatial: Spatial,
    /// `W₁ = ω₁Δt`; required with a temporal scheme.
    #[serde(default)]
    pub w1: Option<f64>,
    #[serde(default)]
    pub mesh: Option<Mesh>,
}

impl SchemeSpec {
    pub fn exact() -> Self {
        SchemeSpec { temporal: None, spatial: Spatial::Continuous, w1: None, mesh: None }
    }

    pub fn time_only(scheme: TemporalScheme, w1: f64) -> Self {
        SchemeSpec { temporal: Some(scheme), spatial: Spatial::Continuous, w1: Some(w1), mesh: None }
    }

    pub fn space_only(spatial: Spatial, omega1_h: f64) -> Self {
        SchemeSpec { temporal: None, spatial, w1: None, mesh: Some(Mesh::Omega1H(omega1_h)) }
    }

    pub fn fully_discrete(scheme: TemporalScheme, spatial: Spatial, w1: f64, nu: f64) -> Self {
        SchemeSpec { temporal: Some(scheme), spatial, w1: Some(w1), mesh: Some(Mesh::Cfl(nu)) }
    }

    pub fn is_exact(&self) -> bool {
        self.temporal.is_none() && self.spatial == Spatial::Continuous
    }

    /// Leap-frog stability limit of the spatial operator, if it has one.
    pub fn cfl_limit(&self) -> Result<Option<f64>> {
        match self.spatial {
            Spatial::Continuous => Ok(None),
            Spatial::Fd { order } => cfl_max_fd(order).map(Some),
            Spatial::Dg { degree, flux } => cfl_max_dg(degree, flux).map(Some),
        }
    }

    fn w1(&self) -> Result<f64> {
        match self.w1 {
            Some(w) if w > 0.0 => Ok(w),
            _ => Err(DispersionError::InvalidArgument("a temporal scheme needs a positive W1".into())),
        }
    }

    /// `ω₁h`, derived from `ν` when the mesh is given as a CFL number.
    pub fn omega1_h(&self, medium: &LorentzMedium) -> Result<f64> {
        let oh = match self.mesh {
            Some(Mesh::Omega1H(oh)) => oh,
            Some(Mesh::Cfl(nu)) => {
                if !(nu > 0.0) {
                    return Err(DispersionError::InvalidCfl(nu));
                }
                omega1_h_from_cfl(medium, self.w1()?, nu)
            }
            None => return Err(DispersionError::InvalidArgument("a spatial scheme needs a mesh".into())),
        };
        if oh > 0.0 && oh.is_finite() {
            Ok(oh)
        } else {
            Err(DispersionError::InvalidArgument(format!("omega1_h must be positive, got {oh}")))
        }
    }

    /// CFL number `ν`, derived from `ω₁h` when needed.
    pub fn nu(&self, medium: &LorentzMedium) -> Result<f64> {
        match self.mesh {
            Some(Mesh::Cfl(nu)) => Ok(nu),
            _ => Ok(self.w1()? / (medium.eps_inf().sqrt() * self.omega1_h(medium)?)),
        }
    }

    /// Full mode set of a spatially discrete scheme.
    pub fn modes(&self, medium: &LorentzMedium, w_hat: f64) -> Result<ModeSet> {
        match (self.spatial, self.temporal) {
            (Spatial::Continuous, _) => Err(DispersionError::InvalidArgument("continuous space has no mode set".into())),
            (Spatial::Fd { order }, None) => solve_semidiscrete_modes(order, medium, w_hat, self.omega1_h(medium)?),
            (Spatial::Fd { order }, Some(t)) => solve_fullydiscrete_modes(t, order, medium, w_hat, self.w1()?, self.nu(medium)?),
            (Spatial::Dg { degree, flux }, t) => {
                let scheme = match t {
                    None => SymbolScheme::Semi,
                    Some(TemporalScheme::LeapFrog) => SymbolScheme::LeapFrog { w1: self.w1()? },
                    Some(TemporalScheme::Trapezoidal) => SymbolScheme::Trapezoidal { w1: self.w1()? },
                };
                solve_dg_modes(degree, flux.params(medium.eps_inf()), medium, w_hat, self.omega1_h(medium)?, scheme)
            }
        }
    }

    /// Physical `+x` wavenumber `k` at `w_hat`.
    pub fn physical_wavenumber(&self, medium: &LorentzMedium, w_hat: f64) -> Result<Complex64> {
        match (self.spatial, self.temporal) {
            (Spatial::Continuous, None) => Ok(medium.exact_wavenumber_at(w_hat)?.value),
            (Spatial::Continuous, Some(t)) => Ok(semidiscrete_wavenumber(t, medium, w_hat, self.w1()?)?.value),
            _ => Ok(self.modes(medium, w_hat)?.physical_wavenumber(medium.omega_1())),
        }
    }

    /// Same spec with `W₁` and the mesh scaled by `sigma`.
    pub fn refined(&self, sigma: f64) -> Self {
        SchemeSpec {
            w1: self.w1.map(|w| w * sigma),
            mesh: self.mesh.map(|m| match m {
                Mesh::Omega1H(oh) => Mesh::Omega1H(oh * sigma),
                Mesh::Cfl(nu) => Mesh::Cfl(nu),
            }),
            ..*self
        }
    }
}

impl fmt::Display for SchemeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = self.temporal.map_or("semi", |t| t.short_name());
        match self.spatial {
            Spatial::Continuous if self.temporal.is_none() => f.write_str("exact"),
            Spatial::Continuous => write!(f, "{t}"),
            Spatial::Fd { order } => write!(f, "{t}-fd{}", 2 * order),
            Spatial::Dg { degree, flux } => write!(f, "{t}-dg{degree}-{flux}"),
        }
    }
}
