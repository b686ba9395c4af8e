//! Dispersion of the time-discrete (space-continuous) leap-frog and
//! trapezoidal schemes.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{DispersionError, Result};
use crate::medium::{principal_sqrt, ComplexWavenumber, LorentzMedium, POLE_GUARD};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemporalScheme {
    LeapFrog,
    Trapezoidal,
}

impl TemporalScheme {
    pub const ALL: [TemporalScheme; 2] = [TemporalScheme::LeapFrog, TemporalScheme::Trapezoidal];

    pub fn short_name(self) -> &'static str {
        match self {
            TemporalScheme::LeapFrog => "lf",
            TemporalScheme::Trapezoidal => "tp",
        }
    }
}

impl fmt::Display for TemporalScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for TemporalScheme {
    type Err = DispersionError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lf" | "leapfrog" | "leap-frog" => Ok(TemporalScheme::LeapFrog),
            "tp" | "trapezoidal" => Ok(TemporalScheme::Trapezoidal),
            other => Err(DispersionError::InvalidArgument(format!("unknown temporal scheme `{other}`"))),
        }
    }
}

/// `sin(W/2)/(W/2)`.
pub fn s_omega(w: f64) -> f64 {
    let x = 0.5 * w;
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// `tan(W/2)/(W/2)`; errors near the poles at odd multiples of π.
pub fn r_omega(w: f64) -> Result<f64> {
    let odd = ((w / PI - 1.0) / 2.0).round() * 2.0 + 1.0;
    if (w - odd * PI).abs() < 1e-12 {
        return Err(DispersionError::TanPole(w));
    }
    let x = 0.5 * w;
    if x.abs() < 1e-4 {
        let x2 = x * x;
        Ok(1.0 + x2 / 3.0 + 2.0 * x2 * x2 / 15.0)
    } else {
        Ok(x.tan() / x)
    }
}

/// Medium seen by a time-discrete scheme: the exact permittivity law
/// evaluated at shifted frequency and scaled permittivities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModifiedParams {
    pub w_hat_mod: f64,
    pub eps_s_mod: f64,
    pub eps_inf_mod: f64,
    pub gamma_hat_mod: f64,
}

impl ModifiedParams {
    pub fn permittivity(&self) -> Result<Complex64> {
        let w = self.w_hat_mod;
        let eps_d = self.eps_s_mod - self.eps_inf_mod;
        if eps_d == 0.0 {
            return Ok(Complex64::new(self.eps_inf_mod, 0.0));
        }
        if self.gamma_hat_mod == 0.0 && (w - 1.0).abs() < POLE_GUARD {
            return Err(DispersionError::PoleAtResonance { w_hat: w });
        }
        let den = Complex64::new(w * w - 1.0, 2.0 * self.gamma_hat_mod * w);
        Ok(self.eps_inf_mod - eps_d / den)
    }
}

/// Modified parameters for `scheme` at relative frequency `w_hat` with
/// `W1 = ω₁Δt`.
pub fn modified_params(scheme: TemporalScheme, medium: &LorentzMedium, w_hat: f64, w1: f64) -> Result<ModifiedParams> {
    if w_hat < 0.0 {
        return Err(DispersionError::NegativeFrequency(w_hat));
    }
    let w = w_hat * w1;
    let r = r_omega(w)?;
    let scale = match scheme {
        TemporalScheme::LeapFrog => s_omega(w),
        TemporalScheme::Trapezoidal => r,
    };
    let s2 = scale * scale;
    Ok(ModifiedParams {
        w_hat_mod: w_hat * r,
        eps_s_mod: medium.eps_s() * s2,
        eps_inf_mod: medium.eps_inf() * s2,
        gamma_hat_mod: medium.gamma_hat(),
    })
}

/// Wavenumber of the time-discrete scheme: `k = ω √ε(ŵ_mod; p_mod)`.
pub fn semidiscrete_wavenumber(scheme: TemporalScheme, medium: &LorentzMedium, w_hat: f64, w1: f64) -> Result<ComplexWavenumber> {
    let eps = modified_params(scheme, medium, w_hat, w1)?.permittivity()?;
    Ok(ComplexWavenumber::plus(w_hat * medium.omega_1() * principal_sqrt(eps)))
}

/// `|k − k_ex| / |k_ex|`.
pub fn relative_error(k: Complex64, k_exact: Complex64) -> Result<f64> {
    let n = k_exact.norm();
    if n < 1e-14 {
        return Err(DispersionError::ZeroExactWavenumber);
    }
    Ok((k - k_exact).norm() / n)
}

pub fn relative_phase_error(scheme: TemporalScheme, medium: &LorentzMedium, w_hat: f64, w1: f64) -> Result<f64> {
    let k = semidiscrete_wavenumber(scheme, medium, w_hat, w1)?.value;
    relative_error(k, medium.exact_wavenumber_at(w_hat)?.value)
}

/// Coefficient of `W²` in `k/k_ex − 1`.
pub fn leading_error_coefficient(scheme: TemporalScheme, medium: &LorentzMedium, w_hat: f64) -> Result<Complex64> {
    let ratio = medium.delta(w_hat)? / medium.relative_permittivity(w_hat)?;
    Ok(match scheme {
        TemporalScheme::LeapFrog => (ratio - 0.5) / 12.0,
        TemporalScheme::Trapezoidal => (ratio + 1.0) / 12.0,
    })
}
