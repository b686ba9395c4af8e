//! Single-pole Lorentz dielectric in scaled units.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{DispersionError, Result};

/// Half-width of the excluded neighbourhood around the lossless resonance.
pub const POLE_GUARD: f64 = 1e-14;

/// Scaled Lorentz material parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMedium")]
pub struct LorentzMedium {
    eps_s: f64,
    eps_inf: f64,
    gamma_hat: f64,
    omega_1: f64,
}

#[derive(Deserialize)]
struct RawMedium {
    eps_s: f64,
    eps_inf: f64,
    gamma_hat: f64,
    #[serde(default = "one")]
    omega_1: f64,
}

fn one() -> f64 {
    1.0
}

impl TryFrom<RawMedium> for LorentzMedium {
    type Error = DispersionError;
    fn try_from(r: RawMedium) -> Result<Self> {
        LorentzMedium::new(r.eps_s, r.eps_inf, r.gamma_hat, r.omega_1)
    }
}

impl Default for LorentzMedium {
    /// The low-loss reference medium used throughout the figures.
    fn default() -> Self {
        Self { eps_s: 5.25, eps_inf: 2.25, gamma_hat: 0.01, omega_1: 1.0 }
    }
}

/// Sign of the square root picked in `k = ±ω√ε`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Plus,
    Minus,
}

/// A complex wavenumber together with the branch it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexWavenumber {
    pub value: Complex64,
    pub branch: Branch,
}

impl ComplexWavenumber {
    pub fn plus(value: Complex64) -> Self {
        Self { value, branch: Branch::Plus }
    }

    pub fn negated(self) -> Self {
        let branch = match self.branch {
            Branch::Plus => Branch::Minus,
            Branch::Minus => Branch::Plus,
        };
        Self { value: -self.value, branch }
    }
}

/// Square root with Re ≥ 0, and Im ≥ 0 when Re vanishes.
pub fn principal_sqrt(z: Complex64) -> Complex64 {
    let r = z.sqrt();
    if r.re < 0.0 || (r.re == 0.0 && r.im < 0.0) {
        -r
    } else {
        r
    }
}

impl LorentzMedium {
    pub fn new(eps_s: f64, eps_inf: f64, gamma_hat: f64, omega_1: f64) -> Result<Self> {
        let bad = |m: &str| Err(DispersionError::InvalidMedium(m.to_string()));
        if !(eps_s.is_finite() && eps_inf.is_finite() && gamma_hat.is_finite() && omega_1.is_finite()) {
            return bad("parameters must be finite");
        }
        if eps_inf <= 0.0 || eps_s <= 0.0 {
            return bad("permittivities must be positive");
        }
        if eps_s <= eps_inf {
            return bad("eps_s must exceed eps_inf");
        }
        if gamma_hat < 0.0 {
            return bad("gamma_hat must be nonnegative");
        }
        if omega_1 <= 0.0 {
            return bad("omega_1 must be positive");
        }
        Ok(Self { eps_s, eps_inf, gamma_hat, omega_1 })
    }

    /// Dispersionless limit `eps_s = eps_inf`, `gamma_hat = 0`; only meant for
    /// free-space stability runs.
    pub fn dispersionless(eps_inf: f64, omega_1: f64) -> Result<Self> {
        if !(eps_inf > 0.0 && omega_1 > 0.0) {
            return Err(DispersionError::InvalidMedium("eps_inf and omega_1 must be positive".into()));
        }
        Ok(Self { eps_s: eps_inf, eps_inf, gamma_hat: 0.0, omega_1 })
    }

    pub fn with_gamma_hat(self, gamma_hat: f64) -> Result<Self> {
        Self::new(self.eps_s, self.eps_inf, gamma_hat, self.omega_1)
    }

    pub fn eps_s(&self) -> f64 {
        self.eps_s
    }
    pub fn eps_inf(&self) -> f64 {
        self.eps_inf
    }
    pub fn eps_d(&self) -> f64 {
        self.eps_s - self.eps_inf
    }
    pub fn gamma_hat(&self) -> f64 {
        self.gamma_hat
    }
    pub fn omega_1(&self) -> f64 {
        self.omega_1
    }
    /// Dimensional damping rate `γ = γ̂ ω₁`.
    pub fn gamma(&self) -> f64 {
        self.gamma_hat * self.omega_1
    }
    /// Plasma frequency squared, `ω_p² = ε_d ω₁²`.
    pub fn omega_p_sq(&self) -> f64 {
        self.eps_d() * self.omega_1 * self.omega_1
    }

    fn resonance_denominator(&self, w_hat: f64) -> Result<Complex64> {
        if w_hat < 0.0 {
            return Err(DispersionError::NegativeFrequency(w_hat));
        }
        if self.gamma_hat == 0.0 && self.eps_d() > 0.0 && (w_hat - 1.0).abs() < POLE_GUARD {
            return Err(DispersionError::PoleAtResonance { w_hat });
        }
        Ok(Complex64::new(w_hat * w_hat - 1.0, 2.0 * self.gamma_hat * w_hat))
    }

    /// `ε(ŵ) = ε_∞ − ε_d / (ŵ² + 2iγ̂ŵ − 1)`.
    pub fn relative_permittivity(&self, w_hat: f64) -> Result<Complex64> {
        let den = self.resonance_denominator(w_hat)?;
        if self.eps_d() == 0.0 {
            return Ok(Complex64::new(self.eps_inf, 0.0));
        }
        Ok(self.eps_inf - self.eps_d() / den)
    }

    /// `δ(ŵ) = ε_d ŵ(ŵ + iγ̂) / (ŵ² + 2iγ̂ŵ − 1)²`, the dispersive part of the
    /// leading error terms.
    pub fn delta(&self, w_hat: f64) -> Result<Complex64> {
        let den = self.resonance_denominator(w_hat)?;
        if self.eps_d() == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        Ok(self.eps_d() * w_hat * Complex64::new(w_hat, self.gamma_hat) / (den * den))
    }

    /// Exact wavenumber at angular frequency `omega`.
    pub fn exact_wavenumber(&self, omega: f64) -> Result<ComplexWavenumber> {
        self.exact_wavenumber_at(omega / self.omega_1)
    }

    /// Exact wavenumber at relative frequency `w_hat`.
    pub fn exact_wavenumber_at(&self, w_hat: f64) -> Result<ComplexWavenumber> {
        let eps = self.relative_permittivity(w_hat)?;
        Ok(ComplexWavenumber::plus(w_hat * self.omega_1 * principal_sqrt(eps)))
    }

    /// `[1, √(ε_s/ε_∞)]` in ŵ units.
    pub fn absorption_band(&self) -> (f64, f64) {
        (1.0, (self.eps_s / self.eps_inf).sqrt())
    }

    /// True when `w_hat` lies strictly inside the nominal absorption band.
    pub fn in_band(&self, w_hat: f64) -> bool {
        let (lo, hi) = self.absorption_band();
        w_hat > lo && w_hat < hi
    }
}
