//! Direct time stepping of the fully discrete schemes on periodic grids.
//!
//! Fields are complex so plane waves `e^{i(kx − ωt)}` can be fed through a
//! step unchanged; real data stays real for the FD steppers.

mod dg;
mod fd;
mod phase;
mod residual;
mod stability;

pub use dg::{step_dg_lf, DgStepper};
pub use fd::{step_fd, FdStepper};
pub use phase::{measure_phase_error, PhaseMeasurement};
pub use residual::{dg_lf_kernel_residual, dg_lf_staggered_residual, fd_kernel_residual, KernelCase};
pub use stability::{growth_factor, ProbeScheme, BLOW_UP};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{DispersionError, Result};
use crate::medium::LorentzMedium;

/// Uniform periodic grid of `cells` cells of width `h`. FD keeps `E, D, P, J`
/// at `jh` and `H` at `(j + ½)h`; DG keeps `p + 1` nodal values per cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeriodicGrid {
    cells: usize,
    h: f64,
}

impl PeriodicGrid {
    pub const MIN_CELLS: usize = 8;

    pub fn new(cells: usize, h: f64) -> Result<Self> {
        if cells < Self::MIN_CELLS {
            return Err(DispersionError::InvalidArgument(format!("need at least {} cells, got {cells}", Self::MIN_CELLS)));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(DispersionError::InvalidArgument(format!("cell size must be positive, got {h}")));
        }
        Ok(PeriodicGrid { cells, h })
    }

    /// Grid of `cells` cells close to spacing `h_target` on which `k`
    /// completes a whole number of wavelengths.
    pub fn commensurate(cells: usize, k: f64, h_target: f64) -> Result<(Self, usize)> {
        if !(k > 0.0) {
            return Err(DispersionError::InvalidArgument("wavenumber must be positive".into()));
        }
        let tau = std::f64::consts::TAU;
        let waves = ((cells as f64 * k * h_target / tau).round() as usize).max(1);
        Ok((Self::new(cells, tau * waves as f64 / (cells as f64 * k))?, waves))
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn length(&self) -> f64 {
        self.cells as f64 * self.h
    }
}

/// All field unknowns at integer time level `step`. Layout is node-major
/// for FD and cell-major (`p + 1` values per cell) for DG.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldState {
    pub h: Vec<Complex64>,
    pub e: Vec<Complex64>,
    pub d: Vec<Complex64>,
    pub p: Vec<Complex64>,
    pub j: Vec<Complex64>,
    pub step: usize,
}

impl FieldState {
    pub fn zeros(len: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); len];
        FieldState { h: z.clone(), e: z.clone(), d: z.clone(), p: z.clone(), j: z, step: 0 }
    }

    /// State with `D = ε_∞E + P` filled in.
    pub fn from_fields(h: Vec<Complex64>, e: Vec<Complex64>, p: Vec<Complex64>, j: Vec<Complex64>, eps_inf: f64) -> Result<Self> {
        let n = e.len();
        if h.len() != n || p.len() != n || j.len() != n {
            return Err(DispersionError::InvalidArgument("field arrays differ in length".into()));
        }
        let d = e.iter().zip(&p).map(|(e, p)| e * eps_inf + p).collect();
        Ok(FieldState { h, e, d, p, j, step: 0 })
    }

    pub fn len(&self) -> usize {
        self.e.len()
    }

    pub fn is_empty(&self) -> bool {
        self.e.is_empty()
    }

    pub fn fields(&self) -> [&[Complex64]; 5] {
        [&self.h, &self.e, &self.d, &self.p, &self.j]
    }

    /// `max |D − ε_∞E − P|`.
    pub fn constitutive_residual(&self, eps_inf: f64) -> f64 {
        self.d.iter().zip(&self.e).zip(&self.p).map(|((d, e), p)| (d - e * eps_inf - p).norm()).fold(0.0, f64::max)
    }

    /// Sum of squared magnitudes over every field.
    pub fn norm_sqr(&self) -> f64 {
        self.fields().iter().flat_map(|f| f.iter()).map(|z| z.norm_sqr()).sum()
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if self.fields().iter().all(|f| f.len() == len) {
            Ok(())
        } else {
            Err(DispersionError::InvalidArgument(format!("state arrays must have length {len}")))
        }
    }
}

/// Trapezoidal update of the polarization ODE with `E^{n+1}` left free:
/// `P^{n+1} = p_known + coupling·E^{n+1}` and `J^{n+1}` likewise.
#[derive(Debug, Clone, Copy)]
struct PolarizationStep {
    half: f64,
    w1sq: f64,
    wp2: f64,
    damp: f64,
    den: f64,
}

impl PolarizationStep {
    fn new(medium: &LorentzMedium, dt: f64) -> Self {
        let half = 0.5 * dt;
        let w1 = medium.omega_1();
        let damp = medium.gamma() * dt;
        PolarizationStep { half, w1sq: w1 * w1, wp2: medium.omega_p_sq(), damp, den: 1.0 + damp + half * half * w1 * w1 }
    }

    /// Coefficient of `E^{n+1}` in `P^{n+1}`.
    fn coupling(&self) -> f64 {
        self.half * self.half * self.wp2 / self.den
    }

    /// `J^{n+1}` given the old values and `E^{n+1}`.
    fn j_next(&self, p: Complex64, j: Complex64, e: Complex64, e_next: Complex64) -> Complex64 {
        let a = self.half;
        ((1.0 - self.damp - a * a * self.w1sq) * j - 2.0 * a * self.w1sq * p + a * self.wp2 * (e + e_next)) / self.den
    }

    /// Part of `P^{n+1}` independent of `E^{n+1}`.
    fn p_known(&self, p: Complex64, j: Complex64, e: Complex64) -> Complex64 {
        p + self.half * j + self.half * self.j_next(p, j, e, Complex64::new(0.0, 0.0))
    }

    fn p_next(&self, p: Complex64, j: Complex64, e: Complex64, e_next: Complex64) -> Complex64 {
        p + self.half * (j + self.j_next(p, j, e, e_next))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(PeriodicGrid::new(7, 0.1).is_err());
        assert!(PeriodicGrid::new(8, 0.0).is_err());
        let (g, waves) = PeriodicGrid::commensurate(256, 1.2, 0.05).unwrap();
        let phase = 1.2 * g.length() / std::f64::consts::TAU;
        assert!((phase - waves as f64).abs() < 1e-12);
        assert!((g.h() - 0.05).abs() < 0.05 * 0.2);
    }

    #[test]
    fn polarization_step_matches_equations() {
        let m = LorentzMedium::new(5.25, 2.25, 0.3, 1.7).unwrap();
        let dt = 0.07;
        let s = PolarizationStep::new(&m, dt);
        let c = |re, im| Complex64::new(re, im);
        let (p, j, e, e1) = (c(0.3, -0.2), c(1.1, 0.4), c(-0.7, 0.2), c(0.5, 0.9));
        let j1 = s.j_next(p, j, e, e1);
        let p1 = s.p_next(p, j, e, e1);
        assert!((p1 - s.p_known(p, j, e) - e1 * s.coupling()).norm() < 1e-15);
        assert!(((p1 - p) / dt - (j + j1) * 0.5).norm() < 1e-13);
        let g = m.gamma();
        let w1 = m.omega_1();
        let rhs = -(j + j1) * g - (p + p1) * (0.5 * w1 * w1) + (e + e1) * (0.5 * m.omega_p_sq());
        assert!(((j1 - j) / dt - rhs).norm() < 1e-13);
    }
}
