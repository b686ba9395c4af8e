//! Long-run growth of broadband data, used to bracket stability limits.

use num_complex::Complex64;

use super::{DgStepper, FdStepper, FieldState, PeriodicGrid};
use crate::error::{DispersionError, Result};
use crate::medium::LorentzMedium;
use crate::temporal::TemporalScheme;

/// Growth beyond which a run is declared blown up and stopped early.
pub const BLOW_UP: f64 = 1e12;

/// Which stepper to probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProbeScheme {
    Fd { scheme: TemporalScheme, order: usize },
    DgLeapFrog { degree: usize, flux: crate::dg::FluxKind },
}

/// Deterministic data with energy in every Fourier mode.
fn broadband(n: usize, seed: f64) -> Vec<Complex64> {
    (0..n)
        .map(|i| {
            let x = i as f64;
            Complex64::new((0.37 * x * x + seed * x).sin(), (0.11 * x * x + 0.5 * seed).cos() * 0.5)
        })
        .collect()
}

/// `‖u_n‖/‖u_0‖` after `steps` steps at CFL number `nu` (stability checks
/// are bypassed). Returns as soon as the ratio passes [`BLOW_UP`].
pub fn growth_factor(probe: ProbeScheme, medium: &LorentzMedium, cells: usize, nu: f64, steps: usize) -> Result<f64> {
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(DispersionError::InvalidArgument(format!("nu must be positive, got {nu}")));
    }
    let grid = PeriodicGrid::new(cells, 1.0 / cells as f64)?;
    let dt = nu * grid.h() * medium.eps_inf().sqrt();
    let (step, len): (Box<dyn Fn(&mut FieldState) -> Result<()>>, usize) = match probe {
        ProbeScheme::Fd { scheme, order } => {
            let s = FdStepper::unchecked(scheme, order, *medium, grid, dt)?;
            (Box::new(move |st| s.step(st)), cells)
        }
        ProbeScheme::DgLeapFrog { degree, flux } => {
            let s = DgStepper::unchecked(degree, flux, *medium, grid, dt)?;
            let len = s.len();
            (Box::new(move |st| s.step(st)), len)
        }
    };
    let zero = vec![Complex64::new(0.0, 0.0); len];
    let mut state = FieldState::from_fields(broadband(len, 0.3), broadband(len, 1.7), zero.clone(), zero, medium.eps_inf())?;
    let n0 = state.norm_sqr().sqrt();
    for _ in 0..steps {
        step(&mut state)?;
        let g = state.norm_sqr().sqrt() / n0;
        if !(g < BLOW_UP) {
            return Ok(g.min(f64::MAX));
        }
    }
    Ok(state.norm_sqr().sqrt() / n0)
}
