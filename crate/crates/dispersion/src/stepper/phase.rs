//! End-to-end check: run a single discrete eigenmode for many periods and
//! read its frequency off the time series.
//!
//! On a periodic grid the wavenumber of the data never changes, so the
//! measurable quantity is the frequency the scheme assigns to it. The
//! relative phase error then compares the grid wavenumber with the exact
//! wavenumber at that measured frequency.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::{DgStepper, FdStepper, FieldState, PeriodicGrid};
use crate::dg::{assemble_symbol, SymbolScheme};
use crate::error::{DispersionError, Result};
use crate::medium::LorentzMedium;
use crate::poly::eigenvalues;
use crate::scheme::{Mesh, SchemeSpec, Spatial};
use crate::temporal::TemporalScheme;

/// Minimum simulated time, in periods of the requested frequency.
pub const MIN_PERIODS: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseMeasurement {
    /// Grid wavenumber of the initial data.
    pub k: f64,
    pub waves: usize,
    pub w_hat_measured: f64,
    /// `Im ω/ω₁` of the run; zero up to round-off without dissipation.
    pub decay_rate: f64,
    pub periods: f64,
    /// `|k − k_ex(ŵ_m)|/|k_ex(ŵ_m)|`.
    pub psi_measured: f64,
    /// Dispersion-solver prediction at `ŵ_m`. For dissipative schemes the
    /// relation is solved for the complex frequency of the grid wavenumber.
    pub psi_analytic: f64,
}

enum Runner {
    Fd(FdStepper),
    Dg(DgStepper),
}

impl Runner {
    fn block(&self) -> usize {
        match self {
            Runner::Fd(_) => 1,
            Runner::Dg(s) => s.degree() + 1,
        }
    }

    fn step(&self, s: &mut FieldState) -> Result<()> {
        match self {
            Runner::Fd(st) => st.step(s),
            Runner::Dg(st) => st.step(s),
        }
    }
}

/// `(H, E, P, J)` per node of one cell, flattened field-major.
fn state_from_vector(v: &[Complex64], cells: usize, b: usize, theta: f64, eps_inf: f64) -> Result<FieldState> {
    let field = |f: usize| -> Vec<Complex64> {
        (0..cells).flat_map(|c| (0..b).map(move |r| v[f * b + r] * Complex64::from_polar(1.0, theta * c as f64))).collect()
    };
    FieldState::from_fields(field(0), field(1), field(2), field(3), eps_inf)
}

/// One-step map of the scheme restricted to Fourier mode `theta`, built by
/// stepping each basis plane wave.
fn mode_transfer(runner: &Runner, cells: usize, theta: f64, eps_inf: f64) -> Result<DMatrix<Complex64>> {
    let b = runner.block();
    let d = 4 * b;
    let mut g = DMatrix::zeros(d, d);
    for col in 0..d {
        let mut v = vec![Complex64::new(0.0, 0.0); d];
        v[col] = Complex64::new(1.0, 0.0);
        let mut s = state_from_vector(&v, cells, b, theta, eps_inf)?;
        runner.step(&mut s)?;
        for (f, field) in [&s.h, &s.e, &s.p, &s.j].into_iter().enumerate() {
            for r in 0..b {
                g[(f * b + r, col)] = field[r];
            }
        }
    }
    Ok(g)
}

fn null_vector(m: DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    let svd = m.svd(false, true);
    let vt = svd.v_t.ok_or(DispersionError::EigenFailed)?;
    let (i, _) = svd.singular_values.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).ok_or(DispersionError::EigenFailed)?;
    Ok(vt.row(i).iter().map(|z| z.conj()).collect())
}

fn least_squares_slope(y: &[f64]) -> f64 {
    let n = y.len() as f64;
    let mx = (n - 1.0) / 2.0;
    let my = y.iter().sum::<f64>() / n;
    let (num, den) = y.iter().enumerate().fold((0.0, 0.0), |(a, b), (i, v)| {
        let dx = i as f64 - mx;
        (a + dx * (v - my), b + dx * dx)
    });
    num / den
}

/// Run the physical eigenmode with the exact wavenumber at `w_hat` for
/// `n_steps` steps of the scheme `spec` on `grid`, and compare the measured
/// phase error with the analytic one. The time step is `ν h √ε_∞` with `ν`
/// taken from `spec`. Lossless media only.
pub fn measure_phase_error(spec: &SchemeSpec, medium: &LorentzMedium, w_hat: f64, grid: PeriodicGrid, n_steps: usize) -> Result<PhaseMeasurement> {
    if medium.gamma_hat() != 0.0 {
        return Err(DispersionError::InvalidArgument("phase measurement needs a lossless medium".into()));
    }
    let k = medium.exact_wavenumber_at(w_hat)?.value;
    if k.im != 0.0 || k.re <= 0.0 {
        return Err(DispersionError::InvalidArgument(format!("no propagating wave at w_hat = {w_hat}")));
    }
    let k = k.re;
    let cycles = k * grid.length() / TAU;
    let waves = cycles.round() as usize;
    if waves == 0 || (cycles - waves as f64).abs() > 1e-9 {
        return Err(DispersionError::InvalidArgument("grid is not commensurate with the wavelength".into()));
    }
    let nu = spec.nu(medium)?;
    let dt = nu * grid.h() * medium.eps_inf().sqrt();
    let w1 = medium.omega_1();
    let periods = n_steps as f64 * dt * w_hat * w1 / TAU;
    if periods < MIN_PERIODS {
        return Err(DispersionError::FitFailed(format!("run covers {periods:.2} periods, need {MIN_PERIODS}")));
    }
    let runner = match (spec.temporal, spec.spatial) {
        (Some(t), Spatial::Fd { order }) => Runner::Fd(FdStepper::new(t, order, *medium, grid, dt)?),
        (Some(TemporalScheme::LeapFrog), Spatial::Dg { degree, flux }) => Runner::Dg(DgStepper::new(degree, flux, *medium, grid, dt)?),
        _ => return Err(DispersionError::InvalidArgument(format!("no time-domain stepper for {spec}"))),
    };
    let cells = grid.cells();
    let theta = TAU * waves as f64 / cells as f64;
    let eps_inf = medium.eps_inf();
    let g = mode_transfer(&runner, cells, theta, eps_inf)?;
    let target = Complex64::from_polar(1.0, -w_hat * w1 * dt);
    let lambda = eigenvalues(&g)
        .ok_or(DispersionError::EigenFailed)?
        .into_iter()
        .min_by(|a, b| (a - target).norm().total_cmp(&(b - target).norm()))
        .ok_or(DispersionError::EigenFailed)?;
    let shifted = &g - DMatrix::<Complex64>::identity(g.nrows(), g.ncols()) * lambda;
    let mut state = state_from_vector(&null_vector(shifted)?, cells, runner.block(), theta, eps_inf)?;

    let b = runner.block();
    let project = |s: &FieldState| -> Complex64 {
        (0..cells).map(|c| s.e[c * b] * Complex64::from_polar(1.0, -theta * c as f64)).sum::<Complex64>() / cells as f64
    };
    let a0 = project(&state);
    if a0.norm() == 0.0 {
        return Err(DispersionError::FitFailed("mode has no electric component".into()));
    }
    let mut phase = Vec::with_capacity(n_steps + 1);
    let mut log_amp = Vec::with_capacity(n_steps + 1);
    phase.push(a0.arg());
    log_amp.push(a0.norm().ln());
    let mut prev = a0;
    for _ in 0..n_steps {
        runner.step(&mut state)?;
        let a = project(&state);
        if !(a.norm() > 1e-12 * a0.norm()) || !a.norm().is_finite() {
            return Err(DispersionError::FitFailed("mode amplitude collapsed".into()));
        }
        let mut d = (a / prev).arg();
        if d > PI {
            d -= TAU;
        }
        phase.push(phase.last().copied().unwrap_or(0.0) + d);
        log_amp.push(a.norm().ln());
        prev = a;
    }
    let omega = Complex64::new(-least_squares_slope(&phase), least_squares_slope(&log_amp)) / dt;
    let w_hat_m = omega.re / w1;
    let k_ex = medium.exact_wavenumber_at(w_hat_m)?.value;
    let psi = |k_ex: Complex64| (Complex64::new(k, 0.0) - k_ex).norm() / k_ex.norm();
    let psi_analytic = match spec.spatial {
        // dissipative fluxes: solve the relation for the complex frequency
        // of the run's real wavenumber
        Spatial::Dg { degree, flux } if flux.params(medium.eps_inf()).has_penalty() => {
            let scheme = SymbolScheme::LeapFrog { w1: w1 * dt };
            let sym = assemble_symbol(degree, flux.params(medium.eps_inf()), medium, w_hat_m, w1 * grid.h(), scheme)?;
            let omega_a = sym.frequency_root(Complex64::from_polar(1.0, k * grid.h()), omega)?;
            psi(medium.exact_wavenumber_at(omega_a.re / w1)?.value)
        }
        _ => {
            let analytic_spec = SchemeSpec { w1: Some(w1 * dt), mesh: Some(Mesh::Omega1H(w1 * grid.h())), ..*spec };
            let k_num = analytic_spec.physical_wavenumber(medium, w_hat_m)?;
            (k_num - k_ex).norm() / k_ex.norm()
        }
    };
    Ok(PhaseMeasurement { k, waves, w_hat_measured: w_hat_m, decay_rate: omega.im / w1, periods, psi_measured: psi(k_ex), psi_analytic })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fd::cfl_max_fd;

    fn run(order: usize, cells: usize, h: f64) -> PhaseMeasurement {
        let m = LorentzMedium::new(5.25, 2.25, 0.0, 1.0).unwrap();
        let k = m.exact_wavenumber_at(0.5).unwrap().value.re;
        let (grid, _) = PeriodicGrid::commensurate(cells, k, h).unwrap();
        let nu = 0.7 * cfl_max_fd(order).unwrap();
        let spec = SchemeSpec::fully_discrete(TemporalScheme::LeapFrog, Spatial::Fd { order }, 0.1, nu);
        let dt = nu * grid.h() * 1.5;
        let steps = (12.0 * TAU / (0.5 * dt)).ceil() as usize;
        measure_phase_error(&spec, &m, 0.5, grid, steps).unwrap()
    }

    #[test]
    fn measured_matches_analytic() {
        let r = run(1, 256, 0.1);
        assert!(r.periods >= 10.0);
        assert!((r.psi_measured - r.psi_analytic).abs() < 0.01 * r.psi_analytic, "{r:?}");
        let r4 = run(2, 256, 0.1);
        assert!(r4.psi_measured < 0.5 * r.psi_measured);
    }

    #[test]
    fn temporal_error_dominates_refinement() {
        let coarse = run(2, 128, 0.1);
        let fine = run(2, 256, 0.05);
        let ratio = coarse.psi_measured / fine.psi_measured;
        assert!((ratio - 4.0).abs() < 0.4, "{ratio}");
    }

    #[test]
    fn rejects_bad_setups() {
        let m = LorentzMedium::new(5.25, 2.25, 0.0, 1.0).unwrap();
        let spec = SchemeSpec::fully_discrete(TemporalScheme::LeapFrog, Spatial::Fd { order: 1 }, 0.1, 0.5);
        let grid = PeriodicGrid::new(64, 0.1).unwrap();
        assert!(measure_phase_error(&spec, &m, 0.5, grid, 100).is_err());
        let k = m.exact_wavenumber_at(0.5).unwrap().value.re;
        let (grid, _) = PeriodicGrid::commensurate(64, k, 0.1).unwrap();
        assert!(matches!(measure_phase_error(&spec, &m, 0.5, grid, 10), Err(DispersionError::FitFailed(_))));
        assert!(measure_phase_error(&spec, &LorentzMedium::default(), 0.5, grid, 10).is_err());
    }
}
