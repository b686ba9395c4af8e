//! Plug a solved discrete plane wave into the actual update and measure how
//! far one step is from multiplication by `e^{−iωΔt}`.

use std::f64::consts::TAU;
use std::ops::Range;

use num_complex::Complex64;
use serde::Serialize;

use super::{DgStepper, FdStepper, FieldState, PeriodicGrid};
use crate::dg::{assemble_symbol, solve_dg_modes, FluxKind, SymbolScheme};
use crate::error::{DispersionError, Result};
use crate::fd::{fd_symbol, omega1_h_from_cfl, solve_fullydiscrete_modes};
use crate::medium::LorentzMedium;
use crate::temporal::{semidiscrete_wavenumber, TemporalScheme};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A fully discrete configuration covered by the steppers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum KernelCase {
    /// Leap-frog FD2M at CFL number `nu`. Works for any loss.
    FdLeapFrog { order: usize, nu: f64 },
    /// Trapezoidal FD2M on a periodic grid whose cell size is chosen so the
    /// wave completes `waves` wavelengths. Needs a lossless medium.
    FdTrapezoidal { order: usize, waves: usize },
    /// Leap-frog DG at CFL number `nu`.
    DgLeapFrog { degree: usize, flux: FluxKind, nu: f64 },
}

/// Largest per-field relative defect `|after − z·before|/max|before|` over
/// `range` (wrapped stencils outside it are ignored).
fn step_defect(before: &FieldState, after: &FieldState, z: Complex64, range: Range<usize>) -> f64 {
    before
        .fields()
        .iter()
        .zip(after.fields())
        .filter_map(|(b, a)| {
            let scale = b[range.clone()].iter().map(|v| v.norm()).fold(0.0, f64::max);
            (scale > 1e-300).then(|| range.clone().map(|i| (a[i] - b[i] * z).norm()).fold(0.0, f64::max) / scale)
        })
        .fold(0.0, f64::max)
}

/// Polarization amplitude of a discrete plane wave with unit `E`, from the
/// trapezoidal ODE update with `z = e^{−iW}`.
fn polarization_amplitudes(medium: &LorentzMedium, dt: f64, z: Complex64) -> (Complex64, Complex64) {
    let a = 0.5 * dt;
    let q = (z - 1.0) / (z + 1.0);
    let w1 = medium.omega_1();
    let p = a * medium.omega_p_sq() / (q * q / a + q * (2.0 * medium.gamma()) + a * w1 * w1);
    (p, q * p / a)
}

/// One-step residual of the plane wave `(k, ω)` solved by the dispersion
/// code, pushed through the matching stepper on `cells` cells.
pub fn fd_kernel_residual(case: KernelCase, medium: &LorentzMedium, w_hat: f64, w1: f64, cells: usize) -> Result<f64> {
    let omega = w_hat * medium.omega_1();
    let dt = w1 / medium.omega_1();
    let (scheme, order, k_hat, h, range) = match case {
        KernelCase::FdLeapFrog { order, nu } => {
            let modes = solve_fullydiscrete_modes(TemporalScheme::LeapFrog, order, medium, w_hat, w1, nu)?;
            let h = omega1_h_from_cfl(medium, w1, nu) / medium.omega_1();
            let skip = 3 * order + 1;
            if cells <= 2 * skip + 1 {
                return Err(DispersionError::InvalidArgument(format!("{cells} cells leave no interior for order {}", 2 * order)));
            }
            (TemporalScheme::LeapFrog, order, modes.physical().k_hat, h, skip..cells - skip)
        }
        KernelCase::FdTrapezoidal { order, waves } => {
            if medium.gamma_hat() != 0.0 {
                return Err(DispersionError::InvalidArgument("periodic trapezoidal residual needs a lossless medium".into()));
            }
            let k = semidiscrete_wavenumber(TemporalScheme::Trapezoidal, medium, w_hat, w1)?.value;
            if k.im.abs() > 1e-14 * k.norm() {
                return Err(DispersionError::InvalidArgument("wave is evanescent at this frequency".into()));
            }
            let target = TAU * waves as f64 / cells as f64;
            let h = 2.0 * fd_symbol(order, Complex64::new(target, 0.0))?.re / k.re;
            let nu = dt / (h * medium.eps_inf().sqrt());
            let modes = solve_fullydiscrete_modes(TemporalScheme::Trapezoidal, order, medium, w_hat, w1, nu)?;
            let k_hat = modes.physical().k_hat;
            if (k_hat - target).norm() > 1e-9 {
                return Err(DispersionError::RootSolveFailed(format!("physical mode {k_hat} misses grid wavenumber {target}")));
            }
            (TemporalScheme::Trapezoidal, order, k_hat, h, 0..cells)
        }
        KernelCase::DgLeapFrog { .. } => return dg_lf_kernel_residual(case, medium, w_hat, w1, cells),
    };
    fd_wave_residual(scheme, order, medium, omega, dt, h, k_hat, cells, range)
}

/// Step the FD plane wave with grid wavenumber `k_hat` at frequency `omega`.
#[allow(clippy::too_many_arguments)]
fn fd_wave_residual(
    scheme: TemporalScheme,
    order: usize,
    medium: &LorentzMedium,
    omega: f64,
    dt: f64,
    h: f64,
    k_hat: Complex64,
    cells: usize,
    range: Range<usize>,
) -> Result<f64> {
    let z = Complex64::from_polar(1.0, -omega * dt);
    let grid = PeriodicGrid::new(cells, h)?;
    let stepper = FdStepper::unchecked(scheme, order, *medium, grid, dt)?;
    let sigma = fd_symbol(order, k_hat)? * (2.0 * I / h);
    let h_amp = sigma * (0.5 * dt) * (z + 1.0) / (z - 1.0);
    let (p_amp, j_amp) = polarization_amplitudes(medium, dt, z);
    let wave = |amp: Complex64, shift: f64| (0..cells).map(|i| amp * (I * k_hat * (i as f64 + shift)).exp()).collect::<Vec<_>>();
    let before = FieldState::from_fields(wave(h_amp, 0.5), wave(Complex64::new(1.0, 0.0), 0.0), wave(p_amp, 0.0), wave(j_amp, 0.0), medium.eps_inf())?;
    let mut after = before.clone();
    stepper.step(&mut after)?;
    Ok(step_defect(&before, &after, z, range))
}

/// Discrete plane wave of the leap-frog DG scheme: the state at `n = 0`
/// and `H^{−½}`.
fn dg_plane_wave(stepper: &DgStepper, k_hat: Complex64, omega: f64, w1: f64) -> Result<(FieldState, Vec<Complex64>)> {
    let medium = stepper.medium();
    let (p, cells) = (stepper.degree(), stepper.grid().cells());
    let omega1_h = stepper.grid().h() * medium.omega_1();
    let w_hat = omega / medium.omega_1();
    let flux = stepper.flux().params(medium.eps_inf());
    let symbol = assemble_symbol(p, flux, medium, w_hat, omega1_h, SymbolScheme::LeapFrog { w1 })?;
    let xi = (I * k_hat).exp();
    let (v, _) = symbol.null_vector(xi)?;
    let b = p + 1;
    let e_ref = v.rows(b, b).iter().copied().max_by(|x, y| x.norm().total_cmp(&y.norm())).unwrap_or(Complex64::new(1.0, 0.0));
    let v = v / e_ref;
    let field = |block: usize, factor: Complex64| -> Vec<Complex64> {
        (0..cells).flat_map(|c| (0..b).map(move |r| (c, r))).map(|(c, r)| v[block * b + r] * factor * xi.powu(c as u32)).collect()
    };
    let one = Complex64::new(1.0, 0.0);
    let h_prev = field(0, Complex64::from_polar(1.0, 0.5 * omega * stepper.dt()));
    let e = field(1, one);
    let h0 = stepper.complete_h(&h_prev, &e);
    let state = FieldState::from_fields(h0, e, field(2, one), field(3, one), medium.eps_inf())?;
    Ok((state, h_prev))
}

/// Leap-frog DG plane-wave residual. Fluxes without penalty terms are
/// checked through an actual step on interior cells; with penalty terms the
/// step is globally implicit, so the staggered update equations themselves
/// are evaluated instead.
pub fn dg_lf_kernel_residual(case: KernelCase, medium: &LorentzMedium, w_hat: f64, w1: f64, cells: usize) -> Result<f64> {
    let KernelCase::DgLeapFrog { degree, flux, nu } = case else {
        return fd_kernel_residual(case, medium, w_hat, w1, cells);
    };
    if cells < 12 {
        return Err(DispersionError::InvalidArgument("DG residual needs at least 12 cells".into()));
    }
    let omega = w_hat * medium.omega_1();
    let dt = w1 / medium.omega_1();
    let omega1_h = omega1_h_from_cfl(medium, w1, nu);
    let modes = solve_dg_modes(degree, flux.params(medium.eps_inf()), medium, w_hat, omega1_h, SymbolScheme::LeapFrog { w1 })?;
    let grid = PeriodicGrid::new(cells, omega1_h / medium.omega_1())?;
    let stepper = DgStepper::unchecked(degree, flux, *medium, grid, dt)?;
    let (before, h_prev) = dg_plane_wave(&stepper, modes.physical().k_hat, omega, w1)?;
    let z = Complex64::from_polar(1.0, -omega * dt);
    let b = degree + 1;
    let interior = 4 * b..(cells - 4) * b;
    if !flux.params(medium.eps_inf()).has_penalty() {
        let mut after = before.clone();
        stepper.step(&mut after)?;
        return Ok(step_defect(&before, &after, z, interior));
    }
    let h_next: Vec<Complex64> = h_prev.iter().map(|v| v * z).collect();
    let scaled = |f: &[Complex64]| f.iter().map(|v| v * z).collect::<Vec<_>>();
    let after = FieldState::from_fields(scaled(&before.h), scaled(&before.e), scaled(&before.p), scaled(&before.j), medium.eps_inf())?;
    Ok(dg_lf_staggered_residual(&stepper, &h_prev, &before, &h_next, &after, interior))
}

/// Relative defect of the staggered leap-frog DG equations linking
/// `(H^{n−½}, state^n)` to `(H^{n+½}, state^{n+1})`, over the unknowns in
/// `range`:
///
/// `hM(H^{n+½} − H^{n−½}) + Δt P E^n + Δt R (H^{n+½} + H^{n−½})/2`,
/// `hM(D^{n+1} − D^n) + Δt P̃ H^{n+½} + Δt R̃ (E^n + E^{n+1})/2`,
/// and the trapezoidal polarization updates.
pub fn dg_lf_staggered_residual(
    stepper: &DgStepper,
    h_prev: &[Complex64],
    now: &FieldState,
    h_next: &[Complex64],
    next: &FieldState,
    range: Range<usize>,
) -> f64 {
    let dt = stepper.dt();
    let half = 0.5 * dt;
    let m = stepper.medium();
    let w1sq = m.omega_1() * m.omega_1();
    let sum = |a: &[Complex64], b: &[Complex64]| a.iter().zip(b).map(|(x, y)| x + y).collect::<Vec<_>>();
    let diff = |a: &[Complex64], b: &[Complex64]| a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<_>>();

    let h_terms = [
        stepper.mass_times(&diff(h_next, h_prev)),
        stepper.apply_deriv(&now.e).iter().map(|v| v * dt).collect(),
        stepper.apply_penalty_h(&sum(h_next, h_prev)).iter().map(|v| v * half).collect(),
    ];
    let d_terms = [
        stepper.mass_times(&diff(&next.d, &now.d)),
        stepper.apply_deriv_dual(h_next).iter().map(|v| v * dt).collect(),
        stepper.apply_penalty_e(&sum(&now.e, &next.e)).iter().map(|v| v * half).collect(),
    ];
    let p_terms = [diff(&next.p, &now.p), sum(&now.j, &next.j).iter().map(|v| -v * half).collect()];
    let j_terms = [
        diff(&next.j, &now.j),
        sum(&now.j, &next.j).iter().map(|v| v * (m.gamma() * dt)).collect(),
        sum(&now.p, &next.p).iter().map(|v| v * (w1sq * half)).collect(),
        sum(&now.e, &next.e).iter().map(|v| -v * (m.omega_p_sq() * half)).collect(),
    ];
    let relative = |terms: &[Vec<Complex64>]| -> f64 {
        let scale = range.clone().map(|i| terms.iter().map(|t| t[i].norm()).sum::<f64>()).fold(0.0, f64::max);
        if scale <= 1e-300 {
            return 0.0;
        }
        range.clone().map(|i| terms.iter().map(|t| t[i]).sum::<Complex64>().norm()).fold(0.0, f64::max) / scale
    };
    [relative(&h_terms), relative(&d_terms), relative(&p_terms), relative(&j_terms)].into_iter().fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dg::cfl_max_dg;
    use crate::fd::cfl_max_fd;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fd_leapfrog_waves_are_exact() {
        let m = LorentzMedium::default();
        for order in 1..=4 {
            let nu = 0.7 * cfl_max_fd(order).unwrap();
            let r = fd_kernel_residual(KernelCase::FdLeapFrog { order, nu }, &m, 0.8, 0.1, 64).unwrap();
            assert!(r <= 1e-10, "M={order}: {r}");
        }
    }

    #[test]
    fn fd_trapezoidal_waves_are_exact() {
        let m = LorentzMedium::new(5.25, 2.25, 0.0, 1.0).unwrap();
        for order in 1..=3 {
            let r = fd_kernel_residual(KernelCase::FdTrapezoidal { order, waves: 3 }, &m, 0.6, 0.05, 32).unwrap();
            assert!(r <= 1e-10, "M={order}: {r}");
        }
        assert!(fd_kernel_residual(KernelCase::FdTrapezoidal { order: 1, waves: 3 }, &LorentzMedium::default(), 0.6, 0.05, 32).is_err());
    }

    #[test]
    fn dg_waves_are_exact() {
        let m = LorentzMedium::default();
        for kind in FluxKind::ALL {
            for degree in 0..=2 {
                let nu = 0.7 * cfl_max_dg(degree, kind).unwrap();
                let r = dg_lf_kernel_residual(KernelCase::DgLeapFrog { degree, flux: kind, nu }, &m, 0.8, 0.02, 20).unwrap();
                assert!(r <= 1e-10, "{kind} p={degree}: {r}");
            }
        }
    }

    #[test]
    fn stepper_solves_staggered_equations() {
        let m = LorentzMedium::default();
        let grid = PeriodicGrid::new(10, 0.2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for kind in FluxKind::ALL {
            let s = DgStepper::new(2, kind, m, grid, 0.02).unwrap();
            let mut v = || (0..s.len()).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect::<Vec<_>>();
            let now = FieldState::from_fields(v(), v(), v(), v(), 2.25).unwrap();
            let h_prev = s.back_half_h(&now.h, &now.e).unwrap();
            let h_next = s.half_step_h(&now.h, &now.e).unwrap();
            let mut next = now.clone();
            s.step(&mut next).unwrap();
            let r = dg_lf_staggered_residual(&s, &h_prev, &now, &h_next, &next, 0..s.len());
            assert!(r < 1e-13, "{kind}: {r}");
            let again = s.back_half_h(&next.h, &next.e).unwrap();
            assert!(again.iter().zip(&h_next).all(|(a, b)| (a - b).norm() < 1e-12));
        }
    }

    #[test]
    fn perturbed_wavenumber_is_detected() {
        let m = LorentzMedium::default();
        let nu = 0.7 * cfl_max_fd(2).unwrap();
        let k = solve_fullydiscrete_modes(TemporalScheme::LeapFrog, 2, &m, 0.8, 0.1, nu).unwrap().physical().k_hat;
        let h = omega1_h_from_cfl(&m, 0.1, nu);
        let run = |k| fd_wave_residual(TemporalScheme::LeapFrog, 2, &m, 0.8, 0.1, h, k, 64, 8..56).unwrap();
        assert!(run(k) < 1e-10);
        assert!(run(k * 1.001) > 1e-6);
    }
}
