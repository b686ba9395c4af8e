use std::f64::consts::TAU;
use std::sync::Arc;

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{FieldState, PeriodicGrid, PolarizationStep};
use crate::error::{DispersionError, Result};
use crate::fd::{cfl_max_fd, fd_symbol, lambda_coeffs};
use crate::medium::LorentzMedium;
use crate::temporal::TemporalScheme;

/// Slack on the leap-frog CFL check.
const CFL_SLACK: f64 = 1e-12;

struct FourierPlan {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// Per-mode one-step map of `(H, E, P, J)`.
    transfer: Vec<Matrix4<Complex64>>,
}

/// Staggered FD2M stepper with leap-frog or trapezoidal time integration.
pub struct FdStepper {
    scheme: TemporalScheme,
    order: usize,
    medium: LorentzMedium,
    grid: PeriodicGrid,
    dt: f64,
    weights: Vec<f64>,
    ode: PolarizationStep,
    fourier: Option<FourierPlan>,
}

impl FdStepper {
    /// Leap-frog refuses `ν > ν_max`.
    pub fn new(scheme: TemporalScheme, order: usize, medium: LorentzMedium, grid: PeriodicGrid, dt: f64) -> Result<Self> {
        let s = Self::unchecked(scheme, order, medium, grid, dt)?;
        if scheme == TemporalScheme::LeapFrog {
            let limit = cfl_max_fd(order)?;
            let nu = s.cfl();
            if nu > limit * (1.0 + CFL_SLACK) {
                return Err(DispersionError::CflViolation { nu, limit });
            }
        }
        Ok(s)
    }

    /// Same as `new` without the stability check.
    pub fn unchecked(scheme: TemporalScheme, order: usize, medium: LorentzMedium, grid: PeriodicGrid, dt: f64) -> Result<Self> {
        let stencil = lambda_coeffs(order)?;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(DispersionError::InvalidArgument(format!("time step must be positive, got {dt}")));
        }
        if grid.cells() < 2 * order {
            return Err(DispersionError::InvalidArgument(format!("{} cells cannot hold an order-{} stencil", grid.cells(), 2 * order)));
        }
        let mut s = FdStepper {
            scheme,
            order,
            medium,
            grid,
            dt,
            weights: stencil.lambdas.iter().enumerate().map(|(i, l)| l / (2 * i + 1) as f64).collect(),
            ode: PolarizationStep::new(&medium, dt),
            fourier: None,
        };
        if scheme == TemporalScheme::Trapezoidal {
            s.fourier = Some(s.plan()?);
        }
        Ok(s)
    }

    pub fn scheme(&self) -> TemporalScheme {
        self.scheme
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn grid(&self) -> PeriodicGrid {
        self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn medium(&self) -> &LorentzMedium {
        &self.medium
    }

    /// `ν = Δt/(h√ε_∞)`.
    pub fn cfl(&self) -> f64 {
        self.dt / (self.grid.h() * self.medium.eps_inf().sqrt())
    }

    /// `(D_x E)` at dual nodes `(i + ½)h`.
    pub fn diff_to_dual(&self, e: &[Complex64], out: &mut [Complex64]) {
        let n = e.len() as isize;
        let inv_h = 1.0 / self.grid.h();
        for (i, o) in out.iter_mut().enumerate() {
            let i = i as isize;
            *o = self
                .weights
                .iter()
                .enumerate()
                .map(|(q, w)| {
                    let q = q as isize + 1;
                    (e[(i + q).rem_euclid(n) as usize] - e[(i + 1 - q).rem_euclid(n) as usize]) * *w
                })
                .sum::<Complex64>()
                * inv_h;
        }
    }

    /// `(D_x H)` at primal nodes `jh`.
    pub fn diff_to_primal(&self, h: &[Complex64], out: &mut [Complex64]) {
        let n = h.len() as isize;
        let inv_h = 1.0 / self.grid.h();
        for (j, o) in out.iter_mut().enumerate() {
            let j = j as isize;
            *o = self
                .weights
                .iter()
                .enumerate()
                .map(|(q, w)| {
                    let q = q as isize + 1;
                    (h[(j + q - 1).rem_euclid(n) as usize] - h[(j - q).rem_euclid(n) as usize]) * *w
                })
                .sum::<Complex64>()
                * inv_h;
        }
    }

    fn plan(&self) -> Result<FourierPlan> {
        let n = self.grid.cells();
        let mut planner = FftPlanner::new();
        let a = 0.5 * self.dt;
        let ei = self.medium.eps_inf();
        let (w1sq, wp2, damp) = (self.ode.w1sq, self.ode.wp2, self.medium.gamma() * self.dt);
        let c = |x: f64| Complex64::new(x, 0.0);
        let transfer = (0..n)
            .map(|m| {
                let theta = TAU * m as f64 / n as f64;
                let f = fd_symbol(self.order, c(theta))? * Complex64::new(0.0, 2.0 / self.grid.h());
                let half = Complex64::from_polar(1.0, 0.5 * theta);
                let (se, sh) = (f * half, f / half);
                #[rustfmt::skip]
                let lhs = Matrix4::new(
                    c(1.0), -se * a, c(0.0), c(0.0),
                    -sh * a, c(ei), c(1.0), c(0.0),
                    c(0.0), c(0.0), c(1.0), c(-a),
                    c(0.0), c(-a * wp2), c(a * w1sq), c(1.0 + damp),
                );
                #[rustfmt::skip]
                let rhs = Matrix4::new(
                    c(1.0), se * a, c(0.0), c(0.0),
                    sh * a, c(ei), c(1.0), c(0.0),
                    c(0.0), c(0.0), c(1.0), c(a),
                    c(0.0), c(a * wp2), c(-a * w1sq), c(1.0 - damp),
                );
                let inv = lhs.try_inverse().ok_or(DispersionError::SingularImplicitSystem)?;
                Ok(inv * rhs)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FourierPlan { forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n), transfer })
    }

    /// Advance one full step.
    pub fn step(&self, state: &mut FieldState) -> Result<()> {
        state.check_len(self.grid.cells())?;
        match self.scheme {
            TemporalScheme::LeapFrog => self.step_leapfrog(state),
            TemporalScheme::Trapezoidal => self.step_trapezoidal(state),
        }
        state.step += 1;
        Ok(())
    }

    fn step_leapfrog(&self, s: &mut FieldState) {
        let n = s.len();
        let half = 0.5 * self.dt;
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        self.diff_to_dual(&s.e, &mut buf);
        for (h, g) in s.h.iter_mut().zip(&buf) {
            *h += g * half;
        }
        self.diff_to_primal(&s.h, &mut buf);
        let ei = self.medium.eps_inf();
        let coupling = self.ode.coupling();
        for i in 0..n {
            let d = s.d[i] + buf[i] * self.dt;
            let (p, j, e) = (s.p[i], s.j[i], s.e[i]);
            let e_next = (d - self.ode.p_known(p, j, e)) / (ei + coupling);
            s.j[i] = self.ode.j_next(p, j, e, e_next);
            s.p[i] = self.ode.p_next(p, j, e, e_next);
            s.e[i] = e_next;
            s.d[i] = d;
        }
        self.diff_to_dual(&s.e, &mut buf);
        for (h, g) in s.h.iter_mut().zip(&buf) {
            *h += g * half;
        }
    }

    fn step_trapezoidal(&self, s: &mut FieldState) {
        let plan = self.fourier.as_ref().expect("trapezoidal stepper has a Fourier plan");
        let n = s.len();
        let mut fields = [s.h.clone(), s.e.clone(), s.p.clone(), s.j.clone()];
        for f in fields.iter_mut() {
            plan.forward.process(f);
        }
        for m in 0..n {
            let v = plan.transfer[m] * Vector4::new(fields[0][m], fields[1][m], fields[2][m], fields[3][m]);
            for (f, x) in fields.iter_mut().zip(v.iter()) {
                f[m] = *x;
            }
        }
        let scale = 1.0 / n as f64;
        for f in fields.iter_mut() {
            plan.inverse.process(f);
            f.iter_mut().for_each(|z| *z *= scale);
        }
        let [h, e, p, j] = fields;
        let ei = self.medium.eps_inf();
        s.d = e.iter().zip(&p).map(|(e, p)| e * ei + p).collect();
        (s.h, s.e, s.p, s.j) = (h, e, p, j);
    }
}

/// One step of the `(2, 2M)` scheme on a fresh stepper.
pub fn step_fd(
    scheme: TemporalScheme,
    order: usize,
    medium: &LorentzMedium,
    grid: PeriodicGrid,
    state: &FieldState,
    dt: f64,
) -> Result<FieldState> {
    let stepper = FdStepper::new(scheme, order, *medium, grid, dt)?;
    let mut next = state.clone();
    stepper.step(&mut next)?;
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(n: usize, eps_inf: f64, seed: u64) -> FieldState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v = || (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0)).collect::<Vec<_>>();
        FieldState::from_fields(v(), v(), v(), v(), eps_inf).unwrap()
    }

    #[test]
    fn operators_match_symbol() {
        let m = LorentzMedium::default();
        let grid = PeriodicGrid::new(32, 0.1).unwrap();
        for order in 1..=4 {
            let s = FdStepper::new(TemporalScheme::LeapFrog, order, m, grid, 0.05).unwrap();
            let theta = TAU * 3.0 / 32.0;
            let wave: Vec<_> = (0..32).map(|j| Complex64::from_polar(1.0, theta * j as f64)).collect();
            let mut out = vec![Complex64::new(0.0, 0.0); 32];
            s.diff_to_dual(&wave, &mut out);
            let sym = fd_symbol(order, Complex64::new(theta, 0.0)).unwrap() * Complex64::new(0.0, 2.0 / 0.1);
            for (i, o) in out.iter().enumerate() {
                let want = sym * Complex64::from_polar(1.0, theta * (i as f64 + 0.5));
                assert!((o - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn lossless_free_space_unit_modulus() {
        let free = LorentzMedium::dispersionless(2.25, 1.0).unwrap();
        let grid = PeriodicGrid::new(64, 0.1).unwrap();
        let dt = 0.5 * 0.1 * 1.5;
        let s = FdStepper::new(TemporalScheme::LeapFrog, 1, free, grid, dt).unwrap();
        // discrete eigenmode: H on the dual grid, E on the primal grid
        let theta = TAU * 5.0 / 64.0;
        let f = 2.0 * (0.5 * theta).sin() / 0.1;
        let w = 2.0 * (0.5 * dt * f / 1.5).asin() / dt;
        let z = Complex64::from_polar(1.0, -w * dt);
        let ratio = (z + 1.0) / (z - 1.0) * Complex64::new(0.0, 0.5 * dt * f);
        let e: Vec<_> = (0..64).map(|j| Complex64::from_polar(1.0, theta * j as f64)).collect();
        let h: Vec<_> = (0..64).map(|j| ratio * Complex64::from_polar(1.0, theta * (j as f64 + 0.5))).collect();
        let zero = vec![Complex64::new(0.0, 0.0); 64];
        let mut st = FieldState::from_fields(h, e, zero.clone(), zero, 2.25).unwrap();
        let e0 = st.e[7];
        for _ in 0..100 {
            s.step(&mut st).unwrap();
        }
        let amp = st.e[7] / e0;
        assert!((amp.norm() - 1.0).abs() < 1e-12);
        assert!((amp - z.powi(100)).norm() < 1e-10);
    }

    #[test]
    fn constitutive_law_holds() {
        let m = LorentzMedium::default();
        let grid = PeriodicGrid::new(32, 0.1).unwrap();
        for scheme in TemporalScheme::ALL {
            let s = FdStepper::new(scheme, 2, m, grid, 0.05).unwrap();
            let mut st = random_state(32, 2.25, 3);
            for _ in 0..1000 {
                s.step(&mut st).unwrap();
            }
            assert!(st.constitutive_residual(2.25) <= 1e-12, "{scheme}: {}", st.constitutive_residual(2.25));
            assert_eq!(st.step, 1000);
        }
    }

    #[test]
    fn cfl_checked() {
        let m = LorentzMedium::default();
        let grid = PeriodicGrid::new(32, 0.1).unwrap();
        let limit = cfl_max_fd(2).unwrap();
        let dt = 1.01 * limit * 0.1 * 1.5;
        assert!(matches!(FdStepper::new(TemporalScheme::LeapFrog, 2, m, grid, dt), Err(DispersionError::CflViolation { .. })));
        assert!(FdStepper::new(TemporalScheme::Trapezoidal, 2, m, grid, dt).is_ok());
        assert!(FdStepper::new(TemporalScheme::LeapFrog, 5, m, grid, 0.01).is_ok());
        assert!(FdStepper::new(TemporalScheme::LeapFrog, 5, m, PeriodicGrid::new(8, 0.1).unwrap(), 0.01).is_err());
    }

    #[test]
    fn real_data_stays_real() {
        let m = LorentzMedium::default();
        let grid = PeriodicGrid::new(16, 0.1).unwrap();
        for scheme in TemporalScheme::ALL {
            let s = FdStepper::new(scheme, 3, m, grid, 0.04).unwrap();
            let mut st = random_state(16, 2.25, 9);
            for _ in 0..20 {
                s.step(&mut st).unwrap();
            }
            assert!(st.fields().iter().flat_map(|f| f.iter()).all(|z| z.im.abs() < 1e-13));
        }
    }

    #[test]
    fn free_function_matches_stepper() {
        let m = LorentzMedium::default();
        let grid = PeriodicGrid::new(16, 0.1).unwrap();
        let st = random_state(16, 2.25, 1);
        let a = step_fd(TemporalScheme::LeapFrog, 2, &m, grid, &st, 0.05).unwrap();
        let mut b = st.clone();
        FdStepper::new(TemporalScheme::LeapFrog, 2, m, grid, 0.05).unwrap().step(&mut b).unwrap();
        assert_eq!(a, b);
    }
}
