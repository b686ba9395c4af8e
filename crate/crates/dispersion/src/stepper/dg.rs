use nalgebra::{DMatrix, DVector, LU};
use num_complex::Complex64;

use super::{FieldState, PeriodicGrid, PolarizationStep};
use crate::dg::{assemble_local, cfl_max_dg, FluxKind};
use crate::error::{DispersionError, Result};
use crate::medium::LorentzMedium;

const CFL_SLACK: f64 = 1e-9;

type Lu = LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>;

/// Periodic block-tridiagonal operator `(Au)_j = L u_{j−1} + C u_j + R u_{j+1}`.
#[derive(Debug, Clone)]
struct CellOperator {
    blocks: [DMatrix<f64>; 3],
}

impl CellOperator {
    fn is_zero(&self) -> bool {
        self.blocks.iter().all(|b| b.iter().all(|v| *v == 0.0))
    }

    fn apply(&self, u: &[Complex64], out: &mut [Complex64]) {
        let b = self.blocks[1].nrows();
        let cells = u.len() / b;
        for c in 0..cells {
            let nbr = [(c + cells - 1) % cells, c, (c + 1) % cells];
            for r in 0..b {
                let mut acc = Complex64::new(0.0, 0.0);
                for (blk, &cell) in self.blocks.iter().zip(&nbr) {
                    for k in 0..b {
                        acc += u[cell * b + k] * blk[(r, k)];
                    }
                }
                out[c * b + r] = acc;
            }
        }
    }

    fn dense(&self, cells: usize) -> DMatrix<Complex64> {
        let b = self.blocks[1].nrows();
        let mut m = DMatrix::zeros(cells * b, cells * b);
        for c in 0..cells {
            let nbr = [(c + cells - 1) % cells, c, (c + 1) % cells];
            for (blk, &cell) in self.blocks.iter().zip(&nbr) {
                for r in 0..b {
                    for k in 0..b {
                        m[(c * b + r, cell * b + k)] += Complex64::from(blk[(r, k)]);
                    }
                }
            }
        }
        m
    }
}

/// Leap-frog DG stepper. `H` is kept at integer time levels; the staggered
/// value `H^{n+½}` is produced inside each step by the two half updates.
pub struct DgStepper {
    p: usize,
    flux_kind: FluxKind,
    medium: LorentzMedium,
    grid: PeriodicGrid,
    dt: f64,
    /// `hM` and its inverse on one cell.
    mass: DMatrix<f64>,
    mass_inv: DMatrix<f64>,
    deriv: CellOperator,
    deriv_dual: CellOperator,
    penalty_h: CellOperator,
    penalty_e: CellOperator,
    ode: PolarizationStep,
    /// Global factorizations, only when the flux has penalty terms.
    h_forward: Option<Lu>,
    h_backward: Option<Lu>,
    e_solve: Option<Lu>,
}

impl DgStepper {
    pub fn new(p: usize, flux: FluxKind, medium: LorentzMedium, grid: PeriodicGrid, dt: f64) -> Result<Self> {
        let s = Self::unchecked(p, flux, medium, grid, dt)?;
        let limit = cfl_max_dg(p, flux)?;
        let nu = s.cfl();
        if nu > limit * (1.0 + CFL_SLACK) {
            return Err(DispersionError::CflViolation { nu, limit });
        }
        Ok(s)
    }

    pub fn unchecked(p: usize, flux_kind: FluxKind, medium: LorentzMedium, grid: PeriodicGrid, dt: f64) -> Result<Self> {
        let local = assemble_local(p)?;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(DispersionError::InvalidArgument(format!("time step must be positive, got {dt}")));
        }
        let flux = flux_kind.params(medium.eps_inf());
        let mass = &local.mass * grid.h();
        let mass_inv = mass.clone().try_inverse().ok_or(DispersionError::SingularImplicitSystem)?;
        let op = |blocks| CellOperator { blocks };
        let ode = PolarizationStep::new(&medium, dt);
        let mut s = DgStepper {
            p,
            flux_kind,
            medium,
            grid,
            dt,
            mass,
            mass_inv,
            deriv: op(local.derivative_stencil(flux.alpha())),
            deriv_dual: op(local.derivative_stencil(-flux.alpha())),
            penalty_h: op(local.penalty_stencil(flux.beta1())),
            penalty_e: op(local.penalty_stencil(flux.beta2())),
            ode,
            h_forward: None,
            h_backward: None,
            e_solve: None,
        };
        let cells = grid.cells();
        let mass_global = s.mass_global();
        let half = Complex64::from(0.5 * dt);
        if !s.penalty_h.is_zero() {
            let r = s.penalty_h.dense(cells) * half;
            s.h_forward = Some((&mass_global + &r).lu());
            s.h_backward = Some((&mass_global - &r).lu());
        }
        if !s.penalty_e.is_zero() {
            let scale = Complex64::from(medium.eps_inf() + ode.coupling());
            s.e_solve = Some((&mass_global * scale + s.penalty_e.dense(cells) * half).lu());
        }
        Ok(s)
    }

    fn mass_global(&self) -> DMatrix<Complex64> {
        let b = self.p + 1;
        let cells = self.grid.cells();
        let mut m = DMatrix::zeros(cells * b, cells * b);
        for c in 0..cells {
            m.view_mut((c * b, c * b), (b, b)).copy_from(&self.mass.map(Complex64::from));
        }
        m
    }

    pub fn degree(&self) -> usize {
        self.p
    }

    pub fn flux(&self) -> FluxKind {
        self.flux_kind
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

    pub fn cfl(&self) -> f64 {
        self.dt / (self.grid.h() * self.medium.eps_inf().sqrt())
    }

    /// Number of unknowns per field.
    pub fn len(&self) -> usize {
        self.grid.cells() * (self.p + 1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn zeros(&self) -> Vec<Complex64> {
        vec![Complex64::new(0.0, 0.0); self.len()]
    }

    fn apply_mass(&self, m: &DMatrix<f64>, u: &[Complex64]) -> Vec<Complex64> {
        let b = self.p + 1;
        let mut out = self.zeros();
        for (uc, oc) in u.chunks(b).zip(out.chunks_mut(b)) {
            for r in 0..b {
                oc[r] = (0..b).map(|k| uc[k] * m[(r, k)]).sum();
            }
        }
        out
    }

    /// `hM u`.
    pub fn mass_times(&self, u: &[Complex64]) -> Vec<Complex64> {
        self.apply_mass(&self.mass, u)
    }

    /// Derivative-type flux operator applied to `E` (the `H` equation).
    pub fn apply_deriv(&self, e: &[Complex64]) -> Vec<Complex64> {
        let mut out = self.zeros();
        self.deriv.apply(e, &mut out);
        out
    }

    /// Derivative-type flux operator applied to `H` (the `D` equation).
    pub fn apply_deriv_dual(&self, h: &[Complex64]) -> Vec<Complex64> {
        let mut out = self.zeros();
        self.deriv_dual.apply(h, &mut out);
        out
    }

    pub fn apply_penalty_h(&self, h: &[Complex64]) -> Vec<Complex64> {
        let mut out = self.zeros();
        self.penalty_h.apply(h, &mut out);
        out
    }

    pub fn apply_penalty_e(&self, e: &[Complex64]) -> Vec<Complex64> {
        let mut out = self.zeros();
        self.penalty_e.apply(e, &mut out);
        out
    }

    fn solve(lu: &Lu, rhs: Vec<Complex64>) -> Result<Vec<Complex64>> {
        let x = lu.solve(&DVector::from_vec(rhs)).ok_or(DispersionError::SingularImplicitSystem)?;
        Ok(x.as_slice().to_vec())
    }

    /// `(hM + Δt/2 R) H^{n+½} = hM H^n − Δt/2 P E^n`.
    pub fn half_step_h(&self, h: &[Complex64], e: &[Complex64]) -> Result<Vec<Complex64>> {
        let half = 0.5 * self.dt;
        let pe = self.apply_deriv(e);
        match &self.h_forward {
            None => {
                let dh = self.apply_mass(&self.mass_inv, &pe);
                Ok(h.iter().zip(&dh).map(|(h, d)| h - d * half).collect())
            }
            Some(lu) => {
                let rhs = self.mass_times(h).iter().zip(&pe).map(|(m, p)| m - p * half).collect();
                Self::solve(lu, rhs)
            }
        }
    }

    /// `hM H^{n+1} = hM H^{n+½} − Δt/2 (P E^{n+1} + R H^{n+½})`.
    pub fn complete_h(&self, h_half: &[Complex64], e_next: &[Complex64]) -> Vec<Complex64> {
        let half = 0.5 * self.dt;
        let mut g = self.apply_deriv(e_next);
        if self.h_forward.is_some() {
            let r = self.apply_penalty_h(h_half);
            g.iter_mut().zip(&r).for_each(|(g, r)| *g += r);
        }
        let dh = self.apply_mass(&self.mass_inv, &g);
        h_half.iter().zip(&dh).map(|(h, d)| h - d * half).collect()
    }

    /// Inverse of `complete_h`: `H^{n−½}` from `H^n` and `E^n`.
    pub fn back_half_h(&self, h: &[Complex64], e: &[Complex64]) -> Result<Vec<Complex64>> {
        let half = 0.5 * self.dt;
        let pe = self.apply_deriv(e);
        match &self.h_backward {
            None => {
                let dh = self.apply_mass(&self.mass_inv, &pe);
                Ok(h.iter().zip(&dh).map(|(h, d)| h + d * half).collect())
            }
            Some(lu) => {
                let rhs = self.mass_times(h).iter().zip(&pe).map(|(m, p)| m + p * half).collect();
                Self::solve(lu, rhs)
            }
        }
    }

    pub fn step(&self, s: &mut FieldState) -> Result<()> {
        s.check_len(self.len())?;
        let h_half = self.half_step_h(&s.h, &s.e)?;
        let mut g: Vec<Complex64> = self.apply_deriv_dual(&h_half).iter().map(|v| -v * self.dt).collect();
        let ei = self.medium.eps_inf();
        let coupling = self.ode.coupling();
        let known: Vec<Complex64> = (0..s.len()).map(|i| self.ode.p_known(s.p[i], s.j[i], s.e[i])).collect();
        let e_next: Vec<Complex64> = match &self.e_solve {
            None => {
                let dd = self.apply_mass(&self.mass_inv, &g);
                s.d.iter_mut().zip(&dd).for_each(|(d, x)| *d += x);
                s.d.iter().zip(&known).map(|(d, k)| (d - k) / (ei + coupling)).collect()
            }
            Some(lu) => {
                let re = self.apply_penalty_e(&s.e);
                let diff: Vec<Complex64> = s.d.iter().zip(&known).map(|(d, k)| d - k).collect();
                let md = self.mass_times(&diff);
                g.iter_mut().zip(re.iter().zip(&md)).for_each(|(g, (r, m))| *g += m - r * (0.5 * self.dt));
                Self::solve(lu, g)?
            }
        };
        for i in 0..s.len() {
            let (p, j, e) = (s.p[i], s.j[i], s.e[i]);
            s.j[i] = self.ode.j_next(p, j, e, e_next[i]);
            s.p[i] = self.ode.p_next(p, j, e, e_next[i]);
            if self.e_solve.is_some() {
                s.d[i] = e_next[i] * ei + s.p[i];
            }
        }
        s.h = self.complete_h(&h_half, &e_next);
        s.e = e_next;
        s.step += 1;
        Ok(())
    }

    /// Free-space discrete energy `(H^{n−½}, H^{n+½})_M + ε_∞(E^n, E^n)_M`,
    /// conserved by central and alternating fluxes.
    pub fn energy(&self, s: &FieldState) -> Result<f64> {
        let prev = self.back_half_h(&s.h, &s.e)?;
        let next = self.half_step_h(&s.h, &s.e)?;
        let inner = |a: &[Complex64], b: &[Complex64]| -> f64 {
            let mb = self.mass_times(b);
            a.iter().zip(&mb).map(|(x, y)| (x.conj() * y).re).sum()
        };
        Ok(inner(&prev, &next) + self.medium.eps_inf() * inner(&s.e, &s.e))
    }
}

/// One leap-frog DG step on a fresh stepper.
pub fn step_dg_lf(
    p: usize,
    flux: FluxKind,
    medium: &LorentzMedium,
    grid: PeriodicGrid,
    state: &FieldState,
    dt: f64,
) -> Result<FieldState> {
    let stepper = DgStepper::new(p, flux, *medium, grid, dt)?;
    let mut next = state.clone();
    stepper.step(&mut next)?;
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stepper::FdStepper;
    use crate::temporal::TemporalScheme;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(n: usize, eps_inf: f64, seed: u64, with_polarization: bool) -> FieldState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v = |on: bool| (0..n).map(|_| Complex64::new(if on { rng.gen_range(-1.0..1.0) } else { 0.0 }, 0.0)).collect::<Vec<_>>();
        let (h, e) = (v(true), v(true));
        let (p, j) = (v(with_polarization), v(with_polarization));
        FieldState::from_fields(h, e, p, j, eps_inf).unwrap()
    }

    #[test]
    fn alternating_p0_matches_fd2() {
        let m = LorentzMedium::default();
        let grid = PeriodicGrid::new(32, 0.1).unwrap();
        let dt = 0.9 * 0.1 * 1.5;
        let dg = DgStepper::new(0, FluxKind::AlternatingPlus, m, grid, dt).unwrap();
        let fd = FdStepper::new(TemporalScheme::LeapFrog, 1, m, grid, dt).unwrap();
        let mut a = random_state(32, 2.25, 5, true);
        let mut b = a.clone();
        for _ in 0..200 {
            dg.step(&mut a).unwrap();
            fd.step(&mut b).unwrap();
        }
        let scale = b.norm_sqr().sqrt();
        for (x, y) in a.fields().iter().zip(b.fields()) {
            for (u, v) in x.iter().zip(y) {
                assert!((u - v).norm() < 1e-12 * scale);
            }
        }
    }

    #[test]
    fn energy_conserved_or_decays() {
        let free = LorentzMedium::dispersionless(2.25, 1.0).unwrap();
        let grid = PeriodicGrid::new(12, 0.1).unwrap();
        for p in 0..=3 {
            for kind in [FluxKind::Central, FluxKind::AlternatingPlus, FluxKind::Upwind] {
                let nu = 0.99 * cfl_max_dg(p, kind).unwrap();
                let s = DgStepper::new(p, kind, free, grid, nu * 0.1 * 1.5).unwrap();
                let mut st = random_state(s.len(), 2.25, p as u64, false);
                let e0 = s.energy(&st).unwrap();
                assert!(e0 > 0.0);
                let mut max_ratio: f64 = 0.0;
                for _ in 0..2000 {
                    s.step(&mut st).unwrap();
                    max_ratio = max_ratio.max(s.energy(&st).unwrap() / e0);
                }
                assert!(max_ratio <= 1.0 + 1e-8, "p={p} {kind}: {max_ratio}");
                if kind != FluxKind::Upwind {
                    assert!((s.energy(&st).unwrap() / e0 - 1.0).abs() < 1e-10, "p={p} {kind}");
                }
            }
        }
    }

    #[test]
    fn constitutive_law_holds() {
        let m = LorentzMedium::default();
        let grid = PeriodicGrid::new(10, 0.2).unwrap();
        for kind in [FluxKind::Central, FluxKind::Upwind] {
            let s = DgStepper::new(2, kind, m, grid, 0.02).unwrap();
            let mut st = random_state(s.len(), 2.25, 8, true);
            for _ in 0..1000 {
                s.step(&mut st).unwrap();
            }
            assert!(st.constitutive_residual(2.25) <= 1e-12);
        }
    }

    #[test]
    fn half_steps_invert() {
        let m = LorentzMedium::default();
        let grid = PeriodicGrid::new(9, 0.2).unwrap();
        let s = DgStepper::new(1, FluxKind::Upwind, m, grid, 0.02).unwrap();
        let st = random_state(s.len(), 2.25, 2, true);
        let prev = s.back_half_h(&st.h, &st.e).unwrap();
        let back = s.complete_h(&prev, &st.e);
        for (a, b) in back.iter().zip(&st.h) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn cfl_checked() {
        let m = LorentzMedium::default();
        let grid = PeriodicGrid::new(9, 0.2).unwrap();
        let limit = cfl_max_dg(1, FluxKind::Central).unwrap();
        let dt = 1.01 * limit * 0.2 * 1.5;
        assert!(matches!(DgStepper::new(1, FluxKind::Central, m, grid, dt), Err(DispersionError::CflViolation { .. })));
        let st = random_state(18, 2.25, 1, true);
        assert!(step_dg_lf(1, FluxKind::Central, &m, grid, &st, 0.5 * dt).is_ok());
    }
}
