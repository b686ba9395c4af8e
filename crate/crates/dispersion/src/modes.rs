//! Numerical wavenumbers at a fixed frequency and their classification.

use num_complex::Complex64;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ModeClass {
    Physical,
    Spurious,
}

/// One root of a discrete dispersion relation, as the dimensionless
/// product `k̂ = k h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mode {
    pub k_hat: Complex64,
    pub class: ModeClass,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeSet {
    /// Physical modes first (`+` then `−`), spurious ones after.
    pub modes: Vec<Mode>,
    pub w_hat: f64,
    pub omega1_h: f64,
    pub count_expected: usize,
}

impl ModeSet {
    /// The physical mode travelling in `+x`.
    pub fn physical(&self) -> Mode {
        self.modes[0]
    }

    pub fn physical_pair(&self) -> impl Iterator<Item = &Mode> {
        self.modes.iter().filter(|m| m.class == ModeClass::Physical)
    }

    pub fn spurious(&self) -> impl Iterator<Item = &Mode> {
        self.modes.iter().filter(|m| m.class == ModeClass::Spurious)
    }

    /// Cell size in the medium's length units, given `ω₁`.
    pub fn h(&self, omega_1: f64) -> f64 {
        self.omega1_h / omega_1
    }

    /// Physical wavenumber `k = k̂/h`.
    pub fn physical_wavenumber(&self, omega_1: f64) -> Complex64 {
        self.physical().k_hat / self.h(omega_1)
    }

    pub fn max_residual(&self) -> f64 {
        self.modes.iter().map(|m| m.residual).fold(0.0, f64::max)
    }
}

/// Index of the candidate closest to `target`; ties go to the smaller `|Im|`.
pub(crate) fn nearest(candidates: &[Complex64], target: Complex64) -> Option<usize> {
    candidates
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| {
            let (da, db) = ((**a - target).norm(), (**b - target).norm());
            if (da - db).abs() <= 1e-12 * da.max(db) {
                a.im.abs().total_cmp(&b.im.abs())
            } else {
                da.total_cmp(&db)
            }
        })
        .map(|(i, _)| i)
}

/// Follow the physical root from the finest of three nested meshes to the
/// coarsest. `levels[j]` holds the roots at mesh scale `2^-j` (so index 0
/// is the requested mesh) and `seed` is the expected `k̂` on the finest mesh.
pub(crate) fn continue_physical(levels: &[Vec<Complex64>], seed: Complex64) -> Option<usize> {
    let last = levels.len() - 1;
    let mut idx = nearest(&levels[last], seed)?;
    for j in (0..last).rev() {
        let predicted = levels[j + 1][idx] * 2.0;
        idx = nearest(&levels[j], predicted)?;
    }
    Some(idx)
}

/// Deterministic ordering for spurious modes: `|Re|`, then `|Im|`, then
/// sign of `Re` and `Im`.
pub(crate) fn sort_spurious(modes: &mut [Mode]) {
    modes.sort_by(|a, b| {
        let (x, y) = (a.k_hat, b.k_hat);
        x.re.abs()
            .total_cmp(&y.re.abs())
            .then(x.im.abs().total_cmp(&y.im.abs()))
            .then(x.re.total_cmp(&y.re))
            .then(x.im.total_cmp(&y.im))
    });
}
