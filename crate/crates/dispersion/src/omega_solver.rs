//! Discrete angular frequency as a function of a real wavenumber: the
//! quartic in `ŵ` obtained by clearing the resonance denominator.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{DispersionError, Result};
use crate::fd::{fd_symbol, lambda_coeffs};
use crate::medium::LorentzMedium;
use crate::poly;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Which relation supplies the effective wavenumber `X = k/ω₁`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RelationKind {
    Exact,
    Fd(usize),
}

/// `c4 ŵ⁴ + c3 ŵ³ + c2 ŵ² + c1 ŵ + c0` with `c4 = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuarticCoefficients {
    /// Descending: `[c4, c3, c2, c1, c0]`.
    pub c: [Complex64; 5],
}

impl QuarticCoefficients {
    /// Quartic for effective normalized wavenumber `x = k/ω₁`.
    pub fn new(medium: &LorentzMedium, x: Complex64) -> Self {
        let g = medium.gamma_hat();
        let ei = medium.eps_inf();
        let x2 = x * x;
        QuarticCoefficients {
            c: [
                Complex64::new(1.0, 0.0),
                I * (2.0 * g),
                -(x2 + medium.eps_s()) / ei,
                -I * (2.0 * g / ei) * x2,
                x2 / ei,
            ],
        }
    }

    pub fn ascending(&self) -> [Complex64; 5] {
        let mut a = self.c;
        a.reverse();
        a
    }

    pub fn eval(&self, w: Complex64) -> Complex64 {
        poly::eval(&self.ascending(), w)
    }

    pub fn max_coeff(&self) -> f64 {
        self.c.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// `X = k/ω₁` for the given relation at `k̂ = kh`.
pub fn effective_wavenumber(kind: RelationKind, k_hat: f64, omega1_h: f64) -> Result<f64> {
    if !(omega1_h > 0.0) {
        return Err(DispersionError::InvalidArgument("omega1_h must be positive".into()));
    }
    match kind {
        RelationKind::Exact => Ok(k_hat / omega1_h),
        RelationKind::Fd(m) => Ok(2.0 * fd_symbol(m, Complex64::new(k_hat, 0.0))?.re / omega1_h),
    }
}

pub fn omega_quartic(kind: RelationKind, medium: &LorentzMedium, k_hat: f64, omega1_h: f64) -> Result<QuarticCoefficients> {
    if let RelationKind::Fd(m) = kind {
        lambda_coeffs(m)?;
    }
    let x = effective_wavenumber(kind, k_hat, omega1_h)?;
    Ok(QuarticCoefficients::new(medium, Complex64::new(x, 0.0)))
}

fn sort_roots(r: &mut [Complex64]) {
    r.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// All four roots `ŵ`, sorted by real then imaginary part.
pub fn omega_quartic_roots(kind: RelationKind, medium: &LorentzMedium, k_hat: f64, omega1_h: f64) -> Result<[Complex64; 4]> {
    let q = omega_quartic(kind, medium, k_hat, omega1_h)?;
    let mut r: [Complex64; 4] = poly::roots(&q.ascending())
        .map_err(|_| DispersionError::EigenFailed)?
        .try_into()
        .map_err(|_| DispersionError::EigenFailed)?;
    // Lossless roots are ± pairs of reals; snap round-off so the ordering is stable.
    if medium.gamma_hat() == 0.0 {
        for z in r.iter_mut() {
            if z.im.abs() <= 1e-13 * z.norm().max(1.0) {
                z.im = 0.0;
            }
        }
    }
    sort_roots(&mut r);
    Ok(r)
}

/// Lossless closed form: `ŵ² = [(ε_s + X²) ± √((ε_s + X²)² − 4ε_∞X²)]/(2ε_∞)`.
pub fn lossless_roots(medium: &LorentzMedium, x: f64) -> [Complex64; 4] {
    let b = medium.eps_s() + x * x;
    let disc = (b * b - 4.0 * medium.eps_inf() * x * x).max(0.0).sqrt();
    let hi = (b + disc) / (2.0 * medium.eps_inf());
    // stable form of the small root: product of the two is X²/ε_∞
    let lo = if hi > 0.0 { x * x / medium.eps_inf() / hi } else { 0.0 };
    let (lo, hi) = (lo.sqrt(), hi.sqrt());
    let mut r = [-hi, -lo, lo, hi].map(|v| Complex64::new(v, 0.0));
    sort_roots(&mut r);
    r
}

/// Pair every exact root with an FD root by minimum total distance over
/// all 24 permutations. Returns `perm` with `fd[perm[i]]` matched to
/// `exact[i]`, plus the list of near-optimal alternatives.
fn match_roots(exact: &[Complex64; 4], fd: &[Complex64; 4]) -> (Vec<[usize; 4]>, [usize; 4]) {
    let mut perms = Vec::with_capacity(24);
    permutations(&mut [0, 1, 2, 3], 0, &mut perms);
    let cost = |p: &[usize; 4]| -> f64 { (0..4).map(|i| (exact[i] - fd[p[i]]).norm()).sum() };
    let best = *perms.iter().min_by(|a, b| cost(a).total_cmp(&cost(b))).expect("24 permutations");
    let c0 = cost(&best);
    let near = perms.into_iter().filter(|p| *p != best && cost(p) - c0 <= 1e-12).collect();
    (near, best)
}

fn permutations(a: &mut [usize; 4], k: usize, out: &mut Vec<[usize; 4]>) {
    if k == a.len() {
        out.push(*a);
        return;
    }
    for i in k..a.len() {
        a.swap(k, i);
        permutations(a, k + 1, out);
        a.swap(k, i);
    }
}

/// `|ŵ^ex_i − ŵ^FD_i|/|ŵ^ex_i|` for the `branch`-th (0-based, sorted)
/// exact root and its matched FD root.
pub fn omega_relative_error(m: usize, medium: &LorentzMedium, k_hat: f64, omega1_h: f64, branch: usize) -> Result<f64> {
    if branch > 3 {
        return Err(DispersionError::InvalidArgument(format!("branch index {branch} out of 0..4")));
    }
    let exact = omega_quartic_roots(RelationKind::Exact, medium, k_hat, omega1_h)?;
    let fd = omega_quartic_roots(RelationKind::Fd(m), medium, k_hat, omega1_h)?;
    let (near, best) = match_roots(&exact, &fd);
    let target = fd[best[branch]];
    if near.iter().any(|p| (fd[p[branch]] - target).norm() > 1e-12 * target.norm().max(1e-300)) {
        return Err(DispersionError::BranchMismatch);
    }
    let ex = exact[branch];
    if ex.norm() == 0.0 {
        return Err(DispersionError::DegenerateExact);
    }
    Ok((ex - target).norm() / ex.norm())
}

/// Exact roots (sorted) and the FD roots reordered to match them.
pub fn matched_roots(m: usize, medium: &LorentzMedium, k_hat: f64, omega1_h: f64) -> Result<([Complex64; 4], [Complex64; 4])> {
    let exact = omega_quartic_roots(RelationKind::Exact, medium, k_hat, omega1_h)?;
    let fd = omega_quartic_roots(RelationKind::Fd(m), medium, k_hat, omega1_h)?;
    let (_, best) = match_roots(&exact, &fd);
    Ok((exact, best.map(|i| fd[i])))
}

/// Leading coefficient `[(2M−1)!!]²/(2^{2M}(2M+1)!)` of the low-branch
/// relative error in powers of `k̂^{2M}`.
pub fn omega_error_coefficient(m: usize) -> Result<f64> {
    lambda_coeffs(m)?;
    let df: f64 = (1..=2 * m - 1).step_by(2).map(|v| v as f64).product();
    let fact: f64 = (1..=2 * m + 1).map(|v| v as f64).product();
    Ok(df * df / (4f64.powi(m as i32) * fact))
}
