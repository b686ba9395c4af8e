//! Staggered finite differences of order 2M: stencil coefficients, the
//! discrete symbol, semi- and fully discrete dispersion, CFL limits and the
//! leading-error comparison.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{DispersionError, Result};
use crate::medium::LorentzMedium;
use crate::modes::{continue_physical, sort_spurious, Mode, ModeClass, ModeSet};
use crate::poly;
use crate::temporal::{semidiscrete_wavenumber, TemporalScheme};

pub const MAX_ORDER: usize = 16;

/// Coefficients of the staggered 2M-th order first-derivative stencil.
#[derive(Debug, Clone, PartialEq)]
pub struct FdStencil {
    pub m: usize,
    /// `λ_{2p−1}` for `p = 1..=M`, exact.
    pub exact: Vec<BigRational>,
    pub lambdas: Vec<f64>,
    /// Weights actually applied to the differences, `λ_{2p−1}/(2p−1)`.
    pub weights: Vec<BigRational>,
    /// Power-series weights `[(2p−3)!!]²/(2p−1)!` of the symbol in `sin(k̂/2)`.
    pub symbol_exact: Vec<BigRational>,
    pub symbol_weights: Vec<f64>,
}

/// `n!!` with the convention `(−1)!! = 0!! = 1`.
pub fn double_factorial(n: i64) -> BigInt {
    let mut acc = BigInt::one();
    let mut k = n;
    while k > 1 {
        acc *= k;
        k -= 2;
    }
    acc
}

fn factorial(n: i64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, k| acc * k)
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().expect("finite rational")
}

fn build_stencil(m: usize) -> FdStencil {
    let mi = m as i64;
    let top = double_factorial(2 * mi - 1);
    let top2 = &top * &top;
    let exact: Vec<BigRational> = (1..=mi)
        .map(|p| {
            let sign = if p % 2 == 1 { 1 } else { -1 };
            let num = BigInt::from(2 * sign) * &top2;
            let den = double_factorial(2 * mi + 2 * p - 2) * double_factorial(2 * mi - 2 * p) * BigInt::from(2 * p - 1);
            BigRational::new(num, den)
        })
        .collect();
    let symbol_exact: Vec<BigRational> = (1..=mi)
        .map(|p| {
            let d = double_factorial(2 * p - 3);
            BigRational::new(&d * &d, factorial(2 * p - 1))
        })
        .collect();
    let weights = exact.iter().zip(1i64..).map(|(l, p)| l / BigRational::from_integer(BigInt::from(2 * p - 1))).collect();
    FdStencil {
        m,
        weights,
        lambdas: exact.iter().map(to_f64).collect(),
        symbol_weights: symbol_exact.iter().map(to_f64).collect(),
        exact,
        symbol_exact,
    }
}

fn table() -> &'static [FdStencil] {
    static TABLE: OnceLock<Vec<FdStencil>> = OnceLock::new();
    TABLE.get_or_init(|| (1..=MAX_ORDER).map(build_stencil).collect())
}

fn check_order(m: usize) -> Result<()> {
    if m == 0 || m > MAX_ORDER {
        Err(DispersionError::OrderTooLarge(m))
    } else {
        Ok(())
    }
}

/// Stencil for accuracy order `2M`, `1 ≤ M ≤ 16`.
pub fn lambda_coeffs(m: usize) -> Result<&'static FdStencil> {
    check_order(m)?;
    Ok(&table()[m - 1])
}

/// `F(k̂) = Σ_p [(2p−3)!!]²/(2p−1)! · sin^{2p−1}(k̂/2)`, half the symbol of the
/// discrete derivative times `h`.
pub fn fd_symbol(m: usize, k_hat: Complex64) -> Result<Complex64> {
    let st = lambda_coeffs(m)?;
    let s = (k_hat * 0.5).sin();
    let coeffs = odd_poly(&st.symbol_weights, Complex64::new(0.0, 0.0));
    Ok(poly::eval(&coeffs, s))
}

/// Same symbol written with the stencil weights:
/// `Σ_p λ_{2p−1}/(2p−1) · sin((2p−1)k̂/2)`.
pub fn fd_symbol_from_stencil(m: usize, k_hat: Complex64) -> Result<Complex64> {
    let st = lambda_coeffs(m)?;
    Ok(st
        .lambdas
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            let q = (2 * i + 1) as f64;
            l / q * (k_hat * (0.5 * q)).sin()
        })
        .sum())
}

fn fd_symbol_derivative(st: &FdStencil, k_hat: Complex64) -> Complex64 {
    let s = (k_hat * 0.5).sin();
    let c = (k_hat * 0.5).cos();
    let mut sum = Complex64::new(0.0, 0.0);
    for (i, &w) in st.symbol_weights.iter().enumerate() {
        let q = (2 * i + 1) as i32;
        sum += w * q as f64 * s.powi(q - 1);
    }
    sum * c * 0.5
}

/// Odd polynomial `Σ w_p s^{2p−1} − rhs` as ascending coefficients.
fn odd_poly(weights: &[f64], rhs: Complex64) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(0.0, 0.0); 2 * weights.len()];
    c[0] = -rhs;
    for (i, &w) in weights.iter().enumerate() {
        c[2 * i + 1] = Complex64::new(w, 0.0);
    }
    c
}

/// All `2M−1` roots `k̂` of `F(k̂) = rhs`, polished against `F` itself.
fn roots_for_rhs(st: &FdStencil, rhs: Complex64) -> Result<Vec<(Complex64, f64)>> {
    let s_roots = poly::roots(&odd_poly(&st.symbol_weights, rhs))?;
    let scale = rhs.norm().max(1e-300);
    let f = |k: Complex64| {
        let coeffs = odd_poly(&st.symbol_weights, Complex64::new(0.0, 0.0));
        poly::eval(&coeffs, (k * 0.5).sin())
    };
    s_roots
        .into_iter()
        .map(|s| {
            let mut k = s.asin() * 2.0;
            let mut res = (f(k) - rhs).norm();
            for _ in 0..6 {
                let d = fd_symbol_derivative(st, k);
                if d.norm() == 0.0 || res == 0.0 {
                    break;
                }
                let cand = k - (f(k) - rhs) / d;
                let r2 = (f(cand) - rhs).norm();
                if r2 < res {
                    k = cand;
                    res = r2;
                } else {
                    break;
                }
            }
            if !(k.re.is_finite() && k.im.is_finite()) {
                return Err(DispersionError::RootSolveFailed("non-finite root".into()));
            }
            Ok((k, res / scale))
        })
        .collect()
}

/// Solve `F(k̂) = ±K(1)/2` where `rhs_at(σ)` gives `K` on the mesh scaled by
/// `σ` (`σ = 1, 1/2, 1/4` for the continuation).
fn solve_modes(m: usize, w_hat: f64, omega1_h: f64, rhs_at: impl Fn(f64) -> Result<Complex64>) -> Result<ModeSet> {
    let st = lambda_coeffs(m)?;
    let mut levels = Vec::with_capacity(3);
    let mut base = Vec::new();
    for j in 0..3 {
        let sigma = 0.5f64.powi(j);
        let kk = rhs_at(sigma)?;
        let roots = roots_for_rhs(st, kk * 0.5)?;
        levels.push(roots.iter().map(|r| r.0).collect::<Vec<_>>());
        if j == 0 {
            base = roots;
        }
        if j == 2 {
            let idx = continue_physical(&levels, kk).ok_or_else(|| DispersionError::RootSolveFailed("no roots".into()))?;
            let (kp, rp) = base[idx];
            let mut modes = vec![
                Mode { k_hat: kp, class: ModeClass::Physical, residual: rp },
                Mode { k_hat: -kp, class: ModeClass::Physical, residual: rp },
            ];
            let mut spurious: Vec<Mode> = base
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != idx)
                .flat_map(|(_, &(k, r))| {
                    [Mode { k_hat: k, class: ModeClass::Spurious, residual: r }, Mode { k_hat: -k, class: ModeClass::Spurious, residual: r }]
                })
                .collect();
            sort_spurious(&mut spurious);
            modes.extend(spurious);
            return Ok(ModeSet { modes, w_hat, omega1_h, count_expected: 4 * m - 2 });
        }
    }
    unreachable!()
}

/// Space-discrete, time-continuous FD2M modes at `w_hat` on a mesh with
/// `ω₁h = omega1_h`.
pub fn solve_semidiscrete_modes(m: usize, medium: &LorentzMedium, w_hat: f64, omega1_h: f64) -> Result<ModeSet> {
    if !(omega1_h > 0.0) {
        return Err(DispersionError::InvalidArgument("omega1_h must be positive".into()));
    }
    let k = medium.exact_wavenumber_at(w_hat)?.value;
    let h = omega1_h / medium.omega_1();
    solve_modes(m, w_hat, omega1_h, |sigma| Ok(k * h * sigma))
}

/// `ω₁h` implied by `W₁ = ω₁Δt` and `ν = Δt/(h√ε_∞)`.
pub fn omega1_h_from_cfl(medium: &LorentzMedium, w1: f64, nu: f64) -> f64 {
    w1 / (medium.eps_inf().sqrt() * nu)
}

/// Fully discrete `(2, 2M)` modes: the semi-discrete relation with `K`
/// replaced by the time-discrete wavenumber times `h`.
pub fn solve_fullydiscrete_modes(
    scheme: TemporalScheme,
    m: usize,
    medium: &LorentzMedium,
    w_hat: f64,
    w1: f64,
    nu: f64,
) -> Result<ModeSet> {
    if !(nu > 0.0 && w1 > 0.0) {
        return Err(DispersionError::InvalidArgument("W1 and nu must be positive".into()));
    }
    let omega1_h = omega1_h_from_cfl(medium, w1, nu);
    let h = omega1_h / medium.omega_1();
    solve_modes(m, w_hat, omega1_h, |sigma| {
        Ok(semidiscrete_wavenumber(scheme, medium, w_hat, w1 * sigma)?.value * h * sigma)
    })
}

/// Largest stable CFL number of leap-frog FD2M, `1/Σ_p [(2p−3)!!]²/(2p−1)!`.
pub fn cfl_max_fd(m: usize) -> Result<f64> {
    Ok(to_f64(&cfl_max_fd_exact(m)?))
}

pub fn cfl_max_fd_exact(m: usize) -> Result<BigRational> {
    let st = lambda_coeffs(m)?;
    let sum = st.symbol_exact.iter().fold(BigRational::zero(), |a, b| a + b);
    Ok(sum.recip())
}

/// Limit of `cfl_max_fd` as `M → ∞`.
pub const CFL_FD_LIMIT: f64 = std::f64::consts::FRAC_2_PI;

/// Coefficient of `W²` in `k/k_ex − 1` for the fully discrete `(2, 2M)`
/// scheme. Only `M = 1` picks up the spatial term at this order.
pub fn fd_leading_coefficient(scheme: TemporalScheme, m: usize, medium: &LorentzMedium, w_hat: f64, nu: f64) -> Result<Complex64> {
    check_order(m)?;
    if !(nu > 0.0) {
        return Err(DispersionError::InvalidArgument("nu must be positive".into()));
    }
    let base = crate::temporal::leading_error_coefficient(scheme, medium, w_hat)?;
    if m == 1 {
        let eps = medium.relative_permittivity(w_hat)?;
        Ok(base + eps / (2.0 * medium.eps_inf() * nu * nu) / 12.0)
    } else {
        Ok(base)
    }
}

/// Frequency range (γ̂ = 0, outside the absorption band) on which leap-frog
/// FD with `M ≥ 2` has a smaller leading error than `M = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ComparisonRegion {
    Always,
    Between { lo: f64, hi: f64 },
    UpTo { hi: f64 },
}

impl ComparisonRegion {
    pub fn contains(&self, w_hat: f64) -> bool {
        match *self {
            ComparisonRegion::Always => true,
            ComparisonRegion::Between { lo, hi } => w_hat >= lo && w_hat <= hi,
            ComparisonRegion::UpTo { hi } => w_hat <= hi,
        }
    }
}

/// Left side of the quadratic criterion in `ŵ²`; nonnegative exactly where
/// higher order helps (outside the absorption band).
pub fn comparison_criterion(nu: f64, eps_ratio: f64, w_hat: f64) -> f64 {
    let y = w_hat * w_hat - 1.0;
    let e = eps_ratio;
    e * e + (1.0 - 2.0 * nu * nu) * y * y - 2.0 * e * (y + nu * nu * (1.0 - 3.0 * w_hat * w_hat))
}

pub fn fd_lf_comparison_region(nu: f64, eps_ratio: f64) -> Result<ComparisonRegion> {
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(DispersionError::InvalidCfl(nu));
    }
    if !(eps_ratio > 0.0) {
        return Err(DispersionError::InvalidArgument("eps_ratio must be positive".into()));
    }
    let nu2 = nu * nu;
    let a = 2.0 * nu2 - 1.0;
    if a <= 0.0 {
        return Ok(ComparisonRegion::Always);
    }
    let e = eps_ratio;
    let root = nu * (-4.0 * e - 4.0 * e * e + 8.0 * e * nu2 + 9.0 * e * e * nu2).sqrt();
    let centre = -1.0 - e + 2.0 * nu2 + 3.0 * e * nu2;
    let hi = ((centre + root) / a).sqrt();
    if e <= a {
        Ok(ComparisonRegion::Between { lo: ((centre - root) / a).max(0.0).sqrt(), hi })
    } else {
        Ok(ComparisonRegion::UpTo { hi })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn stencil_examples() {
        assert_eq!(lambda_coeffs(1).unwrap().exact, vec![rat(1, 1)]);
        assert_eq!(lambda_coeffs(2).unwrap().exact, vec![rat(9, 8), rat(-1, 8)]);
        assert_eq!(lambda_coeffs(3).unwrap().exact, vec![rat(75, 64), rat(-25, 128), rat(3, 128)]);
        assert_eq!(lambda_coeffs(2).unwrap().weights, vec![rat(9, 8), rat(-1, 24)]);
        assert_eq!(lambda_coeffs(3).unwrap().weights, vec![rat(75, 64), rat(-25, 384), rat(3, 640)]);
        assert!(matches!(lambda_coeffs(0), Err(DispersionError::OrderTooLarge(0))));
        assert!(matches!(lambda_coeffs(17), Err(DispersionError::OrderTooLarge(17))));
        assert_eq!(double_factorial(-1), BigInt::one());
        assert_eq!(double_factorial(7), BigInt::from(105));
    }

    #[test]
    fn stencil_identities_exact() {
        for m in 1..=MAX_ORDER {
            let st = lambda_coeffs(m).unwrap();
            let moment = |l: u32| {
                st.exact.iter().enumerate().fold(BigRational::zero(), |acc, (i, lam)| {
                    acc + lam * BigRational::from_integer(BigInt::from(2 * i + 1).pow(2 * l))
                })
            };
            assert_eq!(moment(0), BigRational::one(), "M={m}");
            for l in 1..m as u32 {
                assert!(moment(l).is_zero(), "M={m} l={l}");
            }
            let d = double_factorial(2 * m as i64 - 1);
            let sign = if m % 2 == 1 { 1 } else { -1 };
            assert_eq!(moment(m as u32), BigRational::from_integer(BigInt::from(sign) * &d * &d));
        }
    }

    #[test]
    fn symbol_examples() {
        let z = Complex64::new(0.0, 0.0);
        assert_eq!(fd_symbol(3, z).unwrap(), z);
        assert_relative_eq!(fd_symbol(1, Complex64::new(PI, 0.0)).unwrap().re, 1.0, epsilon = 1e-15);
        assert_relative_eq!(fd_symbol(2, Complex64::new(PI, 0.0)).unwrap().re, 7.0 / 6.0, epsilon = 1e-15);
    }

    #[test]
    fn cfl_values() {
        assert_eq!(cfl_max_fd_exact(1).unwrap(), rat(1, 1));
        assert_eq!(cfl_max_fd_exact(2).unwrap(), rat(6, 7));
        let want = [1.0, 0.857143, 0.805369, 0.777418, 0.759479];
        for (m, w) in (1..=5).zip(want) {
            assert!((cfl_max_fd(m).unwrap() - w).abs() < 1e-6);
        }
        let vals: Vec<f64> = (1..=MAX_ORDER).map(|m| cfl_max_fd(m).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]));
        assert!(vals.iter().all(|&v| v > CFL_FD_LIMIT));
        // the sum is the arcsine series at 1, converging like M^{-1/2}
        let gap = |m: usize| vals[m - 1] - CFL_FD_LIMIT;
        assert!(gap(16) < 0.065);
        assert!(gap(16) < 0.55 * gap(4));
    }

    #[test]
    fn m1_closed_form() {
        // ε chosen so that K = k_ex h = 0.1 exactly
        let free = LorentzMedium::dispersionless(1.0, 1.0).unwrap();
        let ms = solve_semidiscrete_modes(1, &free, 1.0, 0.1).unwrap();
        assert_eq!(ms.modes.len(), 2);
        assert_relative_eq!(ms.physical().k_hat.re, 2.0 * 0.05f64.asin(), epsilon = 1e-15);
        assert_relative_eq!(ms.physical().k_hat.re, 0.1000417, epsilon = 1e-7);
        assert_relative_eq!(ms.modes[1].k_hat.re, -ms.physical().k_hat.re);
    }

    #[test]
    fn m2_physical_and_spurious_asymptotics() {
        let free = LorentzMedium::dispersionless(1.0, 1.0).unwrap();
        for kk in [0.05, 0.02] {
            let ms = solve_semidiscrete_modes(2, &free, 1.0, kk).unwrap();
            assert_eq!(ms.modes.len(), 6);
            assert_eq!(ms.count_expected, 6);
            let ratio = ms.physical().k_hat.re / kk - 1.0;
            assert_relative_eq!(ratio / kk.powi(4), 3.0 / 640.0, max_relative = 0.01);
            // ±i·arcsinh(2√42)/K − 1/(2√7) leading term, here on the k̂/K scale
            let lead = (2.0 * 42f64.sqrt()).asinh();
            let sp: Vec<Complex64> = ms.spurious().map(|m| m.k_hat).collect();
            assert_eq!(sp.len(), 4);
            for s in sp {
                // k/k_ex = k̂/K
                let q = s / kk;
                assert!((q.im.abs() - lead / kk).abs() < 0.05, "{q}");
                assert!((q.re.abs() - 0.5 / 7f64.sqrt()).abs() < 0.01, "{q}");
            }
        }
    }

    #[test]
    fn modes_satisfy_relation() {
        let m = LorentzMedium::default();
        for order in 1..=6 {
            let ms = solve_semidiscrete_modes(order, &m, 0.9, PI / 30.0).unwrap();
            assert_eq!(ms.modes.len(), 4 * order - 2);
            assert!(ms.max_residual() < 1e-13, "M={order} res={}", ms.max_residual());
            assert_eq!(ms.physical_pair().count(), 2);
            let k = m.exact_wavenumber_at(0.9).unwrap().value * (PI / 30.0);
            assert!((ms.physical().k_hat - k).norm() < 0.01 * k.norm());
        }
    }

    #[test]
    fn fully_discrete_limit_and_residual() {
        let m = LorentzMedium::default();
        for scheme in TemporalScheme::ALL {
            for order in 1..=3 {
                let nu = 0.7 * cfl_max_fd(order).unwrap();
                let w1 = 1e-4;
                let fd = solve_fullydiscrete_modes(scheme, order, &m, 0.8, w1, nu).unwrap();
                let sd = solve_semidiscrete_modes(order, &m, 0.8, fd.omega1_h).unwrap();
                let d = (fd.physical().k_hat - sd.physical().k_hat).norm() / sd.physical().k_hat.norm();
                assert!(d < 1e-6);
                let coarse = solve_fullydiscrete_modes(scheme, order, &m, 1.3, PI / 30.0, nu).unwrap();
                assert!(coarse.max_residual() < 1e-12);
            }
        }
    }

    #[test]
    fn tp_rhs_is_rescaled_lf_rhs() {
        let m = LorentzMedium::default();
        let (w_hat, w1) = (0.7, PI / 30.0);
        let w = w_hat * w1;
        let lf = semidiscrete_wavenumber(TemporalScheme::LeapFrog, &m, w_hat, w1).unwrap().value;
        let tp = semidiscrete_wavenumber(TemporalScheme::Trapezoidal, &m, w_hat, w1).unwrap().value;
        let r = crate::temporal::r_omega(w).unwrap() / crate::temporal::s_omega(w);
        assert!((tp - lf * r).norm() < 1e-13 * tp.norm());
    }

    #[test]
    fn leading_coefficient_matches_fit() {
        let m = LorentzMedium::default();
        for scheme in TemporalScheme::ALL {
            for order in [1, 2, 3] {
                for w_hat in [0.5, 2.2] {
                    let nu = 0.6;
                    let kex = m.exact_wavenumber_at(w_hat).unwrap().value;
                    let q = |w: f64| {
                        let ms = solve_fullydiscrete_modes(scheme, order, &m, w_hat, w / w_hat, nu).unwrap();
                        (ms.physical_wavenumber(1.0) / kex - 1.0) / (w * w)
                    };
                    let (a, b) = (q(0.02), q(0.01));
                    let fit = (4.0 * b - a) / 3.0;
                    let want = fd_leading_coefficient(scheme, order, &m, w_hat, nu).unwrap();
                    assert!((fit - want).norm() < 1e-3 * want.norm(), "{scheme} M={order} ŵ={w_hat}: {fit} vs {want}");
                }
            }
        }
    }

    #[test]
    fn comparison_region_cases() {
        assert_eq!(fd_lf_comparison_region(0.5, 4.0 / 3.0).unwrap(), ComparisonRegion::Always);
        assert!(fd_lf_comparison_region(0.0, 1.0).is_err());
        assert!(fd_lf_comparison_region(1.1, 1.0).is_err());
        match fd_lf_comparison_region(0.9, 0.3).unwrap() {
            ComparisonRegion::Between { lo, hi } => {
                assert!(comparison_criterion(0.9, 0.3, lo).abs() < 1e-10);
                assert!(comparison_criterion(0.9, 0.3, hi).abs() < 1e-10);
            }
            other => panic!("{other:?}"),
        }
        match fd_lf_comparison_region(0.9, 4.0 / 3.0).unwrap() {
            ComparisonRegion::UpTo { hi } => assert!(comparison_criterion(0.9, 4.0 / 3.0, hi).abs() < 1e-10),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn comparison_region_agrees_with_coefficients() {
        for (nu, eps_s) in [(0.9, 2.8), (0.9, 5.25), (0.6, 5.25), (0.99, 3.0)] {
            let m = LorentzMedium::new(eps_s, 2.25, 0.0, 1.0).unwrap();
            let region = fd_lf_comparison_region(nu, m.eps_d() / m.eps_inf()).unwrap();
            let (blo, bhi) = m.absorption_band();
            for i in 1..800 {
                let w = i as f64 * 0.005 + 1e-4;
                let c1 = fd_leading_coefficient(TemporalScheme::LeapFrog, 1, &m, w, nu).unwrap().norm();
                let c2 = fd_leading_coefficient(TemporalScheme::LeapFrog, 2, &m, w, nu).unwrap().norm();
                let crit = comparison_criterion(nu, m.eps_d() / m.eps_inf(), w);
                if crit.abs() > 1e-6 && (w - blo).abs() > 1e-3 && (w - bhi).abs() > 1e-3 {
                    assert_eq!(c2 <= c1, region.contains(w) || m.in_band(w), "nu={nu} eps_s={eps_s} w={w}");
                }
            }
        }
    }

    #[test]
    fn band_terms_have_helpful_sign() {
        let m = LorentzMedium::new(5.25, 2.25, 0.0, 1.0).unwrap();
        let mut w = 1.01;
        while w < 1.52 {
            let eps = m.relative_permittivity(w).unwrap().re;
            assert!(m.delta(w).unwrap().re / eps <= -1.0);
            assert!(eps / (2.0 * 2.25 * 0.36) <= 0.0);
            w += 0.01;
        }
    }

    proptest! {
        #[test]
        fn symbol_representations_agree(re in -4.0f64..4.0, im in -2.0f64..2.0, m in 1usize..=6) {
            let k = Complex64::new(re, im);
            let a = fd_symbol(m, k).unwrap();
            let b = fd_symbol_from_stencil(m, k).unwrap();
            prop_assert!((a - b).norm() <= 1e-12 * a.norm().max(1e-3));
        }
    }
}
