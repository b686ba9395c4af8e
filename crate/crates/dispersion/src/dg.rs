//! Nodal discontinuous Galerkin discretization: local matrices, numerical
//! fluxes, the plane-wave symbol of the semi- and fully discrete schemes,
//! its determinant as a Laurent polynomial in `ξ = e^{ik̂}`, mode solving
//! and CFL limits.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{DispersionError, Result};
use crate::medium::LorentzMedium;
use crate::modes::{continue_physical, sort_spurious, Mode, ModeClass, ModeSet};
use crate::poly;

pub const MAX_DEGREE: usize = 8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Numerical flux `{{·}} + α[[·]]` for the fields plus `β` penalties on the
/// jumps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FluxParams {
    alpha: f64,
    beta1: f64,
    beta2: f64,
}

impl FluxParams {
    pub fn new(alpha: f64, beta1: f64, beta2: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta1 >= 0.0 && beta2 >= 0.0 && beta1.is_finite() && beta2.is_finite()) {
            return Err(DispersionError::InvalidArgument("flux penalties must be finite and nonnegative".into()));
        }
        Ok(Self { alpha, beta1, beta2 })
    }
    pub fn central() -> Self {
        Self { alpha: 0.0, beta1: 0.0, beta2: 0.0 }
    }
    pub fn alternating(alpha: f64) -> Self {
        Self { alpha: 0.5f64.copysign(alpha), beta1: 0.0, beta2: 0.0 }
    }
    pub fn upwind(eps_inf: f64) -> Self {
        let c = eps_inf.sqrt();
        Self { alpha: 0.0, beta1: 0.5 / c, beta2: 0.5 * c }
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta1(&self) -> f64 {
        self.beta1
    }
    pub fn beta2(&self) -> f64 {
        self.beta2
    }
    /// `α² + β₁β₂ = 1/4`, where the semi-discrete determinant is quadratic.
    pub fn quadratic_case(&self) -> bool {
        (self.alpha * self.alpha + self.beta1 * self.beta2 - 0.25).abs() < 1e-12
    }
    fn is_alternating(&self) -> bool {
        (self.alpha.abs() - 0.5).abs() < 1e-12 && self.beta1 == 0.0 && self.beta2 == 0.0
    }
    pub fn has_penalty(&self) -> bool {
        self.beta1 != 0.0 || self.beta2 != 0.0
    }
}

/// The named fluxes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FluxKind {
    Central,
    AlternatingPlus,
    AlternatingMinus,
    Upwind,
}

impl FluxKind {
    pub const ALL: [FluxKind; 4] = [FluxKind::Central, FluxKind::AlternatingPlus, FluxKind::AlternatingMinus, FluxKind::Upwind];

    pub fn params(self, eps_inf: f64) -> FluxParams {
        match self {
            FluxKind::Central => FluxParams::central(),
            FluxKind::AlternatingPlus => FluxParams::alternating(1.0),
            FluxKind::AlternatingMinus => FluxParams::alternating(-1.0),
            FluxKind::Upwind => FluxParams::upwind(eps_inf),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FluxKind::Central => "central",
            FluxKind::AlternatingPlus => "alt+",
            FluxKind::AlternatingMinus => "alt-",
            FluxKind::Upwind => "upwind",
        }
    }
}

impl fmt::Display for FluxKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FluxKind {
    type Err = DispersionError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "central" | "ce" => Ok(FluxKind::Central),
            "alt+" | "alternating" | "al" | "alt" => Ok(FluxKind::AlternatingPlus),
            "alt-" => Ok(FluxKind::AlternatingMinus),
            "upwind" | "up" => Ok(FluxKind::Upwind),
            other => Err(DispersionError::InvalidArgument(format!("unknown flux `{other}`"))),
        }
    }
}

/// Equispaced nodes on the reference cell `[−1/2, 1/2]`.
pub fn lagrange_nodes(p: usize) -> Vec<f64> {
    if p == 0 {
        return vec![0.0];
    }
    (0..=p).map(|n| n as f64 / p as f64 - 0.5).collect()
}

/// Gauss–Legendre points and weights on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

fn basis(nodes: &[f64], m: usize, x: f64) -> f64 {
    nodes.iter().enumerate().filter(|&(n, _)| n != m).map(|(_, &xn)| (x - xn) / (nodes[m] - xn)).product()
}

fn basis_derivative(nodes: &[f64], m: usize, x: f64) -> f64 {
    (0..nodes.len())
        .filter(|&l| l != m)
        .map(|l| {
            let mut t = 1.0 / (nodes[m] - nodes[l]);
            for (n, &xn) in nodes.iter().enumerate() {
                if n != m && n != l {
                    t *= (x - xn) / (nodes[m] - xn);
                }
            }
            t
        })
        .sum()
}

/// Reference-cell matrices (unit width).
#[derive(Debug, Clone, PartialEq)]
pub struct DgLocalMatrices {
    pub p: usize,
    /// `∫ φ_m φ_n`.
    pub mass: DMatrix<f64>,
    /// `∫ φ'_m φ_n` (derivative on the test function).
    pub stiffness: DMatrix<f64>,
}

/// Which corner-pattern family a flux block belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Family {
    Q,
    S,
}

impl DgLocalMatrices {
    fn build(p: usize) -> Self {
        let nodes = lagrange_nodes(p);
        let (gx, gw) = gauss_legendre(p + 1);
        let n = p + 1;
        let mut mass = DMatrix::zeros(n, n);
        let mut stiffness = DMatrix::zeros(n, n);
        for (&x, &w) in gx.iter().zip(&gw) {
            let (x, w) = (0.5 * x, 0.5 * w);
            for m in 0..n {
                let (fm, dfm) = (basis(&nodes, m, x), basis_derivative(&nodes, m, x));
                for k in 0..n {
                    let fk = basis(&nodes, k, x);
                    mass[(m, k)] += w * fm * fk;
                    stiffness[(m, k)] += w * dfm * fk;
                }
            }
        }
        Self { p, mass, stiffness }
    }

    fn dim(&self) -> usize {
        self.p + 1
    }

    fn block(&self, family: Family, shift: i32, z: f64) -> DMatrix<f64> {
        let (n, p) = (self.dim(), self.p);
        let mut b = DMatrix::zeros(n, n);
        match (family, shift) {
            (Family::Q, -1) => b[(0, p)] = 0.5 - z,
            (Family::Q, 1) => b[(p, 0)] = -0.5 - z,
            (Family::Q, 0) => {
                // for p = 0 both corners land on the same entry and add up
                b[(0, 0)] += 0.5 + z;
                b[(p, p)] += -0.5 + z;
            }
            (Family::S, -1) => b[(0, p)] = -z,
            (Family::S, 1) => b[(p, 0)] = -z,
            (Family::S, 0) => {
                b[(0, 0)] += z;
                b[(p, p)] += z;
            }
            _ => unreachable!("shift must be -1, 0 or 1"),
        }
        b
    }

    pub fn q_minus(&self, z: f64) -> DMatrix<f64> {
        self.block(Family::Q, -1, z)
    }
    pub fn q_zero(&self, z: f64) -> DMatrix<f64> {
        self.block(Family::Q, 0, z)
    }
    pub fn q_plus(&self, z: f64) -> DMatrix<f64> {
        self.block(Family::Q, 1, z)
    }
    pub fn s_minus(&self, z: f64) -> DMatrix<f64> {
        self.block(Family::S, -1, z)
    }
    pub fn s_zero(&self, z: f64) -> DMatrix<f64> {
        self.block(Family::S, 0, z)
    }
    pub fn s_plus(&self, z: f64) -> DMatrix<f64> {
        self.block(Family::S, 1, z)
    }

    /// `φ_m(½)φ_n(½) − φ_m(−½)φ_n(−½)`.
    pub fn boundary_matrix(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut b = DMatrix::zeros(n, n);
        b[(self.p, self.p)] += 1.0;
        b[(0, 0)] -= 1.0;
        b
    }

    /// Cell-coupling stencil `(left, centre, right)` of the derivative-type
    /// operator with flux parameter `z`: `V + Q₀`, `Q₋₁`, `Q₁`.
    pub fn derivative_stencil(&self, z: f64) -> [DMatrix<f64>; 3] {
        [self.q_minus(z), &self.stiffness + self.q_zero(z), self.q_plus(z)]
    }

    /// Cell-coupling stencil of the penalty operator `S(z)`.
    pub fn penalty_stencil(&self, z: f64) -> [DMatrix<f64>; 3] {
        [self.s_minus(z), self.s_zero(z), self.s_plus(z)]
    }
}

/// Local matrices for degree `p ≤ 8`, built once.
pub fn assemble_local(p: usize) -> Result<&'static DgLocalMatrices> {
    static TABLE: OnceLock<Vec<DgLocalMatrices>> = OnceLock::new();
    if p > MAX_DEGREE {
        return Err(DispersionError::DegreeTooLarge(p));
    }
    Ok(&TABLE.get_or_init(|| (0..=MAX_DEGREE).map(DgLocalMatrices::build).collect())[p])
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn symbol_of(stencil: &[DMatrix<f64>; 3], xi: Complex64) -> DMatrix<Complex64> {
    let [l, c, r] = stencil;
    l.map(|v| v * xi.inv()) + c.map(Complex64::from) + r.map(|v| v * xi)
}

/// Which scheme's symbol to assemble. Fully discrete variants carry
/// `W₁ = ω₁Δt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SymbolScheme {
    Semi,
    LeapFrog { w1: f64 },
    Trapezoidal { w1: f64 },
}

impl SymbolScheme {
    fn rescaled(self, sigma: f64) -> Self {
        match self {
            SymbolScheme::Semi => SymbolScheme::Semi,
            SymbolScheme::LeapFrog { w1 } => SymbolScheme::LeapFrog { w1: w1 * sigma },
            SymbolScheme::Trapezoidal { w1 } => SymbolScheme::Trapezoidal { w1: w1 * sigma },
        }
    }

    /// Whether the determinant has only three Laurent terms.
    pub fn expects_quadratic(self, flux: &FluxParams) -> bool {
        match self {
            SymbolScheme::LeapFrog { .. } => flux.is_alternating(),
            _ => flux.quadratic_case(),
        }
    }
}

/// Plane-wave symbol `A(ξ)` of a DG scheme at fixed frequency. Unknowns are
/// ordered `(H, E, P, J)`, each with `p+1` nodal values.
#[derive(Debug, Clone)]
pub struct DgSymbol {
    local: &'static DgLocalMatrices,
    flux: FluxParams,
    scheme: SymbolScheme,
    omega: f64,
    h: f64,
    eps_inf: f64,
    omega_1: f64,
    omega_p_sq: f64,
    gamma: f64,
}

pub fn assemble_symbol(
    p: usize,
    flux: FluxParams,
    medium: &LorentzMedium,
    w_hat: f64,
    omega1_h: f64,
    scheme: SymbolScheme,
) -> Result<DgSymbol> {
    let local = assemble_local(p)?;
    if !(omega1_h > 0.0) {
        return Err(DispersionError::InvalidArgument("omega1_h must be positive".into()));
    }
    // surface pole and tan-pole errors before any evaluation
    medium.relative_permittivity(w_hat)?;
    if let SymbolScheme::LeapFrog { w1 } | SymbolScheme::Trapezoidal { w1 } = scheme {
        if !(w1 > 0.0) {
            return Err(DispersionError::InvalidArgument("W1 must be positive".into()));
        }
        crate::temporal::r_omega(w_hat * w1)?;
    }
    Ok(DgSymbol {
        local,
        flux,
        scheme,
        omega: w_hat * medium.omega_1(),
        h: omega1_h / medium.omega_1(),
        eps_inf: medium.eps_inf(),
        omega_1: medium.omega_1(),
        omega_p_sq: medium.omega_p_sq(),
        gamma: medium.gamma(),
    })
}

impl DgSymbol {
    pub fn p(&self) -> usize {
        self.local.p
    }
    pub fn h(&self) -> f64 {
        self.h
    }
    pub fn flux(&self) -> FluxParams {
        self.flux
    }
    pub fn scheme(&self) -> SymbolScheme {
        self.scheme
    }
    pub fn dim(&self) -> usize {
        4 * (self.local.p + 1)
    }

    /// `(P, P̃, R, R̃)` at `ξ`.
    pub fn flux_symbols(&self, xi: Complex64) -> [DMatrix<Complex64>; 4] {
        let f = &self.flux;
        [
            symbol_of(&self.local.derivative_stencil(f.alpha), xi),
            symbol_of(&self.local.derivative_stencil(-f.alpha), xi),
            symbol_of(&self.local.penalty_stencil(f.beta1), xi),
            symbol_of(&self.local.penalty_stencil(f.beta2), xi),
        ]
    }

    pub fn matrix(&self, xi: Complex64) -> DMatrix<Complex64> {
        self.matrix_at(xi, Complex64::from(self.omega))
    }

    /// `A(ξ)` at an arbitrary complex frequency.
    pub fn matrix_at(&self, xi: Complex64, omega: Complex64) -> DMatrix<Complex64> {
        let n = self.local.p + 1;
        let mass = self.local.mass.map(|v| Complex64::from(v * self.h));
        let eye = DMatrix::<Complex64>::identity(n, n);
        let [p, pt, r, rt] = self.flux_symbols(xi);
        let (w1sq, wp2, g) = (self.omega_1 * self.omega_1, self.omega_p_sq, self.gamma);
        let mut a = DMatrix::<Complex64>::zeros(4 * n, 4 * n);
        let mut put = |bi: usize, bj: usize, m: DMatrix<Complex64>| a.view_mut((bi * n, bj * n), (n, n)).copy_from(&m);
        match self.scheme {
            SymbolScheme::Semi => {
                let iw = I * omega;
                put(0, 0, &mass * -iw + &r);
                put(0, 1, p);
                put(1, 0, pt);
                put(1, 1, &mass * (-iw * self.eps_inf) + &rt);
                put(1, 2, &mass * -iw);
                put(2, 2, &eye * -iw);
                put(2, 3, -&eye);
                put(3, 1, &eye * re(-wp2));
                put(3, 2, &eye * re(w1sq));
                put(3, 3, &eye * (-iw + 2.0 * g));
            }
            SymbolScheme::LeapFrog { w1 } | SymbolScheme::Trapezoidal { w1 } => {
                let dt = w1 / self.omega_1;
                let half = omega * (0.5 * dt);
                let (sn, cs) = (half.sin(), half.cos());
                let hdt = 0.5 * dt;
                let pc = if matches!(self.scheme, SymbolScheme::Trapezoidal { .. }) { cs * hdt } else { re(hdt) };
                put(0, 0, &mass * (-I * sn) + &r * (cs * hdt));
                put(0, 1, p * pc);
                put(1, 0, pt * pc);
                put(1, 1, &mass * (-I * sn * self.eps_inf) + &rt * (cs * hdt));
                put(1, 2, &mass * (-I * sn));
                put(2, 2, &eye * (I * sn));
                put(2, 3, &eye * (cs * hdt));
                put(3, 1, &eye * (cs * (wp2 * hdt)));
                put(3, 2, &eye * (cs * (-w1sq * hdt)));
                put(3, 3, &eye * (I * sn - cs * (g * dt)));
            }
        }
        a
    }

    /// Complex frequency `ω` with `det A(ξ, ω) = 0` near `guess`, by secant
    /// iteration. This is the time-domain view: a fixed real wavenumber
    /// decays in time when the scheme is dissipative.
    pub fn frequency_root(&self, xi: Complex64, guess: Complex64) -> Result<Complex64> {
        let f = |w: Complex64| self.matrix_at(xi, w).lu().determinant();
        let step = 1e-7 * guess.norm().max(1e-3);
        let (mut w0, mut w1) = (guess, guess + step);
        let (mut f0, mut f1) = (f(w0), f(w1));
        for _ in 0..60 {
            let denom = f1 - f0;
            if denom.norm() == 0.0 {
                break;
            }
            let w2 = w1 - f1 * (w1 - w0) / denom;
            if !(w2.re.is_finite() && w2.im.is_finite()) {
                break;
            }
            (w0, f0) = (w1, f1);
            w1 = w2;
            f1 = f(w1);
            if (w1 - w0).norm() <= 1e-14 * w1.norm() {
                return Ok(w1);
            }
        }
        Err(DispersionError::RootSolveFailed(format!("frequency secant from {guess} did not converge")))
    }

    pub fn determinant(&self, xi: Complex64) -> Complex64 {
        self.matrix(xi).lu().determinant()
    }

    /// Unit null vector of `A(ξ)` (right singular vector of the smallest
    /// singular value) and that singular value relative to the largest.
    pub fn null_vector(&self, xi: Complex64) -> Result<(DVector<Complex64>, f64)> {
        let svd = self.matrix(xi).svd(false, true);
        let vt = svd.v_t.ok_or(DispersionError::EigenFailed)?;
        let (imin, smin) = svd.singular_values.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).ok_or(DispersionError::EigenFailed)?;
        let smax = svd.singular_values.max();
        let v = vt.row(imin).adjoint();
        Ok((v, smin / smax))
    }
}

/// `det A(ξ) = Σ_{j=−2}^{2} C_j ξ^j`; `coeffs[j + 2] = C_j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaurentCoefficients {
    pub coeffs: [Complex64; 5],
}

impl LaurentCoefficients {
    pub fn c(&self, j: i32) -> Complex64 {
        self.coeffs[(j + 2) as usize]
    }

    pub fn eval(&self, xi: Complex64) -> Complex64 {
        (-2..=2).map(|j| self.c(j) * xi.powi(j)).sum()
    }

    pub fn scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `|C_{±2}| ≤ tol · max|C_j|`.
    pub fn is_quadratic(&self, tol: f64) -> bool {
        let s = self.scale();
        self.c(2).norm() <= tol * s && self.c(-2).norm() <= tol * s
    }

    /// Ascending polynomial coefficients of `ξ² det`.
    fn polynomial(&self) -> Vec<Complex64> {
        self.coeffs.to_vec()
    }
}

/// Tolerance separating vanishing from genuine outer Laurent coefficients.
pub const QUADRATIC_TOL: f64 = 1e-10;

/// Extract the five Laurent coefficients of `det A(ξ)` from samples at the
/// fifth roots of unity (a 5-point DFT, i.e. the Vandermonde solve on the
/// unit circle, whose condition number is 1). An extra off-circle sample
/// guards against higher powers leaking in.
pub fn dispersion_polynomial(symbol: &DgSymbol) -> Result<LaurentCoefficients> {
    laurent_from_samples(|xi| symbol.determinant(xi))
}

pub fn laurent_from_samples(det: impl Fn(Complex64) -> Complex64) -> Result<LaurentCoefficients> {
    let roots: Vec<Complex64> = (0..5).map(|n| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * n as f64 / 5.0)).collect();
    let samples: Vec<Complex64> = roots.iter().map(|&x| det(x)).collect();
    let mut coeffs = [ZERO; 5];
    for (j, c) in (-2i32..=2).zip(coeffs.iter_mut()) {
        *c = roots.iter().zip(&samples).map(|(&x, &d)| d * x.powi(-j)).sum::<Complex64>() / 5.0;
    }
    let lc = LaurentCoefficients { coeffs };
    let probe = Complex64::from_polar(1.37, 0.4117);
    let want = det(probe);
    let scale = (-2..=2).map(|j| lc.c(j).norm() * probe.norm().powi(j)).sum::<f64>();
    let defect = (lc.eval(probe) - want).norm() / scale.max(f64::MIN_POSITIVE);
    if !(defect < 1e-8) {
        return Err(DispersionError::IllConditionedExtraction(defect));
    }
    Ok(lc)
}

fn roots_in_xi(lc: &LaurentCoefficients, quadratic: bool) -> Result<Vec<Complex64>> {
    let mut poly_c = lc.polynomial();
    if quadratic {
        poly_c = poly_c[1..4].to_vec();
    }
    let rs = poly::roots(&poly_c)?;
    if rs.iter().any(|r| r.norm() == 0.0 || !r.re.is_finite() || !r.im.is_finite()) {
        return Err(DispersionError::RootSolveFailed("degenerate root in ξ".into()));
    }
    Ok(rs)
}

/// `k̂ = −i log ξ` on the principal branch; a root sitting on the cut is
/// nudged so that the result is deterministic.
pub fn k_hat_from_xi(xi: Complex64) -> Complex64 {
    let mut x = xi;
    if x.im == 0.0 && x.re < 0.0 {
        x.im = 1e-12 * x.re.abs();
    }
    -I * x.ln()
}

/// All roots at the requested mesh, plus the `k̂` lists at the nested
/// meshes used for continuation.
fn dg_levels(
    p: usize,
    flux: FluxParams,
    medium: &LorentzMedium,
    w_hat: f64,
    omega1_h: f64,
    scheme: SymbolScheme,
) -> Result<(Vec<Vec<Complex64>>, LaurentCoefficients, usize)> {
    let expect_quad = scheme.expects_quadratic(&flux);
    let count = if expect_quad { 2 } else { 4 };
    let mut levels = Vec::with_capacity(3);
    let mut top = None;
    for j in 0..3 {
        let sigma = 0.5f64.powi(j);
        let sym = assemble_symbol(p, flux, medium, w_hat, omega1_h * sigma, scheme.rescaled(sigma))?;
        let lc = dispersion_polynomial(&sym)?;
        if lc.is_quadratic(QUADRATIC_TOL) != expect_quad {
            let found = if lc.is_quadratic(QUADRATIC_TOL) { 2 } else { 4 };
            return Err(DispersionError::ModeCountMismatch { expected: count, found });
        }
        let ks: Vec<Complex64> = roots_in_xi(&lc, expect_quad)?.into_iter().map(k_hat_from_xi).collect();
        levels.push(ks);
        if j == 0 {
            top = Some(lc);
        }
    }
    Ok((levels, top.expect("first level computed"), count))
}

/// DG modes at `w_hat`. Physical modes are the roots that continue to
/// `±k_ex h` under mesh refinement.
pub fn solve_dg_modes(
    p: usize,
    flux: FluxParams,
    medium: &LorentzMedium,
    w_hat: f64,
    omega1_h: f64,
    scheme: SymbolScheme,
) -> Result<ModeSet> {
    let (levels, lc, count) = dg_levels(p, flux, medium, w_hat, omega1_h, scheme)?;
    let kk = medium.exact_wavenumber_at(w_hat)?.value * (omega1_h / medium.omega_1()) * 0.25;
    let plus = continue_physical(&levels, kk).ok_or_else(|| DispersionError::RootSolveFailed("no roots".into()))?;
    let minus = continue_physical(&levels, -kk).ok_or_else(|| DispersionError::RootSolveFailed("no roots".into()))?;
    if plus == minus {
        return Err(DispersionError::RootSolveFailed("physical pair not separated".into()));
    }
    let scale = lc.scale();
    let residual = |k: Complex64| {
        let xi = (I * k).exp();
        let mag: f64 = (-2..=2).map(|j| lc.c(j).norm() * xi.norm().powi(j)).sum();
        lc.eval(xi).norm() / mag.max(scale * f64::EPSILON)
    };
    let mk = |k: Complex64, class| Mode { k_hat: k, class, residual: residual(k) };
    let top = &levels[0];
    let mut modes = vec![mk(top[plus], ModeClass::Physical), mk(top[minus], ModeClass::Physical)];
    let mut spurious: Vec<Mode> = top
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != plus && *i != minus)
        .map(|(_, &k)| mk(k, ModeClass::Spurious))
        .collect();
    sort_spurious(&mut spurious);
    modes.extend(spurious);
    Ok(ModeSet { modes, w_hat, omega1_h, count_expected: count })
}

/// `b = ω(β₁ε + β₂)` and `B = b h`.
pub fn b_quantity(flux: &FluxParams, medium: &LorentzMedium, w_hat: f64, h: f64) -> Result<(Complex64, Complex64)> {
    let eps = medium.relative_permittivity(w_hat)?;
    let b = w_hat * medium.omega_1() * (flux.beta1 * eps + flux.beta2);
    Ok((b, b * h))
}

fn cholesky_inverse_factor(mass: &DMatrix<f64>) -> DMatrix<f64> {
    let l = mass.clone().cholesky().expect("mass matrix is SPD").l();
    l.try_inverse().expect("triangular factor invertible")
}

/// Largest generalized eigenvalue of `(K, M)` for symmetric `K` and SPD `M`.
fn max_generalized_eigenvalue(k: &DMatrix<f64>, mass: &DMatrix<f64>) -> f64 {
    let li = cholesky_inverse_factor(mass);
    let c = &li * k * li.transpose();
    let c = (&c + c.transpose()) * 0.5;
    c.symmetric_eigenvalues().max()
}

/// Constants of the discrete inverse and trace inequalities on the
/// reference cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellConstants {
    /// `max ‖u'‖/‖u‖`.
    pub inverse: f64,
    /// `max (u(½)² + u(−½)²)/‖u‖²`.
    pub trace_both: f64,
    /// `max u(½)²/‖u‖²`.
    pub trace_one: f64,
}

pub fn cell_constants(p: usize) -> Result<CellConstants> {
    let local = assemble_local(p)?;
    let n = p + 1;
    let minv = local.mass.clone().try_inverse().expect("mass invertible");
    let k = &local.stiffness * &minv * local.stiffness.transpose();
    let inverse = max_generalized_eigenvalue(&k, &local.mass).max(0.0).sqrt();
    let mut ends = DMatrix::zeros(n, n);
    ends[(0, 0)] += 1.0;
    ends[(p, p)] += 1.0;
    let trace_both = max_generalized_eigenvalue(&ends, &local.mass);
    let trace_one = minv[(p, p)];
    Ok(CellConstants { inverse, trace_both, trace_one })
}

/// CFL limit of leap-frog DG from the discrete energy estimate,
/// `ν = 2/(C_inv + C_flux)`. Central and upwind fluxes see both cell traces,
/// `C_flux = C_tr,both`; the alternating flux couples a one-sided trace with
/// the neighbour's two-sided one, `C_flux = √(2 C_tr,one C_tr,both)`.
pub fn cfl_max_dg(p: usize, flux: FluxKind) -> Result<f64> {
    let c = cell_constants(p)?;
    let c_flux = match flux {
        FluxKind::Central | FluxKind::Upwind => c.trace_both,
        FluxKind::AlternatingPlus | FluxKind::AlternatingMinus => (2.0 * c.trace_one * c.trace_both).sqrt(),
    };
    Ok(2.0 / (c.inverse + c_flux))
}

/// One-step amplification matrix of leap-frog DG in free space acting on
/// `(H^{n−½}, E^n)`, at `θ = k̂`, with `h = 1` and `Δt = ν√ε_∞`.
pub fn lf_amplification(p: usize, flux: FluxParams, eps_inf: f64, nu: f64, theta: f64) -> Result<DMatrix<Complex64>> {
    let local = assemble_local(p)?;
    let n = p + 1;
    let dt = nu * eps_inf.sqrt();
    let xi = Complex64::from_polar(1.0, theta);
    let sym = DgSymbol {
        local,
        flux,
        scheme: SymbolScheme::Semi,
        omega: 0.0,
        h: 1.0,
        eps_inf,
        omega_1: 1.0,
        omega_p_sq: 0.0,
        gamma: 0.0,
    };
    let [pm, ptm, r, rt] = sym.flux_symbols(xi);
    let m = local.mass.map(Complex64::from);
    let a1 = &m + &r * re(0.5 * dt);
    let b1 = &m - &r * re(0.5 * dt);
    let a2 = &m * re(eps_inf) + &rt * re(0.5 * dt);
    let b2 = &m * re(eps_inf) - &rt * re(0.5 * dt);
    let lu1 = a1.lu();
    let lu2 = a2.lu();
    let solve = |lu: &nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>, rhs: DMatrix<Complex64>| {
        lu.solve(&rhs).ok_or(DispersionError::SingularImplicitSystem)
    };
    let gh_h = solve(&lu1, b1)?;
    let gh_e = solve(&lu1, pm * re(-dt))?;
    let coupling = solve(&lu2, ptm * re(-dt))?;
    let ge_h = &coupling * &gh_h;
    let ge_e = solve(&lu2, b2)? + &coupling * &gh_e;
    let mut g = DMatrix::zeros(2 * n, 2 * n);
    g.view_mut((0, 0), (n, n)).copy_from(&gh_h);
    g.view_mut((0, n), (n, n)).copy_from(&gh_e);
    g.view_mut((n, 0), (n, n)).copy_from(&ge_h);
    g.view_mut((n, n), (n, n)).copy_from(&ge_e);
    Ok(g)
}

fn spectral_radius(g: DMatrix<Complex64>) -> Result<f64> {
    let ev = poly::eigenvalues(&g).ok_or(DispersionError::EigenFailed)?;
    Ok(ev.iter().map(|e| e.norm()).fold(0.0, f64::max))
}

/// Sharp von Neumann limit: bisection on the largest ν for which the
/// free-space amplification matrix has spectral radius `≤ 1 + 1e-12` on 1024
/// samples of `k̂ ∈ [0, π]`.
pub fn cfl_max_dg_spectral(p: usize, flux: FluxKind) -> Result<f64> {
    let eps_inf = 1.0;
    let params = flux.params(eps_inf);
    let stable = |nu: f64| -> Result<bool> {
        for i in 0..1024 {
            let theta = std::f64::consts::PI * i as f64 / 1023.0;
            if spectral_radius(lf_amplification(p, params, eps_inf, nu, theta)?)? > 1.0 + 1e-12 {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let (mut lo, mut hi) = (1e-3f64, 4.0f64);
    if stable(hi)? {
        return Err(DispersionError::BisectionFailed(format!("still stable at ν = {hi}")));
    }
    if !stable(lo)? {
        return Err(DispersionError::BisectionFailed("unstable at ν = 1e-3".into()));
    }
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if stable(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn close(a: &DMatrix<f64>, b: &DMatrix<f64>) -> bool {
        (a - b).abs().max() < 1e-14
    }

    #[test]
    fn nodes_and_quadrature() {
        assert_eq!(lagrange_nodes(0), vec![0.0]);
        assert_eq!(lagrange_nodes(1), vec![-0.5, 0.5]);
        assert_eq!(lagrange_nodes(2), vec![-0.5, 0.0, 0.5]);
        for n in 1..=9 {
            let (x, w) = gauss_legendre(n);
            assert_relative_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-14);
            // exact for degree 2n−1
            let d = 2 * n - 2;
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(d as i32)).sum();
            assert_relative_eq!(q, 2.0 / (d + 1) as f64, epsilon = 1e-14);
        }
    }

    #[test]
    fn p1_local_matrices() {
        let l = assemble_local(1).unwrap();
        assert!(close(&l.mass, &DMatrix::from_row_slice(2, 2, &[1.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0])));
        assert!(close(&l.stiffness, &DMatrix::from_row_slice(2, 2, &[-0.5, -0.5, 0.5, 0.5])));
        let l0 = assemble_local(0).unwrap();
        assert_eq!(l0.mass[(0, 0)], 1.0);
        assert_eq!(l0.stiffness[(0, 0)], 0.0);
        assert_relative_eq!(l0.q_zero(0.3)[(0, 0)], 0.6, epsilon = 1e-15);
        assert_relative_eq!(l0.s_zero(0.3)[(0, 0)], 0.6, epsilon = 1e-15);
        assert!(matches!(assemble_local(9), Err(DispersionError::DegreeTooLarge(9))));
    }

    #[test]
    fn local_matrix_invariants() {
        for p in 0..=MAX_DEGREE {
            let l = assemble_local(p).unwrap();
            assert!((&l.mass - l.mass.transpose()).abs().max() < 1e-15);
            assert!(l.mass.clone().cholesky().is_some());
            let parts = &l.stiffness + l.stiffness.transpose();
            assert!((parts - l.boundary_matrix()).abs().max() < 1e-12, "p={p}");
            assert_relative_eq!(l.mass.sum(), 1.0, epsilon = 1e-13);
            if p > 0 {
                let z = 0.37;
                let count = |m: DMatrix<f64>| m.iter().filter(|v| **v != 0.0).count();
                assert_eq!(count(l.q_minus(z)), 1);
                assert_eq!(l.q_minus(z)[(0, p)], 0.5 - z);
                assert_eq!(l.q_plus(z)[(p, 0)], -0.5 - z);
                assert_eq!(count(l.q_zero(z)), 2);
                assert_eq!(l.q_zero(z)[(0, 0)], 0.5 + z);
                assert_eq!(l.q_zero(z)[(p, p)], -0.5 + z);
                assert_eq!(l.s_minus(z)[(0, p)], -z);
                assert_eq!(l.s_plus(z)[(p, 0)], -z);
                assert_eq!(l.s_zero(z)[(p, p)], z);
                assert_eq!(count(l.s_zero(z)), 2);
            }
        }
    }

    /// Closed-form p = 0 determinant with central-type flux, up to the
    /// polarization factor `(ω₁² − ω² − 2iγω)/4`.
    fn p0_oracle(flux: &FluxParams, m: &LorentzMedium, w_hat: f64, h: f64, xi: Complex64) -> Complex64 {
        let s = flux.alpha() * flux.alpha() + flux.beta1() * flux.beta2();
        let omega = w_hat * m.omega_1();
        let eps = m.relative_permittivity(w_hat).unwrap();
        let b = omega * (flux.beta1() * eps + flux.beta2()) * h;
        let k2 = omega * omega * eps * h * h;
        let f = (xi.powi(-2) + xi.powi(2)) * (4.0 * s - 1.0)
            + (xi.inv() + xi) * 4.0 * (I * b - 4.0 * s)
            + 2.0 * (1.0 + 12.0 * s - 4.0 * I * b - 2.0 * k2);
        let w1 = m.omega_1();
        let ode = Complex64::new(w1 * w1 - omega * omega, -2.0 * m.gamma() * omega);
        f * ode / 4.0
    }

    #[test]
    fn p0_determinant_closed_form() {
        let m = LorentzMedium::new(5.25, 2.25, 0.01, 1.3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for flux in [FluxParams::central(), FluxParams::alternating(1.0), FluxParams::upwind(2.25), FluxParams::new(0.2, 0.3, 0.1).unwrap()] {
            let sym = assemble_symbol(0, flux, &m, 0.7, 0.37 * 1.3, SymbolScheme::Semi).unwrap();
            for _ in 0..20 {
                let xi = Complex64::from_polar(1.0, rng.gen_range(-PI..PI));
                let want = p0_oracle(&flux, &m, 0.7, 0.37, xi);
                let got = sym.determinant(xi);
                assert!((got - want).norm() < 1e-12 * want.norm(), "{got} vs {want}");
            }
        }
    }

    #[test]
    fn alternating_p0_is_fd2() {
        let m = LorentzMedium::default();
        for w_hat in [0.3, 0.9, 1.2, 2.0] {
            for oh in [PI / 30.0, 0.3] {
                let dg = solve_dg_modes(0, FluxParams::alternating(1.0), &m, w_hat, oh, SymbolScheme::Semi).unwrap();
                let fd = crate::fd::solve_semidiscrete_modes(1, &m, w_hat, oh).unwrap();
                assert!((dg.physical().k_hat - fd.physical().k_hat).norm() < 1e-12 * fd.physical().k_hat.norm());
            }
        }
    }

    #[test]
    fn free_space_determinant_factorizes() {
        let m = LorentzMedium::dispersionless(2.25, 1.0).unwrap();
        for p in 0..=3 {
            let sym = assemble_symbol(p, FluxParams::upwind(2.25), &m, 0.8, 0.2, SymbolScheme::Semi).unwrap();
            let xi = Complex64::from_polar(1.0, 0.7);
            let a = sym.matrix(xi);
            let n = p + 1;
            let top = a.view((0, 0), (2 * n, 2 * n)).into_owned().determinant();
            let bottom = a.view((2 * n, 2 * n), (2 * n, 2 * n)).into_owned().determinant();
            assert!(a.view((2 * n, 0), (2 * n, 2 * n)).iter().all(|z| z.norm() == 0.0));
            let full = a.determinant();
            assert!((full - top * bottom).norm() < 1e-12 * full.norm());
        }
    }

    #[test]
    fn laurent_round_trip() {
        let want = [Complex64::new(0.3, -1.0), Complex64::new(2.0, 0.5), Complex64::new(-1.0, 0.0), Complex64::new(0.0, 4.0), Complex64::new(1.5, 1.5)];
        let lc = laurent_from_samples(|x| (-2..=2).map(|j| want[(j + 2) as usize] * x.powi(j)).sum()).unwrap();
        for (a, b) in lc.coeffs.iter().zip(want) {
            assert!((a - b).norm() < 1e-14);
        }
        assert!(matches!(laurent_from_samples(|x| x.powi(3)), Err(DispersionError::IllConditionedExtraction(_))));
    }

    #[test]
    fn quadratic_cases_follow_theorems() {
        let m = LorentzMedium::default();
        let oh = 0.2;
        let schemes = [SymbolScheme::Semi, SymbolScheme::LeapFrog { w1: 0.05 }, SymbolScheme::Trapezoidal { w1: 0.05 }];
        for scheme in schemes {
            for p in 0..=3 {
                for kind in FluxKind::ALL {
                    let flux = kind.params(m.eps_inf());
                    let lc = dispersion_polynomial(&assemble_symbol(p, flux, &m, 0.8, oh, scheme).unwrap()).unwrap();
                    let quad = lc.is_quadratic(QUADRATIC_TOL);
                    let want = match (scheme, kind) {
                        (_, FluxKind::AlternatingPlus | FluxKind::AlternatingMinus) => true,
                        (_, FluxKind::Central) => false,
                        (SymbolScheme::LeapFrog { .. }, FluxKind::Upwind) => false,
                        (_, FluxKind::Upwind) => true,
                    };
                    assert_eq!(quad, want, "{scheme:?} p={p} {kind}");
                    if !want && (kind == FluxKind::Central) {
                        assert!(lc.c(2).norm() > 1e-8 * lc.scale() && lc.c(-2).norm() > 1e-8 * lc.scale(), "{scheme:?} p={p}");
                    }
                    let ms = solve_dg_modes(p, flux, &m, 0.8, oh, scheme).unwrap();
                    assert_eq!(ms.modes.len(), if want { 2 } else { 4 });
                    assert_eq!(ms.physical_pair().count(), 2);
                    assert!(ms.max_residual() < 1e-10, "{scheme:?} p={p} {kind}: {}", ms.max_residual());
                }
            }
        }
        // general α² + β₁β₂ = 1/4 with every parameter nonzero
        let flux = FluxParams::new(0.3, 0.4, 0.4).unwrap();
        assert!(flux.quadratic_case());
        for p in 0..=3 {
            let lc = dispersion_polynomial(&assemble_symbol(p, flux, &m, 0.8, oh, SymbolScheme::Semi).unwrap()).unwrap();
            assert!(lc.is_quadratic(QUADRATIC_TOL));
        }
    }

    fn physical_ratio(p: usize, kind: FluxKind, m: &LorentzMedium, w_hat: f64, oh: f64) -> Complex64 {
        let ms = solve_dg_modes(p, kind.params(m.eps_inf()), m, w_hat, oh, SymbolScheme::Semi).unwrap();
        ms.physical_wavenumber(m.omega_1()) / m.exact_wavenumber_at(w_hat).unwrap().value
    }

    #[test]
    fn asymptotic_coefficients() {
        let m = LorentzMedium::new(5.25, 2.25, 0.0, 1.0).unwrap();
        let w_hat = 0.5;
        let kex = m.exact_wavenumber_at(w_hat).unwrap().value.re;
        let oh = 0.02;
        let kk = kex * oh;
        let alt = (physical_ratio(0, FluxKind::AlternatingPlus, &m, w_hat, oh) - 1.0).re / (kk * kk);
        assert_relative_eq!(alt, 1.0 / 24.0, max_relative = 1e-3);
        let oh = 0.2;
        let kk = kex * oh;
        let ce = (physical_ratio(2, FluxKind::Central, &m, w_hat, oh) - 1.0).re / kk.powi(6);
        assert_relative_eq!(ce, 1.0 / 16800.0, max_relative = 0.02);
        let oh = 1e-3;
        let (_, b) = b_quantity(&FluxParams::upwind(2.25), &m, w_hat, oh).unwrap();
        let up = physical_ratio(0, FluxKind::Upwind, &m, w_hat, oh) - 1.0;
        assert!((up - I * b * 0.5).norm() < 0.01 * b.norm(), "{up} vs {}", I * b * 0.5);
    }

    #[test]
    fn alternating_signs_agree() {
        let m = LorentzMedium::default();
        for p in 0..=3 {
            for scheme in [SymbolScheme::Semi, SymbolScheme::LeapFrog { w1: 0.1 }, SymbolScheme::Trapezoidal { w1: 0.1 }] {
                let a = solve_dg_modes(p, FluxParams::alternating(1.0), &m, 0.9, 0.3, scheme).unwrap().physical().k_hat;
                let b = solve_dg_modes(p, FluxParams::alternating(-1.0), &m, 0.9, 0.3, scheme).unwrap().physical().k_hat;
                assert!((a - b).norm() < 1e-12 * a.norm(), "p={p} {scheme:?}");
            }
        }
    }

    #[test]
    fn b_quantity_examples() {
        let m = LorentzMedium::new(5.25, 2.25, 0.0, 1.0).unwrap();
        assert_eq!(b_quantity(&FluxParams::central(), &m, 0.7, 0.1).unwrap().0, Complex64::new(0.0, 0.0));
        assert_eq!(b_quantity(&FluxParams::alternating(1.0), &m, 0.7, 0.1).unwrap().1, Complex64::new(0.0, 0.0));
        let up = FluxParams::upwind(2.25);
        let zero = (1.0 + m.eps_d() / (2.0 * m.eps_inf())).sqrt();
        assert_relative_eq!(zero, 1.2909944, epsilon = 1e-7);
        assert!(b_quantity(&up, &m, zero, 0.1).unwrap().1.norm() < 1e-14);
        let (b1, bb1) = b_quantity(&up, &m, 0.7, 0.1).unwrap();
        let (b2, bb2) = b_quantity(&up, &m, 0.7, 0.2).unwrap();
        assert_eq!(b1, b2);
        assert!((bb2 - bb1 * 2.0).norm() < 1e-15);
    }

    #[test]
    fn cfl_table_values() {
        let ce = [1.0, 0.211325, 0.101287, 0.0605268];
        let al = [1.0, 0.192450, 0.089115, 0.0521629];
        for p in 0..=3 {
            assert!((cfl_max_dg(p, FluxKind::Central).unwrap() - ce[p]).abs() < 1e-6);
            assert!((cfl_max_dg(p, FluxKind::Upwind).unwrap() - ce[p]).abs() < 1e-6);
            assert!((cfl_max_dg(p, FluxKind::AlternatingPlus).unwrap() - al[p]).abs() < 1e-6);
        }
        let c = cell_constants(1).unwrap();
        assert_relative_eq!(c.inverse, 12f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(c.trace_both, 6.0, epsilon = 1e-12);
        assert_relative_eq!(c.trace_one, 4.0, epsilon = 1e-12);
    }

    #[test]
    fn energy_bound_is_below_sharp_limit() {
        for p in 0..=2 {
            for kind in [FluxKind::Central, FluxKind::AlternatingPlus, FluxKind::Upwind] {
                let sharp = cfl_max_dg_spectral(p, kind).unwrap();
                let energy = cfl_max_dg(p, kind).unwrap();
                assert!(energy <= sharp + 1e-6, "p={p} {kind}: {energy} > {sharp}");
            }
        }
        assert!((cfl_max_dg_spectral(1, FluxKind::AlternatingPlus).unwrap() - 1.0 / 3.0).abs() < 1e-5);
    }

    #[test]
    fn fully_discrete_leading_terms() {
        let m = LorentzMedium::default();
        let w_hat = 0.6;
        let kex = m.exact_wavenumber_at(w_hat).unwrap().value;
        let cases = [(FluxKind::AlternatingPlus, 1), (FluxKind::AlternatingPlus, 2), (FluxKind::Central, 2), (FluxKind::Upwind, 3)];
        for (kind, p) in cases {
            let nu = 0.9 * cfl_max_dg(p, kind).unwrap();
            for (temporal, scheme_of) in [
                (crate::temporal::TemporalScheme::LeapFrog, (|w1| SymbolScheme::LeapFrog { w1 }) as fn(f64) -> SymbolScheme),
                (crate::temporal::TemporalScheme::Trapezoidal, |w1| SymbolScheme::Trapezoidal { w1 }),
            ] {
                let q = |w: f64| {
                    let w1 = w / w_hat;
                    let oh = crate::fd::omega1_h_from_cfl(&m, w1, nu);
                    let ms = solve_dg_modes(p, kind.params(2.25), &m, w_hat, oh, scheme_of(w1)).unwrap();
                    (ms.physical_wavenumber(1.0) / kex - 1.0) / (w * w)
                };
                let fit = (4.0 * q(0.005) - q(0.01)) / 3.0;
                let want = crate::temporal::leading_error_coefficient(temporal, &m, w_hat).unwrap();
                assert!((fit - want).norm() < 0.05 * want.norm(), "{kind} p={p} {temporal}: {fit} vs {want}");
            }
        }
    }
}
