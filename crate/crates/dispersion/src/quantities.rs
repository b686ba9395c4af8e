//! Normalized phase velocity, attenuation, energy velocity and group
//! velocity of a scheme's physical mode relative to the exact medium.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{DispersionError, Result};
use crate::medium::{ComplexWavenumber, LorentzMedium};
use crate::scheme::SchemeSpec;

/// Fixed forward-difference step in `ŵ` for group velocities.
pub const GROUP_VELOCITY_STEP: f64 = 1e-3;

/// Below this `|Im ψ_exact|` the attenuation ratio is undefined.
pub const ATTENUATION_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum PsiSource {
    Exact,
    Scheme(SchemeSpec),
}

/// Complex index of refraction `ψ = k/ω`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RefractionData {
    pub psi: Complex64,
    pub source: PsiSource,
}

impl RefractionData {
    pub fn of(spec: &SchemeSpec, medium: &LorentzMedium, w_hat: f64) -> Result<Self> {
        let omega = w_hat * medium.omega_1();
        let k = spec.physical_wavenumber(medium, w_hat)?;
        let source = if spec.is_exact() { PsiSource::Exact } else { PsiSource::Scheme(*spec) };
        Ok(RefractionData { psi: psi(ComplexWavenumber::plus(k), omega)?, source })
    }
}

/// One row of a quantity sweep. `None` marks an entry whose exact
/// denominator vanishes at this frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuantityRow {
    pub w_hat: f64,
    pub norm_phase_velocity: Option<f64>,
    pub norm_attenuation: Option<f64>,
    pub norm_energy_velocity: Option<f64>,
    pub norm_group_velocity: Option<f64>,
}

pub fn psi(k: ComplexWavenumber, omega: f64) -> Result<Complex64> {
    if omega == 0.0 {
        return Err(DispersionError::ZeroFrequency);
    }
    if omega < 0.0 {
        return Err(DispersionError::NegativeFrequency(omega));
    }
    Ok(k.value / omega)
}

/// `Re(1/ψ_N)/Re(1/ψ_E)`.
pub fn normalized_phase_velocity(psi_n: Complex64, psi_e: Complex64) -> Result<f64> {
    let ve = psi_e.inv();
    if ve.re.abs() <= 1e-14 * ve.norm() || !ve.re.is_finite() {
        return Err(DispersionError::DegenerateExact);
    }
    Ok(psi_n.inv().re / ve.re)
}

/// `Im ψ_N/Im ψ_E`, or `None` when the exact wave does not attenuate.
pub fn normalized_attenuation(psi_n: Complex64, psi_e: Complex64) -> Option<f64> {
    (psi_e.im.abs() >= ATTENUATION_FLOOR).then(|| psi_n.im / psi_e.im)
}

/// Energy transport velocity of a plane wave with index `ψ`.
pub fn energy_velocity(psi: Complex64, medium: &LorentzMedium) -> Result<f64> {
    if psi.re == 0.0 || medium.eps_d() == 0.0 {
        return Err(DispersionError::DegeneratePsi);
    }
    let sq = psi * psi;
    let (es, ei) = (medium.eps_s(), medium.eps_inf());
    let bracket = psi.re + ((sq.re - es) * (sq.re - ei) + sq.im * sq.im) / ((es - ei) * psi.re);
    if bracket == 0.0 {
        return Err(DispersionError::DegeneratePsi);
    }
    Ok(bracket.recip())
}

pub fn normalized_energy_velocity(psi_n: Complex64, psi_e: Complex64, medium: &LorentzMedium) -> Result<f64> {
    Ok(energy_velocity(psi_n, medium)? / energy_velocity(psi_e, medium)?)
}

/// `1/v_g ≈ [k(ŵ + 0.001) − k(ŵ)]/0.001 · 1/ω₁`.
pub fn inverse_group_velocity(k_of: impl Fn(f64) -> Result<Complex64>, medium: &LorentzMedium, w_hat: f64) -> Result<Complex64> {
    let dk = k_of(w_hat + GROUP_VELOCITY_STEP)? - k_of(w_hat)?;
    Ok(dk / (GROUP_VELOCITY_STEP * medium.omega_1()))
}

/// `Re(v_g^N/v_g^E)` with both velocities from the same forward difference.
pub fn normalized_group_velocity(k_of: impl Fn(f64) -> Result<Complex64>, medium: &LorentzMedium, w_hat: f64) -> Result<f64> {
    let exact = inverse_group_velocity(|w| Ok(medium.exact_wavenumber_at(w)?.value), medium, w_hat)?;
    let numeric = inverse_group_velocity(k_of, medium, w_hat)?;
    if numeric.norm() == 0.0 {
        return Err(DispersionError::DegeneratePsi);
    }
    Ok((exact / numeric).re)
}

/// All four quantities of `spec` at `w_hat`. Errors that only affect one
/// entry leave it `None`; errors of the scheme itself propagate.
pub fn quantity_row(spec: &SchemeSpec, medium: &LorentzMedium, w_hat: f64) -> Result<QuantityRow> {
    let num = RefractionData::of(spec, medium, w_hat)?.psi;
    let ex = RefractionData::of(&SchemeSpec::exact(), medium, w_hat)?.psi;
    let ngv = normalized_group_velocity(|w| spec.physical_wavenumber(medium, w), medium, w_hat);
    if let Err(e @ (DispersionError::RootSolveFailed(_) | DispersionError::ModeCountMismatch { .. })) = &ngv {
        return Err(e.clone());
    }
    Ok(QuantityRow {
        w_hat,
        norm_phase_velocity: normalized_phase_velocity(num, ex).ok(),
        norm_attenuation: normalized_attenuation(num, ex),
        norm_energy_velocity: normalized_energy_velocity(num, ex, medium).ok(),
        norm_group_velocity: ngv.ok(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dg::FluxKind;
    use crate::scheme::Spatial;
    use crate::temporal::TemporalScheme;
    use approx::assert_relative_eq;

    #[test]
    fn psi_examples() {
        let free = LorentzMedium::dispersionless(2.25, 1.0).unwrap();
        let k = free.exact_wavenumber_at(0.8).unwrap();
        assert_relative_eq!(psi(k, 0.8).unwrap().re, 1.5, epsilon = 1e-15);
        let m = LorentzMedium::default();
        let p = RefractionData::of(&SchemeSpec::exact(), &m, 0.7).unwrap().psi;
        let want = crate::medium::principal_sqrt(m.relative_permittivity(0.7).unwrap());
        assert!((p - want).norm() < 1e-14);
        assert!(p.im >= 0.0);
        assert_eq!(psi(k, 0.0), Err(DispersionError::ZeroFrequency));
        let fine = SchemeSpec::fully_discrete(TemporalScheme::LeapFrog, Spatial::Fd { order: 2 }, 1e-4, 0.5);
        let pn = RefractionData::of(&fine, &m, 0.7).unwrap().psi;
        assert!((pn - p).norm() < 1e-7);
    }

    #[test]
    fn energy_velocity_examples() {
        let m = LorentzMedium::default();
        assert_relative_eq!(energy_velocity(Complex64::new(1.5, 0.0), &m).unwrap(), 1.0 / 1.5, epsilon = 1e-15);
        let s = 5.25f64.sqrt();
        assert_relative_eq!(energy_velocity(Complex64::new(s, 0.0), &m).unwrap(), 1.0 / s, epsilon = 1e-15);
        assert!(energy_velocity(Complex64::new(0.0, 1.0), &m).is_err());
    }

    #[test]
    fn attenuation_flags() {
        let lossless = LorentzMedium::new(5.25, 2.25, 0.0, 1.0).unwrap();
        let e = RefractionData::of(&SchemeSpec::exact(), &lossless, 0.5).unwrap().psi;
        assert_eq!(normalized_attenuation(e, e), None);
        let row = quantity_row(&SchemeSpec::exact(), &lossless, 1.2).unwrap();
        assert_eq!(row.norm_phase_velocity, None);
        assert_eq!(row.norm_attenuation, Some(1.0));
    }

    #[test]
    fn exact_is_identity() {
        let m = LorentzMedium::default();
        for w in [0.3, 0.99, 1.2, 2.0, 5.0] {
            let row = quantity_row(&SchemeSpec::exact(), &m, w).unwrap();
            for q in [row.norm_phase_velocity, row.norm_attenuation, row.norm_energy_velocity, row.norm_group_velocity] {
                assert_eq!(q, Some(1.0));
            }
        }
    }

    #[test]
    fn group_velocity_matches_derivative() {
        let m = LorentzMedium::default();
        let w = 0.5;
        let eps = m.relative_permittivity(w).unwrap();
        let d = Complex64::new(w * w - 1.0, 2.0 * m.gamma_hat() * w);
        let deps = Complex64::new(2.0 * w, 2.0 * m.gamma_hat()) * m.eps_d() / (d * d);
        let sq = crate::medium::principal_sqrt(eps);
        let dk = sq + w * deps / (2.0 * sq);
        let fd = inverse_group_velocity(|x| Ok(m.exact_wavenumber_at(x).unwrap().value), &m, w).unwrap();
        // first-order truncation of the fixed step is ~7e-4 here
        assert!((fd - dk).norm() < 1e-3 * dk.norm(), "{fd} vs {dk}");
    }

    #[test]
    fn refinement_converges() {
        let m = LorentzMedium::default();
        let specs = [
            SchemeSpec::fully_discrete(TemporalScheme::LeapFrog, Spatial::Fd { order: 2 }, 0.02, 0.7 * 6.0 / 7.0),
            SchemeSpec::fully_discrete(TemporalScheme::Trapezoidal, Spatial::Dg { degree: 2, flux: FluxKind::AlternatingPlus }, 0.02, 0.7),
        ];
        for spec in specs {
            for w in [0.5, 2.0, 2.8] {
                let a = quantity_row(&spec, &m, w).unwrap();
                let b = quantity_row(&spec.refined(0.5), &m, w).unwrap();
                let pairs = [
                    (a.norm_phase_velocity, b.norm_phase_velocity),
                    (a.norm_attenuation, b.norm_attenuation),
                    (a.norm_energy_velocity, b.norm_energy_velocity),
                    (a.norm_group_velocity, b.norm_group_velocity),
                ];
                for (i, (x, y)) in pairs.into_iter().enumerate() {
                    let (x, y) = ((x.unwrap() - 1.0).abs(), (y.unwrap() - 1.0).abs());
                    assert!(y < x, "{spec} w={w} q{i}: {x} -> {y}");
                    if i != 3 {
                        assert!((x / y - 4.0).abs() < 0.5, "{spec} w={w} q{i}: ratio {}", x / y);
                    }
                }
            }
        }
        let fine = SchemeSpec::fully_discrete(TemporalScheme::LeapFrog, Spatial::Fd { order: 2 }, 1e-3, 0.6);
        let row = quantity_row(&fine, &m, 0.5).unwrap();
        assert!((row.norm_attenuation.unwrap() - 1.0).abs() < 1e-3);
        assert!((row.norm_energy_velocity.unwrap() - 1.0).abs() < 1e-3);
    }
}
