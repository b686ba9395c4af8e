//! Tables behind the sweep commands. Points are evaluated in parallel and
//! collected in input order.

use std::f64::consts::FRAC_2_PI;

use dispersion::dg::{cfl_max_dg, cfl_max_dg_spectral, FluxKind};
use dispersion::fd::{cfl_max_fd, cfl_max_fd_exact};
use dispersion::omega_solver::{matched_roots, omega_relative_error};
use dispersion::quantities::quantity_row;
use dispersion::temporal::{relative_error, relative_phase_error, TemporalScheme};
use dispersion::{LorentzMedium, Result, SchemeSpec};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::table::{complex, complex_columns, Table, Value};

pub fn par_map<T: Send>(points: &[f64], f: impl Fn(f64) -> T + Sync + Send) -> Vec<T> {
    points.par_iter().map(|&x| f(x)).collect()
}

/// `|k − k_ex|/|k_ex|` of the physical mode.
pub fn psi_of(spec: &SchemeSpec, medium: &LorentzMedium, w_hat: f64) -> Result<f64> {
    relative_error(spec.physical_wavenumber(medium, w_hat)?, medium.exact_wavenumber_at(w_hat)?.value)
}

pub fn temporal_sweep(medium: &LorentzMedium, w1: f64, points: &[f64]) -> Table {
    let mut t = Table::new(["w_hat", "psi_lf", "psi_tp"]);
    for (w, row) in points.iter().zip(par_map(points, |w| {
        TemporalScheme::ALL.map(|s| Value::from(relative_phase_error(s, medium, w, w1)))
    })) {
        let [lf, tp] = row;
        t.push(vec![Value::Num(*w), lf, tp]);
    }
    t
}

/// One `psi` column per labelled scheme.
pub fn psi_sweep(specs: &[(String, SchemeSpec)], medium: &LorentzMedium, points: &[f64]) -> Table {
    let mut t = Table::new(std::iter::once("w_hat".to_string()).chain(specs.iter().map(|(n, _)| n.clone())));
    let rows = par_map(points, |w| specs.iter().map(|(_, s)| Value::from(psi_of(s, medium, w))).collect::<Vec<_>>());
    for (w, vals) in points.iter().zip(rows) {
        t.push(std::iter::once(Value::Num(*w)).chain(vals).collect());
    }
    t
}

/// Physical wavenumber and error per frequency. With `all_modes` every
/// root is listed, one group of rows per mode (physical first).
pub fn wavenumber_sweep(spec: &SchemeSpec, medium: &LorentzMedium, points: &[f64], all_modes: bool) -> Table {
    let omega_1 = medium.omega_1();
    let per_point = par_map(points, |w| -> Result<(Complex64, Vec<Complex64>)> {
        let ex = medium.exact_wavenumber_at(w)?.value;
        if !all_modes {
            return Ok((ex, vec![spec.physical_wavenumber(medium, w)?]));
        }
        let set = spec.modes(medium, w)?;
        let h = set.h(omega_1);
        Ok((ex, set.modes.iter().map(|m| m.k_hat / h).collect()))
    });
    let err = |ex: Complex64, k: Complex64| Value::from(relative_error(k, ex));
    if !all_modes {
        let [re, im] = complex_columns("k_phys");
        let mut t = Table::new(["w_hat".to_string(), re, im, "psi".to_string()]);
        for (w, r) in points.iter().zip(&per_point) {
            let row = match r {
                Ok((ex, ks)) => {
                    let [a, b] = complex(Some(ks[0]));
                    vec![Value::Num(*w), a, b, err(*ex, ks[0])]
                }
                Err(_) => vec![Value::Num(*w), Value::Undef, Value::Undef, Value::Undef],
            };
            t.push(row);
        }
        return t;
    }
    // physical +, physical −, then the spurious roots; their error is undefined
    let groups = per_point.iter().filter_map(|r| r.as_ref().ok()).map(|(_, ks)| ks.len()).max().unwrap_or(1);
    let [re, im] = complex_columns("k");
    let mut t = Table::new(["w_hat".to_string(), "mode".to_string(), re, im, "psi".to_string()]);
    for g in 0..groups {
        let label = match g {
            0 => "physical+".to_string(),
            1 => "physical-".to_string(),
            n => format!("spurious{}", n - 1),
        };
        for (w, r) in points.iter().zip(&per_point) {
            let k = r.as_ref().ok().and_then(|(ex, ks)| ks.get(g).map(|k| (*ex, *k)));
            let [a, b] = complex(k.map(|p| p.1));
            let psi = match (g, k) {
                (0, Some((ex, k))) => err(ex, k),
                (1, Some((ex, k))) => err(-ex, k),
                _ => Value::Undef,
            };
            t.push(vec![Value::Num(*w), label.as_str().into(), a, b, psi]);
        }
    }
    t
}

pub fn quantities_table(spec: &SchemeSpec, medium: &LorentzMedium, points: &[f64]) -> Table {
    let mut t = Table::new(["w_hat", "npv", "nac", "nev", "ngv"]);
    for (w, r) in points.iter().zip(par_map(points, |w| quantity_row(spec, medium, w))) {
        let row = match r {
            Ok(q) => vec![
                Value::Num(*w),
                Value::opt(q.norm_phase_velocity),
                Value::opt(q.norm_attenuation),
                Value::opt(q.norm_energy_velocity),
                Value::opt(q.norm_group_velocity),
            ],
            Err(_) => vec![Value::Num(*w), Value::Undef, Value::Undef, Value::Undef, Value::Undef],
        };
        t.push(row);
    }
    t
}

/// Exact and FD2M angular-frequency branches against `k̂ = kh`.
pub fn omega_of_k_table(m: usize, medium: &LorentzMedium, omega1_h: f64, points: &[f64]) -> Table {
    let mut cols = vec!["k_hat".to_string()];
    for i in 1..=4 {
        cols.extend(complex_columns(&format!("exact{i}")));
        cols.extend(complex_columns(&format!("fd{i}")));
        cols.push(format!("err{i}"));
    }
    let mut t = Table::new(cols);
    let rows = par_map(points, |k| {
        let roots = matched_roots(m, medium, k, omega1_h).ok();
        let mut row = vec![Value::Num(k)];
        for b in 0..4 {
            row.extend(complex(roots.map(|r| r.0[b])));
            row.extend(complex(roots.map(|r| r.1[b])));
            row.push(omega_relative_error(m, medium, k, omega1_h, b).into());
        }
        row
    });
    rows.into_iter().for_each(|r| t.push(r));
    t
}

/// Leap-frog stability limits: FD2M for `M = 1..=10` and its limit, DG for
/// `p = 0..=3` and the three flux families.
pub fn cfl_table() -> Result<Table> {
    let mut t = Table::new(["method", "order", "flux", "cfl_max", "exact", "cfl_spectral"]);
    for m in 1..=10 {
        let exact = cfl_max_fd_exact(m)?;
        t.push(vec![
            "fd".into(),
            format!("{}", 2 * m).into(),
            "".into(),
            Value::Num(cfl_max_fd(m)?),
            format!("{}/{}", exact.numer(), exact.denom()).into(),
            Value::Undef,
        ]);
    }
    t.push(vec!["fd".into(), "inf".into(), "".into(), Value::Num(FRAC_2_PI), "2/pi".into(), Value::Undef]);
    let fluxes = [FluxKind::Central, FluxKind::AlternatingPlus, FluxKind::Upwind];
    let cells: Vec<(usize, FluxKind)> = fluxes.iter().flat_map(|&f| (0..=3).map(move |p| (p, f))).collect();
    let limits: Vec<Result<(f64, f64)>> =
        cells.par_iter().map(|&(p, f)| Ok((cfl_max_dg(p, f)?, cfl_max_dg_spectral(p, f)?))).collect();
    for ((p, f), lim) in cells.into_iter().zip(limits) {
        let (energy, spectral) = lim?;
        let name = if f == FluxKind::AlternatingPlus { "alternating" } else { f.name() };
        t.push(vec!["dg".into(), format!("{p}").into(), name.into(), Value::Num(energy), Value::Undef, Value::Num(spectral)]);
    }
    Ok(t)
}
