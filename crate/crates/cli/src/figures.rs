//! Fixed recipes that regenerate the data (and a quick plot) for each
//! reference figure. Parameters are pinned here; only the medium comes from
//! the configuration.

use std::f64::consts::{PI, TAU};

use dispersion::dg::FluxKind;
use dispersion::fd::fd_leading_coefficient;
use dispersion::scheme::Mesh;
use dispersion::temporal::TemporalScheme;
use dispersion::{LorentzMedium, SchemeSpec, Spatial};

use crate::config::{Format, Range};
use crate::error::{CliError, CliResult};
use crate::svg::{ContourPlot, LinePlot};
use crate::sweeps::{omega_of_k_table, par_map, psi_of, psi_sweep, quantities_table};
use crate::table::{Table, Value};

pub const FIGURES: [&str; 12] = ["fig1", "fig2", "fig3", "fig4", "fig5", "fig7", "fig8", "fig9", "fig10", "fig11", "fig12", "fig13"];

/// Frequency window shared by the error sweeps.
const SWEEP: Range = Range::new(0.0, 3.0, 601);
/// Quantity windows: up to and around resonance, then far above it.
const QUANTITY_WINDOWS: [(&str, Range); 2] = [("low", Range::new(0.01, 3.0, 300)), ("high", Range::new(3.0, 16.0, 261))];
const REFINEMENT: [f64; 4] = [PI / 30.0, PI / 60.0, PI / 120.0, PI / 240.0];
const CFL_FRACTION: f64 = 0.7;
const FD_ORDERS: [usize; 5] = [1, 2, 3, 4, 5];
const DG_FLUXES: [FluxKind; 3] = [FluxKind::AlternatingPlus, FluxKind::Central, FluxKind::Upwind];

/// One output file.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

struct Writer {
    format: Format,
    files: Vec<Artifact>,
}

impl Writer {
    fn data(&mut self, stem: &str, table: &Table) -> CliResult<()> {
        let (ext, contents) = match self.format {
            Format::Json => ("json", table.to_json()),
            _ => ("csv", table.to_csv()?),
        };
        self.files.push(Artifact { name: format!("{stem}.{ext}"), contents });
        Ok(())
    }

    fn plot(&mut self, stem: &str, plot: &LinePlot) {
        self.files.push(Artifact { name: format!("{stem}.svg"), contents: plot.render() });
    }

    fn lines(&mut self, stem: &str, table: &Table, title: &str) -> CliResult<()> {
        self.data(stem, table)?;
        self.plot(stem, &LinePlot::from_table(table, title));
        Ok(())
    }

    fn contour(&mut self, stem: &str, plot: ContourPlot) {
        self.files.push(Artifact { name: format!("{stem}.svg"), contents: plot.render() });
    }
}

fn fd(order: usize) -> Spatial {
    Spatial::Fd { order }
}

fn dg(degree: usize, flux: FluxKind) -> Spatial {
    Spatial::Dg { degree, flux }
}

fn flux_label(f: FluxKind) -> &'static str {
    match f {
        FluxKind::AlternatingPlus => "al",
        FluxKind::AlternatingMinus => "al-",
        FluxKind::Central => "ce",
        FluxKind::Upwind => "up",
    }
}

/// Fully discrete spec at a fixed fraction of its own leap-frog limit.
fn at_cfl_fraction(t: TemporalScheme, spatial: Spatial, w1: f64) -> CliResult<SchemeSpec> {
    let base = SchemeSpec { temporal: Some(t), spatial, w1: Some(w1), mesh: None };
    let limit = base.cfl_limit()?.unwrap_or(1.0);
    Ok(SchemeSpec::fully_discrete(t, spatial, w1, CFL_FRACTION * limit))
}

/// Refinement table: one row per mesh, one column per spec.
fn refinement(medium: &LorentzMedium, w_hat: f64, specs: &[(String, Spatial)]) -> Table {
    let mut t = Table::new(std::iter::once("omega1_h".to_string()).chain(specs.iter().map(|s| s.0.clone())));
    for oh in REFINEMENT {
        let row = specs.iter().map(|(_, sp)| Value::from(psi_of(&SchemeSpec::space_only(*sp, oh), medium, w_hat)));
        t.push(std::iter::once(Value::Num(oh)).chain(row).collect());
    }
    t
}

fn log_log(table: &Table, title: &str) -> LinePlot {
    LinePlot { log_x: true, log_y: true, ..LinePlot::from_table(table, title) }
}

fn fig1(w: &mut Writer, medium: &LorentzMedium) -> CliResult<()> {
    let w1s = [("15", PI / 15.0), ("30", PI / 30.0), ("60", PI / 60.0)];
    for (tag, w1) in w1s {
        let t = crate::sweeps::temporal_sweep(medium, w1, &SWEEP.points());
        w.lines(&format!("fig1_w1_pi_{tag}"), &t, &format!("time discretization, W1 = pi/{tag}"))?;
    }
    let peak = (medium.eps_s() / medium.eps_inf()).sqrt();
    let mut t = Table::new(["w1", "psi_lf_resonance", "psi_tp_resonance", "psi_lf_edge", "psi_tp_edge"]);
    for (_, w1) in w1s {
        let mut row = vec![Value::Num(w1)];
        for w_hat in [1.0, peak] {
            for s in TemporalScheme::ALL {
                row.push(dispersion::temporal::relative_phase_error(s, medium, w_hat, w1).into());
            }
        }
        t.push(row);
    }
    w.data("fig1_convergence", &t)?;
    w.plot("fig1_convergence", &log_log(&t, "time discretization refinement"));
    Ok(())
}

fn fig2(w: &mut Writer, medium: &LorentzMedium) -> CliResult<()> {
    let specs: Vec<(String, Spatial)> = FD_ORDERS.iter().map(|&m| (format!("psi_fd{}", 2 * m), fd(m))).collect();
    let sweep: Vec<(String, SchemeSpec)> = specs.iter().map(|(n, s)| (n.clone(), SchemeSpec::space_only(*s, PI / 30.0))).collect();
    w.lines("fig2", &psi_sweep(&sweep, medium, &SWEEP.points()), "semi-discrete FD2M, omega1 h = pi/30")?;
    let conv = refinement(medium, 1.0, &specs);
    w.data("fig2_convergence", &conv)?;
    w.plot("fig2_convergence", &log_log(&conv, "semi-discrete FD2M at w = 1"));
    Ok(())
}

fn fig3(w: &mut Writer, medium: &LorentzMedium) -> CliResult<()> {
    let nu = 0.6;
    for gamma in [0.0, 0.01, 0.1, 1.0] {
        let m = medium.with_gamma_hat(gamma)?;
        let mut t = Table::new(["w_hat", "lf_m1", "lf_m2", "tp_m1", "tp_m2"]);
        let rows = par_map(&SWEEP.points(), |x| {
            let mut row = vec![Value::Num(x)];
            for s in TemporalScheme::ALL {
                for order in [1, 2] {
                    row.push(fd_leading_coefficient(s, order, &m, x, nu).map(|c| c.norm()).into());
                }
            }
            row
        });
        rows.into_iter().for_each(|r| t.push(r));
        w.lines(&format!("fig3_gamma_{gamma}"), &t, &format!("|C| at nu = 0.6, gamma = {gamma}"))?;
    }
    Ok(())
}

fn fig4(w: &mut Writer, medium: &LorentzMedium) -> CliResult<()> {
    for t in TemporalScheme::ALL {
        let specs = FD_ORDERS
            .iter()
            .map(|&m| Ok((format!("psi_fd{}", 2 * m), at_cfl_fraction(t, fd(m), PI / 30.0)?)))
            .collect::<CliResult<Vec<_>>>()?;
        w.lines(&format!("fig4_{t}"), &psi_sweep(&specs, medium, &SWEEP.points()), &format!("{t}(2,2M), W1 = pi/30"))?;
    }
    Ok(())
}

/// Trapezoidal error at `ŵ = 1` on the `(ω₁h, W₁)` rectangle.
fn tp_contours(w: &mut Writer, medium: &LorentzMedium, stem: &str, spatials: &[(String, Spatial)]) -> CliResult<()> {
    let oh = Range::new(0.01, 0.1, 19).points();
    let w1s = Range::new(0.05, 0.3, 26).points();
    let grid: Vec<(f64, f64)> = w1s.iter().flat_map(|&a| oh.iter().map(move |&b| (a, b))).collect();
    let index: Vec<f64> = (0..grid.len()).map(|i| i as f64).collect();
    let k_ex = medium.exact_wavenumber_at(1.0)?.value.norm();
    let values = par_map(&index, |i| {
        let (w1, oh) = grid[i as usize];
        spatials
            .iter()
            .map(|(_, sp)| {
                let spec = SchemeSpec { temporal: Some(TemporalScheme::Trapezoidal), spatial: *sp, w1: Some(w1), mesh: Some(Mesh::Omega1H(oh)) };
                psi_of(&spec, medium, 1.0).ok()
            })
            .collect::<Vec<_>>()
    });
    let mut cols = vec!["w1".to_string(), "omega1_h".to_string(), "k_abs".to_string()];
    cols.extend(spatials.iter().map(|s| s.0.clone()));
    let mut t = Table::new(cols);
    for ((w1, o), vals) in grid.iter().zip(&values) {
        let mut row = vec![Value::Num(*w1), Value::Num(*o), Value::Num(k_ex * o / medium.omega_1())];
        row.extend(vals.iter().map(|v| Value::opt(*v)));
        t.push(row);
    }
    w.data(stem, &t)?;
    for (j, (name, _)) in spatials.iter().enumerate() {
        let z: Vec<Vec<f64>> = (0..w1s.len())
            .map(|iy| (0..oh.len()).map(|ix| values[iy * oh.len() + ix][j].map_or(f64::NAN, f64::log10)).collect())
            .collect();
        w.contour(
            &format!("{stem}_{name}"),
            ContourPlot {
                title: format!("log10 psi, trapezoidal {name}, w = 1"),
                x_label: "omega1 h".into(),
                y_label: "W1".into(),
                xs: oh.clone(),
                ys: w1s.clone(),
                values: z,
                levels: 10,
            },
        );
    }
    Ok(())
}

fn fig5(w: &mut Writer, medium: &LorentzMedium) -> CliResult<()> {
    let specs: Vec<(String, Spatial)> = [1, 2, 3].iter().map(|&m| (format!("fd{}", 2 * m), fd(m))).collect();
    tp_contours(w, medium, "fig5", &specs)
}

fn fig7(w: &mut Writer, medium: &LorentzMedium) -> CliResult<()> {
    let points = Range::new(0.0, 3.0, 301).points();
    let mut all = Vec::new();
    for f in DG_FLUXES {
        let specs: Vec<(String, Spatial)> = (0..=3).map(|p| (format!("psi_p{p}"), dg(p, f))).collect();
        let sweep: Vec<(String, SchemeSpec)> = specs.iter().map(|(n, s)| (n.clone(), SchemeSpec::space_only(*s, PI / 30.0))).collect();
        w.lines(&format!("fig7_{}", flux_label(f)), &psi_sweep(&sweep, medium, &points), &format!("semi-discrete DG-{}", flux_label(f)))?;
        all.extend(specs.into_iter().map(|(n, s)| (format!("{}_{}", flux_label(f), &n[4..]), s)));
    }
    let conv = refinement(medium, 1.0, &all);
    w.data("fig7_convergence", &conv)?;
    w.plot("fig7_convergence", &log_log(&conv, "semi-discrete DG at w = 1"));
    Ok(())
}

fn fig8(w: &mut Writer, medium: &LorentzMedium) -> CliResult<()> {
    let points = Range::new(0.0, 3.0, 301).points();
    for (tag, w1) in [("30", PI / 30.0), ("300", PI / 300.0)] {
        for f in DG_FLUXES {
            let specs = (0..=3)
                .map(|p| Ok((format!("psi_p{p}"), at_cfl_fraction(TemporalScheme::LeapFrog, dg(p, f), w1)?)))
                .collect::<CliResult<Vec<_>>>()?;
            let stem = format!("fig8_w1_pi_{tag}_{}", flux_label(f));
            w.lines(&stem, &psi_sweep(&specs, medium, &points), &format!("leap-frog DG-{}, W1 = pi/{tag}", flux_label(f)))?;
        }
    }
    Ok(())
}

fn fig9(w: &mut Writer, medium: &LorentzMedium) -> CliResult<()> {
    for f in DG_FLUXES {
        let specs: Vec<(String, Spatial)> = (1..=3).map(|p| (format!("dg{p}"), dg(p, f))).collect();
        tp_contours(w, medium, &format!("fig9_{}", flux_label(f)), &specs)?;
    }
    Ok(())
}

/// Four quantities for each spec over both windows.
fn quantity_figure(w: &mut Writer, medium: &LorentzMedium, stem: &str, specs: &[(String, SchemeSpec)]) -> CliResult<()> {
    const NAMES: [&str; 4] = ["npv", "nac", "nev", "ngv"];
    for (window, range) in QUANTITY_WINDOWS {
        let points = range.points();
        let tables: Vec<Table> = specs.iter().map(|(_, s)| quantities_table(s, medium, &points)).collect();
        let mut cols = vec!["w_hat".to_string()];
        for q in NAMES {
            cols.extend(specs.iter().map(|(n, _)| format!("{q}_{n}")));
        }
        let mut t = Table::new(cols);
        for (i, x) in points.iter().enumerate() {
            let mut row = vec![Value::Num(*x)];
            for q in 1..=NAMES.len() {
                row.extend(tables.iter().map(|tb| tb.rows[i][q].clone()));
            }
            t.push(row);
        }
        let name = format!("{stem}_{window}");
        w.data(&name, &t)?;
        for (q, qname) in NAMES.iter().enumerate() {
            let mut sub = Table::new(std::iter::once("w_hat".to_string()).chain(specs.iter().map(|(n, _)| n.clone())));
            for (i, x) in points.iter().enumerate() {
                sub.push(std::iter::once(Value::Num(*x)).chain(tables.iter().map(|tb| tb.rows[i][q + 1].clone())).collect());
            }
            let plot = LinePlot { log_y: false, ..LinePlot::from_table(&sub, &format!("{qname}, {window} window")) };
            w.plot(&format!("{name}_{qname}"), &plot);
        }
    }
    Ok(())
}

fn fd_quantity_specs(t: TemporalScheme) -> CliResult<Vec<(String, SchemeSpec)>> {
    [1, 2, 3].iter().map(|&m| Ok((format!("fd{}", 2 * m), at_cfl_fraction(t, fd(m), PI / 30.0)?))).collect()
}

fn fig10(w: &mut Writer, medium: &LorentzMedium) -> CliResult<()> {
    quantity_figure(w, medium, "fig10", &fd_quantity_specs(TemporalScheme::LeapFrog)?)
}

fn fig11(w: &mut Writer, medium: &LorentzMedium) -> CliResult<()> {
    quantity_figure(w, medium, "fig11", &fd_quantity_specs(TemporalScheme::Trapezoidal)?)
}

fn fig12(w: &mut Writer, medium: &LorentzMedium) -> CliResult<()> {
    // plain nu = 0.7: the trapezoidal scheme has no stability limit to scale by
    let specs: Vec<(String, SchemeSpec)> = (1..=3)
        .map(|p| (format!("dg{p}"), SchemeSpec::fully_discrete(TemporalScheme::Trapezoidal, dg(p, FluxKind::AlternatingPlus), PI / 30.0, 0.7)))
        .collect();
    quantity_figure(w, medium, "fig12", &specs)
}

fn fig13(w: &mut Writer, medium: &LorentzMedium) -> CliResult<()> {
    let lossless = medium.with_gamma_hat(0.0)?;
    let oh = PI / 30.0;
    let points = Range::new(0.0, TAU, 315).points();
    // sorted branches: 1, 2 are the low pair, 0, 3 the high pair
    for (tag, branch) in [("low", 2), ("high", 3)] {
        let mut t = Table::new(std::iter::once("k_hat".to_string()).chain(FD_ORDERS.iter().map(|m| format!("err_fd{}", 2 * m))));
        let rows = par_map(&points, |k| {
            let errs = FD_ORDERS.iter().map(|&m| Value::from(dispersion::omega_solver::omega_relative_error(m, &lossless, k, oh, branch)));
            std::iter::once(Value::Num(k)).chain(errs).collect::<Vec<_>>()
        });
        rows.into_iter().for_each(|r| t.push(r));
        w.lines(&format!("fig13_{tag}"), &t, &format!("omega(k) relative error, {tag} branches"))?;
    }
    let roots = omega_of_k_table(1, &lossless, oh, &points);
    w.data("fig13_roots_fd2", &roots)?;
    Ok(())
}

/// Every file of figure `id`, in a fixed order.
pub fn figure(id: &str, medium: &LorentzMedium, format: Format) -> CliResult<Vec<Artifact>> {
    let mut w = Writer { format, files: Vec::new() };
    match id {
        "fig1" => fig1(&mut w, medium),
        "fig2" => fig2(&mut w, medium),
        "fig3" => fig3(&mut w, medium),
        "fig4" => fig4(&mut w, medium),
        "fig5" => fig5(&mut w, medium),
        "fig7" => fig7(&mut w, medium),
        "fig8" => fig8(&mut w, medium),
        "fig9" => fig9(&mut w, medium),
        "fig10" => fig10(&mut w, medium),
        "fig11" => fig11(&mut w, medium),
        "fig12" => fig12(&mut w, medium),
        "fig13" => fig13(&mut w, medium),
        other => return Err(CliError::UnknownFigure(other.to_string())),
    }?;
    Ok(w.files)
}
