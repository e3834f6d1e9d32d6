use ab_core::analysis::{convergence_study, flux_periodicity_check, infer_kappa, Observable};
use ab_core::finite::FiniteScattering;
use ab_core::force::{force_asymptotic, force_finite, force_ideal, ForceVector, QuadratureSpec};
use ab_core::ideal::{uniform_angles, IdealScattering};
use ab_core::Barrier;
use rayon::prelude::*;

use crate::config::{Command, Mode, ObservableKind, RunConfig};
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cell::Num(v) => write!(f, "{v:.16e}"),
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Text(s) => write!(f, "{s}"),
        }
    }
}

/// Result table plus the comment lines written above the header.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub notes: Vec<String>,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Largest channel cutoff used by any series behind the table.
    pub n_max: i64,
}

impl Table {
    fn new(header: &[&'static str]) -> Self {
        Table { header: header.to_vec(), ..Default::default() }
    }

    fn note(&mut self, line: impl Into<String>) {
        self.notes.push(line.into());
    }

    fn cutoff(&mut self, n: i64) {
        self.n_max = self.n_max.max(n);
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn frac(x: f64) -> f64 {
    x - x.floor()
}

pub fn execute(cfg: &RunConfig) -> Result<Table, CliError> {
    match cfg.command {
        Command::Figure2 => figure2(cfg),
        Command::Figure3a => figure3a(cfg),
        Command::Figure3b => figure3b(cfg),
        Command::SlopeProfile => slope_profile(cfg),
        Command::Force => force(cfg),
        Command::ForceScan => force_scan(cfg),
        Command::Converge => converge(cfg),
        Command::InferKappa => infer(cfg),
        Command::Periodicity => periodicity(cfg),
    }
}

fn finite_mode(cfg: &RunConfig) -> (f64, Option<f64>) {
    match cfg.mode {
        Mode::Finite { beta, v0 } => (beta, v0),
        Mode::Ideal { .. } => unreachable!("command validated for finite mode"),
    }
}

fn ideal_kappa(cfg: &RunConfig) -> f64 {
    match cfg.mode {
        Mode::Ideal { kappa } => kappa,
        Mode::Finite { .. } => unreachable!("command validated for ideal mode"),
    }
}

/// `|psi|` against `r` at fixed angle along the barrier ladder, followed by
/// the hard-wall limit at `kappa = frac(beta)`.
fn figure2(cfg: &RunConfig) -> Result<Table, CliError> {
    let (beta, _) = finite_mode(cfg);
    let phi = cfg.grid.phi[0];
    let rel = linspace(cfg.grid.radial.0, cfg.grid.radial.1, cfg.grid.radial_points);
    let radii: Vec<f64> = rel.iter().map(|x| x * cfg.radius).collect();
    let r_max = radii[radii.len() - 1].max(cfg.radius);

    let curves = cfg
        .grid
        .ladder
        .par_iter()
        .map(|&v| {
            let s = cfg.scenario(beta, Barrier::Finite(cfg.absolute_v0(v)))?;
            let sol = FiniteScattering::new(&s, r_max)?;
            let g = sol.psi_grid(&radii, &[phi])?;
            let psi: Vec<f64> = g.iter().map(|row| row[0].norm()).collect();
            Ok((v, psi, sol.slope(phi), sol.truncation().n_max))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let alpha = frac(beta);
    let wall = IdealScattering::new(&cfg.scenario(beta, Barrier::Infinite)?, alpha)?;
    let mut t = Table::new(&["V0", "r/R", "|psi|"]);
    t.note(format!("V0 in units of k^2, phi = {:.16e} rad", phi));
    for (v, psi, slope, n_max) in &curves {
        t.cutoff(*n_max);
        t.note(format!("slope V0={:.16e} {:.16e}", v, slope));
        for (x, p) in rel.iter().zip(psi) {
            t.rows.push(vec![Cell::Num(*v), Cell::Num(*x), Cell::Num(*p)]);
        }
    }
    t.note(format!("slope V0=inf {:.16e}", wall.slope(phi)));
    t.cutoff(wall.slope_truncation().n_max);
    for (x, r) in rel.iter().zip(&radii) {
        let p = if *r < cfg.radius {
            0.0
        } else {
            let (psi, tr) = wall.psi_with_truncation(*r, phi)?;
            t.cutoff(tr.n_max);
            psi.norm()
        };
        t.rows.push(vec![Cell::Num(f64::INFINITY), Cell::Num(*x), Cell::Num(p)]);
    }
    Ok(t)
}

/// Hard-wall `|psi|` against `r` at fixed angle for several `kappa`.
fn figure3a(cfg: &RunConfig) -> Result<Table, CliError> {
    let phi = cfg.grid.phi[0];
    let rel = linspace(cfg.grid.radial.0, cfg.grid.radial.1, cfg.grid.radial_points);
    let s = cfg.scenario(0.0, Barrier::Infinite)?;
    let mut t = Table::new(&["kappa", "r/R", "|psi|"]);
    t.note(format!("phi = {:.16e} rad", phi));
    let curves = cfg
        .grid
        .kappas
        .par_iter()
        .map(|&kappa| {
            let sol = IdealScattering::new(&s, kappa)?;
            let mut n_max = sol.slope_truncation().n_max;
            let mut psi = Vec::with_capacity(rel.len());
            for x in &rel {
                let r = x * cfg.radius;
                // the wall excludes the interior
                if r < cfg.radius {
                    psi.push(0.0);
                    continue;
                }
                let (p, tr) = sol.psi_with_truncation(r, phi)?;
                n_max = n_max.max(tr.n_max);
                psi.push(p.norm());
            }
            Ok((kappa, psi, sol.slope(phi), n_max))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    for (kappa, psi, slope, n_max) in curves {
        t.cutoff(n_max);
        t.note(format!("slope kappa={:.16e} {:.16e}", kappa, slope));
        for (x, p) in rel.iter().zip(psi) {
            t.rows.push(vec![Cell::Num(kappa), Cell::Num(*x), Cell::Num(p)]);
        }
    }
    Ok(t)
}

/// Wall slope against `kappa` at each configured angle.
fn figure3b(cfg: &RunConfig) -> Result<Table, CliError> {
    let s = cfg.scenario(0.0, Barrier::Infinite)?;
    let rows = cfg
        .grid
        .kappas
        .par_iter()
        .map(|&kappa| {
            let sol = IdealScattering::new(&s, kappa)?;
            let slopes: Vec<f64> = cfg.grid.phi.iter().map(|&p| sol.slope(p)).collect();
            Ok((kappa, slopes, sol.slope_truncation().n_max))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut t = Table::new(&["kappa", "phi", "slope"]);
    for (j, &phi) in cfg.grid.phi.iter().enumerate() {
        for (kappa, slopes, n_max) in &rows {
            t.cutoff(*n_max);
            t.rows.push(vec![Cell::Num(*kappa), Cell::Num(phi), Cell::Num(slopes[j])]);
        }
    }
    Ok(t)
}

fn slope_profile(cfg: &RunConfig) -> Result<Table, CliError> {
    let angles = uniform_angles(cfg.grid.angles);
    let mut t = Table::new(&["phi", "slope"]);
    let profile = match cfg.mode {
        Mode::Ideal { kappa } => {
            let sol = IdealScattering::new(&cfg.scenario(0.0, Barrier::Infinite)?, kappa)?;
            t.cutoff(sol.slope_truncation().n_max);
            t.note(format!("ideal kappa = {:.16e}", kappa));
            sol.slope_profile(&angles)?
        }
        Mode::Finite { beta, v0 } => {
            let v0 = v0.expect("validated");
            let s = cfg.scenario(beta, Barrier::Finite(cfg.absolute_v0(v0)))?;
            let sol = FiniteScattering::new(&s, cfg.radius)?;
            t.cutoff(sol.truncation().n_max);
            t.note(format!("finite beta = {:.16e}, V0 = {:.16e} k^2", beta, v0));
            sol.slope_profile(&angles)?
        }
    };
    for (phi, v) in profile.angles.iter().zip(&profile.slopes) {
        t.rows.push(vec![Cell::Num(*phi), Cell::Num(*v)]);
    }
    Ok(t)
}

const FORCE_HEADER: [&str; 6] = ["kR", "alpha_or_kappa", "f1", "f2", "f1_asym", "f2_asym"];

fn force_row(kr: f64, a: f64, f: &ForceVector, k: f64, rho: f64) -> Vec<Cell> {
    let asym = force_asymptotic(a, k, rho);
    vec![
        Cell::Num(kr),
        Cell::Num(a),
        Cell::Num(f.f1),
        Cell::Num(f.f2),
        Cell::Num(asym.f1),
        Cell::Num(asym.f2),
    ]
}

/// Force for one flux value at wavenumber `k`; returns the row and cutoff.
fn force_point(cfg: &RunConfig, k: f64, flux: f64) -> Result<(Vec<Cell>, i64), CliError> {
    let quad = QuadratureSpec::new(cfg.grid.quadrature)?;
    let kr = k * cfg.radius;
    let mk = |beta, barrier| {
        Ok::<_, CliError>(ab_core::CylinderScenario::new(cfg.radius, k, beta, barrier, cfg.rho)?)
    };
    match cfg.mode {
        Mode::Ideal { .. } => {
            let s = mk(0.0, Barrier::Infinite)?;
            let f = force_ideal(&s, flux, quad)?;
            let n = IdealScattering::new(&s, flux)?.slope_truncation().n_max;
            Ok((force_row(kr, flux, &f, k, cfg.rho), n))
        }
        Mode::Finite { v0, .. } => {
            let v0 = v0.expect("validated");
            let s = mk(flux, Barrier::Finite(v0 * k * k))?;
            let f = force_finite(&s, quad)?;
            let n = FiniteScattering::new(&s, cfg.radius)?.truncation().n_max;
            Ok((force_row(kr, s.alpha(), &f, k, cfg.rho), n))
        }
    }
}

fn force(cfg: &RunConfig) -> Result<Table, CliError> {
    let flux = match cfg.mode {
        Mode::Ideal { kappa } => kappa,
        Mode::Finite { beta, .. } => beta,
    };
    let (row, n) = force_point(cfg, cfg.wavenumber, flux)?;
    let mut t = Table::new(&FORCE_HEADER);
    t.note("forces normalised by rho k");
    t.cutoff(n);
    t.rows.push(row);
    Ok(t)
}

/// Forces over the `kR` list and the `alphas` grid; in finite mode each
/// alpha is used as the flux ratio.
fn force_scan(cfg: &RunConfig) -> Result<Table, CliError> {
    let points: Vec<(f64, f64)> = cfg
        .grid
        .kr_list
        .iter()
        .flat_map(|&kr| cfg.grid.alphas.iter().map(move |&a| (kr, a)))
        .collect();
    let rows = points
        .par_iter()
        .map(|&(kr, a)| force_point(cfg, kr / cfg.radius, a))
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut t = Table::new(&FORCE_HEADER);
    t.note("forces normalised by rho k");
    for (row, n) in rows {
        t.cutoff(n);
        t.rows.push(row);
    }
    Ok(t)
}

fn converge(cfg: &RunConfig) -> Result<Table, CliError> {
    let (beta, _) = finite_mode(cfg);
    let ladder_abs: Vec<f64> = cfg.grid.ladder.iter().map(|&v| cfg.absolute_v0(v)).collect();
    let base = cfg.scenario(beta, Barrier::Finite(ladder_abs[0]))?;
    let phi = cfg.grid.phi[0];
    let observable = match cfg.grid.observable {
        ObservableKind::Slope => Observable::Slope { phi },
        ObservableKind::ForceBackward => Observable::ForceBackward,
        ObservableKind::ForcePerpendicular => Observable::ForcePerpendicular,
    };
    let quad = QuadratureSpec::new(cfg.grid.quadrature)?;
    let rep = convergence_study(&base, &ladder_abs, observable, quad)?;

    let top = cfg.scenario(beta, Barrier::Finite(ladder_abs[ladder_abs.len() - 1]))?;
    let mut t = Table::new(&["V0", "value", "distance"]);
    t.cutoff(FiniteScattering::new(&top, cfg.radius)?.truncation().n_max);
    t.note("V0 in units of k^2");
    match observable {
        Observable::Slope { phi } => t.note(format!("observable slope at phi = {:.16e} rad", phi)),
        other => t.note(format!("observable {other:?}")),
    }
    t.note(format!("extrapolated_limit {:.16e}", rep.extrapolated_limit));
    t.note(format!("fitted_order {:.16e}", rep.fitted_order));
    t.note(format!("reference {:.16e}", rep.reference));
    t.note(format!("monotone {}", rep.is_monotone()));
    for ((v, o), d) in cfg.grid.ladder.iter().zip(&rep.ladder).zip(rep.distances()) {
        t.rows.push(vec![Cell::Num(*v), Cell::Num(o.1), Cell::Num(d)]);
    }
    Ok(t)
}

/// Recover `kappa` from wall slopes; without explicit samples they are
/// synthesised from the configured `kappa` at the configured angles.
fn infer(cfg: &RunConfig) -> Result<Table, CliError> {
    let s = cfg.scenario(0.0, Barrier::Infinite)?;
    let samples = match &cfg.grid.samples {
        Some(samples) => samples.clone(),
        None => {
            let sol = IdealScattering::new(&s, ideal_kappa(cfg))?;
            cfg.grid.phi.iter().map(|&p| (p, sol.slope(p))).collect()
        }
    };
    let est = infer_kappa(&s, &samples)?;
    let mut t = Table::new(&["kappa_hat", "residual", "angles_used"]);
    t.cutoff(IdealScattering::new(&s, est.kappa_hat)?.slope_truncation().n_max);
    let used: Vec<String> = est.angles_used.iter().map(|a| format!("{a:.16e}")).collect();
    t.rows.push(vec![
        Cell::Num(est.kappa_hat),
        Cell::Num(est.residual),
        Cell::Text(used.join(";")),
    ]);
    Ok(t)
}

/// Wall slopes for `beta = alpha + offset`; the note carries the largest
/// relative spread across offsets.
fn periodicity(cfg: &RunConfig) -> Result<Table, CliError> {
    let (beta, v0) = finite_mode(cfg);
    let v0 = cfg.absolute_v0(v0.expect("validated"));
    let alpha = frac(beta);
    let base = cfg.scenario(alpha, Barrier::Finite(v0))?;
    let spread = flux_periodicity_check(&base, alpha, &cfg.grid.offsets, &cfg.grid.phi)?;
    let rows = cfg
        .grid
        .offsets
        .par_iter()
        .map(|&m| {
            let b = alpha + m as f64;
            let sol = FiniteScattering::new(&base.with_flux(b)?, cfg.radius)?;
            let slopes: Vec<f64> = cfg.grid.phi.iter().map(|&p| sol.slope(p)).collect();
            Ok((m, b, slopes, sol.truncation().n_max))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut t = Table::new(&["offset", "beta", "phi", "slope"]);
    t.note(format!("max_relative_spread {:.16e}", spread));
    for (m, b, slopes, n_max) in rows {
        t.cutoff(n_max);
        for (phi, v) in cfg.grid.phi.iter().zip(slopes) {
            t.rows.push(vec![Cell::Int(m as i64), Cell::Num(b), Cell::Num(*phi), Cell::Num(v)]);
        }
    }
    Ok(t)
}
