//! Force per unit cylinder length on the beam,
//!
//! ```text
//! F = 1/2 \int_0^{2 pi} R dphi [d|psi|/dr (R, phi)]^2 (cos phi, sin phi)
//! ```
//!
//! evaluated with the periodic trapezoid rule on the surface slope profile.
//! Reported components are normalised by `rho k` (i.e. `rho hbar^2 k / m`).

use crate::error::{Error, Result};
use crate::finite::FiniteScattering;
use crate::ideal::{uniform_angles, IdealScattering};
use crate::scenario::CylinderScenario;
use std::f64::consts::{PI, TAU};

/// Maximum relative change allowed when the quadrature grid is doubled.
pub const DOUBLING_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub n_points: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { n_points: 512 }
    }
}

impl QuadratureSpec {
    pub fn new(n_points: usize) -> Result<Self> {
        let q = Self { n_points };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_points < 64 || !self.n_points.is_power_of_two() {
            return Err(Error::Input(format!(
                "quadrature points must be a power of two >= 64, got {}",
                self.n_points
            )));
        }
        Ok(())
    }

    pub fn angles(&self) -> Vec<f64> {
        uniform_angles(self.n_points)
    }
}

/// Normalised force components; `raw` carries the `rho k` factor back in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceVector {
    pub f1: f64,
    pub f2: f64,
    pub raw: (f64, f64),
}

impl ForceVector {
    fn from_raw(raw: (f64, f64), density: f64, wavenumber: f64) -> Self {
        let norm = density * wavenumber;
        Self {
            f1: raw.0 / norm,
            f2: raw.1 / norm,
            raw,
        }
    }

    pub fn norm(&self) -> f64 {
        self.f1.hypot(self.f2)
    }
}

/// Trapezoid surface integral for a unit-density beam.
fn surface_integral(radius: f64, n: usize, slope: impl Fn(f64) -> f64) -> (f64, f64) {
    let dphi = TAU / n as f64;
    let (mut fx, mut fy) = (0.0, 0.0);
    for j in 0..n {
        let phi = dphi * j as f64;
        let s = slope(phi);
        let w = s * s;
        fx += w * phi.cos();
        fy += w * phi.sin();
    }
    let pre = 0.5 * radius * dphi;
    (pre * fx, pre * fy)
}

fn converged_force(
    scenario: &CylinderScenario,
    quad: QuadratureSpec,
    slope: impl Fn(f64) -> f64,
) -> Result<ForceVector> {
    quad.validate()?;
    let (fx, fy) = surface_integral(scenario.radius, quad.n_points, &slope);
    let (gx, gy) = surface_integral(scenario.radius, 2 * quad.n_points, &slope);
    let scale = gx.hypot(gy);
    let change = (fx - gx).hypot(fy - gy);
    if !(change <= DOUBLING_TOLERANCE * scale) && change >= f64::MIN_POSITIVE {
        return Err(Error::Quadrature(format!(
            "doubling {} points changed the force by {:e} (relative {:e})",
            quad.n_points,
            change,
            change / scale
        )));
    }
    let rho = scenario.density;
    Ok(ForceVector::from_raw(
        (rho * fx, rho * fy),
        rho,
        scenario.wavenumber,
    ))
}

pub fn force_from_ideal(sol: &IdealScattering, scenario: &CylinderScenario, quad: QuadratureSpec) -> Result<ForceVector> {
    converged_force(scenario, quad, |phi| sol.slope(phi))
}

pub fn force_from_finite(sol: &FiniteScattering, quad: QuadratureSpec) -> Result<ForceVector> {
    converged_force(sol.scenario(), quad, |phi| sol.slope(phi))
}

/// Force on the beam for the hard-wall cylinder with gauge parameter `kappa`.
pub fn force_ideal(scenario: &CylinderScenario, kappa: f64, quad: QuadratureSpec) -> Result<ForceVector> {
    let sol = IdealScattering::new(scenario, kappa)?;
    force_from_ideal(&sol, scenario, quad)
}

/// Leading surface term of the force for a finite barrier.
pub fn force_finite(scenario: &CylinderScenario, quad: QuadratureSpec) -> Result<ForceVector> {
    let sol = FiniteScattering::new(scenario, scenario.radius)?;
    force_from_finite(&sol, quad)
}

/// Small-`kR` closed form `rho k (-2 sin^2(pi alpha), sin(2 pi alpha))`.
pub fn force_asymptotic(alpha: f64, k: f64, rho: f64) -> ForceVector {
    let f1 = -2.0 * (PI * alpha).sin().powi(2);
    let f2 = (2.0 * PI * alpha).sin();
    ForceVector {
        f1,
        f2,
        raw: (rho * k * f1, rho * k * f2),
    }
}

/// One `(kR, alpha)` cell of a symmetry scan together with its mirror `1 - alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryRow {
    pub kr: f64,
    pub alpha: f64,
    pub force: ForceVector,
    pub mirror: ForceVector,
    pub asymptotic: ForceVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryReport {
    pub rows: Vec<SymmetryRow>,
    /// `max |f1(alpha) - f1(1 - alpha)|`
    pub max_f1_defect: f64,
    /// `max |f2(alpha) + f2(1 - alpha)|`
    pub max_f2_defect: f64,
    /// Largest `|f2| / |f1|` among rows with `0.5 <= kR <= 2`, if any.
    pub perpendicular_ratio_near_unit_kr: Option<f64>,
}

fn mirror_kappa(alpha: f64) -> f64 {
    let m = 1.0 - alpha;
    if m >= 1.0 {
        0.0
    } else {
        m
    }
}

pub fn force_symmetry_report(kr_list: &[f64], alpha_list: &[f64]) -> Result<SymmetryReport> {
    if kr_list.is_empty() || alpha_list.is_empty() {
        return Err(Error::Input("symmetry report needs nonempty kR and alpha lists".into()));
    }
    let quad = QuadratureSpec::default();
    let mut rows = Vec::new();
    for &kr in kr_list {
        let scenario = CylinderScenario::hard_wall(kr)?;
        for &alpha in alpha_list {
            let force = force_ideal(&scenario, alpha, quad)?;
            let mirror = force_ideal(&scenario, mirror_kappa(alpha), quad)?;
            rows.push(SymmetryRow {
                kr,
                alpha,
                force,
                mirror,
                asymptotic: force_asymptotic(alpha, 1.0, 1.0),
            });
        }
    }
    let max_f1_defect = rows
        .iter()
        .map(|r| (r.force.f1 - r.mirror.f1).abs())
        .fold(0.0, f64::max);
    let max_f2_defect = rows
        .iter()
        .map(|r| (r.force.f2 + r.mirror.f2).abs())
        .fold(0.0, f64::max);
    let perpendicular_ratio_near_unit_kr = rows
        .iter()
        .filter(|r| (0.5..=2.0).contains(&r.kr) && r.force.f1 != 0.0)
        .map(|r| (r.force.f2 / r.force.f1).abs())
        .reduce(f64::max);
    Ok(SymmetryReport {
        rows,
        max_f1_defect,
        max_f2_defect,
        perpendicular_ratio_near_unit_kr,
    })
}
