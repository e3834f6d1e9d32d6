//! Finite step barrier `V0 Theta(R - r)` with a homogeneous field inside.
//!
//! Inside the cylinder the vector potential is `beta r / R^2 e_phi` (in units
//! of `hbar / e`), outside it is `beta / r e_phi`. For canonical angular
//! momentum `n` the interior radial function obeys
//!
//! ```text
//! f'' + f'/r + [k^2 - 2 V0 - (n + beta r^2 / R^2)^2 / r^2] f = 0
//! ```
//!
//! which is integrated in Riccati form for `u = r f'/f` on `t = ln r`:
//!
//! ```text
//! du/dt = (n + beta r^2/R^2)^2 - u^2 + r^2 (2 V0 - k^2),   d(ln f)/dt = u
//! ```
//!
//! starting from the regular behaviour `u = |n|` near the axis. The
//! log-derivative `L = u(R)/R` is matched to `J_nu + s_n H_nu`,
//! `nu = |n + beta|`, outside.

use crate::error::{Error, Result};
use crate::ideal::{angular_factor, channel_cap, incident_coefficient, validate_angle_grid, SlopeProfile};
use crate::ode::{integrate, Tolerance};
use crate::scaled::Scaled;
use crate::scenario::CylinderScenario;
use crate::series::{channel_order, initial_cutoff, SeriesTruncation, TAIL_TOLERANCE};
use crate::specfun::{cylinder, CylinderValue};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Interior integration range and accuracy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid {
    pub r_start: f64,
    pub r_end: f64,
    pub tolerance: f64,
}

impl RadialGrid {
    pub fn for_scenario(scenario: &CylinderScenario) -> Self {
        Self {
            r_start: 1e-6 * scenario.radius,
            r_end: scenario.radius,
            tolerance: 1e-10,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_start > 0.0 && self.r_start < self.r_end && self.r_end.is_finite()) {
            return Err(Error::Input(format!(
                "radial grid needs 0 < r_start < r_end, got [{}, {}]",
                self.r_start, self.r_end
            )));
        }
        if !(self.tolerance > 0.0 && self.tolerance <= 1e-6) {
            return Err(Error::Input(format!(
                "radial tolerance must lie in (0, 1e-6], got {}",
                self.tolerance
            )));
        }
        Ok(())
    }
}

/// Matching data of one angular-momentum channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSolution {
    pub n: i64,
    pub nu_out: f64,
    /// `f'(R)/f(R)` of the interior solution.
    pub logderiv: f64,
    /// Outgoing coefficient; underflows to zero for high channels.
    pub s_n: Complex64,
    pub c_n: Complex64,
}

fn barrier_height(scenario: &CylinderScenario) -> Result<f64> {
    scenario
        .barrier
        .height()
        .ok_or_else(|| Error::Input("finite-barrier model needs a finite V0".into()))
}

/// Integrates channel `n` through the sorted radii `stops` (the last must be
/// `grid.r_end`), returning `(u, ln f)` at each.
fn integrate_interior(
    scenario: &CylinderScenario,
    n: i64,
    grid: &RadialGrid,
    stops: &[f64],
    rtol: f64,
) -> Result<Vec<[f64; 2]>> {
    let v0 = barrier_height(scenario)?;
    let beta = scenario.flux_ratio;
    let inv_r2 = 1.0 / (scenario.radius * scenario.radius);
    let k2 = scenario.wavenumber * scenario.wavenumber;
    let gap = 2.0 * v0 - k2;
    let nf = n as f64;
    let pole_guard = -1e8 * (1.0 + nf.abs());
    let rhs = |t: f64, y: &[f64; 2]| -> Result<[f64; 2]> {
        let r = t.exp();
        let u = y[0];
        if u < pole_guard || !u.is_finite() {
            return Err(Error::Stiffness { n, r });
        }
        let m = nf + beta * r * r * inv_r2;
        Ok([m * m - u * u + r * r * gap, u])
    };
    let t_stops: Vec<f64> = stops.iter().map(|r| r.ln()).collect();
    integrate(
        rhs,
        grid.r_start.ln(),
        [nf.abs(), 0.0],
        &t_stops,
        Tolerance {
            rtol,
            atol: rtol * 1e-2,
        },
    )
}

/// `f'(R)/f(R)` for the interior solution regular at the axis.
pub fn interior_logderiv(scenario: &CylinderScenario, n: i64, grid: &RadialGrid) -> Result<f64> {
    grid.validate()?;
    let stops = [grid.r_end];
    let coarse = integrate_interior(scenario, n, grid, &stops, grid.tolerance)?[0][0] / grid.r_end;
    let fine =
        integrate_interior(scenario, n, grid, &stops, grid.tolerance / 32.0)?[0][0] / grid.r_end;
    let scale = fine.abs().max(1.0 / grid.r_end);
    if (coarse - fine).abs() > 10.0 * grid.tolerance * scale {
        return Err(Error::Tolerance(format!(
            "channel {n}: log-derivative {coarse} vs {fine} under refinement"
        )));
    }
    Ok(fine)
}

#[derive(Debug, Clone, Copy)]
struct ChannelData {
    solution: ChannelSolution,
    nu: f64,
    s: Scaled,
    /// `psi_n(R)` without the angular factor and incident coefficient.
    boundary: Complex64,
}

fn match_channel(scenario: &CylinderScenario, n: i64, logderiv: f64) -> Result<ChannelData> {
    let k = scenario.wavenumber;
    let nu = (n as f64 + scenario.flux_ratio).abs();
    let v: CylinderValue = cylinder(nu, scenario.kr())?;
    let num = v.jp_scaled().scale_real(k).sub(v.j_scaled().scale_real(logderiv));
    let den = v.hp_scaled().scale_real(k).sub(v.h_scaled().scale_real(logderiv));
    if den.is_zero() || !den.mant.norm().is_finite() {
        return Err(Error::DegenerateMatch { n });
    }
    let s = -(num / den);
    let boundary = (Scaled::from_complex(Complex64::new(0.0, 2.0 / (PI * scenario.radius)))
        / den)
        .to_complex();
    Ok(ChannelData {
        solution: ChannelSolution {
            n,
            nu_out: nu,
            logderiv,
            s_n: s.to_complex(),
            c_n: incident_coefficient(nu),
        },
        nu,
        s,
        boundary,
    })
}

/// Interior log-derivative plus exterior matching for channel `n`.
pub fn channel_match(
    scenario: &CylinderScenario,
    n: i64,
    grid: &RadialGrid,
) -> Result<ChannelSolution> {
    let l = interior_logderiv(scenario, n, grid)?;
    Ok(match_channel(scenario, n, l)?.solution)
}

/// All channels of one finite-barrier scenario, ready for evaluation at
/// radii up to `r_max`.
#[derive(Debug, Clone)]
pub struct FiniteScattering {
    scenario: CylinderScenario,
    grid: RadialGrid,
    r_max: f64,
    n_max: i64,
    /// In `channel_order(n_max + 1)`; the last pair is the tail estimate.
    channels: Vec<ChannelData>,
}

impl FiniteScattering {
    pub fn new(scenario: &CylinderScenario, r_max: f64) -> Result<Self> {
        Self::with_grid(scenario, RadialGrid::for_scenario(scenario), r_max)
    }

    pub fn with_grid(scenario: &CylinderScenario, grid: RadialGrid, r_max: f64) -> Result<Self> {
        barrier_height(scenario)?;
        grid.validate()?;
        let r_max = r_max.max(scenario.radius);
        let cap = channel_cap(scenario.flux_ratio);
        let n_max = initial_cutoff(scenario.wavenumber * r_max).min(cap - 1);
        let order: Vec<i64> = channel_order(n_max + 1).collect();
        let channels = order
            .par_iter()
            .map(|&n| {
                let l = interior_logderiv(scenario, n, &grid)?;
                match_channel(scenario, n, l)
            })
            .collect::<Result<Vec<_>>>()?;
        let sol = Self {
            scenario: *scenario,
            grid,
            r_max,
            n_max,
            channels,
        };
        sol.check_tail(|c| c.boundary.norm() * (1.0 + c.solution.logderiv.abs() * scenario.radius))?;
        Ok(sol)
    }

    pub fn scenario(&self) -> &CylinderScenario {
        &self.scenario
    }

    pub fn truncation(&self) -> SeriesTruncation {
        let tail = self
            .channels
            .iter()
            .filter(|c| c.solution.n.abs() > self.n_max)
            .map(|c| c.boundary.norm())
            .sum();
        SeriesTruncation {
            n_max: self.n_max,
            tail_bound: tail,
        }
    }

    pub fn channels(&self) -> Vec<ChannelSolution> {
        self.channels
            .iter()
            .filter(|c| c.solution.n.abs() <= self.n_max)
            .map(|c| c.solution)
            .collect()
    }

    fn check_tail(&self, magnitude: impl Fn(&ChannelData) -> f64) -> Result<()> {
        let (mut kept, mut tail) = (0.0, 0.0);
        for c in &self.channels {
            if c.solution.n.abs() <= self.n_max {
                kept += magnitude(c);
            } else {
                tail += magnitude(c);
            }
        }
        if tail > TAIL_TOLERANCE * kept && tail >= f64::MIN_POSITIVE {
            return Err(Error::Truncation(format!(
                "finite series tail {tail:e} vs retained {kept:e} at n_max = {}",
                self.n_max
            )));
        }
        Ok(())
    }

    /// `(psi(R), d psi/dr (R))` at angle `phi`.
    pub fn boundary_values(&self, phi: f64) -> (Complex64, Complex64) {
        let mut psi = Complex64::new(0.0, 0.0);
        let mut dpsi = Complex64::new(0.0, 0.0);
        for c in self.channels.iter().filter(|c| c.solution.n.abs() <= self.n_max) {
            let t = c.solution.c_n * angular_factor(c.solution.n, phi) * c.boundary;
            psi += t;
            dpsi += t * c.solution.logderiv;
        }
        (psi, dpsi)
    }

    /// `d|psi|/dr` at `r = R`.
    pub fn slope(&self, phi: f64) -> f64 {
        let (psi, dpsi) = self.boundary_values(phi);
        let m = psi.norm();
        if m == 0.0 {
            dpsi.norm()
        } else {
            (psi.conj() * dpsi).re / m
        }
    }

    pub fn slope_profile(&self, angles: &[f64]) -> Result<SlopeProfile> {
        validate_angle_grid(angles)?;
        Ok(SlopeProfile {
            angles: angles.to_vec(),
            slopes: angles.iter().map(|&p| self.slope(p)).collect(),
        })
    }

    /// `|sqrt(V0) |psi(R)| - slope / sqrt(2)|`.
    pub fn boundary_relation_residual(&self, phi: f64) -> f64 {
        let v0 = self.scenario.barrier.height().unwrap_or(0.0);
        let (psi, _) = self.boundary_values(phi);
        (v0.sqrt() * psi.norm() - self.slope(phi) / 2f64.sqrt()).abs()
    }

    /// Channel radial functions `g_n(r)` and `g_n'(r)` (no angular factor,
    /// no incident coefficient) at every radius, indexed `[channel][radius]`.
    fn radial_table(&self, radii: &[f64]) -> Result<Vec<Vec<(Complex64, Complex64)>>> {
        let big_r = self.scenario.radius;
        for &r in radii {
            if !(r.is_finite() && r > self.grid.r_start) {
                return Err(Error::Range(format!("radius {r} outside the integration grid")));
            }
            if r > self.r_max * (1.0 + 1e-12) {
                return Err(Error::Range(format!(
                    "radius {r} beyond the prepared range r_max = {}",
                    self.r_max
                )));
            }
        }
        let mut inner: Vec<(usize, f64)> = radii
            .iter()
            .copied()
            .enumerate()
            .filter(|(_, r)| *r < big_r)
            .collect();
        inner.sort_by(|a, b| a.1.total_cmp(&b.1));
        let mut stops: Vec<f64> = inner.iter().map(|(_, r)| *r).collect();
        stops.push(big_r);
        let k = self.scenario.wavenumber;

        self.channels
            .par_iter()
            .map(|c| {
                let n = c.solution.n;
                let mut row = vec![(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); radii.len()];
                if !inner.is_empty() {
                    let states =
                        integrate_interior(&self.scenario, n, &self.grid, &stops, self.grid.tolerance)?;
                    let w_wall = states[states.len() - 1][1];
                    for ((idx, r), st) in inner.iter().zip(&states) {
                        let g = c.boundary * (st[1] - w_wall).exp();
                        row[*idx] = (g, g * (st[0] / r));
                    }
                }
                for (idx, &r) in radii.iter().enumerate() {
                    if r < big_r {
                        continue;
                    }
                    let v = cylinder(c.nu, k * r)?;
                    let g = v.j_scaled().add(c.s * v.h_scaled()).to_complex();
                    let gp = v.jp_scaled().add(c.s * v.hp_scaled()).to_complex() * k;
                    row[idx] = (g, gp);
                }
                Ok(row)
            })
            .collect()
    }

    /// `psi` on the tensor grid `radii x angles`, indexed `[radius][angle]`.
    pub fn psi_grid(&self, radii: &[f64], angles: &[f64]) -> Result<Vec<Vec<Complex64>>> {
        Ok(self
            .psi_and_derivative_grid(radii, angles)?
            .into_iter()
            .map(|row| row.into_iter().map(|(p, _)| p).collect())
            .collect())
    }

    /// `(psi, d psi/dr)` on `radii x angles`.
    pub fn psi_and_derivative_grid(
        &self,
        radii: &[f64],
        angles: &[f64],
    ) -> Result<Vec<Vec<(Complex64, Complex64)>>> {
        let table = self.radial_table(radii)?;
        let mut out = Vec::with_capacity(radii.len());
        for (ri, _) in radii.iter().enumerate() {
            let mut row = Vec::with_capacity(angles.len());
            for &phi in angles {
                let (mut psi, mut dpsi) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
                let (mut kept, mut tail) = (0.0, 0.0);
                for (c, g) in self.channels.iter().zip(&table) {
                    let w = c.solution.c_n * angular_factor(c.solution.n, phi);
                    let (v, d) = g[ri];
                    if c.solution.n.abs() <= self.n_max {
                        psi += w * v;
                        dpsi += w * d;
                        kept += v.norm();
                    } else {
                        tail += v.norm();
                    }
                }
                if tail > TAIL_TOLERANCE * kept && tail >= f64::MIN_POSITIVE {
                    return Err(Error::Truncation(format!(
                        "tail {tail:e} vs retained {kept:e} at r = {}",
                        radii[ri]
                    )));
                }
                row.push((psi, dpsi));
            }
            out.push(row);
        }
        Ok(out)
    }

    pub fn psi(&self, r: f64, phi: f64) -> Result<Complex64> {
        Ok(self.psi_grid(&[r], &[phi])?[0][0])
    }
}

pub fn finite_psi(scenario: &CylinderScenario, r: f64, phi: f64) -> Result<Complex64> {
    FiniteScattering::new(scenario, r)?.psi(r, phi)
}

pub fn finite_slope(scenario: &CylinderScenario, phi: f64) -> Result<f64> {
    Ok(FiniteScattering::new(scenario, scenario.radius)?.slope(phi))
}

/// Residual of `sqrt(V0) |psi(R)| = d|psi|/dr / sqrt(2)`.
pub fn boundary_relation_check(scenario: &CylinderScenario, phi: f64) -> Result<f64> {
    let v0 = barrier_height(scenario)?;
    if v0 < 1e3 * scenario.wavenumber * scenario.wavenumber {
        return Err(Error::Input(format!(
            "boundary relation needs V0 >= 1e3 k^2, got {v0}"
        )));
    }
    Ok(FiniteScattering::new(scenario, scenario.radius)?.boundary_relation_residual(phi))
}
