//! Hard-wall cylinder with an exterior gauge field `kappa / r e_phi`.
//!
//! The scattering state is the partial-wave series
//!
//! ```text
//! psi(r, phi) = sum_n c_n e^{i n (phi + pi)} [ J_nu(kr) - J_nu(kR) / H_nu(kR) H_nu(kr) ]
//! ```
//!
//! with `nu = |n + kappa|` and `c_n = (-i)^nu = e^{-i pi nu / 2}`, which
//! reproduces the incident wave `e^{ikx - i kappa (phi - pi)}` around the
//! backward direction. Because every channel vanishes at `r = R`, the radial
//! slope of `|psi|` there reduces through the Wronskian to
//! `2/(pi R) |sum_n c_n e^{i n (phi + pi)} / H_nu(kR)|`.

use crate::error::{Error, Result};
use crate::scenario::CylinderScenario;
use crate::series::{channel_order, initial_cutoff, sum_channels, SeriesTruncation};
use crate::specfun::{cylinder, CylinderValue, MAX_ORDER};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

/// Sampled `d|psi|/dr` at `r = R` over an angle grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeProfile {
    pub angles: Vec<f64>,
    pub slopes: Vec<f64>,
}

/// `(-i)^nu` on the principal branch.
pub fn incident_coefficient(nu: f64) -> Complex64 {
    Complex64::from_polar(1.0, -FRAC_PI_2 * nu)
}

pub(crate) fn angular_factor(n: i64, phi: f64) -> Complex64 {
    Complex64::from_polar(1.0, n as f64 * (phi + PI))
}

/// Largest `|n|` that keeps `|n + kappa|` inside the special-function range.
pub(crate) fn channel_cap(shift: f64) -> i64 {
    (MAX_ORDER - shift.abs().ceil()) as i64 - 1
}

pub fn validate_kappa(kappa: f64) -> Result<()> {
    if kappa.is_finite() && (0.0..1.0).contains(&kappa) {
        Ok(())
    } else {
        Err(Error::Input(format!("kappa must lie in [0, 1), got {kappa}")))
    }
}

pub fn validate_angle_grid(angles: &[f64]) -> Result<()> {
    if angles.is_empty() {
        return Err(Error::Input("empty angle grid".into()));
    }
    if angles.iter().any(|a| !a.is_finite() || *a < 0.0 || *a >= TAU) {
        return Err(Error::Input("angles must lie in [0, 2 pi)".into()));
    }
    if angles.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Input("angle grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Uniform grid `2 pi j / n`, `j = 0..n`.
pub fn uniform_angles(n: usize) -> Vec<f64> {
    (0..n).map(|j| TAU * j as f64 / n as f64).collect()
}

/// Precomputed hard-wall solution for one `(kR, kappa)`.
#[derive(Debug, Clone)]
pub struct IdealScattering {
    radius: f64,
    wavenumber: f64,
    kappa: f64,
    phase: Complex64,
    boundary: Vec<CylinderValue>,
    boundary_min_n: i64,
    slope_terms: Vec<(i64, Complex64)>,
    slope_truncation: SeriesTruncation,
}

impl IdealScattering {
    pub fn new(scenario: &CylinderScenario, kappa: f64) -> Result<Self> {
        validate_kappa(kappa)?;
        let kr = scenario.kr();
        let cap = channel_cap(kappa);
        let mut cache: Vec<(i64, CylinderValue)> = Vec::new();
        let mut slope_terms = Vec::new();
        let (_, slope_truncation) = sum_channels(initial_cutoff(kr), cap, |n| {
            let nu = (n as f64 + kappa).abs();
            let v = cylinder(nu, kr)?;
            cache.push((n, v));
            let a = (v.h_scaled().recip() * incident_coefficient(nu)).to_complex();
            slope_terms.push((n, a));
            Ok(a)
        })?;
        let n_keep = slope_truncation.n_max;
        slope_terms.retain(|(n, _)| n.abs() <= n_keep);
        cache.sort_by_key(|(n, _)| *n);
        let boundary_min_n = cache.first().map(|(n, _)| *n).unwrap_or(0);
        Ok(Self {
            radius: scenario.radius,
            wavenumber: scenario.wavenumber,
            kappa,
            phase: Complex64::new(1.0, 0.0),
            boundary: cache.into_iter().map(|(_, v)| v).collect(),
            boundary_min_n,
            slope_terms,
            slope_truncation,
        })
    }

    /// Same state multiplied by a constant unit phase.
    pub fn with_global_phase(mut self, phase: Complex64) -> Self {
        self.phase = phase / phase.norm();
        self
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn wavenumber(&self) -> f64 {
        self.wavenumber
    }

    pub fn slope_truncation(&self) -> SeriesTruncation {
        self.slope_truncation
    }

    fn boundary_value(&self, n: i64) -> Result<CylinderValue> {
        let idx = n - self.boundary_min_n;
        if idx >= 0 && (idx as usize) < self.boundary.len() {
            return Ok(self.boundary[idx as usize]);
        }
        cylinder((n as f64 + self.kappa).abs(), self.wavenumber * self.radius)
    }

    /// Radial channel function `J_nu(kr) - J_nu(kR)/H_nu(kR) H_nu(kr)` and
    /// its `r`-derivative.
    fn channel(&self, n: i64, r: f64) -> Result<(Complex64, Complex64)> {
        let nu = (n as f64 + self.kappa).abs();
        let at_wall = self.boundary_value(n)?;
        let here = cylinder(nu, self.wavenumber * r)?;
        let ratio = at_wall.j_scaled() / at_wall.h_scaled();
        let value = here.j_scaled().sub(ratio * here.h_scaled()).to_complex();
        let deriv = here.jp_scaled().sub(ratio * here.hp_scaled()).to_complex() * self.wavenumber;
        Ok((value, deriv))
    }

    fn check_radius(&self, r: f64) -> Result<()> {
        if !r.is_finite() || r < self.radius {
            return Err(Error::Range(format!(
                "radius {r} inside the cylinder (R = {})",
                self.radius
            )));
        }
        Ok(())
    }

    /// `psi(r, phi)` for `r >= R`.
    pub fn psi(&self, r: f64, phi: f64) -> Result<Complex64> {
        Ok(self.psi_with_truncation(r, phi)?.0)
    }

    pub fn psi_with_truncation(&self, r: f64, phi: f64) -> Result<(Complex64, SeriesTruncation)> {
        self.check_radius(r)?;
        let (sum, t) = sum_channels(
            initial_cutoff(self.wavenumber * r),
            channel_cap(self.kappa),
            |n| {
                let nu = (n as f64 + self.kappa).abs();
                let (f, _) = self.channel(n, r)?;
                Ok(incident_coefficient(nu) * angular_factor(n, phi) * f)
            },
        )?;
        Ok((sum * self.phase, t))
    }

    /// `d psi / dr` at `(r, phi)`, `r >= R`.
    pub fn psi_radial_derivative(&self, r: f64, phi: f64) -> Result<Complex64> {
        self.check_radius(r)?;
        let (sum, _) = sum_channels(
            initial_cutoff(self.wavenumber * r),
            channel_cap(self.kappa),
            |n| {
                let nu = (n as f64 + self.kappa).abs();
                let (_, d) = self.channel(n, r)?;
                Ok(incident_coefficient(nu) * angular_factor(n, phi) * d)
            },
        )?;
        Ok(sum * self.phase)
    }

    /// `d|psi|/dr` at `r = R` from the closed form.
    pub fn slope(&self, phi: f64) -> f64 {
        let ordered = channel_order(self.slope_truncation.n_max);
        let mut sum = Complex64::new(0.0, 0.0);
        // slope_terms were pushed in channel_order, so the zip is aligned
        for ((n, a), m) in self.slope_terms.iter().zip(ordered) {
            debug_assert_eq!(*n, m);
            sum += a * angular_factor(*n, phi);
        }
        2.0 / (PI * self.radius) * (sum * self.phase).norm()
    }

    pub fn slope_profile(&self, angles: &[f64]) -> Result<SlopeProfile> {
        validate_angle_grid(angles)?;
        let slopes = angles.iter().map(|&phi| self.slope(phi)).collect();
        Ok(SlopeProfile {
            angles: angles.to_vec(),
            slopes,
        })
    }
}

pub fn ideal_psi(scenario: &CylinderScenario, kappa: f64, r: f64, phi: f64) -> Result<Complex64> {
    IdealScattering::new(scenario, kappa)?.psi(r, phi)
}

pub fn ideal_slope(scenario: &CylinderScenario, kappa: f64, phi: f64) -> Result<f64> {
    Ok(IdealScattering::new(scenario, kappa)?.slope(phi))
}

pub fn ideal_slope_profile(
    scenario: &CylinderScenario,
    kappa: f64,
    angles: &[f64],
) -> Result<SlopeProfile> {
    IdealScattering::new(scenario, kappa)?.slope_profile(angles)
}
