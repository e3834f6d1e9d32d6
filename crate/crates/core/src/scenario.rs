use crate::error::{Error, Result};

/// Height of the step barrier `V0 * Theta(R - r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Barrier {
    Finite(f64),
    Infinite,
}

impl Barrier {
    pub fn height(&self) -> Option<f64> {
        match self {
            Barrier::Finite(v) => Some(*v),
            Barrier::Infinite => None,
        }
    }
}

/// Physical setup: cylinder radius, incident wavenumber, flux ratio
/// `beta = e Phi / h`, barrier and beam density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderScenario {
    pub radius: f64,
    pub wavenumber: f64,
    pub flux_ratio: f64,
    pub barrier: Barrier,
    pub density: f64,
}

impl CylinderScenario {
    pub fn new(
        radius: f64,
        wavenumber: f64,
        flux_ratio: f64,
        barrier: Barrier,
        density: f64,
    ) -> Result<Self> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Input(format!("{name} must be finite and > 0, got {v}")))
            }
        };
        positive("radius", radius)?;
        positive("wavenumber", wavenumber)?;
        positive("density", density)?;
        if !flux_ratio.is_finite() || flux_ratio < 0.0 {
            return Err(Error::Input(format!(
                "flux ratio must be finite and >= 0, got {flux_ratio}"
            )));
        }
        if let Barrier::Finite(v) = barrier {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Input(format!("barrier must be >= 0, got {v}")));
            }
        }
        Ok(Self {
            radius,
            wavenumber,
            flux_ratio,
            barrier,
            density,
        })
    }

    /// Hard-wall scenario with unit radius and density, parameterised by `kR`.
    pub fn hard_wall(kr: f64) -> Result<Self> {
        Self::new(1.0, kr, 0.0, Barrier::Infinite, 1.0)
    }

    /// Unit-radius scenario with barrier `v0_over_k2 * k^2`.
    pub fn with_barrier_ratio(kr: f64, beta: f64, v0_over_k2: f64) -> Result<Self> {
        Self::new(1.0, kr, beta, Barrier::Finite(v0_over_k2 * kr * kr), 1.0)
    }

    /// Non-integer part of the flux ratio.
    pub fn alpha(&self) -> f64 {
        self.flux_ratio - self.flux_ratio.floor()
    }

    pub fn kr(&self) -> f64 {
        self.wavenumber * self.radius
    }

    pub fn energy(&self) -> f64 {
        0.5 * self.wavenumber * self.wavenumber
    }

    pub fn with_flux(mut self, beta: f64) -> Result<Self> {
        self.flux_ratio = beta;
        Self::new(self.radius, self.wavenumber, beta, self.barrier, self.density)
    }

    pub fn with_barrier(self, barrier: Barrier) -> Result<Self> {
        Self::new(self.radius, self.wavenumber, self.flux_ratio, barrier, self.density)
    }
}
