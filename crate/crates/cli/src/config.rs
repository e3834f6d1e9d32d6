//! Run configuration: a TOML document with `[scenario]`, `[grid]` and
//! `[output]` tables.
//!
//! Barrier heights (`V0` and the ladder) are given in units of `k^2`, angles
//! in units of pi, radii in units of `R`.

use ab_core::{Barrier, CylinderScenario};
use serde::Deserialize;
use std::path::PathBuf;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Figure2,
    Figure3a,
    Figure3b,
    SlopeProfile,
    Force,
    ForceScan,
    Converge,
    InferKappa,
    Periodicity,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    scenario: RawScenario,
    #[serde(default)]
    grid: RawGrid,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    #[serde(rename = "R")]
    radius: Option<f64>,
    k: Option<f64>,
    #[serde(rename = "kR")]
    kr: Option<f64>,
    beta: Option<f64>,
    kappa: Option<f64>,
    #[serde(rename = "V0")]
    v0: Option<V0Value>,
    rho: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum V0Value {
    Number(f64),
    Text(String),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    angles: Option<usize>,
    phi: Option<Vec<f64>>,
    radial: Option<[f64; 2]>,
    radial_points: Option<usize>,
    ladder: Option<Vec<f64>>,
    quadrature: Option<usize>,
    kappas: Option<Vec<f64>>,
    kappa_points: Option<usize>,
    alphas: Option<Vec<f64>>,
    #[serde(rename = "kR")]
    kr_list: Option<Vec<f64>>,
    observable: Option<String>,
    offsets: Option<Vec<u32>>,
    samples: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    path: Option<PathBuf>,
}

/// Scenario mode implied by the `[scenario]` keys.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    /// Hard wall with gauge parameter `kappa`.
    Ideal { kappa: f64 },
    /// Flux `beta` behind a barrier of `v0` times `k^2`; without `v0` the
    /// heights come from the ladder.
    Finite { beta: f64, v0: Option<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObservableKind {
    Slope,
    ForceBackward,
    ForcePerpendicular,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub angles: usize,
    /// Radians.
    pub phi: Vec<f64>,
    /// Units of `R`.
    pub radial: (f64, f64),
    pub radial_points: usize,
    /// Units of `k^2`.
    pub ladder: Vec<f64>,
    pub quadrature: usize,
    pub kappas: Vec<f64>,
    pub alphas: Vec<f64>,
    pub kr_list: Vec<f64>,
    pub observable: ObservableKind,
    pub offsets: Vec<u32>,
    pub samples: Option<Vec<(f64, f64)>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub radius: f64,
    pub wavenumber: f64,
    pub rho: f64,
    pub mode: Mode,
    pub grid: Grid,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn kr(&self) -> f64 {
        self.wavenumber * self.radius
    }

    /// Scenario with the given barrier and flux, sharing geometry and beam.
    pub fn scenario(&self, beta: f64, barrier: Barrier) -> Result<CylinderScenario, CliError> {
        Ok(CylinderScenario::new(self.radius, self.wavenumber, beta, barrier, self.rho)?)
    }

    /// `V0` in units of `k^2` to an absolute barrier height.
    pub fn absolute_v0(&self, v0_over_k2: f64) -> f64 {
        v0_over_k2 * self.wavenumber * self.wavenumber
    }
}

fn validation(field: &str, constraint: impl Into<String>) -> CliError {
    CliError::Validation { field: field.to_string(), constraint: constraint.into() }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.chars().rev().take_while(|&c| c != '\n').count() + 1;
    (line, col)
}

fn positive(field: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(validation(field, format!("must be positive and finite, got {v}")))
    }
}

fn nonempty<T>(field: &str, v: &[T]) -> Result<(), CliError> {
    if v.is_empty() {
        Err(validation(field, "must not be empty"))
    } else {
        Ok(())
    }
}

fn in_unit_interval(field: &str, values: &[f64]) -> Result<(), CliError> {
    match values.iter().find(|v| !(0.0..1.0).contains(*v)) {
        Some(v) => Err(validation(field, format!("entries must lie in [0, 1), got {v}"))),
        None => Ok(()),
    }
}

pub fn parse_config(command: Command, text: &str) -> Result<RunConfig, CliError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map(|s| line_col(text, s.start)).unwrap_or((0, 0));
        CliError::Parse { line, column, message: e.message().split_whitespace().collect::<Vec<_>>().join(" ") }
    })?;
    validate(command, raw)
}

fn validate(command: Command, raw: RawConfig) -> Result<RunConfig, CliError> {
    let sc = raw.scenario;
    let radius = positive("R", sc.radius.unwrap_or(1.0))?;
    let wavenumber = match (sc.k, sc.kr) {
        (Some(k), None) => positive("k", k)?,
        (None, Some(kr)) => positive("kR", kr)? / radius,
        (Some(_), Some(_)) => return Err(validation("kR", "give either k or kR, not both")),
        (None, None) => return Err(validation("kR", "one of k or kR is required")),
    };
    let rho = positive("rho", sc.rho.unwrap_or(1.0))?;

    let v0 = match sc.v0 {
        None => None,
        Some(V0Value::Text(t)) if t == "inf" => Some(f64::INFINITY),
        Some(V0Value::Text(t)) => {
            return Err(validation("V0", format!("must be a number or \"inf\", got \"{t}\"")))
        }
        Some(V0Value::Number(v)) => {
            if !(v.is_finite() && v >= 0.0) {
                return Err(validation("V0", format!("must be nonnegative, got {v}")));
            }
            Some(v)
        }
    };
    let mode = match (sc.beta, sc.kappa, v0) {
        (Some(_), _, Some(v)) if v.is_infinite() => {
            return Err(validation("beta", "V0 = \"inf\" is the ideal model, which takes kappa"))
        }
        (Some(_), Some(_), _) => return Err(validation("kappa", "give either beta or kappa")),
        (Some(beta), None, v0) => {
            if !beta.is_finite() {
                return Err(validation("beta", "must be finite"));
            }
            Mode::Finite { beta, v0 }
        }
        (None, Some(kappa), None) => {
            in_unit_interval("kappa", &[kappa])?;
            Mode::Ideal { kappa }
        }
        (None, Some(kappa), Some(v)) if v.is_infinite() => {
            in_unit_interval("kappa", &[kappa])?;
            Mode::Ideal { kappa }
        }
        (None, Some(_), Some(_)) => {
            return Err(validation("kappa", "a finite V0 describes a real flux; use beta"))
        }
        (None, None, Some(v)) if v.is_finite() => Mode::Finite { beta: 0.0, v0: Some(v) },
        (None, None, _) => Mode::Ideal { kappa: 0.0 },
    };

    let g = raw.grid;
    let angles = g.angles.unwrap_or(256);
    if angles < 2 {
        return Err(validation("angles", "at least two angles are needed"));
    }
    let phi: Vec<f64> = g
        .phi
        .unwrap_or_else(|| match command {
            Command::Figure2 | Command::Figure3a => vec![1.3],
            _ => vec![1.0, 1.3],
        })
        .iter()
        .map(|p| p * std::f64::consts::PI)
        .collect();
    nonempty("phi", &phi)?;
    if let Some(p) = phi.iter().find(|p| !p.is_finite() || **p < 0.0 || **p > std::f64::consts::TAU) {
        return Err(validation("phi", format!("angles must lie in [0, 2], got {}", p / std::f64::consts::PI)));
    }
    let radial = match g.radial {
        Some([a, b]) if a > 0.0 && b > a && b.is_finite() => (a, b),
        Some(_) => return Err(validation("radial", "need 0 < start < end")),
        None if command == Command::Figure3a => (1.0, 1.02),
        None => (0.98, 1.02),
    };
    let radial_points = g.radial_points.unwrap_or(81);
    if radial_points < 2 {
        return Err(validation("radial_points", "at least two points are needed"));
    }
    let ladder = g.ladder.unwrap_or_else(|| vec![1e4, 1e5, 1e6, 1e7, 1e8]);
    nonempty("ladder", &ladder)?;
    if ladder.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(validation("ladder", "entries must be positive and finite"));
    }
    let quadrature = g.quadrature.unwrap_or(512);
    ab_core::force::QuadratureSpec::new(quadrature)
        .map_err(|e| validation("quadrature", e.to_string()))?;

    let kappas = match (g.kappas, g.kappa_points) {
        (Some(_), Some(_)) => return Err(validation("kappa_points", "give either kappas or kappa_points")),
        (Some(k), None) => k,
        (None, Some(n)) if n >= 2 => (0..n).map(|i| i as f64 / n as f64).collect(),
        (None, Some(_)) => return Err(validation("kappa_points", "at least two points are needed")),
        (None, None) if command == Command::Figure3a => vec![0.2, 0.4],
        (None, None) => (0..100).map(|i| i as f64 / 100.0).collect(),
    };
    nonempty("kappas", &kappas)?;
    in_unit_interval("kappas", &kappas)?;
    let alphas = g.alphas.unwrap_or_else(|| (0..20).map(|i| i as f64 / 20.0).collect());
    nonempty("alphas", &alphas)?;
    in_unit_interval("alphas", &alphas)?;
    let kr_list = g.kr_list.unwrap_or_else(|| vec![wavenumber * radius]);
    nonempty("kR", &kr_list)?;
    for &kr in &kr_list {
        positive("kR", kr)?;
    }
    let observable = match g.observable.as_deref().unwrap_or("slope") {
        "slope" => ObservableKind::Slope,
        "force_backward" => ObservableKind::ForceBackward,
        "force_perpendicular" => ObservableKind::ForcePerpendicular,
        other => {
            return Err(validation(
                "observable",
                format!("expected slope, force_backward or force_perpendicular, got \"{other}\""),
            ))
        }
    };
    let offsets = g.offsets.unwrap_or_else(|| vec![0, 1, 2]);
    nonempty("offsets", &offsets)?;
    let samples = g.samples.map(|s| {
        s.into_iter()
            .map(|[p, v]| (p * std::f64::consts::PI, v))
            .collect::<Vec<_>>()
    });

    let cfg = RunConfig {
        command,
        radius,
        wavenumber,
        rho,
        mode,
        grid: Grid {
            angles,
            phi,
            radial,
            radial_points,
            ladder,
            quadrature,
            kappas,
            alphas,
            kr_list,
            observable,
            offsets,
            samples,
        },
        output: raw.output.path,
    };
    check_command(&cfg)?;
    Ok(cfg)
}

/// Per-command mode requirements.
fn check_command(cfg: &RunConfig) -> Result<(), CliError> {
    use Command::*;
    let finite = matches!(cfg.mode, Mode::Finite { .. });
    let fixed_v0 = matches!(cfg.mode, Mode::Finite { v0: Some(_), .. });
    match cfg.command {
        Figure2 | Converge if !finite => {
            Err(validation("beta", "this command follows a barrier ladder and needs beta"))
        }
        Figure2 if cfg.grid.phi.len() != 1 => Err(validation("phi", "figure2 takes a single angle")),
        Figure3a if cfg.grid.phi.len() != 1 => Err(validation("phi", "figure3a takes a single angle")),
        Periodicity if !fixed_v0 => Err(validation("V0", "periodicity needs beta and a finite V0")),
        Figure3a | Figure3b | InferKappa if finite => {
            Err(validation("beta", "this command uses the ideal model; give kappa or V0 = \"inf\""))
        }
        SlopeProfile | Force if finite && !fixed_v0 => {
            Err(validation("V0", "a finite-barrier run needs V0"))
        }
        _ => Ok(()),
    }
}
