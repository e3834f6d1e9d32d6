//! Procedures built on the scattering models: recovering `kappa` from
//! boundary slopes, barrier-height convergence studies and flux-periodicity
//! checks.

use crate::error::{Error, Result};
use crate::finite::FiniteScattering;
use crate::force::{force_from_finite, force_ideal, QuadratureSpec};
use crate::ideal::IdealScattering;
use crate::scenario::{Barrier, CylinderScenario};
use rayon::prelude::*;

pub const KAPPA_SCAN_STEP: f64 = 1e-3;
pub const KAPPA_TOLERANCE: f64 = 1e-8;
/// Two refined minima closer than this in residual are indistinguishable.
pub const AMBIGUITY_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct KappaEstimate {
    pub kappa_hat: f64,
    pub residual: f64,
    pub angles_used: Vec<f64>,
}

fn wrap_unit(x: f64) -> f64 {
    let w = x.rem_euclid(1.0);
    if w >= 1.0 {
        0.0
    } else {
        w
    }
}

fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Least-squares mismatch `sum ((slope_kappa(phi_i) - s_i) R)^2`.
fn slope_residual(scenario: &CylinderScenario, samples: &[(f64, f64)], kappa: f64) -> Result<f64> {
    let sol = IdealScattering::new(scenario, wrap_unit(kappa))?;
    let r = scenario.radius;
    Ok(samples
        .iter()
        .map(|&(phi, s)| ((sol.slope(phi) - s) * r).powi(2))
        .sum())
}

fn golden_section(
    f: impl Fn(f64) -> Result<f64>,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    let x = 0.5 * (a + b);
    Ok((x, f(x)?))
}

/// Recovers the gauge parameter from boundary slopes `(phi, d|psi|/dr)`.
///
/// A dense scan over `[0, 1)` locates every local minimum of the residual
/// (the domain is periodic), each is refined by golden-section search, and
/// the best is returned unless the runner-up is within
/// [`AMBIGUITY_THRESHOLD`].
pub fn infer_kappa(scenario: &CylinderScenario, samples: &[(f64, f64)]) -> Result<KappaEstimate> {
    if samples.is_empty() {
        return Err(Error::Input("need at least one slope sample".into()));
    }
    if samples.iter().any(|(p, s)| !p.is_finite() || !s.is_finite()) {
        return Err(Error::Input("non-finite slope sample".into()));
    }
    let n_scan = (1.0 / KAPPA_SCAN_STEP).round() as usize;
    let scan: Vec<f64> = (0..n_scan)
        .into_par_iter()
        .map(|i| slope_residual(scenario, samples, i as f64 * KAPPA_SCAN_STEP))
        .collect::<Result<_>>()?;

    let mut candidates = Vec::new();
    for i in 0..n_scan {
        let prev = scan[(i + n_scan - 1) % n_scan];
        let next = scan[(i + 1) % n_scan];
        if scan[i] <= prev && scan[i] <= next {
            let centre = i as f64 * KAPPA_SCAN_STEP;
            let (x, fx) = golden_section(
                |k| slope_residual(scenario, samples, k),
                centre - KAPPA_SCAN_STEP,
                centre + KAPPA_SCAN_STEP,
                KAPPA_TOLERANCE,
            )?;
            candidates.push((wrap_unit(x), fx));
        }
    }
    candidates.sort_by(|a, b| a.1.total_cmp(&b.1));
    // plateaus yield the same minimum from neighbouring scan points
    candidates.dedup_by(|a, b| circular_distance(a.0, b.0) < 10.0 * KAPPA_SCAN_STEP);

    let (best, best_res) = candidates[0];
    if let Some(&(second, second_res)) = candidates.get(1) {
        if (second_res - best_res).abs() <= AMBIGUITY_THRESHOLD {
            return Err(Error::Ambiguity {
                first: best,
                second,
            });
        }
    }
    let kappa_hat = if 1.0 - best < KAPPA_TOLERANCE { 0.0 } else { best };
    Ok(KappaEstimate {
        kappa_hat,
        residual: best_res,
        angles_used: samples.iter().map(|s| s.0).collect(),
    })
}

/// What a convergence study tracks along the barrier ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Observable {
    /// `d|psi|/dr` at the given angle.
    Slope { phi: f64 },
    /// Backward (x) force component, normalised.
    ForceBackward,
    /// Perpendicular (y) force component, normalised.
    ForcePerpendicular,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub ladder: Vec<(f64, f64)>,
    pub extrapolated_limit: f64,
    /// Power `p` of `1/V0` in `observable = limit + c V0^-p`.
    pub fitted_order: f64,
    /// The hard-wall value at `kappa = frac(beta)`.
    pub reference: f64,
}

impl ConvergenceReport {
    /// `|observable(V0) - limit|` along the ladder.
    pub fn distances(&self) -> Vec<f64> {
        self.ladder
            .iter()
            .map(|(_, o)| (o - self.extrapolated_limit).abs())
            .collect()
    }

    pub fn is_monotone(&self) -> bool {
        self.distances().windows(2).all(|w| w[1] < w[0])
    }
}

/// Solves `(x_a - x_b)/(x_b - x_c) = ratio` for `p`, `x_i = v_i^-p`, by bisection.
fn three_point_order(v: [f64; 3], ratio: f64) -> Option<f64> {
    let g = |p: f64| {
        let x: Vec<f64> = v.iter().map(|vi| vi.powf(-p)).collect();
        (x[0] - x[1]) / (x[1] - x[2]) - ratio
    };
    let (mut lo, mut hi) = (1e-6, 20.0);
    let (glo, ghi) = (g(lo), g(hi));
    if !(glo.is_finite() && ghi.is_finite()) || glo.signum() == ghi.signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid).signum() == glo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Extrapolated limit and order from `(V0, observable)` pairs, ladder
/// strictly increasing in `V0`.
pub fn extrapolate_ladder(ladder: &[(f64, f64)]) -> Result<(f64, f64)> {
    if ladder.len() < 3 {
        return Err(Error::Fit("need at least three ladder points".into()));
    }
    let m = ladder.len();
    let (va, oa) = ladder[m - 3];
    let (vb, ob) = ladder[m - 2];
    let (vc, oc) = ladder[m - 1];
    let d1 = oa - ob;
    let d2 = ob - oc;
    if d2 == 0.0 {
        return Ok((oc, f64::INFINITY));
    }
    let ratio = d1 / d2;
    if ratio <= 1.0 {
        return Err(Error::Fit(format!(
            "last three ladder points do not contract (ratio {ratio})"
        )));
    }
    let p3 = three_point_order([va, vb, vc], ratio)
        .ok_or_else(|| Error::Fit("no order matches the last three ladder points".into()))?;
    let xb = vb.powf(-p3);
    let xc = vc.powf(-p3);
    let c = d2 / (xb - xc);
    let limit = oc - c * xc;

    // log-log least squares of |o - limit| against V0
    let pts: Vec<(f64, f64)> = ladder
        .iter()
        .filter_map(|&(v, o)| {
            let d = (o - limit).abs();
            (d > 0.0).then(|| (v.ln(), d.ln()))
        })
        .collect();
    if pts.len() < 2 {
        return Err(Error::Fit("ladder collapsed onto the limit".into()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let order = -sxy / sxx;

    // The residual is judged in the observable itself, so the amplitude is
    // fitted there too (linear least squares at the log-log order).
    let basis: Vec<f64> = ladder.iter().map(|&(v, _)| v.powf(-order)).collect();
    let amp = ladder
        .iter()
        .zip(&basis)
        .map(|(&(_, o), x)| (o - limit) * x)
        .sum::<f64>()
        / basis.iter().map(|x| x * x).sum::<f64>();
    let lo = ladder.iter().map(|l| l.1).fold(f64::INFINITY, f64::min);
    let hi = ladder.iter().map(|l| l.1).fold(f64::NEG_INFINITY, f64::max);
    let range = (hi - lo).max(limit.abs() * f64::EPSILON);
    let rms = (ladder
        .iter()
        .zip(&basis)
        .map(|(&(_, o), x)| (o - limit - amp * x).powi(2))
        .sum::<f64>()
        / ladder.len() as f64)
        .sqrt();
    if !(rms <= 0.1 * range) {
        return Err(Error::Fit(format!(
            "power-law residual {rms:e} exceeds 10% of the observable range {range:e}"
        )));
    }
    Ok((limit, order))
}

fn observable_value(
    sol: &FiniteScattering,
    observable: Observable,
    quad: QuadratureSpec,
) -> Result<f64> {
    Ok(match observable {
        Observable::Slope { phi } => sol.slope(phi),
        Observable::ForceBackward => force_from_finite(sol, quad)?.f1,
        Observable::ForcePerpendicular => force_from_finite(sol, quad)?.f2,
    })
}

fn reference_value(
    scenario: &CylinderScenario,
    observable: Observable,
    quad: QuadratureSpec,
) -> Result<f64> {
    let kappa = scenario.alpha();
    Ok(match observable {
        Observable::Slope { phi } => IdealScattering::new(scenario, kappa)?.slope(phi),
        Observable::ForceBackward => force_ideal(scenario, kappa, quad)?.f1,
        Observable::ForcePerpendicular => force_ideal(scenario, kappa, quad)?.f2,
    })
}

/// Evaluates `observable` along a ladder of barrier heights and extrapolates
/// to `V0 -> infinity`.
pub fn convergence_study(
    base: &CylinderScenario,
    v0_ladder: &[f64],
    observable: Observable,
    quad: QuadratureSpec,
) -> Result<ConvergenceReport> {
    if v0_ladder.len() < 4 {
        return Err(Error::Input("ladder needs at least four barrier heights".into()));
    }
    if v0_ladder.windows(2).any(|w| !(w[1] > w[0])) || v0_ladder[0] <= 0.0 {
        return Err(Error::Input("ladder must be positive and strictly increasing".into()));
    }
    if v0_ladder[v0_ladder.len() - 1] / v0_ladder[0] < 1e3 {
        return Err(Error::Input("ladder must span at least three decades".into()));
    }
    let ladder = v0_ladder
        .par_iter()
        .map(|&v0| {
            let s = base.with_barrier(Barrier::Finite(v0))?;
            let sol = FiniteScattering::new(&s, s.radius)?;
            Ok((v0, observable_value(&sol, observable, quad)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let (extrapolated_limit, fitted_order) = extrapolate_ladder(&ladder)?;
    let reference = reference_value(base, observable, quad)?;
    Ok(ConvergenceReport {
        ladder,
        extrapolated_limit,
        fitted_order,
        reference,
    })
}

/// Largest relative spread of the boundary slope between fluxes `alpha + m`,
/// `m` in `offsets`, at the scenario's barrier height.
pub fn flux_periodicity_check(
    scenario: &CylinderScenario,
    alpha: f64,
    offsets: &[u32],
    angles: &[f64],
) -> Result<f64> {
    let v0 = scenario
        .barrier
        .height()
        .ok_or_else(|| Error::Input("periodicity check needs a finite barrier".into()))?;
    let k2 = scenario.wavenumber * scenario.wavenumber;
    if v0 < 1e8 * k2 {
        return Err(Error::Input(format!("periodicity check needs V0 >= 1e8 k^2, got {v0}")));
    }
    if offsets.is_empty() || angles.is_empty() {
        return Err(Error::Input("need at least one offset and one angle".into()));
    }
    let slopes = offsets
        .par_iter()
        .map(|&m| {
            let s = scenario.with_flux(alpha + m as f64)?;
            let sol = FiniteScattering::new(&s, s.radius)?;
            Ok(angles.iter().map(|&phi| sol.slope(phi)).collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut defect: f64 = 0.0;
    for (ai, _) in angles.iter().enumerate() {
        let col: Vec<f64> = slopes.iter().map(|row| row[ai]).collect();
        let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
        let scale = hi.abs().max(lo.abs());
        if scale > 0.0 {
            defect = defect.max((hi - lo) / scale);
        }
    }
    Ok(defect)
}
