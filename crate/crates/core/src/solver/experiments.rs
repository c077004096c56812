use alloc::format;
use alloc::vec::Vec;

use super::grid::SolverGrid;
use super::run::{run, Controls, Trajectory};
#[allow(unused_imports)]
use crate::prelude::*;
use crate::radial::{sigma_d, Dimension, FracOrder, MassProfile, MassShape};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Violation {
    pub t: f64,
    pub r: f64,
    pub low: f64,
    pub high: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ComparisonReport {
    pub ordered: bool,
    /// Output times at which both runs were compared.
    pub times: Vec<f64>,
    pub first_violation: Option<Violation>,
    pub low: Trajectory,
    pub high: Trajectory,
}

/// Integrates both data on a common grid and checks M_low ≤ M_high + tol at
/// every checkpoint both runs reached, with tol = 1e-6·max M_high at that
/// time. Without checkpoints in `controls`, 20 equally spaced times are used.
pub fn comparison_check(
    low: &MassProfile,
    high: &MassProfile,
    grid: SolverGrid,
    controls: &Controls,
) -> Result<ComparisonReport> {
    if low.dimension() != high.dimension() {
        return Err(Error::domain("compared data live in different dimensions"));
    }
    let mut points = low.breakpoints();
    points.extend(high.breakpoints());
    let grid = grid.with_breakpoints(&points);
    for &r in grid.nodes() {
        let (a, b) = (low.eval(r), high.eval(r));
        if a > b + 1e-12 * b.abs() {
            return Err(Error::domain(format!("initial data are not ordered at r = {r} ({a} > {b})")));
        }
    }
    let mut controls = controls.clone();
    if controls.checkpoints.is_empty() {
        controls.checkpoints = (1..=20).map(|k| controls.t_end * k as f64 / 20.0).collect();
    }
    let lo = run(low, FracOrder::CLASSICAL, grid.clone(), &controls)?;
    let hi = run(high, FracOrder::CLASSICAL, grid, &controls)?;
    let mut times = Vec::new();
    let mut first_violation = None;
    for (a, b) in lo.checkpoints.iter().zip(&hi.checkpoints) {
        times.push(a.t);
        let tol = 1e-6 * b.m.iter().fold(0.0f64, |x, v| x.max(*v));
        if first_violation.is_none() {
            if let Some(i) = (0..a.m.len()).find(|&i| a.m[i] > b.m[i] + tol) {
                first_violation = Some(Violation { t: a.t, r: lo.base_grid[i], low: a.m[i], high: b.m[i] });
            }
        }
    }
    Ok(ComparisonReport { ordered: first_violation.is_none(), times, first_violation, low: lo, high: hi })
}

/// Least-squares fit of ln y = ln prefactor + exponent·ln x.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PowerFit {
    pub exponent: f64,
    pub prefactor: f64,
    /// Root-mean-square residual in ln y.
    pub rms: f64,
}

pub fn power_fit(x: &[f64], y: &[f64]) -> Result<PowerFit> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(Error::domain(format!("a power-law fit needs at least 3 points (got {})", x.len().min(y.len()))));
    }
    if x.iter().chain(y).any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::domain("power-law fit needs positive finite values"));
    }
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::domain("power-law fit needs distinct abscissae"));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let exponent = sxy / sxx;
    let c = my - exponent * mx;
    let rms = (lx.iter().zip(&ly).map(|(a, b)| (b - c - exponent * a).powi(2)).sum::<f64>() / n).sqrt();
    Ok(PowerFit { exponent, prefactor: c.exp(), rms })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TruncationRun {
    pub radius: f64,
    pub blowup_time: Option<f64>,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TruncationScaling {
    pub eta: f64,
    pub runs: Vec<TruncationRun>,
    /// Present only when every run blew up.
    pub fit: Option<PowerFit>,
}

impl TruncationScaling {
    pub fn conclusive(&self) -> bool {
        self.fit.is_some()
    }
}

/// Runs η·u_C with the ball of radius R removed, for each R, and fits the
/// detected blowup time against R. Each run uses `grid` scaled by R and
/// `t_end` scaled by R², so discretization effects are the same in every run.
pub fn truncation_scaling(
    d: Dimension,
    eta: f64,
    radii: &[f64],
    grid: &SolverGrid,
    controls: &Controls,
) -> Result<TruncationScaling> {
    if radii.len() < 3 {
        return Err(Error::domain(format!("the scaling fit needs at least 3 radii (got {})", radii.len())));
    }
    if !(eta > 0.0) || radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return Err(Error::domain("eta and every radius must be positive"));
    }
    let coef = 2.0 * eta * sigma_d(d);
    let mut runs = Vec::with_capacity(radii.len());
    for &radius in radii {
        let datum = MassProfile::new(
            d,
            MassShape::TruncatedPower { coef, exponent: d.as_f64() - 2.0, inner: radius, outer: f64::INFINITY },
        );
        let mut c = controls.clone();
        c.t_end = controls.t_end * radius * radius;
        c.checkpoints.clear();
        c.probes = None;
        let traj = run(&datum, FracOrder::CLASSICAL, grid.scaled(radius), &c)?;
        runs.push(TruncationRun { radius, blowup_time: traj.blowup_time(), steps: traj.steps });
    }
    let fit = if runs.iter().all(|r| r.blowup_time.is_some()) {
        let x: Vec<f64> = runs.iter().map(|r| r.radius).collect();
        let y: Vec<f64> = runs.iter().map(|r| r.blowup_time.unwrap_or(f64::NAN)).collect();
        Some(power_fit(&x, &y)?)
    } else {
        None
    };
    Ok(TruncationScaling { eta, runs, fit })
}
