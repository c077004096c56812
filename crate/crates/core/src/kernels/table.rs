use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::heat::{HeatKernel, KernelValue};
#[allow(unused_imports)]
use crate::prelude::*;
use crate::quad::geometric;
use crate::radial::{sigma_d, Dimension, FracOrder};
use crate::{Error, Result};

/// Geometric ρ-grid.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridSpec {
    pub rho_min: f64,
    pub rho_max: f64,
    pub per_decade: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { rho_min: 1e-4, rho_max: 1e3, per_decade: 48 }
    }
}

impl GridSpec {
    /// The default grid for this order. The Gaussian underflows long before
    /// 10³, so for α = 2 the top is cut to 30.
    pub fn default_for(alpha: FracOrder) -> Self {
        let g = GridSpec::default();
        if alpha.is_classical() {
            GridSpec { rho_max: 30.0, ..g }
        } else {
            g
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.rho_min > 0.0 && self.rho_max > 10.0 * self.rho_min && self.rho_max.is_finite())
            || self.per_decade < 4
        {
            return Err(Error::domain(format!(
                "kernel grid needs 0 < rho_min, rho_max >= 10 rho_min, per_decade >= 4 (got {:?})",
                self
            )));
        }
        Ok(())
    }
}

/// Least-squares fit |f| ≈ coef·ρ^exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TailFit {
    pub coef: f64,
    pub exponent: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable {
    kernel: HeatKernel,
    rho: Vec<f64>,
    r: Vec<f64>,
    rp: Vec<f64>,
    rpp: Vec<f64>,
    tails: [TailFit; 3],
    r0: f64,
}

/// Builds the table and rejects it when either normalization is off by more
/// than 1e-6.
pub fn kernel_table(d: Dimension, alpha: FracOrder, grid: GridSpec) -> Result<KernelTable> {
    let t = KernelTable::build(HeatKernel::new(d, alpha)?, grid)?;
    let (m0, m1) = (t.mass_residual(), t.moment_residual());
    if !(m0.abs() <= NORMALIZATION_TOL && m1.abs() <= NORMALIZATION_TOL) {
        return Err(Error::Kernel(format!(
            "normalization failed for d={}, alpha={}: mass residual {:e}, moment residual {:e}",
            d.get(),
            alpha.get(),
            m0,
            m1
        )));
    }
    Ok(t)
}

pub const NORMALIZATION_TOL: f64 = 1e-6;
pub const TAIL_TOL: f64 = 0.02;

impl KernelTable {
    /// Tabulates without the normalization gate.
    pub fn build(kernel: HeatKernel, grid: GridSpec) -> Result<Self> {
        grid.validate()?;
        let rho = geometric(grid.rho_min, grid.rho_max, grid.per_decade);
        let mut r = Vec::with_capacity(rho.len());
        let mut rp = Vec::with_capacity(rho.len());
        let mut rpp = Vec::with_capacity(rho.len());
        for &x in &rho {
            let v = kernel.eval(x);
            r.push(v.r);
            rp.push(v.rp);
            rpp.push(v.rpp);
        }
        let start = rho.partition_point(|&x| x < grid.rho_max / 10.0 * (1.0 - 1e-12));
        let fit = |ys: &[f64]| fit_power(&rho[start..], &ys[start..]);
        let tails = [fit(&r), fit(&rp), fit(&rpp)];
        let r0 = kernel.at_origin();
        Ok(KernelTable { kernel, rho, r, rp, rpp, tails, r0 })
    }

    pub fn kernel(&self) -> &HeatKernel {
        &self.kernel
    }

    pub fn dimension(&self) -> Dimension {
        self.kernel.dimension()
    }

    pub fn alpha(&self) -> FracOrder {
        self.kernel.alpha()
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn values(&self) -> &[f64] {
        &self.r
    }

    pub fn first_derivative(&self) -> &[f64] {
        &self.rp
    }

    pub fn second_derivative(&self) -> &[f64] {
        &self.rpp
    }

    /// Fits for R, R', R'' on the last decade.
    pub fn tails(&self) -> [TailFit; 3] {
        self.tails
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    /// σ_d ∫ R ρ^{d-1} dρ - 1.
    pub fn mass_residual(&self) -> f64 {
        let d = self.dimension().as_f64();
        sigma_d(self.dimension()) * self.integrate(|x, v| v.r * x.powf(d - 1.0)) - 1.0
    }

    /// (σ_d/d) ∫ |R'| ρ^d dρ - 1.
    pub fn moment_residual(&self) -> f64 {
        let d = self.dimension().as_f64();
        sigma_d(self.dimension()) / d * self.integrate(|x, v| -v.rp * x.powf(d)) - 1.0
    }

    /// ∫₀^∞ f(ρ, R(ρ)) dρ by the trapezoid rule in ln ρ on the table grid.
    /// Below ρ_min and past the last step the integrand (times ρ) is taken
    /// to follow the power law fitted to its two outermost values; past
    /// ρ_max the sum continues on the same step with fresh kernel values
    /// until that remainder is negligible.
    pub fn integrate(&self, f: impl Fn(f64, &KernelValue) -> f64) -> f64 {
        let n = self.rho.len();
        let h = (self.rho[n - 1] / self.rho[0]).ln() / (n - 1) as f64;
        let at = |i: usize| {
            let v = KernelValue { r: self.r[i], rp: self.rp[i], rpp: self.rpp[i] };
            f(self.rho[i], &v) * self.rho[i]
        };
        let vals: Vec<f64> = (0..n).map(at).collect();
        let mut sum: f64 = vals[1..n - 1].iter().sum::<f64>() + 0.5 * vals[0];
        let p = (vals[1] / vals[0]).ln() / h;
        let head = if p > 0.0 && vals[0] > 0.0 { vals[0] / p } else { 0.0 };
        let (mut prev, mut last) = (vals[n - 2], vals[n - 1]);
        sum += last;
        let mut x = self.rho[n - 1];
        for _ in 0..20_000 {
            if !(last > 1e-12 * sum.abs()) {
                break;
            }
            x *= h.exp();
            let v = f(x, &self.kernel.eval(x)) * x;
            sum += v;
            prev = last;
            last = v;
        }
        sum -= 0.5 * last;
        let q = (prev / last).ln() / h;
        let rest = if q > 0.0 && last > 0.0 { last / q } else { 0.0 };
        head + h * sum + rest
    }
}

fn fit_power(x: &[f64], y: &[f64]) -> TailFit {
    let pts: Vec<(f64, f64)> =
        x.iter().zip(y).filter(|(_, v)| **v != 0.0).map(|(a, b)| (a.ln(), b.abs().ln())).collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return TailFit { coef: 0.0, exponent: f64::NAN };
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = sxy / sxx;
    TailFit { coef: (my - slope * mx).exp(), exponent: slope }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct KernelValidation {
    pub mass_residual: f64,
    pub moment_residual: f64,
    pub tails: [TailFit; 3],
    pub expected_exponents: [f64; 3],
    pub checks: Vec<Check>,
}

impl KernelValidation {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Normalizations, tail exponents (α < 2 only; the Gaussian has no power
/// tail), sign of R', ρR'' - R' ≥ 0 and strict decrease of |ρ^{1-d}R'|.
pub fn validate_kernel(t: &KernelTable) -> KernelValidation {
    let d = t.dimension().as_f64();
    let a = t.alpha().get();
    let (m0, m1) = (t.mass_residual(), t.moment_residual());
    let expected = [-d - a, -d - 1.0 - a, -d - 2.0 - a];
    let mut checks = Vec::new();
    checks.push(Check {
        name: "mass normalization",
        passed: m0.abs() <= NORMALIZATION_TOL,
        detail: format!("residual {:e}", m0),
    });
    checks.push(Check {
        name: "moment normalization",
        passed: m1.abs() <= NORMALIZATION_TOL,
        detail: format!("residual {:e}", m1),
    });
    if !t.alpha().is_classical() {
        for (i, name) in ["tail exponent R", "tail exponent R'", "tail exponent R''"].into_iter().enumerate() {
            let got = t.tails[i].exponent;
            let rel = ((got - expected[i]) / expected[i]).abs();
            checks.push(Check {
                name,
                passed: rel <= TAIL_TOL,
                detail: format!("fitted {} vs {} (rel {:e})", got, expected[i], rel),
            });
        }
    }
    let first_bad = |pred: &dyn Fn(usize) -> bool| (0..t.rho.len()).find(|&i| !pred(i));
    let sign = first_bad(&|i| t.rp[i] < 0.0);
    checks.push(Check {
        name: "R' < 0",
        passed: sign.is_none(),
        detail: sign.map_or(String::from("ok"), |i| format!("R'({}) = {:e}", t.rho[i], t.rp[i])),
    });
    let convex = first_bad(&|i| t.rho[i] * t.rpp[i] - t.rp[i] >= 0.0);
    checks.push(Check {
        name: "rho R'' - R' >= 0",
        passed: convex.is_none(),
        detail: convex
            .map_or(String::from("ok"), |i| format!("value {:e} at rho = {}", t.rho[i] * t.rpp[i] - t.rp[i], t.rho[i])),
    });
    let flux: Vec<f64> = t.rho.iter().zip(&t.rp).map(|(x, v)| -v * x.powf(1.0 - d)).collect();
    let mono = (1..flux.len()).find(|&i| !(flux[i] < flux[i - 1]));
    checks.push(Check {
        name: "|rho^(1-d) R'| strictly decreasing",
        passed: mono.is_none(),
        detail: mono.map_or(String::from("ok"), |i| format!("fails between rho = {} and {}", t.rho[i - 1], t.rho[i])),
    });
    KernelValidation { mass_residual: m0, moment_residual: m1, tails: t.tails, expected_exponents: expected, checks }
}
