use alloc::vec::Vec;
use core::f64::consts::PI;

use super::subordinator::SubordinatorDensity;
#[allow(unused_imports)]
use crate::prelude::*;
use crate::radial::{Dimension, FracOrder};
use crate::special::ln_gamma;
use crate::Result;

/// (4π)^{-d/2} e^{-ρ²/4}: the heat kernel at unit time.
pub fn gauss_kernel(d: Dimension, rho: f64) -> f64 {
    (-0.5 * d.as_f64() * (4.0 * PI).ln() - 0.25 * rho * rho).exp()
}

/// R(0) = 2Γ(d/α) / (α (4π)^{d/2} Γ(d/2)).
pub fn kernel_at_origin(d: Dimension, alpha: FracOrder) -> f64 {
    let (df, a) = (d.as_f64(), alpha.get());
    (2f64.ln() + ln_gamma(df / a) - a.ln() - 0.5 * df * (4.0 * PI).ln() - ln_gamma(0.5 * df)).exp()
}

/// Values (R, R', R'') at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub r: f64,
    pub rp: f64,
    pub rpp: f64,
}

/// Radius beyond which the far-field expansion replaces the λ-sum.
pub const FAR_FIELD: f64 = 1e8;

/// Profile R(ρ) of e^{-(-Δ)^{α/2}} at unit time, with derivatives.
///
/// For α < 2 the Bochner integral ∫ f_β(λ)(4πλ)^{-d/2} e^{-ρ²/(4λ)} dλ is
/// evaluated as a trapezoid sum in s = ln λ. The integrand is analytic in a
/// strip around the real s-axis and decays double-exponentially on the left
/// and geometrically on the right, so a uniform step converges
/// exponentially; the step shrinks with the strip half-width π/(2γ),
/// γ = β/(1-β).
#[derive(Debug, Clone, PartialEq)]
pub struct HeatKernel {
    d: Dimension,
    alpha: FracOrder,
    /// (1/(4λ_k), ln weight_k) with the weight including f, the Gaussian
    /// normalisation and the step.
    nodes: Vec<(f64, f64)>,
    /// Far-field coefficients a_k of ρ^{-d-kα}.
    far: Vec<f64>,
}

impl HeatKernel {
    pub fn new(d: Dimension, alpha: FracOrder) -> Result<Self> {
        if alpha.is_classical() {
            return Ok(HeatKernel { d, alpha, nodes: Vec::new(), far: Vec::new() });
        }
        let beta = alpha.beta();
        let sub = SubordinatorDensity::new(beta)?;
        let gam = beta / (1.0 - beta);
        let width = (0.6 * PI / (2.0 * gam)).min(0.5);
        let h = 2.0 * PI * width / 42.0;
        let half_d = 0.5 * d.as_f64();
        let ln4pi = (4.0 * PI).ln();
        let lnw = |s: f64| -> Result<f64> { Ok(h.ln() + s + sub.ln_density(s.exp())? - half_d * (ln4pi + s)) };
        let s_hi = 2.0 * FAR_FIELD.ln() + 45.0 / (beta + half_d);
        let mut left = Vec::new();
        let mut best = f64::NEG_INFINITY;
        let mut k = 0i64;
        loop {
            let s = -(k as f64) * h;
            let v = lnw(s)?;
            best = best.max(v);
            left.push((s, v));
            let z = (-gam * s).exp();
            if (v < best - 60.0 && z > 50.0) || k > 200_000 {
                break;
            }
            k += 1;
        }
        let mut nodes: Vec<(f64, f64)> = left.iter().rev().map(|&(s, v)| (0.25 * (-s).exp(), v)).collect();
        let mut k = 1i64;
        loop {
            let s = k as f64 * h;
            if s > s_hi {
                break;
            }
            nodes.push((0.25 * (-s).exp(), lnw(s)?));
            k += 1;
        }
        Ok(HeatKernel { d, alpha, nodes, far: far_coefficients(d, alpha) })
    }

    pub fn dimension(&self) -> Dimension {
        self.d
    }

    pub fn alpha(&self) -> FracOrder {
        self.alpha
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// R(0) from the closed form.
    pub fn at_origin(&self) -> f64 {
        kernel_at_origin(self.d, self.alpha)
    }

    /// R(0) as the bare quadrature sum, for checking the nodes.
    pub fn origin_sum(&self) -> f64 {
        if self.alpha.is_classical() {
            return gauss_kernel(self.d, 0.0);
        }
        self.nodes.iter().map(|&(_, w)| w.exp()).sum()
    }

    pub fn eval(&self, rho: f64) -> KernelValue {
        if self.alpha.is_classical() {
            let g = gauss_kernel(self.d, rho);
            return KernelValue { r: g, rp: -0.5 * rho * g, rpp: (0.25 * rho * rho - 0.5) * g };
        }
        if rho > FAR_FIELD {
            return self.far_field(rho);
        }
        let rho2 = rho * rho;
        let (mut r, mut rp, mut rpp) = (0.0, 0.0, 0.0);
        for &(q, w) in &self.nodes {
            let e = w - rho2 * q;
            if e < -745.0 {
                continue;
            }
            let v = e.exp();
            r += v;
            rp -= 2.0 * rho * q * v;
            rpp += (4.0 * rho2 * q * q - 2.0 * q) * v;
        }
        KernelValue { r, rp, rpp }
    }

    /// Just R(ρ); skips the derivative sums.
    pub fn value(&self, rho: f64) -> f64 {
        if self.alpha.is_classical() {
            return gauss_kernel(self.d, rho);
        }
        if rho > FAR_FIELD {
            return self.far_field(rho).r;
        }
        let rho2 = rho * rho;
        self.nodes.iter().map(|&(q, w)| w - rho2 * q).filter(|e| *e > -745.0).map(|e| e.exp()).sum()
    }

    /// Full kernel t^{-d/α} R(r t^{-1/α}) at time t.
    pub fn at_time(&self, t: f64, r: f64) -> f64 {
        let a = self.alpha.get();
        t.powf(-self.d.as_f64() / a) * self.value(r * t.powf(-1.0 / a))
    }

    /// |R'(ρ)|.
    pub fn slope(&self, rho: f64) -> f64 {
        if self.alpha.is_classical() {
            return 0.5 * rho * gauss_kernel(self.d, rho);
        }
        if rho > FAR_FIELD {
            return -self.far_field(rho).rp;
        }
        let rho2 = rho * rho;
        self.nodes
            .iter()
            .map(|&(q, w)| (q, w - rho2 * q))
            .filter(|(_, e)| *e > -745.0)
            .map(|(q, e)| 2.0 * rho * q * e.exp())
            .sum()
    }

    /// Large-ρ expansion Σ a_k ρ^{-d-kα} (zero for α = 2), truncated where
    /// the terms stop decreasing.
    pub fn far_field(&self, rho: f64) -> KernelValue {
        let (df, a) = (self.d.as_f64(), self.alpha.get());
        let (mut r, mut rp, mut rpp) = (0.0, 0.0, 0.0);
        let mut last = f64::INFINITY;
        for (i, &c) in self.far.iter().enumerate() {
            let e = df + (i as f64 + 1.0) * a;
            let term = c * rho.powf(-e);
            if term == 0.0 && c != 0.0 {
                break;
            }
            if c != 0.0 {
                if term.abs() > last {
                    break;
                }
                last = term.abs();
            }
            r += term;
            rp -= e * term / rho;
            rpp += e * (e + 1.0) * term / (rho * rho);
            if c != 0.0 && term.abs() < 1e-18 * r.abs() {
                break;
            }
        }
        KernelValue { r, rp, rpp }
    }

    /// Leading far-field coefficient a_1 (R ~ a_1 ρ^{-d-α}).
    pub fn tail_coefficient(&self) -> Option<f64> {
        self.far.first().copied()
    }
}

/// a_k = (-1)^{k+1}/k! · 2^{kα} π^{-d/2-1} Γ((kα+d)/2) Γ(kα/2+1) sin(kπα/2).
fn far_coefficients(d: Dimension, alpha: FracOrder) -> Vec<f64> {
    let (df, a) = (d.as_f64(), alpha.get());
    (1..=40)
        .map(|k| {
            let kf = k as f64;
            let ln_mag = kf * a * 2f64.ln() - (0.5 * df + 1.0) * PI.ln()
                + ln_gamma(0.5 * (kf * a + df))
                + ln_gamma(0.5 * kf * a + 1.0)
                - ln_gamma(kf + 1.0);
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            // sin(kπα/2) vanishes exactly when kα is an even integer.
            let half = 0.5 * kf * a;
            if (half - half.round()).abs() < 1e-12 {
                0.0
            } else {
                sign * ln_mag.exp() * (half * PI).sin()
            }
        })
        .collect()
}
