use core::f64::consts::PI;

#[allow(unused_imports)]
use crate::prelude::*;
use crate::quad::{tanh_sinh, Tolerance};
use crate::special::ln_gamma;
use crate::{Error, Result};

/// How [`SubordinatorDensity`] evaluates f.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum Method {
    /// β = 1/2: (2√π)⁻¹ λ^{-3/2} e^{-1/(4λ)}.
    ExplicitLevy,
    /// Zolotarev-Kanter integral, with the left-tail Laplace asymptotic far
    /// left and the convergent power series far right.
    ZolotarevIntegral,
}

/// Density of the one-sided β-stable law with Laplace transform e^{-a^β}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubordinatorDensity {
    beta: f64,
    method: Method,
}

/// Above this z·A(0) the Laplace asymptotic replaces the θ-integral.
const LEFT_TAIL: f64 = 200.0;
/// The right series is used once λ^{-β} drops below this.
const RIGHT_SERIES: f64 = 0.5;

impl SubordinatorDensity {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::domain(alloc::format!("stable index must be in (0,1) (got {beta})")));
        }
        let method = if beta == 0.5 { Method::ExplicitLevy } else { Method::ZolotarevIntegral };
        Ok(SubordinatorDensity { beta, method })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn density(&self, lambda: f64) -> Result<f64> {
        Ok(self.ln_density(lambda)?.exp())
    }

    /// ln f(λ); finite far into both tails where f itself underflows.
    pub fn ln_density(&self, lambda: f64) -> Result<f64> {
        if !(lambda > 0.0) {
            return Err(Error::domain(alloc::format!("lambda must be positive (got {lambda})")));
        }
        match self.method {
            Method::ExplicitLevy => Ok(-(2.0 * PI.sqrt()).ln() - 1.5 * lambda.ln() - 0.25 / lambda),
            Method::ZolotarevIntegral => {
                if lambda.powf(-self.beta) <= RIGHT_SERIES {
                    Ok(series(self.beta, lambda).ln())
                } else {
                    zolotarev_ln(self.beta, lambda)
                }
            }
        }
    }

    /// Zolotarev-Kanter evaluation without the series shortcut; exposed so
    /// the two routes can be compared where both apply.
    pub fn zolotarev_ln_density(&self, lambda: f64) -> Result<f64> {
        zolotarev_ln(self.beta, lambda)
    }

    /// (1/π) Σ (-1)^{k+1} Γ(kβ+1)/k! sin(kπβ) λ^{-kβ-1}. Convergent for
    /// every λ > 0 but only well conditioned for λ^{-β} ≲ 1.
    pub fn series_density(&self, lambda: f64) -> f64 {
        series(self.beta, lambda)
    }
}

/// f_β(λ) for β ∈ (0,1), λ > 0.
pub fn subordinator_density(beta: f64, lambda: f64) -> Result<f64> {
    SubordinatorDensity::new(beta)?.density(lambda)
}

fn series(beta: f64, lambda: f64) -> f64 {
    let ll = lambda.ln();
    let mut sum = 0.0;
    for k in 1..400 {
        let kf = k as f64;
        let mag = ln_gamma(kf * beta + 1.0) - ln_gamma(kf + 1.0) - (kf * beta + 1.0) * ll;
        let term = mag.exp() * (kf * PI * beta).sin();
        sum += if k % 2 == 1 { term } else { -term };
        if mag.exp() < 1e-18 * sum.abs() && k > 3 {
            break;
        }
    }
    sum / PI
}

/// ln A(θ) with A = [sin(βθ)^β sin((1-β)θ)^{1-β} / sin θ]^{1/(1-β)}; `rest`
/// is π - θ, used for sin θ near π.
fn ln_a(beta: f64, theta: f64, rest: f64) -> f64 {
    let s = if theta <= 0.5 * PI { theta.sin() } else { rest.sin() };
    (beta * (beta * theta).sin().ln() + (1.0 - beta) * ((1.0 - beta) * theta).sin().ln() - s.ln()) / (1.0 - beta)
}

fn zolotarev_ln(beta: f64, lambda: f64) -> Result<f64> {
    let g = beta / (1.0 - beta);
    let ln_z = -g * lambda.ln();
    let ln_a0 = g * beta.ln() + (1.0 - beta).ln();
    let za0 = (ln_z + ln_a0).exp();
    let prefix = (g / PI).ln() + ln_z / beta - za0;
    if za0 > LEFT_TAIL {
        // Laplace at θ = 0 with ln A ≈ ln A(0) + βθ²/2.
        return Ok(prefix + ln_a0 + 0.5 * (PI / (2.0 * za0 * beta)).ln());
    }
    let z = ln_z.exp();
    let a0 = ln_a0.exp();
    let est = tanh_sinh(
        |theta, da, db| {
            let la = if da < 1e-8 { ln_a0 + 0.5 * beta * da * da } else { ln_a(beta, theta, db) };
            let e = la - z * (la.exp() - a0);
            if e < -745.0 {
                0.0
            } else {
                e.exp()
            }
        },
        0.0,
        PI,
        Tolerance::new(0.0, 1e-13),
    )?;
    if !(est.value > 0.0) {
        return Err(Error::Quadrature { what: "Zolotarev integral", value: est.value, error: est.error });
    }
    Ok(prefix + est.value.ln())
}
