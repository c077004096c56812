//! Radial geometry: dimensions, diffusion orders, data profiles, mass
//! functions and concentration norms.

mod concentration;
mod mass;
mod profile;

pub use concentration::{
    ball_mass, center_sequence, morrey_estimate, radial_concentration, Attained, ConcentrationValue, MorreyEstimate,
};
pub use mass::{mass_by_quadrature, mass_from_density, MassProfile, MassShape};
pub use profile::{ProfileKind, RadialProfile};

#[allow(unused_imports)]
use crate::prelude::*;
use core::f64::consts::{LN_2, PI};

use crate::special::{gamma, ln_gamma};
use crate::{Error, Result};

/// Space dimension, 2 ≤ d ≤ 200.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize), serde(transparent))]
pub struct Dimension(u32);

impl Dimension {
    pub const MAX: u32 = 200;
    /// Above this, Gamma-laden constants lose a few digits; callers warn.
    pub const PRECISION_WARNING: u32 = 60;

    pub fn new(d: u32) -> Result<Self> {
        if d < 2 {
            Err(Error::domain(alloc::format!("dimension must be at least 2 (got {d})")))
        } else if d > Self::MAX {
            Err(Error::domain(alloc::format!("dimension is capped at {} (got {d})", Self::MAX)))
        } else {
            Ok(Dimension(d))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }

    pub fn precision_warning(self) -> bool {
        self.0 > Self::PRECISION_WARNING
    }
}

/// Order α ∈ (0, 2] of the diffusion (-Δ)^{α/2}.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
#[cfg_attr(feature = "serde", derive(serde::Serialize), serde(transparent))]
pub struct FracOrder(f64);

impl FracOrder {
    pub const CLASSICAL: FracOrder = FracOrder(2.0);

    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha <= 2.0 {
            Ok(FracOrder(alpha))
        } else {
            Err(Error::domain(alloc::format!("alpha must be in (0,2] (got {alpha})")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn is_classical(self) -> bool {
        self.0 == 2.0
    }

    /// Index of the one-sided stable subordinator, α/2.
    pub fn beta(self) -> f64 {
        0.5 * self.0
    }
}

/// Area of the unit sphere in ℝ^d, via log-Gamma.
pub fn sigma_d(d: Dimension) -> f64 {
    let h = 0.5 * d.as_f64();
    (LN_2 + h * PI.ln() - ln_gamma(h)).exp()
}

/// Same quantity through Γ directly; only sensible for moderate d.
pub fn sigma_d_direct(d: Dimension) -> f64 {
    let h = 0.5 * d.as_f64();
    2.0 * PI.powf(h) / gamma(h)
}

/// Checks that the singular stationary solution exists: d ≥ 3 for α = 2,
/// 2α < d otherwise.
pub fn require_stationary(d: Dimension, alpha: FracOrder) -> Result<()> {
    if alpha.is_classical() {
        if d.get() < 3 {
            return Err(Error::domain("the singular stationary solution needs d >= 3 when alpha = 2"));
        }
    } else if 2.0 * alpha.get() >= d.as_f64() {
        return Err(Error::domain(alloc::format!(
            "the fractional stationary solution needs 2*alpha < d (got alpha={}, d={})",
            alpha.get(),
            d.get()
        )));
    }
    Ok(())
}

/// Coefficient of the singular stationary solution s(α,d)/|x|^α.
pub fn s_alpha_d(d: Dimension, alpha: FracOrder) -> Result<f64> {
    require_stationary(d, alpha)?;
    if alpha.is_classical() {
        Ok(2.0 * (d.as_f64() - 2.0))
    } else {
        Ok(s_alpha_d_formula(d.as_f64(), alpha.get()))
    }
}

/// The Gamma-product 2^α Γ((d-α)/2+1) Γ(α) / (Γ(d/2-α+1) Γ(α/2)), unguarded.
pub fn s_alpha_d_formula(d: f64, alpha: f64) -> f64 {
    (alpha * LN_2 + ln_gamma(0.5 * (d - alpha) + 1.0) + ln_gamma(alpha)
        - ln_gamma(0.5 * d - alpha + 1.0)
        - ln_gamma(0.5 * alpha))
    .exp()
}

/// x·∇v(x) for the Poisson potential of a radial datum: -r^{2-d} M(r) / σ_d.
pub fn potential_gradient_radial(m: &MassProfile, r: f64) -> f64 {
    let d = m.dimension();
    -r.powf(2.0 - d.as_f64()) * m.eval(r) / sigma_d(d)
}
