use alloc::format;

use crate::kernels::{kernel_table, GridSpec, HeatKernel, KernelTable};
#[allow(unused_imports)]
use crate::prelude::*;
use crate::quad::{golden_max, integrate_split, Tolerance};
use crate::radial::{require_stationary, s_alpha_d, sigma_d, Dimension, FracOrder};
use crate::special::ln_gamma;
use crate::{Error, Result};
use core::f64::consts::PI;

/// C(d) = 16/Γ(d/2) ∫₀^∞ ρ^{d+1} e^{-ρ²} / (2(d-2) + 4ρ²) dρ.
///
/// The integrand is evaluated in log space around its peak at
/// ρ ≈ √((d+1)/2) so large d neither overflows nor underflows.
pub fn constant_c(d: Dimension) -> Result<f64> {
    let df = d.as_f64();
    let peak = (0.5 * (df + 1.0)).sqrt();
    let ln_pref = 16f64.ln() - ln_gamma(0.5 * df);
    let f = |rho: f64| {
        if rho <= 0.0 {
            return 0.0;
        }
        (ln_pref + (df + 1.0) * rho.ln() - rho * rho).exp() / (2.0 * (df - 2.0) + 4.0 * rho * rho)
    };
    integrate_split(f, 0.0, &[peak], Tolerance::new(1e-15, 1e-13))
}

/// C_α(d) = 2σ_d ∫₀^∞ |R'|² ρ^d / (ρR'' - (d-1)R') dρ over the table.
/// At α = 2 this reproduces [`constant_c`].
pub fn constant_c_alpha(table: &KernelTable) -> Result<f64> {
    let d = table.dimension();
    let df = d.as_f64();
    for (i, &rho) in table.rho().iter().enumerate() {
        let den = rho * table.second_derivative()[i] - (df - 1.0) * table.first_derivative()[i];
        if !(den > 0.0) {
            return Err(Error::Kernel(format!("rho R'' - (d-1) R' = {:e} is not positive at rho = {}", den, rho)));
        }
    }
    let v = table.integrate(|rho, k| {
        let den = rho * k.rpp - (df - 1.0) * k.rp;
        if den > 0.0 {
            k.rp * k.rp * rho.powf(df) / den
        } else {
            0.0
        }
    });
    Ok(2.0 * sigma_d(d) * v)
}

/// K_α(d) = t·e^{-t(-Δ)^{α/2}}u_C(0) = s(α,d) σ_d ∫₀^∞ R ρ^{d-1-α} dρ, by
/// quadrature against the kernel. Equals 1 at α = 2.
pub fn constant_k(kernel: &HeatKernel) -> Result<f64> {
    let (d, alpha) = (kernel.dimension(), kernel.alpha());
    let s = s_alpha_d(d, alpha)?;
    let e = d.as_f64() - 1.0 - alpha.get();
    let tol = Tolerance::new(0.0, 1e-12);
    let f = |rho: f64| {
        let r = if rho > 0.0 { kernel.value(rho) } else { 0.0 };
        if r == 0.0 {
            0.0
        } else {
            r * rho.powf(e)
        }
    };
    let v = integrate_split(f, 0.0, &[1.0], tol)?;
    Ok(s * sigma_d(d) * v)
}

/// s(α,d) 2^{-α} Γ((d-α)/2) / (Γ(d/2) Γ(1+α/2)), from the Mellin moment of
/// the subordinator.
pub fn constant_k_closed(d: Dimension, alpha: FracOrder) -> Result<f64> {
    let s = s_alpha_d(d, alpha)?;
    let (df, a) = (d.as_f64(), alpha.get());
    Ok(s * (-a * core::f64::consts::LN_2 + ln_gamma(0.5 * (df - a)) - ln_gamma(0.5 * df) - ln_gamma(1.0 + 0.5 * a))
        .exp())
}

/// ¼π^{-d/2}((d-2)/2)^{d/2-1}e^{1-d/2}: the largest value of T·W for a unit
/// shell at radius 1 when α = 2.
pub fn constant_l2(d: Dimension) -> f64 {
    let df = d.as_f64();
    if d.get() == 2 {
        return 0.25 / PI;
    }
    (-(4f64.ln()) - 0.5 * df * PI.ln() + (0.5 * df - 1.0) * (0.5 * (df - 2.0)).ln() + 1.0 - 0.5 * df).exp()
}

/// sup_ρ ρ^{d-α} R(ρ) and its maximizer. Closed form at α = 2 (maximizer
/// √(2(d-2))); otherwise a scan over the table refined by golden section.
pub fn constant_l(table: &KernelTable) -> Result<(f64, f64)> {
    let d = table.dimension();
    let (df, a) = (d.as_f64(), table.alpha().get());
    if table.alpha().is_classical() {
        if d.get() == 2 {
            return Err(Error::Range("sup of the shell curve is only approached as T -> infinity for d = 2".into()));
        }
        return Ok((constant_l2(d), (2.0 * (df - 2.0)).sqrt()));
    }
    let rho = table.rho();
    let vals: alloc::vec::Vec<f64> = rho.iter().zip(table.values()).map(|(x, r)| x.powf(df - a) * r).collect();
    let mut best = 0;
    for i in 1..vals.len() {
        if vals[i] > vals[best] {
            best = i;
        }
    }
    if best == 0 || best + 1 == vals.len() {
        return Err(Error::Range(format!(
            "maximizer of rho^(d-alpha) R sits on the grid edge (rho = {}); extend the grid",
            rho[best]
        )));
    }
    let k = table.kernel();
    let (la, lb) = (rho[best - 1].ln(), rho[best + 1].ln());
    let (x, v) = golden_max(|s| s.exp().powf(df - a) * k.value(s.exp()), la, lb, 1e-12);
    Ok((v.max(vals[best]), x.exp()))
}

/// Criterion constants for one (d, α).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CriterionConstants {
    pub d: u32,
    pub alpha: f64,
    pub sigma_d: f64,
    /// Blowup constant C(d) or C_α(d).
    pub c: f64,
    /// t·(semigroup of u_C)(0); `None` when u_C does not exist.
    pub k: Option<f64>,
    /// Gamma-product value of K, for comparison with `k`.
    pub k_closed: Option<f64>,
    /// Shell value sup_T T·W for a unit shell; `None` for d = 2, α = 2.
    pub l: Option<f64>,
    /// The time T = ρ*^{-α} where the unit-shell curve peaks.
    pub l_time: Option<f64>,
    /// C/L: shell mass above which blowup is guaranteed.
    pub n_threshold: Option<f64>,
    /// 2d/(d-2) for α < 2.
    pub upper_bound: Option<f64>,
    pub mass_residual: f64,
    pub moment_residual: f64,
}

/// All constants for (d, α), building the kernel table on the default grid.
pub fn criterion_constants(d: Dimension, alpha: FracOrder) -> Result<CriterionConstants> {
    let table = kernel_table(d, alpha, GridSpec::default_for(alpha))?;
    constants_from_table(&table)
}

pub fn constants_from_table(table: &KernelTable) -> Result<CriterionConstants> {
    let (d, alpha) = (table.dimension(), table.alpha());
    let df = d.as_f64();
    let c = if alpha.is_classical() { constant_c(d)? } else { constant_c_alpha(table)? };
    let (k, k_closed) = if require_stationary(d, alpha).is_ok() {
        (Some(constant_k(table.kernel())?), Some(constant_k_closed(d, alpha)?))
    } else {
        (None, None)
    };
    let l = if alpha.is_classical() && d.get() == 2 { None } else { Some(constant_l(table)?) };
    Ok(CriterionConstants {
        d: d.get(),
        alpha: alpha.get(),
        sigma_d: sigma_d(d),
        c,
        k,
        k_closed,
        l: l.map(|p| p.0),
        l_time: l.map(|p| p.1.powf(-alpha.get())),
        n_threshold: l.map(|p| c / p.0),
        upper_bound: (!alpha.is_classical() && d.get() > 2).then(|| 2.0 * df / (df - 2.0)),
        mass_residual: table.mass_residual(),
        moment_residual: table.moment_residual(),
    })
}

/// C/L for (d, α).
pub fn threshold_n(d: Dimension, alpha: FracOrder) -> Result<f64> {
    criterion_constants(d, alpha)?
        .n_threshold
        .ok_or_else(|| Error::Range("no shell threshold for d = 2, alpha = 2 (the 8 pi mass rule applies)".into()))
}

/// Lower envelope (1/W₀ - t/C)^{-1} of the moment along a blowing-up
/// solution.
pub fn blowup_rate_bound(w0: f64, c: f64, t: f64) -> Result<f64> {
    if !(w0 > 0.0 && c > 0.0 && t >= 0.0) {
        return Err(Error::domain(format!("need W0 > 0, C > 0, t >= 0 (got {w0}, {c}, {t})")));
    }
    let pole = c / w0;
    if t >= pole {
        return Err(Error::Pole { t, pole });
    }
    Ok(1.0 / (1.0 / w0 - t / c))
}
