use alloc::format;

use super::constants::{constants_from_table, CriterionConstants};
use super::curve::{criterion_curve, default_range, CriterionCurve};
use crate::kernels::{kernel_table, GridSpec, KernelTable};
#[allow(unused_imports)]
use crate::prelude::*;
use crate::radial::{
    mass_from_density, radial_concentration, require_stationary, FracOrder, MassProfile, RadialProfile,
};
use crate::{Error, Result};
use core::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind"))]
pub enum Verdict {
    /// T·W₀(T) exceeds C first at `t_star`; `margin` = sup/C - 1.
    BlowupBy { t_star: f64, margin: f64 },
    /// sup r^α u₀ / s(α,d) = `epsilon` < 1.
    GlobalBelowSingular { epsilon: f64 },
    /// d = 2, α = 2: total mass at most 8π.
    GlobalSubcriticalMass { mass: f64, margin: f64 },
    /// Neither test decides. `criterion_ratio` = sup T·W₀ / C.
    Indeterminate { criterion_ratio: f64, singular_ratio: Option<f64> },
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::BlowupBy { .. } => "BlowupBy",
            Verdict::GlobalBelowSingular { .. } => "GlobalBelowSingular",
            Verdict::GlobalSubcriticalMass { .. } => "GlobalSubcriticalMass",
            Verdict::Indeterminate { .. } => "Indeterminate",
        }
    }

    pub fn blowup_time(&self) -> Option<f64> {
        match self {
            Verdict::BlowupBy { t_star, .. } => Some(*t_star),
            _ => None,
        }
    }

    pub fn is_global(&self) -> bool {
        matches!(self, Verdict::GlobalBelowSingular { .. } | Verdict::GlobalSubcriticalMass { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DatumSummary {
    pub mass: Option<f64>,
    /// sup_R R^{α-d} M(R), when finite.
    pub concentration: Option<f64>,
    pub singular_ratio: Option<f64>,
    pub characteristic_radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CriterionReport {
    pub constants: CriterionConstants,
    pub datum: DatumSummary,
    pub curve: CriterionCurve,
    pub verdict: Verdict,
}

/// Critical mass of the planar problem.
pub const CRITICAL_MASS_2D: f64 = 8.0 * PI;

pub fn classify(profile: &RadialProfile, alpha: FracOrder) -> Result<CriterionReport> {
    let table = kernel_table(profile.dimension(), alpha, GridSpec::default_for(alpha))?;
    classify_with(&table, profile)
}

/// As [`classify`] with a prebuilt table for the datum's (d, α).
pub fn classify_with(table: &KernelTable, profile: &RadialProfile) -> Result<CriterionReport> {
    let (d, alpha) = (table.dimension(), table.alpha());
    if profile.dimension() != d {
        return Err(Error::domain(format!(
            "datum dimension {} does not match kernel dimension {}",
            profile.dimension().get(),
            d.get()
        )));
    }
    let constants = constants_from_table(table)?;
    let m = mass_from_density(profile)?;
    let singular_ratio = if require_stationary(d, alpha).is_ok() { Some(profile.singular_ratio(alpha)?) } else { None };
    let datum = DatumSummary {
        mass: m.total_mass(),
        concentration: radial_concentration(&m, alpha).ok().map(|c| c.value),
        singular_ratio,
        characteristic_radius: m.characteristic_radius(),
    };
    let kernel = table.kernel();
    let c = constants.c;
    let mut curve = criterion_curve(kernel, &m, None)?;

    if d.get() == 2 && alpha.is_classical() {
        let verdict = planar(table, &m, &mut curve, c, datum.mass)?;
        return Ok(CriterionReport { constants, datum, curve, verdict });
    }

    let blowup = if curve.sup > c { curve.first_crossing(kernel, &m, c)? } else { None };
    let global = singular_ratio.filter(|e| *e < 1.0);
    let verdict = match (blowup, global) {
        (Some(_), Some(e)) => {
            return Err(Error::Inconsistent(format!(
                "criterion sup {} exceeds C = {} although the datum is below the singular solution (ratio {})",
                curve.sup, c, e
            )))
        }
        (Some(t_star), None) => Verdict::BlowupBy { t_star, margin: curve.sup / c - 1.0 },
        (None, Some(epsilon)) => Verdict::GlobalBelowSingular { epsilon },
        (None, None) => Verdict::Indeterminate { criterion_ratio: curve.sup / c, singular_ratio },
    };
    Ok(CriterionReport { constants, datum, curve, verdict })
}

/// The planar rule: blowup iff the mass exceeds 8π. T·W₀(T) tends to
/// M/(4π) as T → ∞, so above 8π it crosses C(2) = 2, possibly beyond the
/// default range; the scan is extended until it does.
fn planar(
    table: &KernelTable,
    m: &MassProfile,
    curve: &mut CriterionCurve,
    c: f64,
    mass: Option<f64>,
) -> Result<Verdict> {
    let kernel = table.kernel();
    let total = mass.unwrap_or(f64::INFINITY);
    if total <= CRITICAL_MASS_2D {
        return Ok(Verdict::GlobalSubcriticalMass { mass: total, margin: 1.0 - total / CRITICAL_MASS_2D });
    }
    let (lo, mut hi) = default_range(m, 2.0);
    for _ in 0..8 {
        if curve.sup > c {
            break;
        }
        hi *= 1e4;
        *curve = criterion_curve(kernel, m, Some((lo, hi)))?;
    }
    match curve.first_crossing(kernel, m, c)? {
        Some(t_star) => Ok(Verdict::BlowupBy { t_star, margin: curve.sup / c - 1.0 }),
        None => Ok(Verdict::Indeterminate { criterion_ratio: curve.sup / c, singular_ratio: None }),
    }
}
