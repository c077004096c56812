use alloc::vec::Vec;

use crate::kernels::{semigroup_at_origin, HeatKernel};
#[allow(unused_imports)]
use crate::prelude::*;
use crate::quad::{geometric, golden_max};
use crate::radial::MassProfile;
use crate::Result;

pub const PER_DECADE: usize = 32;
pub const SPAN: f64 = 1e4;

/// Samples of T ↦ T·W₀(T), where W₀(T) is the semigroup value at the origin.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CriterionCurve {
    pub samples: Vec<(f64, f64)>,
    pub sup: f64,
    pub argmax: f64,
    /// False when the samples have more than one local maximum.
    pub unimodal: bool,
}

/// Default T-range [1e-4, 1e4]·ℓ^α with ℓ the datum's characteristic radius.
pub fn default_range(m: &MassProfile, alpha: f64) -> (f64, f64) {
    let s = m.characteristic_radius().powf(alpha);
    (s / SPAN, s * SPAN)
}

pub fn criterion_curve(kernel: &HeatKernel, m: &MassProfile, range: Option<(f64, f64)>) -> Result<CriterionCurve> {
    let (lo, hi) = range.unwrap_or_else(|| default_range(m, kernel.alpha().get()));
    let ts = geometric(lo, hi, PER_DECADE);
    let mut samples = Vec::with_capacity(ts.len());
    for &t in &ts {
        samples.push((t, t * semigroup_at_origin(kernel, m, t)?));
    }
    let mut best = 0;
    for (i, s) in samples.iter().enumerate() {
        if s.1 > samples[best].1 {
            best = i;
        }
    }
    let (mut argmax, mut sup) = samples[best];
    if best > 0 && best + 1 < samples.len() {
        let (la, lb) = (samples[best - 1].0.ln(), samples[best + 1].0.ln());
        let (x, v) = golden_max(
            |s| {
                let t = s.exp();
                semigroup_at_origin(kernel, m, t).map(|w| t * w).unwrap_or(f64::NEG_INFINITY)
            },
            la,
            lb,
            1e-9,
        );
        if v > sup {
            sup = v;
            argmax = x.exp();
        }
    }
    let unimodal = count_peaks(&samples) <= 1;
    Ok(CriterionCurve { samples, sup, argmax, unimodal })
}

/// Strict local maxima, ignoring wiggles below 1e-9 of the peak.
fn count_peaks(s: &[(f64, f64)]) -> usize {
    let top = s.iter().fold(0.0f64, |a, p| a.max(p.1.abs()));
    let eps = 1e-9 * top;
    let mut peaks = 0;
    let mut rising = true;
    for w in s.windows(2) {
        let dv = w[1].1 - w[0].1;
        if dv > eps {
            rising = true;
        } else if dv < -eps {
            if rising {
                peaks += 1;
            }
            rising = false;
        }
    }
    peaks
}

impl CriterionCurve {
    /// Least T with T·W₀(T) > level: the first exceeding sample, refined by
    /// bisection in ln T against the sample before it.
    pub fn first_crossing(&self, kernel: &HeatKernel, m: &MassProfile, level: f64) -> Result<Option<f64>> {
        let Some(i) = self.samples.iter().position(|s| s.1 > level) else {
            return Ok(None);
        };
        if i == 0 {
            return Ok(Some(self.samples[0].0));
        }
        let (mut a, mut b) = (self.samples[i - 1].0.ln(), self.samples[i].0.ln());
        while b - a > 1e-11 {
            let mid = 0.5 * (a + b);
            let t = mid.exp();
            if t * semigroup_at_origin(kernel, m, t)? > level {
                b = mid;
            } else {
                a = mid;
            }
        }
        Ok(Some(b.exp()))
    }
}
