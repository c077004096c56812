//! Double-exponential quadrature, golden-section search and grid helpers.
//!
//! Both DE rules refine by halving the step and stop once two consecutive
//! levels agree to the requested tolerance.

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

#[allow(unused_imports)]
use crate::prelude::*;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Tolerance { abs, rel }
    }

    fn met(&self, delta: f64, value: f64) -> bool {
        // The floor keeps subnormal results from looking unconverged.
        delta <= self.abs.max(self.rel * value.abs()).max(1e-300)
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::new(1e-14, 1e-12)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
}

const MIN_LEVEL: u32 = 3;
const MAX_LEVEL: u32 = 11;
const H0: f64 = 0.5;

/// Trapezoid sums of `g` over kh, refined by halving h. `g` already includes
/// the Jacobian. The t-range is pruned after level 2 to where `g` matters.
fn de_levels<G: FnMut(f64) -> Result<f64>>(
    mut g: G,
    t_max: f64,
    tol: Tolerance,
    what: &'static str,
) -> Result<Estimate> {
    let k_max = (t_max / H0).floor() as i64;
    let mut evals = 0usize;
    let mut sum = 0.0;
    for k in -k_max..=k_max {
        sum += g(k as f64 * H0)?;
        evals += 1;
    }
    let mut h = H0;
    let mut value = sum * h;
    let mut prev = value;
    let mut delta = f64::INFINITY;
    let (mut lo, mut hi) = (-t_max, t_max);
    for level in 1..=MAX_LEVEL {
        h *= 0.5;
        let n = (t_max / h).floor() as i64;
        let mut added = 0.0;
        let mut peak = 0.0f64;
        let mut terms: Vec<(f64, f64)> = Vec::new();
        let mut k = -n + if n % 2 == 0 { 1 } else { 0 };
        while k <= n {
            let t = k as f64 * h;
            if t >= lo && t <= hi {
                let v = g(t)?;
                evals += 1;
                added += v;
                if level == 2 {
                    peak = peak.max(v.abs());
                    terms.push((t, v));
                }
            }
            k += 2;
        }
        sum += added;
        value = sum * h;
        if level == 2 && peak > 0.0 {
            let keep: Vec<f64> = terms.iter().filter(|(_, v)| v.abs() > 1e-20 * peak).map(|(t, _)| *t).collect();
            if let (Some(a), Some(b)) = (keep.first(), keep.last()) {
                lo = lo.max(a - 1.0);
                hi = hi.min(b + 1.0);
            }
        }
        delta = (value - prev).abs();
        if level >= MIN_LEVEL && tol.met(delta, value) {
            return Ok(Estimate { value, error: delta, evals });
        }
        prev = value;
    }
    Err(Error::Quadrature { what, value, error: delta })
}

/// Tanh-sinh rule on [a, b]. The integrand receives `(x, x - a, b - x)` with
/// the two distances computed without cancellation, so endpoint
/// singularities can be evaluated accurately. Near the ends `x` itself may
/// round onto a or b.
pub fn tanh_sinh<F>(mut f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate>
where
    F: FnMut(f64, f64, f64) -> f64,
{
    if !(b > a) {
        return Ok(Estimate { value: 0.0, error: 0.0, evals: 0 });
    }
    let hw = 0.5 * (b - a);
    let g = |t: f64| -> Result<f64> {
        let u = FRAC_PI_2 * t.sinh();
        let q = (-2.0 * u.abs()).exp();
        let comp = 2.0 * q / (1.0 + q);
        let near = hw * comp;
        if near <= 0.0 {
            return Ok(0.0);
        }
        let far = hw * (2.0 - comp);
        let (x, da, db) = if u >= 0.0 { (b - near, far, near) } else { (a + near, near, far) };
        let w = FRAC_PI_2 * t.cosh() * 4.0 * q / ((1.0 + q) * (1.0 + q)) * hw;
        let fx = f(x, da, db);
        if fx == 0.0 || w == 0.0 {
            return Ok(0.0);
        }
        let v = fx * w;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Quadrature { what: "tanh-sinh integrand", value: fx, error: f64::INFINITY })
        }
    };
    de_levels(g, 4.5, tol, "tanh-sinh")
}

/// Exp-sinh rule on [a, ∞) with the substitution x = a + c·exp(π/2·sinh t).
/// `scale` sets c and should be near the integrand's characteristic width.
/// The integrand receives `(x, x - a)`.
pub fn exp_sinh<F>(mut f: F, a: f64, scale: f64, tol: Tolerance) -> Result<Estimate>
where
    F: FnMut(f64, f64) -> f64,
{
    let g = |t: f64| -> Result<f64> {
        let e = (FRAC_PI_2 * t.sinh()).exp();
        let da = scale * e;
        if da == 0.0 || !da.is_finite() {
            return Ok(0.0);
        }
        let fx = f(a + da, da);
        if fx == 0.0 {
            return Ok(0.0);
        }
        let v = fx * da * FRAC_PI_2 * t.cosh();
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Quadrature { what: "exp-sinh integrand", value: fx, error: f64::INFINITY })
        }
    };
    // |t| ≤ 5 spans x - a ∈ [1e-50, 1e50]·scale.
    de_levels(g, 5.0, tol, "exp-sinh")
}

/// ∫ f over [a, ∞) split at the given interior points, tanh-sinh on the
/// finite pieces and exp-sinh on the last one.
pub fn integrate_split<F>(mut f: F, a: f64, cuts: &[f64], tol: Tolerance) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut pts: Vec<f64> = cuts.iter().copied().filter(|c| *c > a && c.is_finite()).collect();
    pts.sort_by(|x, y| x.total_cmp(y));
    pts.dedup();
    let mut lo = a;
    let mut total = 0.0;
    for &p in &pts {
        total += tanh_sinh(|x, _, _| f(x), lo, p, tol)?.value;
        lo = p;
    }
    let scale = if lo > 0.0 { lo } else { pts.first().copied().unwrap_or(1.0) };
    total += exp_sinh(|x, _| f(x), lo, scale, tol)?.value;
    Ok(total)
}

/// Golden-section search for a maximum of `f` on [a, b]; returns (x, f(x)).
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, xtol: f64) -> (f64, f64) {
    let r = 0.5 * (5.0f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if (b - a).abs() <= xtol {
            break;
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Maximize `f` over sorted positive `points`, then refine the best bracket
/// by golden section in ln x. Returns (argmax, max, index of best point).
pub fn scan_max<F: FnMut(f64) -> f64>(mut f: F, points: &[f64]) -> (f64, f64, usize) {
    let vals: Vec<f64> = points.iter().map(|&x| f(x)).collect();
    let mut best = 0;
    for (i, v) in vals.iter().enumerate() {
        if *v > vals[best] {
            best = i;
        }
    }
    let (mut x, mut v) = (points[best], vals[best]);
    if best > 0 && best + 1 < points.len() && points[best - 1] > 0.0 {
        let (la, lb) = (points[best - 1].ln(), points[best + 1].ln());
        let (lx, lv) = golden_max(|s| f(s.exp()), la, lb, 1e-10 * (1.0 + la.abs().max(lb.abs())));
        if lv > v {
            x = lx.exp();
            v = lv;
        }
    }
    (x, v, best)
}

/// Geometric grid from `lo` to `hi` with `per_decade` points per decade;
/// both endpoints included, interior spacing exactly uniform in ln.
pub fn geometric(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let decades = (hi / lo).log10();
    let n = ((decades * per_decade as f64).round() as usize).max(1);
    let step = (hi / lo).ln() / n as f64;
    (0..=n).map(|i| lo * (step * i as f64).exp()).collect()
}
