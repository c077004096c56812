#[allow(unused_imports)]
use crate::prelude::*;
use alloc::vec::Vec;

use super::{mass_from_density, sigma_d, FracOrder, MassProfile, MassShape, RadialProfile};
use crate::quad::{geometric, golden_max, scan_max, tanh_sinh, Tolerance};
use crate::special::ln_beta;
use crate::{Error, Result};

/// Where a concentration supremum is attained.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum Attained {
    Radius(f64),
    /// The scaled mass is constant in R.
    Everywhere,
    /// Approached as R → ∞.
    Infinity,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ConcentrationValue {
    pub value: f64,
    pub attained: Attained,
}

fn not_morrey() -> Error {
    Error::Divergent("radial concentration is infinite; the datum is not in the Morrey class".into())
}

/// sup_{R>0} R^{α-d} M(R). Analytic for closed-form shapes, otherwise a
/// 64-per-decade scan over [1e-6, 1e6] times the characteristic radius plus
/// breakpoints, refined by golden section.
pub fn radial_concentration(m: &MassProfile, alpha: FracOrder) -> Result<ConcentrationValue> {
    let d = m.dimension().as_f64();
    let a = alpha.get();
    let ad = a - d;
    let at = |r: f64| ConcentrationValue { value: r.powf(ad) * m.eval(r), attained: Attained::Radius(r) };
    match m.shape() {
        MassShape::Power { coef, exponent } => {
            if *coef == 0.0 || (exponent + ad).abs() < 1e-12 {
                Ok(ConcentrationValue { value: *coef, attained: Attained::Everywhere })
            } else {
                Err(not_morrey())
            }
        }
        MassShape::TruncatedPower { coef, exponent: p, inner, outer } => {
            let q = p + ad;
            if q > 1e-12 {
                if outer.is_finite() {
                    Ok(at(*outer))
                } else {
                    Err(not_morrey())
                }
            } else if q >= -1e-12 {
                if outer.is_finite() {
                    Ok(at(*outer))
                } else {
                    Ok(ConcentrationValue { value: *coef, attained: Attained::Infinity })
                }
            } else if *inner == 0.0 {
                Err(not_morrey())
            } else {
                let star = inner * ((d - a) / (d - a - p)).powf(1.0 / p);
                Ok(at(star.min(*outer)))
            }
        }
        MassShape::Step { mass, radius } => {
            Ok(ConcentrationValue { value: mass * radius.powf(ad), attained: Attained::Radius(*radius) })
        }
        MassShape::Exact { amplitude, blowup_time } => {
            let four_sigma = 4.0 * sigma_d(m.dimension()) * amplitude;
            if alpha.is_classical() {
                Ok(ConcentrationValue { value: four_sigma, attained: Attained::Infinity })
            } else {
                let c = 2.0 * (d - 2.0) * blowup_time;
                Ok(at((a * c / (2.0 - a)).sqrt()))
            }
        }
        _ => {
            let c = m.characteristic_radius();
            let mut pts: Vec<f64> = geometric(1e-6 * c, 1e6 * c, 64);
            pts.extend(m.breakpoints());
            pts.sort_by(|x, y| x.total_cmp(y));
            pts.dedup();
            let f = |r: f64| r.powf(ad) * m.eval(r);
            let (r, v, best) = scan_max(f, &pts);
            if best == 0 || best + 1 == pts.len() {
                return Err(Error::Range("concentration maximizer on the edge of the radius scan".into()));
            }
            // A breakpoint maximum can sit on a kink; keep whichever is larger.
            let node = pts[best];
            if f(node) >= v {
                Ok(at(node))
            } else {
                Ok(ConcentrationValue { value: v, attained: Attained::Radius(r) })
            }
        }
    }
}

/// Lower estimate of the Morrey norm from balls centred on a ray.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MorreyEstimate {
    pub value: f64,
    pub center: f64,
    pub radius: f64,
    /// Always true: only sampled centres and radii were tried.
    pub estimate_only: bool,
}

/// Offsets |x| tried after the origin: c, c/2, 2c, c/4, 4c, ... Each list
/// extends the previous one, so the estimate is monotone in `samples`.
pub fn center_sequence(c: f64, samples: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(samples);
    out.push(0.0);
    let mut k = 0i32;
    while out.len() < samples {
        if k == 0 {
            out.push(c);
        } else {
            out.push(c * 2f64.powi(-k));
            if out.len() < samples {
                out.push(c * 2f64.powi(k));
            }
        }
        k += 1;
    }
    out
}

/// Mass of the ball B(x, R) with |x| = c for a radial datum with mass
/// function M: ∫ M(ρ)(-∂_ρ frac)(ρ) dρ over |R-c| < ρ < R+c, where frac(ρ)
/// is the fraction of the sphere of radius ρ inside the ball.
pub fn ball_mass(m: &MassProfile, c: f64, radius: f64) -> Result<f64> {
    if c == 0.0 {
        return Ok(m.eval(radius));
    }
    let d = m.dimension().as_f64();
    let a = 0.5 * (d - 1.0);
    let lnb = ln_beta(a, a);
    let lo = (radius - c).abs();
    let hi = radius + c;
    let mut cuts: Vec<f64> = m.breakpoints().into_iter().filter(|b| *b > lo && *b < hi).collect();
    cuts.push(hi);
    let tol = Tolerance::new(0.0, 1e-11);
    let mut total = 0.0;
    let mut start = lo;
    for end in cuts {
        let est = tanh_sinh(
            |rho, da, db| {
                // Distances to the ends of [lo, hi] keep x and 1-x exact there.
                let da = da + (start - lo);
                let db = db + (hi - end);
                let p = if radius > c { da + 2.0 * (radius - c) } else { da };
                let q = if c > radius { da + 2.0 * (c - radius) } else { da };
                let x = db * p / (4.0 * rho * c);
                let y = q * (rho + c + radius) / (4.0 * rho * c);
                if x <= 0.0 || y <= 0.0 {
                    return 0.0;
                }
                let pdf = ((a - 1.0) * (x.ln() + y.ln()) - lnb).exp();
                let dkappa = (rho * rho - c * c + radius * radius) / (2.0 * rho * rho * c);
                // M may jump at the piece ends; sample it strictly inside.
                let (l, h) = (start.next_up(), end.next_down());
                let inside = if l <= h { rho.clamp(l, h) } else { 0.5 * (start + end) };
                m.eval(inside) * 0.5 * pdf * dkappa
            },
            start,
            end,
            tol,
        )?;
        total += est.value;
        start = end;
    }
    Ok(total)
}

/// Max over the centre sequence and a geometric R-grid of R^{α-d}·mass of
/// the ball. The origin is always included, so the result dominates
/// [`radial_concentration`].
pub fn morrey_estimate(p: &RadialProfile, alpha: FracOrder, center_samples: usize) -> Result<MorreyEstimate> {
    let m = mass_from_density(p)?;
    let d = m.dimension().as_f64();
    let ad = alpha.get() - d;
    let centered = radial_concentration(&m, alpha);
    let (mut best, mut radius) = match centered {
        Ok(v) => (
            v.value,
            match v.attained {
                Attained::Radius(r) => r,
                _ => f64::INFINITY,
            },
        ),
        Err(Error::Divergent(_)) => {
            return Ok(MorreyEstimate { value: f64::INFINITY, center: 0.0, radius: 0.0, estimate_only: true })
        }
        Err(e) => return Err(e),
    };
    let mut center = 0.0;
    let c = m.characteristic_radius();
    let radii = geometric(1e-3 * c, 1e3 * c, 16);
    for &x in center_sequence(c, center_samples.max(1)).iter().skip(1) {
        let mut rs = radii.clone();
        for b in m.breakpoints() {
            rs.push((b - x).abs());
            rs.push(b + x);
        }
        rs.retain(|r| *r > 0.0);
        rs.sort_by(|u, v| u.total_cmp(v));
        let vals: Vec<f64> = rs.iter().map(|&r| r.powf(ad) * ball_mass(&m, x, r).unwrap_or(0.0)).collect();
        let mut k = 0;
        for i in 1..vals.len() {
            if vals[i] > vals[k] {
                k = i;
            }
        }
        let (mut r_best, mut v_best) = (rs[k], vals[k]);
        if k > 0 && k + 1 < rs.len() {
            let (lr, lv) = golden_max(
                |s| {
                    let r = s.exp();
                    r.powf(ad) * ball_mass(&m, x, r).unwrap_or(0.0)
                },
                rs[k - 1].ln(),
                rs[k + 1].ln(),
                1e-6,
            );
            if lv > v_best {
                r_best = lr.exp();
                v_best = lv;
            }
        }
        if v_best > best {
            best = v_best;
            center = x;
            radius = r_best;
        }
    }
    Ok(MorreyEstimate { value: best, center, radius, estimate_only: true })
}
