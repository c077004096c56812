#[allow(unused_imports)]
use crate::prelude::*;
use alloc::vec::Vec;

use super::{s_alpha_d, sigma_d, Dimension, ProfileKind, RadialProfile};
use crate::interp::Pchip;
use crate::quad::{tanh_sinh, Tolerance};
use crate::special::gamma_p;
use crate::{Error, Result};

/// Closed-form or tabulated representation of M(R) = ∫_{|y|≤R} u.
#[derive(Debug, Clone, PartialEq)]
pub enum MassShape {
    /// coef·R^p.
    Power { coef: f64, exponent: f64 },
    /// coef·(clamp(R, inner, outer)^p - inner^p).
    TruncatedPower { coef: f64, exponent: f64, inner: f64, outer: f64 },
    /// mass·1[R ≥ radius].
    Step { mass: f64, radius: f64 },
    /// a·4σ_d R^d / (R² + 2(d-2)T).
    Exact { amplitude: f64, blowup_time: f64 },
    /// m·P(d/2, R²/w²).
    Gaussian { mass: f64, width: f64 },
    /// Exact integral of a piecewise-linear density; `cum[i]` = M(r_i).
    LinearDensity { r: Vec<f64>, u: Vec<f64>, cum: Vec<f64> },
    /// Monotone samples with M(0) = 0, interpolated by PCHIP, constant past
    /// the last node. `infinite` marks a truncated view of infinite mass.
    Samples { table: Pchip, infinite: bool },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MassProfile {
    d: Dimension,
    shape: MassShape,
}

impl MassProfile {
    pub fn new(d: Dimension, shape: MassShape) -> Self {
        MassProfile { d, shape }
    }

    pub fn zero(d: Dimension) -> Self {
        MassProfile { d, shape: MassShape::Step { mass: 0.0, radius: 1.0 } }
    }

    /// Monotone samples (r_i, M_i) with r_0 > 0; an origin node is prepended.
    pub fn from_samples(d: Dimension, r: &[f64], m: &[f64], infinite: bool) -> Result<Self> {
        if r.is_empty() || r.len() != m.len() {
            return Err(Error::domain("mass samples need equal, nonzero lengths"));
        }
        if !(r[0] > 0.0) || r.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain("mass sample radii must be positive and strictly increasing"));
        }
        if !(m[0] >= 0.0) || m.windows(2).any(|w| !(w[1] >= w[0])) || m.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("mass samples must be finite, nonnegative and nondecreasing"));
        }
        let mut x = Vec::with_capacity(r.len() + 1);
        let mut y = Vec::with_capacity(r.len() + 1);
        x.push(0.0);
        y.push(0.0);
        x.extend_from_slice(r);
        y.extend_from_slice(m);
        Ok(MassProfile { d, shape: MassShape::Samples { table: Pchip::new(x, y), infinite } })
    }

    pub fn dimension(&self) -> Dimension {
        self.d
    }

    pub fn shape(&self) -> &MassShape {
        &self.shape
    }

    pub fn is_measure(&self) -> bool {
        matches!(self.shape, MassShape::Step { mass, .. } if mass > 0.0)
    }

    /// M(r).
    pub fn eval(&self, r: f64) -> f64 {
        let d = self.d.as_f64();
        match &self.shape {
            MassShape::Power { coef, exponent } => coef * r.powf(*exponent),
            MassShape::TruncatedPower { coef, exponent, inner, outer } => {
                if r <= *inner {
                    0.0
                } else {
                    // inner^p·expm1(p·ln(r/inner)) keeps full precision near the inner edge.
                    let x = r.min(*outer);
                    if *inner > 0.0 {
                        coef * inner.powf(*exponent) * (exponent * ((x - inner) / inner).ln_1p()).exp_m1()
                    } else {
                        coef * x.powf(*exponent)
                    }
                }
            }
            MassShape::Step { mass, radius } => {
                if r >= *radius {
                    *mass
                } else {
                    0.0
                }
            }
            MassShape::Exact { amplitude, blowup_time } => {
                amplitude * 4.0 * sigma_d(self.d) * r.powf(d) / (r * r + 2.0 * (d - 2.0) * blowup_time)
            }
            MassShape::Gaussian { mass, width } => mass * gamma_p(0.5 * d, (r / width).powi(2)),
            MassShape::LinearDensity { r: rs, u, cum } => linear_mass(self.d, rs, u, cum, r),
            MassShape::Samples { table, .. } => table.eval(r),
        }
    }

    /// Total mass, or `None` when it is infinite.
    pub fn total_mass(&self) -> Option<f64> {
        match &self.shape {
            MassShape::Power { coef, .. } => (*coef == 0.0).then_some(0.0),
            MassShape::TruncatedPower { outer, .. } => outer.is_finite().then(|| self.eval(*outer)),
            MassShape::Step { mass, .. } => Some(*mass),
            MassShape::Exact { .. } => None,
            MassShape::Gaussian { mass, .. } => Some(*mass),
            MassShape::LinearDensity { cum, .. } => cum.last().copied(),
            MassShape::Samples { table, infinite } => (!infinite).then(|| *table.ys().last().unwrap()),
        }
    }

    /// Radii where M or M' is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b = match &self.shape {
            MassShape::TruncatedPower { inner, outer, .. } => alloc::vec![*inner, *outer],
            MassShape::Step { radius, .. } => alloc::vec![*radius],
            MassShape::LinearDensity { r, .. } => r.clone(),
            _ => Vec::new(),
        };
        b.retain(|x| *x > 0.0 && x.is_finite());
        b
    }

    /// A length scale that moves with the datum under dilations.
    pub fn characteristic_radius(&self) -> f64 {
        match &self.shape {
            MassShape::Power { .. } => 1.0,
            MassShape::TruncatedPower { inner, outer, .. } => {
                if *inner > 0.0 {
                    *inner
                } else if outer.is_finite() {
                    *outer
                } else {
                    1.0
                }
            }
            MassShape::Step { radius, .. } => *radius,
            MassShape::Exact { blowup_time, .. } => (2.0 * (self.d.as_f64() - 2.0) * blowup_time).sqrt(),
            MassShape::Gaussian { width, .. } => *width,
            MassShape::LinearDensity { r, cum, .. } => half_mass_radius(r, cum, |x| self.eval(x)),
            MassShape::Samples { table, .. } => half_mass_radius(table.xs(), table.ys(), |x| self.eval(x)),
        }
    }

    /// Exponent p with M(R) = O(R^p) as R → ∞.
    pub fn growth_exponent(&self) -> f64 {
        match &self.shape {
            MassShape::Power { exponent, .. } => *exponent,
            MassShape::TruncatedPower { exponent, outer, .. } if outer.is_infinite() => *exponent,
            MassShape::Exact { .. } => self.d.as_f64() - 2.0,
            _ => 0.0,
        }
    }
}

fn half_mass_radius(x: &[f64], y: &[f64], m: impl Fn(f64) -> f64) -> f64 {
    let total = *y.last().unwrap();
    if !(total > 0.0) {
        return x[x.len() - 1];
    }
    let i = y.partition_point(|v| *v < 0.5 * total).min(x.len() - 1);
    let (mut lo, mut hi) = (if i > 0 { x[i - 1] } else { 0.0 }, x[i]);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if m(mid) < 0.5 * total {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn linear_mass(d: Dimension, r: &[f64], u: &[f64], cum: &[f64], x: f64) -> f64 {
    let n = r.len();
    if x <= 0.0 {
        return 0.0;
    }
    if x >= r[n - 1] {
        return cum[n - 1];
    }
    if x <= r[0] {
        return sigma_d(d) * u[0] * x.powf(d.as_f64()) / d.as_f64();
    }
    let i = r.partition_point(|&v| v <= x) - 1;
    cum[i] + cell_mass(d, r[i], u[i], r[i + 1], u[i + 1], x)
}

/// σ_d ∫_{a}^{x} u(ρ)ρ^{d-1}dρ for u linear between (a, ua) and (b, ub).
fn cell_mass(d: Dimension, a: f64, ua: f64, b: f64, ub: f64, x: f64) -> f64 {
    let df = d.as_f64();
    let slope = (ub - ua) / (b - a);
    let c0 = ua - slope * a;
    let p = |e: f64| x.powf(e) - a.powf(e);
    sigma_d(d) * (c0 * p(df) / df + slope * p(df + 1.0) / (df + 1.0))
}

/// Mass function of a profile, in closed form wherever one exists; tables
/// are integrated exactly as piecewise-linear densities.
pub fn mass_from_density(p: &RadialProfile) -> Result<MassProfile> {
    let d = p.dimension();
    let df = d.as_f64();
    let sigma = sigma_d(d);
    let shape = match p.kind() {
        ProfileKind::Chandrasekhar { eta, alpha } => {
            let e = df - alpha.get();
            if e <= 0.0 {
                return Err(Error::Divergent(alloc::format!(
                    "r^-{} is not integrable at 0 in d={}",
                    alpha.get(),
                    d.get()
                )));
            }
            MassShape::Power { coef: eta * s_alpha_d(d, *alpha)? * sigma / e, exponent: e }
        }
        ProfileKind::TruncatedChandrasekhar { eta, alpha, inner, outer } => {
            let e = df - alpha.get();
            if e <= 0.0 {
                return Err(Error::Divergent(alloc::format!(
                    "r^-{} is not integrable at 0 in d={}",
                    alpha.get(),
                    d.get()
                )));
            }
            MassShape::TruncatedPower {
                coef: eta * s_alpha_d(d, *alpha)? * sigma / e,
                exponent: e,
                inner: *inner,
                outer: *outer,
            }
        }
        ProfileKind::Gaussian { mass, width } => MassShape::Gaussian { mass: *mass, width: *width },
        ProfileKind::ShellAtom { mass, radius } => MassShape::Step { mass: *mass, radius: *radius },
        ProfileKind::ExactSolutionDatum { blowup_time, amplitude } => {
            MassShape::Exact { amplitude: *amplitude, blowup_time: *blowup_time }
        }
        ProfileKind::Tabulated { r, u } => {
            let mut cum = Vec::with_capacity(r.len());
            cum.push(sigma * u[0] * r[0].powf(df) / df);
            for i in 1..r.len() {
                let prev = cum[i - 1];
                cum.push(prev + cell_mass(d, r[i - 1], u[i - 1], r[i], u[i], r[i]));
            }
            MassShape::LinearDensity { r: r.clone(), u: u.clone(), cum }
        }
    };
    Ok(MassProfile { d, shape })
}

/// σ_d ∫_0^R u ρ^{d-1} dρ by tanh-sinh quadrature split at the profile's
/// breakpoints. An independent route to [`mass_from_density`].
pub fn mass_by_quadrature(p: &RadialProfile, radius: f64) -> Result<f64> {
    let d = p.dimension();
    let df = d.as_f64();
    if p.is_measure() {
        return Err(Error::Measure);
    }
    let mut cuts: Vec<f64> = match p.kind() {
        ProfileKind::TruncatedChandrasekhar { inner, outer, .. } => alloc::vec![*inner, *outer],
        ProfileKind::Tabulated { r, .. } => r.clone(),
        _ => Vec::new(),
    };
    cuts.retain(|c| *c > 0.0 && *c < radius);
    cuts.push(radius);
    let tol = Tolerance::new(0.0, 1e-13);
    let mut lo = 0.0f64;
    let mut total = 0.0;
    for c in cuts {
        let (l, h) = (lo.next_up(), c.next_down());
        let est = tanh_sinh(
            |x, _, _| {
                // Sample strictly inside the piece so cuts are not crossed.
                let x = if l <= h { x.clamp(l, h) } else { 0.5 * (lo + c) };
                let v = p.density(x).unwrap_or(0.0);
                if v == 0.0 {
                    0.0
                } else {
                    v * x.powf(df - 1.0)
                }
            },
            lo,
            c,
            tol,
        )?;
        total += est.value;
        lo = c;
    }
    Ok(sigma_d(d) * total)
}
