#[allow(unused_imports)]
use crate::prelude::*;
use alloc::vec::Vec;
use core::f64::consts::PI;

use super::{require_stationary, s_alpha_d, Dimension, FracOrder};
use crate::{Error, Result};

/// Initial density shapes. All parameters are positive reals; `outer` may be
/// infinite.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileKind {
    /// η·s(α,d)/r^α, the singular stationary solution scaled by η.
    Chandrasekhar { eta: f64, alpha: FracOrder },
    /// The same restricted to inner < r ≤ outer.
    TruncatedChandrasekhar { eta: f64, alpha: FracOrder, inner: f64, outer: f64 },
    /// m·(πw²)^{-d/2}·exp(-r²/w²).
    Gaussian { mass: f64, width: f64 },
    /// Uniform measure of total mass `mass` on the sphere of radius `radius`.
    ShellAtom { mass: f64, radius: f64 },
    /// a·4(d-2)(r²+2dT)/(r²+2(d-2)T)², the initial density of the explicit
    /// blowup M = 4σ_d r^d/(r²+2(d-2)(T-t)) (a = 1).
    ExactSolutionDatum { blowup_time: f64, amplitude: f64 },
    /// Linear interpolation of samples; constant below the first node, zero
    /// beyond the last.
    Tabulated { r: Vec<f64>, u: Vec<f64> },
}

/// A nonnegative radial density (or shell measure) in dimension d.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    d: Dimension,
    kind: ProfileKind,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(alloc::format!("{name} must be a positive real (got {v})")))
    }
}

impl RadialProfile {
    pub fn chandrasekhar(d: Dimension, eta: f64, alpha: FracOrder) -> Result<Self> {
        positive("eta", eta)?;
        require_stationary(d, alpha)?;
        Ok(RadialProfile { d, kind: ProfileKind::Chandrasekhar { eta, alpha } })
    }

    pub fn truncated_chandrasekhar(d: Dimension, eta: f64, alpha: FracOrder, inner: f64, outer: f64) -> Result<Self> {
        positive("eta", eta)?;
        require_stationary(d, alpha)?;
        if !(inner >= 0.0 && inner.is_finite() && outer > inner) {
            return Err(Error::domain(alloc::format!(
                "truncation needs 0 <= rin < rout (got rin={inner}, rout={outer})"
            )));
        }
        Ok(RadialProfile { d, kind: ProfileKind::TruncatedChandrasekhar { eta, alpha, inner, outer } })
    }

    pub fn gaussian(d: Dimension, mass: f64, width: f64) -> Result<Self> {
        positive("mass", mass)?;
        positive("width", width)?;
        Ok(RadialProfile { d, kind: ProfileKind::Gaussian { mass, width } })
    }

    pub fn shell(d: Dimension, mass: f64, radius: f64) -> Result<Self> {
        positive("N", mass)?;
        positive("R", radius)?;
        Ok(RadialProfile { d, kind: ProfileKind::ShellAtom { mass, radius } })
    }

    pub fn exact_datum(d: Dimension, blowup_time: f64) -> Result<Self> {
        Self::exact_datum_scaled(d, blowup_time, 1.0)
    }

    /// Exact-solution datum multiplied by `amplitude`.
    pub fn exact_datum_scaled(d: Dimension, blowup_time: f64, amplitude: f64) -> Result<Self> {
        positive("T", blowup_time)?;
        positive("amp", amplitude)?;
        if d.get() < 3 {
            return Err(Error::domain("the explicit blowup solution needs d >= 3"));
        }
        Ok(RadialProfile { d, kind: ProfileKind::ExactSolutionDatum { blowup_time, amplitude } })
    }

    /// Samples (r_i, u_i) with r strictly increasing from r_0 > 0, u ≥ 0.
    pub fn tabulated(d: Dimension, r: Vec<f64>, u: Vec<f64>) -> Result<Self> {
        if r.len() < 2 || r.len() != u.len() {
            return Err(Error::domain("a table needs at least two (r, u) rows of equal length"));
        }
        if !(r[0] > 0.0) {
            return Err(Error::domain("tabulated data must start at r > 0"));
        }
        if r.windows(2).any(|w| !(w[1] > w[0])) || r.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("table radii must be finite and strictly increasing"));
        }
        if u.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(Error::domain("table densities must be finite and nonnegative"));
        }
        Ok(RadialProfile { d, kind: ProfileKind::Tabulated { r, u } })
    }

    /// A shell of mass `mass` at `radius` smeared by a Gaussian bump of the
    /// given width in r, tabulated and renormalized to the exact mass.
    pub fn mollified_shell(d: Dimension, mass: f64, radius: f64, width: f64, nodes: usize) -> Result<Self> {
        positive("N", mass)?;
        positive("R", radius)?;
        positive("width", width)?;
        let lo = (radius - 8.0 * width).max(radius * 1e-3);
        let hi = radius + 8.0 * width;
        let n = nodes.max(16);
        let r: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
        let mut u: Vec<f64> = r.iter().map(|&x| (-((x - radius) / width).powi(2)).exp()).collect();
        let p = RadialProfile::tabulated(d, r.clone(), u.clone())?;
        let total = super::mass_from_density(&p)?.total_mass().unwrap_or(f64::INFINITY);
        for v in &mut u {
            *v *= mass / total;
        }
        RadialProfile::tabulated(d, r, u)
    }

    pub fn dimension(&self) -> Dimension {
        self.d
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    pub fn is_measure(&self) -> bool {
        matches!(self.kind, ProfileKind::ShellAtom { .. })
    }

    /// True when the density is unbounded at the origin.
    pub fn is_singular(&self) -> bool {
        match self.kind {
            ProfileKind::Chandrasekhar { .. } => true,
            ProfileKind::TruncatedChandrasekhar { inner, .. } => inner == 0.0,
            _ => false,
        }
    }

    /// Pointwise density. Singular kinds return +∞ at r = 0.
    pub fn density(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) {
            return Err(Error::domain(alloc::format!("radius must be nonnegative (got {r})")));
        }
        let d = self.d.as_f64();
        Ok(match &self.kind {
            ProfileKind::Chandrasekhar { eta, alpha } => eta * s_alpha_d(self.d, *alpha)? / r.powf(alpha.get()),
            ProfileKind::TruncatedChandrasekhar { eta, alpha, inner, outer } => {
                if r > *inner && r <= *outer {
                    eta * s_alpha_d(self.d, *alpha)? / r.powf(alpha.get())
                } else if r == 0.0 && *inner == 0.0 {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
            ProfileKind::Gaussian { mass, width } => {
                (mass.ln() - 0.5 * d * (PI * width * width).ln() - (r / width).powi(2)).exp()
            }
            ProfileKind::ShellAtom { .. } => return Err(Error::Measure),
            ProfileKind::ExactSolutionDatum { blowup_time, amplitude } => {
                let q = r * r + 2.0 * (d - 2.0) * blowup_time;
                amplitude * 4.0 * (d - 2.0) * (r * r + 2.0 * d * blowup_time) / (q * q)
            }
            ProfileKind::Tabulated { r: rs, u } => table_density(rs, u, r),
        })
    }

    /// u_λ(r) = λ^α u(λ r); measures scale so that M_λ(R) = λ^{α-d} M(λR).
    pub fn scaled(&self, lambda: f64, alpha: FracOrder) -> Result<Self> {
        positive("lambda", lambda)?;
        let a = alpha.get();
        let d = self.d.as_f64();
        let kind = match &self.kind {
            ProfileKind::Chandrasekhar { eta, alpha: own } => {
                ProfileKind::Chandrasekhar { eta: eta * lambda.powf(a - own.get()), alpha: *own }
            }
            ProfileKind::TruncatedChandrasekhar { eta, alpha: own, inner, outer } => {
                ProfileKind::TruncatedChandrasekhar {
                    eta: eta * lambda.powf(a - own.get()),
                    alpha: *own,
                    inner: inner / lambda,
                    outer: outer / lambda,
                }
            }
            ProfileKind::Gaussian { mass, width } => {
                ProfileKind::Gaussian { mass: mass * lambda.powf(a - d), width: width / lambda }
            }
            ProfileKind::ShellAtom { mass, radius } => {
                ProfileKind::ShellAtom { mass: mass * lambda.powf(a - d), radius: radius / lambda }
            }
            ProfileKind::ExactSolutionDatum { blowup_time, amplitude } => ProfileKind::ExactSolutionDatum {
                blowup_time: blowup_time / (lambda * lambda),
                amplitude: amplitude * lambda.powf(a - 2.0),
            },
            ProfileKind::Tabulated { r, u } => ProfileKind::Tabulated {
                r: r.iter().map(|x| x / lambda).collect(),
                u: u.iter().map(|x| x * lambda.powf(a)).collect(),
            },
        };
        Ok(RadialProfile { d: self.d, kind })
    }

    /// Radius setting the profile's length scale; covariant under scaling.
    pub fn characteristic_radius(&self) -> f64 {
        match &self.kind {
            ProfileKind::Chandrasekhar { .. } => 1.0,
            ProfileKind::TruncatedChandrasekhar { inner, outer, .. } => {
                if *inner > 0.0 {
                    *inner
                } else if outer.is_finite() {
                    *outer
                } else {
                    1.0
                }
            }
            ProfileKind::Gaussian { width, .. } => *width,
            ProfileKind::ShellAtom { radius, .. } => *radius,
            ProfileKind::ExactSolutionDatum { blowup_time, .. } => (2.0 * (self.d.as_f64() - 2.0) * blowup_time).sqrt(),
            ProfileKind::Tabulated { .. } => match super::mass_from_density(self) {
                Ok(m) => m.characteristic_radius(),
                Err(_) => 1.0,
            },
        }
    }

    /// sup_r r^α u(r) / s(α,d): the ratio to the singular solution.
    /// Measures and data with an unbounded envelope give +∞.
    pub fn singular_ratio(&self, alpha: FracOrder) -> Result<f64> {
        let s = s_alpha_d(self.d, alpha)?;
        let a = alpha.get();
        let d = self.d.as_f64();
        let sup = match &self.kind {
            ProfileKind::Chandrasekhar { eta, alpha: own } => {
                if a == own.get() {
                    eta * s_alpha_d(self.d, *own)?
                } else {
                    f64::INFINITY
                }
            }
            ProfileKind::TruncatedChandrasekhar { eta, alpha: own, inner, outer } => {
                let q = a - own.get();
                let edge = if q > 0.0 {
                    outer.powf(q)
                } else if q < 0.0 {
                    inner.powf(q)
                } else {
                    1.0
                };
                eta * s_alpha_d(self.d, *own)? * edge
            }
            ProfileKind::ShellAtom { .. } => f64::INFINITY,
            ProfileKind::ExactSolutionDatum { amplitude, blowup_time } if a == 2.0 => {
                // r²u = 4(d-2)·x(x+b)/(x+c)² in x = r²; increasing for d ≥ 4,
                // interior maximum at x = bc/(b-2c) for d = 3.
                let b = 2.0 * d * blowup_time;
                let c = 2.0 * (d - 2.0) * blowup_time;
                let shape = if b > 2.0 * c {
                    let x = b * c / (b - 2.0 * c);
                    x * (x + b) / ((x + c) * (x + c))
                } else {
                    1.0
                };
                amplitude * 4.0 * (d - 2.0) * shape
            }
            ProfileKind::Tabulated { r, u } => {
                // r^α times a linear function is unimodal on each cell.
                let mut best = 0.0f64;
                for i in 0..r.len() - 1 {
                    let (_, v) = crate::quad::golden_max(
                        |x| x.powf(a) * table_density(r, u, x),
                        r[i],
                        r[i + 1],
                        1e-12 * r[i + 1],
                    );
                    best = best.max(v).max(r[i].powf(a) * u[i]).max(r[i + 1].powf(a) * u[i + 1]);
                }
                best
            }
            _ => {
                let c = self.characteristic_radius();
                let pts: Vec<f64> = crate::quad::geometric(1e-6, 1e6, 64).iter().map(|p| p * c).collect();
                crate::quad::scan_max(|x| x.powf(a) * self.density(x).unwrap_or(0.0), &pts).1
            }
        };
        Ok(sup / s)
    }

    /// Total mass; `None` when infinite.
    pub fn total_mass(&self) -> Result<Option<f64>> {
        Ok(super::mass_from_density(self)?.total_mass())
    }
}

pub(super) fn table_density(r: &[f64], u: &[f64], x: f64) -> f64 {
    let n = r.len();
    if x <= r[0] {
        return u[0];
    }
    if x > r[n - 1] {
        return 0.0;
    }
    let i = (r.partition_point(|&v| v < x)).clamp(1, n - 1);
    let s = (x - r[i - 1]) / (r[i] - r[i - 1]);
    u[i - 1] + s * (u[i] - u[i - 1])
}
