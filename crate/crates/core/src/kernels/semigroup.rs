use alloc::format;
use alloc::vec::Vec;

use super::heat::HeatKernel;
#[allow(unused_imports)]
use crate::prelude::*;
use crate::quad::{exp_sinh, tanh_sinh, Tolerance};
use crate::radial::MassProfile;
use crate::{Error, Result};

/// e^{-t(-Δ)^{α/2}}u₀ at the origin for a radial datum given by its mass
/// function: t^{-d/α} ∫₀^∞ M(ρ t^{1/α}) |R'(ρ)| dρ.
///
/// Working with M instead of u₀ treats shells and singular data the same
/// way as smooth ones.
pub fn semigroup_at_origin(kernel: &HeatKernel, m: &MassProfile, t: f64) -> Result<f64> {
    let d = kernel.dimension();
    let alpha = kernel.alpha().get();
    if m.dimension() != d {
        return Err(Error::domain(format!(
            "datum dimension {} does not match kernel dimension {}",
            m.dimension().get(),
            d.get()
        )));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("time must be positive and finite (got {})", t)));
    }
    let g = m.growth_exponent();
    if !(g < d.as_f64() + alpha) {
        return Err(Error::Divergent(format!(
            "mass grows like r^{} but the kernel tail only absorbs r^{} (need growth < d + alpha)",
            g,
            d.as_f64() + alpha
        )));
    }
    if m.total_mass() == Some(0.0) {
        return Ok(0.0);
    }
    let s = t.powf(1.0 / alpha);
    // Cuts are kept in r so M is sampled strictly inside each r-piece even
    // when b/s·s rounds across b.
    let mut cuts: Vec<f64> = m.breakpoints();
    cuts.push(m.characteristic_radius());
    cuts.push(s);
    cuts.retain(|c| *c > 0.0 && c.is_finite());
    cuts.sort_by(|a, b| a.total_cmp(b));
    cuts.dedup();
    let tol = Tolerance::new(0.0, 1e-12);
    let mut total = 0.0;
    let mut start = 0.0f64;
    for &end in &cuts {
        let (l, h) = (start.next_up(), end.next_down());
        let mid = 0.5 * (start + end);
        let f = |rho: f64| {
            let r = if l <= h { (rho * s).clamp(l, h) } else { mid };
            weighted(m, r, kernel.slope(rho))
        };
        total += piece(&f, start / s, end / s, tol, 0)?;
        start = end;
    }
    let l = start.next_up();
    total += exp_sinh(|rho, _| weighted(m, (rho * s).max(l), kernel.slope(rho)), start / s, start / s, tol)?.value;
    Ok(t.powf(-d.as_f64() / alpha) * total)
}

/// Tanh-sinh on [a, b], halving the interval when the rule fails to
/// converge; that happens when the kernel confines the integrand to a thin
/// layer at one end of a long piece.
fn piece(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: Tolerance, depth: u32) -> Result<f64> {
    // Slivers between nearly coincident cuts hold a handful of floats; the
    // midpoint rule is exact to working precision there.
    if b - a <= 1e-12 * b {
        return Ok(f(0.5 * (a + b)) * (b - a));
    }
    match tanh_sinh(|x, _, _| f(x), a, b, tol) {
        Ok(e) => Ok(e.value),
        Err(Error::Quadrature { .. }) if depth < 48 => {
            let c = 0.5 * (a + b);
            Ok(piece(f, a, c, tol, depth + 1)? + piece(f, c, b, tol, depth + 1)?)
        }
        Err(e) => Err(e),
    }
}

/// M(r)·w, zero wherever the weight has underflowed (M may overflow there).
fn weighted(m: &MassProfile, r: f64, w: f64) -> f64 {
    if w == 0.0 {
        0.0
    } else {
        m.eval(r) * w
    }
}
