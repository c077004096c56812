use alloc::vec::Vec;

#[allow(unused_imports)]
use crate::prelude::*;
use crate::radial::{sigma_d, Dimension};

/// Three-point stencil weights on the left neighbour, the node and the
/// right neighbour.
#[derive(Debug, Clone, Copy)]
struct Stencil {
    m: f64,
    c: f64,
    p: f64,
}

/// Semi-discrete M_t = M_rr - (d-1)/r M_r + σ⁻¹ r^{1-d} M M_r on fixed nodes.
///
/// Derivatives come from three-point stencils on the nonuniform grid that
/// are exact on 1, r^d and r^{d-2} (r^{d+2} when d = 2); away from the
/// origin they are second order like ordinary centered differences. In the nonlinear term the centered M_r is blended with the
/// forward (upwind) difference just enough to keep the coefficient of the
/// inner neighbour nonnegative. The ghost node is M(0) = 0 and the last
/// node is held fixed.
#[derive(Debug, Clone)]
pub(crate) struct Scheme {
    pub r: Vec<f64>,
    df: f64,
    /// Volume of the ball of radius r₁.
    ball: f64,
    /// M_rr - (d-1)/r M_r.
    lin: Vec<Stencil>,
    /// Centered M_r.
    grad: Vec<Stencil>,
    /// 1/h₊.
    fwd: Vec<f64>,
    /// r^{1-d}/σ.
    adv: Vec<f64>,
    /// The first stencil reaches r₃ instead of the ghost.
    one_sided: bool,
}

impl Scheme {
    pub fn new(d: Dimension, r: Vec<f64>) -> Self {
        let sigma = sigma_d(d);
        let df = d.as_f64();
        let n = r.len();
        let mut lin = Vec::with_capacity(n);
        let mut grad = Vec::with_capacity(n);
        let mut fwd = Vec::with_capacity(n);
        let mut adv = Vec::with_capacity(n);
        // Powers reproduced exactly: 1, r^d and r^p. L annihilates the first
        // two (far field, smooth origin); r^{d-2} is the singular steady state.
        let p = if d.get() >= 3 { df - 2.0 } else { df + 2.0 };
        for i in 0..n {
            let ri = r[i];
            let lo = if i > 0 { r[i - 1] } else { 0.0 };
            let hi = if i + 1 < n { r[i + 1] } else { 2.0 * ri - lo };
            // x^q - 1 at x = r_j/r_i, accurate for neighbours close to r_i.
            let rel = |rj: f64, q: f64| if rj == 0.0 { -1.0 } else { (q * (rj / ri).ln()).exp_m1() };
            let (am, bm, ap, bp) = (rel(lo, df), rel(lo, p), rel(hi, df), rel(hi, p));
            let det = am * bp - ap * bm;
            let weights = |ta: f64, tb: f64| {
                let wm = (ta * bp - tb * ap) / det;
                let wp = (tb * am - ta * bm) / det;
                Stencil { m: wm, c: -(wm + wp), p: wp }
            };
            if i == 0 && d.get() >= 3 && n >= 3 {
                let (l, g) = first_node(df, &r[..3]);
                lin.push(l);
                grad.push(g);
            } else {
                let near = if d.get() >= 3 && i + 1 < n && ri < NEAR_ORIGIN * r[0] {
                    smooth_origin(df, [lo, ri, hi])
                } else {
                    None
                };
                let (l, g) = near.unwrap_or_else(|| (weights(0.0, p * (p - df) / (ri * ri)), weights(df / ri, p / ri)));
                lin.push(l);
                grad.push(g);
            }
            fwd.push(1.0 / (hi - ri));
            adv.push(ri.powf(1.0 - df) / sigma);
        }
        let ball = sigma * r[0].powf(df) / df;
        let one_sided = d.get() >= 3 && n >= 3;
        Scheme { r, df, ball, lin, grad, fwd, adv, one_sided }
    }

    /// Share of the centered difference in the nonlinear term at node i.
    fn theta(&self, i: usize, a: f64) -> f64 {
        if i == 0 && self.one_sided {
            return 1.0;
        }
        // Inner-neighbour coefficient: lin.m + θ·a·grad.m ≥ 0.
        let push = -a * self.grad[i].m;
        if push > self.lin[i].m {
            self.lin[i].m / push
        } else {
            1.0
        }
    }

    /// Value multiplying the `m` weights at the first node.
    fn first_left(&self, m: &[f64]) -> f64 {
        if self.one_sided {
            m[2]
        } else {
            0.0
        }
    }

    /// dM/dt at every node.
    pub fn rhs(&self, m: &[f64], out: &mut [f64]) {
        let n = self.r.len();
        let mut left = self.first_left(m);
        for i in 0..n - 1 {
            let (mi, right) = (m[i], m[i + 1]);
            let l = &self.lin[i];
            let g = &self.grad[i];
            let a = self.adv[i] * mi;
            let theta = self.theta(i, a);
            let centered = g.m * left + g.c * mi + g.p * right;
            let upwind = (right - mi) * self.fwd[i];
            out[i] = l.m * left + l.c * mi + l.p * right + a * (theta * centered + (1.0 - theta) * upwind);
            left = mi;
        }
        out[n - 1] = 0.0;
    }

    /// Gershgorin bound on the spectral radius of the Jacobian.
    pub fn spectral_bound(&self, m: &[f64]) -> f64 {
        let n = self.r.len();
        let mut worst = 0.0f64;
        let mut left = self.first_left(m);
        for i in 0..n - 1 {
            let (mi, right) = (m[i], m[i + 1]);
            let l = &self.lin[i];
            let g = &self.grad[i];
            let a = self.adv[i] * mi.abs();
            let theta = self.theta(i, a);
            let slope = (g.m * left + g.c * mi + g.p * right).abs().max(((right - mi) * self.fwd[i]).abs());
            let row = l.m.abs()
                + l.c.abs()
                + l.p.abs()
                + a * (theta * (g.m.abs() + g.c.abs() + g.p.abs()) + (1.0 - theta) * 2.0 * self.fwd[i])
                + self.adv[i] * slope;
            worst = worst.max(row);
            left = mi;
        }
        worst
    }

    /// Largest mean density over the shells between nodes.
    pub fn max_shell_density(&self, m: &[f64]) -> f64 {
        let mut best = m[0] / self.ball;
        for i in 1..m.len() {
            let lo = self.r[i - 1];
            let shell = lo.powf(self.df) * (self.df * (self.r[i] / lo).ln()).exp_m1();
            best = best.max((m[i] - m[i - 1]) / (self.ball * shell / self.r[0].powf(self.df)));
        }
        best
    }

    /// Density of the first cell, M(r₁) d / (σ r₁^d).
    pub fn origin_density(&self, m: &[f64]) -> f64 {
        m[0] / self.ball
    }
}

/// Nodes inside this multiple of r₁ try the stencil exact on r^{d-2}, r^d
/// and r^{d+2}.
const NEAR_ORIGIN: f64 = 64.0;

/// Centered weights exact on r^{d-2}, r^d and r^{d+2}, or `None` when they
/// would give a neighbour a negative coefficient (high d, few nodes out).
fn smooth_origin(df: f64, r: [f64; 3]) -> Option<(Stencil, Stencil)> {
    let qs = [df - 2.0, df, df + 2.0];
    let mut a = [[0.0; 3]; 3];
    for (row, q) in qs.iter().enumerate() {
        for col in 0..3 {
            a[row][col] = (r[col] / r[1]).powf(*q);
        }
    }
    let ri2 = r[1] * r[1];
    let l = solve3(a, qs.map(|q| q * (q - df) / ri2));
    let g = solve3(a, qs.map(|q| q / r[1]));
    // Advection at the strength of the singular steady state (r^{1-d}M/σ =
    // 2/r) must not need upwinding, or that state would lose exactness.
    if !(l[0] >= -2.0 * g[0] / r[1] && l[2] >= 0.0) {
        return None;
    }
    Some((Stencil { m: l[0], c: l[1], p: l[2] }, Stencil { m: g[0], c: g[1], p: g[2] }))
}

/// One-sided weights at r₁ on (r₁, r₂, r₃), exact on r^{d-2}, r^d and
/// r^{d+2}. L annihilates r^d, so near a smooth origin M_t comes from the
/// r^{d+2} term and the interior stencil would get it wrong by O(1) here.
/// The `m` slot holds the weight of r₃ since the ghost carries no
/// information.
fn first_node(df: f64, r: &[f64]) -> (Stencil, Stencil) {
    let qs = [df - 2.0, df, df + 2.0];
    let x = [1.0, r[1] / r[0], r[2] / r[0]];
    let mut a = [[0.0; 3]; 3];
    for (row, q) in qs.iter().enumerate() {
        for (col, xv) in x.iter().enumerate() {
            a[row][col] = xv.powf(*q);
        }
    }
    let solve = |t: [f64; 3]| {
        let w = solve3(a, t);
        Stencil { c: w[0], p: w[1], m: w[2] }
    };
    let r2 = r[0] * r[0];
    (solve(qs.map(|q| q * (q - df) / r2)), solve(qs.map(|q| q / r[0])))
}

/// Gaussian elimination with partial pivoting for a 3×3 system.
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> [f64; 3] {
    for k in 0..3 {
        let piv = (k..3).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap_or(k);
        a.swap(k, piv);
        b.swap(k, piv);
        for i in k + 1..3 {
            let f = a[i][k] / a[k][k];
            let pivot_row = a[k];
            for (x, p) in a[i][k..].iter_mut().zip(&pivot_row[k..]) {
                *x -= f * p;
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = [0.0; 3];
    for k in (0..3).rev() {
        let s: f64 = (k + 1..3).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    x
}
