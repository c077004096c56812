use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use crate::prelude::*;
use crate::{Error, Result};

/// Radial nodes r₁ < … < r_n = r_max. A uniform inner patch of spacing h
/// continues into a geometric tail with ratio 1 + h/r_in, so spacing is
/// continuous at the junction.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SolverGrid {
    r: Vec<f64>,
}

impl SolverGrid {
    /// `inner_fraction` of the `n` nodes form the uniform patch. With
    /// n_in inner nodes the patch ends at r_max·(1 + 1/n_in)^{-(n - n_in)}.
    pub fn new(r_max: f64, n: usize, inner_fraction: f64) -> Result<Self> {
        if !(r_max > 0.0 && r_max.is_finite()) || n < 8 || !(inner_fraction > 0.0 && inner_fraction <= 1.0) {
            return Err(Error::domain(format!(
                "grid needs r_max > 0, n >= 8 and inner_fraction in (0,1] (got {r_max}, {n}, {inner_fraction})"
            )));
        }
        let n_in = ((inner_fraction * n as f64).round() as usize).clamp(2, n);
        let q = 1.0 + 1.0 / n_in as f64;
        let r_in = r_max * q.powi(-((n - n_in) as i32));
        let h = r_in / n_in as f64;
        let mut r: Vec<f64> = (1..=n_in).map(|i| i as f64 * h).collect();
        for k in 1..=(n - n_in) {
            r.push(r_in * q.powi(k as i32));
        }
        r[n - 1] = r_max;
        Ok(SolverGrid { r })
    }

    /// Uses the given nodes as they are.
    pub fn from_nodes(r: Vec<f64>) -> Result<Self> {
        if r.len() < 3 || !(r[0] > 0.0) || r.windows(2).any(|w| !(w[1] > w[0])) || !r[r.len() - 1].is_finite() {
            return Err(Error::domain("grid nodes must be positive, finite and strictly increasing"));
        }
        Ok(SolverGrid { r })
    }

    /// Makes each breakpoint a node, moving the nearest node onto it when
    /// insertion would leave a cell shorter than a quarter of its neighbour.
    pub fn with_breakpoints(mut self, points: &[f64]) -> Self {
        for &b in points {
            if !(b > 0.0 && b < self.r_max()) {
                continue;
            }
            let i = self.r.partition_point(|&x| x < b);
            if self.r[i] == b {
                continue;
            }
            let lo = if i > 0 { self.r[i - 1] } else { 0.0 };
            let hi = self.r[i];
            let cell = hi - lo;
            if b - lo < 0.25 * cell && i > 0 {
                self.r[i - 1] = b;
            } else if hi - b < 0.25 * cell && i + 1 < self.r.len() {
                self.r[i] = b;
            } else {
                self.r.insert(i, b);
            }
        }
        self
    }

    pub fn nodes(&self) -> &[f64] {
        &self.r
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn r_max(&self) -> f64 {
        self.r[self.r.len() - 1]
    }

    pub fn first(&self) -> f64 {
        self.r[0]
    }

    /// The grid with every node multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        SolverGrid { r: self.r.iter().map(|x| x * factor).collect() }
    }

    pub(crate) fn into_nodes(self) -> Vec<f64> {
        self.r
    }
}
