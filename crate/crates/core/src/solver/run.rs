use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use super::grid::SolverGrid;
use super::scheme::Scheme;
use crate::interp::Pchip;
#[allow(unused_imports)]
use crate::prelude::*;
use crate::radial::{Dimension, FracOrder, MassProfile};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Controls {
    pub t_end: f64,
    /// Origin density that counts as blowup. Default: 1e8 times the
    /// initial origin density (1e8 for measures, see [`run`]).
    pub density_cap: Option<f64>,
    /// Smallest admissible step. Default 1e-12·t_end.
    pub dt_floor: Option<f64>,
    pub rtol: f64,
    /// Absolute tolerance as a fraction of the largest initial M.
    pub atol: f64,
    /// Record a sample every `stride` accepted steps (0: only at
    /// checkpoints and the end).
    pub stride: usize,
    /// Times at which the step lands exactly and M is stored on the base grid.
    pub checkpoints: Vec<f64>,
    /// Radii where M is sampled. Default {0.1, 0.5, 1, 2, 5, 10}·ℓ.
    pub probes: Option<Vec<f64>>,
    /// Enables W(t) against the backward heat weight centred at this time.
    pub target_time: Option<f64>,
    /// Halve the inner cells when r₁√u(0) exceeds `resolution` and the
    /// first-cell density has grown fourfold since the last refinement.
    pub refine: bool,
    pub resolution: f64,
    /// Refined zone radius in units of the core length 1/√u(0).
    pub refine_zone: f64,
    pub max_steps: usize,
    pub max_nodes: usize,
}

impl Controls {
    pub fn new(t_end: f64) -> Self {
        Controls {
            t_end,
            density_cap: None,
            dt_floor: None,
            rtol: 1e-7,
            atol: 1e-14,
            stride: 50,
            checkpoints: Vec::new(),
            probes: None,
            target_time: None,
            refine: true,
            resolution: 0.2,
            refine_zone: 20.0,
            max_steps: 20_000_000,
            max_nodes: 200_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Trigger {
    OriginDensityCap,
    StepFloor,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BlowupEvent {
    pub detected_time: f64,
    pub trigger: Trigger,
    pub origin_density: f64,
    /// Index into [`Trajectory::samples`] of the last accepted state.
    pub sample: usize,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Sample {
    pub t: f64,
    pub dt: f64,
    pub origin_density: f64,
    pub w: Option<f64>,
    pub probes: Vec<f64>,
}

/// M on the initial grid at a checkpoint time.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Checkpoint {
    pub t: f64,
    pub m: Vec<f64>,
    pub origin_density: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimState {
    pub r: Vec<f64>,
    pub m: Vec<f64>,
    pub t: f64,
    pub dt: f64,
    pub origin_density: f64,
    pub event: Option<BlowupEvent>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Trajectory {
    pub d: u32,
    pub base_grid: Vec<f64>,
    pub initial: Vec<f64>,
    pub probes: Vec<f64>,
    pub samples: Vec<Sample>,
    pub checkpoints: Vec<Checkpoint>,
    pub final_state: SimState,
    pub event: Option<BlowupEvent>,
    pub density_cap: f64,
    pub initial_origin_density: f64,
    pub steps: usize,
    pub rejected: usize,
    pub refinements: usize,
    pub warnings: Vec<String>,
}

impl Trajectory {
    pub fn blowup_time(&self) -> Option<f64> {
        self.event.as_ref().map(|e| e.detected_time)
    }
}

/// W = ∫₀^∞ M(r)·r/(2τ)·(4πτ)^{-d/2}e^{-r²/(4τ)} dr with τ = T - t, by the
/// trapezoid rule on the nodes (plus the origin). M is taken constant past
/// the last node.
pub fn moment_w(d: Dimension, r: &[f64], m: &[f64], tau: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::domain(format!("moment needs t < T (got T - t = {tau})")));
    }
    let df = d.as_f64();
    let ln_norm = -0.5 * df * (4.0 * PI * tau).ln();
    let w = |x: f64| x / (2.0 * tau) * (ln_norm - x * x / (4.0 * tau)).exp();
    let mut sum = 0.0;
    let (mut x0, mut f0) = (0.0, 0.0);
    for (x, mv) in r.iter().zip(m) {
        let f1 = mv * w(*x);
        sum += 0.5 * (f0 + f1) * (x - x0);
        x0 = *x;
        f0 = f1;
    }
    // Tail with M frozen: M·∫_R^∞ r/(2τ) G dr = M·(4πτ)^{-d/2} e^{-R²/4τ}.
    let last = m[m.len() - 1];
    sum += last * (ln_norm - x0 * x0 / (4.0 * tau)).exp();
    Ok(sum)
}

pub fn moment_w_state(d: Dimension, state: &SimState, target: f64) -> Result<f64> {
    moment_w(d, &state.r, &state.m, target - state.t)
}

fn interp_linear(r: &[f64], m: &[f64], x: f64) -> f64 {
    if x <= r[0] {
        return m[0] * (x / r[0]).max(0.0);
    }
    let n = r.len();
    if x >= r[n - 1] {
        return m[n - 1];
    }
    let i = r.partition_point(|&v| v <= x);
    let s = (x - r[i - 1]) / (r[i] - r[i - 1]);
    m[i - 1] + s * (m[i] - m[i - 1])
}

/// Integrates the radial mass equation (α = 2 only) from `datum` on `grid`
/// until `t_end` or detected blowup.
///
/// Blowup is declared when the first-cell density passes the cap, or when
/// the step falls below the floor while that density has grown. The last
/// node is held at its initial value: for finite-mass data this is exactly
/// zero flux through r_max, for infinite-mass data it approximates the
/// unbounded domain and a warning is recorded.
pub fn run(datum: &MassProfile, alpha: FracOrder, grid: SolverGrid, controls: &Controls) -> Result<Trajectory> {
    if !alpha.is_classical() {
        return Err(Error::domain(format!(
            "the solver integrates the classical equation only (alpha = 2, got {})",
            alpha.get()
        )));
    }
    if !(controls.t_end > 0.0 && controls.t_end.is_finite()) {
        return Err(Error::domain(format!("t_end must be positive (got {})", controls.t_end)));
    }
    let d = datum.dimension();
    let grid = grid.with_breakpoints(&datum.breakpoints());
    let base_grid: Vec<f64> = grid.nodes().to_vec();
    let scheme = Scheme::new(d, grid.into_nodes());
    let mut m: Vec<f64> = scheme.r.iter().map(|&x| datum.eval(x)).collect();
    let initial = m.clone();
    let mut base_idx: Vec<usize> = (0..m.len()).collect();

    let mut warnings = Vec::new();
    if datum.total_mass().is_none() {
        warnings.push(String::from(
            "infinite-mass datum: M(r_max) is pinned to its initial value, approximating the whole-space problem",
        ));
    }
    let od0 = scheme.origin_density(&m);
    let density_cap = controls.density_cap.unwrap_or_else(|| {
        let base = if datum.is_measure() {
            1.0
        } else if od0 > 0.0 {
            od0
        } else {
            scheme.max_shell_density(&m).max(f64::MIN_POSITIVE)
        };
        1e8 * base
    });
    let dt_floor = controls.dt_floor.unwrap_or(1e-12 * controls.t_end);
    let char_r = datum.characteristic_radius();
    let probes: Vec<f64> =
        controls.probes.clone().unwrap_or_else(|| [0.1, 0.5, 1.0, 2.0, 5.0, 10.0].iter().map(|f| f * char_r).collect());
    let mut checkpoints_left: Vec<f64> =
        controls.checkpoints.iter().copied().filter(|c| *c >= 0.0 && *c <= controls.t_end).collect();
    checkpoints_left.sort_by(|a, b| b.total_cmp(a));

    let m_scale = m.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let atol = (controls.atol * m_scale).max(1e-300);
    let mono_tol = 1e-10 * m_scale;

    let mut t = 0.0;
    let mut samples = Vec::new();
    let mut checkpoints = Vec::new();
    let sample = |t: f64, dt: f64, r: &[f64], m: &[f64], od: f64| -> Sample {
        let w = controls.target_time.filter(|tt| t < *tt).and_then(|tt| moment_w(d, r, m, tt - t).ok());
        Sample { t, dt, origin_density: od, w, probes: probes.iter().map(|&p| interp_linear(r, m, p)).collect() }
    };
    samples.push(sample(0.0, 0.0, &scheme.r, &m, od0));
    let take_checkpoint = |t: f64, m: &[f64], idx: &[usize], od: f64| Checkpoint {
        t,
        m: idx.iter().map(|&i| m[i]).collect(),
        origin_density: od,
    };
    while checkpoints_left.last() == Some(&0.0) {
        checkpoints_left.pop();
        checkpoints.push(take_checkpoint(0.0, &m, &base_idx, od0));
    }

    let finish = |scheme: &Scheme, m: Vec<f64>, t: f64, dt: f64, event: Option<BlowupEvent>| SimState {
        r: scheme.r.clone(),
        origin_density: scheme.origin_density(&m),
        m,
        t,
        dt,
        event,
    };

    if m_scale == 0.0 {
        for c in checkpoints_left.iter().rev() {
            checkpoints.push(take_checkpoint(*c, &m, &base_idx, 0.0));
        }
        samples.push(sample(controls.t_end, controls.t_end, &scheme.r, &m, 0.0));
        return Ok(Trajectory {
            d: d.get(),
            base_grid,
            initial: initial.clone(),
            probes,
            samples,
            checkpoints,
            final_state: finish(&scheme, m, controls.t_end, controls.t_end, None),
            event: None,
            density_cap,
            initial_origin_density: od0,
            steps: 0,
            rejected: 0,
            refinements: 0,
            warnings,
        });
    }

    let mut stepper = Stepper::new(scheme, &m);
    let mut dt = 2.0 / stepper.scheme.spectral_bound(&m);
    let (mut steps, mut rejected, mut refinements) = (0usize, 0usize, 0usize);
    let mut last_refine_od = od0;
    let mut event = None;

    while t < controls.t_end {
        if steps + rejected >= controls.max_steps {
            return Err(Error::Resolution(format!("step budget of {} exhausted at t = {t}", controls.max_steps)));
        }
        let trial = dt.min(stepper.stable_step(&m));
        if trial < dt_floor {
            let od = stepper.scheme.origin_density(&m);
            if od > 10.0 * od0 || datum.is_measure() || od0 == 0.0 {
                event =
                    Some(BlowupEvent { detected_time: t, trigger: Trigger::StepFloor, origin_density: od, sample: 0 });
                break;
            }
            return Err(Error::Resolution(format!(
                "step {trial:e} fell below the floor {dt_floor:e} at t = {t} without density growth; refine the grid"
            )));
        }
        let next_cp = checkpoints_left.last().copied();
        let limit = next_cp.unwrap_or(controls.t_end).min(controls.t_end);
        let clipped = limit - t <= trial;
        let h = if clipped { limit - t } else { trial };
        match stepper.attempt(&mut m, h, atol, controls.rtol, mono_tol) {
            Attempt::Accepted { growth } => {
                t = if clipped { limit } else { t + h };
                dt = if clipped { trial.max(h * growth) } else { h * growth };
            }
            Attempt::Rejected { shrink } => {
                rejected += 1;
                dt = h * shrink;
                continue;
            }
        }
        steps += 1;
        let od = stepper.scheme.origin_density(&m);
        let r = &stepper.scheme.r;
        if next_cp == Some(t) {
            checkpoints_left.pop();
            checkpoints.push(take_checkpoint(t, &m, &base_idx, od));
        }
        if controls.stride > 0 && steps % controls.stride == 0 {
            samples.push(sample(t, h, r, &m, od));
        }
        if od > density_cap {
            event = Some(BlowupEvent {
                detected_time: t,
                trigger: Trigger::OriginDensityCap,
                origin_density: od,
                sample: 0,
            });
            break;
        }
        if controls.refine
            && r[0] * od.sqrt() > controls.resolution
            && od > 4.0 * last_refine_od
            && m.len() < controls.max_nodes
        {
            let (r_new, m_new) = refine(r, &m, controls.refine_zone / od.sqrt());
            m = m_new;
            stepper = Stepper::new(Scheme::new(d, r_new), &m);
            base_idx = base_grid.iter().map(|b| stepper.scheme.r.partition_point(|x| x < b)).collect();
            refinements += 1;
            // Singular data gain first-cell density from refinement alone;
            // only growth beyond this counts toward the next one.
            last_refine_od = stepper.scheme.origin_density(&m);
        }
    }
    let scheme = stepper.scheme;
    let od = scheme.origin_density(&m);
    if samples.last().map(|s| s.t) != Some(t) {
        samples.push(sample(t, dt, &scheme.r, &m, od));
    }
    if let Some(e) = event.as_mut() {
        e.sample = samples.len() - 1;
    }
    Ok(Trajectory {
        d: d.get(),
        base_grid,
        initial,
        probes,
        samples,
        checkpoints,
        final_state: finish(&scheme, m, t, dt, event.clone()),
        event,
        density_cap,
        initial_origin_density: od0,
        steps,
        rejected,
        refinements,
        warnings,
    })
}

/// Inserts the midpoint of every cell inside `zone` (and of the first
/// cell), interpolating M monotonically.
fn refine(r: &[f64], m: &[f64], zone: f64) -> (Vec<f64>, Vec<f64>) {
    let mut xs = Vec::with_capacity(r.len() + 1);
    let mut ys = Vec::with_capacity(r.len() + 1);
    xs.push(0.0);
    ys.push(0.0);
    xs.extend_from_slice(r);
    ys.extend_from_slice(m);
    let table = Pchip::new(xs, ys);
    let mut rn = Vec::with_capacity(r.len() + 64);
    let mut mn = Vec::with_capacity(r.len() + 64);
    let mut lo = 0.0;
    for (i, &x) in r.iter().enumerate() {
        if x <= zone || i == 0 {
            let mid = 0.5 * (lo + x);
            rn.push(mid);
            mn.push(table.eval(mid));
        }
        rn.push(x);
        mn.push(m[i]);
        lo = x;
    }
    (rn, mn)
}

enum Attempt {
    /// The state was advanced; the next step may grow by this factor.
    Accepted {
        growth: f64,
    },
    Rejected {
        shrink: f64,
    },
}

/// Bogacki-Shampine 3(2) with first-same-as-last reuse of the slope.
struct Stepper {
    scheme: Scheme,
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    y: Vec<f64>,
    y3: Vec<f64>,
}

impl Stepper {
    fn new(scheme: Scheme, m: &[f64]) -> Self {
        let n = m.len();
        let mut k1 = alloc::vec![0.0; n];
        scheme.rhs(m, &mut k1);
        let z = alloc::vec![0.0; n];
        Stepper { scheme, k1, k2: z.clone(), k3: z.clone(), k4: z.clone(), y: z.clone(), y3: z }
    }

    fn stable_step(&self, m: &[f64]) -> f64 {
        2.2 / self.scheme.spectral_bound(m)
    }

    /// One step of size h. Rejected when the local error exceeds the
    /// tolerance or the result loses monotonicity or nonnegativity.
    fn attempt(&mut self, m: &mut Vec<f64>, h: f64, atol: f64, rtol: f64, mono_tol: f64) -> Attempt {
        let n = m.len();
        let (k1, y, y3) = (&self.k1, &mut self.y, &mut self.y3);
        for i in 0..n {
            y[i] = m[i] + 0.5 * h * k1[i];
        }
        self.scheme.rhs(y, &mut self.k2);
        for i in 0..n {
            y[i] = m[i] + 0.75 * h * self.k2[i];
        }
        self.scheme.rhs(y, &mut self.k3);
        for i in 0..n {
            y3[i] = m[i] + h * (2.0 / 9.0 * k1[i] + 1.0 / 3.0 * self.k2[i] + 4.0 / 9.0 * self.k3[i]);
        }
        self.scheme.rhs(y3, &mut self.k4);
        let mut err = 0.0f64;
        for i in 0..n {
            let e =
                h * (-5.0 / 72.0 * k1[i] + 1.0 / 12.0 * self.k2[i] + 1.0 / 9.0 * self.k3[i] - 1.0 / 8.0 * self.k4[i]);
            err = err.max(e.abs() / (atol + rtol * m[i].abs().max(y3[i].abs())));
        }
        if !(err <= 1.0) {
            let shrink = if err.is_finite() { (0.9 * err.powf(-1.0 / 3.0)).max(0.2) } else { 0.2 };
            return Attempt::Rejected { shrink };
        }
        if !(y3[0] >= -mono_tol && y3.windows(2).all(|w| w[1] >= w[0] - mono_tol)) {
            return Attempt::Rejected { shrink: 0.5 };
        }
        core::mem::swap(m, &mut self.y3);
        core::mem::swap(&mut self.k1, &mut self.k4);
        let growth = if err > 0.0 { (0.9 * err.powf(-1.0 / 3.0)).clamp(0.2, 5.0) } else { 5.0 };
        Attempt::Accepted { growth }
    }
}

/// dM/dt of the semi-discrete scheme at the nodes of `state`.
pub fn rhs(d: Dimension, state: &SimState) -> Vec<f64> {
    let scheme = Scheme::new(d, state.r.clone());
    let mut out = alloc::vec![0.0; state.m.len()];
    scheme.rhs(&state.m, &mut out);
    out
}

/// Advances `state` by one accepted step of size at most `dt`, shrinking
/// the step until the error and monotonicity checks pass. The returned
/// state carries the suggested next step in `dt`.
pub fn step(d: Dimension, state: &SimState, dt: f64, rtol: f64, atol: f64) -> Result<SimState> {
    if !(dt > 0.0) {
        return Err(Error::domain(format!("step must be positive (got {dt})")));
    }
    let mut m = state.m.clone();
    let m_scale = m.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut stepper = Stepper::new(Scheme::new(d, state.r.clone()), &m);
    let mut h = dt.min(stepper.stable_step(&m));
    for _ in 0..64 {
        match stepper.attempt(&mut m, h, (atol * m_scale).max(1e-300), rtol, 1e-10 * m_scale) {
            Attempt::Accepted { growth } => {
                return Ok(SimState {
                    r: state.r.clone(),
                    origin_density: stepper.scheme.origin_density(&m),
                    m,
                    t: state.t + h,
                    dt: h * growth,
                    event: None,
                })
            }
            Attempt::Rejected { shrink } => h *= shrink,
        }
    }
    Err(Error::Resolution(format!("no acceptable step below {dt:e} at t = {}", state.t)))
}
