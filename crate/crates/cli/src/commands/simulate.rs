use ksblow_core::radial::{mass_from_density, MassProfile};
use ksblow_core::solver::{run, BlowupEvent, Controls, SolverGrid, Trajectory};
use serde::Serialize;

use super::dim_alpha;
use crate::config::{Format, RunConfig};
use crate::emit::{csv_string, json_string, num, opt, Plot, Series, Sink};
use crate::error::{CliError, CliResult};
use crate::profile::ProfileSpec;

pub struct SimulationPlan {
    pub profile: String,
    pub datum: MassProfile,
    pub grid: SolverGrid,
    pub controls: Controls,
}

/// Fills the datum-dependent defaults into `cfg` and builds the run.
///
/// r_max: 4× the support of compactly supported data, otherwise 100
/// characteristic radii. t_end: 1.5·T_target when given, else 10ℓ².
pub fn plan_simulation(cfg: &mut RunConfig) -> CliResult<SimulationPlan> {
    let (d, alpha) = dim_alpha(cfg)?;
    if !alpha.is_classical() {
        return Err(CliError::config(format!(
            "simulate integrates the classical equation only: alpha must be 2 (got {})",
            alpha.get()
        )));
    }
    let spec = ProfileSpec::parse(cfg.initial.profile.as_deref().expect("resolved"))?;
    let profile = spec.build(d, alpha)?;
    let ell = profile.characteristic_radius();
    let r_max = match cfg.grid.r_max {
        Some(r) => r,
        None => spec.support()?.map_or(100.0 * ell, |s| 4.0 * s),
    };
    cfg.grid.r_max = Some(r_max);
    let t_end = match (cfg.time.t_end, cfg.problem.t_target) {
        (Some(t), _) => t,
        (None, Some(target)) => 1.5 * target,
        (None, None) => 10.0 * ell * ell,
    };
    cfg.time.t_end = Some(t_end);
    let dt_floor = *cfg.time.dt_floor.get_or_insert(1e-12 * t_end);
    if let Some(target) = cfg.problem.t_target {
        if !(target > 0.0) {
            return Err(CliError::config(format!("T_target must be positive (got {target})")));
        }
    }
    let grid = SolverGrid::new(r_max, cfg.grid.n.expect("resolved"), cfg.grid.inner_fraction.expect("resolved"))?;
    let mut controls = Controls::new(t_end);
    controls.density_cap = cfg.time.density_cap;
    controls.dt_floor = Some(dt_floor);
    controls.stride = cfg.output.stride.expect("resolved");
    controls.target_time = cfg.problem.t_target;
    Ok(SimulationPlan { profile: spec.to_string(), datum: mass_from_density(&profile)?, grid, controls })
}

/// One row per sample; `blowup_flag` is 1 on the sample at detection.
pub fn trajectory_csv(tr: &Trajectory) -> String {
    let mut header: Vec<String> = ["t", "dt", "origin_density", "W"].map(String::from).to_vec();
    header.extend((1..=tr.probes.len()).map(|i| format!("M_probe_{i}")));
    header.push("blowup_flag".into());
    let flagged = tr.event.as_ref().map(|e| e.sample);
    let rows: Vec<Vec<String>> = tr
        .samples
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let mut row = vec![num(s.t), num(s.dt), num(s.origin_density), opt(s.w)];
            row.extend(s.probes.iter().map(|v| num(*v)));
            row.push(if flagged == Some(i) { "1" } else { "0" }.into());
            row
        })
        .collect();
    csv_string(&header, &rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub d: u32,
    pub profile: String,
    /// `null` for infinite mass.
    pub total_mass: Option<f64>,
    pub r_max: f64,
    pub nodes: usize,
    pub first_node: f64,
    pub t_end: f64,
    pub final_time: f64,
    pub blowup: bool,
    pub event: Option<BlowupEvent>,
    pub density_cap: f64,
    pub initial_origin_density: f64,
    pub probes: Vec<f64>,
    pub samples: usize,
    pub steps: usize,
    pub rejected: usize,
    pub refinements: usize,
    pub final_mass_at_r_max: Option<f64>,
    pub warnings: Vec<String>,
}

impl Summary {
    pub fn new(plan: &SimulationPlan, tr: &Trajectory) -> Self {
        Summary {
            d: tr.d,
            profile: plan.profile.clone(),
            total_mass: plan.datum.total_mass().filter(|m| m.is_finite()),
            r_max: plan.grid.r_max(),
            nodes: tr.base_grid.len(),
            first_node: tr.base_grid.first().copied().unwrap_or(f64::NAN),
            t_end: plan.controls.t_end,
            final_time: tr.final_state.t,
            blowup: tr.event.is_some(),
            event: tr.event.clone(),
            density_cap: tr.density_cap,
            initial_origin_density: tr.initial_origin_density,
            probes: tr.probes.clone(),
            samples: tr.samples.len(),
            steps: tr.steps,
            rejected: tr.rejected,
            refinements: tr.refinements,
            final_mass_at_r_max: tr.final_state.m.last().copied(),
            warnings: tr.warnings.clone(),
        }
    }
}

pub fn run_simulate(cfg: &RunConfig, plan: SimulationPlan, sink: &mut Sink) -> CliResult<()> {
    let tr = run(&plan.datum, ksblow_core::radial::FracOrder::CLASSICAL, plan.grid.clone(), &plan.controls)?;
    for w in &tr.warnings {
        eprintln!("warning: {w}");
    }
    let csv = trajectory_csv(&tr);
    let summary = json_string(&Summary::new(&plan, &tr));
    let csv_primary = cfg.format() == Format::Csv;
    sink.emit("trajectory.csv", &csv, csv_primary)?;
    sink.emit("summary.json", &summary, !csv_primary)?;
    if sink.has_dir() && cfg.output.svg == Some(true) {
        let title = format!("origin density, {}", plan.profile);
        let plot = Plot {
            title: &title,
            x_label: "t",
            y_label: "u(0,t)",
            log_x: false,
            log_y: true,
            series: vec![Series {
                name: "origin density",
                points: tr.samples.iter().map(|s| (s.t, s.origin_density)).collect(),
            }],
            level: None,
        };
        sink.emit("trajectory.svg", &plot.svg(), false)?;
    }
    Ok(())
}
