use ksblow_core::kernels::{validate_kernel, GridSpec, HeatKernel, KernelTable, KernelValidation};
use ksblow_core::Error;
use serde::Serialize;

use super::dim_alpha;
use crate::config::{Format, RunConfig};
use crate::emit::{csv_string, json_string, num, Sink};
use crate::error::CliResult;

#[derive(Serialize)]
struct Sidecar<'a> {
    d: u32,
    alpha: f64,
    grid: GridSpec,
    r0: f64,
    passed: bool,
    validation: &'a KernelValidation,
}

pub fn kernel_csv(t: &KernelTable) -> String {
    let header: Vec<String> = ["rho", "R", "Rp", "Rpp"].map(String::from).to_vec();
    let rows: Vec<Vec<String>> = (0..t.rho().len())
        .map(|i| vec![num(t.rho()[i]), num(t.values()[i]), num(t.first_derivative()[i]), num(t.second_derivative()[i])])
        .collect();
    csv_string(&header, &rows)
}

/// Tabulates and validates; a table failing validation is still written,
/// then reported as a numerical failure.
pub fn run_kernel(cfg: &RunConfig, sink: &mut Sink) -> CliResult<()> {
    let (d, alpha) = dim_alpha(cfg)?;
    let def = GridSpec::default_for(alpha);
    let k = &cfg.kernel;
    let grid = GridSpec {
        rho_min: k.rho_min.unwrap_or(def.rho_min),
        rho_max: k.rho_max.unwrap_or(def.rho_max),
        per_decade: k.per_decade.unwrap_or(def.per_decade),
    };
    let table = KernelTable::build(HeatKernel::new(d, alpha)?, grid)?;
    let v = validate_kernel(&table);
    let side = Sidecar { d: d.get(), alpha: alpha.get(), grid, r0: table.r0(), passed: v.passed(), validation: &v };
    let csv = kernel_csv(&table);
    let json = json_string(&side);
    let csv_primary = cfg.format() == Format::Csv;
    sink.emit("kernel.csv", &csv, csv_primary)?;
    sink.emit("kernel.json", &json, !csv_primary)?;
    if !v.passed() {
        let names: Vec<String> = v.failures().map(|c| format!("{} ({})", c.name, c.detail)).collect();
        return Err(Error::Kernel(names.join("; ")).into());
    }
    Ok(())
}
