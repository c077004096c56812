mod classify;
mod constants;
mod kernel;
mod simulate;

pub use classify::{classify_report, run_classify, ClassifyReport, Margins};
pub use constants::{constants_csv, constants_table, run_constants};
pub use kernel::{kernel_csv, run_kernel};
pub use simulate::{plan_simulation, run_simulate, trajectory_csv, SimulationPlan, Summary};

use ksblow_core::radial::{Dimension, FracOrder};

use crate::config::RunConfig;
use crate::error::CliResult;

pub(crate) fn dim_alpha(cfg: &RunConfig) -> CliResult<(Dimension, FracOrder)> {
    let d = Dimension::new(cfg.problem.d.expect("resolved"))?;
    let alpha = FracOrder::new(cfg.problem.alpha.expect("resolved"))?;
    if d.precision_warning() {
        eprintln!(
            "warning: d = {} > {}; Gamma-based constants lose a few digits",
            d.get(),
            Dimension::PRECISION_WARNING
        );
    }
    Ok((d, alpha))
}
