use ksblow_core::criteria::{criterion_constants, CriterionConstants};
use ksblow_core::radial::{Dimension, FracOrder};
use rayon::prelude::*;

use crate::config::{parse_d_range, Format, RunConfig};
use crate::emit::{csv_string, json_string, num, opt, Sink};
use crate::error::CliResult;

/// Constants for every (d, α) pair, d-major, computed in parallel.
pub fn constants_table(ds: &[u32], alphas: &[f64]) -> CliResult<Vec<CriterionConstants>> {
    let mut pairs = Vec::new();
    for &d in ds {
        for &a in alphas {
            pairs.push((Dimension::new(d)?, FracOrder::new(a)?));
        }
    }
    if let Some((d, _)) = pairs.iter().find(|(d, _)| d.precision_warning()) {
        eprintln!(
            "warning: d up to {} > {}; Gamma-based constants lose a few digits",
            d.get(),
            Dimension::PRECISION_WARNING
        );
    }
    pairs.par_iter().map(|&(d, a)| Ok(criterion_constants(d, a)?)).collect()
}

pub fn constants_csv(rows: &[CriterionConstants]) -> String {
    let header: Vec<String> =
        ["d", "alpha", "sigma_d", "C", "K", "L", "N_threshold", "upper_bound"].map(String::from).to_vec();
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|c| {
            vec![
                c.d.to_string(),
                num(c.alpha),
                num(c.sigma_d),
                num(c.c),
                opt(c.k),
                opt(c.l),
                opt(c.n_threshold),
                opt(c.upper_bound),
            ]
        })
        .collect();
    csv_string(&header, &body)
}

pub fn run_constants(cfg: &RunConfig, sink: &mut Sink) -> CliResult<()> {
    let ds = parse_d_range(cfg.problem.d_range.as_deref().expect("resolved"))?;
    let rows = constants_table(&ds, cfg.problem.alphas.as_deref().expect("resolved"))?;
    let csv = constants_csv(&rows);
    let json = json_string(&rows);
    match cfg.format() {
        Format::Csv => {
            sink.emit("constants.csv", &csv, true)?;
            sink.emit("constants.json", &json, false)
        }
        Format::Json => {
            sink.emit("constants.json", &json, true)?;
            sink.emit("constants.csv", &csv, false)
        }
    }
}
