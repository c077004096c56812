use ksblow_core::criteria::{classify, CriterionConstants, CriterionReport, DatumSummary, Verdict};
use ksblow_core::radial::{Dimension, FracOrder};
use serde::Serialize;

use super::dim_alpha;
use crate::config::{Format, RunConfig};
use crate::emit::{csv_string, json_string, num, Plot, Series, Sink};
use crate::error::{CliError, CliResult};
use crate::profile::ProfileSpec;

/// Distances to both sides of the dichotomy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Margins {
    /// sup_T T·W₀(T) / C.
    pub criterion_ratio: f64,
    /// criterion_ratio - 1; positive means the blowup test fires.
    pub blowup_margin: f64,
    /// sup r^α u₀ / s(α,d), when the singular solution exists.
    pub singular_ratio: Option<f64>,
    /// 1 - singular_ratio; positive means the global test fires.
    pub global_margin: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveSummary {
    pub sup: f64,
    pub argmax: f64,
    pub unimodal: bool,
    pub points: usize,
    /// File holding the (T, T·W₀(T)) samples, when written.
    pub path: Option<String>,
    /// The samples themselves when there is no output directory.
    pub samples: Option<Vec<(f64, f64)>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassifyReport {
    pub d: u32,
    pub alpha: f64,
    pub profile: String,
    pub verdict: Verdict,
    pub margins: Margins,
    pub constants: CriterionConstants,
    pub datum: DatumSummary,
    pub curve: CurveSummary,
    pub warnings: Vec<String>,
}

/// Rejects fractional orders without the singular solution, then classifies.
pub fn classify_report(
    spec: &ProfileSpec,
    d: Dimension,
    alpha: FracOrder,
) -> CliResult<(ClassifyReport, CriterionReport)> {
    if !alpha.is_classical() && 2.0 * alpha.get() >= d.as_f64() {
        return Err(CliError::config(format!(
            "the fractional criteria need d >= 2 and 2*alpha < d (got d = {}, alpha = {})",
            d.get(),
            alpha.get()
        )));
    }
    let profile = spec.build(d, alpha)?;
    let rep = classify(&profile, alpha)?;
    let ratio = rep.curve.sup / rep.constants.c;
    let margins = Margins {
        criterion_ratio: ratio,
        blowup_margin: ratio - 1.0,
        singular_ratio: rep.datum.singular_ratio,
        global_margin: rep.datum.singular_ratio.map(|e| 1.0 - e),
    };
    let mut warnings = Vec::new();
    if !rep.curve.unimodal {
        warnings.push("criterion curve has more than one local maximum on the scanned range".to_string());
    }
    if d.precision_warning() {
        warnings.push(format!("d > {}: Gamma-based constants lose a few digits", Dimension::PRECISION_WARNING));
    }
    let out = ClassifyReport {
        d: d.get(),
        alpha: alpha.get(),
        profile: spec.to_string(),
        verdict: rep.verdict.clone(),
        margins,
        constants: rep.constants.clone(),
        datum: rep.datum.clone(),
        curve: CurveSummary {
            sup: rep.curve.sup,
            argmax: rep.curve.argmax,
            unimodal: rep.curve.unimodal,
            points: rep.curve.samples.len(),
            path: None,
            samples: None,
        },
        warnings,
    };
    Ok((out, rep))
}

pub fn run_classify(cfg: &RunConfig, sink: &mut Sink) -> CliResult<()> {
    let (d, alpha) = dim_alpha(cfg)?;
    let spec = ProfileSpec::parse(cfg.initial.profile.as_deref().expect("resolved"))?;
    let (mut report, full) = classify_report(&spec, d, alpha)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let header = vec!["T".to_string(), "TW".to_string()];
    let rows: Vec<Vec<String>> = full.curve.samples.iter().map(|&(t, v)| vec![num(t), num(v)]).collect();
    let curve_csv = csv_string(&header, &rows);
    if sink.has_dir() {
        report.curve.path = Some("curve.csv".into());
        sink.emit("curve.csv", &curve_csv, false)?;
        if cfg.output.svg == Some(true) {
            let title = format!("T·W0(T) for {} (d={}, alpha={})", report.profile, d.get(), alpha.get());
            let plot = Plot {
                title: &title,
                x_label: "T",
                y_label: "T·W0(T)",
                log_x: true,
                log_y: false,
                series: vec![Series { name: "criterion", points: full.curve.samples.clone() }],
                level: Some((full.constants.c, "C")),
            };
            sink.emit("curve.svg", &plot.svg(), false)?;
        }
    } else {
        report.curve.samples = Some(full.curve.samples.clone());
    }
    match cfg.format() {
        Format::Json => sink.emit("report.json", &json_string(&report), true),
        Format::Csv => {
            sink.emit("report.json", &json_string(&report), false)?;
            if !sink.has_dir() {
                print!("{curve_csv}");
            }
            Ok(())
        }
    }
}
