//! `ksblow`: criterion constants, classification of initial data, fractional
//! heat kernels, radial simulations and the acceptance suite.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod emit;
pub mod error;
pub mod profile;
pub mod verify;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use config::{Command, Format, RunConfig};
use emit::{json_string, Sink};
use error::{CliError, CliResult, EXIT_INPUT, EXIT_OK};

#[derive(Debug, Parser)]
#[command(name = "ksblow", version, about = "Blowup criteria for the radial Keller-Segel system")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Args, Default)]
pub struct Common {
    /// TOML configuration (JSON if the name ends in .json).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; without it the main artifact goes to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Criterion constants over a (d, alpha) grid.
    Constants {
        #[command(flatten)]
        common: Common,
        /// Dimensions as a:b (inclusive).
        #[arg(long)]
        d_range: Option<String>,
        /// Comma-separated orders.
        #[arg(long, value_delimiter = ',')]
        alpha: Option<Vec<f64>>,
    },
    /// Global/blowup verdict for an initial datum.
    Classify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        profile: Option<String>,
        #[arg(long)]
        d: Option<u32>,
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Integrate the radial mass equation (alpha = 2).
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        profile: Option<String>,
        #[arg(long)]
        d: Option<u32>,
        #[arg(long)]
        alpha: Option<f64>,
        /// Enables the moment W(t) for this target time.
        #[arg(long = "T-target", alias = "t-target")]
        t_target: Option<f64>,
        #[arg(long)]
        r_max: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        inner_fraction: Option<f64>,
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long)]
        density_cap: Option<f64>,
        #[arg(long)]
        dt_floor: Option<f64>,
        #[arg(long)]
        stride: Option<usize>,
        #[arg(long)]
        no_svg: bool,
    },
    /// Tabulate and validate the heat kernel R, R', R''.
    Kernel {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        d: Option<u32>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        rho_min: Option<f64>,
        #[arg(long)]
        rho_max: Option<f64>,
        #[arg(long)]
        per_decade: Option<usize>,
    },
    /// Run the acceptance suite.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Item ids, e.g. AC-5 (repeatable or comma-separated).
        #[arg(long, value_delimiter = ',')]
        only: Option<Vec<String>>,
        /// Adds this amount to the computed C(2).
        #[arg(long, hide = true, allow_negative_numbers = true)]
        perturb_c2: Option<f64>,
    },
}

impl Cmd {
    /// The subcommand and its flags as a configuration layer.
    pub fn split(self) -> (Command, Common, RunConfig) {
        let mut c = RunConfig::default();
        let (cmd, common) = match self {
            Cmd::Constants { common, d_range, alpha } => {
                c.problem.d_range = d_range;
                c.problem.alphas = alpha;
                (Command::Constants, common)
            }
            Cmd::Classify { common, profile, d, alpha } => {
                c.initial.profile = profile;
                c.problem.d = d;
                c.problem.alpha = alpha;
                (Command::Classify, common)
            }
            Cmd::Simulate {
                common,
                profile,
                d,
                alpha,
                t_target,
                r_max,
                n,
                inner_fraction,
                t_end,
                density_cap,
                dt_floor,
                stride,
                no_svg,
            } => {
                c.initial.profile = profile;
                c.problem.d = d;
                c.problem.alpha = alpha;
                c.problem.t_target = t_target;
                c.grid = config::Grid { r_max, n, inner_fraction };
                c.time = config::Time { t_end, density_cap, dt_floor };
                c.output.stride = stride;
                if no_svg {
                    c.output.svg = Some(false);
                }
                (Command::Simulate, common)
            }
            Cmd::Kernel { common, d, alpha, rho_min, rho_max, per_decade } => {
                c.problem.d = d;
                c.problem.alpha = alpha;
                c.kernel = config::KernelGrid { rho_min, rho_max, per_decade };
                (Command::Kernel, common)
            }
            Cmd::Verify { common, only, perturb_c2 } => {
                c.verify.only = only;
                c.verify.perturb_c2 = perturb_c2;
                (Command::Verify, common)
            }
        };
        c.output.path = common.out.clone();
        c.output.format = common.format;
        c.threads = common.threads;
        (cmd, common, c)
    }
}

/// Merges flags over the file, resolves and executes.
pub fn execute(cli: Cli) -> CliResult<()> {
    let (cmd, common, flags) = cli.command.split();
    let file = match &common.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    let mut cfg = flags.over(file).resolve(cmd)?;
    if let Some(t) = cfg.threads {
        // A second build in the same process (tests) keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let plan = match cmd {
        Command::Simulate => Some(commands::plan_simulation(&mut cfg)?),
        _ => None,
    };
    let mut sink = Sink::new(cfg.output.path.as_deref())?;
    sink.emit("resolved.json", &cfg.to_json(), false)?;
    match cmd {
        Command::Constants => commands::run_constants(&cfg, &mut sink)?,
        Command::Classify => commands::run_classify(&cfg, &mut sink)?,
        Command::Simulate => commands::run_simulate(&cfg, plan.expect("planned"), &mut sink)?,
        Command::Kernel => commands::run_kernel(&cfg, &mut sink)?,
        Command::Verify => run_verify_command(&cfg, &mut sink)?,
    }
    for p in sink.written() {
        eprintln!("wrote {}", p.display());
    }
    Ok(())
}

fn run_verify_command(cfg: &RunConfig, sink: &mut Sink) -> CliResult<()> {
    let opts = verify::VerifyOptions {
        only: cfg.verify.only.clone().unwrap_or_default(),
        perturb_c2: cfg.verify.perturb_c2.unwrap_or(0.0),
    };
    let reports = verify::run_verify(&opts, |r| eprintln!("{}", r.line()))?;
    let csv = verify::verify_csv(&reports);
    let json = json_string(&reports);
    match cfg.format() {
        Format::Csv => {
            sink.emit("verify.csv", &csv, true)?;
            sink.emit("verify.json", &json, false)?;
        }
        Format::Json => {
            sink.emit("verify.json", &json, true)?;
            sink.emit("verify.csv", &csv, false)?;
        }
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        return Err(CliError::Acceptance { failed, total: reports.len() });
    }
    Ok(())
}

/// Parses arguments, runs, prints any error and returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
