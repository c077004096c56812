//! The acceptance suite behind `ksblow verify`.
//!
//! Each item recomputes its quantities from scratch, compares them with the
//! stated tolerance and checks its runtime budget.

use std::f64::consts::PI;
use std::time::Instant;

use ksblow_core::criteria::{
    classify, classify_with, constant_c, constant_k_closed, criterion_constants, threshold_n, Verdict, CRITICAL_MASS_2D,
};
use ksblow_core::kernels::{kernel_table, semigroup_at_origin, validate_kernel, GridSpec, HeatKernel};
use ksblow_core::radial::{mass_from_density, sigma_d, Dimension, FracOrder, MassProfile, ProfileKind, RadialProfile};
use ksblow_core::solver::{comparison_check, moment_w, run, truncation_scaling, Controls, SolverGrid};
use ksblow_core::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::emit::{csv_string, num};
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    /// Item ids to run; empty runs all.
    pub only: Vec<String>,
    /// Added to the quadrature value of C(2).
    pub perturb_c2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ItemReport {
    pub id: &'static str,
    pub criterion: &'static str,
    pub expected: String,
    pub actual: String,
    pub tolerance: String,
    pub seconds: f64,
    pub budget_seconds: f64,
    pub passed: bool,
}

impl ItemReport {
    pub fn status(&self) -> &'static str {
        if self.passed {
            "PASS"
        } else {
            "FAIL"
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {:<4} {} | expected {} | actual {} | tol {} | {:.2}s of {}s",
            self.id,
            self.status(),
            self.criterion,
            self.expected,
            self.actual,
            self.tolerance,
            self.seconds,
            self.budget_seconds
        )
    }
}

struct Outcome {
    expected: String,
    actual: String,
    tolerance: String,
    ok: bool,
}

type ItemFn = fn(&VerifyOptions) -> Result<Outcome>;

struct Item {
    id: &'static str,
    criterion: &'static str,
    budget: f64,
    run: ItemFn,
}

const ITEMS: [Item; 11] = [
    Item { id: "AC-1", criterion: "constant C", budget: 1.0, run: ac1 },
    Item { id: "AC-2", criterion: "singular-solution invariance", budget: 1.0, run: ac2 },
    Item { id: "AC-3", criterion: "Poisson pin of subordination", budget: 30.0, run: ac3 },
    Item { id: "AC-4", criterion: "kernel structure", budget: 30.0, run: ac4 },
    Item { id: "AC-5", criterion: "fractional constant sandwich", budget: 60.0, run: ac5 },
    Item { id: "AC-6", criterion: "threshold asymptotics", budget: 10.0, run: ac6 },
    Item { id: "AC-7", criterion: "exact blowing-up solution", budget: 120.0, run: ac7 },
    Item { id: "AC-8", criterion: "dichotomy against simulation", budget: 180.0, run: ac8 },
    Item { id: "AC-9", criterion: "comparison principle", budget: 120.0, run: ac9 },
    Item { id: "AC-10", criterion: "truncation scaling", budget: 180.0, run: ac10 },
    Item { id: "AC-11", criterion: "scaling covariance", budget: 60.0, run: ac11 },
];

pub fn item_ids() -> Vec<&'static str> {
    ITEMS.iter().map(|i| i.id).collect()
}

/// Runs one item by id.
pub fn run_item(id: &str, opts: &VerifyOptions) -> CliResult<ItemReport> {
    let item = ITEMS.iter().find(|i| i.id.eq_ignore_ascii_case(id)).ok_or_else(|| {
        CliError::config(format!("unknown acceptance item '{id}' (known: {})", item_ids().join(", ")))
    })?;
    let start = Instant::now();
    let out = (item.run)(opts);
    let seconds = start.elapsed().as_secs_f64();
    let out = out.unwrap_or_else(|e| Outcome {
        expected: "completion".into(),
        actual: format!("error: {e}"),
        tolerance: "-".into(),
        ok: false,
    });
    Ok(ItemReport {
        id: item.id,
        criterion: item.criterion,
        expected: out.expected,
        actual: out.actual,
        tolerance: out.tolerance,
        seconds,
        budget_seconds: item.budget,
        passed: out.ok && seconds <= item.budget,
    })
}

/// Runs the selected items in order, calling `progress` after each.
pub fn run_verify(opts: &VerifyOptions, mut progress: impl FnMut(&ItemReport)) -> CliResult<Vec<ItemReport>> {
    let ids: Vec<String> =
        if opts.only.is_empty() { item_ids().into_iter().map(String::from).collect() } else { opts.only.clone() };
    for id in &ids {
        if !ITEMS.iter().any(|i| i.id.eq_ignore_ascii_case(id)) {
            return Err(CliError::config(format!("unknown acceptance item '{id}' (known: {})", item_ids().join(", "))));
        }
    }
    let mut out = Vec::new();
    for id in &ids {
        let rep = run_item(id, opts)?;
        progress(&rep);
        out.push(rep);
    }
    Ok(out)
}

pub fn verify_csv(reports: &[ItemReport]) -> String {
    let header: Vec<String> =
        ["id", "criterion", "expected", "actual", "tolerance", "seconds", "budget_seconds", "status"]
            .map(String::from)
            .to_vec();
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            vec![
                r.id.into(),
                r.criterion.into(),
                r.expected.clone(),
                r.actual.clone(),
                r.tolerance.clone(),
                format!("{:.3}", r.seconds),
                num(r.budget_seconds),
                r.status().into(),
            ]
        })
        .collect();
    csv_string(&header, &rows)
}

fn dim(d: u32) -> Dimension {
    Dimension::new(d).expect("fixed dimensions are valid")
}

fn order(a: f64) -> FracOrder {
    FracOrder::new(a).expect("fixed orders are valid")
}

const TWO: FracOrder = FracOrder::CLASSICAL;

fn mass(p: Result<RadialProfile>) -> Result<MassProfile> {
    mass_from_density(&p?)
}

fn e(x: f64) -> String {
    format!("{x:.3e}")
}

fn ac1(opts: &VerifyOptions) -> Result<Outcome> {
    let c2 = constant_c(dim(2))? + opts.perturb_c2;
    let dev = (c2 - 2.0).abs();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for d in 3..=30 {
        let c = constant_c(dim(d))?;
        lo = lo.min(c);
        hi = hi.max(c);
    }
    Ok(Outcome {
        expected: "C(2) = 2; C(d) in [1, 2) for d = 3..30".into(),
        actual: format!("|C(2) - 2| = {}; C(3..30) in [{lo:.6}, {hi:.6}]", e(dev)),
        tolerance: "1e-10".into(),
        ok: dev <= 1e-10 && lo >= 1.0 && hi < 2.0,
    })
}

fn ac2(_: &VerifyOptions) -> Result<Outcome> {
    let mut worst = 0.0f64;
    for d in [3, 5, 10] {
        let k = HeatKernel::new(dim(d), TWO)?;
        let uc = mass(RadialProfile::chandrasekhar(dim(d), 1.0, TWO))?;
        let closed = constant_k_closed(dim(d), TWO)?;
        worst = worst.max((closed - 1.0).abs());
        for t in [1e-3, 1.0, 1e3] {
            let v = t * semigroup_at_origin(&k, &uc, t)?;
            worst = worst.max((v - closed).abs()).max((v - 1.0).abs());
        }
    }
    Ok(Outcome {
        expected: "t e^{tΔ}u_C(0) = K2 = 1 for t in {1e-3, 1, 1e3}, d in {3, 5, 10}".into(),
        actual: format!("max deviation {}", e(worst)),
        tolerance: "1e-8".into(),
        ok: worst <= 1e-8,
    })
}

fn ac3(_: &VerifyOptions) -> Result<Outcome> {
    let k = HeatKernel::new(dim(3), order(1.0))?;
    let mut worst = 0.0f64;
    for i in 0..=1000 {
        let rho = 0.01 * i as f64;
        let exact = PI.powi(-2) * (1.0 + rho * rho).powi(-2);
        worst = worst.max((k.value(rho) / exact - 1.0).abs());
    }
    let mut norm = 0.0f64;
    for a in [0.5, 1.0, 1.5] {
        for d in [3, 5] {
            let t = kernel_table(dim(d), order(a), GridSpec::default())?;
            norm = norm.max(t.mass_residual().abs()).max(t.moment_residual().abs());
        }
    }
    Ok(Outcome {
        expected: "alpha=1, d=3 kernel = Poisson kernel on [0, 10]; both normalizations hold".into(),
        actual: format!("max relative error {}; max normalization residual {}", e(worst), e(norm)),
        tolerance: "1e-6".into(),
        ok: worst <= 1e-6 && norm <= 1e-6,
    })
}

fn ac4(_: &VerifyOptions) -> Result<Outcome> {
    let mut worst_tail = 0.0f64;
    let mut failures = Vec::new();
    for a in [0.5, 1.0, 1.5] {
        for d in [3, 5] {
            let t = kernel_table(dim(d), order(a), GridSpec::default())?;
            let v = validate_kernel(&t);
            for (fit, want) in v.tails.iter().zip(v.expected_exponents) {
                worst_tail = worst_tail.max(((fit.exponent - want) / want).abs());
            }
            failures.extend(v.failures().map(|c| format!("d={d} alpha={a}: {}", c.name)));
        }
    }
    let actual = if failures.is_empty() {
        format!("worst tail exponent deviation {:.3}%; sign, convexity and decay checks pass", 100.0 * worst_tail)
    } else {
        format!("worst tail deviation {:.3}%; failed: {}", 100.0 * worst_tail, failures.join(", "))
    };
    Ok(Outcome {
        expected: "tails -d-alpha, -d-1-alpha, -d-2-alpha; R' < 0; rho R'' - R' >= 0; |rho^(1-d) R'| decreasing".into(),
        actual,
        tolerance: "2% on exponents".into(),
        ok: failures.is_empty() && worst_tail <= 0.02,
    })
}

fn ac5(_: &VerifyOptions) -> Result<Outcome> {
    let mut slack = f64::INFINITY;
    let mut bad = Vec::new();
    for a in [0.5, 1.0, 1.5] {
        for d in [4u32, 6, 10] {
            let c = criterion_constants(dim(d), order(a))?;
            let k = c.k.expect("2 alpha < d");
            let up = c.upper_bound.expect("alpha < 2");
            let s = (c.c - k).min(up - c.c);
            slack = slack.min(s);
            if s < -1e-6 {
                bad.push(format!("d={d} alpha={a}: K={k} C={} bound={up}", c.c));
            }
        }
    }
    Ok(Outcome {
        expected: "K_alpha(d) <= C_alpha(d) <= 2d/(d-2) for alpha in {0.5, 1, 1.5}, d in {4, 6, 10}".into(),
        actual: if bad.is_empty() { format!("smallest slack {}", e(slack)) } else { bad.join("; ") },
        tolerance: "1e-6 slack".into(),
        ok: bad.is_empty(),
    })
}

fn ac6(_: &VerifyOptions) -> Result<Outcome> {
    let mut ratios = Vec::new();
    for d in [20u32, 50, 100] {
        let n = threshold_n(dim(d), TWO)?;
        ratios.push(n / (4.0 * sigma_d(dim(d)) * (PI * (d as f64 - 2.0)).sqrt()));
    }
    let decreasing = ratios.windows(2).all(|w| w[1] < w[0]);
    Ok(Outcome {
        expected: "N(d)/(4 sigma_d sqrt(pi(d-2))) <= 1.1 and decreasing at d = 20, 50, 100".into(),
        actual: format!("ratios {:.5}, {:.5}, {:.5}", ratios[0], ratios[1], ratios[2]),
        tolerance: "1.1".into(),
        ok: decreasing && ratios.iter().all(|r| *r <= 1.1),
    })
}

fn ac7(_: &VerifyOptions) -> Result<Outcome> {
    let d = dim(3);
    let m = mass(RadialProfile::exact_datum(d, 1.0))?;
    let grid = SolverGrid::new(100.0 * m.characteristic_radius(), 4000, 0.25)?;
    let mut c = Controls::new(1.5);
    c.checkpoints = (1..=8).map(|k| 0.1 * k as f64).collect();
    c.target_time = Some(1.0);
    c.stride = 200;
    let tr = run(&m, TWO, grid, &c)?;
    let exact = |r: f64, t: f64| 4.0 * sigma_d(d) * r.powi(3) / (r * r + 2.0 * (1.0 - t));
    let mut sup = 0.0f64;
    for cp in &tr.checkpoints {
        for (r, v) in tr.base_grid.iter().zip(&cp.m) {
            let x = exact(*r, cp.t);
            sup = sup.max((v - x).abs() / x);
        }
    }
    let c3 = constant_c(d)?;
    let mut wdev = 0.0f64;
    for cp in tr.checkpoints.iter().filter(|cp| [0.2, 0.5, 0.7].iter().any(|t| (cp.t - t).abs() < 1e-12)) {
        let w = moment_w(d, &tr.base_grid, &cp.m, 1.0 - cp.t)?;
        wdev = wdev.max((w * (1.0 - cp.t) / c3 - 1.0).abs());
    }
    let t_det = tr.blowup_time();
    let tdev = t_det.map_or(f64::INFINITY, |t| (t - 1.0).abs());
    Ok(Outcome {
        expected: "sup rel error <= 1% to t = 0.8; blowup within 5% of 1; W = C(3)/(1-t) within 3%".into(),
        actual: format!(
            "sup rel error {}; detected {}; W deviation {:.3}%",
            e(sup),
            t_det.map_or("none".into(), |t| format!("{t:.5}")),
            100.0 * wdev
        ),
        tolerance: "1%, 5%, 3%".into(),
        ok: tr.checkpoints.len() == 8 && sup <= 0.01 && tdev <= 0.05 && wdev <= 0.03,
    })
}

fn ac8(_: &VerifyOptions) -> Result<Outcome> {
    let d = dim(3);
    let sub = mass(RadialProfile::truncated_chandrasekhar(d, 0.9, TWO, 0.0, 50.0))?;
    let mut c = Controls::new(10.0);
    c.stride = 0;
    let tr = run(&sub, TWO, SolverGrid::new(200.0, 2000, 0.25)?, &c)?;
    let a_ok = tr.event.is_none() && tr.final_state.t == 10.0;

    let n = threshold_n(d, TWO)?;
    let shell = RadialProfile::shell(d, 1.05 * n, 1.0)?;
    let t_star = classify(&shell, TWO)?.verdict.blowup_time();
    let (b_ok, b_text) = match t_star {
        Some(ts) => {
            let mut c = Controls::new(2.0 * ts);
            c.stride = 0;
            let tr = run(&mass_from_density(&shell)?, TWO, SolverGrid::new(100.0, 4000, 0.25)?, &c)?;
            match tr.blowup_time() {
                Some(t) => (t <= 1.2 * ts, format!("blowup at {t:.4} vs T* = {ts:.4}")),
                None => (false, format!("no blowup by {:.4}, T* = {ts:.4}", 2.0 * ts)),
            }
        }
        None => (false, "classifier does not fire".into()),
    };

    let d2 = dim(2);
    let hi = classify(&RadialProfile::gaussian(d2, 1.01 * CRITICAL_MASS_2D, 1.0)?, TWO)?.verdict;
    let lo = classify(&RadialProfile::gaussian(d2, 0.99 * CRITICAL_MASS_2D, 1.0)?, TWO)?.verdict;
    let c_ok = matches!(hi, Verdict::BlowupBy { .. }) && lo.is_global();

    Ok(Outcome {
        expected:
            "(a) 0.9 u_C truncated global to t=10; (b) 1.05 N shell blows up by 1.2 T*; (c) 8 pi (1 +- 0.01) split"
                .into(),
        actual: format!(
            "(a) {}; (b) {b_text}; (c) {} / {}",
            if a_ok { "no blowup to t=10".to_string() } else { format!("stopped at {:.4}", tr.final_state.t) },
            hi.name(),
            lo.name()
        ),
        tolerance: "1.2 T*".into(),
        ok: a_ok && b_ok && c_ok,
    })
}

fn ac9(_: &VerifyOptions) -> Result<Outcome> {
    let d = dim(3);
    let trunc = |eta: f64| mass(RadialProfile::truncated_chandrasekhar(d, eta, TWO, 0.0, 50.0));
    let pairs = [
        ("0 <= 0.9 u_C", MassProfile::zero(d), trunc(0.9)?),
        ("0.5 u_C <= 0.9 u_C", trunc(0.5)?, trunc(0.9)?),
        ("gauss(10,1) <= 0.9 u_C", mass(RadialProfile::gaussian(d, 10.0, 1.0))?, trunc(0.9)?),
    ];
    let grid = SolverGrid::new(200.0, 1500, 0.25)?;
    let mut c = Controls::new(5.0);
    c.stride = 0;
    let mut notes = Vec::new();
    let mut ok = true;
    for (name, low, high) in &pairs {
        let rep = comparison_check(low, high, grid.clone(), &c)?;
        let reached = rep.times.last().copied().unwrap_or(0.0);
        let good = rep.ordered && reached == 5.0;
        ok &= good;
        notes.push(match rep.first_violation {
            Some(v) => format!("{name}: violated at t={} r={}", v.t, v.r),
            None => format!("{name}: ordered at {} times to t={reached}", rep.times.len()),
        });
    }
    Ok(Outcome {
        expected: "three ordered pairs stay ordered to t = 5".into(),
        actual: notes.join("; "),
        tolerance: "1e-6 of max M".into(),
        ok,
    })
}

fn ac10(_: &VerifyOptions) -> Result<Outcome> {
    let mut c = Controls::new(50.0);
    c.stride = 0;
    let grid = SolverGrid::new(100.0, 2000, 0.25)?;
    let rep = truncation_scaling(dim(3), 4.0, &[0.25, 0.5, 1.0], &grid, &c)?;
    let times: Vec<String> = rep
        .runs
        .iter()
        .map(|r| format!("R={}: {}", r.radius, r.blowup_time.map_or("none".into(), |t| format!("{t:.5}"))))
        .collect();
    let (ok, fit) = match &rep.fit {
        Some(f) => ((1.6..=2.4).contains(&f.exponent), format!("exponent {:.4}", f.exponent)),
        None => (false, "no fit (a run did not blow up)".into()),
    };
    Ok(Outcome {
        expected: "T(R) ~ R^2: fitted exponent in [1.6, 2.4] for eta = 4, d = 3".into(),
        actual: format!("{fit} ({})", times.join(", ")),
        tolerance: "[1.6, 2.4]".into(),
        ok,
    })
}

fn ac11(_: &VerifyOptions) -> Result<Outcome> {
    // (d, α) families; tables are built once and shared by their cases.
    let families = [(3u32, 2.0), (5, 1.5), (3, 1.0)];
    let tables = families
        .iter()
        .map(|&(d, a)| kernel_table(dim(d), order(a), GridSpec::default_for(order(a))))
        .collect::<Result<Vec<_>>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x6b73_626c_6f77);
    let mut worst = 0.0f64;
    let mut blowups = 0;
    let mut bad = Vec::new();
    for case in 0..20 {
        let f = case % families.len();
        let (d, a) = (dim(families[f].0), order(families[f].1));
        let kinds = if a.is_classical() { 5 } else { 4 };
        let u: f64 = rng.gen();
        let p = match rng.gen_range(0..kinds) {
            0 => RadialProfile::shell(d, 20.0 + 300.0 * u, 0.5 + rng.gen::<f64>())?,
            1 => RadialProfile::gaussian(d, 20.0 + 400.0 * u, 0.5 + rng.gen::<f64>())?,
            2 => RadialProfile::truncated_chandrasekhar(
                d,
                0.5 + 4.5 * u,
                a,
                rng.gen::<f64>(),
                5.0 + 45.0 * rng.gen::<f64>(),
            )?,
            3 => RadialProfile::chandrasekhar(d, 0.5 + 2.5 * u, a)?,
            _ => RadialProfile::exact_datum_scaled(d, 0.2 + 2.0 * rng.gen::<f64>(), 0.5 + u)?,
        };
        // η·u_C is scale-invariant: T·W₀(T) is constant, so its T* is only
        // the bottom of the scanned range and only the verdict is compared.
        let invariant = matches!(p.kind(), ProfileKind::Chandrasekhar { .. });
        let lambda = 10f64.powf(rng.gen_range(-1.0..1.0));
        let t = &tables[f];
        let base = classify_with(t, &p)?.verdict;
        let scaled = classify_with(t, &p.scaled(lambda, a)?)?.verdict;
        if base.name() != scaled.name() {
            bad.push(format!("case {case}: {} vs {}", base.name(), scaled.name()));
            continue;
        }
        if invariant {
            continue;
        }
        if let (Some(t0), Some(t1)) = (base.blowup_time(), scaled.blowup_time()) {
            blowups += 1;
            let dev = (t1 / (t0 * lambda.powf(-a.get())) - 1.0).abs();
            worst = worst.max(dev);
            if dev > 0.05 {
                bad.push(format!("case {case}: T* {t1} vs {}", t0 * lambda.powf(-a.get())));
            }
        }
    }
    Ok(Outcome {
        expected: "20 random (profile, lambda): same verdict, T* scales like lambda^-alpha".into(),
        actual: if bad.is_empty() {
            format!("verdicts invariant; {blowups} blowup cases, worst T* deviation {}", e(worst))
        } else {
            bad.join("; ")
        },
        tolerance: "5% on T*".into(),
        ok: bad.is_empty(),
    })
}
