use ksblow_core::criteria::{classify, constant_c, threshold_n};
use ksblow_core::radial::*;
use ksblow_core::solver::*;
use ksblow_core::Error;
use proptest::prelude::*;

fn dim(d: u32) -> Dimension {
    Dimension::new(d).unwrap()
}

const CLASSICAL: FracOrder = FracOrder::CLASSICAL;

fn mass(p: &RadialProfile) -> MassProfile {
    mass_from_density(p).unwrap()
}

/// M(r, t) of the explicit blowing-up solution with blowup time T.
fn exact_mass(d: Dimension, r: f64, t: f64, big_t: f64) -> f64 {
    let df = d.as_f64();
    4.0 * sigma_d(d) * r.powf(df) / (r * r + 2.0 * (df - 2.0) * (big_t - t))
}

fn exact_mass_dt(d: Dimension, r: f64, t: f64, big_t: f64) -> f64 {
    let df = d.as_f64();
    let q = r * r + 2.0 * (df - 2.0) * (big_t - t);
    4.0 * sigma_d(d) * r.powf(df) * 2.0 * (df - 2.0) / (q * q)
}

fn state(r: Vec<f64>, m: Vec<f64>) -> SimState {
    SimState { r, m, t: 0.0, dt: 0.0, origin_density: 0.0, event: None }
}

fn sup_rel_error(d: Dimension, cp: &Checkpoint, grid: &[f64]) -> f64 {
    grid.iter()
        .zip(&cp.m)
        .map(|(r, v)| {
            let x = exact_mass(d, *r, cp.t, 1.0);
            (v - x).abs() / x
        })
        .fold(0.0, f64::max)
}

fn exact_run(n: usize, checkpoints: Vec<f64>) -> Trajectory {
    let d = dim(3);
    let m = mass(&RadialProfile::exact_datum(d, 1.0).unwrap());
    let grid = SolverGrid::new(100.0 * m.characteristic_radius(), n, 0.25).unwrap();
    let mut c = Controls::new(1.5);
    c.checkpoints = checkpoints;
    c.target_time = Some(1.0);
    c.stride = 200;
    run(&m, CLASSICAL, grid, &c).unwrap()
}

fn assert_monotone(m: &[f64], tol: f64) {
    assert!(m[0] >= -tol, "negative mass {}", m[0]);
    for w in m.windows(2) {
        assert!(w[1] >= w[0] - tol, "M decreases: {} -> {}", w[0], w[1]);
    }
}

#[test]
fn zero_state_is_stationary() {
    let d = dim(3);
    let grid = SolverGrid::new(10.0, 200, 0.25).unwrap();
    let st = state(grid.nodes().to_vec(), vec![0.0; grid.len()]);
    assert!(rhs(d, &st).iter().all(|v| *v == 0.0));
    let tr = run(&MassProfile::zero(d), CLASSICAL, grid, &Controls::new(1.0)).unwrap();
    assert!(tr.event.is_none());
    assert!(tr.final_state.m.iter().all(|v| *v == 0.0));
    assert_eq!(moment_w(d, &st.r, &st.m, 1.0).unwrap(), 0.0);
}

#[test]
fn singular_steady_state_residual() {
    // The stencils reproduce r^{d-2} exactly, so the residual is round-off.
    for dd in [3u32, 5, 10] {
        let d = dim(dd);
        for n in [500usize, 1000] {
            let grid = SolverGrid::new(10.0, n, 0.25).unwrap();
            let r = grid.nodes().to_vec();
            let m: Vec<f64> = r.iter().map(|x| 2.0 * sigma_d(d) * x.powf(d.as_f64() - 2.0)).collect();
            let f = rhs(d, &state(r.clone(), m.clone()));
            // Relative to the size of either term of the equation.
            let worst = (0..r.len() - 1).map(|i| f[i].abs() / (m[i] / (r[i] * r[i]))).fold(0.0, f64::max);
            assert!(worst < 1e-9, "d={dd}, n={n}: {worst:e}");
        }
    }
}

#[test]
fn singular_steady_state_drift() {
    for dd in [3u32, 5] {
        let d = dim(dd);
        let grid = SolverGrid::new(10.0, 2000, 0.25).unwrap();
        let r = grid.nodes().to_vec();
        let m0: Vec<f64> = r.iter().map(|x| 2.0 * sigma_d(d) * x.powf(d.as_f64() - 2.0)).collect();
        let mut st = state(r, m0.clone());
        for _ in 0..100 {
            let dt = if st.dt > 0.0 { st.dt } else { 1.0 };
            st = step(d, &st, dt, 1e-7, 1e-14).unwrap();
        }
        let drift = st.m.iter().zip(&m0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(drift <= 1e-4 * 2.0 * sigma_d(d), "d={dd}: drift {drift:e} after t = {}", st.t);
        assert!(st.t > 0.0);
    }
}

#[test]
fn rhs_matches_exact_time_derivative() {
    let d = dim(3);
    let err = |n: usize| {
        let grid = SolverGrid::new(20.0, n, 0.25).unwrap();
        let r = grid.nodes().to_vec();
        let m: Vec<f64> = r.iter().map(|x| exact_mass(d, *x, 0.0, 1.0)).collect();
        let f = rhs(d, &state(r.clone(), m));
        let scale = r.iter().map(|x| exact_mass_dt(d, *x, 0.0, 1.0)).fold(0.0, f64::max);
        (0..r.len() - 1).map(|i| (f[i] - exact_mass_dt(d, r[i], 0.0, 1.0)).abs()).fold(0.0, f64::max) / scale
    };
    let (a, b) = (err(500), err(1000));
    assert!(a < 1e-3, "{a:e}");
    assert!(a / b > 3.5, "rhs error {a:e} -> {b:e} is not O(h^2)");
}

#[test]
fn exact_solution_is_followed_to_blowup() {
    let d = dim(3);
    let tr = exact_run(4000, vec![0.2, 0.5, 0.7, 0.8]);
    for cp in &tr.checkpoints {
        let e = sup_rel_error(d, cp, &tr.base_grid);
        assert!(e <= 0.01, "t={}: sup relative error {e:e}", cp.t);
    }
    let ev = tr.event.as_ref().expect("blowup detected");
    assert_eq!(ev.trigger, Trigger::OriginDensityCap);
    assert!((ev.detected_time - 1.0).abs() <= 0.05, "detected {}", ev.detected_time);
    assert!(tr.final_state.t <= 1.5);

    let c3 = constant_c(d).unwrap();
    for cp in tr.checkpoints.iter().filter(|c| c.t < 0.75) {
        let w = moment_w(d, &tr.base_grid, &cp.m, 1.0 - cp.t).unwrap();
        let want = c3 / (1.0 - cp.t);
        assert!((w / want - 1.0).abs() <= 0.03, "t={}: W={w} want {want}", cp.t);
    }
}

#[test]
fn exact_solution_grid_convergence() {
    let d = dim(3);
    let errs: Vec<f64> = [1000usize, 2000, 4000]
        .iter()
        .map(|&n| {
            let tr = exact_run(n, vec![0.5]);
            sup_rel_error(d, &tr.checkpoints[0], &tr.base_grid)
        })
        .collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order >= 1.8, "errors {errs:?}: order {order}");
    }
}

#[test]
fn moment_satisfies_riccati_bound_along_blowup() {
    // A supercritical multiple of the exact datum: W(0) > C/T, and the
    // moment must grow at least like the Riccati comparison solution.
    let d = dim(3);
    let c3 = constant_c(d).unwrap();
    let m = mass(&RadialProfile::exact_datum_scaled(d, 1.0, 1.1).unwrap());
    let grid = SolverGrid::new(100.0 * m.characteristic_radius(), 2000, 0.25).unwrap();
    let mut c = Controls::new(1.0);
    c.target_time = Some(1.0);
    c.stride = 100;
    let tr = run(&m, CLASSICAL, grid, &c).unwrap();
    assert!(tr.event.is_some());
    let w0 = tr.samples[0].w.unwrap();
    assert!(w0 > c3, "W(0) = {w0}");
    let pts: Vec<(f64, f64)> = tr.samples.iter().filter_map(|s| s.w.map(|w| (s.t, w))).collect();
    assert!(pts.len() > 20);
    for p in pts.windows(2) {
        let ((t1, w1), (t2, w2)) = (p[0], p[1]);
        if t2 <= t1 {
            continue;
        }
        // For W = C/(T - t) the chord slope is exactly W1·W2/C.
        let slope = (w2 - w1) / (t2 - t1);
        assert!(slope >= 0.95 * w1 * w2 / c3, "t={t1}: slope {slope} vs {}", w1 * w2 / c3);
    }
}

#[test]
fn moment_rejects_past_target() {
    let d = dim(3);
    let st = state(vec![1.0, 2.0, 3.0], vec![1.0, 2.0, 3.0]);
    assert!(matches!(moment_w(d, &st.r, &st.m, 0.0), Err(Error::Domain(_))));
    let mut late = st.clone();
    late.t = 2.0;
    assert!(matches!(moment_w_state(d, &late, 1.0), Err(Error::Domain(_))));
}

/// u(0, t)·t for the forward self-similar solution from η·u_C in d = 3,
/// by shooting the profile ODE from the origin.
fn self_similar_origin_density(eta: f64) -> f64 {
    let d = 3.0f64;
    let sig = 4.0 * std::f64::consts::PI;
    let f = |x: f64, y: [f64; 2]| {
        let (p, dp) = (y[0], y[1]);
        [dp, (d - 1.0) / x * dp - x / 2.0 * dp + (d - 2.0) / 2.0 * p - p * dp * x.powf(1.0 - d) / sig]
    };
    let miss = |u0: f64| {
        let (mut x, h) = (1e-3f64, 1e-3);
        let mut y = [sig * u0 * x.powf(d) / d, sig * u0 * x.powf(d - 1.0)];
        while x < 40.0 {
            let k1 = f(x, y);
            let k2 = f(x + h / 2.0, [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]]);
            let k3 = f(x + h / 2.0, [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]]);
            let k4 = f(x + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
            for j in 0..2 {
                y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            }
            x += h;
        }
        y[0] / x.powf(d - 2.0) / (2.0 * sig) - eta
    };
    let (mut lo, mut hi) = (1.0, 10.0);
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if miss(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn subcritical_singular_datum_is_global() {
    let d = dim(3);
    let m = mass(&RadialProfile::truncated_chandrasekhar(d, 0.9, CLASSICAL, 0.0, 50.0).unwrap());
    let mut c = Controls::new(10.0);
    c.stride = 500;
    let tr = run(&m, CLASSICAL, SolverGrid::new(200.0, 2000, 0.25).unwrap(), &c).unwrap();
    assert!(tr.event.is_none());
    assert_eq!(tr.final_state.t, 10.0);
    let late: Vec<&Sample> = tr.samples.iter().filter(|s| s.t >= 0.5).collect();
    for w in late.windows(2) {
        assert!(w[1].origin_density <= w[0].origin_density * (1.0 + 1e-9));
    }
    // Far from the truncation the solution is the forward self-similar one.
    let u0 = self_similar_origin_density(0.9);
    for s in tr.samples.iter().filter(|s| s.t >= 1.0 && s.t <= 5.0) {
        let got = s.origin_density * s.t;
        assert!((got / u0 - 1.0).abs() < 0.03, "t={}: t·u(0)={got}, self-similar {u0}", s.t);
    }
    let total = m.total_mass().unwrap();
    assert!((tr.final_state.m.last().unwrap() - total).abs() <= 1e-6 * total);
}

#[test]
fn supercritical_shell_blows_up_before_criterion_time() {
    let d = dim(3);
    let n = threshold_n(d, CLASSICAL).unwrap();
    let p = RadialProfile::shell(d, 1.05 * n, 1.0).unwrap();
    let t_star = classify(&p, CLASSICAL).unwrap().verdict.blowup_time().expect("criterion fires");
    let m = mass(&p);
    let c = Controls::new(2.0 * t_star);
    let tr = run(&m, CLASSICAL, SolverGrid::new(100.0, 4000, 0.25).unwrap(), &c).unwrap();
    let t = tr.blowup_time().expect("shell blows up");
    assert!(t <= 1.2 * t_star, "blowup at {t}, criterion {t_star}");
    assert_eq!(tr.samples[0].origin_density, 0.0);
    let total = 1.05 * n;
    assert!((tr.final_state.m.last().unwrap() - total).abs() <= 1e-6 * total);
}

#[test]
fn blowup_time_is_insensitive_to_thresholds() {
    let d = dim(3);
    let m = mass(&RadialProfile::gaussian(d, 150.0, 1.0).unwrap());
    let grid = SolverGrid::new(100.0, 2000, 0.25).unwrap();
    let base = run(&m, CLASSICAL, grid.clone(), &Controls::new(5.0)).unwrap();
    let t0 = base.blowup_time().expect("large Gaussian blows up");
    let mut c = Controls::new(5.0);
    c.density_cap = Some(2.0 * base.density_cap);
    c.dt_floor = Some(0.5e-12 * 5.0);
    let t1 = run(&m, CLASSICAL, grid, &c).unwrap().blowup_time().unwrap();
    assert!((t1 / t0 - 1.0).abs() < 0.02, "{t0} vs {t1}");
}

#[test]
fn blowup_time_scales_with_datum() {
    let d = dim(3);
    let p = RadialProfile::gaussian(d, 150.0, 1.0).unwrap();
    let time = |p: &RadialProfile| {
        let m = mass(p);
        let grid = SolverGrid::new(100.0 * m.characteristic_radius(), 2000, 0.25).unwrap();
        run(&m, CLASSICAL, grid, &Controls::new(20.0 * m.characteristic_radius().powi(2)))
            .unwrap()
            .blowup_time()
            .unwrap()
    };
    let t1 = time(&p);
    for lambda in [0.5, 2.0] {
        let t = time(&p.scaled(lambda, CLASSICAL).unwrap());
        let want = t1 / (lambda * lambda);
        assert!((t / want - 1.0).abs() < 0.05, "lambda={lambda}: {t} vs {want}");
    }
}

#[test]
fn comparison_keeps_order() {
    let d = dim(3);
    let grid = SolverGrid::new(200.0, 1500, 0.25).unwrap();
    let trunc = |eta: f64| mass(&RadialProfile::truncated_chandrasekhar(d, eta, CLASSICAL, 0.0, 50.0).unwrap());

    let rep = comparison_check(&MassProfile::zero(d), &trunc(0.9), grid.clone(), &Controls::new(5.0)).unwrap();
    assert!(rep.ordered && rep.times.len() == 20);

    let rep = comparison_check(&trunc(0.5), &trunc(0.9), grid, &Controls::new(10.0)).unwrap();
    assert!(rep.ordered, "{:?}", rep.first_violation);
    assert_eq!(*rep.times.last().unwrap(), 10.0);

    let n = threshold_n(d, CLASSICAL).unwrap();
    let shell = |k: f64| mass(&RadialProfile::shell(d, k * n, 1.0).unwrap());
    let rep =
        comparison_check(&shell(1.0), &shell(2.0), SolverGrid::new(50.0, 1500, 0.25).unwrap(), &Controls::new(1.0))
            .unwrap();
    assert!(rep.ordered, "{:?}", rep.first_violation);
    assert!(rep.high.event.is_some(), "heavier shell should blow up");
    assert!(!rep.times.is_empty());
}

#[test]
fn comparison_rejects_unordered_data() {
    let d = dim(3);
    let a = mass(&RadialProfile::shell(d, 2.0, 1.0).unwrap());
    let b = mass(&RadialProfile::shell(d, 1.0, 1.0).unwrap());
    let r = comparison_check(&a, &b, SolverGrid::new(10.0, 200, 0.25).unwrap(), &Controls::new(0.1));
    assert!(matches!(r, Err(Error::Domain(_))));
}

#[test]
fn truncation_time_scales_like_radius_squared() {
    let d = dim(3);
    let mut c = Controls::new(50.0);
    c.stride = 0;
    let grid = SolverGrid::new(100.0, 2000, 0.25).unwrap();
    let rep = truncation_scaling(d, 4.0, &[0.25, 0.5, 1.0], &grid, &c).unwrap();
    let fit = rep.fit.expect("every truncation blows up");
    assert!((1.6..=2.4).contains(&fit.exponent), "{fit:?}");
    for w in rep.runs.windows(2) {
        let ratio = w[1].blowup_time.unwrap() / w[0].blowup_time.unwrap();
        assert!((ratio / 4.0 - 1.0).abs() < 0.05, "ratio {ratio}");
    }
    assert!(matches!(truncation_scaling(d, 4.0, &[1.0], &grid, &c), Err(Error::Domain(_))));
}

#[test]
fn power_fit_recovers_exponent() {
    let x = [1.0, 2.0, 4.0, 8.0];
    let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(1.7)).collect();
    let f = power_fit(&x, &y).unwrap();
    assert!((f.exponent - 1.7).abs() < 1e-12 && (f.prefactor - 3.0).abs() < 1e-12);
    assert!(power_fit(&x[..2], &y[..2]).is_err());
}

#[test]
fn fractional_runs_are_rejected() {
    let d = dim(3);
    let m = mass(&RadialProfile::gaussian(d, 1.0, 1.0).unwrap());
    let r = run(&m, FracOrder::new(1.5).unwrap(), SolverGrid::new(10.0, 100, 0.25).unwrap(), &Controls::new(1.0));
    assert!(matches!(r, Err(Error::Domain(_))));
}

#[test]
fn infinite_mass_runs_carry_a_warning() {
    let d = dim(3);
    let m = mass(&RadialProfile::chandrasekhar(d, 0.5, CLASSICAL).unwrap());
    let tr = run(&m, CLASSICAL, SolverGrid::new(10.0, 200, 0.25).unwrap(), &Controls::new(0.01)).unwrap();
    assert_eq!(tr.warnings.len(), 1);
    let g = mass(&RadialProfile::gaussian(d, 1.0, 1.0).unwrap());
    let tr = run(&g, CLASSICAL, SolverGrid::new(10.0, 200, 0.25).unwrap(), &Controls::new(0.01)).unwrap();
    assert!(tr.warnings.is_empty());
}

#[test]
fn grid_contains_breakpoints() {
    let g = SolverGrid::new(10.0, 100, 0.25).unwrap().with_breakpoints(&[1.2345, 7.0]);
    assert!(g.nodes().contains(&1.2345) && g.nodes().contains(&7.0));
    assert!(g.nodes().windows(2).all(|w| w[1] > w[0]));
    assert!(SolverGrid::new(10.0, 3, 0.25).is_err());
}

#[test]
fn runs_are_deterministic() {
    let d = dim(3);
    let m = mass(&RadialProfile::gaussian(d, 60.0, 1.0).unwrap());
    let go = || run(&m, CLASSICAL, SolverGrid::new(30.0, 400, 0.25).unwrap(), &Controls::new(0.5)).unwrap();
    assert_eq!(go(), go());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn accepted_states_stay_monotone(total in 5.0f64..200.0, width in 0.3f64..3.0) {
        let d = dim(3);
        let m = mass(&RadialProfile::gaussian(d, total, width).unwrap());
        let mut c = Controls::new(0.5 * width * width);
        c.checkpoints = (1..=5).map(|k| c.t_end * k as f64 / 5.0).collect();
        let tr = run(&m, CLASSICAL, SolverGrid::new(30.0 * width, 400, 0.25).unwrap(), &c).unwrap();
        for cp in &tr.checkpoints {
            assert_monotone(&cp.m, 1e-10 * total);
        }
        assert_monotone(&tr.final_state.m, 1e-10 * total);
        prop_assert!((tr.final_state.m.last().unwrap() - total).abs() <= 1e-6 * total);
    }
}
