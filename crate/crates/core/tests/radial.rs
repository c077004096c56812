use core::f64::consts::PI;

use ksblow_core::radial::*;
use ksblow_core::special::gamma;
use ksblow_core::Error;
use proptest::prelude::*;

fn dim(d: u32) -> Dimension {
    Dimension::new(d).unwrap()
}

fn alpha(a: f64) -> FracOrder {
    FracOrder::new(a).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

const TWO: FracOrder = FracOrder::CLASSICAL;

#[test]
fn type_invariants() {
    assert!(Dimension::new(1).is_err());
    assert!(Dimension::new(201).is_err());
    assert!(Dimension::new(61).unwrap().precision_warning());
    let e = FracOrder::new(2.5).unwrap_err();
    assert_eq!(e.to_string(), "alpha must be in (0,2] (got 2.5)");
    assert!(FracOrder::new(0.0).is_err());
    assert!(s_alpha_d(dim(3), alpha(1.5)).is_err());
    assert!(s_alpha_d(dim(2), TWO).is_err());
}

#[test]
fn sphere_areas() {
    assert!(rel(sigma_d(dim(2)), 2.0 * PI) < 1e-15);
    assert!(rel(sigma_d(dim(3)), 4.0 * PI) < 1e-15);
    assert!(rel(sigma_d(dim(4)), 2.0 * PI * PI) < 1e-15);
    for d in 2..=30 {
        assert!(rel(sigma_d(dim(d)), sigma_d_direct(dim(d))) < 1e-12, "d={d}");
    }
    assert!(sigma_d(dim(200)).is_finite() && sigma_d(dim(200)) > 0.0);
}

#[test]
fn stationary_coefficient() {
    for d in [3.0, 5.0, 10.0, 40.0] {
        assert!(rel(s_alpha_d_formula(d, 2.0), 2.0 * (d - 2.0)) < 1e-13);
    }
    // Γ(2)Γ(1)/(Γ(3/2)Γ(1/2))·2 = 4/π.
    let direct = 2.0 * gamma(2.0) * gamma(1.0) / (gamma(1.5) * gamma(0.5));
    assert!(rel(s_alpha_d(dim(3), alpha(1.0)).unwrap(), direct) < 1e-14);
    assert!(rel(direct, 4.0 / PI) < 1e-14);
    // Large-d behaviour 2^{α/2}Γ(α)/Γ(α/2)·d^{α/2}, tightening with d.
    let asym = |d: f64, a: f64| 2f64.powf(a / 2.0) * gamma(a) / gamma(a / 2.0) * d.powf(a / 2.0);
    let mut last = f64::INFINITY;
    for d in [10u32, 40, 160] {
        let ratio = s_alpha_d(dim(d), alpha(1.0)).unwrap() / asym(d as f64, 1.0);
        assert!((ratio - 1.0).abs() < 0.25, "d={d} ratio={ratio}");
        assert!((ratio - 1.0).abs() < last);
        last = (ratio - 1.0).abs();
    }
}

#[test]
fn densities() {
    let uc = RadialProfile::chandrasekhar(dim(3), 1.0, TWO).unwrap();
    assert_eq!(uc.density(1.0).unwrap(), 2.0);
    assert_eq!(uc.density(0.0).unwrap(), f64::INFINITY);
    assert!(uc.is_singular());
    // Origin density of the explicit blowup datum is 2d/((d-2)T).
    let ex = RadialProfile::exact_datum(dim(3), 1.0).unwrap();
    assert!(rel(ex.density(0.0).unwrap(), 6.0) < 1e-15);
    let ex = RadialProfile::exact_datum(dim(6), 0.5).unwrap();
    assert!(rel(ex.density(0.0).unwrap(), 6.0) < 1e-15);
    let g = RadialProfile::gaussian(dim(3), 5.0, 1.0).unwrap();
    assert_eq!(g.density(50.0).unwrap(), 0.0);
    let sh = RadialProfile::shell(dim(3), 1.0, 1.0).unwrap();
    assert_eq!(sh.density(1.0), Err(Error::Measure));
    let t = RadialProfile::tabulated(dim(3), vec![1.0, 2.0], vec![1.0, 3.0]).unwrap();
    assert_eq!(t.density(1.5).unwrap(), 2.0);
    assert_eq!(t.density(0.5).unwrap(), 1.0);
    assert_eq!(t.density(2.5).unwrap(), 0.0);
    assert!(RadialProfile::tabulated(dim(3), vec![0.0, 1.0], vec![1.0, 1.0]).is_err());
    assert!(RadialProfile::tabulated(dim(3), vec![1.0, 1.0], vec![1.0, 1.0]).is_err());
}

#[test]
fn closed_form_mass_functions() {
    for d in [3u32, 4, 7] {
        let s = sigma_d(dim(d));
        let m = mass_from_density(&RadialProfile::chandrasekhar(dim(d), 1.0, TWO).unwrap()).unwrap();
        for r in [0.3f64, 1.0, 4.0] {
            assert!(rel(m.eval(r), 2.0 * s * r.powi(d as i32 - 2)) < 1e-14);
        }
        assert_eq!(m.total_mass(), None);
        let m = mass_from_density(&RadialProfile::exact_datum(dim(d), 0.7).unwrap()).unwrap();
        for r in [0.3f64, 1.0, 4.0] {
            let want = 4.0 * s * r.powi(d as i32) / (r * r + 2.0 * (d as f64 - 2.0) * 0.7);
            assert!(rel(m.eval(r), want) < 1e-14);
        }
    }
    let m = mass_from_density(&RadialProfile::shell(dim(3), 2.0, 1.0).unwrap()).unwrap();
    assert_eq!((m.eval(0.999), m.eval(1.0), m.eval(5.0)), (0.0, 2.0, 2.0));
}

fn smooth_profiles() -> Vec<RadialProfile> {
    let d3 = dim(3);
    let r: Vec<f64> = (1..=200).map(|i| 0.05 * i as f64).collect();
    let u: Vec<f64> = r.iter().map(|x| 1.0 / (1.0 + x * x)).collect();
    vec![
        RadialProfile::gaussian(d3, 3.0, 1.3).unwrap(),
        RadialProfile::gaussian(dim(6), 3.0, 0.8).unwrap(),
        RadialProfile::exact_datum(d3, 1.0).unwrap(),
        RadialProfile::truncated_chandrasekhar(d3, 0.9, TWO, 0.0, 50.0).unwrap(),
        RadialProfile::truncated_chandrasekhar(dim(5), 1.2, alpha(1.0), 0.5, 20.0).unwrap(),
        RadialProfile::chandrasekhar(dim(5), 1.0, alpha(1.5)).unwrap(),
        RadialProfile::tabulated(d3, r, u).unwrap(),
    ]
}

#[test]
fn mass_matches_independent_quadrature() {
    for p in smooth_profiles() {
        let m = mass_from_density(&p).unwrap();
        for r in [0.05, 0.4, 1.0, 3.3, 9.0, 30.0] {
            let q = mass_by_quadrature(&p, r).unwrap_or_else(|e| panic!("{:?} r={r}: {e}", p.kind()));
            assert!(m.eval(r) == q || rel(m.eval(r), q) < 1e-11, "{:?} r={r}: {} vs {q}", p.kind(), m.eval(r));
        }
    }
}

#[test]
fn density_recovered_from_mass_derivative() {
    for p in smooth_profiles() {
        let m = mass_from_density(&p).unwrap();
        let d = p.dimension().as_f64();
        let s = sigma_d(p.dimension());
        for i in 0..=20 {
            let r = 0.1 * 100f64.powf(i as f64 / 20.0);
            let h = 1e-3 * r;
            let f = |k: f64| m.eval(r + k * h);
            let mp = (f(-2.0) - 8.0 * f(-1.0) + 8.0 * f(1.0) - f(2.0)) / (12.0 * h);
            let u = p.density(r).unwrap();
            let kink = m.breakpoints().iter().any(|b| (b - r).abs() < 3.0 * h);
            // Differencing M cannot see a density far below the ball average.
            let visible = s * r.powf(d) * u > 1e-6 * m.eval(r);
            if u > 0.0 && visible && !kink {
                let back = mp / (s * r.powf(d - 1.0));
                assert!(rel(back, u) < 1e-6, "{:?} r={r}: {back} vs {u}", p.kind());
            }
        }
    }
}

#[test]
fn concentration_examples() {
    for d in [3u32, 5, 8] {
        let s = sigma_d(dim(d));
        let m = mass_from_density(&RadialProfile::chandrasekhar(dim(d), 1.0, TWO).unwrap()).unwrap();
        let c = radial_concentration(&m, TWO).unwrap();
        assert!(rel(c.value, 2.0 * s) < 1e-14);
        assert_eq!(c.attained, Attained::Everywhere);
        let m = mass_from_density(&RadialProfile::exact_datum(dim(d), 1.0).unwrap()).unwrap();
        let c = radial_concentration(&m, TWO).unwrap();
        assert!(rel(c.value, 4.0 * s) < 1e-14);
        assert_eq!(c.attained, Attained::Infinity);
    }
    let m = mass_from_density(&RadialProfile::shell(dim(3), 7.0, 1.0).unwrap()).unwrap();
    let c = radial_concentration(&m, TWO).unwrap();
    assert_eq!(c.value, 7.0);
    assert_eq!(c.attained, Attained::Radius(1.0));
    // u_C at the wrong order is not in the Morrey class.
    let m = mass_from_density(&RadialProfile::chandrasekhar(dim(5), 1.0, TWO).unwrap()).unwrap();
    assert!(matches!(radial_concentration(&m, alpha(1.0)), Err(Error::Divergent(_))));
}

#[test]
fn exact_datum_fractional_concentration_matches_scan() {
    // Closed-form maximizer vs scanning the tabulated equivalent.
    let p = RadialProfile::exact_datum(dim(5), 1.0).unwrap();
    let m = mass_from_density(&p).unwrap();
    let a = alpha(1.2);
    let c = radial_concentration(&m, a).unwrap();
    let rs: Vec<f64> = ksblow_core::quad::geometric(1e-3, 1e3, 400);
    let ms: Vec<f64> = rs.iter().map(|&r| m.eval(r)).collect();
    let tab = MassProfile::from_samples(dim(5), &rs, &ms, true).unwrap();
    let c2 = radial_concentration(&tab, a).unwrap();
    // Limited by the cubic interpolation between samples.
    assert!(rel(c.value, c2.value) < 1e-6);
}

#[test]
fn ball_mass_shell_three_d_closed_form() {
    // In d = 3 a sphere of radius 1 is cut by B(x, R) in the area fraction
    // (1-κ)/2 with κ = (1 + c² - R²)/(2c).
    let m = mass_from_density(&RadialProfile::shell(dim(3), 1.0, 1.0).unwrap()).unwrap();
    for (c, r) in [(0.5, 0.8), (0.5, 1.2), (2.0, 1.5), (1.0, 0.3)] {
        let kappa: f64 = (1.0 + c * c - r * r) / (2.0 * c);
        let want = (0.5 * (1.0 - kappa)).clamp(0.0, 1.0);
        let got = concentration_ball(&m, c, r);
        assert!((got - want).abs() < 1e-10, "c={c} R={r}: {got} vs {want}");
    }
}

fn concentration_ball(m: &MassProfile, c: f64, r: f64) -> f64 {
    ksblow_core::radial::ball_mass(m, c, r).unwrap()
}

#[test]
fn ball_mass_gaussian_two_d_matches_cartesian_sum() {
    let p = RadialProfile::gaussian(dim(2), 1.0, 1.0).unwrap();
    let m = mass_from_density(&p).unwrap();
    let (c, r) = (0.7, 0.9);
    let n = 2000;
    let h = 2.0 * r / n as f64;
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            let x = -r + (i as f64 + 0.5) * h;
            let y = -r + (j as f64 + 0.5) * h;
            if x * x + y * y < r * r {
                sum += p.density(((x + c).powi(2) + y * y).sqrt()).unwrap() * h * h;
            }
        }
    }
    let got = concentration_ball(&m, c, r);
    assert!(rel(got, sum) < 1e-3, "{got} vs {sum}");
}

#[test]
fn morrey_examples() {
    let uc = RadialProfile::chandrasekhar(dim(3), 1.0, TWO).unwrap();
    let e = morrey_estimate(&uc, TWO, 5).unwrap();
    assert!(e.value >= 2.0 * sigma_d(dim(3)) * (1.0 - 1e-12));
    assert!(e.estimate_only);
    let sh = RadialProfile::shell(dim(3), 3.0, 1.0).unwrap();
    assert!(morrey_estimate(&sh, TWO, 5).unwrap().value >= 3.0);
    let g = RadialProfile::gaussian(dim(3), 2.0, 1.0).unwrap();
    let mut last = 0.0;
    for k in [1, 2, 4, 7] {
        let v = morrey_estimate(&g, TWO, k).unwrap().value;
        assert!(v >= last);
        last = v;
    }
}

#[test]
fn potential_gradient_examples() {
    let s = sigma_d(dim(3));
    let m = mass_from_density(&RadialProfile::chandrasekhar(dim(3), 1.0, TWO).unwrap()).unwrap();
    for r in [0.1, 1.0, 7.0] {
        assert!(rel(potential_gradient_radial(&m, r), -2.0) < 1e-14);
    }
    let m = mass_from_density(&RadialProfile::shell(dim(3), 5.0, 1.0).unwrap()).unwrap();
    assert_eq!(potential_gradient_radial(&m, 0.5), 0.0);
    assert!(rel(potential_gradient_radial(&m, 2.0), -5.0 / (2.0 * s)) < 1e-15);
}

fn any_profile() -> impl Strategy<Value = (RadialProfile, FracOrder)> {
    let d = 3u32..9;
    (d, 0usize..7, 0.2f64..3.0, 0.3f64..2.0, 0.6f64..1.9).prop_map(|(d, k, x, y, a)| {
        let dd = dim(d);
        let fa = if 2.0 * a < d as f64 { alpha(a) } else { TWO };
        let p = match k {
            0 => RadialProfile::chandrasekhar(dd, x, TWO).unwrap(),
            1 => RadialProfile::truncated_chandrasekhar(dd, x, TWO, y, 10.0 * y).unwrap(),
            2 => RadialProfile::gaussian(dd, x, y).unwrap(),
            3 => RadialProfile::shell(dd, x, y).unwrap(),
            4 => RadialProfile::exact_datum(dd, y).unwrap(),
            5 => RadialProfile::truncated_chandrasekhar(dd, x, fa, y, f64::INFINITY).unwrap(),
            _ => {
                let r: Vec<f64> = (1..=60).map(|i| y * 0.1 * i as f64).collect();
                let u: Vec<f64> = r.iter().map(|t| x * (-t * t / (y * y)).exp()).collect();
                RadialProfile::tabulated(dd, r, u).unwrap()
            }
        };
        let order = if k == 0 { TWO } else { fa };
        (p, order)
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn concentration_is_scale_invariant((p, a) in any_profile(), ll in -3.0f64..3.0) {
        let lambda = 10f64.powf(ll);
        let m0 = mass_from_density(&p).unwrap();
        let m1 = mass_from_density(&p.scaled(lambda, a).unwrap()).unwrap();
        match (radial_concentration(&m0, a), radial_concentration(&m1, a)) {
            (Ok(c0), Ok(c1)) => prop_assert!(rel(c1.value, c0.value) < 1e-9, "{} vs {}", c0.value, c1.value),
            (Err(_), Err(_)) => {}
            (x, y) => prop_assert!(false, "{x:?} vs {y:?}"),
        }
    }

    #[test]
    fn morrey_dominates_centered((p, a) in any_profile(), k in 1usize..4) {
        let m = mass_from_density(&p).unwrap();
        if let Ok(c) = radial_concentration(&m, a) {
            let e = morrey_estimate(&p, a, k).unwrap();
            prop_assert!(e.value >= c.value);
        }
    }

    #[test]
    fn potential_gradient_nonpositive_and_monotone(
        (p, _a) in any_profile(), f in 1.0f64..3.0, r in 0.01f64..50.0
    ) {
        let m = mass_from_density(&p).unwrap();
        let bigger = mass_from_density(&p.scaled(1.0, FracOrder::CLASSICAL).unwrap()).unwrap();
        let g = potential_gradient_radial(&m, r);
        prop_assert!(g <= 0.0);
        // M₂ = f·M ≥ M pointwise.
        let scaled = MassProfile::new(m.dimension(), match m.shape() {
            MassShape::Step { mass, radius } => MassShape::Step { mass: mass * f, radius: *radius },
            MassShape::Gaussian { mass, width } => MassShape::Gaussian { mass: mass * f, width: *width },
            MassShape::Exact { amplitude, blowup_time } => MassShape::Exact { amplitude: amplitude * f, blowup_time: *blowup_time },
            other => other.clone(),
        });
        prop_assert!(potential_gradient_radial(&scaled, r) <= g);
        prop_assert_eq!(potential_gradient_radial(&bigger, r), g);
    }
}
