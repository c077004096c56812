use std::fs;
use std::path::Path;

use clap::Parser;
use ksblow::commands::{constants_csv, constants_table, trajectory_csv, Summary};
use ksblow::config::{Command, Format, RunConfig};
use ksblow::error::{CliError, EXIT_ACCEPTANCE, EXIT_INPUT, EXIT_NUMERICAL, EXIT_OK};
use ksblow::profile::ProfileSpec;
use ksblow::verify::{run_verify, VerifyOptions};
use ksblow::{main_with, Cli};
use ksblow_core::radial::{Dimension, FracOrder, MassProfile};
use ksblow_core::solver::{Controls, SimState, SolverGrid, Trajectory};

fn cli(args: &[&str]) -> i32 {
    main_with(std::iter::once("ksblow").chain(args.iter().copied()))
}

fn resolved(args: &[&str]) -> Result<RunConfig, CliError> {
    let c = Cli::try_parse_from(std::iter::once("ksblow").chain(args.iter().copied())).unwrap();
    let (cmd, common, flags) = c.command.split();
    let file = match &common.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    flags.over(file).resolve(cmd)
}

fn read(p: &Path) -> String {
    fs::read_to_string(p).unwrap()
}

#[test]
fn profile_grammar() {
    let cases = [
        ("chandrasekhar(eta=2.5)", ProfileSpec::Chandrasekhar { eta: 2.5 }),
        ("shell(N=30.0,R=1.0)", ProfileSpec::Shell { mass: 30.0, radius: 1.0 }),
        (
            "trunc_chandrasekhar(eta=2.5,rin=1.0,rout=50.0)",
            ProfileSpec::TruncChandrasekhar { eta: 2.5, rin: 1.0, rout: 50.0 },
        ),
        (" gauss( mass = 25.13 , width=1.0 ) ", ProfileSpec::Gauss { mass: 25.13, width: 1.0 }),
        ("exact_datum(T=1.0)", ProfileSpec::ExactDatum { blowup_time: 1.0, amp: 1.0 }),
        ("table(path=data/u.csv)", ProfileSpec::Table { path: "data/u.csv".into() }),
        (
            "trunc_chandrasekhar(eta=4,rin=0.5)",
            ProfileSpec::TruncChandrasekhar { eta: 4.0, rin: 0.5, rout: f64::INFINITY },
        ),
    ];
    for (text, want) in cases {
        let got = ProfileSpec::parse(text).unwrap();
        assert_eq!(got, want, "{text}");
        assert_eq!(ProfileSpec::parse(&got.to_string()).unwrap(), got);
    }
    for bad in ["shell(N=1)", "shell(N=1,R=1,Q=2)", "blob(x=1)", "gauss(mass=a,width=1)", "gauss", "shell(N=1,N=2,R=1)"]
    {
        assert!(matches!(ProfileSpec::parse(bad), Err(CliError::Config(_))), "{bad}");
    }
}

#[test]
fn table_profiles_are_read_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.csv");
    fs::write(&path, "r,u\n# comment\n0.5,2.0\n1.0,1.0\n2.0,0.0\n").unwrap();
    let spec = ProfileSpec::parse(&format!("table(path={})", path.display())).unwrap();
    let p = spec.build(Dimension::new(3).unwrap(), FracOrder::CLASSICAL).unwrap();
    assert_eq!(p.density(0.75).unwrap(), 1.5);
    assert_eq!(spec.support().unwrap(), Some(2.0));
    fs::write(&path, "0.5,2.0\n1.0,x\n").unwrap();
    assert!(spec.build(Dimension::new(3).unwrap(), FracOrder::CLASSICAL).is_err());
}

#[test]
fn classify_flags_make_a_valid_config() {
    let c = resolved(&["classify", "--d", "3", "--alpha", "2", "--profile", "chandrasekhar(eta=2.5)"]).unwrap();
    assert_eq!(c.command, Some(Command::Classify));
    assert_eq!((c.problem.d, c.problem.alpha), (Some(3), Some(2.0)));
    assert_eq!(c.initial.profile.as_deref(), Some("chandrasekhar(eta=2.5)"));
    assert_eq!(c.format(), Format::Csv);
}

#[test]
fn invalid_orders_are_rejected() {
    assert_eq!(cli(&["classify", "--alpha", "2.5", "--profile", "shell(N=1,R=1)"]), EXIT_INPUT);
    let spec = ProfileSpec::parse("shell(N=1,R=1)").unwrap();
    let err =
        ksblow::commands::classify_report(&spec, Dimension::new(3).unwrap(), FracOrder::new(1.5).unwrap()).unwrap_err();
    assert!(err.to_string().contains("2*alpha < d"), "{err}");
    assert_eq!(err.exit_code(), EXIT_INPUT);
    match FracOrder::new(2.5) {
        Err(e) => assert!(e.to_string().contains("alpha must be in (0,2]")),
        Ok(_) => panic!("accepted alpha = 2.5"),
    }
    assert_eq!(cli(&["simulate", "--alpha", "1.5", "--profile", "shell(N=1,R=1)"]), EXIT_INPUT);
}

#[test]
fn config_files_are_validated_with_key_paths() {
    let dir = tempfile::tempdir().unwrap();
    let bad_key = dir.path().join("a.toml");
    fs::write(&bad_key, "[grid]\nr_max = 10.0\nnodes = 5\n").unwrap();
    let err = RunConfig::from_file(&bad_key).unwrap_err().to_string();
    assert!(err.contains("grid") && err.contains("nodes"), "{err}");

    let bad_type = dir.path().join("b.toml");
    fs::write(&bad_type, "[problem]\nd = \"three\"\n").unwrap();
    let err = RunConfig::from_file(&bad_type).unwrap_err().to_string();
    assert!(err.contains("problem.d"), "{err}");

    let json = dir.path().join("c.json");
    fs::write(&json, r#"{"time": {"t_end": "soon"}}"#).unwrap();
    let err = RunConfig::from_file(&json).unwrap_err().to_string();
    assert!(err.contains("time.t_end"), "{err}");

    let wrong = dir.path().join("d.toml");
    fs::write(&wrong, "command = \"kernel\"\n").unwrap();
    let p = wrong.to_str().unwrap();
    assert!(resolved(&["constants", "--config", p]).is_err());
    assert_eq!(cli(&["constants", "--config", p]), EXIT_INPUT);
    assert_eq!(cli(&["constants", "--config", "/nonexistent/k.toml"]), EXIT_INPUT);
}

#[test]
fn flags_override_file_override_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("run.toml");
    fs::write(
        &f,
        "[problem]\nd = 5\n[initial]\nprofile = \"gauss(mass=1,width=1)\"\n[grid]\nn = 300\n[time]\nt_end = 2.0\n",
    )
    .unwrap();
    let c = resolved(&["simulate", "--config", f.to_str().unwrap(), "--n", "500"]).unwrap();
    assert_eq!(c.problem.d, Some(5));
    assert_eq!(c.grid.n, Some(500));
    assert_eq!(c.time.t_end, Some(2.0));
    assert_eq!(c.grid.inner_fraction, Some(0.25));
    assert_eq!(c.output.stride, Some(50));
}

#[test]
fn constants_table_has_fixed_header() {
    let rows = constants_table(&[2, 3, 4, 5, 6], &[2.0]).unwrap();
    let csv = constants_csv(&rows);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[0], "d,alpha,sigma_d,C,K,L,N_threshold,upper_bound");
    assert!(lines[1].starts_with("2,2.0,") && lines[1].ends_with(",,,,"));
    let c3: f64 = lines[2].split(',').nth(3).unwrap().parse().unwrap();
    assert_eq!(c3, rows[1].c);
}

#[test]
fn outputs_are_byte_deterministic_and_resolved_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let args = ["simulate", "--profile", "gauss(mass=150,width=1)", "--n", "400", "--t-end", "0.3", "--stride", "20"];
    let mut first: Vec<&str> = args.to_vec();
    first.extend(["--out", a.to_str().unwrap()]);
    assert_eq!(cli(&first), EXIT_OK);
    let res = a.join("resolved.json");
    assert_eq!(cli(&["simulate", "--config", res.to_str().unwrap(), "--out", b.to_str().unwrap()]), EXIT_OK);
    for name in ["trajectory.csv", "summary.json", "trajectory.svg"] {
        assert_eq!(read(&a.join(name)), read(&b.join(name)), "{name}");
    }
    let ra: RunConfig = serde_json::from_str(&read(&res)).unwrap();
    let mut rb: RunConfig = serde_json::from_str(&read(&b.join("resolved.json"))).unwrap();
    rb.output.path = ra.output.path.clone();
    assert_eq!(ra, rb);
    assert_eq!(ra.grid.r_max, Some(100.0));
    assert_eq!(ra.time.dt_floor, Some(0.3e-12));

    let csv = read(&a.join("trajectory.csv"));
    assert!(csv.starts_with(
        "t,dt,origin_density,W,M_probe_1,M_probe_2,M_probe_3,M_probe_4,M_probe_5,M_probe_6,blowup_flag\n"
    ));
    let summary: serde_json::Value = serde_json::from_str(&read(&a.join("summary.json"))).unwrap();
    assert_eq!(summary["total_mass"], 150.0);
    assert!(read(&a.join("trajectory.svg")).contains("<polyline"));
}

#[test]
fn moment_column_is_filled_with_a_target_time() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w");
    let code = cli(&[
        "simulate",
        "--profile",
        "exact_datum(T=1.0)",
        "--n",
        "400",
        "--T-target",
        "1.0",
        "--t-end",
        "0.2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    let csv = read(&out.join("trajectory.csv"));
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    let w: f64 = row[3].parse().unwrap();
    assert!((w - 1.311359084837597).abs() < 0.03, "W(0) = {w}");
}

#[test]
fn empty_trajectory_gives_header_only_csv() {
    let d = Dimension::new(3).unwrap();
    let state = SimState { r: vec![], m: vec![], t: 0.0, dt: 0.0, origin_density: 0.0, event: None };
    let tr = Trajectory {
        d: 3,
        base_grid: vec![],
        initial: vec![],
        probes: vec![1.0, 2.0],
        samples: vec![],
        checkpoints: vec![],
        final_state: state,
        event: None,
        density_cap: 1e8,
        initial_origin_density: 0.0,
        steps: 0,
        rejected: 0,
        refinements: 0,
        warnings: vec![],
    };
    assert_eq!(trajectory_csv(&tr), "t,dt,origin_density,W,M_probe_1,M_probe_2,blowup_flag\n");
    let plan = ksblow::commands::SimulationPlan {
        profile: "none".into(),
        datum: MassProfile::zero(d),
        grid: SolverGrid::new(1.0, 8, 0.5).unwrap(),
        controls: Controls::new(1.0),
    };
    let json = serde_json::to_string(&Summary::new(&plan, &tr)).unwrap();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["samples"], 0);
    assert!(v["event"].is_null());
}

#[test]
fn classify_writes_report_curve_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c");
    let code = cli(&["classify", "--profile", "shell(N=100,R=1)", "--format", "json", "--out", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let rep: serde_json::Value = serde_json::from_str(&read(&out.join("report.json"))).unwrap();
    assert_eq!(rep["verdict"]["kind"], "BlowupBy");
    assert_eq!(rep["curve"]["path"], "curve.csv");
    assert!(rep["margins"]["blowup_margin"].as_f64().unwrap() > 0.0);
    let curve = read(&out.join("curve.csv"));
    assert!(curve.starts_with("T,TW\n"));
    assert_eq!(curve.lines().count() as u64, rep["curve"]["points"].as_u64().unwrap() + 1);
    assert!(read(&out.join("curve.svg")).contains("<svg"));
}

#[test]
fn kernel_emits_table_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k");
    assert_eq!(cli(&["kernel", "--d", "3", "--alpha", "1", "--out", out.to_str().unwrap()]), EXIT_OK);
    let csv = read(&out.join("kernel.csv"));
    assert!(csv.starts_with("rho,R,Rp,Rpp\n"));
    assert_eq!(csv.lines().count(), 7 * 48 + 2);
    let side: serde_json::Value = serde_json::from_str(&read(&out.join("kernel.json"))).unwrap();
    assert_eq!(side["passed"], true);
    assert!(side["validation"]["mass_residual"].as_f64().unwrap().abs() < 1e-6);
    let coarse = dir.path().join("coarse");
    let code =
        cli(&["kernel", "--rho-min", "1", "--rho-max", "100", "--per-decade", "4", "--out", coarse.to_str().unwrap()]);
    assert_eq!(code, EXIT_NUMERICAL);
    assert!(coarse.join("kernel.json").exists());
}

#[test]
fn verify_runs_single_items_and_reports_failures() {
    let one = run_verify(&VerifyOptions { only: vec!["AC-5".into()], perturb_c2: 0.0 }, |_| {}).unwrap();
    assert_eq!(one.len(), 1);
    assert_eq!(one[0].id, "AC-5");
    assert!(one[0].passed, "{}", one[0].line());

    let bad = run_verify(&VerifyOptions { only: vec!["AC-1".into()], perturb_c2: 1e-6 }, |_| {}).unwrap();
    assert!(!bad[0].passed);
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v");
    let code = cli(&["verify", "--only", "AC-1", "--perturb-c2", "1e-6", "--out", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_ACCEPTANCE);
    let table = read(&out.join("verify.csv"));
    assert!(table.starts_with("id,criterion,expected,actual,tolerance,seconds,budget_seconds,status\n"));
    assert!(table.contains(",FAIL\n"));
    assert_eq!(cli(&["verify", "--only", "AC-1"]), EXIT_OK);
    assert_eq!(cli(&["verify", "--only", "AC-99"]), EXIT_INPUT);
}

#[test]
fn bad_arguments_exit_with_input_error() {
    assert_eq!(cli(&["constants", "--d-range", "5:2"]), EXIT_INPUT);
    assert_eq!(cli(&["constants", "--d-range", "1:3"]), EXIT_INPUT);
    assert_eq!(cli(&["frobnicate"]), EXIT_INPUT);
    assert_eq!(cli(&["classify"]), EXIT_INPUT);
    assert_eq!(cli(&["--help"]), EXIT_OK);
}
