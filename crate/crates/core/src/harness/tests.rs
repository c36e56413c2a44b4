use super::*;
use crate::spectral::{GridSpec, RealField};

#[test]
fn empty_text_gives_defaults() {
    let cfg = parse_config("").unwrap();
    assert_eq!(cfg, RunConfig::default());
    assert_eq!(cfg.n_points, 256);
    assert_eq!(cfg.box_length, 100.0);
    assert_eq!((cfg.chi0, cfg.kappa), (0.1, 0.1));
    assert_eq!((cfg.mass, cfg.gamma, cfg.c_bar), (0.5, 0.5, 0.1));
    assert_eq!(cfg.center(), [50.0, 50.0]);
}

#[test]
fn odd_grid_rejected_with_line_and_key() {
    let err = parse_config("# header\n\ngrid.n_points = 7\n").unwrap_err();
    match &err {
        Error::Config { line, key, msg } => {
            assert_eq!(*line, 3);
            assert_eq!(key, "grid.n_points");
            assert!(msg.contains("must be even, ≥ 8"), "{msg}");
        }
        other => panic!("unexpected {other:?}"),
    }
    assert_eq!(exit_code(&err), EXIT_USAGE);
}

#[test]
fn unknown_and_malformed_keys_rejected() {
    let err = parse_config("grid.n_point = 64").unwrap_err();
    assert!(matches!(err, Error::Config { line: 1, ref key, .. } if key == "grid.n_point"));
    assert!(parse_config("time.t_end").is_err());
    assert!(parse_config("time.t_end = soon").is_err());
    assert!(parse_config("time.t_end = 1\ntime.t_end = 2").is_err());
    assert!(parse_config("model.chi_family = cubic").is_err());
    assert!(parse_config("output.snapshots = yes").is_err());
    assert!(parse_config("time.cfl = 1.5").is_err());
}

#[test]
fn ranges_checked() {
    // ball R√t_end = 2·√200 > L/4
    assert!(parse_config("time.t_end = 200").is_err());
    // sigma_n below two cells
    assert!(parse_config("init.sigma_n = 0.5").is_err());
    // width above L/16
    assert!(parse_config("init.sigma_omega = 7").is_err());
    // fit window past saturation
    assert!(parse_config(
        "grid.box_length = 40\ngrid.n_points = 128\ndiag.fit_end = 30\ntime.t_end = 20"
    )
    .is_err());
    assert!(parse_config("diag.q_list = 2, 0.5").is_err());
}

#[test]
fn comments_and_lists_parse() {
    let cfg = parse_config(
        "# comment\ndiag.r_list = 1.5, 2   # trailing\nphi.family = gaussian_well\nphi.center = 52, 49.5\n",
    )
    .unwrap();
    assert_eq!(cfg.r_list, vec![1.5, 2.0]);
    assert_eq!(cfg.phi_center(), [52.0, 49.5]);
}

#[test]
fn emitted_config_round_trips() {
    let text = "grid.n_points = 128\ngrid.box_length = 64\nmodel.chi_family = linear\nmodel.k_family = saturating\n\
                phi.family = gaussian_well\nphi.amplitude = 0.25\nphi.width = 3\ninit.c0_family = algebraic\n\
                init.c0_power = 0.075\ninit.omega0_family = dipole\ntime.t_end = 20\ndiag.p_list = 1.5, 3\n\
                output.snapshots = true\noutput.directory = results/a\n";
    let cfg = parse_config(text).unwrap();
    let emitted = cfg.emit();
    let again = parse_config(&emitted).unwrap();
    assert_eq!(again.emit(), emitted);
    assert_eq!(parse_config(&again.emit()).unwrap(), again);
    // defaults for the centers are spelled out on emission
    assert_eq!(again.center(), cfg.center());
    assert_eq!(
        RunConfig {
            center: None,
            phi_center: None,
            ..again
        },
        cfg
    );
    assert_eq!(
        emitted.lines().filter(|l| l.contains(" = ")).count(),
        RunConfig::KEYS.len()
    );
}

#[test]
fn rescaled_config_divides_lengths_and_times() {
    let cfg = parse_config("phi.family = gaussian_well").unwrap();
    let r = cfg.rescaled(2);
    assert_eq!(r.box_length, 50.0);
    assert_eq!(r.sigma_n, 0.5);
    assert_eq!(r.phi_width, 2.0);
    assert_eq!(r.center(), [25.0, 25.0]);
    assert_eq!(r.t_end, 12.5);
    assert_eq!(r.dt_max, 0.0125);
    assert_eq!(r.checkpoint_every, 0.25);
    assert_eq!(
        (r.mass, r.c_bar, r.gamma, r.phi_amplitude),
        (cfg.mass, cfg.c_bar, cfg.gamma, cfg.phi_amplitude)
    );
    assert!(r.check().is_ok());
    assert_eq!(
        cfg.rescaled(1),
        RunConfig {
            phi_center: Some([50.0; 2]),
            center: Some([50.0; 2]),
            ..cfg.clone()
        }
    );
}

#[test]
fn csv_header_has_exact_prefix() {
    let cfg = RunConfig::default();
    let header = csv_header(&cfg.diag_config().columns());
    assert!(header.starts_with(
        "t,mass,circulation,min_n,max_c,n_L1,n_Linf,grad_n_Linf,grad_c_Linf,grad2_c_Linf,"
    ));
    assert!(header.ends_with(",prof_n,prof_omega,prof_gradc"));
    assert!(header.contains(",omega_L2,") && header.contains(",grad_omega_L1.5,"));
}

#[test]
fn csv_numbers_carry_seventeen_digits() {
    let rec = crate::diagnostics::CheckpointRecord {
        t: 0.1,
        entries: vec![("mass".into(), 1.0 / 3.0), ("x".into(), -2.5e-300)],
    };
    let row = csv_row(&rec);
    assert_eq!(
        row,
        "1.0000000000000001e-1,3.3333333333333331e-1,-2.5000000000000000e-300"
    );
    for field in row.split(',') {
        let v: f64 = field.parse().unwrap();
        assert_eq!(format!("{v:.16e}"), field);
    }
}

#[test]
fn snapshot_round_trip_is_bit_exact() {
    let g = GridSpec::square(16, 12.5).unwrap();
    let f = random_field(g, 3, 4).map(|v| v * 1e-7 + 1.0 / 7.0);
    let bytes = snapshot_bytes("omega", &f, 12.345678901234567).unwrap();
    let header_end = bytes.iter().position(|&b| b == b'\n').unwrap();
    assert_eq!(
        &bytes[..header_end],
        b"CFNS1 omega 16 1.25e1 1.2345678901234567e1"
    );
    assert_eq!(bytes.len(), header_end + 1 + 8 * 256);
    let snap = parse_snapshot(&bytes).unwrap();
    assert_eq!(snap.name, "omega");
    assert_eq!(snap.t, 12.345678901234567);
    let same = snap
        .field
        .values()
        .iter()
        .zip(f.values())
        .all(|(a, b)| a.to_bits() == b.to_bits());
    assert!(same);
    assert_eq!(snapshot_bytes("omega", &snap.field, snap.t).unwrap(), bytes);
}

#[test]
fn snapshot_rejects_corruption() {
    let g = GridSpec::square(8, 1.0).unwrap();
    let bytes = snapshot_bytes("n", &RealField::zeros(g), 0.0).unwrap();
    assert!(parse_snapshot(&bytes[..bytes.len() - 1]).is_err());
    let mut bad = bytes.clone();
    bad[0] = b'X';
    assert!(parse_snapshot(&bad).is_err());
    assert!(parse_snapshot(b"CFNS1 n 8 1\n").is_err());
    assert!(snapshot_bytes("two words", &RealField::zeros(g), 0.0).is_err());
}

#[test]
fn run_with_zero_end_time_writes_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg =
        parse_config("grid.n_points = 64\ngrid.box_length = 32\ntime.t_end = 0\ndiag.fit_end = 10")
            .unwrap();
    assert_eq!(cmd_run(&cfg, dir.path()), EXIT_OK);
    let text = std::fs::read_to_string(dir.path().join("timeseries.csv")).unwrap();
    let (header, rows) = read_csv(&text).unwrap();
    assert_eq!(header[0], "t");
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], 0.0);
    assert!(dir.path().join("metadata.txt").exists());
}

#[test]
fn run_writes_snapshots_when_enabled() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = parse_config(
        "grid.n_points = 128\ngrid.box_length = 32\ntime.t_end = 0.5\ntime.checkpoint_every = 0.25\n\
         diag.fit_end = 10\noutput.snapshots = true",
    )
    .unwrap();
    assert_eq!(cmd_run(&cfg, dir.path()), EXIT_OK);
    let snap = read_snapshot(&dir.path().join("snapshots/omega_00002.cfns")).unwrap();
    assert_eq!(snap.t, 0.5);
    assert_eq!(snap.field.grid().n_points(), 128);
    let (_, rows) =
        read_csv(&std::fs::read_to_string(dir.path().join("timeseries.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 3);
}

#[test]
fn numerical_failure_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    // strong aggregation on a coarse grid drives n negative
    let cfg = parse_config(
        "grid.n_points = 32\ngrid.box_length = 32\ninit.mass = 2000\ninit.sigma_n = 2\ninit.sigma_omega = 2\nmodel.chi0 = 50\n\
         init.c0_family = gaussian\ninit.c_bar = 5\ninit.c0_width = 2\ntime.t_end = 5\ndiag.fit_end = 10",
    )
    .unwrap();
    assert_eq!(cmd_run(&cfg, dir.path()), EXIT_NUMERICAL);
    let text = std::fs::read_to_string(dir.path().join("timeseries.csv")).unwrap();
    assert!(!read_csv(&text).unwrap().1.is_empty());
}

#[test]
fn decay_rows_flag_missing_quantities() {
    let cfg = RunConfig::default();
    let rows = decay_rows(&cfg, &crate::diagnostics::TimeSeries::new(vec![]));
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| !r.pass && r.fitted_slope.is_nan()));
    let labels: Vec<&str> = rows.iter().map(|r| r.quantity.as_str()).collect();
    for want in [
        "n_Linf",
        "grad_c_Linf",
        "grad_n_Linf",
        "grad2_c_Linf",
        "omega_L2",
        "grad_omega_L1.5",
    ] {
        assert!(labels.contains(&want), "missing {want}");
    }
    let csv = decay_report_csv(&rows);
    assert!(csv.starts_with("quantity,fitted_slope,target_slope,band,pass\n"));
}

#[test]
fn trends_require_strict_decrease() {
    use crate::diagnostics::{CheckpointRecord, TimeSeries};
    let mut s = TimeSeries::new(vec![]);
    for (t, v) in [(10.0, 3.0), (20.0, 2.0), (40.0, 2.0)] {
        s.push(CheckpointRecord {
            t,
            entries: vec![
                ("prof_n".into(), v),
                ("prof_gradc".into(), 1.0 / t),
                ("prof_omega".into(), v),
            ],
        })
        .unwrap();
    }
    let rows = profile_trends(&s, &TREND_TIMES);
    assert!(!rows[0].pass);
    assert!(rows[1].pass);
    let rows = profile_trends(&s, &[10.0, 30.0]);
    assert!(rows.iter().all(|r| !r.pass));
}
