use std::f64::consts::PI;

use super::*;
use crate::kernel::{periodic_gaussian, periodic_heat_kernel};

fn config(center: [f64; 2]) -> DiagConfig {
    DiagConfig {
        p_list: vec![2.0, 4.0],
        q_list: vec![2.0, 4.0],
        r_list: vec![1.0, 1.5, 2.0],
        ball_radius: 2.0,
        profile_r: 2.0,
        center,
        mass: 1.0,
        circulation: 0.5,
    }
}

fn state(n: RealField, c: RealField, omega: RealField, t: f64) -> SimState {
    SimState { n, c, omega, t }
}

fn heat_state(g: GridSpec, t: f64, shift: f64) -> SimState {
    let gamma = periodic_heat_kernel(&g, g.center(), t + shift).unwrap();
    state(gamma.clone(), RealField::zeros(g), gamma.scaled(0.5), t)
}

#[test]
fn column_names_follow_the_schema() {
    let cols = config([0.0, 0.0]).columns();
    let want = [
        "mass",
        "circulation",
        "min_n",
        "max_c",
        "n_L1",
        "n_Linf",
        "grad_n_Linf",
        "grad_c_Linf",
        "grad2_c_Linf",
        "n_L2",
        "n_L4",
        "grad_n_L2",
        "grad_c_L2",
        "grad_c_L4",
        "omega_L1",
        "omega_L1.5",
        "omega_L2",
        "grad_omega_L1",
        "grad_omega_L1.5",
        "prof_n",
        "prof_omega",
        "prof_gradc",
    ];
    assert_eq!(cols, want);
}

#[test]
fn duplicate_exponents_collapse() {
    let mut cfg = config([0.0, 0.0]);
    cfg.p_list = vec![1.0, 2.0, 2.0];
    let cols = cfg.configured_columns();
    assert_eq!(cols.iter().filter(|c| *c == "n_L2").count(), 1);
    assert!(!cols.contains(&"n_L1".to_string()));
}

#[test]
fn invalid_config_rejected() {
    let mut cfg = config([0.0, 0.0]);
    cfg.q_list.push(0.5);
    assert!(cfg.validate().is_err());
    let mut cfg = config([0.0, 0.0]);
    cfg.r_list.push(f64::INFINITY);
    assert!(cfg.validate().is_err());
    let mut cfg = config([0.0, 0.0]);
    cfg.ball_radius = 0.0;
    assert!(cfg.validate().is_err());
}

#[test]
fn measure_heat_kernel_norms() {
    let g = GridSpec::square(256, 100.0).unwrap();
    let diag = Diagnostics::new(g, config(g.center())).unwrap();
    let t = 3.0;
    let rec = diag.measure(&heat_state(g, t, 0.0)).unwrap();
    let names: Vec<&str> = rec.entries.iter().map(|(k, _)| k.as_str()).collect();
    assert_eq!(names, diag.config().columns());
    assert!((rec.mass() - 1.0).abs() < 1e-10);
    assert!((rec.circulation() - 0.5).abs() < 1e-10);
    for p in [1.0, 2.0, 4.0, f64::INFINITY] {
        let want = crate::kernel::heat_kernel_lp_norm(t, p);
        let got = rec.get(&norm_label("n", p)).unwrap();
        assert!(
            (got - want).abs() <= 1e-6 * want,
            "p = {p}: {got} vs {want}"
        );
    }
    // sup |∇Γ| = (4πt)⁻¹ · max_r (r/2t) e^{-r²/4t} = (4πt)⁻¹ (2t)^{-1/2} e^{-1/2}
    let grad_peak = (4.0 * PI * t).recip() * (2.0 * t).powf(-0.5) * (-0.5_f64).exp();
    let got = rec.get("grad_n_Linf").unwrap();
    assert!((got - grad_peak).abs() < 1e-3 * grad_peak);
    assert_eq!(rec.get("grad_c_Linf"), Some(0.0));
    assert_eq!(rec.get("prof_gradc"), Some(0.0));
    assert!(rec.get("prof_n").unwrap() <= 1e-10);
    assert!(rec.get("prof_omega").unwrap() <= 1e-10);
}

#[test]
fn l1_norm_witnesses_positivity() {
    let g = GridSpec::square(128, 40.0).unwrap();
    let diag = Diagnostics::new(g, config(g.center())).unwrap();
    let n = periodic_gaussian(&g, [13.0, 21.0], 1.3, 2.0).unwrap();
    let rec = diag
        .measure(&state(
            n.clone(),
            RealField::zeros(g),
            RealField::zeros(g),
            1.0,
        ))
        .unwrap();
    let l1 = rec.get("n_L1").unwrap();
    assert!(l1 >= rec.mass().abs());
    assert!((l1 - rec.mass()).abs() <= 1e-10 * l1);
    let signed = n.map(|v| v - 0.5 * n.max());
    let rec = diag
        .measure(&state(
            signed.clone(),
            RealField::zeros(g),
            RealField::zeros(g),
            1.0,
        ))
        .unwrap();
    assert!(rec.get("n_L1").unwrap() > rec.mass().abs() + 1e-3);
}

#[test]
fn hessian_column_is_frobenius_norm() {
    let g = GridSpec::square(64, 2.0 * PI).unwrap();
    let diag = Diagnostics::new(g, config(g.center())).unwrap();
    let c = RealField::from_fn(g, |x, y| (3.0 * x).cos() + (2.0 * y).cos()).unwrap();
    let rec = diag
        .measure(&state(RealField::zeros(g), c, RealField::zeros(g), 0.0))
        .unwrap();
    // at (0,0) the Hessian is diag(-9, -4)
    assert!((rec.get("grad2_c_Linf").unwrap() - 97.0_f64.sqrt()).abs() < 1e-10);
}

#[test]
fn profile_distance_exact_and_shrinking() {
    let g = GridSpec::square(256, 100.0).unwrap();
    let diag = Diagnostics::new(g, config(g.center())).unwrap();
    let exact = heat_state(g, 10.0, 0.0);
    let d = diag
        .profile_distance(&exact, ProfileTarget::Density { mass: 1.0 })
        .unwrap();
    assert!(d <= 1e-10);
    // a Gaussian of unit width is Γ(· , t + 1/2)
    let at = |t: f64| {
        diag.profile_distance(&heat_state(g, t, 0.5), ProfileTarget::Density { mass: 1.0 })
            .unwrap()
    };
    assert!(at(40.0) < at(10.0));
    assert!(at(10.0) > 0.0);
}

#[test]
fn profile_at_time_zero_is_zero() {
    let g = GridSpec::square(64, 40.0).unwrap();
    let diag = Diagnostics::new(g, config(g.center())).unwrap();
    let n = periodic_gaussian(&g, g.center(), 2.5, 1.0).unwrap();
    let s = state(n, RealField::zeros(g), RealField::zeros(g), 0.0);
    assert_eq!(
        diag.profile_distance(&s, ProfileTarget::Density { mass: 1.0 })
            .unwrap(),
        0.0
    );
}

#[test]
fn oversized_ball_rejected() {
    let g = GridSpec::square(64, 40.0).unwrap();
    let diag = Diagnostics::new(g, config(g.center())).unwrap();
    // R√t = 2·√30 ≈ 11 > L/4 = 10
    let s = heat_state(g, 30.0, 0.0);
    assert!(matches!(
        diag.profile_distance(&s, ProfileTarget::ChemGradient),
        Err(Error::Saturation(_))
    ));
    assert!((diag.config().last_ball_time(&g) - 25.0).abs() < 1e-12);
}

#[test]
fn ball_is_open_and_periodic() {
    let g = GridSpec::square(16, 16.0).unwrap();
    // center on a grid point near the edge: neighbours wrap around
    let ball = ball_indices(&g, [0.0, 0.0], 1.0).unwrap();
    assert_eq!(ball, vec![0]);
    let ball = ball_indices(&g, [0.0, 0.0], 1.0 + 1e-12).unwrap();
    assert_eq!(ball.len(), 5);
    assert!(ball.contains(&15) && ball.contains(&(15 * 16)));
}

fn series_from(points: &[(f64, f64)], label: &str) -> TimeSeries {
    let mut s = TimeSeries::new(vec![]);
    for &(t, v) in points {
        s.push(CheckpointRecord {
            t,
            entries: vec![(label.to_string(), v)],
        })
        .unwrap();
    }
    s
}

#[test]
fn exact_power_law_recovered() {
    let pts: Vec<(f64, f64)> = (0..20)
        .map(|i| 5.0 + 2.5 * i as f64)
        .map(|t| (t, 7.0 / t))
        .collect();
    let s = series_from(&pts, "n_Linf");
    let fit = decay_slope(&s, "n_Linf", (5.0, 50.0)).unwrap();
    assert!((fit.slope + 1.0).abs() < 1e-12);
    assert!((fit.intercept - 7.0_f64.ln()).abs() < 1e-12);
    assert!(fit.residual < 1e-12);
    assert_eq!(fit.points, 19);
}

#[test]
fn fit_rejects_thin_or_nonpositive_windows() {
    let pts: Vec<(f64, f64)> = (1..=7).map(|i| (i as f64, 1.0)).collect();
    assert!(decay_slope(&series_from(&pts, "x"), "x", (1.0, 10.0)).is_err());
    let mut pts: Vec<(f64, f64)> = (1..=10).map(|i| (i as f64, 1.0)).collect();
    pts[4].1 = 0.0;
    assert!(decay_slope(&series_from(&pts, "x"), "x", (1.0, 10.0)).is_err());
    let pts: Vec<(f64, f64)> = (1..=10).map(|i| (i as f64, 1.0)).collect();
    assert!(decay_slope(&series_from(&pts, "x"), "y", (1.0, 10.0)).is_err());
    assert!(decay_slope(&series_from(&pts, "x"), "x", (0.0, 10.0)).is_err());
}

#[test]
fn series_rejects_disorder_and_nan() {
    let mut s = series_from(&[(1.0, 1.0)], "x");
    let rec = |t: f64, v: f64| CheckpointRecord {
        t,
        entries: vec![("x".into(), v)],
    };
    assert!(s.push(rec(1.0, 2.0)).is_err());
    assert!(s.push(rec(2.0, f64::NAN)).is_err());
    assert!(s.push(rec(2.0, 2.0)).is_ok());
    assert_eq!(s.len(), 2);
}

#[test]
fn weighted_norm_of_heat_kernel() {
    let g = GridSpec::square(256, 100.0).unwrap();
    let diag = Diagnostics::new(g, config(g.center())).unwrap();
    let mut series = TimeSeries::new(vec![]);
    for t in [1.0, 2.0, 4.0, 8.0, 16.0] {
        series
            .push(diag.measure(&heat_state(g, t, 0.0)).unwrap())
            .unwrap();
    }
    let k2 = weighted_norm(&series, WeightedFamily::Density(2.0), 1.0).unwrap();
    assert!((k2 - (8.0 * PI).powf(-0.5)).abs() < 1e-4, "K2 = {k2}");
    // Γ(t) has sup t‖Γ‖∞ = 1/4π exactly
    let kinf = weighted_norm(&series, WeightedFamily::Density(f64::INFINITY), 1.0).unwrap();
    assert!((kinf - 0.25 / PI).abs() < 1e-6);
    assert!(weighted_norm(&series, WeightedFamily::Density(2.0), 100.0).is_err());
}

#[test]
fn weighted_norm_trivial_cases() {
    let zero = series_from(&[(1.0, 0.0), (2.0, 0.0)], "n_L2");
    assert_eq!(
        weighted_norm(&zero, WeightedFamily::Density(2.0), 0.0).unwrap(),
        0.0
    );
    let single = series_from(&[(4.0, 3.0)], "grad_n_Linf");
    let v = weighted_norm(&single, WeightedFamily::DensityGradient, 0.0).unwrap();
    assert!((v - 8.0 * 3.0).abs() < 1e-12);
}

#[test]
fn weight_exponents() {
    assert_eq!(WeightedFamily::Density(1.0).weight_exponent(), 0.0);
    assert_eq!(WeightedFamily::ChemGradient(2.0).weight_exponent(), 0.0);
    assert_eq!(
        WeightedFamily::ChemGradient(f64::INFINITY).weight_exponent(),
        0.5
    );
    assert_eq!(WeightedFamily::Vorticity(2.0).weight_exponent(), 0.5);
    assert_eq!(WeightedFamily::ChemHessian.weight_exponent(), 1.0);
    let v = WeightedFamily::VorticityGradient(1.5);
    assert!((v.weight_exponent() - (1.5 - 2.0 / 3.0)).abs() < 1e-15);
    assert_eq!(v.label(), "grad_omega_L1.5");
}

fn check_heat_peak_slope(shift: f64, tol: f64) {
    let g = GridSpec::square(128, 100.0).unwrap();
    let diag = Diagnostics::new(g, config(g.center())).unwrap();
    let mut series = TimeSeries::new(vec![]);
    for i in 0..20 {
        let t = 5.0 + 45.0 * i as f64 / 19.0;
        series
            .push(diag.measure(&heat_state(g, t, shift)).unwrap())
            .unwrap();
    }
    let fit = decay_slope(&series, "n_Linf", (5.0, 50.0)).unwrap();
    // closed form peak 1/(4π(t + t₀)), fitted on the same times
    let exact: Vec<(f64, f64)> = series
        .records()
        .iter()
        .map(|r| (r.t, 1.0 / (4.0 * PI * (r.t + shift))))
        .collect();
    let want = fit_power_law(&exact, 2).unwrap().slope;
    assert!(
        (fit.slope - want).abs() < 1e-6,
        "slope {} vs {want}",
        fit.slope
    );
    assert!((fit.slope + 1.0).abs() < tol, "slope {}", fit.slope);
}

#[test]
fn pure_heat_peak_decays_like_inverse_time() {
    // narrow start: t₀ = 0.05
    check_heat_peak_slope(0.05, 0.02);
    // unit-width start: t₀ = 1/2 flattens the fitted slope to about -0.97
    check_heat_peak_slope(0.5, 0.04);
}

#[test]
fn self_rescale_has_zero_deviation() {
    let g = GridSpec::square(128, 100.0).unwrap();
    let diag = Diagnostics::new(g, config(g.center())).unwrap();
    let mut series = TimeSeries::new(vec![]);
    for t in [0.0, 1.0, 2.0, 3.0] {
        series
            .push(diag.measure(&heat_state(g, t, 0.5)).unwrap())
            .unwrap();
    }
    let inv = ScaleInvariants::of(&heat_state(g, 0.0, 0.5)).unwrap();
    let report = rescale_check(1, &inv, &inv, &series, &series, &[2.0, 4.0]).unwrap();
    assert_eq!(report.max_invariant_deviation(), 0.0);
    assert_eq!(report.max_curve_deviation(), 0.0);
    assert_eq!(report.curve.len(), 6);
    assert!(report.passes(0.0, 0.0));
}

#[test]
fn rescale_matches_scaled_times() {
    let pts = [(0.0, 1.0), (4.0, 2.0), (8.0, 3.0)];
    let base = series_from(&pts, "n_L2");
    // rescaled times s/4 carry ‖n_k‖₂ = k ‖n‖₂
    let scaled: Vec<(f64, f64)> = pts.iter().map(|&(t, v)| (t / 4.0, 2.0 * v)).collect();
    let other = series_from(&scaled, "n_L2");
    let inv = ScaleInvariants {
        n_l1: 1.0,
        c_linf: 0.1,
        omega_l1: 0.5,
        circulation: 0.5,
    };
    let report = rescale_check(2, &inv, &inv, &base, &other, &[2.0]).unwrap();
    assert_eq!(report.curve.len(), 2);
    assert!(report.max_curve_deviation() < 1e-15);
}

/// `Σ' (m + in)⁻⁴` over the unit square lattice, `Γ(1/4)⁸ / (960π²)`.
const LATTICE_G4: f64 = 3.151_212_002_153_897_5;

#[test]
fn gaussian_vortex_velocity_matches_quadrature() {
    let g = GridSpec::square(256, 100.0).unwrap();
    let ops = SpectralOps::new(g);
    let (sigma, gamma) = (2.0, 1.0);
    let c = g.center();
    let omega = periodic_gaussian(&g, c, sigma, gamma).unwrap();
    let u = ops.biot_savart(&omega).unwrap();
    let l2 = 100.0 * 100.0;
    let mut worst = 0.0_f64;
    for k in [10, 20, 40, 60] {
        // point on the x₁ axis at radius r, where u is purely along x₂
        let (i, j) = (128 + k, 128);
        let r = k as f64 * g.spacing();
        // azimuthal speed from enclosed circulation, minus the uniform-mean correction
        // plus the lattice terms of the periodic Green's function (G₆ = 0, G₈ = 3G₄²/7)
        let g8 = 3.0 * LATTICE_G4 * LATTICE_G4 / 7.0;
        let lattice = LATTICE_G4 * r.powi(3) / (l2 * l2) + g8 * r.powi(7) / (l2 * l2 * l2 * l2);
        let want = gamma / (2.0 * PI * r) * (1.0 - (-r * r / (2.0 * sigma * sigma)).exp())
            - gamma / l2 * r / 2.0
            - gamma / (2.0 * PI) * lattice;
        worst = worst.max((u.x2.at(i, j) - want).abs());
        assert!(u.x1.at(i, j).abs() < 1e-12);
    }
    assert!(worst < 1e-7 * u.max_magnitude(), "worst {worst:e}");
}

#[test]
fn radial_identity_trivial_cases() {
    let g = GridSpec::square(64, 40.0).unwrap();
    let ops = SpectralOps::new(g);
    let gauss = periodic_gaussian(&g, g.center(), 2.0, 1.0).unwrap();
    let flat = RealField::constant(g, 3.0).unwrap();
    let r = radial_identity_check(&ops, &gauss, &flat).unwrap();
    assert_eq!(r.sup, 0.0);
    assert_eq!(r.relative(), 0.0);
    let r = radial_identity_check(&ops, &RealField::zeros(g), &gauss).unwrap();
    assert_eq!(r.sup, 0.0);
    let off = periodic_gaussian(&g, [21.0, 20.0], 2.0, 1.0).unwrap();
    assert!(radial_identity_check(&ops, &off, &gauss).is_err());
}

#[test]
fn radial_identity_small_on_moderate_box() {
    let g = GridSpec::square(256, 100.0).unwrap();
    let ops = SpectralOps::new(g);
    let a = periodic_gaussian(&g, g.center(), 1.0, 1.0).unwrap();
    let b = periodic_gaussian(&g, g.center(), 2.0, 1.0).unwrap();
    let r = radial_identity_check(&ops, &a, &b).unwrap();
    assert!(r.scale > 0.0);
    assert!(r.relative() < 1e-5, "relative {:e}", r.relative());
}

#[test]
fn smoothing_probe_contraction_and_constancy() {
    let g = GridSpec::square(256, 40.0).unwrap();
    let ops = SpectralOps::new(g);
    let u0 = periodic_gaussian(&g, g.center(), 0.5, 1.0).unwrap();
    let times = [1.0, 2.0, 5.0, 10.0];
    for p in [1.0, 2.0, f64::INFINITY] {
        let probe = smoothing_constant_probe(&ops, &u0, p, p, 0, &times).unwrap();
        assert!(probe.points.iter().all(|&(_, r)| r <= 1.0 + 1e-10));
    }
    // u₀ = Γ(t₀) with t₀ = 1/8, so the ratio is t/(4π(t + t₀))
    let probe = smoothing_constant_probe(&ops, &u0, f64::INFINITY, 1.0, 0, &times).unwrap();
    for &(t, r) in &probe.points {
        let want = t / (4.0 * PI * (t + 0.125));
        assert!((r - want).abs() < 1e-8 * want);
    }
    assert!(smoothing_constant_probe(&ops, &u0, 2.0, 1.0, 0, &[30.0]).is_err());
    assert!(smoothing_constant_probe(&ops, &u0, 2.0, 1.0, 2, &times).is_err());
}
