use frontier::experiment::{classify_limit, epsilon_sweep, SweepOptions, Verdict, DEFAULT_SUPPORT_THRESHOLD};
use frontier::model::{find_bistable_interval, CompetitionModel, Direction, GradientSpec};
use frontier::output::state_table;
use frontier::pde::{run_to_steady, wkb_transform, Grid1D, InitialCondition, SteadyOptions};
use frontier::wave::{
    front_tracking_speed, locate_boundary, solve_wave_bvp, TrackingOptions, WaveProblem, WaveSettings,
};

fn reference() -> CompetitionModel {
    CompetitionModel::reference_linear()
}

fn ramp() -> InitialCondition {
    InitialCondition::MonotoneRamp { center: None }
}

#[test]
fn reference_front_sits_at_midpoint_on_fine_grid() {
    let g = Grid1D::new(4001).unwrap();
    let s = run_to_steady(&reference(), 1e-4, g, ramp(), &SteadyOptions::default()).unwrap();
    assert!(s.state.is_monotone(0.0));
    assert!(s.residual <= 1e-8);
    assert!((s.front.unwrap().x_star_eps - 0.5).abs() <= 2.0 * g.h());
}

#[test]
fn wkb_residual_far_left_and_in_the_b_zone() {
    let m = reference();
    let eps = 1e-4;
    let g = Grid1D::auto(eps).unwrap();
    let s = run_to_steady(&m, eps, g, ramp(), &SteadyOptions::default()).unwrap();
    let w = wkb_transform(&s.state, &m, eps, true).unwrap();
    // A close to F_A: both phase gradient and H_A vanish.
    for i in (0..g.len()).filter(|&i| (0.05..0.35).contains(&g.x(i))) {
        assert!(w.eikonal_residual_a[i].abs() <= 1e-2, "x = {}: {}", g.x(i), w.eikonal_residual_a[i]);
    }
    // At x = 0.9 A is exponentially small; compare with a refined grid.
    let fine = g.refined();
    let sf = run_to_steady(&m, eps, fine, ramp(), &SteadyOptions::default()).unwrap();
    let wf = wkb_transform(&sf.state, &m, eps, true).unwrap();
    let i = (0.9 / g.h()).round() as usize;
    let j = (0.9 / fine.h()).round() as usize;
    assert!((g.x(i) - 0.9).abs() < 1e-12 && (fine.x(j) - 0.9).abs() < 1e-12);
    assert!(w.eikonal_residual_a[i].abs() <= 5e-2, "{}", w.eikonal_residual_a[i]);
    assert!((w.eikonal_residual_a[i] - wf.eikonal_residual_a[j]).abs() <= 5e-2);
    let fb = m.f_b().value(0.9);
    let h_a = m.f_a().value(0.9) - m.s_a() * fb;
    let grad = (w.phi_a[i + 1] - w.phi_a[i - 1]) / (2.0 * g.h());
    assert!((grad * grad + h_a).abs() <= 5e-2, "phi' = {grad}, H_A = {h_a}");
}

#[test]
fn tracking_oracle_agrees_and_fits_a_line() {
    let m = reference();
    let opts = TrackingOptions::default();
    for x in [0.25, 0.3] {
        let p = WaveProblem::new(&m, x);
        let bvp = solve_wave_bvp(&p, None).unwrap();
        let tr = front_tracking_speed(&p, &opts).unwrap();
        assert!(tr.c > 0.0);
        assert!((bvp.c - tr.c).abs() <= 1e-3 * (bvp.c.abs() + 0.01));
        assert!(tr.fit_residual.unwrap() <= 1e-3 * tr.c.abs() * opts.t_horizon);
    }
    let mid = front_tracking_speed(&WaveProblem::new(&m, 0.5), &opts).unwrap();
    assert!(mid.c.abs() <= 1e-3);
}

#[test]
fn doubling_the_frame_does_not_move_the_speed() {
    let m = reference();
    let p = WaveProblem::new(&m, 0.3);
    let r = solve_wave_bvp(&p, None).unwrap();
    let wide = WaveSettings { half_length: Some(2.0 * r.half_length), ..WaveSettings::default() };
    let r2 = solve_wave_bvp(&WaveProblem::new(&m, 0.3).with_settings(wide), None).unwrap();
    assert!((r.c - r2.c).abs() <= 1e-6);
}

#[test]
fn asymmetric_models_shift_the_boundary() {
    let m = reference().with_saturations(2.0, 3.0).unwrap();
    let iv = find_bistable_interval(&m).unwrap();
    assert!((iv.x_b - 2.0 / 9.0).abs() < 1e-10 && (iv.x_a - 11.0 / 12.0).abs() < 1e-10);
    let loc = locate_boundary(&m, 1e-6, &WaveSettings::default()).unwrap();
    assert!((loc.x_star - 0.5).abs() > 0.05);

    let shifted = reference()
        .with_gradients(
            GradientSpec::linear(2.0, -1.5, Direction::Decreasing, 0.1).unwrap(),
            GradientSpec::linear(0.65, 1.5, Direction::Increasing, 0.1).unwrap(),
        )
        .unwrap();
    let loc = locate_boundary(&shifted, 1e-6, &WaveSettings::default()).unwrap();
    assert!(loc.x_star < 0.5);
}

#[test]
fn reference_sweep_pins_every_front() {
    let m = reference();
    let eps = [1e-2, 1e-3, 1e-4, 1e-5];
    let r = epsilon_sweep(&m, &eps, 1e-8, &SweepOptions::default()).unwrap();
    assert!(r.all_succeeded());
    assert_eq!(r.entries.len(), eps.len());
    for e in &r.entries {
        let h = 1.0 / (e.n - 1) as f64;
        assert!((e.x_star_eps.unwrap() - 0.5).abs() <= 2.0 * h + e.eps.sqrt(), "{e:?}");
    }
    let k = r.width_exponent.unwrap();
    assert!((k - 0.5).abs() <= 0.15, "{k}");
}

#[test]
fn asymmetric_sweep_closes_in_on_the_wave_boundary() {
    let m = reference().with_saturations(2.0, 3.0).unwrap();
    let opts = SweepOptions { keep_states: true, ..SweepOptions::default() };
    let eps = [1e-2, 1e-3, 1e-4, 1e-5];
    let r = epsilon_sweep(&m, &eps, 1e-8, &opts).unwrap();
    assert!(r.all_succeeded());
    let h_last = Grid1D::auto(1e-5).unwrap().h();
    assert!(r.gap_non_increasing(h_last), "{:?}", r.convergence_gap());
    let gaps: Vec<f64> = r.convergence_gap().into_iter().map(Option::unwrap).collect();
    assert!(gaps[3] < gaps[0]);
    let c = classify_limit(r.states[3].as_ref().unwrap(), &m, DEFAULT_SUPPORT_THRESHOLD);
    assert_eq!(c.verdict, Verdict::ASharpInterface, "{:?}", c.diagnostics);
}

#[test]
fn reference_limit_is_a_sharp_interface() {
    let m = reference();
    let eps = 1e-5;
    let s = run_to_steady(&m, eps, Grid1D::auto(eps).unwrap(), ramp(), &SteadyOptions::default()).unwrap();
    let c = classify_limit(&s, &m, DEFAULT_SUPPORT_THRESHOLD);
    assert_eq!(c.verdict, Verdict::ASharpInterface);
    // The 1% tails reach about 3.5 sqrt(eps) past the crossing.
    let tail = 5.0 * eps.sqrt();
    let (a0, a1) = c.support_a.unwrap();
    let (b0, b1) = c.support_b.unwrap();
    assert!(a0 == 0.0 && (a1 - 0.5).abs() <= tail, "{:?}", c.support_a);
    assert!((b0 - 0.5).abs() <= tail && b1 == 1.0, "{:?}", c.support_b);
    assert!(c.a_rel_error.unwrap() <= 0.05 && c.b_rel_error.unwrap() <= 0.05);
    assert_eq!(c.left_zone_ok, Some(true));
    assert_eq!(c.right_zone_ok, Some(true));
}

#[test]
fn steady_csv_is_deterministic() {
    let m = CompetitionModel::exponential_figure();
    let eps = 1e-3;
    let g = Grid1D::auto(eps).unwrap();
    let run = || {
        let s = run_to_steady(&m, eps, g, ramp(), &SteadyOptions::default()).unwrap();
        let w = wkb_transform(&s.state, &m, eps, true).unwrap();
        state_table(&s.state, Some(&w)).to_bytes().unwrap()
    };
    assert_eq!(run(), run());
}
