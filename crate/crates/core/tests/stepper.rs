use std::f64::consts::PI;
use std::sync::Arc;

use kgspectral::problems::{linear_exact, Nonlinearity, ProblemSpec};
use kgspectral::spectral::{analyze, GridSpec, RealCoeffs};
use kgspectral::stepper::{
    fixed_point_sweep, step, SolverParams, SpectralState, StepError, Stepper,
};

fn projected_linear(grid: &GridSpec, t: f64) -> SpectralState {
    let l = grid.length();
    SpectralState {
        u: analyze(&grid.sample(|x| linear_exact(x, t, l).0), grid).unwrap(),
        v: analyze(&grid.sample(|x| linear_exact(x, t, l).1), grid).unwrap(),
        time: t,
    }
}

#[test]
fn single_sweep_matches_hand_computation() {
    let (alpha, beta, len, theta, dt) = (-0.7, 1.3, 5.0, 0.4, 0.05);
    let problem = ProblemSpec::new(
        "pair",
        alpha,
        beta,
        Nonlinearity::Linear,
        len,
        Arc::new(|_| 0.0),
        Arc::new(|_| 0.0),
    )
    .unwrap();
    let grid = GridSpec::new(len, 1, 3).unwrap();
    let params = SolverParams::new(theta, dt).unwrap();
    let s = |z: f64, c: f64, sn: f64| RealCoeffs::new(z, vec![c], vec![sn]).unwrap();
    let state_n = SpectralState {
        u: s(0.1, 0.5, -0.2),
        v: s(0.3, 0.7, 0.4),
        time: 0.0,
    };
    let guess = SpectralState {
        u: s(0.2, 0.45, -0.1),
        v: s(0.25, 0.6, 0.5),
        time: dt,
    };
    let next = fixed_point_sweep(&state_n, &guess, &params, &problem, &grid).unwrap();

    let kappa = alpha * (2.0 * PI / len).powi(2);
    let expect = |an: f64, cn: f64, ag: f64, cg: f64, k: f64| {
        (
            an + dt * (1.0 - theta) * cn + dt * theta * cg,
            cn + (1.0 - theta) * dt * (k * an - beta * an) + theta * dt * (k * ag - beta * ag),
        )
    };
    let (a0, c0) = expect(0.1, 0.3, 0.2, 0.25, 0.0);
    let (a1, c1) = expect(0.5, 0.7, 0.45, 0.6, kappa);
    let (b1, d1) = expect(-0.2, 0.4, -0.1, 0.5, kappa);
    let close = |x: f64, y: f64| assert!((x - y).abs() < 1e-15, "{x} vs {y}");
    close(next.u.zero_mode, a0);
    close(next.v.zero_mode, c0);
    close(next.u.cos_modes[0], a1);
    close(next.v.cos_modes[0], c1);
    close(next.u.sin_modes[0], b1);
    close(next.v.sin_modes[0], d1);
}

#[test]
fn local_error_is_third_order() {
    let problem = ProblemSpec::linear_kg(8.0).unwrap();
    let grid = GridSpec::new(8.0, 8, 32).unwrap();
    let init = projected_linear(&grid, 0.0);
    let err = |dt: f64| {
        let (s, _) = step(
            &init,
            &SolverParams::crank_nicolson(dt).unwrap(),
            &problem,
            &grid,
        )
        .unwrap();
        s.max_abs_diff(&projected_linear(&grid, dt))
    };
    let ratio = err(2f64.powi(-4)) / err(2f64.powi(-5));
    assert!((6.0..10.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn converged_step_solves_the_implicit_system() {
    for problem in [
        ProblemSpec::linear_kg(8.0).unwrap(),
        ProblemSpec::sine_gordon(kgspectral::problems::sine_gordon_period()).unwrap(),
    ] {
        let grid = GridSpec::with_auto_points(problem.length, 32, 129).unwrap();
        let params = SolverParams::crank_nicolson(2f64.powi(-6)).unwrap();
        let stepper = Stepper::new(&problem, &grid, params).unwrap();
        let s0 = SpectralState::from_initial(&problem, &grid).unwrap();
        let (s1, report) = stepper.step(&s0).unwrap();
        assert!(report.converged && report.final_residual <= report.tolerance);
        let r = stepper.implicit_residual(&s0, &s1).unwrap();
        assert!(r <= report.tolerance, "{}: {r:e}", problem.name);
    }
}

#[test]
fn fixed_point_changes_contract() {
    let problem = ProblemSpec::sine_gordon(kgspectral::problems::sine_gordon_period()).unwrap();
    let grid = GridSpec::with_auto_points(problem.length, 32, 129).unwrap();
    let stepper = Stepper::new(
        &problem,
        &grid,
        SolverParams::crank_nicolson(2f64.powi(-5)).unwrap(),
    )
    .unwrap();
    let (_, report, history) = stepper
        .step_with_history(&SpectralState::from_initial(&problem, &grid).unwrap())
        .unwrap();
    assert_eq!(history.len(), report.iterations_used);
    // geometric decrease until round-off takes over
    for w in history.windows(2).filter(|w| w[0] > 1e-12) {
        assert!(w[1] < 0.5 * w[0], "{history:?}");
    }
}

#[test]
fn trapezoidal_rotation_conserves_quadratic_invariant() {
    let len = 8.0;
    let problem = ProblemSpec::new(
        "wave",
        -1.0,
        0.0,
        Nonlinearity::Linear,
        len,
        Arc::new(move |x| (2.0 * PI * x / len).cos() + 0.3 * (6.0 * PI * x / len).sin()),
        Arc::new(move |x| 0.5 * (4.0 * PI * x / len).cos()),
    )
    .unwrap();
    let grid = GridSpec::new(len, 8, 32).unwrap();
    let stepper = Stepper::new(
        &problem,
        &grid,
        SolverParams::crank_nicolson(2f64.powi(-8)).unwrap(),
    )
    .unwrap();
    let invariant = |s: &SpectralState| {
        let mut sum = s.v.zero_mode.powi(2);
        for l in 1..=8 {
            let w = grid.wavenumber(l);
            sum += (w * s.u.cos_modes[l - 1]).powi(2) + s.v.cos_modes[l - 1].powi(2);
            sum += (w * s.u.sin_modes[l - 1]).powi(2) + s.v.sin_modes[l - 1].powi(2);
        }
        sum
    };
    let mut s = SpectralState::from_initial(&problem, &grid).unwrap();
    let start = invariant(&s);
    for _ in 0..1000 {
        s = stepper.step(&s).unwrap().0;
    }
    assert!(
        (invariant(&s) - start).abs() <= 1e-12 * start,
        "drift {:e}",
        invariant(&s) - start
    );
}

fn final_error(theta: f64, dt: f64) -> f64 {
    let problem = ProblemSpec::linear_kg(8.0).unwrap();
    let grid = GridSpec::new(8.0, 4, 16).unwrap();
    let params = SolverParams::new(theta, dt).unwrap();
    let stepper = Stepper::new(&problem, &grid, params).unwrap();
    let s = stepper
        .evolve(
            &SpectralState::from_initial(&problem, &grid).unwrap(),
            1.0,
            |_, _| {},
        )
        .unwrap();
    s.max_abs_diff(&projected_linear(&grid, 1.0))
}

#[test]
fn euler_variants_are_first_order() {
    for theta in [0.0, 1.0] {
        let p = (final_error(theta, 2f64.powi(-8)) / final_error(theta, 2f64.powi(-9))).log2();
        assert!((0.8..=1.2).contains(&p), "theta {theta}: p = {p}");
    }
    let p = (final_error(0.5, 2f64.powi(-6)) / final_error(0.5, 2f64.powi(-7))).log2();
    assert!((1.8..=2.2).contains(&p));
}

#[test]
fn explicit_steps_need_one_sweep() {
    let problem = ProblemSpec::linear_kg(8.0).unwrap();
    let grid = GridSpec::new(8.0, 8, 32).unwrap();
    let s0 = SpectralState::from_initial(&problem, &grid).unwrap();
    let (_, r) = step(&s0, &SolverParams::new(0.0, 0.01).unwrap(), &problem, &grid).unwrap();
    assert_eq!(r.iterations_used, 1);
    assert_eq!(r.final_residual, 0.0);
}

#[test]
fn evolve_reaches_benchmark_accuracy() {
    let problem = ProblemSpec::linear_kg(8.0).unwrap();
    let grid = GridSpec::new(8.0, 32, 128).unwrap();
    let stepper = Stepper::new(
        &problem,
        &grid,
        SolverParams::crank_nicolson(2f64.powi(-10)).unwrap(),
    )
    .unwrap();
    let mut count = 0;
    let s = stepper
        .evolve(
            &SpectralState::from_initial(&problem, &grid).unwrap(),
            1.0,
            |_, _| count += 1,
        )
        .unwrap();
    assert_eq!(count, 1024);
    assert_eq!(s.time, 1.0);
    let errs = kgspectral::diagnostics::state_errors(&s, &grid, &problem)
        .unwrap()
        .unwrap();
    assert!(errs.0.max_error <= 1e-5 && errs.1.max_error <= 1e-5);
}

/// Above `θΔt·ω_N = 1` the sweep amplifies the top modes; only exactly
/// zero content there keeps the iteration bounded.
#[test]
fn roundoff_in_stiff_modes_breaks_the_iteration_unless_chopped() {
    let problem = ProblemSpec::linear_kg(8.0).unwrap();
    let grid = GridSpec::new(8.0, 1024, 4096).unwrap();
    let params = SolverParams::crank_nicolson(2f64.powi(-8)).unwrap();
    let stepper = Stepper::new(&problem, &grid, params).unwrap();

    let raw = SpectralState::from_initial_raw(&problem, &grid).unwrap();
    let failure = stepper.evolve(&raw, 1.0, |_, _| {}).unwrap_err();
    assert!(
        matches!(
            failure.source,
            StepError::NonConvergence { .. } | StepError::Divergence { .. }
        ),
        "{failure}"
    );

    let chopped = SpectralState::from_initial(&problem, &grid).unwrap();
    assert_eq!(chopped.u.max_abs(), 0.0);
    assert_eq!(chopped.v.cos_modes.iter().filter(|&&c| c != 0.0).count(), 1);
    let end = stepper.evolve(&chopped, 1.0, |_, _| {}).unwrap();
    let errs = kgspectral::diagnostics::state_errors(&end, &grid, &problem)
        .unwrap()
        .unwrap();
    assert!(errs.0.max_error < 1e-6 && errs.1.max_error < 1e-5);
}

#[test]
fn bad_parameters_and_shapes() {
    assert!(SolverParams::new(1.5, 0.1).is_err());
    assert!(SolverParams::new(0.5, 0.0).is_err());
    let problem = ProblemSpec::linear_kg(8.0).unwrap();
    let grid = GridSpec::new(8.0, 8, 32).unwrap();
    let params = SolverParams::crank_nicolson(0.1).unwrap();
    assert!(matches!(
        step(&SpectralState::zeros(4), &params, &problem, &grid),
        Err(StepError::ModeMismatch {
            expected: 8,
            found: 4
        })
    ));
    let other = GridSpec::new(7.0, 8, 32).unwrap();
    assert!(Stepper::new(&problem, &other, params).is_err());
    let stepper = Stepper::new(&problem, &grid, params).unwrap();
    let init = SpectralState::from_initial(&problem, &grid).unwrap();
    let e = stepper.evolve(&init, 0.25, |_, _| {}).unwrap_err();
    assert!(matches!(e.source, StepError::InvalidParams(_)));
}
