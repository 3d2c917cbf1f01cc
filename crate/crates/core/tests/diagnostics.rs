use kgspectral::diagnostics::{
    energy, field_error, observed_order, pointwise_error, DiagnosticsError, FieldLabel,
};
use kgspectral::problems::{sine_gordon_period, ProblemSpec};
use kgspectral::spectral::{GridField, GridSpec};
use kgspectral::stepper::{SolverParams, SpectralState, Stepper};
use proptest::prelude::*;

fn energy_drift(problem: &ProblemSpec, grid: &GridSpec, dt: f64, t_final: f64) -> f64 {
    let stepper = Stepper::new(problem, grid, SolverParams::crank_nicolson(dt).unwrap()).unwrap();
    let s0 = SpectralState::from_initial(problem, grid).unwrap();
    let e0 = energy(&s0, grid, problem).unwrap();
    let s1 = stepper.evolve(&s0, t_final, |_, _| {}).unwrap();
    (energy(&s1, grid, problem).unwrap() - e0).abs()
}

#[test]
fn linear_initial_energy() {
    // u = 0, v = cos(2πx/8): E = ∫ ½cos² = L/4
    let problem = ProblemSpec::linear_kg(8.0).unwrap();
    let grid = GridSpec::new(8.0, 32, 128).unwrap();
    let s = SpectralState::from_initial(&problem, &grid).unwrap();
    assert!((energy(&s, &grid, &problem).unwrap() - 2.0).abs() < 1e-14);
}

#[test]
fn crank_nicolson_conserves_linear_energy() {
    let problem = ProblemSpec::linear_kg(8.0).unwrap();
    let grid = GridSpec::new(8.0, 32, 128).unwrap();
    assert!(energy_drift(&problem, &grid, 2f64.powi(-6), 1.0) <= 1e-10);
}

#[test]
fn sine_gordon_energy_drift_is_second_order() {
    let problem = ProblemSpec::sine_gordon(sine_gordon_period()).unwrap();
    let grid = GridSpec::with_auto_points(problem.length, 32, 129).unwrap();
    let coarse = energy_drift(&problem, &grid, 2f64.powi(-5), 1.0);
    let fine = energy_drift(&problem, &grid, 2f64.powi(-6), 1.0);
    assert!(fine / coarse <= 0.35, "{coarse:e} -> {fine:e}");
}

proptest! {
    #[test]
    fn energy_survives_a_round_trip(shift in 0.0..3.0f64) {
        let problem = ProblemSpec::sine_gordon(sine_gordon_period()).unwrap();
        let grid = GridSpec::with_auto_points(problem.length, 16, 65).unwrap();
        let mut s = SpectralState::from_initial(&problem, &grid).unwrap();
        s.v.zero_mode += shift;
        let e = energy(&s, &grid, &problem).unwrap();
        let back = SpectralState {
            u: kgspectral::analyze(&s.u_field(&grid).unwrap(), &grid).unwrap(),
            v: kgspectral::analyze(&s.v_field(&grid).unwrap(), &grid).unwrap(),
            time: 0.0,
        };
        prop_assert!((energy(&back, &grid, &problem).unwrap() - e).abs() <= 1e-12 * e.abs().max(1.0));
    }

    #[test]
    fn mixed_error_is_the_smaller_measure(exact in -10.0..10.0f64, num in -10.0..10.0f64) {
        let e = pointwise_error(exact, num);
        let abs = (exact - num).abs();
        prop_assert!(e <= abs);
        if exact != 0.0 {
            prop_assert!(e <= abs / exact.abs() + 1e-15);
        }
    }
}

#[test]
fn mixed_error_examples() {
    assert_eq!(pointwise_error(0.0, 1e-3), 1e-3);
    assert!((pointwise_error(100.0, 101.0) - 0.01).abs() < 1e-15);
    assert_eq!(pointwise_error(0.5, 0.75), 0.25);
}

#[test]
fn field_error_takes_the_grid_maximum() {
    let grid = GridSpec::new(1.0, 1, 4).unwrap();
    let field = GridField::new(vec![0.0, 0.1, 0.0, -0.3]);
    let rep = field_error(&field, |_, _| 0.0, &grid, 0.0, FieldLabel::U).unwrap();
    assert_eq!(rep.max_error, 0.3);
    assert_eq!(rep.per_point.len(), 4);
    assert!(field_error(
        &GridField::new(vec![0.0; 3]),
        |_, _| 0.0,
        &grid,
        0.0,
        FieldLabel::V
    )
    .is_err());
}

#[test]
fn orders_from_halving_sequences() {
    let est = observed_order(&[(0.1, 4e-3), (0.05, 1e-3), (0.025, 0.0)]).unwrap();
    assert!((est[0].order.unwrap() - 2.0).abs() < 1e-12);
    assert_eq!(est[1].order, None);
    assert!(matches!(
        observed_order(&[(0.1, 1.0), (0.03, 0.1)]),
        Err(DiagnosticsError::NotHalving { .. })
    ));
}
