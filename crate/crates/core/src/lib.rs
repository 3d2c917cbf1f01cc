//! Fourier-spectral solver for one-dimensional periodic Klein-Gordon type
//! equations
//!
//! ```text
//! u_tt + α u_xx + β F(u) = 0,    x ∈ [0, L) periodic
//! ```
//!
//! The solution is expanded in `N` cosine/sine mode pairs, nonlinear terms
//! are evaluated on a `J`-point collocation grid through an FFT, and time
//! is advanced with the θ-scheme whose implicit stage is solved by
//! fixed-point iteration.
//!
//! ```
//! use kgspectral::{problems::ProblemSpec, spectral::GridSpec, stepper::{SolverParams, SpectralState, Stepper}};
//!
//! let problem = ProblemSpec::linear_kg(8.0).unwrap();
//! let grid = GridSpec::new(8.0, 32, 128).unwrap();
//! let params = SolverParams::crank_nicolson(2f64.powi(-8)).unwrap();
//! let stepper = Stepper::new(&problem, &grid, params).unwrap();
//! let init = SpectralState::from_initial(&problem, &grid).unwrap();
//! let state = stepper.evolve(&init, 1.0, |_, _| {}).unwrap();
//! assert_eq!(state.time, 1.0);
//! ```

pub mod diagnostics;
pub mod elliptic;
pub mod harness;
pub mod parallel;
pub mod problems;
pub mod spectral;
pub mod stepper;

pub use diagnostics::{
    energy, field_error, observed_order, pointwise_error, ErrorReport, FieldLabel,
};
pub use elliptic::{complete_elliptic_k, jacobi_sn_cn_dn, EllipticModulus, JacobiTriple};
pub use problems::{
    linear_exact, nonlinear_spectrum, sine_gordon_exact, Nonlinearity, ProblemSpec,
};
pub use spectral::{analyze, synthesize, GridField, GridSpec, RealCoeffs};
pub use stepper::{SolverParams, SpectralState, StepReport, Stepper};
