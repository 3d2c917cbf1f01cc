//! Error measures against exact solutions, the Klein-Gordon energy and
//! empirical convergence orders.

use std::fmt;

use thiserror::Error;

use crate::problems::ProblemSpec;
use crate::spectral::{synthesize, GridField, GridSpec, TransformError};
use crate::stepper::SpectralState;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticsError {
    #[error("expected {expected} samples, found {found}")]
    Length { expected: usize, found: usize },
    #[error("time steps {coarse} and {fine} are not in ratio 2:1")]
    NotHalving { coarse: f64, fine: f64 },
    #[error(transparent)]
    Transform(#[from] TransformError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldLabel {
    U,
    V,
}

impl fmt::Display for FieldLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::U => "u",
            Self::V => "v",
        })
    }
}

/// Per-point error `err(x_j)` and its maximum over the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub per_point: Vec<f64>,
    pub max_error: f64,
    pub field: FieldLabel,
    pub time: f64,
}

/// `min(|exact − numeric|, |exact − numeric| / |exact|)`; the absolute
/// error alone when `exact` is zero.
pub fn pointwise_error(exact: f64, numeric: f64) -> f64 {
    let abs_err = (exact - numeric).abs();
    if exact == 0.0 {
        return abs_err;
    }
    abs_err.min(abs_err / exact.abs())
}

/// Mixed error of `numeric` against `exact(x, t)` at every grid point.
pub fn field_error(
    numeric: &GridField,
    exact: impl Fn(f64, f64) -> f64,
    grid: &GridSpec,
    t: f64,
    field: FieldLabel,
) -> Result<ErrorReport, DiagnosticsError> {
    if numeric.len() != grid.points() {
        return Err(DiagnosticsError::Length {
            expected: grid.points(),
            found: numeric.len(),
        });
    }
    let per_point: Vec<f64> = numeric
        .samples
        .iter()
        .enumerate()
        .map(|(j, &n)| pointwise_error(exact(grid.x(j), t), n))
        .collect();
    // NaN-propagating max: a NaN sample must not hide behind fold(max)
    let max_error = per_point.iter().copied().fold(0.0_f64, |m, e| {
        if e.is_nan() || m.is_nan() {
            f64::NAN
        } else {
            m.max(e)
        }
    });
    Ok(ErrorReport {
        per_point,
        max_error,
        field,
        time: t,
    })
}

/// Errors of `u` and `v` at `state.time`, or `None` when the problem has
/// no exact solution.
pub fn state_errors(
    state: &SpectralState,
    grid: &GridSpec,
    problem: &ProblemSpec,
) -> Result<Option<(ErrorReport, ErrorReport)>, DiagnosticsError> {
    let Some(exact) = problem.exact.as_ref() else {
        return Ok(None);
    };
    let u = synthesize(&state.u, grid)?;
    let v = synthesize(&state.v, grid)?;
    let eu = field_error(&u, |x, t| exact(x, t).0, grid, state.time, FieldLabel::U)?;
    let ev = field_error(&v, |x, t| exact(x, t).1, grid, state.time, FieldLabel::V)?;
    Ok(Some((eu, ev)))
}

/// Discrete energy
/// `E = (L/J) Σ_j [½v_j² − ½α(∂ₓu)_j² + βG(u_j)]` with `G' = F`, `G(0) = 0`
/// and `∂ₓu` taken spectrally.
pub fn energy(
    state: &SpectralState,
    grid: &GridSpec,
    problem: &ProblemSpec,
) -> Result<f64, DiagnosticsError> {
    let u = synthesize(&state.u, grid)?;
    let v = synthesize(&state.v, grid)?;
    let ux = synthesize(&state.u.derivative(grid.length()), grid)?;
    let nl = &problem.nonlinearity;
    let sum: f64 = u
        .samples
        .iter()
        .zip(&v.samples)
        .zip(&ux.samples)
        .map(|((&u, &v), &ux)| {
            0.5 * v * v - 0.5 * problem.alpha * ux * ux + problem.beta * nl.potential(u)
        })
        .sum();
    Ok(sum * grid.spacing())
}

/// Observed order between two runs whose time steps differ by a factor 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderEstimate {
    pub dt_coarse: f64,
    pub dt_fine: f64,
    /// `log₂(E_coarse / E_fine)`; `None` if either error is zero or not
    /// finite.
    pub order: Option<f64>,
}

/// `p_i = log₂(E_i / E_{i+1})` for consecutive entries of a halving
/// sequence of `(dt, error)` pairs.
pub fn observed_order(errors: &[(f64, f64)]) -> Result<Vec<OrderEstimate>, DiagnosticsError> {
    errors
        .windows(2)
        .map(|w| {
            let ((dt0, e0), (dt1, e1)) = (w[0], w[1]);
            let gap = (dt0 - 2.0 * dt1).abs();
            if gap.is_nan() || gap > 1e-12 * dt0 {
                return Err(DiagnosticsError::NotHalving {
                    coarse: dt0,
                    fine: dt1,
                });
            }
            let usable = |e: f64| e.is_finite() && e > 0.0;
            let order = (usable(e0) && usable(e1)).then(|| (e0 / e1).log2());
            Ok(OrderEstimate {
                dt_coarse: dt0,
                dt_fine: dt1,
                order,
            })
        })
        .collect()
}
