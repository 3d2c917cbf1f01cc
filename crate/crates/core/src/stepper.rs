//! θ-scheme time stepping of the Fourier coefficients, solved at each step
//! by fixed-point iteration.
//!
//! For every mode `l` (with `κ_l = α(2πl/L)²`, and `κ_0 = 0` for the
//! constant mode) one sweep maps the ν-th iterate to the (ν+1)-th:
//!
//! ```text
//! a^{ν+1} = aⁿ + Δt(1−θ)cⁿ + Δtθ c^ν
//! c^{ν+1} = cⁿ + (1−θ)Δt[κ aⁿ − βF̂ⁿ] + θΔt[κ a^ν − βF̂^ν]
//! ```
//!
//! and the same for the sine pair `(b, d)` with `Ĝ` in place of `F̂`. The
//! level-n half of each update is computed once per step.

use std::fmt;

use thiserror::Error;

use crate::problems::{nonlinear_spectrum, AliasPolicy, ProblemError, ProblemSpec};
use crate::spectral::{analyze, synthesize, GridField, GridSpec, RealCoeffs, TransformError};

pub const DEFAULT_FP_TOL: f64 = 1e-14;
pub const DEFAULT_FP_REL_TOL: f64 = 1e-14;
pub const DEFAULT_FP_MAX_ITER: usize = 100;

/// Relative level below which projected initial coefficients are FFT
/// round-off and get set to zero.
pub const PROJECTION_CHOP: f64 = 16.0 * f64::EPSILON;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StepError {
    #[error("invalid solver parameters: {0}")]
    InvalidParams(String),
    #[error("grid has {expected} modes, state has {found}")]
    ModeMismatch { expected: usize, found: usize },
    #[error("non-finite coefficient after fixed-point sweep {iteration}")]
    Divergence { iteration: usize },
    #[error("fixed-point iteration did not converge in {iterations} sweeps (residual {residual:e} > {tolerance:e})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        tolerance: f64,
    },
    #[error(transparent)]
    Problem(#[from] ProblemError),
}

impl From<TransformError> for StepError {
    fn from(e: TransformError) -> Self {
        Self::Problem(ProblemError::Transform(e))
    }
}

/// Step failure inside [`evolve`], tagged with the 0-based step index.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("step {step_index} (t = {time}) failed: {source}")]
pub struct EvolveError {
    pub step_index: usize,
    pub time: f64,
    #[source]
    pub source: StepError,
}

/// Fourier coefficients of `u` (`a₀, a_l, b_l`) and `v` (`c₀, c_l, d_l`)
/// at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralState {
    pub u: RealCoeffs,
    pub v: RealCoeffs,
    pub time: f64,
}

impl SpectralState {
    pub fn zeros(modes: usize) -> Self {
        Self {
            u: RealCoeffs::zeros(modes),
            v: RealCoeffs::zeros(modes),
            time: 0.0,
        }
    }

    /// Projects the problem's initial data onto the grid at `t = 0` and
    /// clears round-off level coefficients (see [`PROJECTION_CHOP`]).
    ///
    /// Modes that are exactly zero stay zero under the linear update, so
    /// chopping matters when `θΔt·ω_N > 1`: there the fixed-point sweep
    /// amplifies any content in the top modes, including transform noise.
    pub fn from_initial(problem: &ProblemSpec, grid: &GridSpec) -> Result<Self, TransformError> {
        let mut s = Self::from_initial_raw(problem, grid)?;
        s.u.chop(PROJECTION_CHOP);
        s.v.chop(PROJECTION_CHOP);
        Ok(s)
    }

    /// Projection of the initial data without any chopping.
    pub fn from_initial_raw(
        problem: &ProblemSpec,
        grid: &GridSpec,
    ) -> Result<Self, TransformError> {
        Ok(Self {
            u: analyze(&grid.sample(|x| (problem.initial_u)(x)), grid)?,
            v: analyze(&grid.sample(|x| (problem.initial_v)(x)), grid)?,
            time: 0.0,
        })
    }

    pub fn modes(&self) -> usize {
        self.u.modes()
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.v.is_finite()
    }

    pub fn max_abs(&self) -> f64 {
        self.u.max_abs().max(self.v.max_abs())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.u
            .max_abs_diff(&other.u)
            .max(self.v.max_abs_diff(&other.v))
    }

    pub fn u_field(&self, grid: &GridSpec) -> Result<GridField, TransformError> {
        synthesize(&self.u, grid)
    }

    pub fn v_field(&self, grid: &GridSpec) -> Result<GridField, TransformError> {
        synthesize(&self.v, grid)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverParams {
    pub theta: f64,
    pub dt: f64,
    /// Absolute part of the sweep-change tolerance.
    pub fp_tol: f64,
    /// Relative part, scaled by the largest coefficient magnitude.
    pub fp_rel_tol: f64,
    pub fp_max_iter: usize,
    pub alias_policy: AliasPolicy,
}

impl SolverParams {
    pub fn new(theta: f64, dt: f64) -> Result<Self, StepError> {
        let p = Self {
            theta,
            dt,
            fp_tol: DEFAULT_FP_TOL,
            fp_rel_tol: DEFAULT_FP_REL_TOL,
            fp_max_iter: DEFAULT_FP_MAX_ITER,
            alias_policy: AliasPolicy::Strict,
        };
        p.validate()?;
        Ok(p)
    }

    /// Crank-Nicolson, `θ = 1/2`.
    pub fn crank_nicolson(dt: f64) -> Result<Self, StepError> {
        Self::new(0.5, dt)
    }

    pub fn validate(&self) -> Result<(), StepError> {
        let bad = |msg: String| Err(StepError::InvalidParams(msg));
        if !(0.0..=1.0).contains(&self.theta) {
            return bad(format!("theta must lie in [0, 1], got {}", self.theta));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad(format!("dt must be finite and positive, got {}", self.dt));
        }
        if !(self.fp_tol.is_finite() && self.fp_tol > 0.0) {
            return bad(format!("fp_tol must be positive, got {}", self.fp_tol));
        }
        if !(self.fp_rel_tol.is_finite() && self.fp_rel_tol >= 0.0) {
            return bad(format!(
                "fp_rel_tol must be non-negative, got {}",
                self.fp_rel_tol
            ));
        }
        if self.fp_max_iter == 0 {
            return bad("fp_max_iter must be at least 1".into());
        }
        Ok(())
    }

    /// Convergence threshold for a sweep that produced coefficients of
    /// magnitude up to `scale`.
    pub fn threshold(&self, scale: f64) -> f64 {
        self.fp_tol + self.fp_rel_tol * scale
    }
}

/// Outcome of one time step. `converged` implies
/// `final_residual <= tolerance`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub iterations_used: usize,
    pub final_residual: f64,
    pub tolerance: f64,
    pub converged: bool,
}

impl fmt::Display for StepReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} sweeps, residual {:e} (tol {:e}){}",
            self.iterations_used,
            self.final_residual,
            self.tolerance,
            if self.converged {
                ""
            } else {
                ", NOT converged"
            }
        )
    }
}

/// Stepper bound to one problem, grid and parameter set. Holds the
/// per-mode stiffness `κ_l = α(2πl/L)²`.
#[derive(Debug, Clone)]
pub struct Stepper<'a> {
    problem: &'a ProblemSpec,
    grid: &'a GridSpec,
    params: SolverParams,
    kappa: Vec<f64>,
}

impl<'a> Stepper<'a> {
    pub fn new(
        problem: &'a ProblemSpec,
        grid: &'a GridSpec,
        params: SolverParams,
    ) -> Result<Self, StepError> {
        params.validate()?;
        if problem.length != grid.length() {
            return Err(StepError::InvalidParams(format!(
                "problem length {} differs from grid length {}",
                problem.length,
                grid.length()
            )));
        }
        let kappa = (1..=grid.modes())
            .map(|l| {
                let k = 2.0 * std::f64::consts::PI * l as f64 / problem.length;
                problem.alpha * k * k
            })
            .collect();
        Ok(Self {
            problem,
            grid,
            params,
            kappa,
        })
    }

    pub fn params(&self) -> &SolverParams {
        &self.params
    }

    fn check_modes(&self, s: &SpectralState) -> Result<(), StepError> {
        let n = self.grid.modes();
        for c in [&s.u, &s.v] {
            if c.cos_modes.len() != n || c.sin_modes.len() != n {
                return Err(StepError::ModeMismatch {
                    expected: n,
                    found: c.cos_modes.len().max(c.sin_modes.len()),
                });
            }
        }
        Ok(())
    }

    fn spectrum(&self, u: &RealCoeffs) -> Result<RealCoeffs, StepError> {
        Ok(nonlinear_spectrum(
            u,
            self.grid,
            &self.problem.nonlinearity,
            self.params.alias_policy,
        )?)
    }

    /// Level-n half of the update, `(1−θ)` terms included.
    fn explicit_part(&self, state_n: &SpectralState, f_n: &RealCoeffs) -> SpectralState {
        let dt = self.params.dt;
        let w = (1.0 - self.params.theta) * dt;
        let beta = self.problem.beta;
        let pair = |a: f64, c: f64, kappa: f64, f: f64| (a + w * c, c + w * (kappa * a - beta * f));

        let mut out = SpectralState::zeros(state_n.modes());
        let (a0, c0) = pair(state_n.u.zero_mode, state_n.v.zero_mode, 0.0, f_n.zero_mode);
        out.u.zero_mode = a0;
        out.v.zero_mode = c0;
        for (i, &kappa) in self.kappa.iter().enumerate() {
            let (a, c) = pair(
                state_n.u.cos_modes[i],
                state_n.v.cos_modes[i],
                kappa,
                f_n.cos_modes[i],
            );
            out.u.cos_modes[i] = a;
            out.v.cos_modes[i] = c;
            let (b, d) = pair(
                state_n.u.sin_modes[i],
                state_n.v.sin_modes[i],
                kappa,
                f_n.sin_modes[i],
            );
            out.u.sin_modes[i] = b;
            out.v.sin_modes[i] = d;
        }
        out
    }

    /// Adds the level-(n+1) half evaluated at the current iterate.
    fn implicit_update(
        &self,
        base: &SpectralState,
        guess: &SpectralState,
        f_guess: &RealCoeffs,
    ) -> SpectralState {
        let w = self.params.theta * self.params.dt;
        let beta = self.problem.beta;
        let pair = |a_base: f64, c_base: f64, a: f64, c: f64, kappa: f64, f: f64| {
            (a_base + w * c, c_base + w * (kappa * a - beta * f))
        };

        let mut out = SpectralState::zeros(base.modes());
        let (a0, c0) = pair(
            base.u.zero_mode,
            base.v.zero_mode,
            guess.u.zero_mode,
            guess.v.zero_mode,
            0.0,
            f_guess.zero_mode,
        );
        out.u.zero_mode = a0;
        out.v.zero_mode = c0;
        for (i, &kappa) in self.kappa.iter().enumerate() {
            let (a, c) = pair(
                base.u.cos_modes[i],
                base.v.cos_modes[i],
                guess.u.cos_modes[i],
                guess.v.cos_modes[i],
                kappa,
                f_guess.cos_modes[i],
            );
            out.u.cos_modes[i] = a;
            out.v.cos_modes[i] = c;
            let (b, d) = pair(
                base.u.sin_modes[i],
                base.v.sin_modes[i],
                guess.u.sin_modes[i],
                guess.v.sin_modes[i],
                kappa,
                f_guess.sin_modes[i],
            );
            out.u.sin_modes[i] = b;
            out.v.sin_modes[i] = d;
        }
        out.time = base.time;
        out
    }

    /// One fixed-point sweep: the (ν+1)-th iterate from the ν-th.
    pub fn sweep(
        &self,
        state_n: &SpectralState,
        guess: &SpectralState,
    ) -> Result<SpectralState, StepError> {
        self.check_modes(state_n)?;
        self.check_modes(guess)?;
        let base = self.explicit_part(state_n, &self.spectrum(&state_n.u)?);
        let mut next = self.implicit_update(&base, guess, &self.spectrum(&guess.u)?);
        next.time = guess.time;
        if !next.is_finite() {
            return Err(StepError::Divergence { iteration: 1 });
        }
        Ok(next)
    }

    /// Advances one time level.
    pub fn step(&self, state_n: &SpectralState) -> Result<(SpectralState, StepReport), StepError> {
        self.step_traced(state_n, None)
    }

    /// Like [`Stepper::step`], also recording the change of every sweep.
    pub fn step_with_history(
        &self,
        state_n: &SpectralState,
    ) -> Result<(SpectralState, StepReport, Vec<f64>), StepError> {
        let mut history = Vec::new();
        let (s, r) = self.step_traced(state_n, Some(&mut history))?;
        Ok((s, r, history))
    }

    fn step_traced(
        &self,
        state_n: &SpectralState,
        mut history: Option<&mut Vec<f64>>,
    ) -> Result<(SpectralState, StepReport), StepError> {
        self.check_modes(state_n)?;
        if !state_n.is_finite() {
            return Err(StepError::Divergence { iteration: 0 });
        }
        let mut base = self.explicit_part(state_n, &self.spectrum(&state_n.u)?);
        base.time = state_n.time + self.params.dt;

        let explicit = self.params.theta == 0.0;
        let mut guess = state_n.clone();
        guess.time = base.time;
        let mut residual = f64::INFINITY;
        let mut tolerance = self.params.fp_tol;
        for iteration in 1..=self.params.fp_max_iter {
            let f_guess = if explicit {
                RealCoeffs::zeros(self.grid.modes())
            } else {
                self.spectrum(&guess.u)?
            };
            let next = self.implicit_update(&base, &guess, &f_guess);
            if !next.is_finite() {
                return Err(StepError::Divergence { iteration });
            }
            residual = if explicit {
                0.0
            } else {
                next.max_abs_diff(&guess)
            };
            tolerance = self.params.threshold(next.max_abs());
            if let Some(h) = history.as_deref_mut() {
                h.push(residual);
            }
            guess = next;
            if residual <= tolerance {
                let report = StepReport {
                    iterations_used: iteration,
                    final_residual: residual,
                    tolerance,
                    converged: true,
                };
                return Ok((guess, report));
            }
        }
        Err(StepError::NonConvergence {
            iterations: self.params.fp_max_iter,
            residual,
            tolerance,
        })
    }

    /// Largest coefficient mismatch when `(state_n, state_np1)` is
    /// substituted into the full θ-scheme system.
    pub fn implicit_residual(
        &self,
        state_n: &SpectralState,
        state_np1: &SpectralState,
    ) -> Result<f64, StepError> {
        let again = self.sweep(state_n, state_np1)?;
        Ok(again.max_abs_diff(state_np1))
    }

    /// Evolves from `initial` to `t_final`, calling `observer` with every
    /// accepted state and its step report.
    pub fn evolve<F>(
        &self,
        initial: &SpectralState,
        t_final: f64,
        mut observer: F,
    ) -> Result<SpectralState, EvolveError>
    where
        F: FnMut(&SpectralState, &StepReport),
    {
        let wrap = |step_index: usize, time: f64, source: StepError| EvolveError {
            step_index,
            time,
            source,
        };
        let steps = step_count(t_final - initial.time, self.params.dt)
            .map_err(|e| wrap(0, initial.time, e))?;
        let mut state = initial.clone();
        for i in 0..steps {
            let (mut next, report) = self.step(&state).map_err(|e| wrap(i, state.time, e))?;
            // avoid accumulating Δt round-off in the clock
            next.time = initial.time + (i + 1) as f64 * self.params.dt;
            observer(&next, &report);
            state = next;
        }
        Ok(state)
    }
}

/// Number of steps of size `dt` covering `duration`; `duration` must be an
/// integer multiple of `dt` up to rounding.
pub fn step_count(duration: f64, dt: f64) -> Result<usize, StepError> {
    if !(duration.is_finite() && duration >= 0.0) {
        return Err(StepError::InvalidParams(format!(
            "evolution time must be finite and non-negative, got {duration}"
        )));
    }
    let n = (duration / dt).round();
    let slack = 4.0 * f64::EPSILON * duration.max(dt);
    if (n * dt - duration).abs() > slack {
        return Err(StepError::InvalidParams(format!(
            "t_final = {duration} is not an integer multiple of dt = {dt}"
        )));
    }
    Ok(n as usize)
}

/// One fixed-point sweep from iterate `guess` toward level `n+1`.
pub fn fixed_point_sweep(
    state_n: &SpectralState,
    guess: &SpectralState,
    params: &SolverParams,
    problem: &ProblemSpec,
    grid: &GridSpec,
) -> Result<SpectralState, StepError> {
    Stepper::new(problem, grid, *params)?.sweep(state_n, guess)
}

pub fn step(
    state_n: &SpectralState,
    params: &SolverParams,
    problem: &ProblemSpec,
    grid: &GridSpec,
) -> Result<(SpectralState, StepReport), StepError> {
    Stepper::new(problem, grid, *params)?.step(state_n)
}

pub fn evolve<F>(
    initial: &SpectralState,
    t_final: f64,
    params: &SolverParams,
    problem: &ProblemSpec,
    grid: &GridSpec,
    observer: F,
) -> Result<SpectralState, EvolveError>
where
    F: FnMut(&SpectralState, &StepReport),
{
    let stepper = Stepper::new(problem, grid, *params).map_err(|source| EvolveError {
        step_index: 0,
        time: initial.time,
        source,
    })?;
    stepper.evolve(initial, t_final, observer)
}
