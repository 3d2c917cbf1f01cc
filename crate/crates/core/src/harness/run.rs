use std::fs;
use std::path::Path;

use crate::diagnostics::{field_error, FieldLabel};
use crate::problems::ProblemSpec;
use crate::spectral::GridSpec;
use crate::stepper::{step_count, SolverParams, SpectralState, StepReport, Stepper};

use super::config::RunConfig;
use super::csv::{exact_csv, fmt_f64, snapshot_csv};
use super::HarnessError;

/// Problem, grid and solver parameters resolved from a [`RunConfig`].
#[derive(Debug, Clone)]
pub struct Simulation {
    pub problem: ProblemSpec,
    pub grid: GridSpec,
    pub params: SolverParams,
    pub chop_initial: bool,
}

impl Simulation {
    pub fn from_config(cfg: &RunConfig) -> Result<Self, HarnessError> {
        let problem = cfg.build_problem()?;
        let grid = cfg.build_grid(&problem.nonlinearity, problem.length)?;
        let params = cfg.solver_params()?;
        Ok(Self {
            problem,
            grid,
            params,
            chop_initial: cfg.chop_initial,
        })
    }

    pub fn initial_state(&self) -> Result<SpectralState, HarnessError> {
        let s = if self.chop_initial {
            SpectralState::from_initial(&self.problem, &self.grid)?
        } else {
            SpectralState::from_initial_raw(&self.problem, &self.grid)?
        };
        Ok(s)
    }

    pub fn header(&self, t: f64) -> String {
        format!(
            "problem={} N={} J={} L={} theta={} dt={} t={}",
            self.problem.name,
            self.grid.modes(),
            self.grid.points(),
            fmt_f64(self.grid.length()),
            fmt_f64(self.params.theta),
            fmt_f64(self.params.dt),
            fmt_f64(t)
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub header: String,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRow {
    pub time: f64,
    pub error_u: f64,
    pub error_v: f64,
}

/// Where and why a run stopped early.
#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure {
    pub modes: usize,
    pub dt: f64,
    pub step_index: usize,
    pub time: f64,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub snapshots: Vec<Snapshot>,
    pub errors: Vec<ErrorRow>,
    /// `(t, report)` for every step; filled only with `step_log`.
    pub step_reports: Vec<(f64, StepReport)>,
    pub max_iterations: usize,
    pub steps_taken: usize,
    pub final_state: Option<SpectralState>,
    pub failure: Option<RunFailure>,
}

impl RunArtifacts {
    pub fn converged(&self) -> bool {
        self.failure.is_none()
    }
}

pub(super) fn capture(
    sim: &Simulation,
    state: &SpectralState,
    time: f64,
) -> Result<Snapshot, HarnessError> {
    let u = state.u_field(&sim.grid)?;
    let v = state.v_field(&sim.grid)?;
    Ok(Snapshot {
        time,
        header: sim.header(time),
        x: sim.grid.x_points(),
        u: u.samples,
        v: v.samples,
    })
}

pub(super) fn snapshot_errors(
    problem: &ProblemSpec,
    grid: &GridSpec,
    snap: &Snapshot,
) -> Result<Option<ErrorRow>, HarnessError> {
    let Some(exact) = problem.exact.as_ref() else {
        return Ok(None);
    };
    let u = crate::spectral::GridField::new(snap.u.clone());
    let v = crate::spectral::GridField::new(snap.v.clone());
    let eu = field_error(&u, |x, t| exact(x, t).0, grid, snap.time, FieldLabel::U)?;
    let ev = field_error(&v, |x, t| exact(x, t).1, grid, snap.time, FieldLabel::V)?;
    Ok(Some(ErrorRow {
        time: snap.time,
        error_u: eu.max_error,
        error_v: ev.max_error,
    }))
}

/// Runs one configuration to `t_final`, capturing snapshots (and errors,
/// when the problem has an exact solution) at every snapshot time.
///
/// Solver non-convergence is reported through [`RunArtifacts::failure`];
/// the `Err` path is reserved for configuration and setup problems.
pub fn run_single(cfg: &RunConfig) -> Result<RunArtifacts, HarnessError> {
    cfg.validate()?;
    let sim = Simulation::from_config(cfg)?;
    let stepper = Stepper::new(&sim.problem, &sim.grid, sim.params)?;
    let initial = sim.initial_state()?;

    let mut targets: Vec<(usize, f64)> = cfg
        .snapshot_times
        .iter()
        .map(|&t| Ok((step_count(t, cfg.dt)?, t)))
        .collect::<Result<_, crate::stepper::StepError>>()?;
    targets.sort_by_key(|t| t.0);
    targets.dedup_by_key(|t| t.0);

    let mut snapshots = Vec::with_capacity(targets.len());
    let mut next_target = 0;
    if let Some(&(0, t)) = targets.first() {
        // t = 0 is the sampled initial data itself, not its projection
        snapshots.push(Snapshot {
            time: t,
            header: sim.header(t),
            x: sim.grid.x_points(),
            u: sim.grid.sample(|x| (sim.problem.initial_u)(x)).samples,
            v: sim.grid.sample(|x| (sim.problem.initial_v)(x)).samples,
        });
        next_target = 1;
    }

    let mut step_reports = Vec::new();
    let mut max_iterations = 0;
    let mut steps_taken = 0;
    let mut capture_error = None;
    let result = stepper.evolve(&initial, cfg.t_final, |state, report| {
        steps_taken += 1;
        max_iterations = max_iterations.max(report.iterations_used);
        if cfg.step_log {
            step_reports.push((state.time, *report));
        }
        if let Some(&(idx, t)) = targets.get(next_target) {
            if idx == steps_taken {
                match capture(&sim, state, t) {
                    Ok(s) => snapshots.push(s),
                    Err(e) => capture_error = Some(e),
                }
                next_target += 1;
            }
        }
    });
    if let Some(e) = capture_error {
        return Err(e);
    }

    let (final_state, failure) = match result {
        Ok(s) => (Some(s), None),
        Err(e) => (
            None,
            Some(RunFailure {
                modes: cfg.modes,
                dt: cfg.dt,
                step_index: e.step_index,
                time: e.time,
                message: e.source.to_string(),
            }),
        ),
    };

    let mut errors = Vec::new();
    for snap in &snapshots {
        if let Some(row) = snapshot_errors(&sim.problem, &sim.grid, snap)? {
            errors.push(row);
        }
    }

    Ok(RunArtifacts {
        snapshots,
        errors,
        step_reports,
        max_iterations,
        steps_taken,
        final_state,
        failure,
    })
}

/// Writes `snapshot_<k>.csv`, `errors.csv`, `steps.csv` (with step
/// logging) and `failure.csv` (on non-convergence) into `dir`.
pub fn write_run(art: &RunArtifacts, dir: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(dir)?;
    for (k, s) in art.snapshots.iter().enumerate() {
        fs::write(
            dir.join(format!("snapshot_{k}.csv")),
            snapshot_csv(&s.header, &s.x, &s.u, &s.v),
        )?;
    }
    if !art.errors.is_empty() {
        let mut text = String::from("t,error_u,error_v\n");
        for e in &art.errors {
            text.push_str(&format!(
                "{},{},{}\n",
                fmt_f64(e.time),
                fmt_f64(e.error_u),
                fmt_f64(e.error_v)
            ));
        }
        fs::write(dir.join("errors.csv"), text)?;
    }
    if !art.step_reports.is_empty() {
        let mut text = String::from("step,t,iterations,residual,tolerance\n");
        for (i, (t, r)) in art.step_reports.iter().enumerate() {
            text.push_str(&format!(
                "{},{},{},{},{}\n",
                i + 1,
                fmt_f64(*t),
                r.iterations_used,
                fmt_f64(r.final_residual),
                fmt_f64(r.tolerance)
            ));
        }
        fs::write(dir.join("steps.csv"), text)?;
    }
    if let Some(f) = &art.failure {
        let text = format!(
            "N,dt,step_index,t,message\n{},{},{},{},\"{}\"\n",
            f.modes,
            fmt_f64(f.dt),
            f.step_index,
            fmt_f64(f.time),
            f.message.replace('"', "'")
        );
        fs::write(dir.join("failure.csv"), text)?;
    }
    Ok(())
}

/// Exact `u`, `v` on the grid at each requested time, as CSV
/// `x,t,u_exact,v_exact`.
pub fn emit_exact(
    problem: &ProblemSpec,
    grid: &GridSpec,
    times: &[f64],
) -> Result<String, HarnessError> {
    let exact = problem
        .exact
        .as_ref()
        .ok_or_else(|| HarnessError::NoExact(problem.name.clone()))?;
    let mut rows = Vec::with_capacity(times.len() * grid.points());
    for &t in times {
        for x in grid.x_points() {
            let (u, v) = exact(x, t);
            rows.push((x, t, u, v));
        }
    }
    Ok(exact_csv(&rows))
}
