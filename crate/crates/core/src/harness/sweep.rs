use std::collections::BTreeMap;
use std::time::Instant;

use crate::diagnostics::observed_order;
use crate::parallel::{self, Execution};
use crate::stepper::Stepper;

use super::config::{RunConfig, SweepConfig};
use super::csv::{OrderRow, SweepRow};
use super::run::{capture, snapshot_errors, Simulation};
use super::HarnessError;

/// Runs one `(N, Δt)` cell of a sweep to `base.t_final`. Failures of any
/// kind become a non-converged row with NaN errors.
pub fn run_cell(base: &RunConfig, modes: usize, dt: f64) -> SweepRow {
    let start = Instant::now();
    let mut cfg = base.clone();
    cfg.modes = modes;
    cfg.dt = dt;
    cfg.snapshot_times.clear();

    let mut row = SweepRow {
        modes,
        dt,
        error_u: f64::NAN,
        error_v: f64::NAN,
        iterations: 0,
        converged: false,
        wall_seconds: 0.0,
    };
    let outcome = (|| -> Result<(), HarnessError> {
        let sim = Simulation::from_config(&cfg)?;
        let stepper = Stepper::new(&sim.problem, &sim.grid, sim.params)?;
        let initial = sim.initial_state()?;
        let mut iters = 0;
        let result = stepper.evolve(&initial, cfg.t_final, |_, r| {
            iters = iters.max(r.iterations_used)
        });
        row.iterations = iters;
        let state = match result {
            Ok(s) => s,
            Err(e) => {
                row.iterations = row.iterations.max(sim.params.fp_max_iter);
                return Err(e.source.into());
            }
        };
        row.converged = true;
        if sim.problem.has_exact() {
            let snap = capture(&sim, &state, cfg.t_final)?;
            if let Some(e) = snapshot_errors(&sim.problem, &sim.grid, &snap)? {
                row.error_u = e.error_u;
                row.error_v = e.error_v;
            }
        }
        Ok(())
    })();
    if outcome.is_err() {
        row.converged = false;
    }
    row.wall_seconds = start.elapsed().as_secs_f64();
    row
}

/// Runs every cell of the sweep. Cells are independent and run on the
/// rayon pool when `exec` (and `cfg.parallel`) allow; the table is in
/// `(N ascending, Δt descending)` order regardless.
pub fn run_sweep(cfg: &SweepConfig, exec: Execution) -> Result<Vec<SweepRow>, HarnessError> {
    cfg.validate()?;
    let exec = if cfg.parallel {
        exec
    } else {
        Execution::Sequential
    };
    let cells = cfg.cells();
    let mut rows = parallel::map(&cells, exec, |&(n, dt)| run_cell(&cfg.base, n, dt));
    if !cfg.record_timing {
        for r in &mut rows {
            r.wall_seconds = 0.0;
        }
    }
    Ok(rows)
}

/// Observed orders between consecutive halvings of `Δt`, per `N`.
/// Non-converged cells give excluded (`None`) orders.
pub fn orders_from_sweep(rows: &[SweepRow]) -> Vec<OrderRow> {
    let mut by_n: BTreeMap<usize, Vec<&SweepRow>> = BTreeMap::new();
    for r in rows {
        by_n.entry(r.modes).or_default().push(r);
    }
    let mut out = Vec::new();
    for (n, mut cells) in by_n {
        cells.sort_by(|a, b| b.dt.total_cmp(&a.dt));
        for pair in cells.windows(2) {
            let err = |r: &SweepRow, v: f64| if r.converged { v } else { f64::NAN };
            let us = [
                (pair[0].dt, err(pair[0], pair[0].error_u)),
                (pair[1].dt, err(pair[1], pair[1].error_u)),
            ];
            let vs = [
                (pair[0].dt, err(pair[0], pair[0].error_v)),
                (pair[1].dt, err(pair[1], pair[1].error_v)),
            ];
            // pairs that are not a clean halving are skipped
            let (Ok(pu), Ok(pv)) = (observed_order(&us), observed_order(&vs)) else {
                continue;
            };
            out.push(OrderRow {
                modes: n,
                dt_coarse: pair[0].dt,
                dt_fine: pair[1].dt,
                p_u: pu[0].order,
                p_v: pv[0].order,
            });
        }
    }
    out
}
