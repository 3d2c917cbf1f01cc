//! CSV writers and readers for snapshots, sweep tables, order tables and
//! exact-solution exports.
//!
//! Floats are written in their shortest round-trip decimal form, so equal
//! inputs always give byte-identical files and every value re-parses to
//! the same `f64`.

use std::fmt::Write as _;

use super::HarnessError;

/// Shortest round-trip decimal; scientific notation outside
/// `[1e-5, 1e16)`.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Snapshot table `x,u,v` behind a `#` header line carrying the run
/// parameters.
pub fn snapshot_csv(header: &str, x: &[f64], u: &[f64], v: &[f64]) -> String {
    let mut out = String::with_capacity(64 * x.len());
    let _ = writeln!(out, "# {header}");
    out.push_str("x,u,v\n");
    for ((x, u), v) in x.iter().zip(u).zip(v) {
        let _ = writeln!(out, "{},{},{}", fmt_f64(*x), fmt_f64(*u), fmt_f64(*v));
    }
    out
}

/// One row of a sweep table.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub modes: usize,
    pub dt: f64,
    pub error_u: f64,
    pub error_v: f64,
    pub iterations: usize,
    pub converged: bool,
    pub wall_seconds: f64,
}

pub const SWEEP_HEADER: &str = "N,dt,error_u,error_v,iters,converged,wall_seconds";

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::new();
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.modes,
            fmt_f64(r.dt),
            fmt_f64(r.error_u),
            fmt_f64(r.error_v),
            r.iterations,
            r.converged,
            fmt_f64(r.wall_seconds)
        );
    }
    out
}

pub fn parse_sweep_csv(text: &str) -> Result<Vec<SweepRow>, HarnessError> {
    let bad = |line: usize, msg: &str| HarnessError::Csv(format!("line {line}: {msg}"));
    let mut rows = Vec::new();
    let mut header_seen = false;
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !header_seen {
            if line != SWEEP_HEADER {
                return Err(bad(lineno, &format!("expected header '{SWEEP_HEADER}'")));
            }
            header_seen = true;
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 7 {
            return Err(bad(lineno, "expected 7 columns"));
        }
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| bad(lineno, &format!("bad number '{s}'")))
        };
        rows.push(SweepRow {
            modes: cols[0].parse().map_err(|_| bad(lineno, "bad N"))?,
            dt: num(cols[1])?,
            error_u: num(cols[2])?,
            error_v: num(cols[3])?,
            iterations: cols[4].parse().map_err(|_| bad(lineno, "bad iters"))?,
            converged: cols[5]
                .parse()
                .map_err(|_| bad(lineno, "bad converged flag"))?,
            wall_seconds: num(cols[6])?,
        });
    }
    if !header_seen {
        return Err(HarnessError::Csv("missing sweep header".into()));
    }
    Ok(rows)
}

/// One row of an order table; `None` marks an excluded pair.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderRow {
    pub modes: usize,
    pub dt_coarse: f64,
    pub dt_fine: f64,
    pub p_u: Option<f64>,
    pub p_v: Option<f64>,
}

pub fn order_csv(rows: &[OrderRow]) -> String {
    let opt = |p: Option<f64>| p.map(fmt_f64).unwrap_or_default();
    let mut out = String::from("N,dt_pair,p_u,p_v\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{}:{},{},{}",
            r.modes,
            fmt_f64(r.dt_coarse),
            fmt_f64(r.dt_fine),
            opt(r.p_u),
            opt(r.p_v)
        );
    }
    out
}

/// Exact-solution export rows `(x, t, u, v)`.
pub fn exact_csv(rows: &[(f64, f64, f64, f64)]) -> String {
    let mut out = String::from("x,t,u_exact,v_exact\n");
    for (x, t, u, v) in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_f64(*x),
            fmt_f64(*t),
            fmt_f64(*u),
            fmt_f64(*v)
        );
    }
    out
}

/// Parses a headed numeric CSV (skipping `#` lines) into rows.
pub fn parse_numeric_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>), HarnessError> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| HarnessError::Csv("empty file".into()))?
        .split(',')
        .map(String::from)
        .collect();
    let rows = lines
        .map(|l| {
            let row = l
                .split(',')
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|_| HarnessError::Csv(format!("bad number '{s}'")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            if row.len() != header.len() {
                return Err(HarnessError::Csv(format!(
                    "row has {} columns, header {}",
                    row.len(),
                    header.len()
                )));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((header, rows))
}
