//! Flat `key = value` run and sweep configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Numbers may be
//! written as plain decimals or as powers of two (`2^-10`). Lists are
//! comma separated, integer ranges are inclusive (`4..12`).

use std::ops::RangeInclusive;
use std::path::PathBuf;

use crate::problems::{AliasPolicy, Nonlinearity, ProblemOptions, ProblemSpec};
use crate::spectral::GridSpec;
use crate::stepper::{
    step_count, SolverParams, DEFAULT_FP_MAX_ITER, DEFAULT_FP_REL_TOL, DEFAULT_FP_TOL,
};

use super::HarnessError;

/// One solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: String,
    /// Domain length; `None` picks the problem default (8 for linear-kg,
    /// `4K(1/2)` for sine-gordon).
    pub length: Option<f64>,
    pub modes: usize,
    /// Collocation count; `None` picks the smallest power of two above the
    /// nonlinearity's bound.
    pub points: Option<usize>,
    pub theta: f64,
    pub dt: f64,
    pub t_final: f64,
    pub snapshot_times: Vec<f64>,
    pub fp_tol: f64,
    pub fp_rel_tol: f64,
    pub fp_max_iter: usize,
    pub output: PathBuf,
    pub alpha: f64,
    pub beta: f64,
    pub poly: Vec<f64>,
    pub amplitude: f64,
    pub strict_periodic: bool,
    pub strict_dealias: bool,
    pub step_log: bool,
    /// Zero round-off level coefficients of the projected initial data.
    pub chop_initial: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = ProblemOptions::default();
        Self {
            problem: "linear-kg".into(),
            length: None,
            modes: 32,
            points: None,
            theta: 0.5,
            dt: 2f64.powi(-10),
            t_final: 1.0,
            snapshot_times: vec![0.0, 1.0],
            fp_tol: DEFAULT_FP_TOL,
            fp_rel_tol: DEFAULT_FP_REL_TOL,
            fp_max_iter: DEFAULT_FP_MAX_ITER,
            output: PathBuf::from("output"),
            alpha: p.alpha,
            beta: p.beta,
            poly: p.poly,
            amplitude: p.amplitude,
            strict_periodic: p.strict_periodic,
            strict_dealias: true,
            step_log: false,
            chop_initial: true,
        }
    }
}

pub fn parse_number(s: &str) -> Result<f64, String> {
    let s = s.trim();
    if let Some((base, exp)) = s.split_once('^') {
        let base: f64 = base
            .trim()
            .parse()
            .map_err(|_| format!("bad number '{s}'"))?;
        let exp: i32 = exp
            .trim()
            .parse()
            .map_err(|_| format!("bad exponent in '{s}'"))?;
        return Ok(base.powi(exp));
    }
    s.parse().map_err(|_| format!("bad number '{s}'"))
}

fn parse_usize(s: &str) -> Result<usize, String> {
    let v = parse_number(s)?;
    if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
        Ok(v as usize)
    } else {
        Err(format!("expected a non-negative integer, got '{s}'"))
    }
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s.trim() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        other => Err(format!("expected a boolean, got '{other}'")),
    }
}

pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(parse_number)
        .collect()
}

pub fn parse_range(s: &str) -> Result<RangeInclusive<i32>, String> {
    let s = s.trim();
    let (lo, hi) = match s.split_once("..") {
        Some((lo, hi)) => (lo, hi.trim_start_matches('=')),
        None => (s, s),
    };
    let lo: i32 = lo.trim().parse().map_err(|_| format!("bad range '{s}'"))?;
    let hi: i32 = hi.trim().parse().map_err(|_| format!("bad range '{s}'"))?;
    if lo > hi {
        return Err(format!("empty range '{s}'"));
    }
    Ok(lo..=hi)
}

/// Splits config text into `(key, value)` pairs.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>, HarnessError> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| HarnessError::Config {
            key: format!("line {}", lineno + 1),
            message: format!("expected key=value, got '{line}'"),
        })?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Parses a `key=value` override as given on the command line.
pub fn parse_override(s: &str) -> Result<(String, String), HarnessError> {
    let (k, v) = s.split_once('=').ok_or_else(|| HarnessError::Config {
        key: s.to_string(),
        message: "override must look like key=value".into(),
    })?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

impl RunConfig {
    /// Applies one setting. Returns `Ok(false)` for keys this struct does
    /// not know.
    pub fn set(&mut self, key: &str, value: &str) -> Result<bool, HarnessError> {
        let err = |message: String| HarnessError::Config {
            key: key.to_string(),
            message,
        };
        match key {
            "problem" => self.problem = value.to_string(),
            "L" | "length" => {
                self.length = match value {
                    "auto" | "default" => None,
                    v => Some(parse_number(v).map_err(err)?),
                }
            }
            "N" | "modes" => self.modes = parse_usize(value).map_err(err)?,
            "J" | "points" => {
                self.points = match value {
                    "auto" => None,
                    v => Some(parse_usize(v).map_err(err)?),
                }
            }
            "theta" => self.theta = parse_number(value).map_err(err)?,
            "dt" => self.dt = parse_number(value).map_err(err)?,
            "t_final" | "T" => self.t_final = parse_number(value).map_err(err)?,
            "snapshot_times" | "snapshots" => {
                self.snapshot_times = parse_list(value).map_err(err)?
            }
            "fp_tol" => self.fp_tol = parse_number(value).map_err(err)?,
            "fp_rel_tol" => self.fp_rel_tol = parse_number(value).map_err(err)?,
            "fp_max_iter" => self.fp_max_iter = parse_usize(value).map_err(err)?,
            "output" => self.output = PathBuf::from(value),
            "alpha" => self.alpha = parse_number(value).map_err(err)?,
            "beta" => self.beta = parse_number(value).map_err(err)?,
            "poly" => self.poly = parse_list(value).map_err(err)?,
            "amplitude" => self.amplitude = parse_number(value).map_err(err)?,
            "strict_periodic" => self.strict_periodic = parse_bool(value).map_err(err)?,
            "strict_dealias" => self.strict_dealias = parse_bool(value).map_err(err)?,
            "step_log" => self.step_log = parse_bool(value).map_err(err)?,
            "chop_initial" => self.chop_initial = parse_bool(value).map_err(err)?,
            _ => return Ok(false),
        }
        Ok(true)
    }

    pub fn from_pairs<'a>(
        pairs: impl IntoIterator<Item = &'a (String, String)>,
    ) -> Result<Self, HarnessError> {
        let mut cfg = Self::default();
        let mut snapshots_given = false;
        for (k, v) in pairs {
            if !cfg.set(k, v)? {
                return Err(HarnessError::Config {
                    key: k.clone(),
                    message: "unknown key".into(),
                });
            }
            snapshots_given |= matches!(k.as_str(), "snapshot_times" | "snapshots");
        }
        if !snapshots_given {
            cfg.snapshot_times = vec![0.0, cfg.t_final];
            cfg.snapshot_times.dedup();
        }
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        Self::from_pairs(&parse_pairs(text)?)
    }

    pub fn problem_options(&self) -> ProblemOptions {
        ProblemOptions {
            length: self.length,
            alpha: self.alpha,
            beta: self.beta,
            poly: self.poly.clone(),
            amplitude: self.amplitude,
            strict_periodic: self.strict_periodic,
        }
    }

    pub fn build_problem(&self) -> Result<ProblemSpec, HarnessError> {
        Ok(ProblemSpec::from_name(
            &self.problem,
            &self.problem_options(),
        )?)
    }

    /// Grid for `problem`; automatic `J` is the smallest power of two at
    /// or above the nonlinearity's bound.
    pub fn build_grid(
        &self,
        nonlinearity: &Nonlinearity,
        length: f64,
    ) -> Result<GridSpec, HarnessError> {
        let grid = match self.points {
            Some(j) => GridSpec::new(length, self.modes, j)?,
            None => GridSpec::with_auto_points(
                length,
                self.modes,
                nonlinearity.default_points_bound(self.modes),
            )?,
        };
        Ok(grid)
    }

    pub fn solver_params(&self) -> Result<SolverParams, HarnessError> {
        let p = SolverParams {
            theta: self.theta,
            dt: self.dt,
            fp_tol: self.fp_tol,
            fp_rel_tol: self.fp_rel_tol,
            fp_max_iter: self.fp_max_iter,
            alias_policy: if self.strict_dealias {
                AliasPolicy::Strict
            } else {
                AliasPolicy::Lenient
            },
        };
        p.validate()?;
        Ok(p)
    }

    /// Checks the numeric constraints that do not need a built problem.
    pub fn validate(&self) -> Result<(), HarnessError> {
        let err = |key: &str, message: String| HarnessError::Config {
            key: key.into(),
            message,
        };
        self.solver_params()?;
        if self.modes == 0 {
            return Err(err("N", "must be at least 1".into()));
        }
        step_count(self.t_final, self.dt).map_err(|e| err("t_final", e.to_string()))?;
        for &t in &self.snapshot_times {
            if !(0.0..=self.t_final).contains(&t) {
                return Err(err(
                    "snapshot_times",
                    format!("{t} outside [0, {}]", self.t_final),
                ));
            }
            step_count(t, self.dt).map_err(|e| err("snapshot_times", e.to_string()))?;
        }
        Ok(())
    }
}

/// A grid of runs over `Δt = 2^-e` and `N = 2^e`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub base: RunConfig,
    pub dt_exponents: RangeInclusive<i32>,
    pub modes_exponents: RangeInclusive<i32>,
    /// Write measured wall time; off gives byte-reproducible tables.
    pub record_timing: bool,
    pub parallel: bool,
}

impl SweepConfig {
    pub fn new(
        base: RunConfig,
        dt_exponents: RangeInclusive<i32>,
        modes_exponents: RangeInclusive<i32>,
    ) -> Self {
        Self {
            base,
            dt_exponents,
            modes_exponents,
            record_timing: true,
            parallel: true,
        }
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<bool, HarnessError> {
        let err = |message: String| HarnessError::Config {
            key: key.to_string(),
            message,
        };
        match key {
            "dt_exponents" => self.dt_exponents = parse_range(value).map_err(err)?,
            "N_exponents" | "modes_exponents" => {
                self.modes_exponents = parse_range(value).map_err(err)?
            }
            "record_timing" => self.record_timing = parse_bool(value).map_err(err)?,
            "parallel" => self.parallel = parse_bool(value).map_err(err)?,
            _ => return self.base.set(key, value),
        }
        Ok(true)
    }

    pub fn from_pairs<'a>(
        pairs: impl IntoIterator<Item = &'a (String, String)>,
    ) -> Result<Self, HarnessError> {
        let mut cfg = Self::new(RunConfig::default(), 2..=10, 5..=5);
        cfg.base.snapshot_times.clear();
        for (k, v) in pairs {
            if !cfg.set(k, v)? {
                return Err(HarnessError::Config {
                    key: k.clone(),
                    message: "unknown key".into(),
                });
            }
        }
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        Self::from_pairs(&parse_pairs(text)?)
    }

    /// `(N, Δt)` for every cell, ordered by `N` ascending then `Δt`
    /// descending.
    pub fn cells(&self) -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        for ne in self.modes_exponents.clone() {
            for de in self.dt_exponents.clone() {
                out.push((1usize << ne.max(0), 2f64.powi(-de)));
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.modes_exponents.start() < &0 || self.modes_exponents.end() > &24 {
            return Err(HarnessError::Config {
                key: "N_exponents".into(),
                message: "exponents must lie in 0..=24".into(),
            });
        }
        if self.dt_exponents.start().abs() > 60 || self.dt_exponents.end().abs() > 60 {
            return Err(HarnessError::Config {
                key: "dt_exponents".into(),
                message: "exponents must lie in -60..=60".into(),
            });
        }
        let mut probe = self.base.clone();
        probe.snapshot_times.clear();
        for (n, dt) in self.cells() {
            probe.modes = n;
            probe.dt = dt;
            probe.validate()?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_and_powers() {
        assert_eq!(parse_number("2^-10").unwrap(), 2f64.powi(-10));
        assert_eq!(parse_number(" 0.5 ").unwrap(), 0.5);
        assert!(parse_number("two").is_err());
        assert_eq!(parse_list("0, 0.5,1").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_range("4..12").unwrap(), 4..=12);
        assert_eq!(parse_range("5").unwrap(), 5..=5);
        assert_eq!(parse_range("2..=3").unwrap(), 2..=3);
        assert!(parse_range("5..2").is_err());
    }

    #[test]
    fn parse_run_config() {
        let cfg = RunConfig::parse(
            "# linear benchmark\nproblem = linear-kg\nL = 8\nN = 2^5\ndt = 2^-8\nT = 1\n\nsnapshot_times = 0, 0.5, 1\n",
        )
        .unwrap();
        assert_eq!(cfg.modes, 32);
        assert_eq!(cfg.length, Some(8.0));
        assert_eq!(cfg.dt, 2f64.powi(-8));
        assert_eq!(cfg.snapshot_times, vec![0.0, 0.5, 1.0]);
        cfg.validate().unwrap();
    }

    #[test]
    fn default_snapshots_follow_t_final() {
        let cfg = RunConfig::parse("t_final = 0.5").unwrap();
        assert_eq!(cfg.snapshot_times, vec![0.0, 0.5]);
        let cfg = RunConfig::parse("t_final = 0").unwrap();
        assert_eq!(cfg.snapshot_times, vec![0.0]);
    }

    #[test]
    fn unknown_and_malformed_keys() {
        assert!(matches!(
            RunConfig::parse("bogus = 1"),
            Err(HarnessError::Config { .. })
        ));
        assert!(matches!(
            RunConfig::parse("N 32"),
            Err(HarnessError::Config { .. })
        ));
        assert!(matches!(
            RunConfig::parse("N = -3"),
            Err(HarnessError::Config { .. })
        ));
    }

    #[test]
    fn snapshot_constraints() {
        let mut cfg = RunConfig {
            snapshot_times: vec![1.5],
            ..RunConfig::default()
        };
        assert!(cfg.validate().is_err());
        cfg.snapshot_times = vec![0.0001];
        assert!(cfg.validate().is_err());
        cfg.snapshot_times = vec![0.5];
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn sweep_cells_order() {
        let cfg = SweepConfig::parse("dt_exponents = 2..4\nN_exponents = 2..3\n").unwrap();
        let cells = cfg.cells();
        assert_eq!(cells.len(), 6);
        assert_eq!(cells[0], (4, 0.25));
        assert_eq!(cells[2], (4, 0.0625));
        assert_eq!(cells[3], (8, 0.25));
        cfg.validate().unwrap();
    }

    #[test]
    fn auto_points() {
        let cfg = RunConfig::default();
        let p = cfg.build_problem().unwrap();
        assert_eq!(
            cfg.build_grid(&p.nonlinearity, p.length).unwrap().points(),
            128
        );
        let mut sg = cfg.clone();
        sg.problem = "sine-gordon".into();
        let p = sg.build_problem().unwrap();
        assert_eq!(
            sg.build_grid(&p.nonlinearity, p.length).unwrap().points(),
            256
        );
    }
}
