//! Problem definitions for
//!
//! ```text
//! u_t = v,    v_t + α u_xx + β F(u) = 0,    x ∈ [0, L) periodic
//! ```
//!
//! together with the nonlinearity `F`, initial data and the exact solutions
//! of the two benchmark problems.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::elliptic::{complete_elliptic_k, jacobi_sn_cn_dn, EllipticModulus};
use crate::spectral::{
    analyze, min_points, synthesize, GridField, GridSpec, RealCoeffs, TransformError,
};

/// Tolerance on `|f(0) − f(L)|` for initial data to count as periodic.
pub const PERIODICITY_TOL: f64 = 1e-12;

/// Elliptic modulus of the travelling sine-Gordon wave.
pub const SINE_GORDON_MODULUS: f64 = 0.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error("domain length must be finite and positive, got {0}")]
    Length(f64),
    #[error("polynomial nonlinearity needs at least one finite coefficient")]
    Polynomial,
    #[error("initial {field} is not periodic: |f(0) - f(L)| = {gap:e}")]
    NotPeriodic { field: &'static str, gap: f64 },
    #[error("non-finite value produced by the nonlinearity")]
    NonFinite,
    #[error("unknown problem '{0}' (expected linear-kg, sine-gordon or custom-polynomial)")]
    UnknownProblem(String),
    #[error(transparent)]
    Transform(#[from] TransformError),
}

/// The inhomogeneous term `F(u)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Nonlinearity {
    Zero,
    Linear,
    SineGordon,
    /// `F(u) = Σ_k c_k u^k`, coefficients in ascending order.
    Polynomial(Vec<f64>),
}

impl Nonlinearity {
    pub fn polynomial(coeffs: Vec<f64>) -> Result<Self, ProblemError> {
        if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(ProblemError::Polynomial);
        }
        Ok(Self::Polynomial(coeffs))
    }

    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Linear => u,
            Self::SineGordon => u.sin(),
            Self::Polynomial(c) => c.iter().rev().fold(0.0, |acc, &ck| acc * u + ck),
        }
    }

    /// Potential `G` with `G' = F` and `G(0) = 0`.
    pub fn potential(&self, u: f64) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Linear => 0.5 * u * u,
            Self::SineGordon => 1.0 - u.cos(),
            Self::Polynomial(c) => {
                let mut acc = 0.0;
                for (k, ck) in c.iter().enumerate().rev() {
                    acc = acc * u + ck / (k + 1) as f64;
                }
                acc * u
            }
        }
    }

    /// Polynomial degree `M` (at least 1); `None` for `sin u`.
    pub fn degree_bound(&self) -> Option<usize> {
        match self {
            Self::Zero | Self::Linear => Some(1),
            Self::SineGordon => None,
            Self::Polynomial(c) => Some(c.len().saturating_sub(1).max(1)),
        }
    }

    /// Collocation count required for exact quadrature of the nonlinear
    /// term: `(M+1)N + 1` for polynomials, `2N + 1` otherwise.
    pub fn required_points(&self, modes: usize) -> usize {
        match self {
            Self::Polynomial(_) => {
                let m = self.degree_bound().unwrap_or(1);
                ((m + 1) * modes + 1).max(min_points(modes))
            }
            _ => min_points(modes),
        }
    }

    /// Lower bound used when `J` is chosen automatically. `sin u` has no
    /// finite degree and gets `4N + 1`.
    pub fn default_points_bound(&self, modes: usize) -> usize {
        match self {
            Self::SineGordon => 4 * modes + 1,
            _ => self.required_points(modes),
        }
    }
}

impl fmt::Display for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zero => write!(f, "zero"),
            Self::Linear => write!(f, "linear"),
            Self::SineGordon => write!(f, "sin"),
            Self::Polynomial(c) => {
                let terms: Vec<String> = c.iter().map(|v| v.to_string()).collect();
                write!(f, "poly[{}]", terms.join(","))
            }
        }
    }
}

/// Whether `nonlinear_spectrum` refuses grids below the exact-quadrature
/// bound of a polynomial nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AliasPolicy {
    #[default]
    Strict,
    Lenient,
}

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type ExactFn = Arc<dyn Fn(f64, f64) -> (f64, f64) + Send + Sync>;

/// Coefficients, nonlinearity, domain and initial data of one problem.
#[derive(Clone)]
pub struct ProblemSpec {
    pub name: String,
    pub alpha: f64,
    pub beta: f64,
    pub nonlinearity: Nonlinearity,
    pub length: f64,
    pub initial_u: ScalarFn,
    pub initial_v: ScalarFn,
    pub exact: Option<ExactFn>,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("name", &self.name)
            .field("alpha", &self.alpha)
            .field("beta", &self.beta)
            .field("nonlinearity", &self.nonlinearity)
            .field("length", &self.length)
            .field("exact", &self.exact.is_some())
            .finish()
    }
}

/// Options for building a named problem.
#[derive(Debug, Clone)]
pub struct ProblemOptions {
    /// Domain length; each problem has its own default.
    pub length: Option<f64>,
    /// `α`, `β`, polynomial coefficients and initial amplitude of
    /// `custom-polynomial` (`u(x,0) = amp·cos(2πx/L)`, `v(x,0) = 0`).
    pub alpha: f64,
    pub beta: f64,
    pub poly: Vec<f64>,
    pub amplitude: f64,
    /// Reject initial data that is not periodic on `[0, L]`.
    pub strict_periodic: bool,
}

impl Default for ProblemOptions {
    fn default() -> Self {
        Self {
            length: None,
            alpha: -1.0,
            beta: 1.0,
            poly: vec![0.0, 0.0, 0.0, 1.0],
            amplitude: 0.5,
            strict_periodic: true,
        }
    }
}

pub const PROBLEM_NAMES: [&str; 3] = ["linear-kg", "sine-gordon", "custom-polynomial"];

impl ProblemSpec {
    pub fn new(
        name: impl Into<String>,
        alpha: f64,
        beta: f64,
        nonlinearity: Nonlinearity,
        length: f64,
        initial_u: ScalarFn,
        initial_v: ScalarFn,
    ) -> Result<Self, ProblemError> {
        if !(length.is_finite() && length > 0.0) {
            return Err(ProblemError::Length(length));
        }
        if let Nonlinearity::Polynomial(c) = &nonlinearity {
            if c.is_empty() || c.iter().any(|v| !v.is_finite()) {
                return Err(ProblemError::Polynomial);
            }
        }
        Ok(Self {
            name: name.into(),
            alpha,
            beta,
            nonlinearity,
            length,
            initial_u,
            initial_v,
            exact: None,
        })
    }

    pub fn with_exact(mut self, exact: ExactFn) -> Self {
        self.exact = Some(exact);
        self
    }

    /// Checks that `f` and `g` agree at `0` and `L`.
    pub fn check_periodic(&self) -> Result<(), ProblemError> {
        for (field, f) in [("u", &self.initial_u), ("v", &self.initial_v)] {
            let gap = (f(0.0) - f(self.length)).abs();
            if gap.is_nan() || gap > PERIODICITY_TOL {
                return Err(ProblemError::NotPeriodic { field, gap });
            }
        }
        Ok(())
    }

    /// `u_tt − u_xx + u = 0` with `u(x,0) = 0`, `v(x,0) = cos(2πx/L)`.
    pub fn linear_kg(length: f64) -> Result<Self, ProblemError> {
        let k = 2.0 * PI / length;
        let spec = Self::new(
            "linear-kg",
            -1.0,
            1.0,
            Nonlinearity::Linear,
            length,
            Arc::new(|_| 0.0),
            Arc::new(move |x| (k * x).cos()),
        )?
        .with_exact(Arc::new(move |x, t| linear_exact(x, t, length)));
        spec.check_periodic()?;
        Ok(spec)
    }

    /// `u_tt − u_xx + sin u = 0` with the travelling elliptic-function wave
    /// as initial data. Only `L = 4K(1/2)` (see [`sine_gordon_period`]) is
    /// periodic.
    pub fn sine_gordon(length: f64) -> Result<Self, ProblemError> {
        let spec = Self::sine_gordon_unchecked(length)?;
        spec.check_periodic()?;
        Ok(spec)
    }

    /// Like [`ProblemSpec::sine_gordon`] but accepts any `L`.
    pub fn sine_gordon_unchecked(length: f64) -> Result<Self, ProblemError> {
        Ok(Self::new(
            "sine-gordon",
            -1.0,
            1.0,
            Nonlinearity::SineGordon,
            length,
            Arc::new(|x| sine_gordon_exact(x, 0.0).0),
            Arc::new(|x| sine_gordon_exact(x, 0.0).1),
        )?
        .with_exact(Arc::new(sine_gordon_exact)))
    }

    pub fn from_name(name: &str, opts: &ProblemOptions) -> Result<Self, ProblemError> {
        let spec = match name {
            "linear-kg" => {
                let length = opts.length.unwrap_or(8.0);
                let k = 2.0 * PI / length;
                Self::new(
                    "linear-kg",
                    -1.0,
                    1.0,
                    Nonlinearity::Linear,
                    length,
                    Arc::new(|_| 0.0),
                    Arc::new(move |x| (k * x).cos()),
                )?
                .with_exact(Arc::new(move |x, t| linear_exact(x, t, length)))
            }
            "sine-gordon" => {
                Self::sine_gordon_unchecked(opts.length.unwrap_or_else(sine_gordon_period))?
            }
            "custom-polynomial" => {
                let length = opts.length.unwrap_or(8.0);
                let k = 2.0 * PI / length;
                let amp = opts.amplitude;
                Self::new(
                    "custom-polynomial",
                    opts.alpha,
                    opts.beta,
                    Nonlinearity::polynomial(opts.poly.clone())?,
                    length,
                    Arc::new(move |x| amp * (k * x).cos()),
                    Arc::new(|_| 0.0),
                )?
            }
            other => return Err(ProblemError::UnknownProblem(other.to_string())),
        };
        if opts.strict_periodic {
            spec.check_periodic()?;
        }
        Ok(spec)
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }
}

/// Period `4K(1/2)` of `sn(·, 1/2)`.
pub fn sine_gordon_period() -> f64 {
    4.0 * complete_elliptic_k(EllipticModulus::new(SINE_GORDON_MODULUS).expect("valid modulus"))
}

/// Pointwise `F(u_j)`.
pub fn apply_nonlinearity(field: &GridField, nl: &Nonlinearity) -> Result<GridField, ProblemError> {
    let samples: Vec<f64> = field.samples.iter().map(|&u| nl.eval(u)).collect();
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(ProblemError::NonFinite);
    }
    Ok(GridField::new(samples))
}

/// Quadrature coefficients `(F̂_0, F̂_l, Ĝ_l)` of `F(u)` for the function
/// `u` represented by `state_u`.
///
/// `F(u) = u` maps coefficients to themselves exactly, so the linear case
/// never leaves coefficient space; every other nonlinearity goes through
/// the collocation grid.
pub fn nonlinear_spectrum(
    state_u: &RealCoeffs,
    grid: &GridSpec,
    nl: &Nonlinearity,
    policy: AliasPolicy,
) -> Result<RealCoeffs, ProblemError> {
    match nl {
        Nonlinearity::Linear => {
            if state_u.modes() != grid.modes() {
                return Err(TransformError::DimensionMismatch {
                    what: "modes",
                    expected: grid.modes(),
                    found: state_u.modes(),
                }
                .into());
            }
            Ok(state_u.clone())
        }
        Nonlinearity::Zero => Ok(RealCoeffs::zeros(grid.modes())),
        _ => nonlinear_spectrum_collocated(state_u, grid, nl, policy),
    }
}

/// `analyze(F(synthesize(u)))` without any shortcut.
pub fn nonlinear_spectrum_collocated(
    state_u: &RealCoeffs,
    grid: &GridSpec,
    nl: &Nonlinearity,
    policy: AliasPolicy,
) -> Result<RealCoeffs, ProblemError> {
    let required = nl.required_points(grid.modes());
    if policy == AliasPolicy::Strict && grid.points() < required {
        return Err(TransformError::Aliasing {
            modes: grid.modes(),
            points: grid.points(),
            required,
        }
        .into());
    }
    let u = synthesize(state_u, grid)?;
    let f = apply_nonlinearity(&u, nl)?;
    Ok(analyze(&f, grid)?)
}

/// Exact solution of the linear benchmark:
/// `u = sin(ωt)/ω · cos(2πx/L)`, `v = cos(ωt) · cos(2πx/L)`,
/// `ω = √(1 + (2π/L)²)`.
pub fn linear_exact(x: f64, t: f64, length: f64) -> (f64, f64) {
    let k = 2.0 * PI / length;
    let omega = (1.0 + k * k).sqrt();
    let profile = (k * x).cos();
    let (s, c) = (omega * t).sin_cos();
    (s / omega * profile, c * profile)
}

/// Travelling sine-Gordon wave with speed `√2`:
/// `u = 2 asin(½ sn(s, ½))`, `v = −√2 cn·dn / √(1 − ¼ sn²)`, `s = x − √2 t`.
pub fn sine_gordon_exact(x: f64, t: f64) -> (f64, f64) {
    let k = EllipticModulus::new(SINE_GORDON_MODULUS).expect("valid modulus");
    let s = x - SQRT_2 * t;
    let j = jacobi_sn_cn_dn(s, k).expect("finite argument");
    let half_sn = 0.5 * j.sn;
    let u = 2.0 * half_sn.asin();
    let v = -SQRT_2 * j.cn * j.dn / (1.0 - half_sn * half_sn).sqrt();
    (u, v)
}
