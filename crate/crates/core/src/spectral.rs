//! Real Fourier transforms between collocation samples and truncated
//! cosine/sine coefficients on the periodic interval `[0, L)`.
//!
//! The forward transform is normalised so that [`analyze`] returns the
//! trapezoidal quadrature coefficients directly:
//!
//! ```text
//! zero  = (1/J) Σ_j f(x_j)
//! cos_l = (2/J) Σ_j f(x_j) cos(2π l x_j / L)
//! sin_l = (2/J) Σ_j f(x_j) sin(2π l x_j / L)
//! ```
//!
//! Both directions go through a complex FFT of length `J` (any `J`, not
//! just powers of two). The O(NJ) summation in [`reference`] is the oracle
//! the FFT path is tested against.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransformError {
    #[error("dimension mismatch: expected {expected} {what}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("aliasing contract violated: J = {points} < {required} required for N = {modes}")]
    Aliasing {
        modes: usize,
        points: usize,
        required: usize,
    },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
}

/// Periodic collocation grid with `J` equispaced points `x_j = jL/J` and
/// `N` retained Fourier mode pairs.
///
/// Holds planned forward and inverse FFTs; cloning shares the plans.
#[derive(Clone)]
pub struct GridSpec {
    length: f64,
    modes: usize,
    points: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GridSpec")
            .field("length", &self.length)
            .field("modes", &self.modes)
            .field("points", &self.points)
            .finish()
    }
}

impl PartialEq for GridSpec {
    fn eq(&self, other: &Self) -> bool {
        self.length == other.length && self.modes == other.modes && self.points == other.points
    }
}

impl GridSpec {
    pub fn new(length: f64, modes: usize, points: usize) -> Result<Self, TransformError> {
        if !(length.is_finite() && length > 0.0) {
            return Err(TransformError::InvalidGrid(format!(
                "domain length must be finite and positive, got {length}"
            )));
        }
        if modes == 0 {
            return Err(TransformError::InvalidGrid("N must be at least 1".into()));
        }
        let required = min_points(modes);
        if points < required {
            return Err(TransformError::Aliasing {
                modes,
                points,
                required,
            });
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            length,
            modes,
            points,
            forward: planner.plan_fft_forward(points),
            inverse: planner.plan_fft_inverse(points),
        })
    }

    /// Grid with the smallest power-of-two `J` satisfying `J ≥ bound` and
    /// `J ≥ 2N + 1`.
    pub fn with_auto_points(
        length: f64,
        modes: usize,
        bound: usize,
    ) -> Result<Self, TransformError> {
        let points = bound.max(min_points(modes)).next_power_of_two();
        Self::new(length, modes, points)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Number of retained mode pairs `N`.
    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Number of collocation points `J`.
    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.points as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        j as f64 * self.length / self.points as f64
    }

    pub fn x_points(&self) -> Vec<f64> {
        (0..self.points).map(|j| self.x(j)).collect()
    }

    /// Angular wavenumber `2πl/L` of mode `l`.
    pub fn wavenumber(&self, l: usize) -> f64 {
        2.0 * PI * l as f64 / self.length
    }

    /// Samples `f` at every collocation point.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> GridField {
        GridField {
            samples: (0..self.points).map(|j| f(self.x(j))).collect(),
        }
    }
}

/// Minimum collocation count `2N + 1` for an `N`-mode grid.
pub fn min_points(modes: usize) -> usize {
    2 * modes + 1
}

/// Truncated real Fourier coefficients: constant mode plus `N` cosine and
/// `N` sine amplitudes (index 0 of each array is mode `l = 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct RealCoeffs {
    pub zero_mode: f64,
    pub cos_modes: Vec<f64>,
    pub sin_modes: Vec<f64>,
}

impl RealCoeffs {
    pub fn zeros(modes: usize) -> Self {
        Self {
            zero_mode: 0.0,
            cos_modes: vec![0.0; modes],
            sin_modes: vec![0.0; modes],
        }
    }

    pub fn new(
        zero_mode: f64,
        cos_modes: Vec<f64>,
        sin_modes: Vec<f64>,
    ) -> Result<Self, TransformError> {
        if cos_modes.len() != sin_modes.len() {
            return Err(TransformError::DimensionMismatch {
                what: "sine modes",
                expected: cos_modes.len(),
                found: sin_modes.len(),
            });
        }
        let c = Self {
            zero_mode,
            cos_modes,
            sin_modes,
        };
        if !c.is_finite() {
            return Err(TransformError::NonFinite("coefficients"));
        }
        Ok(c)
    }

    pub fn modes(&self) -> usize {
        self.cos_modes.len()
    }

    pub fn is_finite(&self) -> bool {
        self.zero_mode.is_finite()
            && self.cos_modes.iter().all(|v| v.is_finite())
            && self.sin_modes.iter().all(|v| v.is_finite())
    }

    /// Iterates over every coefficient: zero mode, cosines, then sines.
    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        std::iter::once(self.zero_mode)
            .chain(self.cos_modes.iter().copied())
            .chain(self.sin_modes.iter().copied())
    }

    pub fn max_abs(&self) -> f64 {
        self.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest absolute coefficient difference. Both sides must have the
    /// same mode count.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.modes(), other.modes());
        self.iter()
            .zip(other.iter())
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Coefficients of `∂/∂x` of the represented function.
    pub fn derivative(&self, length: f64) -> Self {
        let mut out = Self::zeros(self.modes());
        for l in 1..=self.modes() {
            let k = 2.0 * PI * l as f64 / length;
            out.cos_modes[l - 1] = k * self.sin_modes[l - 1];
            out.sin_modes[l - 1] = -k * self.cos_modes[l - 1];
        }
        out
    }

    /// Zeroes every coefficient with magnitude at or below
    /// `rel_tol · max_abs()`.
    pub fn chop(&mut self, rel_tol: f64) {
        let cut = rel_tol * self.max_abs();
        let zap = |v: &mut f64| {
            if v.abs() <= cut {
                *v = 0.0;
            }
        };
        zap(&mut self.zero_mode);
        self.cos_modes.iter_mut().for_each(zap);
        self.sin_modes.iter_mut().for_each(zap);
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            zero_mode: self.zero_mode * factor,
            cos_modes: self.cos_modes.iter().map(|v| v * factor).collect(),
            sin_modes: self.sin_modes.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn add_scaled(&self, other: &Self, factor: f64) -> Self {
        Self {
            zero_mode: self.zero_mode + factor * other.zero_mode,
            cos_modes: self
                .cos_modes
                .iter()
                .zip(&other.cos_modes)
                .map(|(a, b)| a + factor * b)
                .collect(),
            sin_modes: self
                .sin_modes
                .iter()
                .zip(&other.sin_modes)
                .map(|(a, b)| a + factor * b)
                .collect(),
        }
    }
}

/// Field values at the `J` collocation points.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub samples: Vec<f64>,
}

impl GridField {
    pub fn new(samples: Vec<f64>) -> Self {
        Self { samples }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.samples.iter().all(|v| v.is_finite())
    }
}

fn check_coeffs(coeffs: &RealCoeffs, grid: &GridSpec) -> Result<(), TransformError> {
    if coeffs.cos_modes.len() != grid.modes {
        return Err(TransformError::DimensionMismatch {
            what: "cosine modes",
            expected: grid.modes,
            found: coeffs.cos_modes.len(),
        });
    }
    if coeffs.sin_modes.len() != grid.modes {
        return Err(TransformError::DimensionMismatch {
            what: "sine modes",
            expected: grid.modes,
            found: coeffs.sin_modes.len(),
        });
    }
    if !coeffs.is_finite() {
        return Err(TransformError::NonFinite("coefficients"));
    }
    Ok(())
}

fn check_field(field: &GridField, grid: &GridSpec) -> Result<(), TransformError> {
    if field.samples.len() != grid.points {
        return Err(TransformError::DimensionMismatch {
            what: "samples",
            expected: grid.points,
            found: field.samples.len(),
        });
    }
    let required = min_points(grid.modes);
    if grid.points < required {
        return Err(TransformError::Aliasing {
            modes: grid.modes,
            points: grid.points,
            required,
        });
    }
    if field.samples.iter().any(|v| !v.is_finite()) {
        return Err(TransformError::NonFinite("samples"));
    }
    Ok(())
}

/// Evaluates the truncated series at every collocation point.
pub fn synthesize(coeffs: &RealCoeffs, grid: &GridSpec) -> Result<GridField, TransformError> {
    check_coeffs(coeffs, grid)?;
    let j = grid.points;
    let mut buf = vec![Complex64::new(0.0, 0.0); j];
    buf[0] = Complex64::new(coeffs.zero_mode, 0.0);
    for l in 1..=grid.modes {
        let half = Complex64::new(
            0.5 * coeffs.cos_modes[l - 1],
            -0.5 * coeffs.sin_modes[l - 1],
        );
        buf[l] = half;
        buf[j - l] = half.conj();
    }
    // unnormalised inverse: x_j = Σ_k X_k e^{+2πi jk/J}
    grid.inverse.process(&mut buf);
    Ok(GridField {
        samples: buf.into_iter().map(|c| c.re).collect(),
    })
}

/// Projects collocation samples onto the first `N` modes by trapezoidal
/// quadrature.
pub fn analyze(field: &GridField, grid: &GridSpec) -> Result<RealCoeffs, TransformError> {
    check_field(field, grid)?;
    let j = grid.points;
    let mut buf: Vec<Complex64> = field
        .samples
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .collect();
    grid.forward.process(&mut buf);
    let inv = 1.0 / j as f64;
    let two_inv = 2.0 * inv;
    let mut out = RealCoeffs::zeros(grid.modes);
    out.zero_mode = buf[0].re * inv;
    for (i, x) in buf[1..=grid.modes].iter().enumerate() {
        out.cos_modes[i] = x.re * two_inv;
        out.sin_modes[i] = -x.im * two_inv;
    }
    Ok(out)
}

/// Direct O(NJ) summation versions of [`synthesize`] and [`analyze`], kept
/// as the brute-force oracle for the FFT path.
pub mod reference {
    use super::*;

    pub fn synthesize(coeffs: &RealCoeffs, grid: &GridSpec) -> Result<GridField, TransformError> {
        check_coeffs(coeffs, grid)?;
        let samples = (0..grid.points)
            .map(|j| {
                let x = grid.x(j);
                let mut s = coeffs.zero_mode;
                for l in 1..=grid.modes {
                    let arg = grid.wavenumber(l) * x;
                    s += coeffs.cos_modes[l - 1] * arg.cos() + coeffs.sin_modes[l - 1] * arg.sin();
                }
                s
            })
            .collect();
        Ok(GridField { samples })
    }

    pub fn analyze(field: &GridField, grid: &GridSpec) -> Result<RealCoeffs, TransformError> {
        check_field(field, grid)?;
        let j = grid.points as f64;
        let mut out = RealCoeffs::zeros(grid.modes);
        out.zero_mode = field.samples.iter().sum::<f64>() / j;
        for l in 1..=grid.modes {
            let (mut c, mut s) = (0.0, 0.0);
            for (idx, v) in field.samples.iter().enumerate() {
                let arg = grid.wavenumber(l) * grid.x(idx);
                c += v * arg.cos();
                s += v * arg.sin();
            }
            out.cos_modes[l - 1] = 2.0 * c / j;
            out.sin_modes[l - 1] = 2.0 * s / j;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(l: f64, n: usize, j: usize) -> GridSpec {
        GridSpec::new(l, n, j).unwrap()
    }

    #[test]
    fn constant_mode_synthesizes_constant() {
        let g = grid(3.0, 4, 13);
        let mut c = RealCoeffs::zeros(4);
        c.zero_mode = 5.0;
        let f = synthesize(&c, &g).unwrap();
        assert!(f.samples.iter().all(|v| (v - 5.0).abs() < 1e-14));
    }

    #[test]
    fn single_cosine_mode() {
        let g = grid(8.0, 3, 8);
        let mut c = RealCoeffs::zeros(3);
        c.cos_modes[0] = 1.0;
        let f = synthesize(&c, &g).unwrap();
        for (j, v) in f.samples.iter().enumerate() {
            let x = g.x(j);
            assert!((v - (2.0 * PI * x / 8.0).cos()).abs() < 1e-14);
        }
    }

    #[test]
    fn sine_mode_matches_direct_sum() {
        let g = grid(2.0 * PI, 4, 16);
        let mut c = RealCoeffs::zeros(4);
        c.sin_modes[1] = 3.0;
        let f = synthesize(&c, &g).unwrap();
        let direct = reference::synthesize(&c, &g).unwrap();
        for (j, (a, b)) in f.samples.iter().zip(&direct.samples).enumerate() {
            assert!((a - b).abs() < 1e-13);
            assert!((a - 3.0 * (2.0 * g.x(j)).sin()).abs() < 1e-13);
        }
    }

    #[test]
    fn constant_field_analyzes_to_zero_mode() {
        let g = grid(1.5, 5, 11);
        let c = analyze(&GridField::new(vec![5.0; 11]), &g).unwrap();
        assert!((c.zero_mode - 5.0).abs() < 1e-14);
        assert!(c
            .cos_modes
            .iter()
            .chain(&c.sin_modes)
            .all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn two_mode_field_quadrature() {
        let g = grid(8.0, 4, 16);
        let f = g.sample(|x| (2.0 * PI * 3.0 * x / 8.0).cos() + 0.5 * (2.0 * PI * x / 8.0).sin());
        let c = analyze(&f, &g).unwrap();
        let oracle = reference::analyze(&f, &g).unwrap();
        assert!(c.max_abs_diff(&oracle) < 1e-13);
        let mut want = RealCoeffs::zeros(4);
        want.cos_modes[2] = 1.0;
        want.sin_modes[0] = 0.5;
        assert!(c.max_abs_diff(&want) < 1e-13);
    }

    #[test]
    fn grid_rejects_too_few_points() {
        assert_eq!(
            GridSpec::new(1.0, 4, 8).unwrap_err(),
            TransformError::Aliasing {
                modes: 4,
                points: 8,
                required: 9
            }
        );
        assert!(GridSpec::new(0.0, 4, 9).is_err());
        assert!(GridSpec::new(1.0, 0, 9).is_err());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let g = grid(1.0, 4, 9);
        assert!(matches!(
            synthesize(&RealCoeffs::zeros(3), &g),
            Err(TransformError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            analyze(&GridField::new(vec![0.0; 10]), &g),
            Err(TransformError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn auto_points_is_power_of_two() {
        let g = GridSpec::with_auto_points(8.0, 32, 0).unwrap();
        assert_eq!(g.points(), 128);
        let g = GridSpec::with_auto_points(8.0, 8, 33).unwrap();
        assert_eq!(g.points(), 64);
    }

    #[test]
    fn grid_points_exclude_right_endpoint() {
        let g = grid(8.0, 2, 8);
        assert_eq!(g.x(0), 0.0);
        assert_eq!(g.x_points().last().copied(), Some(7.0));
    }
}
