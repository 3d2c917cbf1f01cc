//! Complete elliptic integral `K(k)` and Jacobi elliptic functions
//! `sn`, `cn`, `dn`.
//!
//! Everything here uses the modulus `k` (not the parameter `m = k²`):
//!
//! ```text
//! K(k) = ∫₀^{π/2} dθ / √(1 − k² sin²θ)
//! ```
//!
//! `K` comes from the arithmetic-geometric mean, `K = π / (2·AGM(1, k'))`
//! with `k' = √(1 − k²)`. The Jacobi functions use the descending Landen
//! sequence of the same AGM and recover the amplitude by backward
//! recurrence.

use std::f64::consts::FRAC_PI_2;

use thiserror::Error;

const AGM_MAX_ITER: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EllipticError {
    #[error("elliptic modulus must satisfy 0 <= k < 1, got {0}")]
    Modulus(f64),
    #[error("argument must be finite, got {0}")]
    Argument(f64),
}

/// Elliptic modulus `k` with `0 ≤ k < 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EllipticModulus(f64);

impl EllipticModulus {
    pub fn new(k: f64) -> Result<Self, EllipticError> {
        if (0.0..1.0).contains(&k) {
            Ok(Self(k))
        } else {
            Err(EllipticError::Modulus(k))
        }
    }

    pub fn k(self) -> f64 {
        self.0
    }

    /// Complementary modulus `√(1 − k²)`.
    pub fn complement(self) -> f64 {
        ((1.0 - self.0) * (1.0 + self.0)).sqrt()
    }
}

impl TryFrom<f64> for EllipticModulus {
    type Error = EllipticError;

    fn try_from(k: f64) -> Result<Self, Self::Error> {
        Self::new(k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiTriple {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
}

/// Descending Landen sequence: `(a_n, c_n)` pairs, starting at
/// `a_0 = 1, c_0 = k`, until `a` and `b` agree to the last ulp.
fn landen_sequence(k: EllipticModulus) -> Vec<(f64, f64)> {
    let mut a = 1.0_f64;
    let mut b = k.complement();
    let mut seq = vec![(a, k.k())];
    for _ in 0..AGM_MAX_ITER {
        if a - b <= f64::EPSILON * a {
            break;
        }
        let c = 0.5 * (a - b);
        let next_a = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next_a;
        seq.push((a, c));
    }
    seq
}

/// Complete elliptic integral of the first kind, modulus convention.
pub fn complete_elliptic_k(k: EllipticModulus) -> f64 {
    let seq = landen_sequence(k);
    let (a_last, _) = *seq.last().expect("sequence is never empty");
    FRAC_PI_2 / a_last
}

/// `K(k)` for a raw modulus value.
pub fn elliptic_k(k: f64) -> Result<f64, EllipticError> {
    Ok(complete_elliptic_k(EllipticModulus::new(k)?))
}

/// Jacobi elliptic functions `sn(x, k)`, `cn(x, k)`, `dn(x, k)`.
pub fn jacobi_sn_cn_dn(x: f64, k: EllipticModulus) -> Result<JacobiTriple, EllipticError> {
    if !x.is_finite() {
        return Err(EllipticError::Argument(x));
    }
    let seq = landen_sequence(k);
    let (a_last, _) = *seq.last().expect("sequence is never empty");
    let period = 4.0 * FRAC_PI_2 / a_last;
    // reduce to [-2K, 2K]; round() is symmetric so oddness survives
    let x = x - period * (x / period).round();

    let depth = seq.len() - 1;
    let mut phi = (1u64 << depth) as f64 * a_last * x;
    for n in (1..=depth).rev() {
        let (a, c) = seq[n];
        phi = 0.5 * (phi + (c / a * phi.sin()).asin());
    }
    let (sn, cn) = phi.sin_cos();
    let kk = k.k();
    let dn = ((1.0 - kk * sn) * (1.0 + kk * sn)).sqrt();
    Ok(JacobiTriple { sn, cn, dn })
}
