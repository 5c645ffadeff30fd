//! Linear stability of the dispersive shallow-water models.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dispersion data of one Fourier mode `e^{i(kx - ωt)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionPoint<T> {
    pub k: i64,
    pub omega_squared: T,
    pub stable: bool,
    /// `sqrt(-ω²)` for unstable modes, zero otherwise.
    pub growth_rate: T,
}

/// `ω²/k²` of the linear system at wavenumber `k`: `1 - εk²/3`, plus
/// `ε²k⁴/20` when regularised.
pub fn dispersion_factor<T: Real>(k: T, eps: T, regularized: bool) -> T {
    let s = eps * k * k;
    let mut a = T::one() - s / T::lit(3.0);
    if regularized {
        a += s * s / T::lit(20.0);
    }
    a
}

/// `ω² = k² - εk⁴/3 (+ ε²k⁶/20)`; the mode is stable iff `ω² ≥ 0`.
pub fn dispersion_relation<T: Real>(k: i64, eps: T, regularized: bool) -> Result<DispersionPoint<T>> {
    if !(eps > T::zero()) {
        return Err(Error::Precondition(format!("ε must be positive, got {eps}")));
    }
    let kf = T::from_i64(k).expect("wavenumber");
    let omega_squared = kf * kf * dispersion_factor(kf, eps, regularized);
    let stable = omega_squared >= T::zero();
    Ok(DispersionPoint {
        k,
        omega_squared,
        stable,
        growth_rate: if stable { T::zero() } else { (-omega_squared).sqrt() },
    })
}

/// Rows `k = 1..=k_max`.
pub fn dispersion_table<T: Real>(eps: T, k_max: i64, regularized: bool) -> Result<Vec<DispersionPoint<T>>> {
    (1..=k_max).map(|k| dispersion_relation(k, eps, regularized)).collect()
}
