//! Internal averaging operators.
//!
//! Along the `j`-th characteristic `x = y_j + λ_j s` every other wave is
//! seen at `y_k = y_j + (λ_j - λ_k) s`, so a product of modes survives the
//! long-time mean only when its total frequency in `s` vanishes. For
//! trigonometric polynomials this is exact and is what the spectral forms
//! below compute; [`discrete_coupling`] is the grid quadrature used inside
//! the finite-difference scheme.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::resonance::{SystemSpec, VANISHING_TOL};
use crate::scalar::Real;
use crate::spectrum::{Mode, Spectrum};

/// Which shallow-water average is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AverageDirection {
    /// `⟨h V⁻⟩₊ = lim (1/T) ∫₀ᵀ h(y + s) V⁻(y + 2s) ds`
    Plus,
    /// `⟨h V⁺⟩₋ = lim (1/T) ∫₀ᵀ h(y - s) V⁺(y - 2s) ds`
    Minus,
}

impl AverageDirection {
    /// `+1` for `Plus`, `-1` for `Minus`: the sign of the shift `s` in the integrand.
    pub fn shift_sign(self) -> isize {
        match self {
            AverageDirection::Plus => 1,
            AverageDirection::Minus => -1,
        }
    }
}

/// Spectral form of the shallow-water average of `h · V`.
///
/// A pair of modes `(μ, ν)` survives iff `μ + 2ν = 0`, contributing
/// `h_μ V_ν` at frequency `μ + ν = -ν`. Both directions share this rule: the
/// sign of `s` only flips the phase that averages out.
pub fn spectral_average<T: Real>(h: &Spectrum<T>, v: &Spectrum<T>, _dir: AverageDirection) -> Spectrum<T> {
    let tol = T::lit(VANISHING_TOL);
    let two = T::lit(2.0);
    Spectrum::from_modes(h.modes().iter().flat_map(|hm| {
        v.modes().iter().filter_map(move |vm| {
            ((hm.frequency + two * vm.frequency).abs() < tol)
                .then(|| Mode::new(hm.frequency + vm.frequency, hm.amplitude * vm.amplitude))
        })
    }))
}

/// Spectral form of `M_j[w_k ∂w_m/∂y_m]` for trigonometric `w`.
///
/// `spectra[k]` is the spectrum of `w_k` in its own characteristic variable.
/// A pair `(ν, ν')` survives iff `ν(λ_j - λ_k) + ν'(λ_j - λ_m) = 0`, giving
/// `a_ν b_ν' iν'` at frequency `ν + ν'` in `y_j`.
pub fn mj_average_product<T: Real>(
    spec: &SystemSpec<T>,
    j: usize,
    k: usize,
    m: usize,
    spectra: &[Spectrum<T>],
) -> Result<Spectrum<T>> {
    let n = spec.n();
    if j >= n || k >= n || m >= n {
        return Err(Error::Precondition(format!("family index out of range (n = {n})")));
    }
    if spectra.len() != n {
        return Err(Error::Precondition(format!("expected {n} spectra, got {}", spectra.len())));
    }
    let lam = spec.lambdas();
    let (dk, dm) = (lam[j] - lam[k], lam[j] - lam[m]);
    let tol = T::lit(VANISHING_TOL);
    let modes = spectra[k].modes().iter().flat_map(|a| {
        spectra[m].modes().iter().filter_map(move |b| {
            let drift = a.frequency * dk + b.frequency * dm;
            (drift.abs() < tol).then(|| {
                let deriv = Complex::new(T::zero(), b.frequency);
                Mode::new(a.frequency + b.frequency, a.amplitude * b.amplitude * deriv)
            })
        })
    });
    Ok(Spectrum::from_modes(modes.collect::<Vec<_>>()))
}

/// Averaged quadratic right-hand side `Σ_{k,m} f_jkm M_j[w_k ∂w_m/∂y_m]`.
pub fn averaged_quadratic_rhs<T: Real>(spec: &SystemSpec<T>, j: usize, spectra: &[Spectrum<T>]) -> Result<Spectrum<T>> {
    let n = spec.n();
    let mut acc = Spectrum::empty();
    for k in 0..n {
        for m in 0..n {
            let f = spec.coupling(j, k, m);
            if f != T::zero() {
                let term = mj_average_product(spec, j, k, m, spectra)?;
                acc = acc.add(&term.scale(Complex::new(f, T::zero())));
            }
        }
    }
    Ok(acc)
}

/// Quadrature of the shallow-water average at node `j`:
///
/// `F_±(j) = (1/P) Σ_{i=1}^{M} h(y_j ∓ i·Δy) (V^{n+1}_{j∓2i} + V^n_{j∓2i})/2 · Δy`
///
/// with `Plus` taking the upper sign. The sum covers one full period, so on
/// a `2π` grid the prefactor is the `1/2π` of a period average.
pub fn discrete_coupling<T: Real>(
    h: &Field<T>,
    v_new: &Field<T>,
    v_old: &Field<T>,
    j: usize,
    dir: AverageDirection,
) -> Result<T> {
    h.check_grid(v_new)?;
    h.check_grid(v_old)?;
    Ok(coupling_at(h.values(), &midpoint(v_new, v_old), j, dir))
}

fn midpoint<T: Real>(a: &Field<T>, b: &Field<T>) -> Vec<T> {
    let half = T::lit(0.5);
    a.values().iter().zip(b.values()).map(|(&x, &y)| (x + y) * half).collect()
}

/// `(1/M) Σ_{i=1}^{M} h_{j∓i} v_{j∓2i}`, which equals `(1/P) Σ … Δy`.
fn coupling_at<T: Real>(h: &[T], v: &[T], j: usize, dir: AverageDirection) -> T {
    let m = h.len();
    let mut sum = T::zero();
    match dir {
        AverageDirection::Plus => {
            // indices j - i and j - 2i, walked downwards modulo m
            let (mut ih, mut iv) = (j, j);
            for _ in 0..m {
                ih = if ih == 0 { m - 1 } else { ih - 1 };
                iv = (iv + 2 * m - 2) % m;
                sum += h[ih] * v[iv];
            }
        }
        AverageDirection::Minus => {
            let (mut ih, mut iv) = (j, j);
            for _ in 0..m {
                ih = if ih + 1 == m { 0 } else { ih + 1 };
                iv = (iv + 2) % m;
                sum += h[ih] * v[iv];
            }
        }
    }
    sum / T::of_usize(m)
}

/// `F_±` at every node.
pub fn coupling_field<T: Real>(h: &Field<T>, v_new: &Field<T>, v_old: &Field<T>, dir: AverageDirection) -> Result<Field<T>> {
    h.check_grid(v_new)?;
    h.check_grid(v_old)?;
    let mid = midpoint(v_new, v_old);
    let values = (0..h.len()).map(|j| coupling_at(h.values(), &mid, j, dir)).collect();
    Ok(Field::from_raw(*h.grid(), values))
}

/// `(F_±(j+1) - F_±(j-1)) / (4Δy)` at every node.
///
/// This is half the central difference of the quadrature; the overall sign
/// with which it enters each equation is applied by the scheme.
pub fn coupling_term_derivative<T: Real>(
    h: &Field<T>,
    v_new: &Field<T>,
    v_old: &Field<T>,
    dir: AverageDirection,
) -> Result<Field<T>> {
    let f = coupling_field(h, v_new, v_old, dir)?;
    let four_h = T::lit(4.0) * h.grid().spacing();
    let values = (0..f.len() as isize).map(|j| (f.at(j + 1) - f.at(j - 1)) / four_h).collect();
    Ok(Field::from_raw(*h.grid(), values))
}
