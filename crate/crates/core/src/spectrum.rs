//! Finite trigonometric spectra `Σ a_ν e^{iνx}` with real, possibly
//! non-integer, frequencies.

use num_complex::Complex;

use crate::error::Result;
use crate::field::Field;
use crate::grid::PeriodicGrid;
use crate::scalar::Real;
use crate::transform::Fourier;

/// Modes with `|amplitude|` at or below this are not stored.
pub const AMPLITUDE_CUTOFF: f64 = 1e-12;
/// Frequencies closer than this are the same frequency.
pub const FREQUENCY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode<T> {
    pub frequency: T,
    pub amplitude: Complex<T>,
}

impl<T: Real> Mode<T> {
    pub fn new(frequency: T, amplitude: Complex<T>) -> Self {
        Self { frequency, amplitude }
    }
}

/// Real trigonometric building block used to describe profiles compactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrigTerm<T> {
    Constant(T),
    /// `coef · cos(ν x)`
    Cos { coef: T, nu: T },
    /// `coef · sin(ν x)`
    Sin { coef: T, nu: T },
}

/// Modes sorted by frequency, frequencies pairwise distinct, amplitudes above
/// [`AMPLITUDE_CUTOFF`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Spectrum<T> {
    modes: Vec<Mode<T>>,
}

impl<T: Real> Spectrum<T> {
    pub fn empty() -> Self {
        Self { modes: Vec::new() }
    }

    /// Collects modes, summing amplitudes of coinciding frequencies and
    /// dropping negligible ones.
    pub fn from_modes(modes: impl IntoIterator<Item = Mode<T>>) -> Self {
        let tol = T::lit(FREQUENCY_TOL);
        let mut all: Vec<Mode<T>> = modes.into_iter().collect();
        all.sort_by(|a, b| a.frequency.partial_cmp(&b.frequency).expect("finite frequency"));
        let mut merged: Vec<Mode<T>> = Vec::with_capacity(all.len());
        for m in all {
            match merged.last_mut() {
                Some(last) if (m.frequency - last.frequency).abs() <= tol => {
                    last.amplitude += m.amplitude;
                }
                _ => merged.push(m),
            }
        }
        let cutoff = T::lit(AMPLITUDE_CUTOFF);
        merged.retain(|m| m.amplitude.norm() > cutoff);
        Self { modes: merged }
    }

    /// Spectrum of a real trigonometric polynomial.
    pub fn from_terms(terms: &[TrigTerm<T>]) -> Self {
        let half = T::lit(0.5);
        let zero = T::zero();
        let modes = terms.iter().flat_map(|t| match *t {
            TrigTerm::Constant(c) => vec![Mode::new(zero, Complex::new(c, zero))],
            TrigTerm::Cos { coef, nu } => vec![
                Mode::new(nu, Complex::new(coef * half, zero)),
                Mode::new(-nu, Complex::new(coef * half, zero)),
            ],
            // sin νx = (e^{iνx} - e^{-iνx}) / 2i
            TrigTerm::Sin { coef, nu } => vec![
                Mode::new(nu, Complex::new(zero, -coef * half)),
                Mode::new(-nu, Complex::new(zero, coef * half)),
            ],
        });
        Self::from_modes(modes)
    }

    pub fn modes(&self) -> &[Mode<T>] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn frequencies(&self) -> impl Iterator<Item = T> + '_ {
        self.modes.iter().map(|m| m.frequency)
    }

    /// Amplitude at frequency `nu`, zero when absent.
    pub fn amplitude_at(&self, nu: T) -> Complex<T> {
        let tol = T::lit(FREQUENCY_TOL);
        self.modes
            .iter()
            .find(|m| (m.frequency - nu).abs() <= tol)
            .map_or(Complex::new(T::zero(), T::zero()), |m| m.amplitude)
    }

    /// Zero-frequency amplitude.
    pub fn mean(&self) -> Complex<T> {
        self.amplitude_at(T::zero())
    }

    pub fn without_mean(&self) -> Self {
        let tol = T::lit(FREQUENCY_TOL);
        Self {
            modes: self
                .modes
                .iter()
                .copied()
                .filter(|m| m.frequency.abs() > tol)
                .collect(),
        }
    }

    /// True when the mode at `-ν` carries the conjugate of the mode at `ν`
    /// (up to `tol`), i.e. the spectrum describes a real signal.
    pub fn is_conjugate_symmetric(&self, tol: T) -> bool {
        self.modes.iter().all(|m| {
            let partner = self.amplitude_at(-m.frequency);
            (partner - m.amplitude.conj()).norm() <= tol
        })
    }

    pub fn evaluate_complex(&self, x: T) -> Complex<T> {
        self.modes
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |acc, m| {
                acc + m.amplitude * Complex::from_polar(T::one(), m.frequency * x)
            })
    }

    /// Real part of the series at `x`.
    pub fn evaluate(&self, x: T) -> T {
        self.evaluate_complex(x).re
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self::from_modes(self.modes.iter().map(|m| Mode::new(m.frequency, m.amplitude * s)))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_modes(self.modes.iter().chain(&other.modes).copied())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex::new(-T::one(), T::zero())))
    }

    /// Spectrum of the pointwise product (all pairwise frequency sums).
    pub fn mul(&self, other: &Self) -> Self {
        Self::from_modes(self.modes.iter().flat_map(|a| {
            other
                .modes
                .iter()
                .map(move |b| Mode::new(a.frequency + b.frequency, a.amplitude * b.amplitude))
        }))
    }

    /// Spectrum of the derivative: each amplitude times `iν`.
    pub fn derivative(&self) -> Self {
        Self::from_modes(
            self.modes
                .iter()
                .map(|m| Mode::new(m.frequency, m.amplitude * Complex::new(T::zero(), m.frequency))),
        )
    }

    /// Largest amplitude difference over the union of frequencies.
    pub fn max_amplitude_diff(&self, other: &Self) -> T {
        self.modes
            .iter()
            .map(|m| (m.amplitude - other.amplitude_at(m.frequency)).norm())
            .chain(
                other
                    .modes
                    .iter()
                    .map(|m| (m.amplitude - self.amplitude_at(m.frequency)).norm()),
            )
            .fold(T::zero(), T::max)
    }

    /// Largest `|amplitude|`, zero for the empty spectrum.
    pub fn max_amplitude(&self) -> T {
        self.modes.iter().map(|m| m.amplitude.norm()).fold(T::zero(), T::max)
    }
}

/// Discrete Fourier coefficients of a field as a [`Spectrum`].
///
/// Frequencies are the integer wavenumbers `k ∈ (-M/2, M/2]` scaled by
/// `2π/P`; the Nyquist coefficient is split evenly between `±M/2` so real
/// fields give conjugate-symmetric spectra.
pub fn fourier_coeffs<T: Real>(field: &Field<T>) -> Spectrum<T> {
    let grid = field.grid();
    let m = grid.num_points();
    let fourier = Fourier::new(m);
    let coeffs = fourier.forward_real(field.values());
    let inv_m = T::one() / T::of_usize(m);
    let base = grid.base_wavenumber();
    let half = T::lit(0.5);
    let mut modes = Vec::with_capacity(m + 1);
    for (i, c) in coeffs.into_iter().enumerate() {
        let k = fourier.wavenumber(i);
        let amp = c * inv_m;
        if i == m / 2 {
            let nyquist = T::of_usize(m / 2) * base;
            modes.push(Mode::new(nyquist, amp * half));
            modes.push(Mode::new(-nyquist, amp * half));
        } else {
            modes.push(Mode::new(T::from_i64(k).expect("wavenumber") * base, amp));
        }
    }
    Spectrum::from_modes(modes)
}

/// Samples the real part of `spectrum` on `grid`.
///
/// Spectra made only of grid harmonics go through an inverse FFT (with the
/// usual aliasing of wavenumbers modulo `M`); anything else is summed
/// directly.
pub fn inverse_fourier<T: Real>(spectrum: &Spectrum<T>, grid: &PeriodicGrid<T>) -> Result<Field<T>> {
    let m = grid.num_points();
    let base = grid.base_wavenumber();
    let tol = T::lit(FREQUENCY_TOL);
    let harmonics: Option<Vec<i64>> = spectrum
        .modes()
        .iter()
        .map(|md| {
            let q = md.frequency / base;
            let k = q.round();
            ((q - k).abs() * base <= tol).then(|| k.to_i64().expect("finite wavenumber"))
        })
        .collect();
    let values = match harmonics {
        Some(ks) => {
            let mut buf = vec![Complex::new(T::zero(), T::zero()); m];
            for (k, md) in ks.into_iter().zip(spectrum.modes()) {
                buf[k.rem_euclid(m as i64) as usize] += md.amplitude * T::of_usize(m);
            }
            Fourier::new(m).inverse_real(buf)
        }
        None => grid.nodes().map(|y| spectrum.evaluate(y)).collect(),
    };
    Field::new(*grid, values)
}
