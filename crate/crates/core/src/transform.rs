//! Thin wrapper around `rustfft` for real periodic data.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::scalar::Real;

/// Planned forward/inverse transforms of one length. Unnormalised forward,
/// inverse scaled by `1/M` so that `inverse(forward(v)) = v`.
#[derive(Clone)]
pub(crate) struct Fourier<T: Real> {
    len: usize,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

impl<T: Real> Fourier<T> {
    pub fn new(len: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            len,
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
        }
    }

    pub fn forward_real(&self, values: &[T]) -> Vec<Complex<T>> {
        let mut buf: Vec<Complex<T>> = values.iter().map(|&v| Complex::new(v, T::zero())).collect();
        self.forward.process(&mut buf);
        buf
    }

    /// Inverse transform keeping only the real part.
    pub fn inverse_real(&self, mut coeffs: Vec<Complex<T>>) -> Vec<T> {
        self.inverse.process(&mut coeffs);
        let scale = T::one() / T::of_usize(self.len);
        coeffs.into_iter().map(|c| c.re * scale).collect()
    }

    /// Signed integer wavenumber stored at FFT index `i`.
    pub fn wavenumber(&self, i: usize) -> i64 {
        if i <= self.len / 2 {
            i as i64
        } else {
            i as i64 - self.len as i64
        }
    }
}
