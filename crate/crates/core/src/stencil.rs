//! Periodic finite-difference operators.
//!
//! Notation follows the usual difference calculus on a uniform mesh:
//! forward `v_y = (v_{j+1} - v_j)/h`, backward `v_ȳ = (v_j - v_{j-1})/h`,
//! central `v_ẙ = (v_{j+1} - v_{j-1})/(2h)`.

use crate::field::Field;
use crate::scalar::Real;

fn apply<T: Real>(f: &Field<T>, op: impl Fn(&Field<T>, isize) -> T) -> Field<T> {
    let values = (0..f.len() as isize).map(|j| op(f, j)).collect();
    Field::from_raw(*f.grid(), values)
}

pub fn d_forward<T: Real>(f: &Field<T>) -> Field<T> {
    let h = f.grid().spacing();
    apply(f, |f, j| (f.at(j + 1) - f.at(j)) / h)
}

pub fn d_backward<T: Real>(f: &Field<T>) -> Field<T> {
    let h = f.grid().spacing();
    apply(f, |f, j| (f.at(j) - f.at(j - 1)) / h)
}

/// `(v_{j+1} - v_{j-1}) / (2h)`.
pub fn d_central<T: Real>(f: &Field<T>) -> Field<T> {
    let two_h = T::lit(2.0) * f.grid().spacing();
    apply(f, |f, j| (f.at(j + 1) - f.at(j - 1)) / two_h)
}

/// Composed third difference `v_{ȳyẙ} = (v_{j+2} - 2v_{j+1} + 2v_{j-1} - v_{j-2}) / (2h³)`.
pub fn d3<T: Real>(f: &Field<T>) -> Field<T> {
    let h = f.grid().spacing();
    let denom = T::lit(2.0) * h * h * h;
    let two = T::lit(2.0);
    apply(f, |f, j| {
        (f.at(j + 2) - two * f.at(j + 1) + two * f.at(j - 1) - f.at(j - 2)) / denom
    })
}

/// Imaginary part of the Fourier symbol of [`d3`] at integer mode `k`:
/// `d3(e^{iky}) = i σ_k e^{iky}` with `σ_k = (sin 2kh - 2 sin kh) / h³`.
pub fn d3_symbol<T: Real>(k: T, h: T) -> T {
    ((T::lit(2.0) * k * h).sin() - T::lit(2.0) * (k * h).sin()) / (h * h * h)
}
