use crate::error::{Error, Result};
use crate::scalar::Real;

/// Uniform mesh covering one spatial period `[0, P)` with `M` nodes `y_j = j h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicGrid<T> {
    num_points: usize,
    period: T,
}

impl<T: Real> PeriodicGrid<T> {
    pub const MIN_POINTS: usize = 8;

    /// Builds a grid of `num_points` nodes on a period of length `period`.
    ///
    /// The node count must be even and at least [`Self::MIN_POINTS`]; the
    /// coupling quadrature shifts indices by `2i` and relies on both.
    pub fn new(num_points: usize, period: T) -> Result<Self> {
        if num_points < Self::MIN_POINTS {
            return Err(Error::InvalidGrid(format!(
                "need at least {} points, got {num_points}",
                Self::MIN_POINTS
            )));
        }
        if !num_points.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "point count must be even, got {num_points}"
            )));
        }
        if !(period > T::zero()) || !period.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "period must be positive and finite, got {period}"
            )));
        }
        Ok(Self { num_points, period })
    }

    /// Grid on the default period `2π`.
    pub fn two_pi(num_points: usize) -> Result<Self> {
        Self::new(num_points, T::TAU())
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    pub fn period(&self) -> T {
        self.period
    }

    pub fn spacing(&self) -> T {
        self.period / T::of_usize(self.num_points)
    }

    pub fn node(&self, j: usize) -> T {
        T::of_usize(j) * self.spacing()
    }

    pub fn nodes(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.num_points).map(move |j| self.node(j))
    }

    /// Reduces a signed index modulo `M`.
    #[inline]
    pub fn wrap(&self, j: isize) -> usize {
        j.rem_euclid(self.num_points as isize) as usize
    }

    /// Fundamental angular wavenumber `2π / P`.
    pub fn base_wavenumber(&self) -> T {
        T::TAU() / self.period
    }

    /// Same point count and (bitwise) same period.
    pub fn same_as(&self, other: &Self) -> bool {
        self.num_points == other.num_points && self.period == other.period
    }
}
