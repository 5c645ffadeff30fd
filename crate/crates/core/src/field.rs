//! Discrete periodic fields and the norms used to compare them.

use crate::error::{Error, Result};
use crate::grid::PeriodicGrid;
use crate::scalar::Real;

/// Real samples `v_j = v(y_j)` on a [`PeriodicGrid`]; indices wrap modulo `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field<T> {
    grid: PeriodicGrid<T>,
    values: Vec<T>,
}

impl<T: Real> Field<T> {
    /// Wraps `values`, which must have one finite entry per node.
    pub fn new(grid: PeriodicGrid<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.num_points() {
            return Err(Error::Precondition(format!(
                "expected {} values, got {}",
                grid.num_points(),
                values.len()
            )));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { grid, values })
    }

    /// Callers guarantee length and finiteness.
    pub(crate) fn from_raw(grid: PeriodicGrid<T>, values: Vec<T>) -> Self {
        debug_assert_eq!(values.len(), grid.num_points());
        Self { grid, values }
    }

    pub fn zeros(grid: PeriodicGrid<T>) -> Self {
        Self::from_raw(grid, vec![T::zero(); grid.num_points()])
    }

    pub fn constant(grid: PeriodicGrid<T>, value: T) -> Self {
        Self::from_raw(grid, vec![value; grid.num_points()])
    }

    /// Evaluates `f` at every node.
    ///
    /// # Panics
    /// If `f` returns a non-finite value.
    pub fn sample(grid: PeriodicGrid<T>, f: impl Fn(T) -> T) -> Self {
        let values: Vec<T> = grid.nodes().map(f).collect();
        Self::new(grid, values).expect("sampled function must be finite on the grid")
    }

    pub fn grid(&self) -> &PeriodicGrid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Periodic access: `at(-1)` is the last node.
    #[inline]
    pub fn at(&self, j: isize) -> T {
        self.values[self.grid.wrap(j)]
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Discrete mean `(1/M) Σ v_j`.
    pub fn mean(&self) -> T {
        self.values.iter().copied().sum::<T>() / T::of_usize(self.len())
    }

    /// Subtracts the discrete mean.
    pub fn remove_mean(&self) -> Self {
        let m = self.mean();
        self.map(|v| v - m)
    }

    /// Cyclic shift: `result_j = v_{j + s}`.
    pub fn shifted(&self, s: isize) -> Self {
        let values = (0..self.len() as isize).map(|j| self.at(j + s)).collect();
        Self::from_raw(self.grid, values)
    }

    /// Reflection `y -> -y`: `result_j = v_{-j}`.
    pub fn reflected(&self) -> Self {
        let values = (0..self.len() as isize).map(|j| self.at(-j)).collect();
        Self::from_raw(self.grid, values)
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self::from_raw(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        self.check_grid(other)?;
        Ok(Self::from_raw(
            self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        ))
    }

    pub fn scaled(&self, s: T) -> Self {
        self.map(|v| v * s)
    }

    pub fn max_abs(&self) -> T {
        self.values
            .iter()
            .fold(T::zero(), |acc, v| acc.max(v.abs()))
    }

    pub(crate) fn check_grid(&self, other: &Self) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

/// Maximum absolute difference `max_j |a_j - b_j|`.
pub fn sup_norm<T: Real>(a: &Field<T>, b: &Field<T>) -> Result<T> {
    a.check_grid(b)?;
    Ok(a.values
        .iter()
        .zip(&b.values)
        .fold(T::zero(), |acc, (&x, &y)| acc.max((x - y).abs())))
}

/// Root-mean-square difference `sqrt((1/M) Σ (a_j - b_j)^2)`.
pub fn l2_norm<T: Real>(a: &Field<T>, b: &Field<T>) -> Result<T> {
    a.check_grid(b)?;
    let s: T = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum();
    Ok((s / T::of_usize(a.len())).sqrt())
}

/// State `(V⁺, V⁻)` of the averaged system at slow time `tau`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldPair<T> {
    pub vplus: Field<T>,
    pub vminus: Field<T>,
    pub tau: T,
}

impl<T: Real> FieldPair<T> {
    pub fn new(vplus: Field<T>, vminus: Field<T>, tau: T) -> Result<Self> {
        vplus.check_grid(&vminus)?;
        if !(tau >= T::zero()) {
            return Err(Error::Precondition(format!("slow time must be >= 0, got {tau}")));
        }
        Ok(Self { vplus, vminus, tau })
    }

    pub fn zeros(grid: PeriodicGrid<T>) -> Self {
        Self {
            vplus: Field::zeros(grid),
            vminus: Field::zeros(grid),
            tau: T::zero(),
        }
    }

    pub fn grid(&self) -> &PeriodicGrid<T> {
        self.vplus.grid()
    }
}
