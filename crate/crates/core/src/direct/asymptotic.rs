//! Riemann variables and reconstruction of the asymptotic solution.

use crate::averaged::AveragedRun;
use crate::error::{Error, Result};
use crate::field::{Field, FieldPair};
use crate::grid::PeriodicGrid;
use crate::scalar::Real;

use super::DirectState;

/// `v± = (Z ± U)/2`.
pub fn riemann_split<T: Real>(state: &DirectState<T>) -> Result<FieldPair<T>> {
    let half = T::lit(0.5);
    let vp = state.z.zip_map(&state.u, |z, u| (z + u) * half)?;
    let vm = state.z.zip_map(&state.u, |z, u| (z - u) * half)?;
    FieldPair::new(vp, vm, T::zero())
}

/// `Z = v⁺ + v⁻`, `U = v⁺ - v⁻`.
pub fn riemann_join<T: Real>(pair: &FieldPair<T>) -> Result<(Field<T>, Field<T>)> {
    Ok((
        pair.vplus.zip_map(&pair.vminus, |a, b| a + b)?,
        pair.vplus.zip_map(&pair.vminus, |a, b| a - b)?,
    ))
}

/// Periodic piecewise-linear interpolation of `f` at `y`.
pub fn interpolate_periodic<T: Real>(f: &Field<T>, y: T) -> T {
    let grid = f.grid();
    let h = grid.spacing();
    let period = grid.period();
    let p = (y - period * (y / period).floor()) / h;
    let base = p.floor();
    let frac = p - base;
    let j = base.to_isize().expect("finite position");
    if frac.abs() <= T::lit(1e-9) {
        return f.at(j);
    }
    if (T::one() - frac).abs() <= T::lit(1e-9) {
        return f.at(j + 1);
    }
    f.at(j) * (T::one() - frac) + f.at(j + 1) * frac
}

/// `v±(t, x) = V±(εt, x ∓ t)`, interpolated linearly in slow time and
/// periodically-linearly in the characteristic variable, then joined to
/// `(Z, U)` on `x_grid`.
pub fn evaluate_asymptotic<T: Real>(run: &AveragedRun<T>, eps: T, t: T, x_grid: &PeriodicGrid<T>) -> Result<(Field<T>, Field<T>)> {
    if !(eps > T::zero()) {
        return Err(Error::Precondition(format!("ε must be positive, got {eps}")));
    }
    if x_grid.period() != run.grid().period() {
        return Err(Error::GridMismatch);
    }
    let tau = eps * t;
    if tau > run.tau_end() * (T::one() + T::lit(1e-12)) {
        return Err(Error::OutOfRange(format!(
            "εt = {tau} beyond the averaged run (τ_end = {})",
            run.tau_end()
        )));
    }
    let (vp, vm) = run.state_at(tau)?;
    let plus: Vec<T> = x_grid.nodes().map(|x| interpolate_periodic(&vp, x - t)).collect();
    let minus: Vec<T> = x_grid.nodes().map(|x| interpolate_periodic(&vm, x + t)).collect();
    let pair = FieldPair::new(Field::new(*x_grid, plus)?, Field::new(*x_grid, minus)?, tau)?;
    riemann_join(&pair)
}
