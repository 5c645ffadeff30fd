//! Closed-form solutions used as ground truth: the secular-term transport
//! example, the internal-resonance model system, and the implicit simple
//! wave of `v_t + v_x = ε v v_x`.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Exact solution `e^{εt} sin(x - t)` of `u_t + u_x = εu`, `u(0,x) = sin x`.
pub fn linear_toy_exact<T: Real>(t: T, x: T, eps: T) -> T {
    (eps * t).exp() * (x - t).sin()
}

/// Partial sum of the naive expansion `Σ_{n ≤ order} (εt)^n/n! · sin(x - t)`.
///
/// Only orders 0, 1 and 2 are defined.
pub fn linear_toy_truncated<T: Real>(t: T, x: T, eps: T, order: u32) -> Result<T> {
    let s = eps * t;
    let factor = match order {
        0 => T::one(),
        1 => T::one() + s,
        2 => T::one() + s + s * s / T::lit(2.0),
        _ => {
            return Err(Error::Precondition(format!(
                "expansion order must be 0, 1 or 2, got {order}"
            )))
        }
    };
    Ok(factor * (x - t).sin())
}

/// Exact solution `(ε/4)(2t + sin 2(x-t) - sin 2x)` of
/// `u_t + u_x = ε v sin x`, `v = sin x`, `u(0,x) = 0`.
pub fn resonance_model_exact<T: Real>(t: T, x: T, eps: T) -> T {
    let two = T::lit(2.0);
    eps / T::lit(4.0) * (two * t + (two * (x - t)).sin() - (two * x).sin())
}

/// Internally averaged solution in slow time: `U(τ) = τ/2`.
pub fn resonance_model_averaged<T: Real>(tau: T) -> T {
    tau / T::lit(2.0)
}

/// The same averaged solution expressed in fast time: `U = εt/2`.
pub fn resonance_model_averaged_fast<T: Real>(t: T, eps: T) -> T {
    resonance_model_averaged(eps * t)
}

/// Externally averaged (frozen-solution) approximation of the model
/// system, which is identically zero.
pub fn resonance_model_external<T: Real>(_t: T, _x: T, _eps: T) -> T {
    T::zero()
}

/// Parameters of the implicit simple wave `v = v0(x - t + εtv)`.
#[derive(Clone)]
pub struct ImplicitWaveParams<T, F> {
    pub epsilon: T,
    pub v0: F,
    pub newton_tol: T,
    pub max_iter: usize,
}

impl<T: Real, F: Fn(T) -> T> ImplicitWaveParams<T, F> {
    pub fn new(epsilon: T, v0: F) -> Self {
        Self {
            epsilon,
            v0,
            newton_tol: T::lit(1e-12),
            max_iter: 100,
        }
    }
}

/// Solves `v = v0(x - t + εtv)` for the pre-breaking simple wave.
///
/// Newton's method on `g(v) = v - v0(x - t + εtv)` with a central-difference
/// slope, backtracking by halves when a step does not reduce `|g|`. If that
/// stalls, falls back to bisection on a bracket grown around `v0(x - t)`.
pub fn burgers_implicit_wave<T: Real, F: Fn(T) -> T>(
    params: &ImplicitWaveParams<T, F>,
    t: T,
    x: T,
) -> Result<T> {
    let st = params.epsilon * t;
    let g = |v: T| v - (params.v0)(x - t + st * v);
    let tol = params.newton_tol;
    let start = (params.v0)(x - t);
    if st == T::zero() {
        return Ok(start);
    }

    let half = T::lit(0.5);
    let fd = T::epsilon().cbrt();
    let mut v = start;
    let mut r = g(v);
    for _ in 0..params.max_iter {
        if r.abs() <= tol {
            return Ok(v);
        }
        let dv = fd * T::one().max(v.abs());
        let slope = (g(v + dv) - g(v - dv)) / (dv + dv);
        if slope == T::zero() || !slope.is_finite() {
            break;
        }
        let mut step = -r / slope;
        let mut accepted = false;
        for _ in 0..30 {
            let cand = v + step;
            let rc = g(cand);
            if rc.abs() < r.abs() {
                v = cand;
                r = rc;
                accepted = true;
                break;
            }
            step *= half;
        }
        if !accepted {
            break;
        }
    }
    if r.abs() <= tol {
        return Ok(v);
    }
    bisect(&g, start, tol, params.max_iter).ok_or(Error::NonConvergence {
        what: "implicit simple wave",
        iterations: params.max_iter,
        residual: r.abs().to_f64_lossy(),
    })
}

fn bisect<T: Real>(g: &impl Fn(T) -> T, around: T, tol: T, max_iter: usize) -> Option<T> {
    // g(v) = v - v0(..) is increasing before breaking, so a sign change
    // appears once the bracket covers the range of v0.
    let mut width = T::one();
    let (mut lo, mut hi) = (around - width, around + width);
    let mut grown = 0;
    while g(lo).signum() == g(hi).signum() {
        width *= T::lit(2.0);
        lo = around - width;
        hi = around + width;
        grown += 1;
        if grown > 60 {
            return None;
        }
    }
    let increasing = g(hi) > T::zero();
    for _ in 0..(max_iter.max(200)) {
        let mid = (lo + hi) * T::lit(0.5);
        let gm = g(mid);
        if gm.abs() <= tol {
            return Some(mid);
        }
        if (gm > T::zero()) == increasing {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= T::epsilon() * mid.abs().max(T::one()) {
            return (g(mid).abs() <= tol).then_some(mid);
        }
    }
    None
}
