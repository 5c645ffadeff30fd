//! Time integration of the averaged shallow-water system in slow time `τ`.
//!
//! The right-going profile `V = V⁺(τ, y)` and left-going `W = V⁻(τ, y)` obey
//!
//! ```text
//! V_τ = -(1/6) V_yyy - (3/2) V V_y + (1/2) ∂_y ⟨h V⁻⟩₊
//! W_τ = +(1/6) W_yyy + (3/2) W W_y - (1/2) ∂_y ⟨h V⁺⟩₋
//! ```
//!
//! discretised by the conservative two-level Crank–Nicolson scheme
//!
//! ```text
//! V_τ = -(1/6)(V̄)_{ȳyẙ} - (3/4)((V̂² + V̂V + V²)/3)_ẙ + (F₊(Ŵ,W,j+1) - F₊(Ŵ,W,j-1))/(4h)
//! ```
//!
//! (hats are the new level, `V̄` the two-level mean; the `W` equation is the
//! mirror image). The coupling enters with the sign of `U = v⁺ - v⁻` in the
//! `(hU)_x` term of the underlying system.
//!
//! The implicit equations are solved by iterating on the nonlinear and
//! coupling terms while the linear dispersive part, a circulant operator, is
//! inverted exactly in Fourier space.

use std::collections::BTreeSet;

use num_complex::Complex;

use crate::averaging::{coupling_term_derivative, spectral_average, AverageDirection};
use crate::error::{Error, Result};
use crate::field::{sup_norm, Field, FieldPair};
use crate::grid::PeriodicGrid;
use crate::scalar::Real;
use crate::spectrum::Spectrum;
use crate::stencil::{d3, d3_symbol, d_central};
use crate::transform::Fourier;

/// Sign of the coupling term in the right-going equation (`-` in the left-going one).
const COUPLING_SIGN: f64 = 1.0;

/// Which groups of terms the averaged system carries.
///
/// The averaged counterpart of a model keeps exactly the O(ε) effects the
/// model has: dispersion from `U_xxx`, quadratic terms from `(ZU)_x` and
/// `UU_x`, and bottom coupling from `(hU)_x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AveragedTerms {
    pub dispersion: bool,
    pub nonlinear: bool,
    pub coupling: bool,
}

impl AveragedTerms {
    pub const ALL: Self = Self {
        dispersion: true,
        nonlinear: true,
        coupling: true,
    };

    pub fn without_coupling(self) -> Self {
        Self { coupling: false, ..self }
    }
}

impl Default for AveragedTerms {
    fn default() -> Self {
        Self::ALL
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeParams<T> {
    /// Slow-time step.
    pub dt: T,
    pub fp_tol: T,
    pub fp_max_iter: usize,
    pub tau_end: T,
    pub terms: AveragedTerms,
    /// Advisory bound `dt ≤ c·h`; exceeding it is logged, not rejected.
    pub stability_factor: T,
}

impl<T: Real> SchemeParams<T> {
    pub fn new(dt: T) -> Self {
        Self {
            dt,
            fp_tol: T::lit(1e-12),
            fp_max_iter: 100,
            tau_end: T::one(),
            terms: AveragedTerms::ALL,
            stability_factor: T::one(),
        }
    }

    pub fn with_tau_end(self, tau_end: T) -> Self {
        Self { tau_end, ..self }
    }

    pub fn with_terms(self, terms: AveragedTerms) -> Self {
        Self { terms, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > T::zero()) || !self.dt.is_finite() {
            return Err(Error::Precondition(format!("time step must be positive, got {}", self.dt)));
        }
        if !(self.fp_tol > T::zero()) {
            return Err(Error::Precondition(format!("fixed-point tolerance must be positive, got {}", self.fp_tol)));
        }
        if self.fp_max_iter == 0 {
            return Err(Error::Precondition("need at least one fixed-point iteration".into()));
        }
        if !(self.tau_end >= T::zero()) || !self.tau_end.is_finite() {
            return Err(Error::Precondition(format!("tau_end must be >= 0, got {}", self.tau_end)));
        }
        Ok(())
    }
}

/// Per-step record of the fixed-point solve and the discrete masses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDiagnostics<T> {
    pub tau: T,
    pub iterations: usize,
    pub residual: T,
    pub mass_plus: T,
    pub mass_minus: T,
}

/// Selects one of the two decoupled KdV equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wave {
    /// `V_τ + (3/2) V V_y + (1/6) V_yyy = 0`
    Plus,
    /// `V_τ - (3/2) V V_y - (1/6) V_yyy = 0`
    Minus,
}

/// The discrete averaged system for a fixed bottom profile and step.
pub struct AveragedScheme<T: Real> {
    grid: PeriodicGrid<T>,
    h_field: Field<T>,
    params: SchemeParams<T>,
    fourier: Fourier<T>,
    /// `dt/12 · σ_k`, the half-step dispersive symbol per FFT index.
    half_symbol: Vec<T>,
}

impl<T: Real> AveragedScheme<T> {
    pub fn new(h_field: Field<T>, params: SchemeParams<T>) -> Result<Self> {
        params.validate()?;
        let grid = *h_field.grid();
        let h = grid.spacing();
        if params.dt > params.stability_factor * h {
            log::warn!(
                "averaged step dt = {} exceeds {} * h = {}; fixed-point contraction may suffer",
                params.dt,
                params.stability_factor,
                params.stability_factor * h
            );
        }
        let m = grid.num_points();
        let fourier = Fourier::new(m);
        let base = grid.base_wavenumber();
        let twelfth = params.dt / T::lit(12.0);
        let half_symbol = (0..m)
            .map(|i| {
                let k = T::from_i64(fourier.wavenumber(i)).expect("wavenumber") * base;
                // d3 acts on e^{iky} as i·σ(k); σ is odd in k
                twelfth * d3_symbol(k, h)
            })
            .collect();
        Ok(Self {
            grid,
            h_field,
            params,
            fourier,
            half_symbol,
        })
    }

    pub fn params(&self) -> &SchemeParams<T> {
        &self.params
    }

    pub fn h_field(&self) -> &Field<T> {
        &self.h_field
    }

    /// Explicit part (nonlinear + coupling) of both equations at the
    /// iterate `(v_new, w_new)` given the old level.
    fn explicit_terms(&self, v_new: &Field<T>, v_old: &Field<T>, w_new: &Field<T>, w_old: &Field<T>) -> Result<(Field<T>, Field<T>)> {
        let terms = self.params.terms;
        let mut nv = Field::zeros(self.grid);
        let mut nw = Field::zeros(self.grid);
        if terms.nonlinear {
            let quarter = T::lit(0.25);
            let qv = d_central(&v_new.zip_map(v_old, |a, b| a * a + a * b + b * b)?);
            let qw = d_central(&w_new.zip_map(w_old, |a, b| a * a + a * b + b * b)?);
            nv = qv.scaled(-quarter);
            nw = qw.scaled(quarter);
        }
        if terms.coupling {
            let s = T::lit(COUPLING_SIGN);
            let cv = coupling_term_derivative(&self.h_field, w_new, w_old, AverageDirection::Plus)?;
            let cw = coupling_term_derivative(&self.h_field, v_new, v_old, AverageDirection::Minus)?;
            nv = nv.zip_map(&cv, |a, c| a + s * c)?;
            nw = nw.zip_map(&cw, |a, c| a - s * c)?;
        }
        Ok((nv, nw))
    }

    /// Dispersive part `∓(1/6) d3(mean of levels)`.
    fn dispersive(&self, new: &Field<T>, old: &Field<T>, wave: Wave) -> Result<Field<T>> {
        if !self.params.terms.dispersion {
            return Ok(Field::zeros(self.grid));
        }
        let sixth = T::one() / T::lit(6.0);
        let coef = match wave {
            Wave::Plus => -sixth,
            Wave::Minus => sixth,
        };
        let mid = new.zip_map(old, |a, b| (a + b) * T::lit(0.5))?;
        Ok(d3(&mid).scaled(coef))
    }

    /// Full fds right-hand sides at `(new, old)` levels.
    pub fn rhs(&self, v_new: &Field<T>, v_old: &Field<T>, w_new: &Field<T>, w_old: &Field<T>) -> Result<(Field<T>, Field<T>)> {
        let (nv, nw) = self.explicit_terms(v_new, v_old, w_new, w_old)?;
        let rv = self.dispersive(v_new, v_old, Wave::Plus)?.zip_map(&nv, |a, b| a + b)?;
        let rw = self.dispersive(w_new, w_old, Wave::Minus)?.zip_map(&nw, |a, b| a + b)?;
        Ok((rv, rw))
    }

    /// Solves `(I ± dt/2·D)·new = (I ∓ dt/2·D)·old + dt·explicit` where `D`
    /// is the dispersive operator of `wave`.
    fn solve_linear(&self, old: &Field<T>, explicit: &Field<T>, wave: Wave) -> Field<T> {
        let dt = self.params.dt;
        if !self.params.terms.dispersion {
            return Field::from_raw(
                self.grid,
                old.values().iter().zip(explicit.values()).map(|(&o, &e)| o + dt * e).collect(),
            );
        }
        let old_hat = self.fourier.forward_real(old.values());
        let exp_hat = self.fourier.forward_real(explicit.values());
        // Plus: V_τ = -(1/6) D3 → new (1 + i a) = old (1 - i a) + dt N
        let sign = match wave {
            Wave::Plus => T::one(),
            Wave::Minus => -T::one(),
        };
        let out: Vec<Complex<T>> = old_hat
            .iter()
            .zip(&exp_hat)
            .zip(&self.half_symbol)
            .map(|((&o, &e), &a)| {
                let ia = Complex::new(T::zero(), sign * a);
                (o * (Complex::new(T::one(), T::zero()) - ia) + e * dt) / (Complex::new(T::one(), T::zero()) + ia)
            })
            .collect();
        Field::from_raw(self.grid, self.fourier.inverse_real(out))
    }

    fn residual(&self, new: &Field<T>, old: &Field<T>, explicit: &Field<T>, wave: Wave) -> Result<T> {
        let dt = self.params.dt;
        let disp = self.dispersive(new, old, wave)?;
        let mut worst = T::zero();
        for i in 0..new.len() {
            let r = new.values()[i] - old.values()[i] - dt * (disp.values()[i] + explicit.values()[i]);
            worst = worst.max(r.abs());
        }
        Ok(worst)
    }

    /// One step of the scheme from `state`.
    pub fn step(&self, state: &FieldPair<T>) -> Result<(FieldPair<T>, StepDiagnostics<T>)> {
        if !state.vplus.grid().same_as(&self.grid) || !state.vminus.grid().same_as(&self.grid) {
            return Err(Error::GridMismatch);
        }
        if !state.vplus.is_finite() || !state.vminus.is_finite() {
            return Err(Error::Precondition("state must be finite".into()));
        }
        let (v_old, w_old) = (&state.vplus, &state.vminus);
        let (mut nv, mut nw) = self.explicit_terms(v_old, v_old, w_old, w_old)?;
        let mut residual = T::infinity();
        for it in 1..=self.params.fp_max_iter {
            let v = self.solve_linear(v_old, &nv, Wave::Plus);
            let w = self.solve_linear(w_old, &nw, Wave::Minus);
            let (nv2, nw2) = self.explicit_terms(&v, v_old, &w, w_old)?;
            residual = self
                .residual(&v, v_old, &nv2, Wave::Plus)?
                .max(self.residual(&w, w_old, &nw2, Wave::Minus)?);
            if !residual.is_finite() {
                break;
            }
            if residual <= self.params.fp_tol {
                let tau = state.tau + self.params.dt;
                let diag = StepDiagnostics {
                    tau,
                    iterations: it,
                    residual,
                    mass_plus: v.mean(),
                    mass_minus: w.mean(),
                };
                return Ok((FieldPair { vplus: v, vminus: w, tau }, diag));
            }
            nv = nv2;
            nw = nw2;
        }
        Err(Error::NonConvergence {
            what: "averaged scheme fixed-point iteration",
            iterations: self.params.fp_max_iter,
            residual: residual.to_f64_lossy(),
        })
    }
}

/// One scheme step (convenience wrapper building the scheme).
pub fn step<T: Real>(state: &FieldPair<T>, h_field: &Field<T>, params: &SchemeParams<T>) -> Result<FieldPair<T>> {
    h_field.check_grid(&state.vplus)?;
    let scheme = AveragedScheme::new(h_field.clone(), *params)?;
    scheme.step(state).map(|(s, _)| s)
}

/// One step of a single decoupled KdV equation with the same stencils.
pub fn kdv_reference_step<T: Real>(field: &Field<T>, params: &SchemeParams<T>, wave: Wave) -> Result<Field<T>> {
    let grid = *field.grid();
    let params = params.with_terms(params.terms.without_coupling());
    let scheme = AveragedScheme::new(Field::zeros(grid), params)?;
    let zero = Field::zeros(grid);
    let state = match wave {
        Wave::Plus => FieldPair::new(field.clone(), zero, T::zero())?,
        Wave::Minus => FieldPair::new(zero, field.clone(), T::zero())?,
    };
    let (next, _) = scheme.step(&state)?;
    Ok(match wave {
        Wave::Plus => next.vplus,
        Wave::Minus => next.vminus,
    })
}

/// Semi-discrete right-hand side: the scheme's operator with both time
/// levels equal to `state`.
pub fn semi_discrete_rhs<T: Real>(state: &FieldPair<T>, h_field: &Field<T>, terms: AveragedTerms) -> Result<(Field<T>, Field<T>)> {
    let params = SchemeParams::new(T::one()).with_terms(terms);
    let scheme = AveragedScheme::new(h_field.clone(), params)?;
    scheme.rhs(&state.vplus, &state.vplus, &state.vminus, &state.vminus)
}

/// Continuous right-hand sides `(V_τ, W_τ)` of the averaged system for
/// trigonometric data, with exact averaging and differentiation.
pub fn exact_rhs<T: Real>(v: &Spectrum<T>, w: &Spectrum<T>, h: &Spectrum<T>, terms: AveragedTerms) -> (Spectrum<T>, Spectrum<T>) {
    let re = |x: f64| Complex::new(T::lit(x), T::zero());
    let mut rv = Spectrum::empty();
    let mut rw = Spectrum::empty();
    if terms.dispersion {
        rv = rv.add(&v.derivative().derivative().derivative().scale(re(-1.0 / 6.0)));
        rw = rw.add(&w.derivative().derivative().derivative().scale(re(1.0 / 6.0)));
    }
    if terms.nonlinear {
        rv = rv.add(&v.mul(v).derivative().scale(re(-0.75)));
        rw = rw.add(&w.mul(w).derivative().scale(re(0.75)));
    }
    if terms.coupling {
        let half = 0.5 * COUPLING_SIGN;
        rv = rv.add(&spectral_average(h, w, AverageDirection::Plus).derivative().scale(re(half)));
        rw = rw.add(&spectral_average(h, v, AverageDirection::Minus).derivative().scale(re(-half)));
    }
    (rv, rw)
}

/// Snapshots and diagnostics of one averaged-system integration.
#[derive(Debug, Clone, PartialEq)]
pub struct AveragedRun<T> {
    /// Strictly increasing in `tau`; the first one is the initial state.
    pub states: Vec<FieldPair<T>>,
    pub h_field: Field<T>,
    pub params: SchemeParams<T>,
    pub diagnostics: Vec<StepDiagnostics<T>>,
}

impl<T: Real> AveragedRun<T> {
    pub fn grid(&self) -> &PeriodicGrid<T> {
        self.h_field.grid()
    }

    pub fn tau_end(&self) -> T {
        self.states.last().map_or(T::zero(), |s| s.tau)
    }

    /// Linear interpolation in `τ` between the bracketing snapshots.
    pub fn state_at(&self, tau: T) -> Result<(Field<T>, Field<T>)> {
        let tol = T::lit(1e-12) * T::one().max(self.tau_end());
        let first = &self.states[0];
        if tau < first.tau - tol || tau > self.tau_end() + tol {
            return Err(Error::OutOfRange(format!(
                "slow time {tau} outside the computed range [{}, {}]",
                first.tau,
                self.tau_end()
            )));
        }
        let idx = self.states.partition_point(|s| s.tau < tau);
        if idx < self.states.len() && (self.states[idx].tau - tau).abs() <= tol {
            let s = &self.states[idx];
            return Ok((s.vplus.clone(), s.vminus.clone()));
        }
        if idx == 0 {
            return Ok((first.vplus.clone(), first.vminus.clone()));
        }
        if idx >= self.states.len() {
            let s = self.states.last().expect("non-empty");
            return Ok((s.vplus.clone(), s.vminus.clone()));
        }
        let (a, b) = (&self.states[idx - 1], &self.states[idx]);
        let w = (tau - a.tau) / (b.tau - a.tau);
        let lerp = |x: T, y: T| x + (y - x) * w;
        Ok((a.vplus.zip_map(&b.vplus, lerp)?, a.vminus.zip_map(&b.vminus, lerp)?))
    }
}

/// Integrates from `initial` to `params.tau_end`, keeping the initial and
/// final states and those at the steps nearest to each of `snapshot_taus`.
pub fn run<T: Real>(initial: &FieldPair<T>, h_field: &Field<T>, params: &SchemeParams<T>, snapshot_taus: &[T]) -> Result<AveragedRun<T>> {
    params.validate()?;
    h_field.check_grid(&initial.vplus)?;
    h_field.check_grid(&initial.vminus)?;
    let tau_end = params.tau_end;
    let mut params = *params;
    let n_steps = if tau_end > T::zero() {
        let n = (tau_end / params.dt).round().max(T::one());
        params.dt = tau_end / n;
        n.to_usize().expect("step count")
    } else {
        0
    };
    let tol = T::lit(1e-12) * T::one().max(tau_end);
    let mut wanted = BTreeSet::new();
    for &t in snapshot_taus {
        if t < -tol || t > tau_end + tol {
            return Err(Error::OutOfRange(format!("snapshot at τ = {t} outside [0, {tau_end}]")));
        }
        if n_steps > 0 {
            let idx = (t / params.dt).round().to_usize().unwrap_or(0).min(n_steps);
            wanted.insert(idx);
        }
    }
    wanted.remove(&0);
    if n_steps > 0 {
        wanted.insert(n_steps);
    }

    let scheme = AveragedScheme::new(h_field.clone(), params)?;
    let mut state = FieldPair::new(initial.vplus.clone(), initial.vminus.clone(), T::zero())?;
    let mut states = vec![state.clone()];
    let mut diagnostics = Vec::with_capacity(n_steps);
    for n in 1..=n_steps {
        let (mut next, mut diag) = scheme.step(&state)?;
        // recompute τ from the step count to avoid drift
        next.tau = T::of_usize(n) * params.dt;
        diag.tau = next.tau;
        diagnostics.push(diag);
        if wanted.contains(&n) {
            states.push(next.clone());
        }
        state = next;
    }
    Ok(AveragedRun {
        states,
        h_field: h_field.clone(),
        params,
        diagnostics,
    })
}

/// Largest change of either discrete mean over a run.
pub fn mass_drift<T: Real>(initial: &FieldPair<T>, run: &AveragedRun<T>) -> T {
    let (m0p, m0m) = (initial.vplus.mean(), initial.vminus.mean());
    run.diagnostics.iter().fold(T::zero(), |acc, d| {
        acc.max((d.mass_plus - m0p).abs()).max((d.mass_minus - m0m).abs())
    })
}

/// Sup-norm distance between the final states of two runs.
pub fn final_difference<T: Real>(a: &AveragedRun<T>, b: &AveragedRun<T>) -> Result<T> {
    let (sa, sb) = (a.states.last().expect("non-empty"), b.states.last().expect("non-empty"));
    Ok(sup_norm(&sa.vplus, &sb.vplus)?.max(sup_norm(&sa.vminus, &sb.vminus)?))
}
