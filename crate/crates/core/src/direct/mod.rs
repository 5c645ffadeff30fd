//! Pseudo-spectral solvers for the original ε-dependent shallow-water
//! type systems.
//!
//! Spatial derivatives are exact on the trigonometric interpolant, products
//! are dealiased with the 2/3 rule, and time stepping is fourth-order
//! Runge–Kutta in integrating-factor (Lawson) form: the linear wave and
//! dispersion operator is propagated exactly mode by mode, so the stiff
//! `U_xxx`/`U_xxxxx` terms impose no step restriction.

mod asymptotic;
mod dispersion;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;

use crate::averaged::AveragedTerms;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::PeriodicGrid;
use crate::scalar::Real;
use crate::spectrum::AMPLITUDE_CUTOFF;
use crate::transform::Fourier;

pub use asymptotic::{evaluate_asymptotic, interpolate_periodic, riemann_join, riemann_split};
pub use dispersion::{dispersion_factor, dispersion_relation, dispersion_table, DispersionPoint};

/// Runs must end before `c0/ε`.
pub const DEFAULT_C0: f64 = 1.2;
/// Sup-norm above which a run is declared blown up.
pub const BLOWUP_LIMIT: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// `Z_t + (HU)_x = -(ε/3)U_xxx`, `U_t + Z_x = 0` (ill-posed for `k²ε ≥ 3`).
    LinearDispersion,
    /// As above with the extra `-(ε²/20)U_xxxxx`.
    LinearRegularized,
    /// `Z_t + (HU)_x = -ε(ZU)_x`, `U_t + Z_x = -εUU_x`.
    NonlinearNondispersive,
    /// `Z_t + U_x = ε(-U_xxx/3 - (hU)_x - (ZU)_x)`, `U_t + Z_x = -εUU_x`.
    SimplifiedSw,
    /// The full Boussinesq-type system with the fifth-order regularisation.
    FullSwRegularized,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::LinearDispersion,
        ModelKind::LinearRegularized,
        ModelKind::NonlinearNondispersive,
        ModelKind::SimplifiedSw,
        ModelKind::FullSwRegularized,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::LinearDispersion => "linear_dispersion",
            ModelKind::LinearRegularized => "linear_regularized",
            ModelKind::NonlinearNondispersive => "nonlinear_nondispersive",
            ModelKind::SimplifiedSw => "simplified_sw",
            ModelKind::FullSwRegularized => "full_sw_regularized",
        }
    }

    pub fn is_dispersive(self) -> bool {
        !matches!(self, ModelKind::NonlinearNondispersive)
    }

    pub fn is_regularized(self) -> bool {
        matches!(self, ModelKind::LinearRegularized | ModelKind::FullSwRegularized)
    }

    pub fn is_nonlinear(self) -> bool {
        matches!(
            self,
            ModelKind::NonlinearNondispersive | ModelKind::SimplifiedSw | ModelKind::FullSwRegularized
        )
    }

    /// Linearly well-posed kinds; only these get the automatic dt-halving retry.
    pub fn is_well_posed(self) -> bool {
        !matches!(self, ModelKind::LinearDispersion | ModelKind::SimplifiedSw)
    }

    /// `ω²/k²` of the linearisation about still water.
    pub fn linear_factor<T: Real>(self, k: T, eps: T) -> T {
        if self.is_dispersive() {
            dispersion_factor(k, eps, self.is_regularized())
        } else {
            T::one()
        }
    }

    /// Terms of the averaged system that correspond to this model.
    pub fn averaged_terms(self) -> AveragedTerms {
        AveragedTerms {
            dispersion: self.is_dispersive(),
            nonlinear: self.is_nonlinear(),
            coupling: true,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Precondition(format!("unknown model kind `{s}`")))
    }
}

/// Surface `Z` and velocity `U` at fast time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectState<T> {
    pub z: Field<T>,
    pub u: Field<T>,
    pub t: T,
    pub epsilon: T,
}

impl<T: Real> DirectState<T> {
    pub fn new(z: Field<T>, u: Field<T>, t: T, epsilon: T) -> Result<Self> {
        z.check_grid(&u)?;
        if !(t.is_finite() && t >= T::zero()) {
            return Err(Error::Precondition(format!("time must be finite and non-negative, got {t}")));
        }
        if !(epsilon.is_finite() && epsilon >= T::zero()) {
            return Err(Error::Precondition(format!("ε must be finite and non-negative, got {epsilon}")));
        }
        Ok(Self { z, u, t, epsilon })
    }

    pub fn grid(&self) -> &PeriodicGrid<T> {
        self.z.grid()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectParams<T> {
    pub dt: T,
    pub c0: T,
    pub blowup_limit: T,
    /// Retry once with `dt/2` when a well-posed model blows up.
    pub retry: bool,
}

impl<T: Real> DirectParams<T> {
    pub fn new(dt: T) -> Self {
        Self {
            dt,
            c0: T::lit(DEFAULT_C0),
            blowup_limit: T::lit(BLOWUP_LIMIT),
            retry: true,
        }
    }

    pub fn without_retry(mut self) -> Self {
        self.retry = false;
        self
    }
}

type Spec<T> = Vec<Complex<T>>;

/// Per-mode propagator `exp(Lτ) = c·I + d·L`.
#[derive(Clone)]
struct Propagator<T> {
    c: Vec<T>,
    d: Vec<T>,
}

/// Integrating-factor RK4 for one model, grid, ε and bottom.
pub struct DirectSolver<T: Real> {
    kind: ModelKind,
    grid: PeriodicGrid<T>,
    eps: T,
    dt: T,
    fourier: Fourier<T>,
    /// Angular wavenumber per FFT index (zero at Nyquist).
    k: Vec<T>,
    /// `A(k)` of the linear operator.
    a: Vec<T>,
    keep: Vec<bool>,
    h: Vec<T>,
    /// `H·H_x` on the nodes.
    hhx: Vec<T>,
    /// `H³ - 1` on the nodes.
    g: Vec<T>,
    full: Propagator<T>,
    half: Propagator<T>,
}

impl<T: Real> DirectSolver<T> {
    pub fn new(kind: ModelKind, h_profile: &Field<T>, eps: T, dt: T) -> Result<Self> {
        if !(eps > T::zero() && eps.is_finite()) {
            return Err(Error::Precondition(format!("ε must be positive, got {eps}")));
        }
        if !(dt > T::zero() && dt.is_finite()) {
            return Err(Error::Precondition(format!("dt must be positive, got {dt}")));
        }
        let grid = *h_profile.grid();
        let m = grid.num_points();
        let fourier = Fourier::new(m);
        let base = grid.base_wavenumber();
        let cut = (m / 3) as i64;
        let mut k = Vec::with_capacity(m);
        let mut keep = Vec::with_capacity(m);
        for i in 0..m {
            let n = fourier.wavenumber(i);
            keep.push(n.abs() <= cut);
            k.push(if 2 * i == m { T::zero() } else { T::from_i64(n).expect("wavenumber") * base });
        }
        let a: Vec<T> = k.iter().map(|&kk| kind.linear_factor(kk, eps)).collect();
        let mut solver = Self {
            kind,
            grid,
            eps,
            dt,
            fourier,
            k,
            a,
            keep,
            h: Vec::new(),
            hhx: Vec::new(),
            g: Vec::new(),
            full: Propagator { c: Vec::new(), d: Vec::new() },
            half: Propagator { c: Vec::new(), d: Vec::new() },
        };
        let h_hat = solver.clean(solver.fourier.forward_real(h_profile.values()));
        let hx = solver.to_phys(&solver.deriv(&h_hat, 1));
        solver.h = solver.to_phys(&h_hat);
        solver.hhx = solver.h.iter().zip(&hx).map(|(&h, &hx)| (T::one() + eps * h) * eps * hx).collect();
        solver.g = solver.h.iter().map(|&h| (T::one() + eps * h).powi(3) - T::one()).collect();
        solver.full = solver.propagator(dt);
        solver.half = solver.propagator(dt * T::lit(0.5));
        Ok(solver)
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    fn propagator(&self, t: T) -> Propagator<T> {
        let (c, d) = self
            .k
            .iter()
            .zip(&self.a)
            .map(|(&k, &a)| {
                let s = -k * k * a;
                if s < T::zero() {
                    let w = (-s).sqrt();
                    ((w * t).cos(), (w * t).sin() / w)
                } else if s > T::zero() {
                    let g = s.sqrt();
                    ((g * t).cosh(), (g * t).sinh() / g)
                } else {
                    (T::one(), t)
                }
            })
            .unzip();
        Propagator { c, d }
    }

    fn propagate(&self, p: &Propagator<T>, z: &[Complex<T>], u: &[Complex<T>]) -> (Spec<T>, Spec<T>) {
        let mut zo = Vec::with_capacity(z.len());
        let mut uo = Vec::with_capacity(z.len());
        for i in 0..z.len() {
            let ik = Complex::new(T::zero(), self.k[i]);
            zo.push(z[i] * p.c[i] - ik * u[i] * (p.d[i] * self.a[i]));
            uo.push(u[i] * p.c[i] - ik * z[i] * p.d[i]);
        }
        (zo, uo)
    }

    /// Drops modes outside the 2/3 band and round-off-level amplitudes, so
    /// that unstable modes are not seeded by noise.
    fn clean(&self, mut hat: Spec<T>) -> Spec<T> {
        let floor = T::lit(AMPLITUDE_CUTOFF) * T::of_usize(self.grid.num_points());
        for (c, &keep) in hat.iter_mut().zip(&self.keep) {
            if !keep || c.norm() <= floor {
                *c = Complex::new(T::zero(), T::zero());
            }
        }
        hat
    }

    fn dealias(&self, mut hat: Spec<T>) -> Spec<T> {
        for (c, &keep) in hat.iter_mut().zip(&self.keep) {
            if !keep {
                *c = Complex::new(T::zero(), T::zero());
            }
        }
        hat
    }

    fn to_phys(&self, hat: &[Complex<T>]) -> Vec<T> {
        self.fourier.inverse_real(hat.to_vec())
    }

    fn deriv(&self, hat: &[Complex<T>], order: u32) -> Spec<T> {
        hat.iter()
            .zip(&self.k)
            .map(|(&c, &k)| c * Complex::new(T::zero(), k).powu(order))
            .collect()
    }

    /// Dealiased transform of a pointwise product.
    fn product(&self, a: &[T], b: &[T]) -> Spec<T> {
        let p: Vec<T> = a.iter().zip(b).map(|(&x, &y)| x * y).collect();
        self.dealias(self.fourier.forward_real(&p))
    }

    /// Non-stiff part of the right-hand side in spectral space.
    fn nonlinear(&self, zh: &[Complex<T>], uh: &[Complex<T>]) -> (Spec<T>, Spec<T>) {
        let eps = self.eps;
        let zero = Complex::new(T::zero(), T::zero());
        let m = zh.len();
        let u = self.to_phys(uh);
        let hu = self.product(&self.h, &u);
        // -ε(hU)_x
        let mut nz: Spec<T> = self.deriv(&hu, 1).into_iter().map(|c| c * (-eps)).collect();
        let mut nu: Spec<T> = vec![zero; m];
        if self.kind.is_nonlinear() {
            let z = self.to_phys(zh);
            let zu = self.deriv(&self.product(&z, &u), 1);
            let uu = self.deriv(&self.product(&u, &u), 1);
            for i in 0..m {
                nz[i] -= zu[i] * eps;
                nu[i] -= uu[i] * (eps * T::lit(0.5));
            }
        }
        if self.kind == ModelKind::FullSwRegularized {
            // ε[(1/6)((H³-1)U_xx)_x - (ε/2)(hU)_xxx - HH_x(HU)_xx]
            let uxx = self.to_phys(&self.deriv(uh, 2));
            let t1 = self.deriv(&self.product(&self.g, &uxx), 1);
            let t2 = self.deriv(&hu, 3);
            let hu_full: Spec<T> = uh.iter().zip(&hu).map(|(&a, &b)| a + b * eps).collect();
            let huxx = self.to_phys(&self.deriv(&hu_full, 2));
            let t3 = self.product(&self.hhx, &huxx);
            let sixth = T::one() / T::lit(6.0);
            for i in 0..m {
                nz[i] += (t1[i] * sixth - t2[i] * (eps * T::lit(0.5)) - t3[i]) * eps;
            }
        }
        (nz, nu)
    }

    /// Full right-hand side `(Z_t, U_t)` evaluated pseudo-spectrally.
    pub fn rhs(&self, z: &Field<T>, u: &Field<T>) -> Result<(Field<T>, Field<T>)> {
        if !z.grid().same_as(&self.grid) {
            return Err(Error::GridMismatch);
        }
        z.check_grid(u)?;
        let zh = self.dealias(self.fourier.forward_real(z.values()));
        let uh = self.dealias(self.fourier.forward_real(u.values()));
        let (mut nz, mut nu) = self.nonlinear(&zh, &uh);
        for i in 0..zh.len() {
            let ik = Complex::new(T::zero(), self.k[i]);
            nz[i] -= ik * uh[i] * self.a[i];
            nu[i] -= ik * zh[i];
        }
        Ok((Field::new(self.grid, self.to_phys(&nz))?, Field::new(self.grid, self.to_phys(&nu))?))
    }

    /// One Lawson RK4 step on spectral data.
    fn step_spectral(&self, zh: &[Complex<T>], uh: &[Complex<T>]) -> (Spec<T>, Spec<T>) {
        let dt = self.dt;
        let half = dt * T::lit(0.5);
        let axpy = |x: &[Complex<T>], y: &[Complex<T>], s: T| -> Spec<T> { x.iter().zip(y).map(|(&a, &b)| a + b * s).collect() };

        let (az, au) = self.nonlinear(zh, uh);
        let (z2, u2) = self.propagate(&self.half, &axpy(zh, &az, half), &axpy(uh, &au, half));
        let (bz, bu) = self.nonlinear(&z2, &u2);
        let (ez, eu) = self.propagate(&self.half, zh, uh);
        let (z3, u3) = (axpy(&ez, &bz, half), axpy(&eu, &bu, half));
        let (cz, cu) = self.nonlinear(&z3, &u3);
        let (ecz, ecu) = self.propagate(&self.half, &cz, &cu);
        let (efz, efu) = self.propagate(&self.full, zh, uh);
        let (z4, u4) = (axpy(&efz, &ecz, dt), axpy(&efu, &ecu, dt));
        let (dz, du) = self.nonlinear(&z4, &u4);

        // E·u + dt/6 (E·a + 2 E½·(b + c) + d)
        let (eaz, eau) = self.propagate(&self.full, &az, &au);
        let bcz: Spec<T> = bz.iter().zip(&cz).map(|(&x, &y)| x + y).collect();
        let bcu: Spec<T> = bu.iter().zip(&cu).map(|(&x, &y)| x + y).collect();
        let (ebz, ebu) = self.propagate(&self.half, &bcz, &bcu);
        let sixth = dt / T::lit(6.0);
        let two = T::lit(2.0);
        let zn = (0..zh.len()).map(|i| efz[i] + (eaz[i] + ebz[i] * two + dz[i]) * sixth).collect();
        let un = (0..zh.len()).map(|i| efu[i] + (eau[i] + ebu[i] * two + du[i]) * sixth).collect();
        (zn, un)
    }

    fn dominant_mode(&self, zh: &[Complex<T>], uh: &[Complex<T>]) -> i64 {
        let mut best = (0i64, T::neg_infinity());
        for i in 1..zh.len() {
            let e = zh[i].norm_sqr() + uh[i].norm_sqr();
            if e > best.1 || (e.is_nan() && best.1.is_finite()) {
                best = (self.fourier.wavenumber(i).abs(), if e.is_nan() { T::infinity() } else { e });
            }
        }
        best.0
    }

    /// Integrates `initial` over `n_steps` steps, keeping the states whose
    /// step indices are listed (sorted ascending) in `keep_at`.
    fn integrate(&self, initial: &DirectState<T>, n_steps: usize, keep_at: &[usize], limit: T) -> Result<Vec<DirectState<T>>> {
        let mut zh = self.clean(self.fourier.forward_real(initial.z.values()));
        let mut uh = self.clean(self.fourier.forward_real(initial.u.values()));
        let mut out = Vec::with_capacity(keep_at.len());
        let mut next = keep_at.iter().peekable();
        for n in 0..=n_steps {
            if n > 0 {
                let (a, b) = self.step_spectral(&zh, &uh);
                zh = a;
                uh = b;
            }
            let t = initial.t + self.dt * T::of_usize(n);
            let z = self.to_phys(&zh);
            let u = self.to_phys(&uh);
            let sup = z.iter().chain(&u).fold(T::zero(), |m, &v| if v.is_nan() { T::infinity() } else { m.max(v.abs()) });
            if !(sup <= limit) {
                return Err(Error::BlowUp {
                    time: t.to_f64_lossy(),
                    sup_norm: sup.to_f64_lossy(),
                    mode: self.dominant_mode(&zh, &uh),
                });
            }
            while next.peek().is_some_and(|&&k| k == n) {
                next.next();
                // the initial snapshot is the caller's data, not its filtered form
                out.push(if n == 0 {
                    DirectState { epsilon: self.eps, ..initial.clone() }
                } else {
                    DirectState {
                        z: Field::from_raw(self.grid, z.clone()),
                        u: Field::from_raw(self.grid, u.clone()),
                        t,
                        epsilon: self.eps,
                    }
                });
            }
        }
        Ok(out)
    }
}

/// Snapshots of a direct run, in increasing time.
#[derive(Debug, Clone)]
pub struct DirectRun<T> {
    pub kind: ModelKind,
    pub snapshots: Vec<DirectState<T>>,
    /// Step actually used (after the `t_end/n` adjustment and any retry).
    pub dt: T,
    pub retried: bool,
}

impl<T: Real> DirectRun<T> {
    pub fn final_state(&self) -> &DirectState<T> {
        self.snapshots.last().expect("a run always has its initial snapshot")
    }

    /// Snapshot closest to `t`.
    pub fn snapshot_near(&self, t: T) -> &DirectState<T> {
        self.snapshots
            .iter()
            .min_by(|a, b| (a.t - t).abs().partial_cmp(&(b.t - t).abs()).expect("finite times"))
            .expect("non-empty run")
    }
}

/// Integrates `kind` from `initial` to `t_end` over the bottom `h_profile`.
///
/// Snapshots are returned at `t = initial.t`, at each requested time
/// (rounded to the step grid) and at `t_end`.
pub fn solve_direct<T: Real>(
    kind: ModelKind,
    initial: &DirectState<T>,
    h_profile: &Field<T>,
    t_end: T,
    params: &DirectParams<T>,
    snapshot_times: &[T],
) -> Result<DirectRun<T>> {
    if !initial.grid().same_as(h_profile.grid()) {
        return Err(Error::GridMismatch);
    }
    let eps = initial.epsilon;
    if !(eps > T::zero()) {
        return Err(Error::Precondition("direct runs need ε > 0".into()));
    }
    if !(t_end >= initial.t && t_end.is_finite()) {
        return Err(Error::Precondition(format!("t_end = {t_end} precedes the initial time {}", initial.t)));
    }
    if t_end > params.c0 / eps * (T::one() + T::lit(1e-12)) {
        return Err(Error::Precondition(format!(
            "t_end = {t_end} exceeds the validity window c0/ε = {}",
            params.c0 / eps
        )));
    }
    let span = t_end - initial.t;
    for &t in snapshot_times {
        if !(t >= initial.t && t <= t_end * (T::one() + T::lit(1e-12))) {
            return Err(Error::OutOfRange(format!("snapshot time {t} outside [{}, {t_end}]", initial.t)));
        }
    }

    let attempt = |dt: T| -> Result<(Vec<DirectState<T>>, T)> {
        let n = (span / dt - T::lit(1e-9)).ceil().to_usize().unwrap_or(0).max(1);
        let dt_eff = if span > T::zero() { span / T::of_usize(n) } else { dt };
        let n = if span > T::zero() { n } else { 0 };
        let mut keep: Vec<usize> = snapshot_times
            .iter()
            .map(|&t| ((t - initial.t) / dt_eff).round().to_usize().unwrap_or(0).min(n))
            .chain([0, n])
            .collect();
        keep.sort_unstable();
        keep.dedup();
        let solver = DirectSolver::new(kind, h_profile, eps, dt_eff)?;
        Ok((solver.integrate(initial, n, &keep, params.blowup_limit)?, dt_eff))
    };

    match attempt(params.dt) {
        Ok((snapshots, dt)) => Ok(DirectRun { kind, snapshots, dt, retried: false }),
        Err(Error::BlowUp { time, sup_norm, mode }) if params.retry && kind.is_well_posed() => {
            log::warn!("{kind} blew up at t = {time} (|.| = {sup_norm:e}, mode {mode}); retrying with dt/2");
            let (snapshots, dt) = attempt(params.dt * T::lit(0.5))?;
            Ok(DirectRun { kind, snapshots, dt, retried: true })
        }
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests;
