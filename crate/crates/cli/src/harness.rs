//! Experiment drivers behind the CLI subcommands.

use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use anyhow::{bail, ensure, Context, Result};
use hyperavg_core::averaged::{self, AveragedRun, SchemeParams};
use hyperavg_core::direct::{self, DirectParams, DirectRun, DirectState, DispersionPoint};
use hyperavg_core::field::{l2_norm, sup_norm, Field, FieldPair};
use hyperavg_core::grid::PeriodicGrid;
use hyperavg_core::resonance::{check_shallow_water_resonance, ResonanceVerdict, Witness};
use hyperavg_core::spectrum::inverse_fourier;
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::output::{num, write_csv};

/// Asymptotic-vs-direct discrepancy at one ε.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub epsilon: f64,
    pub t: f64,
    pub sup_error_z: f64,
    pub sup_error_u: f64,
    pub l2_error_z: f64,
    pub l2_error_u: f64,
    pub m_direct: usize,
    pub m_averaged: usize,
    pub dt_direct: f64,
    pub runtime_direct: f64,
    /// Wall time of the shared averaged run (same for every row of a sweep).
    pub runtime_averaged: f64,
}

impl ErrorReport {
    /// Sup-norm of the state error, `max(|ΔZ|, |ΔU|)`.
    pub fn sup_error(&self) -> f64 {
        self.sup_error_z.max(self.sup_error_u)
    }
}

/// Direct and reconstructed fields at the comparison time.
#[derive(Debug, Clone)]
pub struct ComparisonFields {
    pub epsilon: f64,
    pub z_direct: Field<f64>,
    pub u_direct: Field<f64>,
    pub z_asym: Field<f64>,
    pub u_asym: Field<f64>,
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub reports: Vec<ErrorReport>,
    pub fields: Vec<ComparisonFields>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub m: usize,
    pub dt: f64,
    /// Sup difference to the next finer level on this level's nodes.
    pub diff_to_next: Option<f64>,
    /// `log2(diff_l / diff_{l+1})`; `None` when the differences vanish.
    pub order: Option<f64>,
}

/// Differences below this are treated as exact agreement.
const NEGLIGIBLE_DIFF: f64 = 1e-13;

/// Counts solver invocations so callers can check that the averaged system
/// is integrated once per sweep.
#[derive(Debug, Default)]
pub struct Harness {
    averaged_runs: AtomicUsize,
    direct_runs: AtomicUsize,
}

impl Harness {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn averaged_invocations(&self) -> usize {
        self.averaged_runs.load(Ordering::SeqCst)
    }

    pub fn direct_invocations(&self) -> usize {
        self.direct_runs.load(Ordering::SeqCst)
    }

    fn averaged(&self, initial: &FieldPair<f64>, h: &Field<f64>, params: &SchemeParams<f64>, taus: &[f64]) -> Result<AveragedRun<f64>> {
        self.averaged_runs.fetch_add(1, Ordering::SeqCst);
        Ok(averaged::run(initial, h, params, taus)?)
    }

    fn direct(&self, cfg: &RunConfig, eps: f64, t_end: f64, snapshots: &[f64]) -> Result<DirectRun<f64>> {
        self.direct_runs.fetch_add(1, Ordering::SeqCst);
        let (initial, h) = direct_initial(cfg, eps)?;
        direct::solve_direct(cfg.model, &initial, &h, t_end, &DirectParams::new(cfg.dt_direct), snapshots)
            .with_context(|| format!("{} direct run at ε = {eps}", cfg.model))
    }

    /// Resonance verdict for the configured bottom and both Riemann profiles.
    pub fn resonance(&self, cfg: &RunConfig) -> ResonanceVerdict<f64> {
        let init = &cfg.initial;
        let mut verdict = check_shallow_water_resonance(&init.h, &init.z0.add(&init.u0));
        let other = check_shallow_water_resonance(&init.h, &init.z0.sub(&init.u0));
        for w in other.witnesses {
            if !verdict.witnesses.contains(&w) {
                verdict.witnesses.push(w);
            }
        }
        verdict.resonant = !verdict.witnesses.is_empty();
        verdict
    }

    pub fn dispersion(&self, cfg: &RunConfig) -> Result<Vec<DispersionPoint<f64>>> {
        Ok(direct::dispersion_table(cfg.epsilon, cfg.k_max, cfg.regularized)?)
    }

    pub fn solve_averaged(&self, cfg: &RunConfig) -> Result<AveragedRun<f64>> {
        let (initial, h) = averaged_initial(cfg, cfg.m_averaged)?;
        let params = SchemeParams::new(cfg.dt_averaged)
            .with_tau_end(cfg.averaged_tau_end)
            .with_terms(cfg.model.averaged_terms());
        self.averaged(&initial, &h, &params, &cfg.averaged_snapshots)
    }

    pub fn solve_direct(&self, cfg: &RunConfig) -> Result<DirectRun<f64>> {
        self.direct(cfg, cfg.epsilon, cfg.t_end.resolve(cfg.epsilon), &cfg.direct_snapshots)
    }

    /// One averaged run to the largest `ε·t_end` of the sweep, reused to
    /// reconstruct the asymptotic solution for every ε; direct runs in
    /// parallel.
    pub fn compare(&self, cfg: &RunConfig) -> Result<Comparison> {
        let targets: Vec<(f64, f64)> = cfg.epsilons.iter().map(|&e| (e, cfg.t_end.resolve(e))).collect();
        let taus: Vec<f64> = targets.iter().map(|&(e, t)| e * t).collect();
        let tau_end = taus.iter().copied().fold(0.0, f64::max);

        let (initial, h) = averaged_initial(cfg, cfg.m_averaged)?;
        let params = SchemeParams::new(cfg.dt_averaged)
            .with_tau_end(tau_end)
            .with_terms(cfg.model.averaged_terms());
        let clock = Instant::now();
        let avg = self.averaged(&initial, &h, &params, &taus).context("averaged run")?;
        let runtime_averaged = clock.elapsed().as_secs_f64();

        let results: Vec<Result<(ErrorReport, ComparisonFields)>> = targets
            .par_iter()
            .map(|&(eps, t_end)| {
                let clock = Instant::now();
                let run = self.direct(cfg, eps, t_end, &[])?;
                let runtime_direct = clock.elapsed().as_secs_f64();
                let end = run.final_state();
                let (z_asym, u_asym) = if end.t == 0.0 {
                    // nothing to reconstruct: both sides are the initial data
                    (end.z.clone(), end.u.clone())
                } else {
                    direct::evaluate_asymptotic(&avg, eps, end.t, end.grid())?
                };
                let report = ErrorReport {
                    epsilon: eps,
                    t: end.t,
                    sup_error_z: sup_norm(&end.z, &z_asym)?,
                    sup_error_u: sup_norm(&end.u, &u_asym)?,
                    l2_error_z: l2_norm(&end.z, &z_asym)?,
                    l2_error_u: l2_norm(&end.u, &u_asym)?,
                    m_direct: cfg.m,
                    m_averaged: cfg.m_averaged,
                    dt_direct: run.dt,
                    runtime_direct,
                    runtime_averaged,
                };
                let fields = ComparisonFields {
                    epsilon: eps,
                    z_direct: end.z.clone(),
                    u_direct: end.u.clone(),
                    z_asym,
                    u_asym,
                };
                Ok((report, fields))
            })
            .collect();
        let mut out = Comparison {
            reports: Vec::new(),
            fields: Vec::new(),
        };
        for r in results {
            let (rep, f) = r?;
            out.reports.push(rep);
            out.fields.push(f);
        }
        Ok(out)
    }

    /// Successive-refinement study of the averaged scheme: `M` doubles and
    /// `dt` halves from level to level.
    pub fn convergence(&self, cfg: &RunConfig) -> Result<Vec<ConvergenceRow>> {
        let levels = &cfg.levels;
        ensure!(levels.len() >= 3, "convergence needs at least 3 refinement levels, got {}", levels.len());
        for w in levels.windows(2) {
            ensure!(w[1] == 2 * w[0], "levels must double (got {} then {})", w[0], w[1]);
        }
        let dts: Vec<f64> = (0..levels.len()).map(|i| cfg.convergence_dt / f64::powi(2.0, i as i32)).collect();
        let finals: Vec<Result<FieldPair<f64>>> = levels
            .par_iter()
            .zip(&dts)
            .map(|(&m, &dt)| {
                let (initial, h) = averaged_initial(cfg, m)?;
                let params = SchemeParams::new(dt)
                    .with_tau_end(cfg.convergence_tau_end)
                    .with_terms(cfg.model.averaged_terms());
                let run = self.averaged(&initial, &h, &params, &[])?;
                Ok(run.states.last().expect("initial state").clone())
            })
            .collect();
        let finals = finals.into_iter().collect::<Result<Vec<_>>>()?;

        let diffs: Vec<f64> = finals
            .windows(2)
            .map(|w| {
                let restrict = |f: &Field<f64>| f.values().iter().step_by(2).copied().collect::<Vec<_>>();
                let dv = diff_sup(w[0].vplus.values(), &restrict(&w[1].vplus));
                let dw = diff_sup(w[0].vminus.values(), &restrict(&w[1].vminus));
                dv.max(dw)
            })
            .collect();
        Ok(levels
            .iter()
            .enumerate()
            .map(|(i, &m)| {
                let diff = diffs.get(i).copied();
                let order = match (diff, diffs.get(i + 1)) {
                    (Some(a), Some(&b)) if a > NEGLIGIBLE_DIFF && b > NEGLIGIBLE_DIFF => Some((a / b).log2()),
                    _ => None,
                };
                ConvergenceRow { m, dt: dts[i], diff_to_next: diff, order }
            })
            .collect())
    }
}

fn diff_sup(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn two_pi_grid(m: usize) -> Result<PeriodicGrid<f64>> {
    Ok(PeriodicGrid::two_pi(m)?)
}

/// `(Z0, U0)` and `h` sampled on an `m`-point grid.
fn sampled(cfg: &RunConfig, m: usize) -> Result<(Field<f64>, Field<f64>, Field<f64>)> {
    let g = two_pi_grid(m)?;
    let init = &cfg.initial;
    Ok((inverse_fourier(&init.z0, &g)?, inverse_fourier(&init.u0, &g)?, inverse_fourier(&init.h, &g)?))
}

fn direct_initial(cfg: &RunConfig, eps: f64) -> Result<(DirectState<f64>, Field<f64>)> {
    let (z, u, h) = sampled(cfg, cfg.m)?;
    Ok((DirectState::new(z, u, 0.0, eps)?, h))
}

fn averaged_initial(cfg: &RunConfig, m: usize) -> Result<(FieldPair<f64>, Field<f64>)> {
    let (z, u, h) = sampled(cfg, m)?;
    let state = DirectState::new(z, u, 0.0, cfg.epsilon)?;
    Ok((direct::riemann_split(&state)?, h))
}

pub fn describe_witness(w: &Witness<f64>) -> String {
    match w {
        Witness::BottomPair { mu, nu } => format!("bottom mode μ = {mu} pairs with surface mode ν = {nu} (μ = ±2ν)"),
        Witness::MultiIndex { lt, lx, l } => format!("multi-index l^t = {lt}, l^x = {lx}, l = {l:?}"),
        Witness::Frequencies { nu_t, nu_x, nu } => format!("frequencies ν^t = {nu_t}, ν^x = {nu_x}, ν = {nu:?}"),
    }
}

// ---- file writers -------------------------------------------------------

pub fn write_dispersion(dir: &Path, rows: &[DispersionPoint<f64>]) -> Result<()> {
    write_csv(
        &dir.join("dispersion.csv"),
        &["k", "omega_squared", "stable", "growth_rate"],
        rows.iter().map(|p| vec![p.k.to_string(), num(p.omega_squared), p.stable.to_string(), num(p.growth_rate)]),
    )
}

pub fn write_averaged(dir: &Path, run: &AveragedRun<f64>) -> Result<()> {
    let rows = run.states.iter().flat_map(|s| {
        let g = *s.vplus.grid();
        (0..g.num_points()).map(move |j| vec![num(s.tau), num(g.node(j)), num(s.vplus.values()[j]), num(s.vminus.values()[j])])
    });
    write_csv(&dir.join("averaged.csv"), &["tau", "y", "V_plus", "V_minus"], rows)
}

pub fn write_direct(dir: &Path, run: &DirectRun<f64>) -> Result<()> {
    let rows = run.snapshots.iter().flat_map(|s| {
        let g = *s.grid();
        (0..g.num_points()).map(move |j| vec![num(s.t), num(g.node(j)), num(s.z.values()[j]), num(s.u.values()[j])])
    });
    write_csv(&dir.join("direct.csv"), &["t", "x", "Z", "U"], rows)
}

pub fn compare_file_name(eps: f64) -> String {
    format!("compare_eps_{eps}.csv")
}

pub fn write_comparison_fields(dir: &Path, fields: &[ComparisonFields]) -> Result<()> {
    for f in fields {
        let g = *f.z_direct.grid();
        let rows = (0..g.num_points()).map(|j| {
            vec![
                num(g.node(j)),
                num(f.z_direct.values()[j]),
                num(f.u_direct.values()[j]),
                num(f.z_asym.values()[j]),
                num(f.u_asym.values()[j]),
            ]
        });
        write_csv(&dir.join(compare_file_name(f.epsilon)), &["x", "Z_direct", "U_direct", "Z_asym", "U_asym"], rows)?;
    }
    Ok(())
}

/// Run-time columns are deliberately left out so summaries are reproducible.
pub fn write_summary(dir: &Path, reports: &[ErrorReport]) -> Result<()> {
    write_csv(
        &dir.join("summary.csv"),
        &[
            "epsilon",
            "t",
            "sup_error_Z",
            "sup_error_U",
            "l2_error_Z",
            "l2_error_U",
            "sup_error",
            "M_direct",
            "M_averaged",
            "dt_direct",
        ],
        reports.iter().map(|r| {
            vec![
                num(r.epsilon),
                num(r.t),
                num(r.sup_error_z),
                num(r.sup_error_u),
                num(r.l2_error_z),
                num(r.l2_error_u),
                num(r.sup_error()),
                r.m_direct.to_string(),
                r.m_averaged.to_string(),
                num(r.dt_direct),
            ]
        }),
    )
}

pub fn write_convergence(dir: &Path, rows: &[ConvergenceRow]) -> Result<()> {
    let opt = |x: Option<f64>| x.map_or_else(|| "n/a".to_string(), num);
    write_csv(
        &dir.join("convergence.csv"),
        &["M", "dt", "diff_to_next", "observed_order"],
        rows.iter().map(|r| vec![r.m.to_string(), num(r.dt), opt(r.diff_to_next), opt(r.order)]),
    )
}

/// Fails unless the sweep's state errors strictly decrease as ε decreases.
pub fn check_monotone(reports: &[ErrorReport]) -> Result<()> {
    let mut sorted: Vec<&ErrorReport> = reports.iter().collect();
    sorted.sort_by(|a, b| b.epsilon.total_cmp(&a.epsilon));
    for w in sorted.windows(2) {
        if !(w[1].sup_error() < w[0].sup_error()) {
            bail!(
                "error did not decrease from ε = {} ({:.4e}) to ε = {} ({:.4e})",
                w[0].epsilon,
                w[0].sup_error(),
                w[1].epsilon,
                w[1].sup_error()
            );
        }
    }
    Ok(())
}
