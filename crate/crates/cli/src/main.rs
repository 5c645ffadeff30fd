use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use hyperavg_cli::harness::{self, Harness};
use hyperavg_cli::RunConfig;

/// Internal averaging for weakly nonlinear shallow-water waves.
///
/// Exit status: 0 on success (and for a non-resonant verdict), 1 on error,
/// 2 when `resonance` finds a resonance.
#[derive(Parser)]
#[command(name = "hyperavg", version, about, long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the bottom/surface resonance condition
    Resonance(Common),
    /// Tabulate the linear dispersion relation
    Dispersion(Common),
    /// Integrate the averaged system
    SolveAveraged(Common),
    /// Integrate the original system directly
    SolveDirect(Common),
    /// Compare asymptotic and direct solutions over an ε sweep
    Compare(Common),
    /// Observed order of the averaged scheme under refinement
    Convergence(Common),
}

#[derive(Args)]
struct Common {
    /// Experiment configuration file
    #[arg(long)]
    config: PathBuf,
    /// Directory for CSV output
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn prepare(args: &Common) -> Result<RunConfig> {
    let cfg = RunConfig::from_file(&args.config)?;
    if cfg.outputs.csv || cfg.outputs.summary {
        std::fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    }
    Ok(cfg)
}

fn wrote(path: &Path) {
    log::info!("wrote {}", path.display());
}

fn run(cli: Cli) -> Result<u8> {
    let h = Harness::new();
    match cli.command {
        Command::Resonance(args) => {
            let cfg = RunConfig::from_file(&args.config)?;
            let verdict = h.resonance(&cfg);
            if verdict.resonant {
                println!("resonant ({} witness(es))", verdict.witnesses.len());
                for w in &verdict.witnesses {
                    println!("  {}", harness::describe_witness(w));
                }
                return Ok(2);
            }
            println!("non-resonant: the averaged equations decouple into two KdV equations");
        }
        Command::Dispersion(args) => {
            let cfg = prepare(&args)?;
            let rows = h.dispersion(&cfg)?;
            if cfg.outputs.csv {
                harness::write_dispersion(&args.out, &rows)?;
                wrote(&args.out.join("dispersion.csv"));
            }
            if cfg.outputs.summary {
                let unstable = rows.iter().find(|p| !p.stable).map(|p| p.k);
                match unstable {
                    Some(k) => println!("ε = {}: first unstable mode k = {k}", cfg.epsilon),
                    None => println!("ε = {}: all {} modes stable", cfg.epsilon, rows.len()),
                }
            }
        }
        Command::SolveAveraged(args) => {
            let cfg = prepare(&args)?;
            let run = h.solve_averaged(&cfg)?;
            if cfg.outputs.csv {
                harness::write_averaged(&args.out, &run)?;
                wrote(&args.out.join("averaged.csv"));
            }
            if cfg.outputs.summary {
                let max_it = run.diagnostics.iter().map(|d| d.iterations).max().unwrap_or(0);
                println!(
                    "averaged {}: τ = {}, {} steps, ≤ {max_it} fixed-point iterations/step, mass drift {:.3e}",
                    cfg.model,
                    run.tau_end(),
                    run.diagnostics.len(),
                    hyperavg_core::averaged::mass_drift(&run.states[0], &run)
                );
            }
        }
        Command::SolveDirect(args) => {
            let cfg = prepare(&args)?;
            let run = h.solve_direct(&cfg)?;
            if cfg.outputs.csv {
                harness::write_direct(&args.out, &run)?;
                wrote(&args.out.join("direct.csv"));
            }
            if cfg.outputs.summary {
                let end = run.final_state();
                println!(
                    "direct {} at ε = {}: t = {}, dt = {}{}, sup|Z| = {:.6}, sup|U| = {:.6}",
                    cfg.model,
                    cfg.epsilon,
                    end.t,
                    run.dt,
                    if run.retried { " (after retry)" } else { "" },
                    end.z.max_abs(),
                    end.u.max_abs()
                );
            }
        }
        Command::Compare(args) => {
            let cfg = prepare(&args)?;
            let cmp = h.compare(&cfg)?;
            if cfg.outputs.csv {
                harness::write_comparison_fields(&args.out, &cmp.fields)?;
            }
            if cfg.outputs.summary {
                harness::write_summary(&args.out, &cmp.reports)?;
                println!("{} with preset {}; averaged system integrated once", cfg.model, cfg.initial.label);
                println!("{:>8} {:>10} {:>12} {:>12} {:>12} {:>12} {:>9}", "eps", "t", "sup dZ", "sup dU", "l2 dZ", "l2 dU", "direct s");
                for r in &cmp.reports {
                    println!(
                        "{:>8} {:>10.3} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>9.2}",
                        r.epsilon, r.t, r.sup_error_z, r.sup_error_u, r.l2_error_z, r.l2_error_u, r.runtime_direct
                    );
                }
                if let Some(r) = cmp.reports.first() {
                    println!("averaged run: {:.2} s", r.runtime_averaged);
                }
                if cmp.reports.len() > 1 {
                    match harness::check_monotone(&cmp.reports) {
                        Ok(()) => println!("sup error decreases monotonically with ε"),
                        Err(e) => println!("note: {e}"),
                    }
                }
            }
        }
        Command::Convergence(args) => {
            let cfg = prepare(&args)?;
            let rows = h.convergence(&cfg)?;
            if cfg.outputs.csv {
                harness::write_convergence(&args.out, &rows)?;
                wrote(&args.out.join("convergence.csv"));
            }
            if cfg.outputs.summary {
                println!("{:>6} {:>10} {:>14} {:>8}", "M", "dt", "diff to next", "order");
                for r in &rows {
                    let diff = r.diff_to_next.map_or("-".into(), |d| format!("{d:.4e}"));
                    let order = r.order.map_or("n/a".into(), |p| format!("{p:.3}"));
                    println!("{:>6} {:>10.3e} {:>14} {:>8}", r.m, r.dt, diff, order);
                }
            }
        }
    }
    Ok(0)
}
