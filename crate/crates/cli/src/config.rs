//! Experiment configuration: flat `key = value` lines grouped under
//! `[section]` headers, `#` comments.
//!
//! ```text
//! [run]
//! model = full_sw_regularized
//! epsilon = 0.01
//! M = 256
//! t_end = one_over_eps
//!
//! [initial]
//! Z0 = cos:1, sin:2
//! h = 5*sin:2
//! ```

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, ensure, Context, Result};
use hyperavg_core::direct::ModelKind;
use hyperavg_core::spectrum::{Spectrum, TrigTerm};

const KNOWN: &[(&str, &[&str])] = &[
    (
        "run",
        &["model", "epsilon", "epsilons", "M", "M_averaged", "dt_direct", "dt_averaged", "t_end", "outputs"],
    ),
    ("initial", &["preset", "Z0", "U0", "h"]),
    ("averaged", &["tau_end", "snapshots"]),
    ("direct", &["snapshots"]),
    ("dispersion", &["k_max", "regularized"]),
    ("convergence", &["levels", "tau_end", "dt"]),
    ("resonance", &["bound"]),
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TEnd {
    OneOverEps,
    Fixed(f64),
}

impl TEnd {
    pub fn resolve(self, eps: f64) -> f64 {
        match self {
            TEnd::OneOverEps => 1.0 / eps,
            TEnd::Fixed(t) => t,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    pub label: String,
    pub z0: Spectrum<f64>,
    pub u0: Spectrum<f64>,
    pub h: Spectrum<f64>,
}

impl InitialData {
    pub fn preset(name: &str) -> Result<Self> {
        let (z0, u0, h) = match name {
            // U = 0, Z = cos x + sin 2x over h = 5 sin 2x
            "bump" => ("cos:1, sin:2", "", "5*sin:2"),
            "nonresonant" => ("cos:1", "", "sin:3"),
            "flat" => ("cos:1, sin:2", "", ""),
            _ => bail!("unknown preset `{name}` (known: bump, nonresonant, flat)"),
        };
        Ok(Self {
            label: name.to_string(),
            z0: parse_terms(z0)?,
            u0: parse_terms(u0)?,
            h: parse_terms(h)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Outputs {
    pub csv: bool,
    pub summary: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelKind,
    pub epsilon: f64,
    /// ε values of a `compare` sweep; defaults to `[epsilon]`.
    pub epsilons: Vec<f64>,
    pub m: usize,
    pub m_averaged: usize,
    pub dt_direct: f64,
    pub dt_averaged: f64,
    pub t_end: TEnd,
    pub initial: InitialData,
    pub outputs: Outputs,
    pub averaged_tau_end: f64,
    pub averaged_snapshots: Vec<f64>,
    pub direct_snapshots: Vec<f64>,
    pub k_max: i64,
    pub regularized: bool,
    pub levels: Vec<usize>,
    pub convergence_tau_end: f64,
    /// Averaged step on the coarsest convergence level; halved per level.
    pub convergence_dt: f64,
    pub resonance_bound: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelKind::LinearRegularized,
            epsilon: 0.1,
            epsilons: vec![0.1],
            m: 256,
            m_averaged: 256,
            dt_direct: 1e-3,
            dt_averaged: 1e-3,
            t_end: TEnd::OneOverEps,
            initial: InitialData::preset("bump").expect("builtin preset"),
            outputs: Outputs { csv: true, summary: true },
            averaged_tau_end: 1.0,
            averaged_snapshots: Vec::new(),
            direct_snapshots: Vec::new(),
            k_max: 10,
            regularized: false,
            levels: vec![64, 128, 256],
            convergence_tau_end: 0.5,
            convergence_dt: 0.02,
            resonance_bound: 16,
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        text.parse().with_context(|| format!("in config {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        for &e in std::iter::once(&self.epsilon).chain(&self.epsilons) {
            ensure!(e > 0.0 && e < 1.0, "epsilon must lie in (0, 1), got {e}");
        }
        ensure!(!self.epsilons.is_empty(), "epsilons must not be empty");
        ensure!(self.dt_direct > 0.0 && self.dt_averaged > 0.0, "time steps must be positive");
        ensure!(self.convergence_dt > 0.0, "convergence dt must be positive");
        if let TEnd::Fixed(t) = self.t_end {
            ensure!(t >= 0.0 && t.is_finite(), "t_end must be finite and non-negative, got {t}");
        }
        ensure!(self.k_max >= 0, "k_max must be non-negative");
        Ok(())
    }
}

struct Entry {
    value: String,
    line: usize,
}

impl FromStr for RunConfig {
    type Err = anyhow::Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut entries: BTreeMap<(String, String), Entry> = BTreeMap::new();
        let mut section = "run".to_string();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| anyhow!("line {line}: unterminated section header"))?.trim();
                ensure!(KNOWN.iter().any(|(s, _)| *s == name), "line {line}: unknown section [{name}]");
                section = name.to_string();
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| anyhow!("line {line}: expected `key = value`"))?;
            let key = key.trim();
            let known = KNOWN.iter().find(|(s, _)| *s == section).map(|(_, k)| *k).unwrap_or(&[]);
            ensure!(known.contains(&key), "line {line}: unknown key `{key}` in [{section}]");
            let previous = entries.insert(
                (section.clone(), key.to_string()),
                Entry {
                    value: value.trim().to_string(),
                    line,
                },
            );
            ensure!(previous.is_none(), "line {line}: duplicate key `{key}` in [{section}]");
        }

        let get = |s: &str, k: &str| entries.get(&(s.to_string(), k.to_string()));
        let mut cfg = RunConfig::default();
        macro_rules! field {
            ($s:expr, $k:expr, $dst:expr, $parse:expr) => {
                if let Some(e) = get($s, $k) {
                    $dst = $parse(&e.value).with_context(|| format!("line {}: bad value for `{}`", e.line, $k))?;
                }
            };
        }
        field!("run", "model", cfg.model, |v: &str| v.parse::<ModelKind>().map_err(anyhow::Error::from));
        field!("run", "epsilon", cfg.epsilon, parse_f64);
        cfg.epsilons = vec![cfg.epsilon];
        field!("run", "epsilons", cfg.epsilons, parse_list::<f64>);
        field!("run", "M", cfg.m, parse_usize);
        cfg.m_averaged = cfg.m;
        field!("run", "M_averaged", cfg.m_averaged, parse_usize);
        field!("run", "dt_direct", cfg.dt_direct, parse_f64);
        field!("run", "dt_averaged", cfg.dt_averaged, parse_f64);
        field!("run", "t_end", cfg.t_end, |v: &str| -> Result<TEnd> {
            if v == "one_over_eps" {
                Ok(TEnd::OneOverEps)
            } else {
                Ok(TEnd::Fixed(parse_f64(v)?))
            }
        });
        field!("run", "outputs", cfg.outputs, parse_outputs);

        field!("initial", "preset", cfg.initial, InitialData::preset);
        let custom = ["Z0", "U0", "h"].iter().any(|k| get("initial", k).is_some());
        if custom && get("initial", "preset").is_none() {
            cfg.initial = InitialData {
                label: "inline".into(),
                z0: Spectrum::empty(),
                u0: Spectrum::empty(),
                h: Spectrum::empty(),
            };
        } else if custom {
            cfg.initial.label = format!("{}+inline", cfg.initial.label);
        }
        field!("initial", "Z0", cfg.initial.z0, parse_terms);
        field!("initial", "U0", cfg.initial.u0, parse_terms);
        field!("initial", "h", cfg.initial.h, parse_terms);

        field!("averaged", "tau_end", cfg.averaged_tau_end, parse_f64);
        field!("averaged", "snapshots", cfg.averaged_snapshots, parse_list::<f64>);
        field!("direct", "snapshots", cfg.direct_snapshots, parse_list::<f64>);
        field!("dispersion", "k_max", cfg.k_max, |v: &str| v.parse::<i64>().map_err(anyhow::Error::from));
        field!("dispersion", "regularized", cfg.regularized, parse_bool);
        field!("convergence", "levels", cfg.levels, parse_list::<usize>);
        field!("convergence", "tau_end", cfg.convergence_tau_end, parse_f64);
        field!("convergence", "dt", cfg.convergence_dt, parse_f64);
        field!("resonance", "bound", cfg.resonance_bound, parse_usize);

        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_f64(v: &str) -> Result<f64> {
    let x: f64 = v.parse().map_err(|_| anyhow!("`{v}` is not a number"))?;
    ensure!(x.is_finite(), "`{v}` is not finite");
    Ok(x)
}

fn parse_usize(v: &str) -> Result<usize> {
    v.parse().map_err(|_| anyhow!("`{v}` is not a non-negative integer"))
}

fn parse_bool(v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => bail!("`{v}` is not a boolean"),
    }
}

fn parse_list<T: FromStr>(v: &str) -> Result<Vec<T>> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|_| anyhow!("bad list item `{s}`")))
        .collect()
}

fn parse_outputs(v: &str) -> Result<Outputs> {
    let mut out = Outputs { csv: false, summary: false };
    for item in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match item {
            "csv" => out.csv = true,
            "summary" => out.summary = true,
            _ => bail!("unknown output `{item}` (csv, summary)"),
        }
    }
    Ok(out)
}

/// Parses a real trigonometric polynomial written as comma-separated terms:
/// `cos:1`, `-0.5*sin:2`, `2.5*cos:0.5` or a bare constant. An empty string
/// is the zero polynomial.
pub fn parse_terms(v: &str) -> Result<Spectrum<f64>> {
    let mut terms = Vec::new();
    for item in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (coef, body) = match item.split_once('*') {
            Some((c, b)) => (parse_f64(c.trim())?, b.trim()),
            None => (1.0, item),
        };
        let term = match body.split_once(':') {
            Some(("cos", nu)) => TrigTerm::Cos { coef, nu: parse_f64(nu.trim())? },
            Some(("sin", nu)) => TrigTerm::Sin { coef, nu: parse_f64(nu.trim())? },
            Some((kind, _)) => bail!("unknown term kind `{kind}` in `{item}` (cos, sin)"),
            None => TrigTerm::Constant(coef * parse_f64(body)?),
        };
        terms.push(term);
    }
    Ok(Spectrum::from_terms(&terms))
}
