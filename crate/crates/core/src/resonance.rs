//! Resonance tests for the averaged system.
//!
//! A family `j` is non-resonant when no admissible combination of forcing
//! and initial-data frequencies, transported along the `j`-th
//! characteristic, has zero total frequency. Resonant combinations survive
//! averaging and keep the averaged equations coupled.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectrum::{Spectrum, FREQUENCY_TOL};

/// A divisor or frequency combination is zero when within this of zero.
pub const VANISHING_TOL: f64 = 1e-10;
/// Default enumeration bound for integer multi-indices.
pub const DEFAULT_BOUND: usize = 16;
/// At most this many witnesses are kept per verdict.
pub const MAX_WITNESSES: usize = 64;
const MAX_ENUMERATION: u128 = 50_000_000;

/// Characteristic speeds, periods, spectra and quadratic coupling of a
/// diagonalised system `∂_t v_j + λ_j ∂_x v_j = ε f_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec<T> {
    lambdas: Vec<T>,
    time_periods: Vec<Option<T>>,
    space_periods: Vec<Option<T>>,
    profile_periods: Option<Vec<T>>,
    initial_spectra: Option<Vec<Spectrum<T>>>,
    time_forcing: Vec<Option<Spectrum<T>>>,
    space_forcing: Vec<Option<Spectrum<T>>>,
    coupling: Vec<T>,
}

impl<T: Real> SystemSpec<T> {
    /// New system with the given (pairwise distinct) characteristic speeds,
    /// no periods, no spectra and zero coupling.
    pub fn new(lambdas: Vec<T>) -> Result<Self> {
        let n = lambdas.len();
        if n == 0 {
            return Err(Error::Precondition("need at least one family".into()));
        }
        for a in 0..n {
            if !lambdas[a].is_finite() {
                return Err(Error::Precondition("characteristic speeds must be finite".into()));
            }
            for b in a + 1..n {
                if lambdas[a] == lambdas[b] {
                    return Err(Error::Precondition(format!(
                        "characteristic speeds must be distinct, λ_{a} = λ_{b} = {}",
                        lambdas[a]
                    )));
                }
            }
        }
        Ok(Self {
            time_periods: vec![None; n],
            space_periods: vec![None; n],
            profile_periods: None,
            initial_spectra: None,
            time_forcing: vec![None; n],
            space_forcing: vec![None; n],
            coupling: vec![T::zero(); n * n * n],
            lambdas,
        })
    }

    /// The Riemann-variable shallow-water system: speeds `(1, -1)`, bottom
    /// profile `h` as spatial forcing of both families, initial surface
    /// spectrum for both waves, and the quadratic coupling of the
    /// right- and left-going equations.
    pub fn shallow_water(h: Spectrum<T>, z0: Spectrum<T>) -> Self {
        let tau = T::TAU();
        let mut spec = Self::new(vec![T::one(), -T::one()])
            .expect("distinct speeds")
            .with_profile_periods(vec![tau, tau])
            .expect("positive periods")
            .with_initial_spectra(vec![z0.clone(), z0])
            .expect("two spectra")
            .with_space_forcing(vec![Some(h.clone()), Some(h)])
            .expect("two spectra");
        let half = T::lit(0.5);
        let three_half = T::lit(1.5);
        // v⁺:  -(1/2)(3 v⁺v⁺_x - v⁻v⁻_x - v⁺v⁻_x - v⁻v⁺_x)
        spec.set_coupling(0, 0, 0, -three_half);
        spec.set_coupling(0, 1, 1, half);
        spec.set_coupling(0, 0, 1, half);
        spec.set_coupling(0, 1, 0, half);
        // v⁻:  -(1/2)(v⁺v⁺_x - 3 v⁻v⁻_x + v⁺v⁻_x + v⁻v⁺_x)
        spec.set_coupling(1, 0, 0, -half);
        spec.set_coupling(1, 1, 1, three_half);
        spec.set_coupling(1, 0, 1, -half);
        spec.set_coupling(1, 1, 0, -half);
        spec
    }

    pub fn n(&self) -> usize {
        self.lambdas.len()
    }

    pub fn lambdas(&self) -> &[T] {
        &self.lambdas
    }

    fn check_len<X>(&self, v: &[X], what: &str) -> Result<()> {
        if v.len() == self.n() {
            Ok(())
        } else {
            Err(Error::Precondition(format!(
                "{what}: expected {} entries, got {}",
                self.n(),
                v.len()
            )))
        }
    }

    fn check_periods<'a>(periods: impl IntoIterator<Item = &'a T>) -> Result<()>
    where
        T: 'a,
    {
        for p in periods {
            if !(*p > T::zero()) || !p.is_finite() {
                return Err(Error::Precondition(format!("periods must be positive, got {p}")));
            }
        }
        Ok(())
    }

    /// Time periods `Λ_j^t` of the forcing, per family (`None`: no time forcing).
    pub fn with_time_periods(mut self, periods: Vec<Option<T>>) -> Result<Self> {
        self.check_len(&periods, "time periods")?;
        Self::check_periods(periods.iter().flatten())?;
        self.time_periods = periods;
        Ok(self)
    }

    /// Space periods `Λ_j^x` of the forcing, per family.
    pub fn with_space_periods(mut self, periods: Vec<Option<T>>) -> Result<Self> {
        self.check_len(&periods, "space periods")?;
        Self::check_periods(periods.iter().flatten())?;
        self.space_periods = periods;
        Ok(self)
    }

    /// Spatial periods `Λ_k` of the initial profiles.
    pub fn with_profile_periods(mut self, periods: Vec<T>) -> Result<Self> {
        self.check_len(&periods, "profile periods")?;
        Self::check_periods(&periods)?;
        self.profile_periods = Some(periods);
        Ok(self)
    }

    pub fn with_initial_spectra(mut self, spectra: Vec<Spectrum<T>>) -> Result<Self> {
        self.check_len(&spectra, "initial spectra")?;
        self.initial_spectra = Some(spectra);
        Ok(self)
    }

    pub fn with_time_forcing(mut self, spectra: Vec<Option<Spectrum<T>>>) -> Result<Self> {
        self.check_len(&spectra, "time forcing")?;
        self.time_forcing = spectra;
        Ok(self)
    }

    pub fn with_space_forcing(mut self, spectra: Vec<Option<Spectrum<T>>>) -> Result<Self> {
        self.check_len(&spectra, "space forcing")?;
        self.space_forcing = spectra;
        Ok(self)
    }

    /// Coefficient `f_jkm` of `w_k ∂w_m` in the `j`-th equation.
    pub fn coupling(&self, j: usize, k: usize, m: usize) -> T {
        let n = self.n();
        self.coupling[(j * n + k) * n + m]
    }

    pub fn set_coupling(&mut self, j: usize, k: usize, m: usize, value: T) {
        let n = self.n();
        self.coupling[(j * n + k) * n + m] = value;
    }

    pub fn initial_spectra(&self) -> Option<&[Spectrum<T>]> {
        self.initial_spectra.as_deref()
    }

    pub fn space_forcing(&self, j: usize) -> Option<&Spectrum<T>> {
        self.space_forcing[j].as_ref()
    }

    pub fn time_forcing(&self, j: usize) -> Option<&Spectrum<T>> {
        self.time_forcing[j].as_ref()
    }
}

/// Evidence that a resonance condition fails.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness<T> {
    /// Integer multi-index `(l^t, l^x, l_1..l_n)`; `l[j]` is always zero.
    MultiIndex { lt: i64, lx: i64, l: Vec<i64> },
    /// Frequencies `(ν^t, ν^x, ν_1..ν_n)` picked from the spectra; `nu[j]` is zero.
    Frequencies { nu_t: T, nu_x: T, nu: Vec<T> },
    /// Bottom frequency `μ` and surface frequency `ν` with `μ = ±2ν`.
    BottomPair { mu: T, nu: T },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceVerdict<T> {
    pub resonant: bool,
    /// Ordered: smallest multi-index (by max-norm, then 1-norm, then
    /// lexicographically) or first combination in enumeration order.
    pub witnesses: Vec<Witness<T>>,
    pub searched_bound: usize,
}

impl<T: Real> ResonanceVerdict<T> {
    fn from_witnesses(witnesses: Vec<Witness<T>>, searched_bound: usize) -> Self {
        Self {
            resonant: !witnesses.is_empty(),
            witnesses,
            searched_bound,
        }
    }
}

/// `l^t/Λ_j^t + λ_j l^x/Λ_j^x + Σ_{k≠j} (λ_j - λ_k) l_k/Λ_k`.
///
/// Missing forcing periods contribute nothing.
pub fn small_divisor<T: Real>(spec: &SystemSpec<T>, j: usize, lt: i64, lx: i64, l: &[i64]) -> Result<T> {
    let periods = spec
        .profile_periods
        .as_ref()
        .ok_or_else(|| Error::MissingPeriods("profile periods Λ_k are required".into()))?;
    let int = |v: i64| T::from_i64(v).expect("small integer");
    let lj = spec.lambdas[j];
    let mut d = T::zero();
    if let Some(p) = spec.time_periods[j] {
        d += int(lt) / p;
    }
    if let Some(p) = spec.space_periods[j] {
        d += lj * int(lx) / p;
    }
    for (k, &lk) in l.iter().enumerate() {
        if k != j {
            d += (lj - spec.lambdas[k]) * int(lk) / periods[k];
        }
    }
    Ok(d)
}

/// `ν^t + ν^x λ_j + Σ_{k≠j} ν_k (λ_j - λ_k)`.
pub fn frequency_combination<T: Real>(spec: &SystemSpec<T>, j: usize, nu_t: T, nu_x: T, nu: &[T]) -> T {
    let lj = spec.lambdas[j];
    let mut d = nu_t + nu_x * lj;
    for (k, &v) in nu.iter().enumerate() {
        if k != j {
            d += v * (lj - spec.lambdas[k]);
        }
    }
    d
}

/// Evaluates a witness against the condition it claims to violate.
pub fn witness_residual<T: Real>(spec: &SystemSpec<T>, j: usize, w: &Witness<T>) -> Result<T> {
    Ok(match w {
        Witness::MultiIndex { lt, lx, l } => small_divisor(spec, j, *lt, *lx, l)?.abs(),
        Witness::Frequencies { nu_t, nu_x, nu } => frequency_combination(spec, j, *nu_t, *nu_x, nu).abs(),
        Witness::BottomPair { mu, nu } => {
            let two_nu = T::lit(2.0) * *nu;
            (*mu - two_nu).abs().min((*mu + two_nu).abs())
        }
    })
}

fn check_family<T: Real>(spec: &SystemSpec<T>, j: usize) -> Result<()> {
    if j >= spec.n() {
        return Err(Error::Precondition(format!("family {j} out of range (n = {})", spec.n())));
    }
    Ok(())
}

/// Enumerates every integer multi-index with entries in `[-L, L]` and asks
/// whether the small divisor of family `j` vanishes.
///
/// Slots without period data (no time or space forcing) are held at zero;
/// the profile periods `Λ_k` are mandatory.
pub fn check_small_divisors<T: Real>(spec: &SystemSpec<T>, j: usize, bound: usize) -> Result<ResonanceVerdict<T>> {
    check_family(spec, j)?;
    if bound == 0 {
        return Err(Error::Precondition("enumeration bound must be at least 1".into()));
    }
    if spec.profile_periods.is_none() {
        return Err(Error::MissingPeriods("profile periods Λ_k are required".into()));
    }
    let n = spec.n();
    let b = bound as i64;
    // free slots: l^t, l^x (when forced), l_k for k ≠ j
    let mut slots: Vec<usize> = Vec::new();
    if spec.time_periods[j].is_some() {
        slots.push(0);
    }
    if spec.space_periods[j].is_some() {
        slots.push(1);
    }
    slots.extend((0..n).filter(|&k| k != j).map(|k| k + 2));
    let width = (2 * bound + 1) as u128;
    let total = width.checked_pow(slots.len() as u32).unwrap_or(u128::MAX);
    if total > MAX_ENUMERATION {
        return Err(Error::Precondition(format!(
            "enumeration of {total} multi-indices exceeds the limit; lower the bound"
        )));
    }

    let tol = T::lit(VANISHING_TOL);
    let mut hits: Vec<(i64, i64, Vec<i64>)> = Vec::new();
    let mut digits = vec![-b; slots.len()];
    loop {
        let mut tuple = vec![0i64; n + 2];
        for (&slot, &d) in slots.iter().zip(&digits) {
            tuple[slot] = d;
        }
        if tuple.iter().any(|&v| v != 0) {
            let (lt, lx) = (tuple[0], tuple[1]);
            let l = tuple[2..].to_vec();
            if small_divisor(spec, j, lt, lx, &l)?.abs() < tol {
                hits.push((lt, lx, l));
            }
        }
        if !advance(&mut digits, b) {
            break;
        }
    }

    let key = |t: &(i64, i64, Vec<i64>)| {
        let all = std::iter::once(t.0).chain(std::iter::once(t.1)).chain(t.2.iter().copied());
        let max = all.clone().map(i64::abs).max().unwrap_or(0);
        let sum: i64 = all.map(i64::abs).sum();
        (max, sum, t.0, t.1, t.2.clone())
    };
    hits.sort_by_key(key);
    hits.truncate(MAX_WITNESSES);
    let witnesses = hits
        .into_iter()
        .map(|(lt, lx, l)| Witness::MultiIndex { lt, lx, l })
        .collect();
    Ok(ResonanceVerdict::from_witnesses(witnesses, bound))
}

/// Odometer step over `[-b, b]^len`; false once every tuple was visited.
fn advance(digits: &mut [i64], b: i64) -> bool {
    for d in digits.iter_mut().rev() {
        if *d < b {
            *d += 1;
            return true;
        }
        *d = -b;
    }
    false
}

/// Distinct non-zero frequencies of a spectrum, smallest magnitude first,
/// at most `max_modes` of them, preceded by the zero "absent" choice.
fn slot_choices<T: Real>(spectrum: Option<&Spectrum<T>>, max_modes: usize) -> Vec<T> {
    let tol = T::lit(FREQUENCY_TOL);
    let mut freqs: Vec<T> = spectrum
        .map(|s| s.frequencies().filter(|f| f.abs() > tol).collect())
        .unwrap_or_default();
    freqs.sort_by(|a, b| {
        a.abs()
            .partial_cmp(&b.abs())
            .expect("finite")
            .then(a.partial_cmp(b).expect("finite"))
    });
    freqs.truncate(max_modes);
    std::iter::once(T::zero()).chain(freqs).collect()
}

/// Checks whether some combination `ν^t + ν^x λ_j + Σ_{k≠j} ν_k(λ_j - λ_k)`
/// of stored frequencies vanishes.
///
/// Each slot takes either one of its spectrum's frequencies or zero (the
/// slot does not participate); zero-frequency modes count as absent, and the
/// all-absent choice is excluded. Up to `max_modes` frequencies per spectrum
/// are used.
pub fn check_almost_periodic<T: Real>(spec: &SystemSpec<T>, j: usize, max_modes: usize) -> Result<ResonanceVerdict<T>> {
    check_family(spec, j)?;
    let initial = spec
        .initial_spectra
        .as_ref()
        .ok_or_else(|| Error::Precondition("initial spectra are required".into()))?;
    let n = spec.n();
    let nu_t = slot_choices(spec.time_forcing[j].as_ref(), max_modes);
    let nu_x = slot_choices(spec.space_forcing[j].as_ref(), max_modes);
    let per_family: Vec<Vec<T>> = (0..n)
        .map(|k| if k == j { vec![T::zero()] } else { slot_choices(Some(&initial[k]), max_modes) })
        .collect();
    let total = per_family
        .iter()
        .fold((nu_t.len() * nu_x.len()) as u128, |acc, c| acc.saturating_mul(c.len() as u128));
    if total > MAX_ENUMERATION {
        return Err(Error::Precondition(format!(
            "enumeration of {total} frequency combinations exceeds the limit; lower max_modes"
        )));
    }

    let tol = T::lit(VANISHING_TOL);
    let zero_tol = T::lit(FREQUENCY_TOL);
    let mut witnesses = Vec::new();
    let mut idx = vec![0usize; n];
    'outer: for &ft in &nu_t {
        for &fx in &nu_x {
            idx.iter_mut().for_each(|i| *i = 0);
            loop {
                let nu: Vec<T> = idx.iter().enumerate().map(|(k, &i)| per_family[k][i]).collect();
                let active = ft.abs() > zero_tol || fx.abs() > zero_tol || nu.iter().any(|v| v.abs() > zero_tol);
                if active && frequency_combination(spec, j, ft, fx, &nu).abs() < tol {
                    witnesses.push(Witness::Frequencies { nu_t: ft, nu_x: fx, nu });
                    if witnesses.len() >= MAX_WITNESSES {
                        break 'outer;
                    }
                }
                let mut pos = n;
                let mut done = true;
                while pos > 0 {
                    pos -= 1;
                    if idx[pos] + 1 < per_family[pos].len() {
                        idx[pos] += 1;
                        done = false;
                        break;
                    }
                    idx[pos] = 0;
                }
                if done {
                    break;
                }
            }
        }
    }
    Ok(ResonanceVerdict::from_witnesses(witnesses, max_modes))
}

/// Shallow-water resonance: some bottom frequency `μ` equals `±2ν` for a
/// surface frequency `ν`, the pair `μ = ν = 0` excluded.
pub fn check_shallow_water_resonance<T: Real>(h: &Spectrum<T>, z0: &Spectrum<T>) -> ResonanceVerdict<T> {
    let tol = T::lit(VANISHING_TOL);
    let zero_tol = T::lit(FREQUENCY_TOL);
    let two = T::lit(2.0);
    let mut witnesses = Vec::new();
    for mu in h.frequencies() {
        for nu in z0.frequencies() {
            if mu.abs() <= zero_tol && nu.abs() <= zero_tol {
                continue;
            }
            if (mu - two * nu).abs() < tol || (mu + two * nu).abs() < tol {
                witnesses.push(Witness::BottomPair { mu, nu });
            }
        }
    }
    witnesses.truncate(MAX_WITNESSES);
    ResonanceVerdict::from_witnesses(witnesses, h.len().max(z0.len()))
}
