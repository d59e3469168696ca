//! Data-driven cut-off selection: quasi-optimality, the Lepski-type
//! balancing rule and hardened balancing, plus the oracle and balance
//! indices and efficiency accounting.
//!
//! All returned indices are 1-based. Ties go to the smallest index.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{self, Profiles, SimulationDraw, Subsampling};

/// Default Lepski threshold.
pub const DEFAULT_KAPPA: f64 = 0.75;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[serde(rename = "qo")]
    QuasiOptimality,
    #[serde(rename = "hbp")]
    HardenedBalancing,
    Lepski,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::QuasiOptimality, Method::HardenedBalancing, Method::Lepski];

    pub fn name(self) -> &'static str {
        match self {
            Method::QuasiOptimality => "qo",
            Method::HardenedBalancing => "hbp",
            Method::Lepski => "lepski",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Denominator used in the Lepski statistic `f(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LepskiDenominator {
    /// Divide by `s(m)` as written.
    #[default]
    #[serde(rename = "s")]
    Variance,
    /// Divide by `√s(m)`.
    #[serde(rename = "sqrt_s")]
    StdDev,
}

impl LepskiDenominator {
    fn apply(self, s: f64) -> f64 {
        match self {
            LepskiDenominator::Variance => s,
            LepskiDenominator::StdDev => s.sqrt(),
        }
    }
}

/// Smallest index attaining the minimum. NaN entries never win.
fn first_argmin(values: impl IntoIterator<Item = f64>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values.into_iter().enumerate() {
        if v.is_nan() {
            continue;
        }
        match best {
            Some((_, b)) if v >= b => {}
            _ => best = Some((i, v)),
        }
    }
    best.map(|(i, _)| i + 1)
}

/// Balance index n#: the unique `n` with `s(n) ≤ b(n)` and `s(n+1) > b(n+1)`.
///
/// Uses the first `N = min(len s, len b)` entries of each profile.
pub fn balance_index(s: &[f64], b: &[f64]) -> Result<usize> {
    let n = s.len().min(b.len());
    if n < 2 {
        return Err(Error::NoCrossing {
            n,
            reason: "need at least two levels".into(),
        });
    }
    if s[0] > b[0] {
        return Err(Error::NoCrossing {
            n,
            reason: format!("s(1) = {} > b(1) = {}", s[0], b[0]),
        });
    }
    if s[n - 1] <= b[n - 1] {
        return Err(Error::NoCrossing {
            n,
            reason: format!("s(N) = {} <= b(N) = {}", s[n - 1], b[n - 1]),
        });
    }
    let i = (0..n - 1)
        .find(|&i| s[i] <= b[i] && s[i + 1] > b[i + 1])
        .expect("a crossing exists between the checked endpoints");
    Ok(i + 1)
}

/// Quasi-optimality index n* = argmin D(n), smallest index on ties.
pub fn select_quasi_optimality(d: &[f64]) -> Result<usize> {
    first_argmin(d.iter().copied()).ok_or(Error::EmptyPath)
}

/// Generic Lepski statistic over a candidate set.
///
/// For every `n` in `candidates` returns
/// `max_{m ∈ pool, m > n} dist(n, m) / (4 · den(s(m)))`, with the empty
/// maximum taken as 0. `s` is indexed by level (1-based, `s[m - 1]`) and
/// `dist(n, m)` must return the norm `‖x̂^{(m)} − x̂^{(n)}‖` (not squared).
pub fn lepski_statistic(
    candidates: &[usize],
    pool: &[usize],
    s: &[f64],
    denominator: LepskiDenominator,
    mut dist: impl FnMut(usize, usize) -> f64,
) -> Vec<f64> {
    candidates
        .iter()
        .map(|&n| {
            pool.iter()
                .filter(|&&m| m > n)
                .map(|&m| dist(n, m) / (4.0 * denominator.apply(s[m - 1])))
                .fold(0.0, f64::max)
        })
        .collect()
}

/// Sequence-space Lepski statistic `f(1..=N)` with `N = s.len()`.
///
/// `levels` must hold at least `N` entries; `observed` at least `ℓ(N)`.
pub fn lepski_f(observed: &[f64], levels: &[usize], s: &[f64], denominator: LepskiDenominator) -> Vec<f64> {
    let n = s.len();
    assert!(levels.len() >= n, "fewer levels than variance entries");
    let p = model::prefix_sums(observed.iter().map(|x| x * x));
    let all: Vec<usize> = (1..=n).collect();
    lepski_statistic(&all, &all, s, denominator, |a, b| {
        (p[levels[b - 1]] - p[levels[a - 1]]).max(0.0).sqrt()
    })
}

/// Smallest `n` such that `f(m) ≤ κ` for all `m ≥ n`; `f.len()` when no
/// index qualifies (only possible when the last statistic exceeds κ).
pub fn select_lepski(f: &[f64], kappa: f64) -> usize {
    // Scan from the right: the answer lies just after the last violation.
    match f.iter().rposition(|&v| !(v <= kappa)) {
        Some(i) if i + 1 == f.len() => f.len(),
        Some(i) => i + 2,
        None => 1,
    }
}

/// Hardened balancing index argmin f(n)·√s(n).
pub fn select_hardened_balancing(f: &[f64], s: &[f64]) -> Result<usize> {
    first_argmin(f.iter().zip(s).map(|(f, s)| f * s.sqrt())).ok_or(Error::EmptyPath)
}

/// Oracle index argmin e(n).
pub fn oracle_index(e: &[f64]) -> Result<usize> {
    first_argmin(e.iter().copied()).ok_or(Error::EmptyPath)
}

/// √e(chosen) / √min e, where `e` holds squared errors.
pub fn efficiency(e: &[f64], chosen: usize) -> Result<f64> {
    let best = e.iter().copied().fold(f64::INFINITY, f64::min);
    if chosen == 0 || chosen > e.len() {
        return Err(Error::OutOfRange {
            index: chosen,
            max: e.len(),
        });
    }
    if best == 0.0 {
        return Err(Error::DegenerateDraw);
    }
    Ok((e[chosen - 1] / best).sqrt())
}

/// Histogram of efficiencies on the bins `[1,2) [2,4) [4,16) [16,64)`
/// plus a "huge" bin `[64, ∞)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EfficiencyHistogram {
    pub counts: [usize; 4],
    pub huge: usize,
}

impl EfficiencyHistogram {
    pub const EDGES: [f64; 5] = [1.0, 2.0, 4.0, 16.0, 64.0];

    pub fn new() -> Self {
        Self {
            counts: [0; 4],
            huge: 0,
        }
    }

    pub fn push(&mut self, value: f64) -> Result<()> {
        if !(value >= 1.0) {
            return Err(Error::EfficiencyBelowOne(value));
        }
        match Self::EDGES[1..].iter().position(|&hi| value < hi) {
            Some(i) => self.counts[i] += 1,
            None => self.huge += 1,
        }
        Ok(())
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum::<usize>() + self.huge
    }

    pub fn huge_fraction(&self) -> f64 {
        if self.total() == 0 {
            0.0
        } else {
            self.huge as f64 / self.total() as f64
        }
    }

    /// `(low, high, count)` rows; the last row has `high = ∞`.
    pub fn rows(&self) -> Vec<(f64, f64, usize)> {
        let mut rows: Vec<_> = (0..4)
            .map(|i| (Self::EDGES[i], Self::EDGES[i + 1], self.counts[i]))
            .collect();
        rows.push((64.0, f64::INFINITY, self.huge));
        rows
    }

    /// CSV with header `bin_low,bin_high,count`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_low,bin_high,count\n");
        for (lo, hi, c) in self.rows() {
            if hi.is_infinite() {
                out.push_str(&format!("{lo},inf,{c}\n"));
            } else {
                out.push_str(&format!("{lo},{hi},{c}\n"));
            }
        }
        out
    }
}

impl Default for EfficiencyHistogram {
    fn default() -> Self {
        Self::new()
    }
}

pub fn bin_efficiencies(values: &[f64]) -> Result<EfficiencyHistogram> {
    let mut hist = EfficiencyHistogram::new();
    for &v in values {
        hist.push(v)?;
    }
    Ok(hist)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Efficiencies {
    pub qo: f64,
    pub hbp: f64,
    pub lepski: f64,
}

impl Efficiencies {
    pub fn get(&self, method: Method) -> f64 {
        match method {
            Method::QuasiOptimality => self.qo,
            Method::HardenedBalancing => self.hbp,
            Method::Lepski => self.lepski,
        }
    }
}

/// Outcome of the three rules on one draw.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionReport {
    pub n_qo: usize,
    pub n_hbp: usize,
    pub n_lepski: usize,
    pub n_oracle: usize,
    /// Balance index; absent where the bias profile is unknown.
    pub n_sharp: Option<usize>,
    pub efficiency: Efficiencies,
    /// D(n) over the quasi-optimality index set.
    pub criterion: Vec<f64>,
    /// f(n) over the balancing index set.
    pub lepski_f: Vec<f64>,
}

impl SelectionReport {
    pub fn chosen(&self, method: Method) -> usize {
        match method {
            Method::QuasiOptimality => self.n_qo,
            Method::HardenedBalancing => self.n_hbp,
            Method::Lepski => self.n_lepski,
        }
    }
}

/// Options for the sequence-space rules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RuleOptions {
    pub kappa: f64,
    pub lepski_denominator: LepskiDenominator,
}

impl Default for RuleOptions {
    fn default() -> Self {
        Self {
            kappa: DEFAULT_KAPPA,
            lepski_denominator: LepskiDenominator::Variance,
        }
    }
}

/// Applies quasi-optimality (with the subsampling's χ), Lepski and hardened
/// balancing to one sequence-space draw.
pub fn select_all(
    draw: &SimulationDraw,
    sub: &Subsampling,
    profiles: &Profiles,
    options: &RuleOptions,
) -> Result<SelectionReport> {
    let n = sub.n();
    let weights = sub.weights(profiles);
    let criterion = model::criterion_path(draw, sub, &weights)?;
    let errors = model::true_error_path(draw, sub)?;
    let s = &profiles.s[..n];
    let f = lepski_f(&draw.observed, sub.levels(), s, options.lepski_denominator);

    let n_qo = select_quasi_optimality(&criterion)?;
    let n_lepski = select_lepski(&f, options.kappa);
    let n_hbp = select_hardened_balancing(&f, s)?;
    let n_oracle = oracle_index(&errors)?;
    let n_sharp = balance_index(s, &profiles.b[..n]).ok();

    Ok(SelectionReport {
        n_qo,
        n_hbp,
        n_lepski,
        n_oracle,
        n_sharp,
        efficiency: Efficiencies {
            qo: efficiency(&errors, n_qo)?,
            hbp: efficiency(&errors, n_hbp)?,
            lepski: efficiency(&errors, n_lepski)?,
        },
        criterion,
        lepski_f: f,
    })
}
