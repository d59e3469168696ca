//! Sequence-space observation model `x̃_k = x_k + σ(k) ξ_k` with a centered
//! Gaussian prior `x_k ~ N(0, γ(k)²)`, spectral cut-off estimators on a
//! subsampled level schedule, and the deterministic variance and bias
//! profiles `s(n)` and `b(n)`.
//!
//! Indices `k` (coefficients) and `n` (levels) are 1-based in every public
//! accessor. Internally sequences are stored 0-based.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Relative size of the last retained prior variance against `b(N)` below
/// which the truncated tail is considered faithful.
pub const TAIL_TOLERANCE: f64 = 1e-6;

/// Hard cap on the number of represented coefficients.
pub const MAX_COEFFICIENTS: usize = 1 << 24;

/// Eigenvalues `λ(k)`, noise scales `ε(k)` and prior scales `γ(k)` for
/// `k = 1..=K_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralProblem {
    eigenvalues: Vec<f64>,
    noise_scales: Vec<f64>,
    prior_scales: Vec<f64>,
    /// σ(k)² cached; σ(k) = ε(k)/λ(k).
    noise_var: Vec<f64>,
}

impl SpectralProblem {
    pub fn new(eigenvalues: Vec<f64>, noise_scales: Vec<f64>, prior_scales: Vec<f64>) -> Result<Self> {
        let k_max = eigenvalues.len();
        if k_max == 0 {
            return Err(Error::InvalidProblem("no coefficients".into()));
        }
        if k_max > MAX_COEFFICIENTS {
            return Err(Error::InvalidProblem(format!(
                "K_max = {k_max} exceeds the supported maximum {MAX_COEFFICIENTS}"
            )));
        }
        if noise_scales.len() != k_max || prior_scales.len() != k_max {
            return Err(Error::InvalidProblem(format!(
                "length mismatch: lambda {}, eps {}, gamma {}",
                k_max,
                noise_scales.len(),
                prior_scales.len()
            )));
        }
        for (i, &l) in eigenvalues.iter().enumerate() {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::InvalidProblem(format!(
                    "lambda({}) = {l} is not positive",
                    i + 1
                )));
            }
            if i > 0 && l > eigenvalues[i - 1] {
                return Err(Error::InvalidProblem(format!("eigenvalues increase at k = {}", i + 1)));
            }
        }
        if let Some(i) = noise_scales.iter().position(|e| !(e.is_finite() && *e > 0.0)) {
            return Err(Error::InvalidProblem(format!("eps({}) is not positive", i + 1)));
        }
        if let Some(i) = prior_scales.iter().position(|g| !(g.is_finite() && *g >= 0.0)) {
            return Err(Error::InvalidProblem(format!(
                "gamma({}) is negative or not finite",
                i + 1
            )));
        }
        let noise_var: Vec<f64> = noise_scales
            .iter()
            .zip(&eigenvalues)
            .map(|(e, l)| (e / l).powi(2))
            .collect();
        if noise_var.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidProblem("sigma(k)^2 overflows".into()));
        }
        Ok(Self {
            eigenvalues,
            noise_scales,
            prior_scales,
            noise_var,
        })
    }

    /// Hölder-type problem with white noise: `λ(k) = k^{-ν}`, `ε(k) = δ`,
    /// `γ(k) = k^{-μ}`.
    pub fn power_law(delta: f64, nu: f64, mu: f64, k_max: usize) -> Result<Self> {
        let ks = (1..=k_max).map(|k| k as f64);
        Self::new(
            ks.clone().map(|k| k.powf(-nu)).collect(),
            vec![delta; k_max],
            ks.map(|k| k.powf(-mu)).collect(),
        )
    }

    pub fn k_max(&self) -> usize {
        self.eigenvalues.len()
    }

    fn check_index(&self, k: usize) -> Result<usize> {
        if k == 0 || k > self.k_max() {
            Err(Error::OutOfRange {
                index: k,
                max: self.k_max(),
            })
        } else {
            Ok(k - 1)
        }
    }

    pub fn eigenvalue(&self, k: usize) -> Result<f64> {
        Ok(self.eigenvalues[self.check_index(k)?])
    }

    pub fn noise_scale(&self, k: usize) -> Result<f64> {
        Ok(self.noise_scales[self.check_index(k)?])
    }

    pub fn prior_scale(&self, k: usize) -> Result<f64> {
        Ok(self.prior_scales[self.check_index(k)?])
    }

    /// σ(k) = ε(k)/λ(k).
    pub fn noise_to_signal(&self, k: usize) -> Result<f64> {
        let i = self.check_index(k)?;
        Ok(self.noise_scales[i] / self.eigenvalues[i])
    }

    /// σ(k)² for k = 1..=K_max (0-based slice).
    pub fn noise_variances(&self) -> &[f64] {
        &self.noise_var
    }

    /// γ(k) for k = 1..=K_max (0-based slice).
    pub fn prior_scales(&self) -> &[f64] {
        &self.prior_scales
    }

    /// Whether the truncated tail satisfies `γ(K_max)² < 1e-6 · b(N)`.
    pub fn tail_is_resolved(&self, profiles: &Profiles) -> bool {
        let last = self.prior_scales[self.k_max() - 1].powi(2);
        last < TAIL_TOLERANCE * profiles.b[profiles.len() - 2]
    }
}

/// Weight function χ on the criterion.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weight {
    /// χ ≡ 1: classical quasi-optimality.
    #[default]
    Unit,
    /// χ(n) = s(n)^{-1/2}.
    InverseSqrtS,
    /// Explicit χ(1..=N).
    Table(Vec<f64>),
}

/// Strictly increasing cut-off schedule `ℓ(1) < ... < ℓ(N+1)` with a weight
/// χ(1..=N). The extra level `ℓ(N+1)` is what the criterion at `n = N`
/// compares against.
#[derive(Debug, Clone, PartialEq)]
pub struct Subsampling {
    levels: Vec<usize>,
    weight: Weight,
}

impl Subsampling {
    pub fn new(levels: Vec<usize>, weight: Weight) -> Result<Self> {
        if levels.len() < 2 {
            return Err(Error::InvalidSubsampling("need at least two levels (N >= 1)".into()));
        }
        if levels[0] == 0 {
            return Err(Error::InvalidSubsampling("levels must be positive".into()));
        }
        if let Some(w) = levels.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSubsampling(format!(
                "levels not strictly increasing at n = {}",
                w + 1
            )));
        }
        if let Weight::Table(chi) = &weight {
            if chi.len() != levels.len() - 1 {
                return Err(Error::InvalidSubsampling(format!(
                    "weight table has {} entries, expected N = {}",
                    chi.len(),
                    levels.len() - 1
                )));
            }
            if chi.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
                return Err(Error::InvalidSubsampling("weights must be positive".into()));
            }
        }
        Ok(Self { levels, weight })
    }

    /// `ℓ(n) = round(ℓ₀ hⁿ)` for `n = 1..=N+1`.
    pub fn geometric(l0: f64, h: f64, n: usize, weight: Weight) -> Result<Self> {
        if !(l0 > 0.0 && h > 1.0 && l0.is_finite() && h.is_finite()) {
            return Err(Error::InvalidSubsampling(format!(
                "geometric schedule needs l0 > 0 and h > 1 (got l0 = {l0}, h = {h})"
            )));
        }
        let top = l0 * h.powi(n as i32 + 1);
        if !(top.is_finite() && top <= MAX_COEFFICIENTS as f64) {
            return Err(Error::InvalidSubsampling(format!(
                "largest level {top:e} exceeds {MAX_COEFFICIENTS}"
            )));
        }
        let levels = (1..=n as i32 + 1).map(|i| (l0 * h.powi(i)).round() as usize).collect();
        Self::new(levels, weight)
    }

    /// Number of selectable levels N.
    pub fn n(&self) -> usize {
        self.levels.len() - 1
    }

    /// ℓ(n) for n = 1..=N+1.
    pub fn level(&self, n: usize) -> Result<usize> {
        if n == 0 || n > self.levels.len() {
            return Err(Error::OutOfRange {
                index: n,
                max: self.levels.len(),
            });
        }
        Ok(self.levels[n - 1])
    }

    /// All levels ℓ(1..=N+1), 0-based.
    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    /// χ(1..=N) evaluated against the variance profile.
    pub fn weights(&self, profiles: &Profiles) -> Vec<f64> {
        let n = self.n();
        match &self.weight {
            Weight::Unit => vec![1.0; n],
            Weight::InverseSqrtS => profiles.s[..n].iter().map(|s| s.powf(-0.5)).collect(),
            Weight::Table(chi) => chi.clone(),
        }
    }

    pub fn check_against(&self, problem: &SpectralProblem) -> Result<()> {
        let top = *self.levels.last().expect("non-empty");
        if top > problem.k_max() {
            return Err(Error::InvalidSubsampling(format!(
                "top level l(N+1) = {top} exceeds K_max = {}",
                problem.k_max()
            )));
        }
        Ok(())
    }
}

/// Variance and squared-bias profiles, one entry per level `1..=N+1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Profiles {
    pub s: Vec<f64>,
    pub b: Vec<f64>,
}

impl Profiles {
    pub fn compute(problem: &SpectralProblem, sub: &Subsampling) -> Result<Self> {
        let s = variance_profile(problem, sub)?;
        let b = bias_profile(problem, sub)?;
        let profiles = Self { s, b };
        if !problem.tail_is_resolved(&profiles) {
            log::warn!(
                "K_max = {} leaves gamma(K_max)^2 above {TAIL_TOLERANCE:e} * b(N); the truncated tail may bias b(n)",
                problem.k_max()
            );
        }
        Ok(profiles)
    }

    /// Number of levels stored (N+1).
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    /// s(n) + b(n) for n = 1..=N, i.e. the squared Bayes risk R₂².
    pub fn risk_sq(&self, n_levels: usize) -> Vec<f64> {
        self.s[..n_levels].iter().zip(&self.b).map(|(s, b)| s + b).collect()
    }
}

/// s(n) = Σ_{k ≤ ℓ(n)} σ(k)² for each level.
pub fn variance_profile(problem: &SpectralProblem, sub: &Subsampling) -> Result<Vec<f64>> {
    sub.check_against(problem)?;
    let s = block_sums(problem.noise_variances(), sub.levels(), |v| v);
    debug_assert!(s.windows(2).all(|w| w[1] > w[0]));
    Ok(s)
}

/// b(n) = Σ_{ℓ(n) < k ≤ K_max} γ(k)² for each level.
pub fn bias_profile(problem: &SpectralProblem, sub: &Subsampling) -> Result<Vec<f64>> {
    sub.check_against(problem)?;
    let g = problem.prior_scales();
    // Suffix sums avoid the cancellation in total - head.
    let mut suffix = vec![0.0; g.len() + 1];
    for k in (0..g.len()).rev() {
        suffix[k] = suffix[k + 1] + g[k] * g[k];
    }
    let b: Vec<f64> = sub.levels().iter().map(|&level| suffix[level]).collect();
    debug_assert!(b.windows(2).all(|w| w[1] <= w[0]));
    Ok(b)
}

fn block_sums(values: &[f64], levels: &[usize], f: impl Fn(f64) -> f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(levels.len());
    let mut acc = 0.0;
    let mut k = 0;
    for &level in levels {
        while k < level {
            acc += f(values[k]);
            k += 1;
        }
        out.push(acc);
    }
    out
}

/// Which replication stream produced a draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamSeed {
    pub master: u64,
    pub index: u64,
}

/// One realization of truth `x` and observation `x̃`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationDraw {
    pub truth: Vec<f64>,
    pub observed: Vec<f64>,
    pub seed: Option<StreamSeed>,
}

impl SimulationDraw {
    /// A hand-built draw, mostly for tests.
    pub fn from_parts(truth: Vec<f64>, observed: Vec<f64>) -> Result<Self> {
        if truth.len() != observed.len() {
            return Err(Error::InvalidProblem("truth and observation lengths differ".into()));
        }
        Ok(Self {
            truth,
            observed,
            seed: None,
        })
    }

    pub fn k_max(&self) -> usize {
        self.truth.len()
    }
}

/// Draws `x_k ~ N(0, γ(k)²)` and `x̃_k = x_k + σ(k) ξ_k` from `rng`.
pub fn draw_with<R: Rng + ?Sized>(problem: &SpectralProblem, rng: &mut R) -> SimulationDraw {
    let k_max = problem.k_max();
    let mut truth = Vec::with_capacity(k_max);
    let mut observed = Vec::with_capacity(k_max);
    for (g, v) in problem.prior_scales().iter().zip(problem.noise_variances()) {
        let zeta: f64 = rng.sample(StandardNormal);
        let xi: f64 = rng.sample(StandardNormal);
        let x = g * zeta;
        truth.push(x);
        observed.push(x + v.sqrt() * xi);
    }
    SimulationDraw {
        truth,
        observed,
        seed: None,
    }
}

/// Draw for replication `index` of `master` (see [`crate::rng`]).
pub fn draw_instance(problem: &SpectralProblem, master: u64, index: u64) -> SimulationDraw {
    let mut stream = rng::stream(master, index);
    let mut draw = draw_with(problem, &mut stream);
    draw.seed = Some(StreamSeed { master, index });
    draw
}

/// The cut-off estimator `x̂^{(n)}` as a full coefficient vector.
pub fn cutoff_estimate(draw: &SimulationDraw, level: usize) -> Vec<f64> {
    let level = level.min(draw.k_max());
    let mut est = vec![0.0; draw.k_max()];
    est[..level].copy_from_slice(&draw.observed[..level]);
    est
}

/// Prefix sums `P[j] = Σ_{k ≤ j} f(k)`, with `P[0] = 0`.
pub(crate) fn prefix_sums(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut out = vec![0.0];
    let mut acc = 0.0;
    for v in values {
        acc += v;
        out.push(acc);
    }
    out
}

/// D(n) = χ(n) Σ_{ℓ(n) < k ≤ ℓ(n+1)} x̃_k² for n = 1..=N.
pub fn criterion_path(draw: &SimulationDraw, sub: &Subsampling, weights: &[f64]) -> Result<Vec<f64>> {
    let levels = sub.levels();
    if *levels.last().expect("non-empty") > draw.k_max() {
        return Err(Error::InvalidSubsampling("draw shorter than l(N+1)".into()));
    }
    if weights.len() != sub.n() {
        return Err(Error::InvalidSubsampling(format!(
            "{} weights for N = {}",
            weights.len(),
            sub.n()
        )));
    }
    // Direct block sums; differencing prefix sums loses the small blocks.
    Ok(levels
        .windows(2)
        .zip(weights)
        .map(|(w, chi)| chi * draw.observed[w[0]..w[1]].iter().map(|x| x * x).sum::<f64>())
        .collect())
}

/// e(n) = ‖x̂^{(n)} − x‖² for n = 1..=N, with the tail truncated at K_max.
pub fn true_error_path(draw: &SimulationDraw, sub: &Subsampling) -> Result<Vec<f64>> {
    let k_max = draw.k_max();
    if *sub.levels().last().expect("non-empty") > k_max {
        return Err(Error::InvalidSubsampling("draw shorter than l(N+1)".into()));
    }
    let noise = prefix_sums(draw.observed.iter().zip(&draw.truth).map(|(o, x)| (o - x).powi(2)));
    let mut tail = vec![0.0; k_max + 1];
    for k in (0..k_max).rev() {
        tail[k] = tail[k + 1] + draw.truth[k] * draw.truth[k];
    }
    Ok(sub.levels()[..sub.n()].iter().map(|&l| noise[l] + tail[l]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn problem_from_sigma(sigma: &[f64], gamma: &[f64]) -> SpectralProblem {
        SpectralProblem::new(vec![1.0; sigma.len()], sigma.to_vec(), gamma.to_vec()).unwrap()
    }

    #[test]
    fn noise_to_signal_examples() {
        let p = SpectralProblem::new(vec![0.5; 4], vec![0.5; 4], vec![1.0; 4]).unwrap();
        assert_eq!(p.noise_to_signal(2).unwrap(), 1.0);

        let p = SpectralProblem::new(vec![1.0, 0.8, 0.5], vec![0.1, 0.1, 0.02], vec![0.0; 3]).unwrap();
        assert_relative_eq!(p.noise_to_signal(3).unwrap(), 0.04, max_relative = 1e-15);

        let p = SpectralProblem::power_law(1e-3, 1.5, 1.0, 64).unwrap();
        for k in [1usize, 7, 64] {
            assert_relative_eq!(
                p.noise_to_signal(k).unwrap(),
                1e-3 * (k as f64).powf(1.5),
                max_relative = 1e-12
            );
        }
        assert!(matches!(p.noise_to_signal(0), Err(Error::OutOfRange { .. })));
        assert!(matches!(p.noise_to_signal(65), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn rejects_bad_problems() {
        assert!(SpectralProblem::new(vec![1.0, 2.0], vec![1.0; 2], vec![1.0; 2]).is_err());
        assert!(SpectralProblem::new(vec![1.0, 0.5], vec![1.0, 0.0], vec![1.0; 2]).is_err());
        assert!(SpectralProblem::new(vec![1.0, 0.5], vec![1.0; 2], vec![1.0, -1.0]).is_err());
        assert!(SpectralProblem::new(vec![1.0], vec![1.0; 2], vec![1.0]).is_err());
        assert!(SpectralProblem::new(vec![], vec![], vec![]).is_err());
    }

    #[test]
    fn rejects_bad_subsampling() {
        assert!(Subsampling::new(vec![1, 1], Weight::Unit).is_err());
        assert!(Subsampling::new(vec![3, 2], Weight::Unit).is_err());
        assert!(Subsampling::new(vec![0, 2], Weight::Unit).is_err());
        assert!(Subsampling::new(vec![1], Weight::Unit).is_err());
        assert!(Subsampling::new(vec![1, 2, 3], Weight::Table(vec![1.0])).is_err());
        assert!(Subsampling::new(vec![1, 2, 3], Weight::Table(vec![1.0, 0.0])).is_err());
        let p = SpectralProblem::power_law(1.0, 1.0, 1.0, 4).unwrap();
        let sub = Subsampling::new(vec![2, 5], Weight::Unit).unwrap();
        assert!(variance_profile(&p, &sub).is_err());
    }

    #[test]
    fn variance_profile_examples() {
        let p = problem_from_sigma(&[1.0; 6], &[0.0; 6]);
        let sub = Subsampling::new((1..=6).collect(), Weight::Unit).unwrap();
        assert_eq!(variance_profile(&p, &sub).unwrap(), vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);

        let p = problem_from_sigma(&[1.0, 2.0, 3.0], &[0.0; 3]);
        let sub = Subsampling::new(vec![1, 3], Weight::Unit).unwrap();
        assert_eq!(variance_profile(&p, &sub).unwrap(), vec![1.0, 14.0]);
    }

    #[test]
    fn bias_profile_examples() {
        let p = problem_from_sigma(&[1.0; 4], &[1.0, 0.5, 0.25, 0.125]);
        let sub = Subsampling::new(vec![1, 2], Weight::Unit).unwrap();
        let b = bias_profile(&p, &sub).unwrap();
        assert_relative_eq!(b[0], 0.25 + 1.0 / 16.0 + 1.0 / 64.0, max_relative = 1e-15);
        assert_relative_eq!(b[1], 1.0 / 16.0 + 1.0 / 64.0, max_relative = 1e-15);

        let p = problem_from_sigma(&[1.0; 5], &[1.0, 2.0, 0.0, 0.0, 0.0]);
        let sub = Subsampling::new(vec![2, 3, 4], Weight::Unit).unwrap();
        assert!(bias_profile(&p, &sub).unwrap().iter().all(|&b| b == 0.0));
    }

    #[test]
    fn geometric_levels() {
        let sub = Subsampling::geometric(2.0, 2.0, 3, Weight::Unit).unwrap();
        assert_eq!(sub.levels(), &[4, 8, 16, 32]);
        assert_eq!(sub.n(), 3);
        assert!(Subsampling::geometric(2.0, 1.0, 3, Weight::Unit).is_err());
        assert!(Subsampling::geometric(2.0, 2.0, 200, Weight::Unit).is_err());
        // rounding that collapses two levels is caught
        assert!(Subsampling::geometric(1.0, 1.1, 3, Weight::Unit).is_err());
    }

    #[test]
    fn criterion_path_examples() {
        let draw = SimulationDraw::from_parts(vec![0.0; 4], vec![3.0, 1.0, 0.5, 2.0]).unwrap();
        let sub = Subsampling::new(vec![1, 2, 3, 4], Weight::Unit).unwrap();
        let d = criterion_path(&draw, &sub, &[1.0; 3]).unwrap();
        assert_eq!(d, vec![1.0, 0.25, 4.0]);

        let draw = SimulationDraw::from_parts(vec![0.0; 4], vec![3.0, 0.0, 0.0, 2.0]).unwrap();
        let sub = Subsampling::new(vec![1, 3, 4], Weight::Unit).unwrap();
        assert_eq!(criterion_path(&draw, &sub, &[1.0; 2]).unwrap()[0], 0.0);
    }

    #[test]
    fn inverse_sqrt_weight_scales_unit_path() {
        let p = SpectralProblem::power_law(0.1, 1.0, 1.0, 64).unwrap();
        let unit = Subsampling::geometric(2.0, 2.0, 4, Weight::Unit).unwrap();
        let hbp = Subsampling::new(unit.levels().to_vec(), Weight::InverseSqrtS).unwrap();
        let prof = Profiles::compute(&p, &unit).unwrap();
        let draw = draw_instance(&p, 3, 0);
        let du = criterion_path(&draw, &unit, &unit.weights(&prof)).unwrap();
        let dh = criterion_path(&draw, &hbp, &hbp.weights(&prof)).unwrap();
        for n in 0..du.len() {
            assert_relative_eq!(dh[n], du[n] / prof.s[n].sqrt(), max_relative = 1e-14);
        }
    }

    #[test]
    fn criterion_agrees_with_full_estimators() {
        let p = SpectralProblem::power_law(0.05, 1.0, 1.0, 256).unwrap();
        let sub = Subsampling::geometric(2.0, 2.0, 6, Weight::Unit).unwrap();
        let draw = draw_instance(&p, 11, 5);
        let d = criterion_path(&draw, &sub, &[1.0; 6]).unwrap();
        for n in 1..=sub.n() {
            let a = cutoff_estimate(&draw, sub.level(n).unwrap());
            let b = cutoff_estimate(&draw, sub.level(n + 1).unwrap());
            let full: f64 = a.iter().zip(&b).map(|(a, b)| (b - a).powi(2)).sum();
            assert_relative_eq!(d[n - 1], full, max_relative = 1e-12);
        }
    }

    #[test]
    fn true_error_examples() {
        let x = vec![1.0, -2.0, 0.5, 3.0];
        let draw = SimulationDraw::from_parts(x.clone(), x.clone()).unwrap();
        let sub = Subsampling::new(vec![1, 2, 4], Weight::Unit).unwrap();
        let e = true_error_path(&draw, &sub).unwrap();
        assert_eq!(e, vec![4.0 + 0.25 + 9.0, 0.25 + 9.0]);

        let p = SpectralProblem::new(
            vec![1.0; 32],
            vec![1e-12; 32],
            (1..=32).map(|k| 1.0 / k as f64).collect(),
        )
        .unwrap();
        let sub = Subsampling::new(vec![4, 8, 16], Weight::Unit).unwrap();
        let draw = draw_instance(&p, 1, 1);
        let e = true_error_path(&draw, &sub).unwrap();
        for (n, &l) in sub.levels()[..2].iter().enumerate() {
            let tail: f64 = draw.truth[l..].iter().map(|x| x * x).sum();
            assert_relative_eq!(e[n], tail, max_relative = 1e-12);
        }
    }

    #[test]
    fn degenerate_prior_draw() {
        let p = SpectralProblem::new(vec![1.0; 8], vec![0.3; 8], vec![0.0; 8]).unwrap();
        let draw = draw_instance(&p, 9, 2);
        assert!(draw.truth.iter().all(|&x| x == 0.0));
        let mut stream = rng::stream(9, 2);
        for &o in &draw.observed {
            let _zeta: f64 = stream.sample(StandardNormal);
            let xi: f64 = stream.sample(StandardNormal);
            assert_eq!(o, 0.3 * xi);
        }
    }

    #[test]
    fn draws_are_deterministic() {
        let p = SpectralProblem::power_law(1e-2, 1.0, 1.0, 128).unwrap();
        assert_eq!(draw_instance(&p, 42, 7), draw_instance(&p, 42, 7));
        assert_ne!(draw_instance(&p, 42, 7).observed, draw_instance(&p, 42, 8).observed);
    }

    #[test]
    fn observed_variance_matches_prior_plus_noise() {
        let p = SpectralProblem::new(vec![1.0], vec![0.7], vec![1.3]).unwrap();
        let m = 100_000;
        let mut stream = rng::stream(2024, 0);
        let xs: Vec<f64> = (0..m).map(|_| draw_with(&p, &mut stream).observed[0]).collect();
        let var = xs.iter().map(|x| x * x).sum::<f64>() / m as f64;
        let target = 1.3f64.powi(2) + 0.7f64.powi(2);
        // Var of x^2 for a centered normal is 2 v^2.
        let se = (2.0f64).sqrt() * target / (m as f64).sqrt();
        assert!((var - target).abs() < 3.0 * se, "var {var} target {target} se {se}");
    }

    #[test]
    fn tail_rule() {
        let p = SpectralProblem::power_law(1e-3, 1.0, 1.0, 1 << 16).unwrap();
        let sub = Subsampling::geometric(2.0, 2.0, 10, Weight::Unit).unwrap();
        let prof = Profiles::compute(&p, &sub).unwrap();
        assert!(p.tail_is_resolved(&prof));
        let p = SpectralProblem::power_law(1e-3, 1.0, 1.0, 4096).unwrap();
        let prof = Profiles::compute(&p, &sub).unwrap();
        assert!(!p.tail_is_resolved(&prof));
    }
}
