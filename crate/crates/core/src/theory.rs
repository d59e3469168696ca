//! Theoretical quantities of the average-case analysis: assumption
//! constants, the selection-probability bound and its ingredients `r(n)`
//! and `ρ(n)`, the oracle constant `K_α`, the admissible moment order, and
//! chi-square tail bounds. Monte Carlo risk estimators live here too so the
//! bounds can be checked against simulation.

use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::model::{self, Profiles, SpectralProblem, Subsampling};

/// E[log |ζ|] for ζ ~ N(0,1), equal to −(γ_Euler + log 2)/2.
pub const EXPECTED_LOG_ABS_NORMAL: f64 = -0.635_181_422_730_739_1;

/// Extremal consecutive ratios of the profiles and the weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AssumptionConstants {
    pub c_s: f64,
    pub cap_c_s: f64,
    pub c_b: f64,
    pub cap_c_b: f64,
    pub c_chi: f64,
    pub cap_c_chi: f64,
    /// Geometric growth of s and decay of b (`c_s > 1`, `c_b > 1`).
    pub growth_decay_valid: bool,
    /// `1/c_b < c_χ ≤ C_χ < c_s`.
    pub weight_valid: bool,
}

impl AssumptionConstants {
    pub fn valid(&self) -> bool {
        self.growth_decay_valid && self.weight_valid
    }
}

fn ratio_range(values: &[f64], ascending: bool, what: &str) -> Result<(f64, f64)> {
    if values.len() < 2 {
        return Err(Error::Domain(format!("{what} needs at least two entries")));
    }
    if let Some(i) = values.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::Domain(format!(
            "{what}({}) = {} is not positive",
            i + 1,
            values[i]
        )));
    }
    let ratios = values
        .windows(2)
        .map(|w| if ascending { w[1] / w[0] } else { w[0] / w[1] });
    Ok(ratios.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r), hi.max(r))))
}

/// `c_s, C_s` from `s(n+1)/s(n)`, `c_b, C_b` from `b(n)/b(n+1)` and
/// `c_χ, C_χ` from `χ(n)/χ(n+1)`.
pub fn assumption_constants(s: &[f64], b: &[f64], chi: &[f64]) -> Result<AssumptionConstants> {
    let (c_s, cap_c_s) = ratio_range(s, true, "s")?;
    let (c_b, cap_c_b) = ratio_range(b, false, "b")?;
    let (c_chi, cap_c_chi) = ratio_range(chi, false, "chi")?;
    let growth_decay_valid = c_s > 1.0 && c_b > 1.0;
    Ok(AssumptionConstants {
        c_s,
        cap_c_s,
        c_b,
        cap_c_b,
        c_chi,
        cap_c_chi,
        growth_decay_valid,
        weight_valid: growth_decay_valid && 1.0 / c_b < c_chi && cap_c_chi < c_s,
    })
}

/// `r(n) = |χ(n)((s(n+1)−s(n)) + (b(n)−b(n+1)))| / max_{ℓ(n)<k≤ℓ(n+1)} (σ(k)² + γ(k)²)`
/// for `n = 1..=N`.
pub fn r_profile(problem: &SpectralProblem, sub: &Subsampling, profiles: &Profiles, chi: &[f64]) -> Result<Vec<f64>> {
    let sigma2 = problem.noise_variances();
    let gamma = problem.prior_scales();
    let levels = sub.levels();
    (0..sub.n())
        .map(|i| {
            let (lo, hi) = (levels[i], levels[i + 1]);
            if hi <= lo {
                return Err(Error::Domain(format!("empty block at n = {}", i + 1)));
            }
            let block_max = (lo..hi).map(|k| sigma2[k] + gamma[k] * gamma[k]).fold(0.0, f64::max);
            let mass = (profiles.s[i + 1] - profiles.s[i]) + (profiles.b[i] - profiles.b[i + 1]);
            let r = (chi[i] * mass).abs() / block_max;
            Ok(r)
        })
        .collect()
}

/// ρ(n) for level `n` around the balance index `n_sharp`.
pub fn rho(constants: &AssumptionConstants, n: usize, n_sharp: usize) -> Result<f64> {
    if !constants.valid() {
        return Err(Error::Domain("assumption constants are not valid".into()));
    }
    let c = constants;
    let lead = c.cap_c_b * c.cap_c_s - 1.0;
    let dist = (n as f64 - n_sharp as f64).abs();
    Ok(if n >= n_sharp {
        lead / (c.c_s - 1.0) * (c.c_s / c.cap_c_chi).powf(-dist)
    } else {
        lead / (c.c_b - 1.0) * (c.c_b * c.c_chi).powf(-dist)
    })
}

/// Upper bound on `P(n* = n)` and whether it is informative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbabilityBound {
    /// The bound capped at 1.
    pub value: f64,
    /// The uncapped formula; `+∞` when `ρ ≥ 1`.
    pub raw: f64,
    pub vacuous: bool,
}

/// `(√2 + (2e·r)^{r/2}) · (ρ log ρ⁻¹)^{r/2}`.
pub fn selection_prob_bound(r: f64, rho: f64) -> ProbabilityBound {
    let raw = if rho >= 1.0 {
        f64::INFINITY
    } else if rho <= 0.0 {
        0.0
    } else {
        let half = r / 2.0;
        // evaluate in logs; (2er)^{r/2} overflows long before the product does
        let tail = half * (rho * (1.0 / rho).ln()).ln();
        let lead = half * (2.0 * std::f64::consts::E * r).ln();
        (tail.exp() * std::f64::consts::SQRT_2) + (lead + tail).exp()
    };
    ProbabilityBound {
        value: raw.min(1.0),
        raw,
        vacuous: !(raw < 1.0),
    }
}

pub fn expected_log_abs_normal() -> f64 {
    EXPECTED_LOG_ABS_NORMAL
}

/// Upper moment factor `(4 Γ(α/2 + 1))^{1/α}`.
pub fn moment_factor(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("alpha = {alpha} must be positive")));
    }
    Ok((4.0 * gamma(alpha / 2.0 + 1.0)).powf(1.0 / alpha))
}

/// `K_α = √(2 C_b) (4Γ(α/2+1))^{1/α} e^{−E log|ζ|}`.
pub fn k_alpha(alpha: f64, cap_c_b: f64) -> Result<f64> {
    if !(cap_c_b > 1.0) {
        return Err(Error::Domain(format!("C_b = {cap_c_b} must exceed 1")));
    }
    Ok((2.0 * cap_c_b).sqrt() * moment_factor(alpha)? * (-EXPECTED_LOG_ABS_NORMAL).exp())
}

/// Supremum of admissible moment orders,
/// `r · min(log(c_b c_χ)/log C_b, log(c_s/C_χ)/log C_s)`.
pub fn alpha_admissible(r: f64, c: &AssumptionConstants) -> f64 {
    let left = (c.c_b * c.c_chi).ln() / c.cap_c_b.ln();
    let right = (c.c_s / c.cap_c_chi).ln() / c.cap_c_s.ln();
    r * left.min(right)
}

/// `P(Z ≤ z) ≤ exp((1 − z + log z) / (2 w_max))` for `z ∈ (0,1)`.
pub fn chi2_lower_tail_bound(z: f64, w_max: f64) -> Result<f64> {
    if !(z > 0.0 && z < 1.0) {
        return Err(Error::Domain(format!("lower tail needs z in (0,1), got {z}")));
    }
    if !(w_max > 0.0 && w_max <= 1.0) {
        return Err(Error::Domain(format!("w_max must lie in (0,1], got {w_max}")));
    }
    Ok(((1.0 - z + z.ln()) / (2.0 * w_max)).exp())
}

/// `P(Z ≥ z) ≤ √2 e^{−z/4}` for `z ≥ 0`.
pub fn chi2_upper_tail_bound(z: f64) -> Result<f64> {
    if !(z >= 0.0) {
        return Err(Error::Domain(format!("upper tail needs z >= 0, got {z}")));
    }
    Ok(std::f64::consts::SQRT_2 * (-z / 4.0).exp())
}

/// R₂(x̂^{(n)}) = √(s(n) + b(n)), `n` 1-based.
pub fn risk_r2(s: &[f64], b: &[f64], n: usize) -> Result<f64> {
    if n == 0 || n > s.len().min(b.len()) {
        return Err(Error::OutOfRange {
            index: n,
            max: s.len().min(b.len()),
        });
    }
    Ok((s[n - 1] + b[n - 1]).sqrt())
}

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

/// `R_α` from a sample of squared errors: `(mean ‖·‖^α)^{1/α}` with a
/// delta-method standard error.
pub fn r_alpha_from_squared_errors(errors_sq: &[f64], alpha: f64) -> Estimate {
    let m = errors_sq.len() as f64;
    let powers: Vec<f64> = errors_sq.iter().map(|e| e.powf(alpha / 2.0)).collect();
    let mean = powers.iter().sum::<f64>() / m;
    let var = if errors_sq.len() > 1 {
        powers.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (m - 1.0)
    } else {
        0.0
    };
    let value = mean.powf(1.0 / alpha);
    let std_error = value / (alpha * mean) * (var / m).sqrt();
    Estimate { value, std_error }
}

/// Squared errors `e(n)` for `replications` fresh draws from `master`,
/// indexed `[replication][n − 1]`.
pub fn mc_error_paths(
    problem: &SpectralProblem,
    sub: &Subsampling,
    replications: usize,
    master: u64,
) -> Result<Vec<Vec<f64>>> {
    (0..replications as u64)
        .into_par_iter()
        .map(|i| model::true_error_path(&model::draw_instance(problem, master, i), sub))
        .collect()
}

/// Monte Carlo `R_α(x̂^{(n)})` over `replications` draws.
pub fn risk_r_alpha_mc(
    problem: &SpectralProblem,
    sub: &Subsampling,
    n: usize,
    alpha: f64,
    replications: usize,
    master: u64,
) -> Result<Estimate> {
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("alpha = {alpha} must be positive")));
    }
    if replications == 0 {
        return Err(Error::Domain("need at least one replication".into()));
    }
    if n == 0 || n > sub.n() {
        return Err(Error::OutOfRange { index: n, max: sub.n() });
    }
    let paths = mc_error_paths(problem, sub, replications, master)?;
    let column: Vec<f64> = paths.iter().map(|p| p[n - 1]).collect();
    Ok(r_alpha_from_squared_errors(&column, alpha))
}

/// Per-level row of a theory report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoryRow {
    pub n: usize,
    pub s: f64,
    pub b: f64,
    pub r: f64,
    pub rho: Option<f64>,
    pub bound: Option<ProbabilityBound>,
}

/// Everything the theory report emits for one problem.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoryReport {
    pub constants: AssumptionConstants,
    pub n_sharp: Option<usize>,
    pub r_min: f64,
    pub alpha_admissible: f64,
    pub k_alpha_2: Option<f64>,
    pub rows: Vec<TheoryRow>,
}

pub fn theory_report(problem: &SpectralProblem, sub: &Subsampling) -> Result<TheoryReport> {
    let profiles = Profiles::compute(problem, sub)?;
    let n = sub.n();
    let chi = sub.weights(&profiles);
    let constants = assumption_constants(&profiles.s, &profiles.b[..n], &chi)?;
    let r = r_profile(problem, sub, &profiles, &chi)?;
    let n_sharp = crate::selection::balance_index(&profiles.s[..n], &profiles.b[..n]).ok();
    let r_min = r.iter().copied().fold(f64::INFINITY, f64::min);
    let rows = (1..=n)
        .map(|i| {
            let rho = match n_sharp {
                Some(ns) if constants.valid() => rho(&constants, i, ns).ok(),
                _ => None,
            };
            TheoryRow {
                n: i,
                s: profiles.s[i - 1],
                b: profiles.b[i - 1],
                r: r[i - 1],
                rho,
                bound: rho.map(|p| selection_prob_bound(r[i - 1], p)),
            }
        })
        .collect();
    Ok(TheoryReport {
        constants,
        n_sharp,
        r_min,
        alpha_admissible: alpha_admissible(r_min, &constants),
        k_alpha_2: k_alpha(2.0, constants.cap_c_b).ok(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Weight;
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand_distr::StandardNormal;
    use statrs::distribution::{ContinuousCDF, Normal};

    fn geometric(base: f64, n: usize) -> Vec<f64> {
        (1..=n).map(|i| base.powi(i as i32)).collect()
    }

    #[test]
    fn constants_exact_geometric() {
        let c = assumption_constants(&geometric(2.0, 6), &geometric(0.5, 6), &[1.0; 6]).unwrap();
        assert_relative_eq!(c.c_s, 2.0);
        assert_relative_eq!(c.cap_c_s, 2.0);
        assert_relative_eq!(c.c_b, 2.0);
        assert_relative_eq!(c.cap_c_b, 2.0);
        assert!(c.valid());
    }

    #[test]
    fn constants_by_enumeration() {
        let c = assumption_constants(&[1.0, 1.5, 3.0], &[4.0, 2.0, 1.0], &[1.0; 3]).unwrap();
        assert_relative_eq!(c.c_s, 1.5);
        assert_relative_eq!(c.cap_c_s, 2.0);
        assert_relative_eq!(c.c_b, 2.0);
        assert_relative_eq!(c.cap_c_b, 2.0);
        assert!(assumption_constants(&[1.0, 0.0], &[2.0, 1.0], &[1.0, 1.0]).is_err());
        assert!(assumption_constants(&[1.0], &[2.0, 1.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn inverse_sqrt_weight_constants() {
        let s = geometric(2.0, 8);
        let chi: Vec<f64> = s.iter().map(|s| s.powf(-0.5)).collect();
        let c = assumption_constants(&s, &geometric(0.5, 8), &chi).unwrap();
        assert_relative_eq!(c.c_chi, 2f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(c.cap_c_chi, 2f64.sqrt(), max_relative = 1e-14);
        assert!(c.weight_valid);
    }

    #[test]
    fn r_profile_hand_oracle() {
        let p = SpectralProblem::new(vec![1.0; 3], vec![1.0; 3], vec![0.0; 3]).unwrap();
        let sub = Subsampling::new(vec![1, 3], Weight::Unit).unwrap();
        let prof = Profiles::compute(&p, &sub).unwrap();
        let r = r_profile(&p, &sub, &prof, &[1.0]).unwrap();
        assert_relative_eq!(r[0], 2.0);

        // single-term block whose variance equals the increment
        let p = SpectralProblem::new(vec![1.0; 2], vec![1.0, 3.0], vec![0.0; 2]).unwrap();
        let sub = Subsampling::new(vec![1, 2], Weight::Unit).unwrap();
        let prof = Profiles::compute(&p, &sub).unwrap();
        assert_relative_eq!(r_profile(&p, &sub, &prof, &[1.0]).unwrap()[0], 1.0);
    }

    #[test]
    fn r_at_first_level_sits_between_the_two_approximations() {
        // l(0) = 4, h = 2, nu = mu = 1, delta = 1e-2.
        let p = SpectralProblem::power_law(1e-2, 1.0, 1.0, 1 << 16).unwrap();
        let sub = Subsampling::geometric(4.0, 2.0, 4, Weight::Unit).unwrap();
        let prof = Profiles::compute(&p, &sub).unwrap();
        let r = r_profile(&p, &sub, &prof, &[1.0; 4]).unwrap();
        let gap = (sub.level(2).unwrap() - sub.level(1).unwrap()) as f64;
        // min-of-rates approximation gives l(0) = 4, the coarse one l(2) - l(1) = 8
        assert!(r[0] > 4.0 && r[0] < gap, "r(1) = {}", r[0]);
        assert!(r.iter().all(|&r| r >= 1.0));
    }

    #[test]
    fn rho_examples() {
        let c = assumption_constants(&geometric(2.0, 6), &geometric(0.5, 6), &[1.0; 6]).unwrap();
        assert_relative_eq!(rho(&c, 4, 4).unwrap(), 3.0);
        assert_relative_eq!(rho(&c, 7, 4).unwrap(), 0.375);
        let ratio = rho(&c, 6, 4).unwrap() / rho(&c, 5, 4).unwrap();
        assert_relative_eq!(ratio, 0.5, max_relative = 1e-14);
        let bad = AssumptionConstants { c_s: 0.9, ..c };
        assert!(rho(
            &AssumptionConstants {
                growth_decay_valid: false,
                ..bad
            },
            1,
            1
        )
        .is_err());
    }

    #[test]
    fn probability_bound_examples() {
        let b = selection_prob_bound(2.0, 0.01);
        let expect = (2f64.sqrt() + 4.0 * std::f64::consts::E) * (0.01 * 100f64.ln());
        assert_relative_eq!(b.raw, expect, max_relative = 1e-12);
        assert_relative_eq!(b.raw, 0.5658, max_relative = 1e-3);
        assert!(!b.vacuous);

        let b = selection_prob_bound(4.0, 0.5);
        let t = 0.5 * 2f64.ln();
        let expect = (2f64.sqrt() + (8.0 * std::f64::consts::E).powi(2)) * t * t;
        assert_relative_eq!(b.raw, expect, max_relative = 1e-12);
        assert!(b.vacuous);
        assert_eq!(b.value, 1.0);

        assert!(selection_prob_bound(3.0, 1e-12).raw < 1e-12);
        assert!(selection_prob_bound(3.0, 1.5).vacuous);
        let huge_r = selection_prob_bound(400.0, 1e-6);
        assert!(huge_r.raw.is_finite());
    }

    #[test]
    fn expected_log_abs_normal_constant() {
        let euler = 0.577_215_664_901_532_9_f64;
        assert_relative_eq!(
            EXPECTED_LOG_ABS_NORMAL,
            -(euler + 2f64.ln()) / 2.0,
            max_relative = 1e-15
        );
        assert!(expected_log_abs_normal() < 0.0);
        assert_relative_eq!((-EXPECTED_LOG_ABS_NORMAL).exp(), 1.8874, max_relative = 1e-4);
    }

    #[test]
    fn expected_log_abs_normal_monte_carlo() {
        let m = 10_000_000usize;
        let chunks = 16u64;
        let per = m / chunks as usize;
        let (sum, sum_sq) = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = crate::rng::stream(0xE1, c);
                (0..per).fold((0.0, 0.0), |(a, b), _| {
                    let z: f64 = rng.sample(StandardNormal);
                    let l = z.abs().ln();
                    (a + l, b + l * l)
                })
            })
            .reduce(|| (0.0, 0.0), |x, y| (x.0 + y.0, x.1 + y.1));
        let n = (per * chunks as usize) as f64;
        let mean = sum / n;
        let se = ((sum_sq / n - mean * mean) / n).sqrt();
        assert!((mean - EXPECTED_LOG_ABS_NORMAL).abs() < 3.0 * se, "mean {mean} se {se}");
    }

    #[test]
    fn gamma_accuracy() {
        let sqrt_pi = std::f64::consts::PI.sqrt();
        for (x, exact) in [
            (1.0, 1.0),
            (2.0, 1.0),
            (3.0, 2.0),
            (5.0, 24.0),
            (0.5, sqrt_pi),
            (1.5, sqrt_pi / 2.0),
            (2.5, 0.75 * sqrt_pi),
            (3.5, 1.875 * sqrt_pi),
        ] {
            assert_relative_eq!(gamma(x), exact, max_relative = 1e-10);
        }
    }

    #[test]
    fn k_alpha_examples() {
        let e = (-EXPECTED_LOG_ABS_NORMAL).exp();
        assert_relative_eq!(k_alpha(2.0, 2.0).unwrap(), 2.0 * e * 2.0, max_relative = 1e-12);
        assert_relative_eq!(moment_factor(4.0).unwrap(), 8f64.powf(0.25), max_relative = 1e-12);
        assert_relative_eq!(moment_factor(4.0).unwrap(), 1.6818, max_relative = 1e-4);
        assert!(k_alpha(2.0, 3.0).unwrap() > k_alpha(2.0, 2.0).unwrap());
        assert!(k_alpha(0.0, 2.0).is_err());
        assert!(k_alpha(-1.0, 2.0).is_err());
        assert!(k_alpha(2.0, 1.0).is_err());
    }

    #[test]
    fn alpha_admissible_examples() {
        let tight = assumption_constants(&geometric(2.0, 6), &geometric(0.5, 6), &[1.0; 6]).unwrap();
        assert_relative_eq!(alpha_admissible(2.0, &tight), 2.0, max_relative = 1e-14);
        // alpha = 2 is on the boundary, hence not admissible
        assert!(!(2.0 < alpha_admissible(2.0, &tight)));
        assert!(2.0 < alpha_admissible(2.01, &tight));

        let c = AssumptionConstants {
            c_s: 4.0,
            cap_c_s: 2.0,
            c_b: 2.0,
            cap_c_b: 2.0,
            c_chi: 1.0,
            cap_c_chi: 1.0,
            growth_decay_valid: true,
            weight_valid: true,
        };
        assert_relative_eq!(alpha_admissible(3.0, &c), 3.0, max_relative = 1e-14);
        let wide = AssumptionConstants { cap_c_b: 1e12, ..c };
        assert!(alpha_admissible(3.0, &wide) < 0.2);
    }

    #[test]
    fn chi2_bounds() {
        assert_relative_eq!(chi2_upper_tail_bound(0.0).unwrap(), 2f64.sqrt());
        assert!(chi2_upper_tail_bound(-1.0).is_err());
        assert_relative_eq!(
            chi2_lower_tail_bound(1.0 - 1e-9, 0.5).unwrap(),
            1.0,
            max_relative = 1e-9
        );
        assert!(chi2_lower_tail_bound(1.0, 0.5).is_err());
        assert!(chi2_lower_tail_bound(0.5, 0.0).is_err());
        assert!(chi2_lower_tail_bound(0.5, 1.5).is_err());

        let exact = 2.0 * Normal::standard().cdf(0.1f64.sqrt()) - 1.0;
        assert_relative_eq!(exact, 0.2482, max_relative = 1e-3);
        let bound = chi2_lower_tail_bound(0.1, 1.0).unwrap();
        assert_relative_eq!(bound, ((0.9 + 0.1f64.ln()) / 2.0).exp(), max_relative = 1e-15);
        assert!(exact <= bound);
    }

    #[test]
    fn r2_examples() {
        let p = SpectralProblem::new(vec![1.0; 8], vec![1.0; 8], vec![0.0; 8]).unwrap();
        let sub = Subsampling::new((1..=8).collect(), Weight::Unit).unwrap();
        let prof = Profiles::compute(&p, &sub).unwrap();
        for n in 1..=7 {
            assert_relative_eq!(risk_r2(&prof.s, &prof.b, n).unwrap(), (n as f64).sqrt());
        }
        assert!(risk_r2(&prof.s, &prof.b, 0).is_err());
    }

    #[test]
    fn r_alpha_mc_matches_r2_and_orders() {
        let p = SpectralProblem::power_law(1e-2, 1.0, 1.0, 512).unwrap();
        let sub = Subsampling::geometric(2.0, 2.0, 6, Weight::Unit).unwrap();
        let prof = Profiles::compute(&p, &sub).unwrap();
        let paths = mc_error_paths(&p, &sub, 10_000, 77).unwrap();
        for n in 1..=sub.n() {
            let col: Vec<f64> = paths.iter().map(|e| e[n - 1]).collect();
            let r2 = r_alpha_from_squared_errors(&col, 2.0);
            let exact = risk_r2(&prof.s, &prof.b, n).unwrap();
            assert!(
                (r2.value - exact).abs() < 3.0 * r2.std_error,
                "n {n}: {r2:?} vs {exact}"
            );
            let r1 = r_alpha_from_squared_errors(&col, 1.0);
            let r4 = r_alpha_from_squared_errors(&col, 4.0);
            assert!(r1.value <= r2.value && r2.value <= r4.value);
        }
        let direct = risk_r_alpha_mc(&p, &sub, 3, 2.0, 10_000, 77).unwrap();
        let col: Vec<f64> = paths.iter().map(|e| e[2]).collect();
        assert_eq!(direct, r_alpha_from_squared_errors(&col, 2.0));
        assert!(risk_r_alpha_mc(&p, &sub, 3, 0.0, 10, 1).is_err());
    }

    #[test]
    fn report_on_power_law() {
        let p = SpectralProblem::power_law(1e-3, 1.0, 1.0, 1 << 14).unwrap();
        let sub = Subsampling::geometric(2.0, 2.0, 10, Weight::Unit).unwrap();
        let rep = theory_report(&p, &sub).unwrap();
        assert!(rep.constants.valid());
        assert_eq!(rep.rows.len(), 10);
        assert!(rep.rows.iter().all(|r| r.r >= 1.0));
        assert!(rep.n_sharp.is_some());
        assert!(rep.alpha_admissible > 0.0);
    }
}
