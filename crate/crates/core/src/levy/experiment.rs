//! The calibration experiment: repeated synthetic data sets, cut-off
//! estimates on a frequency schedule, the three selection rules and their
//! efficiencies against the oracle cut-off.

use log::{debug, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::calibration::{
    backward_transform, cutoff_density_estimate, empirical_transform, l2_distance, price_curve, simulate_observations,
    true_density, Design, Pricer, DEFAULT_DECAY_TOLERANCE,
};
use super::grid::{GridSpec, SpectralGrid};
use super::merton::MertonModel;
use crate::error::{Error, Result};
use crate::rng::{derive_master, stream};
use crate::selection::{
    efficiency, lepski_statistic, oracle_index, select_hardened_balancing, select_lepski, select_quasi_optimality,
    Efficiencies, EfficiencyHistogram, LepskiDenominator, Method, SelectionReport, DEFAULT_KAPPA,
};

/// Relative Hermitian defect above which an empirical spectrum is rejected.
const HERMITIAN_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriceSource {
    #[default]
    ClosedForm,
    Spectral,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LevyConfig {
    pub model: MertonModel,
    pub design: Design,
    /// Relative observation noise level.
    pub noise_level: f64,
    pub grid: GridSpec,
    pub pricing: PriceSource,
    /// Only used with spectral pricing.
    pub decay_tolerance: f64,
    /// `U_n = cutoff_step · n`, `n = 1..=cutoff_count`.
    pub cutoff_step: f64,
    pub cutoff_count: usize,
    /// Cut-off indices dropped from every rule.
    pub excluded: Vec<usize>,
    /// Largest index the balancing rules may choose.
    pub admissible_max: usize,
    pub kappa: f64,
    pub lepski_denominator: LepskiDenominator,
    /// Number of independent data sets for the variance profile.
    pub calibration_sets: usize,
    /// Half-width of the spatial window for L² norms.
    pub error_window: f64,
}

impl Default for LevyConfig {
    fn default() -> Self {
        Self {
            model: MertonModel::default(),
            design: Design::default(),
            noise_level: 0.03,
            grid: GridSpec::default(),
            pricing: PriceSource::ClosedForm,
            decay_tolerance: DEFAULT_DECAY_TOLERANCE,
            cutoff_step: 0.8,
            cutoff_count: 60,
            excluded: vec![17, 27, 36, 44, 46, 48],
            admissible_max: 43,
            kappa: DEFAULT_KAPPA,
            lepski_denominator: LepskiDenominator::Variance,
            calibration_sets: 10,
            error_window: 8.0,
        }
    }
}

impl LevyConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        self.design.validate()?;
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.noise_level.is_finite() && self.noise_level >= 0.0) {
            return bad(format!("noise_level = {} must be finite and >= 0", self.noise_level));
        }
        if !(self.cutoff_step.is_finite() && self.cutoff_step > 0.0) {
            return bad(format!("cutoff_step = {} must be positive", self.cutoff_step));
        }
        if self.cutoff_count == 0 || self.cutoff_count > 100_000 {
            return bad(format!("cutoff_count = {} out of range 1..=100000", self.cutoff_count));
        }
        let top = self.cutoff_step * self.cutoff_count as f64;
        if !(top <= self.grid.v_max) {
            return bad(format!("largest cut-off {top} exceeds v_max = {}", self.grid.v_max));
        }
        if let Some(&n) = self.excluded.iter().find(|&&n| n == 0 || n > self.cutoff_count) {
            return bad(format!("excluded index {n} out of range 1..={}", self.cutoff_count));
        }
        if self.retained().len() < 2 {
            return bad("fewer than two retained cut-offs".into());
        }
        if self.admissible().is_empty() {
            return bad("no admissible cut-off for the balancing rules".into());
        }
        if !(self.kappa.is_finite() && self.kappa > 0.0) {
            return bad(format!("kappa = {} must be positive", self.kappa));
        }
        if self.calibration_sets < 2 || self.calibration_sets > 100_000 {
            return bad(format!(
                "calibration_sets = {} out of range 2..=100000",
                self.calibration_sets
            ));
        }
        if !(self.error_window.is_finite() && self.error_window > 0.0) {
            return bad(format!("error_window = {} must be positive", self.error_window));
        }
        if !(self.decay_tolerance > 0.0) {
            return bad(format!("decay_tolerance = {} must be positive", self.decay_tolerance));
        }
        Ok(())
    }

    pub fn cutoffs(&self) -> Vec<f64> {
        (1..=self.cutoff_count).map(|n| self.cutoff_step * n as f64).collect()
    }

    /// Cut-off indices with the exclusion list removed.
    pub fn retained(&self) -> Vec<usize> {
        (1..=self.cutoff_count).filter(|n| !self.excluded.contains(n)).collect()
    }

    /// Retained indices up to `admissible_max`.
    pub fn admissible(&self) -> Vec<usize> {
        self.retained()
            .into_iter()
            .filter(|&n| n <= self.admissible_max)
            .collect()
    }
}

/// Estimated variance profile `ŝ(n)` over all cut-offs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceProfile {
    pub values: Vec<f64>,
    /// Indices `n` with `ŝ(n) < ŝ(n − 1)`.
    pub monotone_violations: Vec<usize>,
    pub sets_used: usize,
    pub sets_failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevyReplication {
    pub index: usize,
    pub report: Option<SelectionReport>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevyOutcome {
    pub variance_profile: VarianceProfile,
    pub replications: Vec<LevyReplication>,
}

impl LevyOutcome {
    pub fn reports(&self) -> impl Iterator<Item = &SelectionReport> {
        self.replications.iter().filter_map(|r| r.report.as_ref())
    }

    pub fn failures(&self) -> usize {
        self.replications.iter().filter(|r| r.report.is_none()).count()
    }

    pub fn failure_rate(&self) -> f64 {
        if self.replications.is_empty() {
            0.0
        } else {
            self.failures() as f64 / self.replications.len() as f64
        }
    }

    pub fn efficiencies(&self, method: Method) -> Vec<f64> {
        self.reports().map(|r| r.efficiency.get(method)).collect()
    }

    pub fn histogram(&self, method: Method) -> Result<EfficiencyHistogram> {
        crate::selection::bin_efficiencies(&self.efficiencies(method))
    }

    /// Median efficiency; `None` without successful replications.
    pub fn median_efficiency(&self, method: Method) -> Option<f64> {
        let mut v = self.efficiencies(method);
        if v.is_empty() {
            return None;
        }
        v.sort_by(f64::total_cmp);
        let k = v.len();
        Some(if k % 2 == 1 {
            v[k / 2]
        } else {
            0.5 * (v[k / 2 - 1] + v[k / 2])
        })
    }
}

/// A configured experiment with its grid, pricer and true density.
#[derive(Debug, Clone)]
pub struct LevyExperiment {
    config: LevyConfig,
    grid: SpectralGrid,
    pricer: Pricer,
    truth: Vec<f64>,
    cutoffs: Vec<f64>,
    retained: Vec<usize>,
    admissible: Vec<usize>,
}

impl LevyExperiment {
    pub fn new(config: LevyConfig) -> Result<Self> {
        config.validate()?;
        let grid = SpectralGrid::new(config.grid)?;
        let pricer = match config.pricing {
            PriceSource::ClosedForm => Pricer::ClosedForm(config.model),
            PriceSource::Spectral => Pricer::Spectral(price_curve(&config.model, &grid, config.decay_tolerance)?),
        };
        let truth = true_density(&config.model, &grid)[grid.window(config.error_window)].to_vec();
        Ok(Self {
            cutoffs: config.cutoffs(),
            retained: config.retained(),
            admissible: config.admissible(),
            config,
            grid,
            pricer,
            truth,
        })
    }

    pub fn config(&self) -> &LevyConfig {
        &self.config
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn pricer(&self) -> &Pricer {
        &self.pricer
    }

    /// `μ` on the error window.
    pub fn truth(&self) -> &[f64] {
        &self.truth
    }

    /// Cut-off estimates `μ̂_{U_n}` on the error window for every `n`,
    /// from one synthetic data set drawn from stream `index` of `master`.
    pub fn estimates(&self, master: u64, index: u64) -> Result<Vec<Vec<f64>>> {
        let mut rng = stream(master, index);
        let obs = simulate_observations(&self.pricer, &self.config.design, self.config.noise_level, &mut rng)?;
        let fo = empirical_transform(&obs, &self.grid)?;
        let scale = fo.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let defect = self.grid.hermitian_defect(&fo);
        if defect > HERMITIAN_TOLERANCE * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::Numerical(format!(
                "empirical spectrum not Hermitian: defect {defect:.3e}"
            )));
        }
        let fmu = backward_transform(&fo, &self.config.model, &self.grid)?;
        let window = self.grid.window(self.config.error_window);
        self.cutoffs
            .iter()
            .map(|&u| Ok(cutoff_density_estimate(&fmu, u, &self.grid)?.values[window.clone()].to_vec()))
            .collect()
    }

    fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        l2_distance(a, b, self.grid.dx())
    }

    /// `ŝ(n) = (J − 1)⁻¹ Σ_j ‖μ̂^{(j)}_{U_n} − mean_j μ̂^{(j)}_{U_n}‖²`.
    pub fn estimate_variance_profile(&self, master: u64) -> Result<VarianceProfile> {
        let j = self.config.calibration_sets;
        let runs: Vec<Result<Vec<Vec<f64>>>> = (0..j as u64)
            .into_par_iter()
            .map(|i| self.estimates(master, i))
            .collect();
        let mut sets = Vec::with_capacity(j);
        let mut failed = 0;
        for (i, r) in runs.into_iter().enumerate() {
            match r {
                Ok(e) => sets.push(e),
                Err(e) => {
                    warn!("calibration set {i} failed: {e}");
                    failed += 1;
                }
            }
        }
        if sets.len() < 2 {
            return Err(Error::Numerical(format!(
                "only {} of {j} calibration sets succeeded",
                sets.len()
            )));
        }
        let used = sets.len() as f64;
        let width = sets[0][0].len();
        let values: Vec<f64> = (0..self.cutoffs.len())
            .map(|n| {
                let mean: Vec<f64> = (0..width)
                    .map(|x| sets.iter().map(|s| s[n][x]).sum::<f64>() / used)
                    .collect();
                sets.iter().map(|s| self.distance(&s[n], &mean).powi(2)).sum::<f64>() / (used - 1.0)
            })
            .collect();
        let monotone_violations: Vec<usize> = (1..values.len())
            .filter(|&i| values[i] < values[i - 1])
            .map(|i| i + 1)
            .collect();
        debug!("variance profile {values:?}");
        Ok(VarianceProfile {
            values,
            monotone_violations,
            sets_used: sets.len(),
            sets_failed: failed,
        })
    }

    /// One replication against a fixed variance profile.
    pub fn replicate(&self, s_hat: &[f64], master: u64, index: u64) -> Result<SelectionReport> {
        let est = self.estimates(master, index)?;
        let at = |n: usize| est[n - 1].as_slice();

        let criterion: Vec<f64> = self
            .retained
            .windows(2)
            .map(|w| self.distance(at(w[1]), at(w[0])))
            .collect();
        let n_qo = self.retained[select_quasi_optimality(&criterion)? - 1];

        let f = lepski_statistic(
            &self.admissible,
            &self.retained,
            s_hat,
            self.config.lepski_denominator,
            |n, m| self.distance(at(n), at(m)),
        );
        let n_lepski = self.admissible[select_lepski(&f, self.config.kappa) - 1];
        let s_adm: Vec<f64> = self.admissible.iter().map(|&n| s_hat[n - 1]).collect();
        let n_hbp = self.admissible[select_hardened_balancing(&f, &s_adm)? - 1];

        let errors: Vec<f64> = est.iter().map(|e| self.distance(e, &self.truth).powi(2)).collect();
        let n_oracle = oracle_index(&errors)?;
        Ok(SelectionReport {
            n_qo,
            n_hbp,
            n_lepski,
            n_oracle,
            n_sharp: None,
            efficiency: Efficiencies {
                qo: efficiency(&errors, n_qo)?,
                hbp: efficiency(&errors, n_hbp)?,
                lepski: efficiency(&errors, n_lepski)?,
            },
            criterion,
            lepski_f: f,
        })
    }

    /// Variance profile from `calibration_sets` data sets, then
    /// `replications` independent runs. Failed runs are kept and flagged.
    pub fn run(&self, replications: usize, master_seed: u64) -> Result<LevyOutcome> {
        let variance_profile = self.estimate_variance_profile(derive_master(master_seed, "levy/calibration"))?;
        if let Some(n) = variance_profile.values.iter().position(|&s| !(s > 0.0)) {
            return Err(Error::Numerical(format!(
                "estimated variance vanishes at cut-off {}; the balancing rules need s > 0",
                n + 1
            )));
        }
        let master = derive_master(master_seed, "levy/replication");
        let s_hat = &variance_profile.values;
        let replications = (0..replications)
            .into_par_iter()
            .map(|i| match self.replicate(s_hat, master, i as u64) {
                Ok(report) => LevyReplication {
                    index: i,
                    report: Some(report),
                    failure: None,
                },
                Err(e) => {
                    warn!("replication {i} failed: {e}");
                    LevyReplication {
                        index: i,
                        report: None,
                        failure: Some(e.to_string()),
                    }
                }
            })
            .collect();
        Ok(LevyOutcome {
            variance_profile,
            replications,
        })
    }
}

/// Builds and runs the experiment in one call.
pub fn run_levy_experiment(config: &LevyConfig, replications: usize, master_seed: u64) -> Result<LevyOutcome> {
    LevyExperiment::new(config.clone())?.run(replications, master_seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> LevyConfig {
        LevyConfig {
            grid: GridSpec {
                size: 1024,
                v_max: 60.0,
            },
            calibration_sets: 4,
            ..LevyConfig::default()
        }
    }

    #[test]
    fn default_schedule() {
        let c = LevyConfig::default();
        c.validate().unwrap();
        assert_eq!(c.cutoffs().len(), 60);
        assert!((c.cutoffs()[59] - 48.0).abs() < 1e-12);
        assert_eq!(c.retained().len(), 54);
        let a = c.admissible();
        assert_eq!(a.len(), 40);
        assert_eq!(*a.last().unwrap(), 43);
        assert!(!a.contains(&17) && !a.contains(&27) && !a.contains(&36));
    }

    #[test]
    fn rejects_bad_configs() {
        for edit in [
            |c: &mut LevyConfig| c.cutoff_step = 2.0,
            |c: &mut LevyConfig| c.excluded = vec![0],
            |c: &mut LevyConfig| c.excluded = (1..=60).collect(),
            |c: &mut LevyConfig| c.admissible_max = 0,
            |c: &mut LevyConfig| c.calibration_sets = 1,
            |c: &mut LevyConfig| c.noise_level = -0.1,
            |c: &mut LevyConfig| c.kappa = 0.0,
            |c: &mut LevyConfig| c.model.maturity = 0.0,
            |c: &mut LevyConfig| c.grid.size = 1000,
        ] {
            let mut c = LevyConfig::default();
            edit(&mut c);
            assert!(LevyExperiment::new(c).is_err());
        }
        assert!(LevyConfig::from_json(r#"{"bogus": 1}"#).is_err());
        assert_eq!(LevyConfig::from_json("{}").unwrap(), LevyConfig::default());
    }

    #[test]
    fn noiseless_fixed_design_has_no_spread() {
        let c = LevyConfig {
            noise_level: 0.0,
            design: Design::Fixed {
                points: (0..100).map(|i| -4.0 + 0.12 * i as f64).collect(),
            },
            ..small()
        };
        let exp = LevyExperiment::new(c).unwrap();
        let vp = exp.estimate_variance_profile(3).unwrap();
        assert!(vp.values.iter().all(|&s| s.abs() < 1e-20), "{:?}", vp.values);
        assert!(exp.run(2, 3).is_err());
    }

    #[test]
    fn deterministic_and_efficient() {
        let exp = LevyExperiment::new(small()).unwrap();
        let a = exp.run(6, 11).unwrap();
        let b = exp.run(6, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.replications.len(), 6);
        for r in a.reports() {
            for m in Method::ALL {
                assert!(r.efficiency.get(m) >= 1.0);
            }
            assert_eq!(r.criterion.len(), 53);
            assert_eq!(r.lepski_f.len(), 40);
            assert!(r.n_hbp <= 43 && r.n_lepski <= 43);
        }
        let c = exp.run(6, 12).unwrap();
        assert_ne!(a, c);
    }
}
