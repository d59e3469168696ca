//! JSON documents describing a sequence-space problem and its subsampling.
//!
//! ```json
//! {
//!   "lambda": {"kind": "power", "nu": 1.0},
//!   "eps":    {"kind": "power", "delta": 1e-3},
//!   "gamma":  {"kind": "power", "mu": 1.0},
//!   "k_max":  4096,
//!   "levels": {"kind": "geometric", "l0": 2, "h": 2, "n": 10},
//!   "chi":    "unit"
//! }
//! ```
//!
//! Each of `lambda`, `eps`, `gamma` is either an explicit array or a power
//! generator `delta · k^{-e}` where `e` is `nu` or `mu` (default `delta = 1`,
//! `e = 0`). `levels` is an array `ℓ(1..=N+1)` or a geometric schedule.
//! `chi` is `"unit"`, `"inverse_sqrt_s"` or an explicit array `χ(1..=N)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{SpectralProblem, Subsampling, Weight, MAX_COEFFICIENTS};

/// Largest accepted selection depth N for generated schedules.
pub const MAX_LEVELS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SequenceSpec {
    Values(Vec<f64>),
    Generator(Generator),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Generator {
    Power {
        #[serde(default)]
        delta: Option<f64>,
        #[serde(default)]
        nu: Option<f64>,
        #[serde(default)]
        mu: Option<f64>,
    },
}

impl SequenceSpec {
    fn len(&self) -> Option<usize> {
        match self {
            SequenceSpec::Values(v) => Some(v.len()),
            SequenceSpec::Generator(_) => None,
        }
    }

    fn materialize(&self, k_max: usize, name: &str) -> Result<Vec<f64>> {
        match self {
            SequenceSpec::Values(v) => {
                if v.len() != k_max {
                    return Err(Error::Config(format!(
                        "\"{name}\" has {} entries, expected {k_max}",
                        v.len()
                    )));
                }
                Ok(v.clone())
            }
            SequenceSpec::Generator(Generator::Power { delta, nu, mu }) => {
                let exponent = match (nu, mu) {
                    (Some(_), Some(_)) => {
                        return Err(Error::Config(format!(
                            "\"{name}\" generator takes one of nu or mu, not both"
                        )))
                    }
                    (Some(e), None) | (None, Some(e)) => *e,
                    (None, None) => 0.0,
                };
                let delta = delta.unwrap_or(1.0);
                if !(delta.is_finite() && exponent.is_finite()) {
                    return Err(Error::Config(format!("\"{name}\" generator parameters must be finite")));
                }
                Ok((1..=k_max).map(|k| delta * (k as f64).powf(-exponent)).collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LevelsSpec {
    Values(Vec<usize>),
    Geometric(GeometricLevels),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometricLevels {
    pub kind: GeometricKind,
    pub l0: f64,
    pub h: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometricKind {
    Geometric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChiSpec {
    Named(String),
    Table(Vec<f64>),
}

impl Default for ChiSpec {
    fn default() -> Self {
        ChiSpec::Named("unit".into())
    }
}

impl ChiSpec {
    fn weight(&self) -> Result<Weight> {
        match self {
            ChiSpec::Named(name) => match name.as_str() {
                "unit" => Ok(Weight::Unit),
                "inverse_sqrt_s" => Ok(Weight::InverseSqrtS),
                other => Err(Error::Config(format!("unknown chi \"{other}\""))),
            },
            ChiSpec::Table(t) => Ok(Weight::Table(t.clone())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDocument {
    pub lambda: SequenceSpec,
    pub eps: SequenceSpec,
    pub gamma: SequenceSpec,
    #[serde(default)]
    pub k_max: Option<usize>,
    pub levels: LevelsSpec,
    #[serde(default)]
    pub chi: ChiSpec,
}

impl ProblemDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// The number of coefficients the document asks for, before allocating.
    pub fn declared_k_max(&self) -> Result<usize> {
        let lens: Vec<usize> = [&self.lambda, &self.eps, &self.gamma]
            .iter()
            .filter_map(|s| s.len())
            .collect();
        let k_max = match (self.k_max, lens.first()) {
            (Some(k), _) => k,
            (None, Some(&k)) => k,
            (None, None) => {
                return Err(Error::Config(
                    "\"k_max\" is required when every sequence is generated".into(),
                ))
            }
        };
        if k_max == 0 || k_max > MAX_COEFFICIENTS {
            return Err(Error::Config(format!(
                "k_max = {k_max} out of range 1..={MAX_COEFFICIENTS}"
            )));
        }
        Ok(k_max)
    }

    pub fn subsampling(&self) -> Result<Subsampling> {
        let weight = self.chi.weight()?;
        match &self.levels {
            LevelsSpec::Values(v) => Subsampling::new(v.clone(), weight),
            LevelsSpec::Geometric(g) => {
                if g.n == 0 || g.n > MAX_LEVELS {
                    return Err(Error::Config(format!(
                        "geometric n = {} out of range 1..={MAX_LEVELS}",
                        g.n
                    )));
                }
                Subsampling::geometric(g.l0, g.h, g.n, weight)
            }
        }
    }

    pub fn build(&self) -> Result<(SpectralProblem, Subsampling)> {
        let k_max = self.declared_k_max()?;
        let sub = self.subsampling()?;
        let problem = SpectralProblem::new(
            self.lambda.materialize(k_max, "lambda")?,
            self.eps.materialize(k_max, "eps")?,
            self.gamma.materialize(k_max, "gamma")?,
        )?;
        sub.check_against(&problem)?;
        Ok((problem, sub))
    }

    /// Power-law problem `λ = k^{-ν}`, `ε = δ`, `γ = k^{-μ}` with geometric
    /// levels `ℓ(n) = ℓ₀ hⁿ`.
    pub fn power_law(delta: f64, nu: f64, mu: f64, k_max: usize, l0: f64, h: f64, n: usize) -> Self {
        Self {
            lambda: SequenceSpec::Generator(Generator::Power {
                delta: None,
                nu: Some(nu),
                mu: None,
            }),
            eps: SequenceSpec::Generator(Generator::Power {
                delta: Some(delta),
                nu: None,
                mu: None,
            }),
            gamma: SequenceSpec::Generator(Generator::Power {
                delta: None,
                nu: None,
                mu: Some(mu),
            }),
            k_max: Some(k_max),
            levels: LevelsSpec::Geometric(GeometricLevels {
                kind: GeometricKind::Geometric,
                l0,
                h,
                n,
            }),
            chi: ChiSpec::default(),
        }
    }
}

/// Parses and validates a problem document in one step.
pub fn parse_problem(text: &str) -> Result<(SpectralProblem, Subsampling)> {
    ProblemDocument::from_json(text)?.build()
}
