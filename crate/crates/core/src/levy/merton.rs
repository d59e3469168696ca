//! Merton jump-diffusion under the risk-neutral measure with Gaussian jumps.
//!
//! The log-price `L_T` has diffusion volatility `σ`, jump intensity `λ` and
//! jump sizes `N(m, s²)`. The drift `γ` is fixed by the martingale condition.
//! Prices are for the normalized out-of-the-money option `O(x)`: a call with
//! log-strike `x ≥ 0`, a put for `x < 0`, at spot 1 and zero interest.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MertonModel {
    pub volatility: f64,
    pub intensity: f64,
    pub jump_mean: f64,
    pub jump_std: f64,
    pub maturity: f64,
}

impl Default for MertonModel {
    fn default() -> Self {
        Self {
            volatility: 0.1,
            intensity: 5.0,
            jump_mean: 0.0,
            jump_std: 1.0,
            maturity: 0.25,
        }
    }
}

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

impl MertonModel {
    pub fn validate(&self) -> Result<()> {
        let ok = self.volatility.is_finite()
            && self.volatility >= 0.0
            && self.intensity.is_finite()
            && self.intensity >= 0.0
            && self.jump_mean.is_finite()
            && self.jump_std.is_finite()
            && self.jump_std > 0.0
            && self.maturity.is_finite()
            && self.maturity > 0.0
            && self.intensity * self.maturity <= 500.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid Merton parameters {self:?}")))
        }
    }

    /// `E[e^J]` for one jump.
    fn jump_exp_moment(&self) -> f64 {
        (self.jump_mean + 0.5 * self.jump_std * self.jump_std).exp()
    }

    /// Drift making `e^{L_t}` a martingale.
    pub fn martingale_drift(&self) -> f64 {
        -0.5 * self.volatility * self.volatility - self.intensity * (self.jump_exp_moment() - 1.0)
    }

    /// `μ(x) = e^x ν(x)` for the jump measure `ν = λ N(m, s²)`.
    pub fn weighted_jump_density(&self, x: f64) -> f64 {
        let s = self.jump_std;
        let z = (x - self.jump_mean) / s;
        self.intensity * x.exp() * (-0.5 * z * z).exp() / (s * (2.0 * PI).sqrt())
    }

    /// `Fμ(v) = ∫ e^{ivx} μ(x) dx`.
    pub fn weighted_jump_transform(&self, v: f64) -> Complex64 {
        let s2 = self.jump_std * self.jump_std;
        let amp = self.intensity * self.jump_exp_moment() * (-0.5 * s2 * v * v).exp();
        Complex64::from_polar(amp, v * (self.jump_mean + s2))
    }

    /// Total mass `∫ μ = λ E[e^J]`.
    pub fn weighted_jump_mass(&self) -> f64 {
        self.intensity * self.jump_exp_moment()
    }

    /// `ψ(v − i)`, the log characteristic function of `L_1` at `v − i`,
    /// written with `Fμ` in place of the jump integral.
    pub fn shifted_exponent(&self, v: f64) -> Complex64 {
        let w = Complex64::new(v, -1.0);
        let s2 = self.volatility * self.volatility;
        -0.5 * s2 * w * w + I * self.martingale_drift() * w + self.weighted_jump_transform(v) - self.intensity
    }

    /// `FO(v) = (1 − e^{T ψ(v − i)}) / (v (v − i))`, continuous at `v = 0`.
    pub fn option_transform(&self, v: f64) -> Complex64 {
        let t = self.maturity;
        if v.abs() < 1e-9 {
            // ψ(−i) = 0, so the limit is T ψ'(−i) / i to first order
            let s2 = self.jump_std * self.jump_std;
            let slope = self.volatility * self.volatility
                + self.martingale_drift()
                + self.weighted_jump_mass() * (self.jump_mean + s2);
            return Complex64::new(t * slope, 0.0);
        }
        let z = t * self.shifted_exponent(v);
        let one_minus = -(z.exp() - 1.0);
        let one_minus = if z.norm() < 1e-5 {
            // expm1 for small complex arguments
            -(z + z * z / 2.0 + z * z * z / 6.0)
        } else {
            one_minus
        };
        one_minus / (v * Complex64::new(v, -1.0))
    }

    /// Poisson weights of the jump count, truncated once past the mode and
    /// below `1e-18`.
    fn jump_count_weights(&self) -> Vec<f64> {
        let rate = self.intensity * self.maturity;
        let mut out = vec![(-rate).exp()];
        let mut k = 0usize;
        while k < 1000 {
            k += 1;
            let p = out[k - 1] * rate / k as f64;
            if (k as f64) > rate && p < 1e-18 {
                break;
            }
            out.push(p);
        }
        out
    }

    /// Closed-form out-of-the-money price as a Poisson mixture of
    /// Black–Scholes prices.
    pub fn option_price(&self, x: f64) -> f64 {
        self.option_prices(&[x])[0]
    }

    pub fn option_prices(&self, xs: &[f64]) -> Vec<f64> {
        let weights = self.jump_count_weights();
        let t = self.maturity;
        let gamma_t = self.martingale_drift() * t;
        let diffusion = self.volatility * self.volatility * t;
        let s2 = self.jump_std * self.jump_std;
        xs.iter()
            .map(|&x| {
                weights
                    .iter()
                    .enumerate()
                    .map(|(k, &p)| {
                        let kf = k as f64;
                        let mean = gamma_t + kf * self.jump_mean;
                        let var = diffusion + kf * s2;
                        p * conditional_price(x, mean, var)
                    })
                    .sum()
            })
            .collect()
    }
}

/// `E[(e^L − e^x)^+]` for `x ≥ 0`, `E[(e^x − e^L)^+]` for `x < 0`,
/// `L ~ N(mean, var)`.
fn conditional_price(x: f64, mean: f64, var: f64) -> f64 {
    if x >= 0.0 {
        gaussian_call(x, mean, var)
    } else {
        gaussian_put(x, mean, var)
    }
}

fn gaussian_call(x: f64, mean: f64, var: f64) -> f64 {
    if var <= 0.0 {
        return (mean.exp() - x.exp()).max(0.0);
    }
    let sd = var.sqrt();
    let d2 = (mean - x) / sd;
    (mean + 0.5 * var).exp() * normal_cdf(d2 + sd) - x.exp() * normal_cdf(d2)
}

fn gaussian_put(x: f64, mean: f64, var: f64) -> f64 {
    if var <= 0.0 {
        return (x.exp() - mean.exp()).max(0.0);
    }
    let sd = var.sqrt();
    let d2 = (mean - x) / sd;
    x.exp() * normal_cdf(-d2) - (mean + 0.5 * var).exp() * normal_cdf(-d2 - sd)
}
