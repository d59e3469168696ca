//! From option prices to jump-density estimates: price curves, synthetic
//! observations, the empirical transform, the backward formula and the
//! spectral cut-off estimator.

use log::warn;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use super::grid::SpectralGrid;
use super::merton::MertonModel;
use crate::error::{Error, Result};

/// Default bound on `|FO(±V_max)| / |FO(±Δv/2)|` for a spectral price curve.
pub const DEFAULT_DECAY_TOLERANCE: f64 = 1e-3;

/// Largest discarded imaginary part of a spectral price curve, relative to
/// its peak.
pub const IMAGINARY_TOLERANCE: f64 = 1e-8;

/// Smallest accepted modulus of the backward-formula log argument.
pub const LOG_ARGUMENT_FLOOR: f64 = 1e-12;

/// Option prices on the spatial grid obtained by inverting `FO`.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceCurve {
    x0: f64,
    dx: f64,
    values: Vec<f64>,
}

impl PriceCurve {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn range(&self) -> (f64, f64) {
        (self.x0, self.x0 + self.dx * (self.values.len() - 1) as f64)
    }

    /// Linear interpolation; `x` must lie in [`range`](Self::range).
    pub fn value_at(&self, x: f64) -> Option<f64> {
        let (lo, hi) = self.range();
        if !(lo..=hi).contains(&x) {
            return None;
        }
        let t = (x - self.x0) / self.dx;
        let j = (t.floor() as usize).min(self.values.len() - 2);
        let w = t - j as f64;
        Some(self.values[j] * (1.0 - w) + self.values[j + 1] * w)
    }
}

/// Inverse transform of `FO` sampled on `grid`.
pub fn price_curve(model: &MertonModel, grid: &SpectralGrid, decay_tolerance: f64) -> Result<PriceCurve> {
    model.validate()?;
    let v = grid.frequencies();
    let fo: Vec<Complex64> = v.iter().map(|&v| model.option_transform(v)).collect();
    let edge = fo[0].norm().max(fo[fo.len() - 1].norm());
    let centre = fo[grid.center()].norm();
    if !(edge <= decay_tolerance * centre) {
        return Err(Error::Config(format!(
            "|FO(V_max)| / |FO(0)| = {:.3e} exceeds {decay_tolerance:.1e}; enlarge v_max",
            edge / centre
        )));
    }
    let o = grid.inverse(&fo);
    let peak = o.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
    let residue = o.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if residue > IMAGINARY_TOLERANCE * peak.max(f64::MIN_POSITIVE) {
        return Err(Error::Numerical(format!("price curve imaginary residue {residue:.3e}")));
    }
    Ok(PriceCurve {
        x0: grid.positions()[0],
        dx: grid.dx(),
        values: o.iter().map(|z| z.re).collect(),
    })
}

/// Source of exact prices at the design points.
#[derive(Debug, Clone)]
pub enum Pricer {
    /// Poisson mixture of Black–Scholes prices.
    ClosedForm(MertonModel),
    /// Interpolated spectral price curve.
    Spectral(PriceCurve),
}

impl Pricer {
    /// Prices at `xs`. Points outside a spectral curve's range are clamped.
    pub fn prices(&self, xs: &[f64]) -> Vec<f64> {
        match self {
            Pricer::ClosedForm(m) => m.option_prices(xs),
            Pricer::Spectral(curve) => {
                let (lo, hi) = curve.range();
                xs.iter()
                    .map(|&x| {
                        let c = x.clamp(lo, hi);
                        if c != x {
                            warn!("design point {x} clamped to [{lo}, {hi}]");
                        }
                        curve.value_at(c).expect("clamped into range")
                    })
                    .collect()
            }
        }
    }
}

/// How design points are drawn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Design {
    /// `normal_points` standard normal draws followed by `uniform_points`
    /// uniform draws on `[uniform_low, uniform_high]`.
    Random {
        normal_points: usize,
        uniform_points: usize,
        uniform_low: f64,
        uniform_high: f64,
    },
    Fixed {
        points: Vec<f64>,
    },
}

impl Default for Design {
    fn default() -> Self {
        Design::Random {
            normal_points: 50,
            uniform_points: 50,
            uniform_low: -4.0,
            uniform_high: 8.0,
        }
    }
}

impl Design {
    pub fn count(&self) -> usize {
        match self {
            Design::Random {
                normal_points,
                uniform_points,
                ..
            } => normal_points + uniform_points,
            Design::Fixed { points } => points.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Design::Random {
                uniform_low,
                uniform_high,
                ..
            } => {
                if !(uniform_low.is_finite() && uniform_high.is_finite() && uniform_low < uniform_high) {
                    return Err(Error::Config(format!(
                        "uniform design range [{uniform_low}, {uniform_high}] is empty"
                    )));
                }
            }
            Design::Fixed { points } => {
                if points.iter().any(|x| !x.is_finite()) {
                    return Err(Error::Config("fixed design points must be finite".into()));
                }
            }
        }
        if self.count() < 2 {
            return Err(Error::Config("design needs at least two points".into()));
        }
        Ok(())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            Design::Random {
                normal_points,
                uniform_points,
                uniform_low,
                uniform_high,
            } => {
                let uniform = Uniform::new_inclusive(*uniform_low, *uniform_high).expect("validated range");
                let mut xs: Vec<f64> = (0..*normal_points).map(|_| rng.sample(StandardNormal)).collect();
                xs.extend((0..*uniform_points).map(|_| uniform.sample(rng)));
                xs
            }
            Design::Fixed { points } => points.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationSet {
    pub points: Vec<f64>,
    pub prices: Vec<f64>,
}

impl ObservationSet {
    pub fn new(points: Vec<f64>, prices: Vec<f64>) -> Result<Self> {
        if points.len() != prices.len() {
            return Err(Error::Domain(format!(
                "{} design points but {} prices",
                points.len(),
                prices.len()
            )));
        }
        if points.iter().chain(&prices).any(|v| !v.is_finite()) {
            return Err(Error::Domain("observations must be finite".into()));
        }
        Ok(Self { points, prices })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Draws design points and prices `O(x_i)(1 + noise · e_i)`, `e_i ~ N(0,1)`.
/// Design points come first in the stream, then the noise.
pub fn simulate_observations<R: Rng + ?Sized>(
    pricer: &Pricer,
    design: &Design,
    noise: f64,
    rng: &mut R,
) -> Result<ObservationSet> {
    let points = design.sample(rng);
    let mut prices = pricer.prices(&points);
    for p in &mut prices {
        let e: f64 = rng.sample(StandardNormal);
        *p *= 1.0 + noise * e;
    }
    ObservationSet::new(points, prices)
}

/// Sorted design points with duplicates averaged.
fn merge_duplicates(obs: &ObservationSet) -> (Vec<f64>, Vec<f64>) {
    let mut pairs: Vec<(f64, f64)> = obs.points.iter().copied().zip(obs.prices.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut xs: Vec<f64> = Vec::with_capacity(pairs.len());
    let mut ys: Vec<f64> = Vec::with_capacity(pairs.len());
    let mut counts: Vec<usize> = Vec::with_capacity(pairs.len());
    for (x, y) in pairs {
        if xs.last() == Some(&x) {
            *ys.last_mut().unwrap() += y;
            *counts.last_mut().unwrap() += 1;
        } else {
            xs.push(x);
            ys.push(y);
            counts.push(1);
        }
    }
    for (y, c) in ys.iter_mut().zip(&counts) {
        *y /= *c as f64;
    }
    (xs, ys)
}

/// Linear interpolant of the observations on the spatial grid, tapered
/// linearly to 0 over one grid cell beyond the outermost design points.
pub fn interpolate_observations(obs: &ObservationSet, grid: &SpectralGrid) -> Result<Vec<f64>> {
    let (xs, ys) = merge_duplicates(obs);
    if xs.len() < 2 {
        return Err(Error::Domain("need at least two distinct design points".into()));
    }
    let (lo, hi) = (xs[0], xs[xs.len() - 1]);
    let (y_lo, y_hi) = (ys[0], ys[ys.len() - 1]);
    let dx = grid.dx();
    let out = grid
        .positions()
        .iter()
        .map(|&x| {
            if x < lo {
                y_lo * (1.0 - (lo - x) / dx).max(0.0)
            } else if x > hi {
                y_hi * (1.0 - (x - hi) / dx).max(0.0)
            } else {
                let j = xs.partition_point(|&p| p <= x).clamp(1, xs.len() - 1);
                let w = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
                ys[j - 1] * (1.0 - w) + ys[j] * w
            }
        })
        .collect();
    Ok(out)
}

/// `FÕ` on the frequency grid.
pub fn empirical_transform(obs: &ObservationSet, grid: &SpectralGrid) -> Result<Vec<Complex64>> {
    Ok(grid.forward_real(&interpolate_observations(obs, grid)?))
}

/// `Fμ̃(v) = T⁻¹ log(1 − v(v−i)FÕ(v)) + σ²(v−i)²/2 − iγ(v−i) + λ`.
///
/// The logarithm follows a continuous branch: principal at `±Δv/2` and
/// unwound outward from there.
pub fn backward_transform(fo: &[Complex64], model: &MertonModel, grid: &SpectralGrid) -> Result<Vec<Complex64>> {
    let v = grid.frequencies();
    assert_eq!(fo.len(), v.len());
    let args: Vec<Complex64> = v
        .iter()
        .zip(fo)
        .map(|(&v, &f)| Complex64::new(1.0, 0.0) - v * Complex64::new(v, -1.0) * f)
        .collect();
    if let Some(i) = args.iter().position(|z| !(z.norm() >= LOG_ARGUMENT_FLOOR)) {
        return Err(Error::SingularFrequency { v: v[i] });
    }
    let logs = unwound_log(&args, grid.center());

    let t = model.maturity;
    let s2 = model.volatility * model.volatility;
    let gamma = model.martingale_drift();
    let i = Complex64::new(0.0, 1.0);
    Ok(v.iter()
        .zip(&logs)
        .map(|(&v, &l)| {
            let w = Complex64::new(v, -1.0);
            l / t + 0.5 * s2 * w * w - i * gamma * w + model.intensity
        })
        .collect())
}

/// Continuous logarithm of a nonvanishing sequence, principal at
/// `centre - 1` and `centre` and unwound outward in both directions.
pub(crate) fn unwound_log(z: &[Complex64], centre: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); z.len()];
    for &start in &[centre.wrapping_sub(1), centre] {
        if start >= z.len() {
            continue;
        }
        out[start] = z[start].ln();
    }
    for k in centre + 1..z.len() {
        // the increment's phase lies in (−π, π] by construction
        out[k] = out[k - 1] + (z[k] / z[k - 1]).ln();
    }
    for k in (0..centre.saturating_sub(1)).rev() {
        out[k] = out[k + 1] + (z[k] / z[k + 1]).ln();
    }
    out
}

/// Spectral cut-off estimate `μ̂_U = F⁻¹(Fμ̃ 1_{[−U,U]})` on the spatial grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityEstimate {
    pub values: Vec<f64>,
    /// Largest discarded imaginary part.
    pub imaginary_residue: f64,
}

pub fn cutoff_density_estimate(fmu: &[Complex64], cutoff: f64, grid: &SpectralGrid) -> Result<DensityEstimate> {
    if !(cutoff >= 0.0 && cutoff <= grid.v_max()) {
        return Err(Error::Domain(format!("cut-off {cutoff} outside [0, {}]", grid.v_max())));
    }
    let masked: Vec<Complex64> = fmu
        .iter()
        .zip(grid.frequencies())
        .map(|(&f, &v)| if v.abs() <= cutoff { f } else { Complex64::new(0.0, 0.0) })
        .collect();
    let inv = grid.inverse(&masked);
    Ok(DensityEstimate {
        imaginary_residue: inv.iter().map(|z| z.im.abs()).fold(0.0, f64::max),
        values: inv.into_iter().map(|z| z.re).collect(),
    })
}

/// `μ` sampled on the spatial grid.
pub fn true_density(model: &MertonModel, grid: &SpectralGrid) -> Vec<f64> {
    grid.positions()
        .iter()
        .map(|&x| model.weighted_jump_density(x))
        .collect()
}

/// `(Σ_{|x_j| ≤ w} |a_j − b_j|² Δx)^{1/2}`.
pub fn l2_error(estimate: &[f64], truth: &[f64], grid: &SpectralGrid, half_width: f64) -> f64 {
    l2_distance(
        &estimate[grid.window(half_width)],
        &truth[grid.window(half_width)],
        grid.dx(),
    )
}

pub(crate) fn l2_distance(a: &[f64], b: &[f64], dx: f64) -> f64 {
    (a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() * dx).sqrt()
}
