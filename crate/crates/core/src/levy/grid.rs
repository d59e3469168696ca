//! Paired frequency/space grids and FFT-backed Fourier transforms under the
//! convention `Ff(v) = ∫ e^{ivx} f(x) dx`, `F⁻¹g(x) = (2π)⁻¹ ∫ e^{−ivx} g(v) dv`.
//!
//! Frequencies sit at half-integer offsets, `v_m = (m − M/2 + ½)Δv`, so the
//! grid is symmetric about 0 and never contains `v = 0`. Positions are
//! `x_j = (j − M/2)Δx` with `Δx Δv = 2π/M`, which turns the two transforms
//! into an exact discrete inverse pair.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported grid size.
pub const MAX_GRID_SIZE: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub size: usize,
    pub v_max: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            size: 1 << 12,
            v_max: 60.0,
        }
    }
}

#[derive(Clone)]
pub struct SpectralGrid {
    size: usize,
    v_max: f64,
    dv: f64,
    dx: f64,
    frequencies: Vec<f64>,
    positions: Vec<f64>,
    forward_pre: Vec<Complex64>,
    forward_post: Vec<Complex64>,
    inverse_pre: Vec<Complex64>,
    inverse_post: Vec<Complex64>,
    fft_positive: Arc<dyn Fft<f64>>,
    fft_negative: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for SpectralGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralGrid")
            .field("size", &self.size)
            .field("v_max", &self.v_max)
            .field("dv", &self.dv)
            .field("dx", &self.dx)
            .finish()
    }
}

/// `e^{2πi num/den}` with the argument reduced exactly in integers.
fn cis_turns(num: i128, den: i128) -> Complex64 {
    let r = num.rem_euclid(den);
    Complex64::from_polar(1.0, 2.0 * PI * (r as f64) / (den as f64))
}

impl SpectralGrid {
    pub fn new(spec: GridSpec) -> Result<Self> {
        let GridSpec { size, v_max } = spec;
        if size < 4 || !size.is_power_of_two() || size > MAX_GRID_SIZE {
            return Err(Error::Config(format!(
                "grid size {size} must be a power of two in 4..={MAX_GRID_SIZE}"
            )));
        }
        if !(v_max.is_finite() && v_max > 0.0) {
            return Err(Error::Config(format!("v_max = {v_max} must be positive")));
        }
        let m = size as i128;
        let half = size as f64 / 2.0;
        // v_m spans [-v_max + dv/2, v_max - dv/2]
        let dv = 2.0 * v_max / size as f64;
        let dx = 2.0 * PI / (size as f64 * dv);
        let frequencies = (0..size).map(|i| (i as f64 - half + 0.5) * dv).collect();
        let positions = (0..size).map(|j| (j as f64 - half) * dx).collect();

        // v_m x_j = 2π (2m − M + 1)(2j − M) / (4M)
        // forward: Δx e^{i v_m x_0} Σ_j f_j e^{i v_0 (x_j − x_0)} e^{2πi mj/M}
        let forward_pre = (0..m).map(|j| cis_turns((1 - m) * 2 * j, 4 * m)).collect();
        let forward_post = (0..m).map(|i| cis_turns((2 * i - m + 1) * (-m), 4 * m) * dx).collect();
        // inverse: (Δv/2π) e^{−i v_0 x_j} Σ_m g_m e^{−i (v_m − v_0) x_0} e^{−2πi mj/M}
        let inverse_pre = (0..m).map(|i| cis_turns(-(2 * i) * (-m), 4 * m)).collect();
        let inverse_post = (0..m)
            .map(|j| cis_turns(-(1 - m) * (2 * j - m), 4 * m) * (dv / (2.0 * PI)))
            .collect();

        let mut planner = FftPlanner::new();
        Ok(Self {
            size,
            v_max,
            dv,
            dx,
            frequencies,
            positions,
            forward_pre,
            forward_post,
            inverse_pre,
            inverse_post,
            fft_positive: planner.plan_fft_inverse(size),
            fft_negative: planner.plan_fft_forward(size),
        })
    }

    pub fn spec(&self) -> GridSpec {
        GridSpec {
            size: self.size,
            v_max: self.v_max,
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn v_max(&self) -> f64 {
        self.v_max
    }

    pub fn dv(&self) -> f64 {
        self.dv
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    /// Index of the smallest positive frequency `+Δv/2`.
    pub fn center(&self) -> usize {
        self.size / 2
    }

    /// Indices `j` with `|x_j| ≤ half_width`.
    pub fn window(&self, half_width: f64) -> std::ops::Range<usize> {
        let lo = self.positions.partition_point(|&x| x < -half_width);
        let hi = self.positions.partition_point(|&x| x <= half_width);
        lo..hi
    }

    /// Samples of `Ff` on the frequency grid from samples of `f` on the
    /// spatial grid.
    pub fn forward(&self, samples: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(samples.len(), self.size);
        let mut buf: Vec<Complex64> = samples.iter().zip(&self.forward_pre).map(|(f, w)| f * w).collect();
        self.fft_positive.process(&mut buf);
        buf.iter_mut().zip(&self.forward_post).for_each(|(b, w)| *b *= w);
        buf
    }

    pub fn forward_real(&self, samples: &[f64]) -> Vec<Complex64> {
        let c: Vec<Complex64> = samples.iter().map(|&f| Complex64::new(f, 0.0)).collect();
        self.forward(&c)
    }

    /// Samples of `F⁻¹g` on the spatial grid from samples of `g` on the
    /// frequency grid.
    pub fn inverse(&self, spectrum: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(spectrum.len(), self.size);
        let mut buf: Vec<Complex64> = spectrum.iter().zip(&self.inverse_pre).map(|(g, w)| g * w).collect();
        self.fft_negative.process(&mut buf);
        buf.iter_mut().zip(&self.inverse_post).for_each(|(b, w)| *b *= w);
        buf
    }

    /// Largest `|g(−v) − conj g(v)|` over the grid.
    pub fn hermitian_defect(&self, spectrum: &[Complex64]) -> f64 {
        (0..self.size / 2)
            .map(|i| (spectrum[self.size - 1 - i] - spectrum[i].conj()).norm())
            .fold(0.0, f64::max)
    }
}
