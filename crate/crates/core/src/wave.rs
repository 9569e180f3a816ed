//! Density of `s = S'` as the normalized power spectrum of
//! `phi(x) = exp(i S(x) / tau)`.
//!
//! The continuous transform
//! `F(u) = (2 pi tau L)^(-1/2) * integral phi(x) exp(-i u x / tau) dx`
//! is discretized with the forward DFT of the midpoint samples. Matching the
//! kernel `exp(-i u x_j / tau)` against `exp(-2 pi i k j / n)` puts DFT bin
//! `k` at `u_k = 2 pi tau k / L`, so `du = 2 pi tau / L`. The remaining
//! factor `exp(-i u_k (b1 + dx/2) / tau)` is a pure phase and is dropped.
//!
//! With `P(u_k) = |c_k|^2 dx^2 / (2 pi tau L)` the discrete Parseval identity
//! gives `sum P du = n^2 dx^2 / L^2 = 1` exactly, mirroring `||F|| = 1`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::catalog::discrete_derivative;
use crate::density::{DensityEstimate, MASS_TOLERANCE};
use crate::error::{Error, Result};
use crate::grid::{ComplexField, GridSpec, ScalarField};

/// The free parameter `tau > 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct TauParameter(f64);

impl TauParameter {
    pub fn new(tau: f64) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::InvalidTau(format!(
                "tau must be positive, got {tau}"
            )));
        }
        Ok(TauParameter(tau))
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// Spectral bin width `2 pi tau / L` on `grid`.
    pub fn bin_width(self, grid: &GridSpec) -> f64 {
        2.0 * PI * self.0 / grid.length()
    }

    /// Half-width `pi tau / dx` of the `u` range the DFT can represent.
    pub fn coverage(self, grid: &GridSpec) -> f64 {
        PI * self.0 / grid.dx()
    }
}

/// Centered DFT of a wave field. `coefficients[j]` is bin `k = j - n/2`
/// (integer division), i.e. `u = k du`.
#[derive(Debug, Clone)]
pub struct SpectrumRaw {
    grid: GridSpec,
    tau: TauParameter,
    coefficients: Vec<Complex64>,
}

impl SpectrumRaw {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn tau(&self) -> TauParameter {
        self.tau
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn du(&self) -> f64 {
        self.tau.bin_width(&self.grid)
    }

    /// Center of the first stored bin.
    pub fn u_start(&self) -> f64 {
        -((self.grid.n() / 2) as f64) * self.du()
    }

    /// `dx^2 / (2 pi tau L)`: converts `|c_k|^2` to density units.
    pub fn density_scale(&self) -> f64 {
        let g = &self.grid;
        g.dx() * g.dx() / (2.0 * PI * self.tau.get() * g.length())
    }

    /// `P_tau(u_k)` for every bin, before any renormalization.
    pub fn power(&self) -> Vec<f64> {
        let scale = self.density_scale();
        self.coefficients
            .iter()
            .map(|c| c.norm_sqr() * scale)
            .collect()
    }

    /// `sum P du` before renormalization; one up to rounding.
    pub fn raw_mass(&self) -> f64 {
        self.power().iter().sum::<f64>() * self.du()
    }

    /// Index of the bin whose center is nearest `u`, if inside the range.
    pub fn nearest_bin(&self, u: f64) -> Option<usize> {
        let j = ((u - self.u_start()) / self.du()).round();
        (j >= 0.0 && j < self.grid.n() as f64).then_some(j as usize)
    }
}

/// `phi_i = exp(i S_i / tau)`.
pub fn build_wavefunction(field: &ScalarField, tau: TauParameter) -> ComplexField {
    let values = field
        .values()
        .iter()
        .map(|s| Complex64::cis(s / tau.get()))
        .collect();
    ComplexField::new(*field.grid(), values).expect("unimodular samples are finite")
}

/// Forward DFT of `phi`, reordered so that frequencies increase.
pub fn scaled_transform(phi: &ComplexField, tau: TauParameter) -> SpectrumRaw {
    let n = phi.grid().n();
    let mut buf = phi.values().to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    buf.rotate_left(n - n / 2);
    SpectrumRaw {
        grid: *phi.grid(),
        tau,
        coefficients: buf,
    }
}

/// Whether [`estimate_density_wave_with`] refuses a `tau` whose spectrum
/// cannot represent the full range of `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Coverage {
    #[default]
    Enforce,
    /// Log and continue; the spectrum wraps around.
    Allow,
}

/// Density of `s = S'` from the power spectrum of `exp(i S / tau)`.
pub fn estimate_density_wave(field: &ScalarField, tau: TauParameter) -> Result<DensityEstimate> {
    estimate_density_wave_with(field, tau, Coverage::Enforce)
}

pub fn estimate_density_wave_with(
    field: &ScalarField,
    tau: TauParameter,
    coverage: Coverage,
) -> Result<DensityEstimate> {
    let grid = *field.grid();
    let peak = discrete_derivative(field)?.max_abs();
    let du = tau.bin_width(&grid);
    // Bins across the symmetric range [-max|s|, max|s|].
    let span = 2.0 * peak.max(f64::MIN_POSITIVE);
    if du > span / 8.0 {
        return Err(Error::TauTooLarge(format!(
            "bin width {du:.3e} leaves fewer than 8 bins across [-{peak:.3}, {peak:.3}]"
        )));
    }
    let reach = tau.coverage(&grid);
    if peak > reach {
        let msg = format!(
            "max |s| = {peak:.4} exceeds the spectral range +-{reach:.4}; need tau >= {:.3e}",
            peak * grid.dx() / PI
        );
        match coverage {
            Coverage::Enforce => return Err(Error::UnderResolved(msg)),
            Coverage::Allow => log::warn!("{msg}"),
        }
    } else {
        log::debug!("spectral range +-{reach:.4} for max |s| = {peak:.4}");
    }
    if tau.get() > grid.dx() {
        log::debug!(
            "tau {:.3e} exceeds dx {:.3e}: resonance widths span several bins",
            tau.get(),
            grid.dx()
        );
    }

    // Referencing the phase to the first sample is a global phase change; it
    // keeps |S / tau| small and makes S -> S + c exactly invariant whenever
    // the shifted samples are exact.
    let origin = field.values()[0];
    let shifted: Vec<f64> = field.values().iter().map(|v| v - origin).collect();
    let shifted = ScalarField::new(grid, shifted)?;
    let spectrum = scaled_transform(&build_wavefunction(&shifted, tau), tau);

    let power = spectrum.power();
    let mass = power.iter().sum::<f64>() * du;
    if (mass - 1.0).abs() > MASS_TOLERANCE {
        return Err(Error::InvalidDensity(format!(
            "power spectrum mass {mass} before renormalization"
        )));
    }
    DensityEstimate::from_weights(spectrum.u_start(), du, power)
}
