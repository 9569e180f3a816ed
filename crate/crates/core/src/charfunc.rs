//! Baseline estimator: the characteristic function of `Y = s(X)` on an integer
//! frequency grid, inverted by FFT.
//!
//! `psi(w) = E[exp(i w s(X))]` is computed by direct summation over the
//! samples, `O(n m)` work. That cost is the point: this is the reference the
//! spectral estimator is timed against.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::density::DensityEstimate;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::grid::ScalarField;

/// Imaginary parts up to this size are rounding noise.
pub const IMAGINARY_NOISE: f64 = 1e-9;
/// Imaginary mass `sum |Im p| du` above this signals broken symmetry.
pub const IMAGINARY_MASS_LIMIT: f64 = 1e-6;

/// `psi` sampled at the integers `-(m-1)/2 ..= (m-1)/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharFuncTable {
    omegas: Vec<f64>,
    psi: Vec<Complex64>,
}

impl CharFuncTable {
    /// Table from values at `-(m-1)/2 ..= (m-1)/2`; `psi.len()` must be odd.
    pub fn new(psi: Vec<Complex64>) -> Result<Self> {
        let m = psi.len();
        if m.is_multiple_of(2) {
            return Err(Error::EvenOmegaCount(m));
        }
        Ok(CharFuncTable {
            omegas: omega_grid(m),
            psi,
        })
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn psi(&self) -> &[Complex64] {
        &self.psi
    }

    pub fn len(&self) -> usize {
        self.psi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psi.is_empty()
    }

    /// `psi(0)`, the middle entry.
    pub fn at_zero(&self) -> Complex64 {
        self.psi[self.psi.len() / 2]
    }
}

fn omega_grid(m: usize) -> Vec<f64> {
    let half = (m / 2) as i64;
    (-half..=half).map(|w| w as f64).collect()
}

/// Odd frequency count used for `n` samples: `n` itself when odd, otherwise
/// `n + 1` (frequencies `-n/2 ..= n/2`).
pub fn omega_count(n: usize) -> usize {
    n | 1
}

/// `psi_j = (1/n) sum_i exp(i w_j s_i)` by direct summation, O(n m).
///
/// Frequencies are processed in fixed blocks of [`BLOCK`]: the first term of
/// a block is evaluated directly and the rest by repeated multiplication with
/// `exp(i s_i)`, which keeps the drift near `BLOCK * eps`. Block boundaries
/// and summation order do not depend on `exec`, so neither does the result.
pub fn characteristic_function(s: &ScalarField, m: usize) -> Result<CharFuncTable> {
    characteristic_function_with(s, m, Execution::default())
}

const BLOCK: usize = 32;

pub fn characteristic_function_with(
    s: &ScalarField,
    m: usize,
    exec: Execution,
) -> Result<CharFuncTable> {
    if m.is_multiple_of(2) {
        return Err(Error::EvenOmegaCount(m));
    }
    let omegas = omega_grid(m);
    let values = s.values();
    let steps: Vec<Complex64> = values.iter().map(|&v| Complex64::cis(v)).collect();
    let inv_n = 1.0 / values.len() as f64;
    let blocks = exec.map_indices(m.div_ceil(BLOCK), |b| {
        let first = b * BLOCK;
        let len = BLOCK.min(m - first);
        let w0 = omegas[first];
        let mut acc = [Complex64::new(0.0, 0.0); BLOCK];
        for (&v, &step) in values.iter().zip(&steps) {
            let mut term = Complex64::cis(w0 * v);
            for a in &mut acc[..len] {
                *a += term;
                term *= step;
            }
        }
        acc[..len].iter().map(|a| a * inv_n).collect::<Vec<_>>()
    });
    let psi = blocks.into_iter().flatten().collect();
    Ok(CharFuncTable { omegas, psi })
}

/// `p(u_j) = (1/2 pi) sum_w psi(w) exp(-i w u_j)` on `u_j = 2 pi (j - h) / m`,
/// `h = (m-1)/2`, so the grid is symmetric about zero inside `(-pi, pi)`.
///
/// Negative lobes of the truncated series are clipped and the mass
/// renormalized; the clipped amount is logged.
pub fn density_from_charfunc(table: &CharFuncTable) -> Result<DensityEstimate> {
    let m = table.len();
    let h = m / 2;
    // exp(-i w u_j) = exp(-2 pi i (l - h)(j - h) / m) with l = w + h
    //               = exp(2 pi i h (j - h) / m) * exp(-2 pi i l j / m) * exp(2 pi i l h / m)
    let mut buf: Vec<Complex64> = table
        .psi()
        .iter()
        .enumerate()
        .map(|(l, p)| p * twiddle(l * h, m))
        .collect();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);

    let du = 2.0 * PI / m as f64;
    let mut p = Vec::with_capacity(m);
    let mut imaginary = 0.0;
    let mut clipped = 0.0;
    for (j, c) in buf.iter().enumerate() {
        let v = c * twiddle((h * ((j + m - h) % m)) % m, m) / (2.0 * PI);
        if v.im.abs() > IMAGINARY_NOISE {
            imaginary += v.im.abs() * du;
        }
        if v.re < 0.0 {
            clipped -= v.re * du;
            p.push(0.0);
        } else {
            p.push(v.re);
        }
    }
    if imaginary > IMAGINARY_MASS_LIMIT {
        return Err(Error::ExcessImaginary(imaginary));
    }
    if clipped > 0.0 {
        log::debug!(
            "clipped negative mass {clipped:.3e} from the inverted characteristic function"
        );
    }
    DensityEstimate::from_weights(-(h as f64) * du, du, p)
}

/// `exp(2 pi i k / m)`, with `k` reduced first to keep the angle small.
fn twiddle(k: usize, m: usize) -> Complex64 {
    Complex64::cis(2.0 * PI * (k % m) as f64 / m as f64)
}

/// Density of `s` through its characteristic function on
/// [`omega_count`]`(n)` integer frequencies.
pub fn estimate_density_charfunc(s: &ScalarField) -> Result<DensityEstimate> {
    estimate_density_charfunc_with(s, Execution::default())
}

pub fn estimate_density_charfunc_with(s: &ScalarField, exec: Execution) -> Result<DensityEstimate> {
    let table = characteristic_function_with(s, omega_count(s.len()), exec)?;
    density_from_charfunc(&table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{lookup, sample, Params};
    use crate::density::IntervalQuery;
    use crate::grid::GridSpec;

    fn derivative_field(name: &str, n: usize) -> ScalarField {
        let tf = lookup(name, &Params::new()).unwrap();
        sample(&tf, &tf.grid(n).unwrap()).unwrap().1
    }

    #[test]
    fn rejects_even_m() {
        let s = derivative_field("quadratic", 64);
        assert!(matches!(
            characteristic_function(&s, 64),
            Err(Error::EvenOmegaCount(64))
        ));
        assert!(CharFuncTable::new(vec![Complex64::new(1.0, 0.0); 4]).is_err());
        assert_eq!(omega_count(64), 65);
        assert_eq!(omega_count(63), 63);
    }

    #[test]
    fn zero_field_has_unit_psi() {
        let g = GridSpec::new(0.0, 1.0, 32).unwrap();
        let s = ScalarField::new(g, vec![0.0; 32]).unwrap();
        let t = characteristic_function(&s, 33).unwrap();
        assert!(t.psi().iter().all(|p| *p == Complex64::new(1.0, 0.0)));
        assert_eq!(t.omegas()[0], -16.0);
        assert_eq!(t.omegas()[32], 16.0);
    }

    #[test]
    fn psi_zero_and_symmetry() {
        let s = derivative_field("sinusoid", 512);
        let t = characteristic_function(&s, 101).unwrap();
        assert_eq!(t.at_zero(), Complex64::new(1.0, 0.0));
        let m = t.len();
        for j in 0..m {
            assert!((t.psi()[j] - t.psi()[m - 1 - j].conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn uniform_law_psi() {
        let s = derivative_field("quadratic", 1 << 12);
        // psi(w) = sin(w)/w; integer grid, so compare at w = 3 and w = 1
        let t = characteristic_function(&s, 21).unwrap();
        for (w, p) in t.omegas().iter().zip(t.psi()) {
            let want = if *w == 0.0 { 1.0 } else { w.sin() / w };
            assert!((p.re - want).abs() < 2e-3 && p.im.abs() < 1e-12, "w = {w}");
        }
        // off-grid check of psi(pi) by direct summation
        let pi_sum: f64 = s.values().iter().map(|v| (PI * v).cos()).sum::<f64>() / s.len() as f64;
        assert!(pi_sum.abs() < 2e-3);
    }

    #[test]
    fn unit_psi_is_a_spike_at_zero() {
        let m = 101;
        let table = CharFuncTable::new(vec![Complex64::new(1.0, 0.0); m]).unwrap();
        let d = density_from_charfunc(&table).unwrap();
        let zero = m / 2;
        assert!(d.u()[zero].abs() < 1e-15);
        assert!((d.p()[zero] * d.du() - 1.0).abs() < 1e-9);
        assert!(d
            .p()
            .iter()
            .enumerate()
            .all(|(j, p)| j == zero || *p < 1e-9));
    }

    #[test]
    fn broken_symmetry_is_rejected() {
        let mut psi = vec![Complex64::new(0.0, 0.0); 11];
        psi[5] = Complex64::new(1.0, 0.0);
        psi[7] = Complex64::new(0.0, 0.3);
        psi[3] = Complex64::new(0.0, 0.3); // should be -0.3i
        let t = CharFuncTable::new(psi).unwrap();
        assert!(matches!(
            density_from_charfunc(&t),
            Err(Error::ExcessImaginary(_))
        ));
    }

    #[test]
    fn quadratic_pipeline_is_uniform() {
        let s = derivative_field("quadratic", 1 << 12);
        let d = estimate_density_charfunc(&s).unwrap();
        let m = d
            .interval_mass(IntervalQuery::new(-0.5, 1.0).unwrap())
            .unwrap();
        assert!((m - 0.5).abs() < 2e-2, "{m}");
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let s = derivative_field("sum_of_sinusoids", 300);
        let a = characteristic_function_with(&s, 301, Execution::Sequential).unwrap();
        let b = characteristic_function_with(&s, 301, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
