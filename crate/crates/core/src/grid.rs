//! Uniform sampling of a closed interval and fields sampled on it.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Midpoint sampling of `[b1, b2]`: sample `i` sits at `b1 + (i + 1/2) dx`
/// with `dx = (b2 - b1) / n`, so no sample lands on an endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    b1: f64,
    b2: f64,
    n: usize,
    dx: f64,
    length: f64,
}

impl GridSpec {
    pub fn new(b1: f64, b2: f64, n: usize) -> Result<Self> {
        if !(b1.is_finite() && b2.is_finite()) || b2 <= b1 {
            return Err(Error::InvalidDomain(format!(
                "need finite b1 < b2, got [{b1}, {b2}]"
            )));
        }
        if n < 2 {
            return Err(Error::InvalidDomain(format!(
                "need at least 2 samples, got {n}"
            )));
        }
        let length = b2 - b1;
        Ok(GridSpec {
            b1,
            b2,
            n,
            dx: length / n as f64,
            length,
        })
    }

    pub fn b1(&self) -> f64 {
        self.b1
    }

    pub fn b2(&self) -> f64 {
        self.b2
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// `L = b2 - b1`.
    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn point(&self, i: usize) -> f64 {
        self.b1 + (i as f64 + 0.5) * self.dx
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.point(i)).collect()
    }

    /// Same interval (to 1e-12 relative to the length), any sample count.
    pub fn same_interval(&self, b1: f64, b2: f64) -> bool {
        let tol = 1e-12 * self.length;
        (self.b1 - b1).abs() <= tol && (self.b2 - b2).abs() <= tol
    }
}

/// Real samples on a grid, e.g. `S` or its derivative `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: GridSpec,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::InvalidField(format!(
                "{} values for a {}-point grid",
                values.len(),
                grid.n()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidField(format!(
                "non-finite value {} at sample {i}",
                values[i]
            )));
        }
        Ok(ScalarField { grid, values })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..grid.n()).map(|i| f(grid.point(i))).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Writes `x,S` rows at full precision; [`crate::cli::ingest_samples`]
    /// reads them back.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::with_capacity(48 * self.len() + 8);
        out.push_str("x,S\n");
        for (i, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{:.16e},{:.16e}\n", self.grid.point(i), v));
        }
        std::fs::File::create(path)
            .and_then(|mut f| f.write_all(out.as_bytes()))
            .map_err(|e| Error::io(path, e))
    }
}

/// Complex samples on a grid, e.g. the wave function `exp(i S / tau)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: GridSpec,
    values: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::InvalidField(format!(
                "{} values for a {}-point grid",
                values.len(),
                grid.n()
            )));
        }
        if values
            .iter()
            .any(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::InvalidField("non-finite complex sample".into()));
        }
        Ok(ComplexField { grid, values })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Largest `| |v| - 1 |` over the samples.
    pub fn unimodular_defect(&self) -> f64 {
        self.values
            .iter()
            .fold(0.0, |m, v| m.max((v.norm() - 1.0).abs()))
    }
}
