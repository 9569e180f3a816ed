//! Experiment drivers: single-`tau` method comparison, `tau` sweeps, and the
//! runtime scaling study.
//!
//! Both estimators are transferred onto one fixed comparison grid before the
//! l1 error is taken. The grid does not depend on `tau`, so the error measures
//! what the limit `tau -> 0` controls: mass over intervals of fixed width.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use crate::catalog::{discrete_derivative, sample, TestFunction};
use crate::charfunc::estimate_density_charfunc_with;
use crate::density::{l1_distance, rebin_density, DensityEstimate};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::grid::{GridSpec, ScalarField};
use crate::wave::{estimate_density_wave_with, Coverage, TauParameter};

/// Uniform bins shared by both estimates when computing the l1 error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonGrid {
    /// Lower edge of the first bin.
    pub lo: f64,
    pub du: f64,
    pub bins: usize,
}

impl Default for ComparisonGrid {
    /// 512 bins over `[-pi, pi)`, the native range of the inverted
    /// characteristic function.
    fn default() -> Self {
        ComparisonGrid::over(-PI, PI, 512)
    }
}

impl ComparisonGrid {
    pub fn over(lo: f64, hi: f64, bins: usize) -> Self {
        ComparisonGrid {
            lo,
            du: (hi - lo) / bins as f64,
            bins,
        }
    }

    pub fn project(&self, d: &DensityEstimate) -> Result<DensityEstimate> {
        rebin_density(d, self.lo, self.du, self.bins)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareOptions {
    pub grid: ComparisonGrid,
    pub coverage: Coverage,
    pub exec: Execution,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions {
            grid: ComparisonGrid::default(),
            coverage: Coverage::Enforce,
            exec: Execution::default(),
        }
    }
}

/// Both estimates on the comparison grid and their l1 distance.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub wave: DensityEstimate,
    pub charfunc: DensityEstimate,
    pub error: f64,
}

/// Compares the estimators for a catalog function sampled on `grid`.
pub fn compare_methods(tf: &TestFunction, grid: &GridSpec, tau: f64) -> Result<Comparison> {
    let (big, _) = sample(tf, grid)?;
    compare_fields(&big, tau, &CompareOptions::default())
}

/// Compares the estimators on samples of `S`. The characteristic-function
/// route sees the discrete derivative of those samples.
pub fn compare_fields(big: &ScalarField, tau: f64, opts: &CompareOptions) -> Result<Comparison> {
    let tau = TauParameter::new(tau)?;
    let small = discrete_derivative(big)?;
    let charfunc = opts
        .grid
        .project(&estimate_density_charfunc_with(&small, opts.exec)?)?;
    let wave = opts
        .grid
        .project(&estimate_density_wave_with(big, tau, opts.coverage)?)?;
    let error = l1_distance(&wave, &charfunc)?;
    Ok(Comparison {
        wave,
        charfunc,
        error,
    })
}

/// A `tau` value whose wave estimate could not be produced.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepFailure {
    pub tau: f64,
    pub message: String,
}

/// l1 error per `tau`; failed entries hold `NaN` and are listed in
/// `failures`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub function_name: String,
    pub n: usize,
    pub taus: Vec<f64>,
    pub errors: Vec<f64>,
    pub failures: Vec<SweepFailure>,
}

impl SweepResult {
    /// True when every error is finite and each is below its predecessor.
    pub fn strictly_decreasing(&self) -> bool {
        self.failures.is_empty() && self.errors.windows(2).all(|w| w[1] < w[0])
    }
}

fn validate_taus(taus: &[f64]) -> Result<()> {
    if let Some(t) = taus.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
        return Err(Error::InvalidSweep(format!(
            "tau must be positive, got {t}"
        )));
    }
    if let Some(w) = taus.windows(2).find(|w| w[1] >= w[0]) {
        return Err(Error::InvalidSweep(format!(
            "taus must be strictly descending, got {} then {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

pub fn tau_sweep(tf: &TestFunction, grid: &GridSpec, taus: &[f64]) -> Result<SweepResult> {
    let (big, _) = sample(tf, grid)?;
    tau_sweep_fields(tf.name(), &big, taus, &CompareOptions::default())
}

pub fn tau_sweep_fields(
    name: &str,
    big: &ScalarField,
    taus: &[f64],
    opts: &CompareOptions,
) -> Result<SweepResult> {
    tau_sweep_with(name, big, taus, opts, |small| {
        estimate_density_charfunc_with(small, opts.exec)
    })
}

/// Sweep with a caller-supplied baseline estimator, invoked exactly once on
/// the discrete derivative of `big`.
pub fn tau_sweep_with(
    name: &str,
    big: &ScalarField,
    taus: &[f64],
    opts: &CompareOptions,
    baseline: impl FnOnce(&ScalarField) -> Result<DensityEstimate>,
) -> Result<SweepResult> {
    validate_taus(taus)?;
    let grid = *big.grid();
    let small = discrete_derivative(big)?;
    if opts.coverage == Coverage::Enforce {
        let peak = small.max_abs();
        if let Some(t) = taus.iter().find(|t| PI * **t / grid.dx() < peak) {
            return Err(Error::InvalidSweep(format!(
                "tau = {t:e} cannot resolve max |s| = {peak:.4} at dx = {:e}; need tau >= {:e}",
                grid.dx(),
                peak * grid.dx() / PI
            )));
        }
    }
    let reference = opts.grid.project(&baseline(&small)?)?;

    let outcomes = opts.exec.map_indices(taus.len(), |i| -> Result<f64> {
        let tau = TauParameter::new(taus[i])?;
        let wave = opts
            .grid
            .project(&estimate_density_wave_with(big, tau, opts.coverage)?)?;
        l1_distance(&wave, &reference)
    });

    let mut errors = Vec::with_capacity(taus.len());
    let mut failures = Vec::new();
    for (tau, outcome) in taus.iter().zip(outcomes) {
        match outcome {
            Ok(e) => errors.push(e),
            Err(err) => {
                log::warn!("tau = {tau:e}: {err}");
                errors.push(f64::NAN);
                failures.push(SweepFailure {
                    tau: *tau,
                    message: err.to_string(),
                });
            }
        }
    }
    Ok(SweepResult {
        function_name: name.to_string(),
        n: grid.n(),
        taus: taus.to_vec(),
        errors,
        failures,
    })
}

/// Minimum wall-clock seconds per estimator and grid size.
#[derive(Debug, Clone, PartialEq)]
pub struct TimingTable {
    pub ns: Vec<usize>,
    pub wave_seconds: Vec<f64>,
    pub charfunc_seconds: Vec<f64>,
    pub repetitions: usize,
}

impl TimingTable {
    /// Least-squares slope of `log2 t` against `log2 n` for the wave estimator.
    pub fn wave_slope(&self) -> f64 {
        loglog_slope(&self.ns, &self.wave_seconds)
    }

    pub fn charfunc_slope(&self) -> f64 {
        loglog_slope(&self.ns, &self.charfunc_seconds)
    }
}

pub fn loglog_slope(ns: &[usize], seconds: &[f64]) -> f64 {
    let xs: Vec<f64> = ns.iter().map(|n| (*n as f64).log2()).collect();
    let ys: Vec<f64> = seconds.iter().map(|t| t.log2()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn min_seconds<T>(reps: usize, mut f: impl FnMut() -> Result<T>) -> Result<f64> {
    let mut best = f64::INFINITY;
    for _ in 0..reps {
        let start = Instant::now();
        std::hint::black_box(f()?);
        best = best.min(start.elapsed().as_secs_f64());
    }
    Ok(best.max(f64::MIN_POSITIVE))
}

/// Times both estimators at each grid size, serially on one worker thread.
/// The characteristic-function side runs its direct `O(n^2)` summation.
pub fn benchmark_scaling(
    tf: &TestFunction,
    ns: &[usize],
    tau: f64,
    reps: usize,
) -> Result<TimingTable> {
    if reps < 3 {
        return Err(Error::InvalidBenchmark(format!(
            "need at least 3 repetitions, got {reps}"
        )));
    }
    if ns.is_empty() || ns.iter().any(|n| !n.is_power_of_two() || *n < 4) {
        return Err(Error::InvalidBenchmark(format!(
            "grid sizes must be powers of two >= 4, got {ns:?}"
        )));
    }
    if ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidBenchmark(format!(
            "grid sizes must increase, got {ns:?}"
        )));
    }
    let tau = TauParameter::new(tau)?;

    Execution::pinned(|| {
        let mut table = TimingTable {
            ns: ns.to_vec(),
            wave_seconds: Vec::with_capacity(ns.len()),
            charfunc_seconds: Vec::with_capacity(ns.len()),
            repetitions: reps,
        };
        for &n in ns {
            let (big, _) = sample(tf, &tf.grid(n)?)?;
            let small = discrete_derivative(&big)?;
            table.wave_seconds.push(min_seconds(reps, || {
                estimate_density_wave_with(&big, tau, Coverage::Allow)
            })?);
            table.charfunc_seconds.push(min_seconds(reps, || {
                estimate_density_charfunc_with(&small, Execution::Sequential)
            })?);
            log::info!(
                "n = {n}: wave {:.3e} s, charfunc {:.3e} s",
                table.wave_seconds.last().unwrap(),
                table.charfunc_seconds.last().unwrap()
            );
        }
        Ok(table)
    })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::File::create(path)
        .and_then(|mut f| f.write_all(text.as_bytes()))
        .map_err(|e| Error::io(path, e))
}

/// CSV with header `tau,l1_error`.
pub fn export_sweep(result: &SweepResult, path: &Path) -> Result<()> {
    let mut out = String::from("tau,l1_error\n");
    for (t, e) in result.taus.iter().zip(&result.errors) {
        out.push_str(&format!("{t:.16e},{e:.16e}\n"));
    }
    write_text(path, &out)
}

/// CSV with header `n,wave_seconds,charfunc_seconds`.
pub fn export_timing(table: &TimingTable, path: &Path) -> Result<()> {
    let mut out = String::from("n,wave_seconds,charfunc_seconds\n");
    for ((n, w), c) in table
        .ns
        .iter()
        .zip(&table.wave_seconds)
        .zip(&table.charfunc_seconds)
    {
        out.push_str(&format!("{n},{w:.16e},{c:.16e}\n"));
    }
    write_text(path, &out)
}

fn read_rows<T: serde::de::DeserializeOwned>(path: &Path, header: &[&str]) -> Result<Vec<T>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
    let found = reader.headers().map_err(|e| Error::csv(path, e))?.clone();
    if found.iter().collect::<Vec<_>>() != header {
        return Err(Error::csv(
            path,
            format!("expected header `{}`", header.join(",")),
        ));
    }
    reader
        .deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(|e| Error::csv(path, e))
}

/// Reads `(taus, errors)` written by [`export_sweep`].
pub fn import_sweep(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    Ok(read_rows::<(f64, f64)>(path, &["tau", "l1_error"])?
        .into_iter()
        .unzip())
}

/// Reads a table written by [`export_timing`]; the repetition count is not
/// stored and comes back as zero.
pub fn import_timing(path: &Path) -> Result<TimingTable> {
    let rows = read_rows::<(usize, f64, f64)>(path, &["n", "wave_seconds", "charfunc_seconds"])?;
    Ok(TimingTable {
        ns: rows.iter().map(|r| r.0).collect(),
        wave_seconds: rows.iter().map(|r| r.1).collect(),
        charfunc_seconds: rows.iter().map(|r| r.2).collect(),
        repetitions: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{lookup, Params};

    fn get(name: &str) -> TestFunction {
        lookup(name, &Params::new()).unwrap()
    }

    #[test]
    fn rejects_bad_tau_lists() {
        let q = get("quadratic");
        let g = q.grid(256).unwrap();
        assert!(matches!(
            tau_sweep(&q, &g, &[1e-3, 1e-3]),
            Err(Error::InvalidSweep(_))
        ));
        assert!(matches!(
            tau_sweep(&q, &g, &[1e-3, 2e-3]),
            Err(Error::InvalidSweep(_))
        ));
        // dx = 9.8e-4 needs tau >= 3.1e-4
        assert!(matches!(
            tau_sweep(&q, &g, &[1e-3, 1e-4]),
            Err(Error::InvalidSweep(_))
        ));
    }

    #[test]
    fn baseline_runs_once() {
        let q = get("quadratic");
        let (big, _) = sample(&q, &q.grid(1024).unwrap()).unwrap();
        let mut calls = 0;
        let r = tau_sweep_with(
            "quadratic",
            &big,
            &[2e-3, 1e-3, 5e-4, 3e-4],
            &CompareOptions::default(),
            |small| {
                calls += 1;
                estimate_density_charfunc_with(small, Execution::default())
            },
        )
        .unwrap();
        assert_eq!(calls, 1);
        assert_eq!(r.errors.len(), 4);
        assert!(r.failures.is_empty());
    }

    #[test]
    fn failures_do_not_abort() {
        let q = get("quadratic");
        let (big, _) = sample(&q, &q.grid(1024).unwrap()).unwrap();
        // tau = 0.02 gives du = 0.5 > 2/8
        let r =
            tau_sweep_fields("quadratic", &big, &[0.02, 1e-3], &CompareOptions::default()).unwrap();
        assert!(r.errors[0].is_nan());
        assert!(r.errors[1].is_finite());
        assert_eq!(r.failures.len(), 1);
        assert_eq!(r.failures[0].tau, 0.02);
        assert!(!r.strictly_decreasing());
    }

    #[test]
    fn sweep_is_deterministic() {
        let s = get("sinusoid");
        let g = s.grid(2048).unwrap();
        let a = tau_sweep(&s, &g, &[1e-3, 5e-4]).unwrap();
        let b = tau_sweep(&s, &g, &[1e-3, 5e-4]).unwrap();
        assert_eq!(a.errors, b.errors);
        let (big, _) = sample(&s, &g).unwrap();
        let seq = CompareOptions {
            exec: Execution::Sequential,
            ..Default::default()
        };
        let c = tau_sweep_fields("sinusoid", &big, &[1e-3, 5e-4], &seq).unwrap();
        assert_eq!(a.errors, c.errors);
    }

    #[test]
    fn slope_of_exact_power_law() {
        let ns = [1024, 2048, 4096, 8192];
        let t: Vec<f64> = ns.iter().map(|n| 3e-9 * (*n as f64).powi(2)).collect();
        assert!((loglog_slope(&ns, &t) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn benchmark_preconditions() {
        let q = get("quadratic");
        assert!(matches!(
            benchmark_scaling(&q, &[64, 128], 1e-3, 1),
            Err(Error::InvalidBenchmark(_))
        ));
        assert!(matches!(
            benchmark_scaling(&q, &[64, 100], 1e-3, 3),
            Err(Error::InvalidBenchmark(_))
        ));
        assert!(matches!(
            benchmark_scaling(&q, &[128, 64], 1e-3, 3),
            Err(Error::InvalidBenchmark(_))
        ));
        let t = benchmark_scaling(&q, &[64, 128, 256], 1e-3, 3).unwrap();
        assert_eq!(t.ns.len(), 3);
        assert!(t
            .wave_seconds
            .iter()
            .chain(&t.charfunc_seconds)
            .all(|s| *s > 0.0));
    }
}
