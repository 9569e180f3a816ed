//! Ground truth for the estimators.
//!
//! * the closed-form density `P(u0) = (1/L) sum_k 1 / |S''(x_k)|` over the
//!   level set `{x : s(x) = u0}`;
//! * the sets `B = {x : S''(x) = 0}` and `C = s(B) ∪ {s(b1), s(b2)}` where
//!   that density is undefined;
//! * a histogram of sampled derivative values;
//! * the stationary-phase closed form of the scaled transform `F_tau(u0)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::catalog::TestFunction;
use crate::density::DensityEstimate;
use crate::error::{Error, Result};
use crate::grid::ScalarField;
use crate::roots::bracket_roots;
use crate::wave::TauParameter;

/// Curvatures at or below `EPS_B_RELATIVE * max |S''|` count as zero.
pub const EPS_B_RELATIVE: f64 = 1e-8;
/// Distance in `u` below which a query counts as touching `C`.
pub const EPS_C: f64 = 1e-6;
/// Probe cells for root bracketing.
pub const DEFAULT_PROBE: usize = 4096;
const MAX_PROBE: usize = 1 << 22;

/// Roots of `s(x) = u0` with the curvature `S''` at each.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSet {
    pub u0: f64,
    pub roots: Vec<f64>,
    pub curvatures: Vec<f64>,
}

/// The sets `B` and `C` of a function, and how far a query `u0` sits from `C`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyReport {
    pub u0: f64,
    pub b_points: Vec<f64>,
    pub c_values: Vec<f64>,
    /// Half the distance from `u0` to the nearest element of `C`.
    pub eta: f64,
    pub clean: bool,
}

fn probe_points(tf: &TestFunction, probe_n: usize) -> impl Iterator<Item = f64> + '_ {
    let h = tf.length() / probe_n as f64;
    (0..=probe_n).map(move |i| {
        if i == probe_n {
            tf.b2()
        } else {
            tf.b1() + i as f64 * h
        }
    })
}

fn max_curvature(tf: &TestFunction, probe_n: usize) -> f64 {
    probe_points(tf, probe_n)
        .map(|x| tf.second_derivative(x).abs())
        .fold(0.0, f64::max)
}

fn root_tolerance(tf: &TestFunction) -> f64 {
    1e-13 * tf.length()
}

/// Roots of `s(x) - u0` on the probe grid, refined by bisection, with their
/// curvatures. `u0` must stay clear of `C`.
pub fn find_level_set(tf: &TestFunction, u0: f64, probe_n: usize) -> Result<LevelSet> {
    require_clean(tf, u0)?;
    let probe_n = probe_n.max(2);
    let roots: Vec<f64> = bracket_roots(
        |x| tf.derivative(x) - u0,
        tf.b1(),
        tf.b2(),
        probe_n,
        root_tolerance(tf),
    )
    .into_iter()
    .filter(|x| *x > tf.b1() && *x < tf.b2())
    .collect();

    let cell = tf.length() / probe_n as f64;
    if let Some(w) = roots.windows(2).find(|w| w[1] - w[0] < 2.0 * cell) {
        return Err(Error::ProbeTooCoarse(format!(
            "roots {} and {} of s = {u0} are within two probe cells",
            w[0], w[1]
        )));
    }

    let eps_b = EPS_B_RELATIVE * max_curvature(tf, probe_n);
    let curvatures: Vec<f64> = roots.iter().map(|&x| tf.second_derivative(x)).collect();
    if let Some(k) = curvatures.iter().position(|c| c.abs() <= eps_b) {
        return Err(Error::DegenerateQuery(format!(
            "S'' = {:e} at root x = {} of s = {u0}",
            curvatures[k], roots[k]
        )));
    }
    Ok(LevelSet {
        u0,
        roots,
        curvatures,
    })
}

/// [`find_level_set`], quadrupling the probe count while roots crowd.
fn level_set_refined(tf: &TestFunction, u0: f64) -> Result<LevelSet> {
    let mut probe_n = DEFAULT_PROBE;
    loop {
        match find_level_set(tf, u0, probe_n) {
            Err(Error::ProbeTooCoarse(_)) if probe_n < MAX_PROBE => probe_n *= 4,
            other => return other,
        }
    }
}

fn require_clean(tf: &TestFunction, u0: f64) -> Result<()> {
    let report = detect_degenerate(tf, u0)?;
    if report.clean {
        Ok(())
    } else {
        Err(Error::DegenerateQuery(format!(
            "u0 = {u0} is within {EPS_C:e} of the degenerate set {:?}",
            report.c_values
        )))
    }
}

/// `P(u0) = (1/L) sum_k 1 / |S''(x_k)|`; zero when no `x` has `s(x) = u0`.
pub fn analytic_density_at(tf: &TestFunction, u0: f64) -> Result<f64> {
    let level = level_set_refined(tf, u0)?;
    let sum: f64 = level.curvatures.iter().map(|c| 1.0 / c.abs()).sum();
    Ok(sum / tf.length())
}

/// Locates `B` (sign changes of `S''`) and `C`, and checks `u0` against `C`.
pub fn detect_degenerate(tf: &TestFunction, u0: f64) -> Result<DegeneracyReport> {
    let probe_n = DEFAULT_PROBE;
    let eps_b = EPS_B_RELATIVE * max_curvature(tf, probe_n);
    let flat = probe_points(tf, probe_n)
        .filter(|&x| tf.second_derivative(x).abs() <= eps_b)
        .count();
    if 2 * flat > probe_n + 1 {
        return Err(Error::EverywhereDegenerate(format!(
            "S'' vanishes on {flat} of {} probe points of {tf}; its zero set has positive measure",
            probe_n + 1
        )));
    }

    let b_points: Vec<f64> = bracket_roots(
        |x| tf.second_derivative(x),
        tf.b1(),
        tf.b2(),
        probe_n,
        root_tolerance(tf),
    );
    let mut c_values: Vec<f64> = b_points
        .iter()
        .map(|&x| tf.derivative(x))
        .chain([tf.derivative(tf.b1()), tf.derivative(tf.b2())])
        .collect();
    c_values.sort_by(f64::total_cmp);
    c_values.dedup_by(|a, b| (*a - *b).abs() <= EPS_C);

    let gap = c_values
        .iter()
        .map(|c| (u0 - c).abs())
        .fold(f64::INFINITY, f64::min);
    Ok(DegeneracyReport {
        u0,
        b_points,
        c_values,
        eta: 0.5 * gap,
        clean: gap > EPS_C,
    })
}

/// Histogram of the sampled derivative values with `bins` equal bins whose
/// centers run from `min s` to `max s`.
pub fn histogram_oracle(s: &ScalarField, bins: usize) -> Result<DensityEstimate> {
    if bins < 8 {
        return Err(Error::InvalidParams(format!(
            "need at least 8 bins, got {bins}"
        )));
    }
    let values = s.values();
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(*v), b.max(*v))
        });
    let (start, du) = if hi > lo {
        (lo, (hi - lo) / (bins - 1) as f64)
    } else {
        // all samples equal: unit-width window centred on the value
        let du = 1.0 / bins as f64;
        (lo - (bins / 2) as f64 * du, du)
    };
    let mut counts = vec![0.0; bins];
    for v in values {
        let k = ((v - start) / du).round().clamp(0.0, (bins - 1) as f64) as usize;
        counts[k] += 1.0;
    }
    DensityEstimate::from_weights(start, du, counts)
}

/// Leading stationary-phase term of the scaled transform:
/// `F_tau(u0) ~ L^(-1/2) sum_k exp(i (S(x_k) - u0 x_k) / tau) exp(±i pi/4) / sqrt|S''(x_k)|`
/// with `+` where `S''(x_k) > 0`.
pub fn stationary_phase_transform(
    tf: &TestFunction,
    u0: f64,
    tau: TauParameter,
) -> Result<Complex64> {
    let level = level_set_refined(tf, u0)?;
    let t = tau.get();
    let sum: Complex64 = level
        .roots
        .iter()
        .zip(&level.curvatures)
        .map(|(&x, &c)| {
            let phase = (tf.value(x) - u0 * x) / t + c.signum() * PI / 4.0;
            Complex64::cis(phase) / c.abs().sqrt()
        })
        .sum();
    Ok(sum / tf.length().sqrt())
}
