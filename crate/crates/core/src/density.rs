//! Discrete densities on uniform bin grids, and the operations that compare,
//! realign and integrate them.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Allowed deviation of `sum(p) * du` from one.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// A density sampled at uniformly spaced bin centers. Bin `k` covers
/// `[u_k - du/2, u_k + du/2)`. Always nonnegative with unit mass.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityEstimate {
    u: Vec<f64>,
    p: Vec<f64>,
    du: f64,
}

/// The interval `[u0, u0 + alpha]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalQuery {
    pub u0: f64,
    pub alpha: f64,
}

impl IntervalQuery {
    pub fn new(u0: f64, alpha: f64) -> Result<Self> {
        if !(u0.is_finite() && alpha.is_finite()) || alpha <= 0.0 {
            return Err(Error::OutOfRange(format!(
                "interval width must be positive, got alpha = {alpha}"
            )));
        }
        Ok(IntervalQuery { u0, alpha })
    }

    pub fn end(&self) -> f64 {
        self.u0 + self.alpha
    }
}

fn centers(u_start: f64, du: f64, m: usize) -> Vec<f64> {
    (0..m).map(|k| u_start + k as f64 * du).collect()
}

impl DensityEstimate {
    /// Density with centers `u_start + k du`. `p` must already have unit mass.
    pub fn new(u_start: f64, du: f64, p: Vec<f64>) -> Result<Self> {
        if !(du.is_finite() && du > 0.0 && u_start.is_finite()) {
            return Err(Error::InvalidDensity(format!(
                "bad grid: start {u_start}, width {du}"
            )));
        }
        let u = centers(u_start, du, p.len());
        Self::checked(u, p, du)
    }

    /// Scales nonnegative `weights` to unit mass.
    pub fn from_weights(u_start: f64, du: f64, mut weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum::<f64>() * du;
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::InvalidDensity(format!(
                "cannot normalize weights with total mass {total}"
            )));
        }
        for w in &mut weights {
            *w /= total;
        }
        Self::new(u_start, du, weights)
    }

    /// Builds a density from explicit centers, which must form an arithmetic
    /// progression.
    pub fn from_centers(u: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if u.len() != p.len() {
            return Err(Error::InvalidDensity(format!(
                "{} centers but {} values",
                u.len(),
                p.len()
            )));
        }
        let du = uniform_step(&u)?;
        Self::checked(u, p, du)
    }

    fn checked(u: Vec<f64>, p: Vec<f64>, du: f64) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidDensity("no bins".into()));
        }
        if let Some(k) = p.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidDensity(format!("bin {k} has value {}", p[k])));
        }
        let d = DensityEstimate { u, p, du };
        let mass = d.mass();
        if (mass - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidDensity(format!("total mass {mass}")));
        }
        Ok(d)
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn du(&self) -> f64 {
        self.du
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn mass(&self) -> f64 {
        self.p.iter().sum::<f64>() * self.du
    }

    /// Lower edge of the first bin.
    pub fn lo(&self) -> f64 {
        self.u[0] - 0.5 * self.du
    }

    /// Upper edge of the last bin.
    pub fn hi(&self) -> f64 {
        self.u[self.u.len() - 1] + 0.5 * self.du
    }

    /// Same bin count and centers within 1e-12.
    pub fn same_grid(&self, other: &DensityEstimate) -> bool {
        self.len() == other.len()
            && self
                .u
                .iter()
                .zip(&other.u)
                .all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(1.0))
    }

    /// Mass of `[a, b]`, with partial bins weighted by their overlap. Parts of
    /// the interval outside the bin range contribute nothing.
    pub(crate) fn mass_between(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let lo = self.lo();
        let m = self.len() as f64;
        let first = ((a - lo) / self.du).floor().clamp(0.0, m) as usize;
        let last = ((b - lo) / self.du).ceil().clamp(0.0, m) as usize;
        let half = 0.5 * self.du;
        (first..last)
            .map(|k| {
                let left = (self.u[k] - half).max(a);
                let right = (self.u[k] + half).min(b);
                if right > left {
                    self.p[k] * (right - left)
                } else {
                    0.0
                }
            })
            .sum()
    }

    /// `integral of p over [u0, u0 + alpha]`.
    pub fn interval_mass(&self, q: IntervalQuery) -> Result<f64> {
        let tol = 1e-9 * self.du;
        if q.u0 < self.lo() - tol || q.end() > self.hi() + tol {
            return Err(Error::OutOfRange(format!(
                "[{}, {}] is outside the density range [{}, {}]",
                q.u0,
                q.end(),
                self.lo(),
                self.hi()
            )));
        }
        Ok(self.mass_between(q.u0, q.end()))
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::with_capacity(48 * self.len() + 8);
        out.push_str("u,p\n");
        for (u, p) in self.u.iter().zip(&self.p) {
            out.push_str(&format!("{u:.16e},{p:.16e}\n"));
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::File::create(path)
            .and_then(|mut f| f.write_all(self.to_csv_string().as_bytes()))
            .map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
        let headers = reader.headers().map_err(|e| Error::csv(path, e))?.clone();
        if headers.iter().collect::<Vec<_>>() != ["u", "p"] {
            return Err(Error::csv(path, "expected header `u,p`"));
        }
        let mut u = Vec::new();
        let mut p = Vec::new();
        for row in reader.deserialize::<(f64, f64)>() {
            let (uk, pk) = row.map_err(|e| Error::csv(path, e))?;
            u.push(uk);
            p.push(pk);
        }
        Self::from_centers(u, p).map_err(|e| Error::InvalidInput {
            path: path.into(),
            message: e.to_string(),
        })
    }
}

fn uniform_step(u: &[f64]) -> Result<f64> {
    if u.len() < 2 {
        return Err(Error::InvalidDensity(
            "need at least two centers to infer the bin width".into(),
        ));
    }
    let du = (u[u.len() - 1] - u[0]) / (u.len() - 1) as f64;
    if !(du.is_finite() && du > 0.0) {
        return Err(Error::InvalidDensity("centers must be increasing".into()));
    }
    for (k, uk) in u.iter().enumerate() {
        let expected = u[0] + k as f64 * du;
        if (uk - expected).abs() > 1e-9 * du + 4.0 * f64::EPSILON * uk.abs() {
            return Err(Error::InvalidDensity(format!(
                "center {k} at {uk} breaks uniform spacing {du}"
            )));
        }
    }
    Ok(du)
}

/// `E = sum_k |a_k - b_k| du`: the summed absolute difference of per-bin
/// probabilities. Both estimates must share one bin grid.
pub fn l1_distance(a: &DensityEstimate, b: &DensityEstimate) -> Result<f64> {
    if !a.same_grid(b) {
        return Err(Error::GridMismatch(format!(
            "{} bins on [{}, {}] vs {} bins on [{}, {}]",
            a.len(),
            a.lo(),
            a.hi(),
            b.len(),
            b.lo(),
            b.hi()
        )));
    }
    Ok(a.p
        .iter()
        .zip(&b.p)
        .map(|(x, y)| (x - y).abs())
        .sum::<f64>()
        * a.du)
}

/// Linear interpolation of `d` onto the uniform centers `target_u`, then
/// renormalized. Targets up to one bin beyond `d`'s outermost centers
/// interpolate towards zero; anything further out is an error.
pub fn resample_density(d: &DensityEstimate, target_u: &[f64]) -> Result<DensityEstimate> {
    let du = uniform_step(target_u)?;
    if d.u.len() == target_u.len()
        && d.u
            .iter()
            .zip(target_u)
            .all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(1.0))
    {
        return DensityEstimate::from_weights(target_u[0], du, d.p.clone());
    }
    let last = d.len() - 1;
    let mut weights = Vec::with_capacity(target_u.len());
    for &t in target_u {
        let pos = (t - d.u[0]) / d.du;
        if pos < -1.0 - 1e-9 || pos > last as f64 + 1.0 + 1e-9 {
            return Err(Error::OutOfRange(format!(
                "target center {t} lies more than one bin outside [{}, {}]",
                d.u[0], d.u[last]
            )));
        }
        let at = |k: isize| -> f64 {
            if k < 0 || k as usize > last {
                0.0
            } else {
                d.p[k as usize]
            }
        };
        let k = pos.floor();
        let frac = pos - k;
        let k = k as isize;
        weights.push(at(k) * (1.0 - frac) + at(k + 1) * frac);
    }
    DensityEstimate::from_weights(target_u[0], du, weights)
}

/// Mass-conserving transfer of `d` onto `bins` bins of width `du` starting at
/// edge `lo`: each target bin receives the mass `d` assigns to its span.
/// Mass outside the target range is dropped and the result renormalized.
pub fn rebin_density(
    d: &DensityEstimate,
    lo: f64,
    du: f64,
    bins: usize,
) -> Result<DensityEstimate> {
    if bins == 0 || !(du.is_finite() && du > 0.0) {
        return Err(Error::InvalidDensity(format!(
            "bad target grid: {bins} bins of width {du}"
        )));
    }
    let weights = (0..bins)
        .map(|k| {
            let a = lo + k as f64 * du;
            d.mass_between(a, a + du) / du
        })
        .collect();
    DensityEstimate::from_weights(lo + 0.5 * du, du, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(lo: f64, hi: f64, m: usize) -> DensityEstimate {
        let du = (hi - lo) / m as f64;
        DensityEstimate::new(lo + 0.5 * du, du, vec![1.0 / (hi - lo); m]).unwrap()
    }

    fn triangle(m: usize) -> DensityEstimate {
        // p(u) = 1 - |u| on [-1, 1]
        let du = 2.0 / m as f64;
        let w = (0..m)
            .map(|k| 1.0 - (-1.0 + (k as f64 + 0.5) * du).abs())
            .collect();
        DensityEstimate::from_weights(-1.0 + 0.5 * du, du, w).unwrap()
    }

    #[test]
    fn validation() {
        assert!(DensityEstimate::new(0.0, 1.0, vec![0.5, 0.5]).is_ok());
        assert!(DensityEstimate::new(0.0, 1.0, vec![0.5, 0.6]).is_err());
        assert!(DensityEstimate::new(0.0, 1.0, vec![1.5, -0.5]).is_err());
        assert!(DensityEstimate::new(0.0, 0.0, vec![1.0]).is_err());
        assert!(DensityEstimate::from_centers(vec![0.0, 1.0, 2.5], vec![0.3, 0.3, 0.4]).is_err());
        assert!(DensityEstimate::from_weights(0.0, 1.0, vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn l1_examples() {
        let d = uniform(-1.0, 1.0, 8);
        assert_eq!(l1_distance(&d, &d).unwrap(), 0.0);
        let a = DensityEstimate::new(0.0, 1.0, vec![0.5, 0.5]).unwrap();
        let b = DensityEstimate::new(0.0, 1.0, vec![1.0, 0.0]).unwrap();
        assert_eq!(l1_distance(&a, &b).unwrap(), 1.0);
        let c = uniform(-1.0, 1.0, 4);
        assert!(matches!(l1_distance(&d, &c), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn identity_resample_is_exact() {
        let t = triangle(64);
        let r = resample_density(&t, t.u()).unwrap();
        assert_eq!(r.p(), t.p());
    }

    #[test]
    fn uniform_resample_keeps_interior() {
        let d = uniform(-1.0, 1.0, 64);
        let du = 2.0 / 128.0;
        let target = centers(-1.0 + 0.5 * du, du, 128);
        let r = resample_density(&d, &target).unwrap();
        // Only the outermost half-bins see the zero padding.
        for &p in &r.p()[1..127] {
            assert!((p / r.p()[64] - 1.0).abs() < 1e-12);
        }
        assert!((r.mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn resample_range_checks() {
        let d = uniform(-1.0, 1.0, 20);
        // within one bin of the outer centers: zero padded
        let ok: Vec<f64> = (0..22).map(|k| -1.05 + 0.1 * k as f64).collect();
        assert!(resample_density(&d, &ok).is_ok());
        let far: Vec<f64> = (0..30).map(|k| -1.5 + 0.1 * k as f64).collect();
        assert!(matches!(
            resample_density(&d, &far),
            Err(Error::OutOfRange(_))
        ));
    }

    #[test]
    fn triangle_round_trip() {
        let t = triangle(256);
        let coarse_du = 2.0 * t.du();
        let coarse = centers(-1.0 + 0.5 * coarse_du, coarse_du, 128);
        let down = resample_density(&t, &coarse).unwrap();
        let back = resample_density(&down, t.u()).unwrap();
        let e = l1_distance(&t, &back).unwrap();
        // 1.2e-4 at du = 7.8e-3; the peak and the two ends dominate.
        assert!(e < 2e-4, "round trip error {e}");
    }

    #[test]
    fn interval_mass_examples() {
        let t = triangle(200);
        let full = IntervalQuery::new(t.lo(), t.hi() - t.lo()).unwrap();
        assert!((t.interval_mass(full).unwrap() - 1.0).abs() < 1e-9);
        let d = uniform(-1.0, 1.0, 16);
        let half = d
            .interval_mass(IntervalQuery::new(-0.5, 1.0).unwrap())
            .unwrap();
        assert!((half - 0.5).abs() < 1e-12);
        // fractional edge bins
        let q = IntervalQuery::new(-0.03, 0.01).unwrap();
        assert!((d.interval_mass(q).unwrap() - 0.005).abs() < 1e-15);
        assert!(matches!(
            d.interval_mass(IntervalQuery::new(0.9, 0.2).unwrap()),
            Err(Error::OutOfRange(_))
        ));
        assert!(IntervalQuery::new(0.0, 0.0).is_err());
    }

    #[test]
    fn rebin_conserves_mass() {
        let t = triangle(1000);
        let r = rebin_density(&t, -1.0, 0.1, 20).unwrap();
        // exact bin masses of the triangle
        for (k, p) in r.p().iter().enumerate() {
            let a = -1.0 + 0.1 * k as f64;
            let b = a + 0.1;
            let cdf = |x: f64| {
                if x < 0.0 {
                    0.5 * (1.0 + x) * (1.0 + x)
                } else {
                    1.0 - 0.5 * (1.0 - x) * (1.0 - x)
                }
            };
            assert!((p * 0.1 - (cdf(b) - cdf(a))).abs() < 1e-4);
        }
        assert!(rebin_density(&t, 5.0, 0.1, 10).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        let t = triangle(37);
        t.write_csv(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("u,p\n"));
        let back = DensityEstimate::read_csv(&path).unwrap();
        assert_eq!(back.p(), t.p());
        assert_eq!(back.u(), t.u());
    }
}
