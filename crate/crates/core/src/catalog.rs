//! Analytic test functions `S` with exact `s = S'` and `S''`.
//!
//! Every member is scaled so that `max |s| = 1` on its domain. The default
//! domain is `[-0.125, 0.125]`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, ScalarField};
use crate::roots::bracket_roots;

pub const DEFAULT_B1: f64 = -0.125;
pub const DEFAULT_B2: f64 = 0.125;

/// Catalog parameter overrides, e.g. `freq -> 8 pi`.
pub type Params = BTreeMap<String, f64>;

pub const NAMES: [&str; 5] = [
    "quadratic",
    "sinusoid",
    "exponential",
    "sum_of_sinusoids",
    "linear_degenerate",
];

#[derive(Debug, Clone, Copy, PartialEq)]
enum Shape {
    /// `4 x^2`
    Quadratic,
    /// `-cos(f x) / f`
    Sinusoid { freq: f64 },
    /// `exp(r x) / r`
    Exponential { rate: f64 },
    /// `-cos(f1 x) / f1 - a cos(f2 x) / f2`
    SumOfSinusoids { freq1: f64, freq2: f64, amp: f64 },
    /// `x`
    LinearDegenerate,
}

impl Shape {
    fn value(&self, x: f64) -> f64 {
        match *self {
            Shape::Quadratic => 4.0 * x * x,
            Shape::Sinusoid { freq } => -(freq * x).cos() / freq,
            Shape::Exponential { rate } => (rate * x).exp() / rate,
            Shape::SumOfSinusoids { freq1, freq2, amp } => {
                -(freq1 * x).cos() / freq1 - amp * (freq2 * x).cos() / freq2
            }
            Shape::LinearDegenerate => x,
        }
    }

    fn derivative(&self, x: f64) -> f64 {
        match *self {
            Shape::Quadratic => 8.0 * x,
            Shape::Sinusoid { freq } => (freq * x).sin(),
            Shape::Exponential { rate } => (rate * x).exp(),
            Shape::SumOfSinusoids { freq1, freq2, amp } => {
                (freq1 * x).sin() + amp * (freq2 * x).sin()
            }
            Shape::LinearDegenerate => 1.0,
        }
    }

    fn second_derivative(&self, x: f64) -> f64 {
        match *self {
            Shape::Quadratic => 8.0,
            Shape::Sinusoid { freq } => freq * (freq * x).cos(),
            Shape::Exponential { rate } => rate * (rate * x).exp(),
            Shape::SumOfSinusoids { freq1, freq2, amp } => {
                freq1 * (freq1 * x).cos() + amp * freq2 * (freq2 * x).cos()
            }
            Shape::LinearDegenerate => 0.0,
        }
    }
}

/// A catalog member: `S`, `s = S'` and `S''` on `[b1, b2]`, already scaled.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    name: String,
    b1: f64,
    b2: f64,
    scale: f64,
    shape: Shape,
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} on [{}, {}]", self.name, self.b1, self.b2)
    }
}

impl TestFunction {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn b1(&self) -> f64 {
        self.b1
    }

    pub fn b2(&self) -> f64 {
        self.b2
    }

    pub fn length(&self) -> f64 {
        self.b2 - self.b1
    }

    /// Factor applied to the canonical form so that `max |s| = 1`.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `S(x)`
    pub fn value(&self, x: f64) -> f64 {
        self.scale * self.shape.value(x)
    }

    /// `s(x) = S'(x)`
    pub fn derivative(&self, x: f64) -> f64 {
        self.scale * self.shape.derivative(x)
    }

    /// `S''(x)`
    pub fn second_derivative(&self, x: f64) -> f64 {
        self.scale * self.shape.second_derivative(x)
    }

    /// A grid with `n` samples over this function's domain.
    pub fn grid(&self, n: usize) -> Result<GridSpec> {
        GridSpec::new(self.b1, self.b2, n)
    }
}

/// Parses a parameter value: a plain number, `pi`, or a number followed by
/// `pi` (`8pi`, `8*pi`, `0.5pi`).
pub fn parse_value(text: &str) -> Result<f64> {
    let t = text.trim().to_ascii_lowercase();
    let bad = || Error::InvalidParams(format!("cannot parse `{text}` as a number"));
    let v = if let Some(coef) = t.strip_suffix("pi") {
        let coef = coef.trim().trim_end_matches('*').trim();
        let c = if coef.is_empty() {
            1.0
        } else if coef == "-" {
            -1.0
        } else {
            coef.parse::<f64>().map_err(|_| bad())?
        };
        c * PI
    } else {
        t.parse::<f64>().map_err(|_| bad())?
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

struct ParamReader<'a> {
    params: &'a Params,
    used: Vec<&'static str>,
}

impl ParamReader<'_> {
    fn get(&mut self, key: &'static str, default: f64) -> f64 {
        self.used.push(key);
        self.params.get(key).copied().unwrap_or(default)
    }

    fn nonzero(&mut self, key: &'static str, default: f64) -> Result<f64> {
        let v = self.get(key, default);
        if v == 0.0 || !v.is_finite() {
            return Err(Error::InvalidParams(format!(
                "`{key}` must be finite and nonzero"
            )));
        }
        Ok(v)
    }

    fn finish(self, name: &str) -> Result<()> {
        match self
            .params
            .keys()
            .find(|k| !self.used.contains(&k.as_str()))
        {
            Some(k) => Err(Error::InvalidParams(format!(
                "`{name}` takes no parameter `{k}`"
            ))),
            None => Ok(()),
        }
    }
}

/// Builds the catalog member `name`. Recognised parameters are `b1`, `b2`
/// (domain) and per member: `freq` (sinusoid), `rate` (exponential),
/// `freq1`, `freq2`, `amp` (sum_of_sinusoids).
pub fn lookup(name: &str, params: &Params) -> Result<TestFunction> {
    let mut reader = ParamReader {
        params,
        used: Vec::new(),
    };
    let b1 = reader.get("b1", DEFAULT_B1);
    let b2 = reader.get("b2", DEFAULT_B2);
    if !(b1.is_finite() && b2.is_finite() && b2 > b1) {
        return Err(Error::InvalidParams(format!("bad domain [{b1}, {b2}]")));
    }
    let shape = match name {
        "quadratic" => Shape::Quadratic,
        "sinusoid" => Shape::Sinusoid {
            freq: reader.nonzero("freq", 8.0 * PI)?,
        },
        "exponential" => Shape::Exponential {
            rate: reader.nonzero("rate", 8.0)?,
        },
        "sum_of_sinusoids" => Shape::SumOfSinusoids {
            freq1: reader.nonzero("freq1", 8.0 * PI)?,
            freq2: reader.nonzero("freq2", 8.0 * PI * 2f64.sqrt())?,
            amp: reader.nonzero("amp", 0.5)?,
        },
        "linear_degenerate" => Shape::LinearDegenerate,
        other => return Err(Error::UnknownFunction(other.to_string())),
    };
    reader.finish(name)?;
    let peak = max_abs_derivative(&shape, b1, b2);
    if !(peak.is_finite() && peak > 0.0) {
        return Err(Error::InvalidParams(format!(
            "derivative of `{name}` vanishes on [{b1}, {b2}]"
        )));
    }
    Ok(TestFunction {
        name: name.to_string(),
        b1,
        b2,
        scale: 1.0 / peak,
        shape,
    })
}

/// `max |s|` over `[b1, b2]`: attained at an endpoint or where `S''` changes
/// sign.
fn max_abs_derivative(shape: &Shape, b1: f64, b2: f64) -> f64 {
    let tol = 1e-15 * (b2 - b1);
    bracket_roots(|x| shape.second_derivative(x), b1, b2, 1 << 14, tol)
        .into_iter()
        .chain([b1, b2])
        .map(|x| shape.derivative(x).abs())
        .fold(0.0, f64::max)
}

/// Exact samples of `S` and `s` at the grid points.
pub fn sample(tf: &TestFunction, grid: &GridSpec) -> Result<(ScalarField, ScalarField)> {
    if !grid.same_interval(tf.b1, tf.b2) {
        return Err(Error::DomainMismatch(format!(
            "grid [{}, {}] vs {}",
            grid.b1(),
            grid.b2(),
            tf
        )));
    }
    let big = ScalarField::from_fn(*grid, |x| tf.value(x))?;
    let small = ScalarField::from_fn(*grid, |x| tf.derivative(x))?;
    Ok((big, small))
}

/// Central differences inside, second-order one-sided differences at the two
/// end samples.
pub fn discrete_derivative(field: &ScalarField) -> Result<ScalarField> {
    let n = field.len();
    if n < 3 {
        return Err(Error::TooFewSamples { needed: 3, got: n });
    }
    let v = field.values();
    let h2 = 2.0 * field.grid().dx();
    let mut out = Vec::with_capacity(n);
    out.push((-3.0 * v[0] + 4.0 * v[1] - v[2]) / h2);
    out.extend(v.windows(3).map(|w| (w[2] - w[0]) / h2));
    out.push((3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / h2);
    ScalarField::new(*field.grid(), out)
}
