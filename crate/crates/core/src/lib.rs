//! Probability density of a function's derivative, estimated from the power
//! spectrum of the wave function `exp(i S(x) / tau)`.
//!
//! The crate pairs the spectral estimator ([`wave`]) with an independent
//! baseline built on the characteristic function of `s(X) = S'(X)`
//! ([`charfunc`]), a closed-form reference and brute-force oracle
//! ([`reference`]), a catalog of analytic test functions ([`catalog`]) and
//! the experiment drivers in [`harness`].
//!
//! ```
//! use graddens::{catalog, wave, GridSpec, IntervalQuery};
//!
//! let tf = catalog::lookup("quadratic", &Default::default()).unwrap();
//! let grid = GridSpec::new(tf.b1(), tf.b2(), 1 << 12).unwrap();
//! let (s_big, _) = catalog::sample(&tf, &grid).unwrap();
//! let tau = wave::TauParameter::new(1e-4).unwrap();
//! let density = wave::estimate_density_wave(&s_big, tau).unwrap();
//! let mass = density.interval_mass(IntervalQuery::new(-0.5, 1.0).unwrap()).unwrap();
//! assert!((mass - 0.5).abs() < 0.02);
//! ```

pub mod catalog;
pub mod charfunc;
pub mod cli;
pub mod density;
mod error;
pub mod exec;
pub mod grid;
pub mod harness;
pub mod reference;
mod roots;
pub mod wave;

pub use density::{DensityEstimate, IntervalQuery};
pub use error::{Error, Result};
pub use exec::Execution;
pub use grid::{ComplexField, GridSpec, ScalarField};
