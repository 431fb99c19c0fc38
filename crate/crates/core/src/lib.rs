//! Stochastic dominance between linear combinations of i.i.d. samples.
//!
//! The crate estimates `P(θ₁X₁ + … + θₛXₛ ≤ x)` from one sample by iterating a
//! weighted convolution of the empirical CDF with itself, and tests
//! `θ·X ≥st η·X` with either a Cauchy least-favourable calibration or a
//! multinomial bootstrap. Supporting modules cover the weight-vector orders
//! (majorization, T-transforms, h-splits), grid checks of the distribution
//! classes under which dominance is guaranteed, the limiting covariance of
//! the plug-in process, and a reproducible power-study harness.
//!
//! ```
//! use sdcomb::{combine, empirical::Sample, WeightVector};
//!
//! let s = Sample::new(vec![0.0, 1.0]).unwrap();
//! let mean2 = combine::exact_combination_cdf(&s, &WeightVector::sample_mean(2)).unwrap();
//! let single = combine::exact_combination_cdf(&s, &WeightVector::sample_mean(1)).unwrap();
//! let (t, at) = combine::sup_positive_diff(&mean2, &single);
//! assert_eq!((t, at), (0.25, 0.5));
//! ```

pub mod asymptotics;
pub mod cli;
pub mod combine;
pub mod distributions;
pub mod empirical;
pub mod error;
pub mod majorization;
pub mod quadrature;
pub mod sdtest;
pub mod seed;
pub mod shapeclass;
pub mod simharness;

pub use combine::{CombinationCdf, GridLayout, GridSpec, WeightVector};
pub use distributions::{DiscreteDistribution, Family, FamilySpec};
pub use empirical::{EmpiricalCdf, Sample};
pub use error::{Error, Result};
pub use sdtest::{Method, TestConfig, TestResult};

/// Anything that can be evaluated as a cumulative distribution function.
pub trait Cdf {
    fn cdf(&self, x: f64) -> f64;
}

impl<F: Fn(f64) -> f64> Cdf for F {
    fn cdf(&self, x: f64) -> f64 {
        self(x)
    }
}
