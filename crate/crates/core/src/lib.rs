//! Analytic p-th order bias reduction for smooth functionals of k samples.
//!
//! The crate builds the V, S and T series estimators from integer-partition
//! combinatorics and von Mises derivative tables. Everything is generic over
//! [`Scalar`], so the same code runs in `f64` and in exact rational arithmetic.
//!
//! ```
//! use unbias_core::{functional::catalog, Estimator, EstimatorKind, Sample};
//!
//! let sample = Sample::univariate(vec![1.0, 2.0, 4.0, 8.0, 3.0]);
//! let f = catalog::central_moment(2);
//! let est = Estimator::<f64>::new(EstimatorKind::S, 2, 1).unwrap();
//! let report = est.estimate_samples(&f, &[sample]).unwrap();
//! // S at p = 2 turns the plug-in variance into the (n - 1)-divisor variance.
//! assert!((report.value - 7.3).abs() < 1e-12);
//! ```
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod baselines;
pub mod coefficients;
pub mod discrepancy;
pub mod error;
pub mod estimator;
pub mod functional;
pub mod jet;
pub mod moments;
pub mod monomial;
pub mod partition;
pub mod scalar;

pub use error::Error;
pub use estimator::{EstimateReport, Estimator, EstimatorKind};
pub use functional::Functional;
pub use jet::Jet;
pub use moments::{central_moments, MomentSpec, MomentTable, Sample};
pub use partition::Partition;
pub use scalar::Scalar;

pub use num_bigint::BigInt;
pub use num_rational::BigRational;
