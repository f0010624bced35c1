//! Functionals T(F_1, ..., F_k) with plug-in values and the derivative
//! contractions T̂[π_1 ... π_k] consumed by the estimators.
//!
//! T[π] integrates the |π|-th von Mises derivative with arguments repeated
//! according to the parts of π: T[2^2] = ∫∫ T_F(x, x, y, y) dF(x) dF(y).
//! For k samples each sample carries its own partition.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::moments::{MomentSpec, MomentTable, Sample};
use crate::partition::Partition;
use crate::scalar::Scalar;

pub mod catalog;
mod central;
mod features;
mod means;

pub use central::CentralMoment;
pub use features::{FeatureMap, FunctionOfMoments};
pub use means::{DerivativeOracle, FunctionOfMeans, JetFn, JetMap, LinearCombPower, RatioOracle};

pub trait Functional<S: Scalar> {
    fn name(&self) -> &str;

    /// Required dimension of each sample; the length is the arity k.
    fn dims(&self) -> &[usize];

    fn arity(&self) -> usize {
        self.dims().len()
    }

    /// Highest total derivative order `t_pi` supports, if bounded.
    fn max_derivative_order(&self) -> Option<usize> {
        None
    }

    /// Moment order the tables must hold to evaluate derivatives up to
    /// `derivative_order` (and the plug-in value).
    fn moment_order(&self, derivative_order: usize) -> usize;

    fn plug_in(&self, tables: &[MomentTable<S>]) -> Result<S>;

    /// T̂[π_1 ... π_k], one partition per sample (empty for untouched samples).
    fn t_pi(&self, blocks: &[Partition], tables: &[MomentTable<S>]) -> Result<S>;

    /// Several contractions at once; implementations may share setup work.
    fn t_pi_batch(&self, blocks: &[Vec<Partition>], tables: &[MomentTable<S>]) -> Result<Vec<S>> {
        blocks.iter().map(|b| self.t_pi(b, tables)).collect()
    }
}

impl<S: Scalar, F: Functional<S> + ?Sized> Functional<S> for &F {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn dims(&self) -> &[usize] {
        (**self).dims()
    }
    fn max_derivative_order(&self) -> Option<usize> {
        (**self).max_derivative_order()
    }
    fn moment_order(&self, d: usize) -> usize {
        (**self).moment_order(d)
    }
    fn plug_in(&self, tables: &[MomentTable<S>]) -> Result<S> {
        (**self).plug_in(tables)
    }
    fn t_pi(&self, blocks: &[Partition], tables: &[MomentTable<S>]) -> Result<S> {
        (**self).t_pi(blocks, tables)
    }
    fn t_pi_batch(&self, blocks: &[Vec<Partition>], tables: &[MomentTable<S>]) -> Result<Vec<S>> {
        (**self).t_pi_batch(blocks, tables)
    }
}

impl<S: Scalar, F: Functional<S> + ?Sized> Functional<S> for alloc::boxed::Box<F> {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn dims(&self) -> &[usize] {
        (**self).dims()
    }
    fn max_derivative_order(&self) -> Option<usize> {
        (**self).max_derivative_order()
    }
    fn moment_order(&self, d: usize) -> usize {
        (**self).moment_order(d)
    }
    fn plug_in(&self, tables: &[MomentTable<S>]) -> Result<S> {
        (**self).plug_in(tables)
    }
    fn t_pi(&self, blocks: &[Partition], tables: &[MomentTable<S>]) -> Result<S> {
        (**self).t_pi(blocks, tables)
    }
    fn t_pi_batch(&self, blocks: &[Vec<Partition>], tables: &[MomentTable<S>]) -> Result<Vec<S>> {
        (**self).t_pi_batch(blocks, tables)
    }
}

/// Validates arity, dimensions and moment depth of `tables` for `f`.
pub fn check_tables<S: Scalar, F: Functional<S> + ?Sized>(
    f: &F,
    tables: &[MomentTable<S>],
    derivative_order: usize,
) -> Result<()> {
    if tables.len() != f.arity() {
        return Err(Error::Arity { expected: f.arity(), got: tables.len() });
    }
    if let Some(max) = f.max_derivative_order() {
        if derivative_order > max {
            return Err(Error::UnsupportedOrder(alloc::format!(
                "{} supports derivatives up to order {max}, {derivative_order} requested",
                f.name()
            )));
        }
    }
    let need = f.moment_order(derivative_order);
    for (t, &d) in tables.iter().zip(f.dims()) {
        if t.dim() != d {
            return Err(Error::Dimension(alloc::format!("{} expects dimension {d}, got {}", f.name(), t.dim())));
        }
        if t.max_order() < need {
            return Err(Error::MomentOrder { have: t.max_order(), need });
        }
    }
    Ok(())
}

/// Builds the moment tables `f` needs for derivatives up to `derivative_order`.
pub fn tables_for<S: Scalar, F: Functional<S> + ?Sized>(
    f: &F,
    samples: &[Sample<S>],
    derivative_order: usize,
) -> Result<Vec<MomentTable<S>>> {
    if samples.len() != f.arity() {
        return Err(Error::Arity { expected: f.arity(), got: samples.len() });
    }
    let order = f.moment_order(derivative_order);
    samples
        .iter()
        .zip(f.dims())
        .map(|(s, &d)| {
            if s.dim() != d {
                return Err(Error::Dimension(alloc::format!("{} expects dimension {d}, got {}", f.name(), s.dim())));
            }
            MomentSpec::new(d, order).table(s)
        })
        .collect()
}

/// Plug-in value straight from samples.
pub fn plug_in_samples<S: Scalar, F: Functional<S> + ?Sized>(f: &F, samples: &[Sample<S>]) -> Result<S> {
    let tables = tables_for(f, samples, 0)?;
    f.plug_in(&tables)
}

/// Derivative contractions vanish when any argument appears once,
/// because every von Mises derivative integrates to zero in each argument.
pub(crate) fn touches_single(blocks: &[Partition]) -> bool {
    blocks.iter().any(Partition::has_one)
}

pub(crate) fn check_blocks(blocks: &[Partition], arity: usize) -> Result<()> {
    if blocks.len() != arity {
        return Err(Error::Arity { expected: arity, got: blocks.len() });
    }
    Ok(())
}
