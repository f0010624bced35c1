//! Smooth functions of (transformed) means, T(F) = g(μ), one or several samples.
//!
//! For g of the stacked mean vector, the r-th von Mises derivative is
//! g_{i_1...i_r} Π (h_{i_l}(x_l) - μ_{i_l}), so T[π] contracts the partial
//! derivatives of g against joint central moments, one moment per part.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{check_blocks, touches_single, Functional};
use crate::error::{Error, Result};
use crate::jet::{Jet, JetShape};
use crate::moments::MomentTable;
use crate::partition::{compositions, Partition};
use crate::scalar::Scalar;

/// Supplies g and its partial derivatives at a point.
pub trait DerivativeOracle<S: Scalar> {
    fn dim(&self) -> usize;

    /// Highest derivative order available, if bounded.
    fn max_order(&self) -> Option<usize> {
        None
    }

    fn value(&self, at: &[S]) -> Result<S>;

    /// Taylor jet of g at `at` through total degree `order`.
    fn jet(&self, at: &[S], order: usize) -> Result<Jet<S>>;
}

/// A map on jets; written once, it yields values and all derivatives.
pub type JetMap<S> = Box<dyn Fn(&[Jet<S>]) -> Result<Jet<S>> + Send + Sync>;

/// Derivative oracle backed by jet arithmetic.
pub struct JetFn<S> {
    dim: usize,
    f: JetMap<S>,
}

impl<S: Scalar> JetFn<S> {
    pub fn new(dim: usize, f: impl Fn(&[Jet<S>]) -> Result<Jet<S>> + Send + Sync + 'static) -> Self {
        Self { dim, f: Box::new(f) }
    }
}

impl<S: Scalar> DerivativeOracle<S> for JetFn<S> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, at: &[S]) -> Result<S> {
        let c: Vec<Jet<S>> = at.iter().cloned().map(Jet::constant).collect();
        Ok((self.f)(&c)?.value().clone())
    }
    fn jet(&self, at: &[S], order: usize) -> Result<Jet<S>> {
        (self.f)(&Jet::variables(at, order))
    }
}

/// Fills a jet from a closed-form partial-derivative callback.
fn jet_from_partials<S: Scalar>(
    at: &[S],
    order: usize,
    mut partial: impl FnMut(&[u32]) -> Result<S>,
) -> Result<Jet<S>> {
    let shape = JetShape::new(at.len(), order);
    let mut coeffs = Vec::with_capacity(shape.basis().len());
    for r in 0..shape.basis().len() {
        let e = shape.basis().exponents(r);
        let fact: i64 = e.iter().map(|&x| (1..=x as i64).product::<i64>()).product();
        coeffs.push(partial(e)? / S::from_i64(fact));
    }
    Ok(Jet::from_coeffs(shape, coeffs))
}

/// g(μ) = (α'μ)^q.
#[derive(Clone, Debug)]
pub struct LinearCombPower<S> {
    alpha: Vec<S>,
    q: f64,
}

impl<S: Scalar> LinearCombPower<S> {
    pub fn new(alpha: Vec<S>, q: f64) -> Self {
        Self { alpha, q }
    }

    pub fn alpha(&self) -> &[S] {
        &self.alpha
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    fn combo(&self, at: &[S]) -> S {
        self.alpha.iter().zip(at).fold(S::zero(), |a, (x, m)| a + x.clone() * m.clone())
    }

    /// (q)_r N^{q-r}, zero when the falling factorial vanishes.
    fn scaled_power(&self, n: &S, r: usize) -> Result<S> {
        let mut falling = 1.0f64;
        for l in 0..r {
            falling *= self.q - l as f64;
        }
        if falling == 0.0 {
            return Ok(S::zero());
        }
        let fr = S::from_f64(falling).ok_or(Error::Invalid("non-finite exponent".into()))?;
        let pw = n.powf(self.q - r as f64).ok_or(Error::Singular("zero linear combination of means"))?;
        Ok(fr * pw)
    }
}

impl<S: Scalar> DerivativeOracle<S> for LinearCombPower<S> {
    fn dim(&self) -> usize {
        self.alpha.len()
    }
    fn value(&self, at: &[S]) -> Result<S> {
        self.scaled_power(&self.combo(at), 0)
    }
    fn jet(&self, at: &[S], order: usize) -> Result<Jet<S>> {
        let n = self.combo(at);
        jet_from_partials(at, order, |e| {
            let r: usize = e.iter().sum::<u32>() as usize;
            let mut prod = self.scaled_power(&n, r)?;
            for (a, &k) in self.alpha.iter().zip(e) {
                prod = prod * a.powi(k as i32);
            }
            Ok(prod)
        })
    }
}

/// g(μ_1, μ_2) = μ_1 / μ_2, with g_{1 2^j} = (-1)^j j! μ_2^{-j-1} and
/// g_{2^j} = μ_1 g_{1 2^j}.
#[derive(Clone, Copy, Debug, Default)]
pub struct RatioOracle;

impl<S: Scalar> DerivativeOracle<S> for RatioOracle {
    fn dim(&self) -> usize {
        2
    }
    fn value(&self, at: &[S]) -> Result<S> {
        if at[1].is_zero() {
            return Err(Error::Singular("zero denominator mean"));
        }
        Ok(at[0].clone() / at[1].clone())
    }
    fn jet(&self, at: &[S], order: usize) -> Result<Jet<S>> {
        if at[1].is_zero() {
            return Err(Error::Singular("zero denominator mean"));
        }
        let inv = at[1].recip();
        jet_from_partials(at, order, |e| {
            let j = e[1] as i32;
            let mut a = inv.powi(j + 1) * S::from_i64((1..=j as i64).product());
            if j % 2 == 1 {
                a = -a;
            }
            Ok(match e[0] {
                0 => at[0].clone() * a,
                1 => a,
                _ => S::zero(),
            })
        })
    }
}

/// T(F_1, ..., F_k) = g(E h(X_1), ..., E h(X_k)) with the mean vectors stacked.
pub struct FunctionOfMeans<S, O> {
    name: String,
    dims: Vec<usize>,
    oracle: O,
    _s: core::marker::PhantomData<fn() -> S>,
}

impl<S: Scalar, O: DerivativeOracle<S>> FunctionOfMeans<S, O> {
    /// `dims[j]` is the dimension of sample j; their sum must match the oracle.
    pub fn new(name: impl Into<String>, dims: Vec<usize>, oracle: O) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::Dimension("every sample needs a positive dimension".into()));
        }
        if dims.iter().sum::<usize>() != oracle.dim() {
            return Err(Error::Dimension(alloc::format!(
                "oracle takes {} means, samples provide {}",
                oracle.dim(),
                dims.iter().sum::<usize>()
            )));
        }
        Ok(Self { name: name.into(), dims, oracle, _s: core::marker::PhantomData })
    }

    pub fn oracle(&self) -> &O {
        &self.oracle
    }

    fn stacked_means(&self, tables: &[MomentTable<S>]) -> Result<Vec<S>> {
        if tables.len() != self.dims.len() {
            return Err(Error::Arity { expected: self.dims.len(), got: tables.len() });
        }
        let mut at = Vec::with_capacity(self.oracle.dim());
        for (t, &d) in tables.iter().zip(&self.dims) {
            if t.dim() != d {
                return Err(Error::Dimension(alloc::format!("{} expects dimension {d}, got {}", self.name, t.dim())));
            }
            at.extend_from_slice(t.mean());
        }
        Ok(at)
    }

    fn contract(&self, jet: &Jet<S>, blocks: &[Partition], tables: &[MomentTable<S>]) -> Result<S> {
        check_blocks(blocks, self.dims.len())?;
        if touches_single(blocks) {
            return Ok(S::zero());
        }
        // flatten to (sample, block size) pairs
        let mut list = Vec::new();
        for (j, b) in blocks.iter().enumerate() {
            for &p in b.parts() {
                list.push((j, p));
            }
        }
        let mut offsets = Vec::with_capacity(self.dims.len());
        let mut o = 0;
        for &d in &self.dims {
            offsets.push(o);
            o += d;
        }
        let mut global = vec![0u32; o];
        let mut total = S::zero();
        self.walk(jet, tables, &list, &offsets, 0, S::one(), &mut global, &mut total)?;
        Ok(total)
    }

    #[allow(clippy::too_many_arguments)]
    fn walk(
        &self,
        jet: &Jet<S>,
        tables: &[MomentTable<S>],
        list: &[(usize, usize)],
        offsets: &[usize],
        at: usize,
        weight: S,
        global: &mut [u32],
        total: &mut S,
    ) -> Result<()> {
        if at == list.len() {
            let d = jet.partial(global);
            *total = total.clone() + weight * d;
            return Ok(());
        }
        let (j, size) = list[at];
        let dim = self.dims[j];
        for c in compositions(size, dim) {
            let e: Vec<u32> = c.iter().map(|&x| x as u32).collect();
            let m = tables[j].central_exps(&e)?;
            if m.is_zero() {
                continue;
            }
            // number of orderings of the slot indices within the block
            let mut mult: i64 = (1..=size as i64).product();
            for &x in &c {
                mult /= (1..=x as i64).product::<i64>();
            }
            for (v, &x) in c.iter().enumerate() {
                global[offsets[j] + v] += x as u32;
            }
            let w = weight.clone() * m * S::from_i64(mult);
            self.walk(jet, tables, list, offsets, at + 1, w, global, total)?;
            for (v, &x) in c.iter().enumerate() {
                global[offsets[j] + v] -= x as u32;
            }
        }
        Ok(())
    }
}

impl<S: Scalar, O: DerivativeOracle<S>> Functional<S> for FunctionOfMeans<S, O> {
    fn name(&self) -> &str {
        &self.name
    }

    fn dims(&self) -> &[usize] {
        &self.dims
    }

    fn max_derivative_order(&self) -> Option<usize> {
        self.oracle.max_order()
    }

    fn moment_order(&self, derivative_order: usize) -> usize {
        derivative_order.max(1)
    }

    fn plug_in(&self, tables: &[MomentTable<S>]) -> Result<S> {
        let at = self.stacked_means(tables)?;
        self.oracle.value(&at)
    }

    fn t_pi(&self, blocks: &[Partition], tables: &[MomentTable<S>]) -> Result<S> {
        let order: usize = blocks.iter().map(Partition::weight).sum();
        let at = self.stacked_means(tables)?;
        let jet = self.oracle.jet(&at, order)?;
        self.contract(&jet, blocks, tables)
    }

    fn t_pi_batch(&self, blocks: &[Vec<Partition>], tables: &[MomentTable<S>]) -> Result<Vec<S>> {
        let order = blocks.iter().map(|b| b.iter().map(Partition::weight).sum::<usize>()).max().unwrap_or(0);
        let at = self.stacked_means(tables)?;
        let jet = self.oracle.jet(&at, order)?;
        blocks.iter().map(|b| self.contract(&jet, b, tables)).collect()
    }
}
