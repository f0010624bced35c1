//! Samples and plug-in (divisor n) joint central moment tables.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::monomial::MonomialBasis;
use crate::scalar::Scalar;

/// Observations of one sample, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample<S> {
    dim: usize,
    data: Vec<S>,
}

impl<S: Scalar> Sample<S> {
    pub fn new(dim: usize, data: Vec<S>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dimension("sample dimension must be positive".into()));
        }
        if data.is_empty() {
            return Err(Error::EmptySample);
        }
        if !data.len().is_multiple_of(dim) {
            return Err(Error::Dimension(alloc::format!("{} values do not fill rows of width {dim}", data.len())));
        }
        Ok(Self { dim, data })
    }

    /// A one-dimensional sample.
    ///
    /// # Panics
    /// If `values` is empty.
    pub fn univariate(values: Vec<S>) -> Self {
        Self::new(1, values).expect("nonempty univariate sample")
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let dim = rows.first().map(Vec::len).ok_or(Error::EmptySample)?;
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Dimension("rows of unequal width".into()));
        }
        Self::new(dim, rows.into_iter().flatten().collect())
    }

    pub fn n(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[S]> {
        self.data.chunks(self.dim)
    }

    pub fn values(&self) -> &[S] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        self.rows().map(|r| r[j].clone()).collect()
    }

    /// Applies a transform h to every observation.
    pub fn transform(&self, out_dim: usize, mut h: impl FnMut(&[S]) -> Vec<S>) -> Result<Self> {
        let mut data = Vec::with_capacity(self.n() * out_dim);
        for r in self.rows() {
            let v = h(r);
            if v.len() != out_dim {
                return Err(Error::Dimension("transform returned wrong width".into()));
            }
            data.extend(v);
        }
        Self::new(out_dim, data)
    }

    /// The sample restricted to the given observation indices (repeats allowed).
    pub fn select(&self, idx: &[usize]) -> Result<Self> {
        let mut data = Vec::with_capacity(idx.len() * self.dim);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Self::new(self.dim, data)
    }
}

/// Precomputed layout for moment tables of one dimension and order.
/// Reusing it avoids rebuilding the monomial basis in resampling loops.
#[derive(Clone, Debug)]
pub struct MomentSpec {
    basis: Arc<MonomialBasis>,
}

impl MomentSpec {
    pub fn new(dim: usize, max_order: usize) -> Self {
        Self { basis: Arc::new(MonomialBasis::new(dim, max_order.max(1))) }
    }

    pub fn dim(&self) -> usize {
        self.basis.vars()
    }

    pub fn max_order(&self) -> usize {
        self.basis.degree()
    }

    pub fn table<S: Scalar>(&self, sample: &Sample<S>) -> Result<MomentTable<S>> {
        self.build(sample, sample.n(), |i| i, None)
    }

    /// Moments of the observations at `idx` (a resample or a deletion).
    pub fn table_indexed<S: Scalar>(&self, sample: &Sample<S>, idx: &[usize]) -> Result<MomentTable<S>> {
        self.build(sample, idx.len(), |k| idx[k], None)
    }

    /// Moments of the weighted empirical distribution Σ w_i δ_{x_i} / Σ w_i.
    pub fn table_weighted<S: Scalar>(&self, sample: &Sample<S>, weights: &[S]) -> Result<MomentTable<S>> {
        if weights.len() != sample.n() {
            return Err(Error::Dimension("one weight per observation".into()));
        }
        self.build(sample, sample.n(), |i| i, Some(weights))
    }

    fn build<S: Scalar>(
        &self,
        sample: &Sample<S>,
        count: usize,
        at: impl Fn(usize) -> usize,
        weights: Option<&[S]>,
    ) -> Result<MomentTable<S>> {
        let d = self.dim();
        if sample.dim() != d {
            return Err(Error::Dimension(alloc::format!("table for dimension {d}, sample has {}", sample.dim())));
        }
        if count == 0 {
            return Err(Error::EmptySample);
        }
        let w = |k: usize| weights.map(|w| w[at(k)].clone());
        let total = match weights {
            Some(ws) => ws.iter().cloned().fold(S::zero(), |a, b| a + b),
            None => S::from_usize(count),
        };
        if total.is_zero() {
            return Err(Error::Degenerate("weights sum to zero"));
        }
        // pass 1: mean
        let mut mean = vec![S::zero(); d];
        for k in 0..count {
            let row = sample.row(at(k));
            for (m, x) in mean.iter_mut().zip(row) {
                *m = m.clone() + weighted(x.clone(), w(k));
            }
        }
        for m in mean.iter_mut() {
            *m = m.clone() / total.clone();
        }
        // pass 2: centred monomials
        let basis = &*self.basis;
        let mut acc = vec![S::zero(); basis.len()];
        let mut vals = vec![S::zero(); basis.len()];
        let mut z = vec![S::zero(); d];
        let from = basis.degree_range(1).end;
        for k in 0..count {
            let row = sample.row(at(k));
            for ((zi, x), m) in z.iter_mut().zip(row).zip(&mean) {
                *zi = x.clone() - m.clone();
            }
            vals[0] = S::one();
            for r in 1..basis.len() {
                let (p, v) = basis.parent(r);
                vals[r] = vals[p].clone() * z[v].clone();
            }
            for r in from..basis.len() {
                acc[r] = acc[r].clone() + weighted(vals[r].clone(), w(k));
            }
        }
        acc[0] = total.clone();
        let mut moments: Vec<S> = acc.into_iter().map(|a| a / total.clone()).collect();
        // first central moments vanish identically
        for r in basis.degree_range(1) {
            moments[r] = S::zero();
        }
        Ok(MomentTable { n: count, mean, moments, basis: self.basis.clone() })
    }
}

fn weighted<S: Scalar>(x: S, w: Option<S>) -> S {
    match w {
        Some(w) => x * w,
        None => x,
    }
}

/// Mean vector and joint central moments of one sample, divisor n.
#[derive(Clone, Debug)]
pub struct MomentTable<S> {
    n: usize,
    mean: Vec<S>,
    moments: Vec<S>,
    basis: Arc<MonomialBasis>,
}

impl<S: Scalar> PartialEq for MomentTable<S> {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.mean == other.mean && self.moments == other.moments && self.basis == other.basis
    }
}

/// Plug-in moment table up to total order `max_order`.
pub fn central_moments<S: Scalar>(sample: &Sample<S>, max_order: usize) -> Result<MomentTable<S>> {
    MomentSpec::new(sample.dim(), max_order).table(sample)
}

impl<S: Scalar> MomentTable<S> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.vars()
    }

    pub fn max_order(&self) -> usize {
        self.basis.degree()
    }

    pub fn mean(&self) -> &[S] {
        &self.mean
    }

    /// Joint central moment μ[i_1 ... i_m] for a multiset of coordinates.
    pub fn central(&self, idx: &[usize]) -> Result<S> {
        if idx.iter().any(|&i| i >= self.dim()) {
            return Err(Error::Dimension(alloc::format!("coordinate out of range for dimension {}", self.dim())));
        }
        self.basis
            .rank_of_indices(idx)
            .map(|r| self.moments[r].clone())
            .ok_or(Error::MomentOrder { have: self.max_order(), need: idx.len() })
    }

    /// Central moment E Π (X_v - μ_v)^{e_v}.
    pub fn central_exps(&self, e: &[u32]) -> Result<S> {
        if e.len() != self.dim() {
            return Err(Error::Dimension("exponent vector width".into()));
        }
        self.basis.rank(e).map(|r| self.moments[r].clone()).ok_or(Error::MomentOrder {
            have: self.max_order(),
            need: e.iter().sum::<u32>() as usize,
        })
    }

    /// Univariate central moment μ_r (coordinate 0 of a one-dimensional table).
    pub fn mu(&self, r: usize) -> Result<S> {
        if self.dim() != 1 {
            return Err(Error::Dimension("pure moments need a univariate table".into()));
        }
        if r > self.max_order() {
            return Err(Error::MomentOrder { have: self.max_order(), need: r });
        }
        Ok(self.moments[r].clone())
    }

    /// Fails with a degenerate-sample error when the variance is zero.
    pub fn check_variance(&self) -> Result<S> {
        let m2 = self.mu(2)?;
        let m = self.mean[0].clone();
        let scale = m.clone() * m + m2.clone();
        if m2.negligible(&scale) || m2.to_f64() <= 0.0 {
            return Err(Error::Degenerate("zero variance"));
        }
        Ok(m2)
    }

    /// β_r = μ_r / μ_2^{r/2}.
    pub fn standardized(&self, r: usize) -> Result<S> {
        let m2 = self.check_variance()?;
        let scale = m2.powf(r as f64 / 2.0).ok_or(Error::Inexact("a fractional power of the variance"))?;
        Ok(self.mu(r)? / scale)
    }

    /// Fourth cumulant κ_4 = μ_4 - 3 μ_2^2.
    pub fn kappa4(&self) -> Result<S> {
        let m2 = self.mu(2)?;
        Ok(self.mu(4)? - S::from_i64(3) * m2.clone() * m2)
    }
}

/// β̂_r of a univariate table.
pub fn standardized_moment<S: Scalar>(table: &MomentTable<S>, r: usize) -> Result<S> {
    table.standardized(r)
}
